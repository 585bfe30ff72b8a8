#pragma once

#include <applan/reward.hpp>

#include <string>
#include <vector>

namespace applan {

// '.' free space, '#' wall, 'w' window, 'd' door; first string is row 0.
FloorPlan floorplan_from_ascii(std::string name, const std::vector<std::string>& rows, double cell_size_m = 0.5,
                               int level = 1);

// Rectangular room of the given interior size surrounded by a one-cell wall.
FloorPlan open_room(double width_m, double height_m, double cell_size_m = 0.5);

struct PlanningTask {
    FloorPlan floorplan;
    RewardConfig reward;
};

// Two large halls joined through a block of small walled closets. With one AP
// the reward has two symmetric optima, one in each hall, separated by a
// fragmented low-reward region.
FloorPlan two_mode_floorplan();
PlanningTask two_mode_task();

// Index of the hall (0 left, 1 right) containing p, or -1 elsewhere.
int two_mode_region(const Position& p);

std::vector<std::string> builtin_task_names();
PlanningTask builtin_task(const std::string& name);

}  // namespace applan
