#include <applan/tasks.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace applan {

FloorPlan floorplan_from_ascii(std::string name, const std::vector<std::string>& rows, double cell_size_m,
                               int level) {
    if (rows.empty() || rows[0].empty()) throw ConfigError("grid must be non-empty");
    const std::size_t cols = rows[0].size();
    std::vector<CellKind> cells;
    cells.reserve(rows.size() * cols);
    for (const std::string& r : rows) {
        if (r.size() != cols) throw ConfigError("grid rows must have equal length");
        for (char ch : r) {
            switch (ch) {
                case '.': cells.push_back(CellKind::FreeSpace); break;
                case '#': cells.push_back(CellKind::Wall); break;
                case 'w': cells.push_back(CellKind::Window); break;
                case 'd': cells.push_back(CellKind::Door); break;
                default: throw ConfigError(std::string("unknown cell kind '") + ch + "'");
            }
        }
    }
    return FloorPlan(std::move(name), level, rows.size(), cols, std::move(cells), cell_size_m);
}

FloorPlan open_room(double width_m, double height_m, double cell_size_m) {
    if (!(width_m > 0.0) || !(height_m > 0.0) || !(cell_size_m > 0.0)) throw ConfigError("room size must be positive");
    const auto w = static_cast<std::size_t>(std::lround(width_m / cell_size_m)) + 2;
    const auto h = static_cast<std::size_t>(std::lround(height_m / cell_size_m)) + 2;
    std::vector<std::string> rows(h, std::string(w, '.'));
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c)
            if (r == 0 || c == 0 || r == h - 1 || c == w - 1) rows[r][c] = '#';
    char name[64];
    std::snprintf(name, sizeof name, "open_room_%gx%g", width_m, height_m);
    return floorplan_from_ascii(name, rows, cell_size_m, 1);
}

namespace {

constexpr std::size_t kTwoModeCols = 45;
constexpr std::size_t kTwoModeRows = 21;
constexpr std::size_t kHallWidth = 13;  // interior columns of each side hall
constexpr double kTwoModeCell = 0.5;

}  // namespace

// Two open halls on the left and right, a grid of small closets between them.
FloorPlan two_mode_floorplan() {
    constexpr std::size_t left = kHallWidth + 1, right = kTwoModeCols - kHallWidth - 2;
    std::vector<std::string> g(kTwoModeRows, std::string(kTwoModeCols, '.'));
    for (std::size_t r = 0; r < kTwoModeRows; ++r)
        for (std::size_t c = 0; c < kTwoModeCols; ++c) {
            const bool border = r == 0 || c == 0 || r == kTwoModeRows - 1 || c == kTwoModeCols - 1;
            const bool closet = c > left && c < right && ((c - left) % 4 == 0 || r % 5 == 0);
            if (border || c == left || c == right || closet) g[r][c] = '#';
        }
    return floorplan_from_ascii("two_mode", g, kTwoModeCell, 3);
}

PlanningTask two_mode_task() {
    PlanningTask t{two_mode_floorplan(), RewardConfig{}};
    t.reward.task.name = "two_mode";
    t.reward.task.n_aps = 1;
    t.reward.task.coverage_target = 0.44;
    return t;
}

int two_mode_region(const Position& p) {
    const double hall = kTwoModeCell * (kHallWidth + 1);
    const double width = kTwoModeCell * kTwoModeCols;
    if (p.x < hall) return 0;
    if (p.x > width - hall) return 1;
    return -1;
}

std::vector<std::string> builtin_task_names() { return {"two_mode", "open_room"}; }

PlanningTask builtin_task(const std::string& name) {
    if (name == "two_mode") return two_mode_task();
    if (name == "open_room") {
        PlanningTask t{open_room(6.0, 6.0), RewardConfig{}};
        t.reward.task.name = "open_room";
        t.reward.task.n_aps = 1;
        t.reward.task.coverage_target = 0.9;
        return t;
    }
    throw ConfigError("unknown builtin task: " + name);
}

}  // namespace applan
