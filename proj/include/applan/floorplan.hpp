#pragma once

#include <applan/common.hpp>

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace applan {

enum class CellKind : uint8_t { FreeSpace = 0, Wall = 1, Window = 2, Door = 3 };

struct MaterialLoss {
    double wall = 12.0;
    double window = 6.0;
    double door = 3.0;

    double of(CellKind k) const;
    bool operator==(const MaterialLoss&) const = default;
};

struct CellIndex {
    std::size_t row = 0;
    std::size_t col = 0;
};

class FloorPlan {
public:
    FloorPlan(std::string name, int level, std::size_t rows, std::size_t cols,
              std::vector<CellKind> cells, double cell_size_m = 0.5,
              double z_min = 0.0, double z_max = 3.0, MaterialLoss loss = {},
              double origin_x = 0.0, double origin_y = 0.0);

    const std::string& name() const { return name_; }
    int level() const { return level_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double cell_size() const { return cell_size_; }
    double z_min() const { return z_min_; }
    double z_max() const { return z_max_; }
    double z_eval() const { return 0.5 * (z_min_ + z_max_); }
    double origin_x() const { return origin_x_; }
    double origin_y() const { return origin_y_; }
    double x_max() const { return origin_x_ + cols_ * cell_size_; }
    double y_max() const { return origin_y_ + rows_ * cell_size_; }
    const MaterialLoss& material_loss() const { return loss_; }
    double loss_db(std::size_t row, std::size_t col) const { return loss_table_[static_cast<int>(at(row, col))]; }

    CellKind at(std::size_t row, std::size_t col) const { return cells_[row * cols_ + col]; }
    const std::vector<CellKind>& cells() const { return cells_; }
    std::size_t count(CellKind k) const;

    // Cell containing (x, y); points on the far edge belong to the last cell.
    std::optional<CellIndex> cell_of(double x, double y) const;
    Position cell_center(std::size_t row, std::size_t col, double z) const;

    bool operator==(const FloorPlan&) const = default;

private:
    std::string name_;
    int level_;
    std::size_t rows_;
    std::size_t cols_;
    std::vector<CellKind> cells_;
    double cell_size_;
    double z_min_;
    double z_max_;
    MaterialLoss loss_;
    double origin_x_;
    double origin_y_;
    std::array<double, 4> loss_table_;
};

FloorPlan load_floorplan(std::string_view json_text);
FloorPlan load_floorplan_file(const std::string& path);
std::string serialize_floorplan(const FloorPlan& fp);

FloorPlan generate_synthetic(int level, double width_m, double height_m, uint64_t seed,
                             double cell_size_m = 0.5);

bool is_feasible_position(const FloorPlan& fp, const Position& p);

std::vector<Position> indoor_cells(const FloorPlan& fp);
std::vector<Position> indoor_cells(const FloorPlan& fp, double z_eval);
std::vector<CellIndex> free_cell_indices(const FloorPlan& fp);

// Nearest point of the closed union of FreeSpace cells, with z clamped into
// bounds. Identity on feasible positions.
Position project_to_domain(const FloorPlan& fp, const Position& p);

// Center of the FreeSpace cell nearest to p, keeping p's z clamped into bounds.
// Feasible positions are returned unchanged.
Position snap_to_free_cell(const FloorPlan& fp, const Position& p);

// True when every FreeSpace and Door cell is 4-connected through FreeSpace/Door cells.
bool free_space_connected(const FloorPlan& fp);

}  // namespace applan
