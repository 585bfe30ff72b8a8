#include <applan/floorplan.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

namespace applan {

using nlohmann::json;

double MaterialLoss::of(CellKind k) const {
    switch (k) {
        case CellKind::FreeSpace: return 0.0;
        case CellKind::Wall: return wall;
        case CellKind::Window: return window;
        case CellKind::Door: return door;
    }
    return 0.0;
}

FloorPlan::FloorPlan(std::string name, int level, std::size_t rows, std::size_t cols,
                     std::vector<CellKind> cells, double cell_size_m, double z_min, double z_max,
                     MaterialLoss loss, double origin_x, double origin_y)
    : name_(std::move(name)), level_(level), rows_(rows), cols_(cols), cells_(std::move(cells)),
      cell_size_(cell_size_m), z_min_(z_min), z_max_(z_max), loss_(loss), origin_x_(origin_x),
      origin_y_(origin_y) {
    if (rows_ == 0 || cols_ == 0) throw ConfigError("grid must be non-empty");
    if (cells_.size() != rows_ * cols_) throw ConfigError("grid size does not match rows x cols");
    if (!(cell_size_ > 0.0) || !std::isfinite(cell_size_)) throw ConfigError("cell size must be positive");
    if (!(z_min_ < z_max_)) throw ConfigError("z_min must be below z_max");
    if (!(loss_.wall >= 0.0 && loss_.window >= 0.0 && loss_.door >= 0.0))
        throw ConfigError("material losses must be non-negative");
    for (CellKind k : cells_)
        if (static_cast<int>(k) > 3) throw ConfigError("unknown cell kind");
    loss_table_ = {0.0, loss_.wall, loss_.window, loss_.door};
}

std::size_t FloorPlan::count(CellKind k) const {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), k));
}

std::optional<CellIndex> FloorPlan::cell_of(double x, double y) const {
    if (!std::isfinite(x) || !std::isfinite(y)) return std::nullopt;
    if (x < origin_x_ || y < origin_y_ || x > x_max() || y > y_max()) return std::nullopt;
    auto col = static_cast<std::size_t>(std::floor((x - origin_x_) / cell_size_));
    auto row = static_cast<std::size_t>(std::floor((y - origin_y_) / cell_size_));
    return CellIndex{std::min(row, rows_ - 1), std::min(col, cols_ - 1)};
}

Position FloorPlan::cell_center(std::size_t row, std::size_t col, double z) const {
    return {origin_x_ + (col + 0.5) * cell_size_, origin_y_ + (row + 0.5) * cell_size_, z};
}

FloorPlan load_floorplan(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed document: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("malformed document: expected a JSON object");
    try {
        if (!doc.contains("grid") || !doc["grid"].is_array())
            throw ConfigError("malformed document: missing grid");
        const json& grid = doc["grid"];
        if (grid.empty()) throw ConfigError("grid must be non-empty");
        const std::size_t rows = grid.size();
        if (!grid[0].is_array() || grid[0].empty()) throw ConfigError("grid must be non-empty");
        const std::size_t cols = grid[0].size();
        std::vector<CellKind> cells;
        cells.reserve(rows * cols);
        for (const json& row : grid) {
            if (!row.is_array() || row.size() != cols)
                throw ConfigError("malformed document: grid rows must have equal length");
            for (const json& v : row) {
                if (!v.is_number_integer()) throw ConfigError("malformed document: cell codes must be integers");
                const auto code = v.get<long long>();
                if (code < 0 || code > 3) throw ConfigError("unknown cell kind");
                cells.push_back(static_cast<CellKind>(code));
            }
        }
        MaterialLoss loss;
        if (doc.contains("material_loss_db")) {
            const json& m = doc["material_loss_db"];
            loss.wall = m.value("wall", loss.wall);
            loss.window = m.value("window", loss.window);
            loss.door = m.value("door", loss.door);
        }
        double ox = 0.0, oy = 0.0;
        if (doc.contains("origin")) {
            const json& o = doc["origin"];
            if (!o.is_array() || o.size() != 2) throw ConfigError("malformed document: origin must be [x, y]");
            ox = o[0].get<double>();
            oy = o[1].get<double>();
        }
        const int level = doc.value("level", 1);
        if (level < 1 || level > 4) throw ConfigError("level must be in 1..4");
        return FloorPlan(doc.value("name", std::string("floorplan")), level, rows, cols, std::move(cells),
                         doc.value("cell_size_m", 0.5), doc.value("z_min", 0.0), doc.value("z_max", 3.0),
                         loss, ox, oy);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed document: ") + e.what());
    }
}

FloorPlan load_floorplan_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open floorplan file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_floorplan(ss.str());
}

std::string serialize_floorplan(const FloorPlan& fp) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"name\": " << json(fp.name()).dump() << ",\n";
    out << "  \"level\": " << fp.level() << ",\n";
    out << "  \"cell_size_m\": " << json(fp.cell_size()).dump() << ",\n";
    out << "  \"z_min\": " << json(fp.z_min()).dump() << ",\n";
    out << "  \"z_max\": " << json(fp.z_max()).dump() << ",\n";
    out << "  \"origin\": [" << json(fp.origin_x()).dump() << ", " << json(fp.origin_y()).dump() << "],\n";
    const MaterialLoss& m = fp.material_loss();
    out << "  \"material_loss_db\": {\"wall\": " << json(m.wall).dump() << ", \"window\": "
        << json(m.window).dump() << ", \"door\": " << json(m.door).dump() << "},\n";
    out << "  \"grid\": [\n";
    for (std::size_t r = 0; r < fp.rows(); ++r) {
        out << "    [";
        for (std::size_t c = 0; c < fp.cols(); ++c) {
            if (c) out << ',';
            out << static_cast<int>(fp.at(r, c));
        }
        out << (r + 1 < fp.rows() ? "],\n" : "]\n");
    }
    out << "  ]\n}\n";
    return out.str();
}

namespace {

struct Rect {
    int r0, c0, r1, c1;  // half-open interior span of free cells
    int height() const { return r1 - r0; }
    int width() const { return c1 - c0; }
};

class Builder {
public:
    Builder(int level, int rows, int cols, uint64_t seed, double cell)
        : level_(level), rows_(rows), cols_(cols), seed_(seed), cell_(cell),
          grid_(static_cast<std::size_t>(rows * cols), CellKind::FreeSpace) {
        static constexpr double kMinRoomM[] = {8.0, 5.0, 3.5, 2.5};
        min_room_ = std::max(3, static_cast<int>(std::ceil(kMinRoomM[level - 1] / cell)));
    }

    std::vector<CellKind> build() {
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c)
                if (r == 0 || c == 0 || r == rows_ - 1 || c == cols_ - 1) set(r, c, CellKind::Wall);
        split({1, 1, rows_ - 1, cols_ - 1}, 1);
        return std::move(grid_);
    }

private:
    CellKind get(int r, int c) const { return grid_[static_cast<std::size_t>(r * cols_ + c)]; }
    void set(int r, int c, CellKind k) { grid_[static_cast<std::size_t>(r * cols_ + c)] = k; }

    // Split decisions depend only on the node path, never on the level, so a
    // higher level refines the same partition further.
    void split(const Rect& room, uint64_t path) {
        Rng rng(seed_, path);
        const double frac = 0.35 + 0.3 * rng.uniform();
        const bool tie_horizontal = rng.uniform() < 0.5;
        const double door_frac = rng.uniform();
        const double window_draw = rng.uniform();
        const double window_frac = rng.uniform();

        const bool can_h = room.height() >= 2 * min_room_ + 1;
        const bool can_v = room.width() >= 2 * min_room_ + 1;
        if (!can_h && !can_v) {
            place_pillar(room, rng);
            return;
        }
        bool horizontal;
        if (can_h && can_v)
            horizontal = room.height() == room.width() ? tie_horizontal : room.height() > room.width();
        else
            horizontal = can_h;

        const int span = horizontal ? room.height() : room.width();
        const int lo = min_room_;
        const int hi = span - min_room_ - 1;
        int offset = std::clamp(static_cast<int>(std::lround(frac * (span - 1))), lo, hi);
        // Keep the new wall off door cells of the enclosing walls.
        int chosen = -1;
        for (int delta : {0, 1, -1, 2, -2, 3, -3}) {
            const int o = offset + delta;
            if (o < lo || o > hi) continue;
            if (!touches_door(room, horizontal, o)) {
                chosen = o;
                break;
            }
        }
        if (chosen < 0) {
            place_pillar(room, rng);
            return;
        }
        offset = chosen;

        const int len = horizontal ? room.width() : room.height();
        auto wall_cell = [&](int i, CellKind k) {
            if (horizontal)
                set(room.r0 + offset, room.c0 + i, k);
            else
                set(room.r0 + i, room.c0 + offset, k);
        };
        for (int i = 0; i < len; ++i) wall_cell(i, CellKind::Wall);

        // Two-cell door away from the wall ends.
        const int door_at = 1 + static_cast<int>(door_frac * (len - 3));
        wall_cell(door_at, CellKind::Door);
        wall_cell(door_at + 1, CellKind::Door);

        // A glazed run on some partitions, not overlapping the door.
        if (window_draw < 0.4 && len >= 9) {
            const int run = 3;
            const int w_at = 1 + static_cast<int>(window_frac * (len - run - 1));
            if (w_at + run <= door_at - 1 || w_at >= door_at + 3)
                for (int i = 0; i < run; ++i) wall_cell(w_at + i, CellKind::Window);
        }

        Rect a = room, b = room;
        if (horizontal) {
            a.r1 = room.r0 + offset;
            b.r0 = room.r0 + offset + 1;
        } else {
            a.c1 = room.c0 + offset;
            b.c0 = room.c0 + offset + 1;
        }
        split(a, path * 2);
        split(b, path * 2 + 1);
    }

    bool touches_door(const Rect& room, bool horizontal, int offset) const {
        if (horizontal) {
            const int r = room.r0 + offset;
            return get(r, room.c0 - 1) == CellKind::Door || get(r, room.c1) == CellKind::Door;
        }
        const int c = room.c0 + offset;
        return get(room.r0 - 1, c) == CellKind::Door || get(room.r1, c) == CellKind::Door;
    }

    void place_pillar(const Rect& room, Rng& rng) {
        if (level_ < 4 || room.height() < 5 || room.width() < 5) return;
        const int r = room.r0 + 2 + static_cast<int>(rng.uniform() * (room.height() - 4));
        const int c = room.c0 + 2 + static_cast<int>(rng.uniform() * (room.width() - 4));
        for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc)
                if (get(r + dr, c + dc) != CellKind::FreeSpace) return;
        set(r, c, CellKind::Wall);
    }

    int level_;
    int rows_;
    int cols_;
    uint64_t seed_;
    double cell_;
    int min_room_ = 3;
    std::vector<CellKind> grid_;
};

}  // namespace

FloorPlan generate_synthetic(int level, double width_m, double height_m, uint64_t seed, double cell_size_m) {
    if (level < 1 || level > 4) throw ConfigError("level must be in 1..4");
    if (!(width_m >= 4.0) || !(height_m >= 4.0)) throw ConfigError("floorplan dimensions must be at least 4 m");
    if (!(cell_size_m > 0.0)) throw ConfigError("cell size must be positive");
    const int cols = static_cast<int>(std::lround(width_m / cell_size_m));
    const int rows = static_cast<int>(std::lround(height_m / cell_size_m));
    Builder b(level, rows, cols, seed, cell_size_m);
    auto cells = b.build();
    std::ostringstream name;
    name << "synthetic_L" << level << "_" << width_m << "x" << height_m << "_s" << seed;
    return FloorPlan(name.str(), level, static_cast<std::size_t>(rows), static_cast<std::size_t>(cols),
                     std::move(cells), cell_size_m, 0.0, 3.0, MaterialLoss{});
}

bool is_feasible_position(const FloorPlan& fp, const Position& p) {
    if (!std::isfinite(p.z) || p.z < fp.z_min() || p.z > fp.z_max()) return false;
    auto cell = fp.cell_of(p.x, p.y);
    return cell && fp.at(cell->row, cell->col) == CellKind::FreeSpace;
}

std::vector<Position> indoor_cells(const FloorPlan& fp) { return indoor_cells(fp, fp.z_eval()); }

std::vector<Position> indoor_cells(const FloorPlan& fp, double z_eval) {
    std::vector<Position> out;
    for (std::size_t r = 0; r < fp.rows(); ++r)
        for (std::size_t c = 0; c < fp.cols(); ++c)
            if (fp.at(r, c) == CellKind::FreeSpace) out.push_back(fp.cell_center(r, c, z_eval));
    return out;
}

std::vector<CellIndex> free_cell_indices(const FloorPlan& fp) {
    std::vector<CellIndex> out;
    for (std::size_t r = 0; r < fp.rows(); ++r)
        for (std::size_t c = 0; c < fp.cols(); ++c)
            if (fp.at(r, c) == CellKind::FreeSpace) out.push_back({r, c});
    return out;
}

Position project_to_domain(const FloorPlan& fp, const Position& p) {
    if (is_feasible_position(fp, p)) return p;
    const double z = std::clamp(p.z, fp.z_min(), fp.z_max());
    auto cell = fp.cell_of(p.x, p.y);
    if (cell && fp.at(cell->row, cell->col) == CellKind::FreeSpace) return {p.x, p.y, z};
    const double cs = fp.cell_size();
    double best = std::numeric_limits<double>::infinity();
    Position out{p.x, p.y, z};
    for (std::size_t r = 0; r < fp.rows(); ++r) {
        const double y0 = fp.origin_y() + r * cs;
        const double qy = std::clamp(p.y, y0, y0 + cs);
        const double dy = p.y - qy;
        if (dy * dy >= best) continue;
        for (std::size_t c = 0; c < fp.cols(); ++c) {
            if (fp.at(r, c) != CellKind::FreeSpace) continue;
            const double x0 = fp.origin_x() + c * cs;
            const double qx = std::clamp(p.x, x0, x0 + cs);
            const double dx = p.x - qx;
            const double d2 = dx * dx + dy * dy;
            if (d2 < best) {
                best = d2;
                out = {qx, qy, z};
            }
        }
    }
    return out;
}

Position snap_to_free_cell(const FloorPlan& fp, const Position& p) {
    if (is_feasible_position(fp, p)) return p;
    const double z = std::isfinite(p.z) ? std::clamp(p.z, fp.z_min(), fp.z_max()) : fp.z_eval();
    auto cell = fp.cell_of(p.x, p.y);
    if (cell && fp.at(cell->row, cell->col) == CellKind::FreeSpace) return {p.x, p.y, z};
    double best = std::numeric_limits<double>::infinity();
    Position out{p.x, p.y, z};
    bool found = false;
    for (std::size_t r = 0; r < fp.rows(); ++r)
        for (std::size_t c = 0; c < fp.cols(); ++c) {
            if (fp.at(r, c) != CellKind::FreeSpace) continue;
            const Position q = fp.cell_center(r, c, z);
            const double dx = p.x - q.x, dy = p.y - q.y;
            const double d2 = dx * dx + dy * dy;
            if (d2 < best) {
                best = d2;
                out = q;
                found = true;
            }
        }
    if (!found) throw ConfigError("floorplan has no free cells");
    return out;
}

bool free_space_connected(const FloorPlan& fp) {
    const std::size_t R = fp.rows(), C = fp.cols();
    auto passable = [&](std::size_t r, std::size_t c) {
        const CellKind k = fp.at(r, c);
        return k == CellKind::FreeSpace || k == CellKind::Door;
    };
    std::vector<char> seen(R * C, 0);
    std::queue<std::pair<std::size_t, std::size_t>> q;
    std::size_t total = 0;
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t c = 0; c < C; ++c)
            if (passable(r, c)) {
                if (total++ == 0) {
                    q.push({r, c});
                    seen[r * C + c] = 1;
                }
            }
    std::size_t reached = 0;
    while (!q.empty()) {
        auto [r, c] = q.front();
        q.pop();
        ++reached;
        const int dr[] = {1, -1, 0, 0};
        const int dc[] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            const long nr = static_cast<long>(r) + dr[k];
            const long nc = static_cast<long>(c) + dc[k];
            if (nr < 0 || nc < 0 || nr >= static_cast<long>(R) || nc >= static_cast<long>(C)) continue;
            const auto ur = static_cast<std::size_t>(nr), uc = static_cast<std::size_t>(nc);
            if (!seen[ur * C + uc] && passable(ur, uc)) {
                seen[ur * C + uc] = 1;
                q.push({ur, uc});
            }
        }
    }
    return reached == total;
}

}  // namespace applan
