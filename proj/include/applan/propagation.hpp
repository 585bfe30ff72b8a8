#pragma once

#include <applan/floorplan.hpp>

#include <string>
#include <vector>

namespace applan {

struct RadioConfig {
    double carrier_hz = 2.4e9;
    double bandwidth_hz = 20e6;
    double tx_power_dbm = 20.0;
    double antenna_gain_dbi = 3.0;
    double pathloss_exponent = 3.0;
    double reference_loss_db = 40.0;
    double reference_distance_m = 1.0;
    double noise_psd_dbm_per_hz = -174.0;
    double noise_figure_db = 7.0;
    double pathloss_threshold_db = 90.0;

    void validate() const;
    double noise_dbm() const;
    double noise_mw() const;
    double eirp_dbm() const { return tx_power_dbm + 2.0 * antenna_gain_dbi; }
};

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

// Cells whose interior the open 2D segment a->b intersects, in traversal order
// from the lexicographically smaller endpoint. Symmetric under endpoint swap.
std::vector<CellIndex> crossed_cells(const FloorPlan& fp, const Position& a, const Position& b);
double wall_loss_db(const FloorPlan& fp, const Position& a, const Position& b);

double pathloss_db(const FloorPlan& fp, const Position& ap, const Position& r, const RadioConfig& cfg);

// Distance term only; the material term is piecewise constant in the AP position.
// grad receives dPL/d(ap) and is zero inside the reference distance.
double pathloss_db(const FloorPlan& fp, const Position& ap, const Position& r, const RadioConfig& cfg,
                   Vec3& grad);

struct RadioMap {
    std::size_t n_aps = 0;
    std::vector<Position> cells;
    std::vector<CellIndex> cell_index;
    std::vector<double> pathloss;  // n_aps rows of cells.size() entries
    std::vector<std::size_t> serving_ap;
    std::vector<double> best_pathloss_db;
    std::vector<double> serving_power_dbm;
    std::vector<double> interference_mw;
    std::vector<double> sinr;
    std::vector<double> throughput_bps;
    std::vector<uint8_t> covered;
    double noise_mw = 0.0;

    std::size_t size() const { return cells.size(); }
    double pathloss_db(std::size_t ap, std::size_t cell) const { return pathloss[ap * cells.size() + cell]; }
};

RadioMap compute_radio_map(const FloorPlan& fp, std::span<const Position> aps, const RadioConfig& cfg);
double coverage_fraction(const RadioMap& map);

enum class MapField { BestPathloss, Interference, Sinr, Throughput, Covered };

void write_radio_map_csv(const RadioMap& map, const std::string& path);
// Grayscale P5 image, one pixel per grid cell; non-indoor cells are black.
void write_heatmap_pgm(const FloorPlan& fp, const RadioMap& map, MapField field, const std::string& path);
const char* field_name(MapField field);

}  // namespace applan
