#pragma once

#include <applan/propagation.hpp>

#include <limits>
#include <optional>
#include <string>

namespace applan {

struct TaskSpec {
    std::string name = "task";
    std::size_t n_aps = 1;
    double coverage_target = 1.0;
    // Interference threshold in dB over the thermal noise floor; +inf disables it.
    double interference_threshold_db = std::numeric_limits<double>::infinity();
    // Minimum throughput in bits/s; 0 disables it.
    double throughput_min_bps = 0.0;
    double d_min_m = 0.0;
    std::optional<double> max_runtime_s;

    void validate() const;
};

struct ResidualWeights {
    double interference = 1.0;
    double throughput = 1.0;
    double separation = 1.0;
    double boundary = 1.0;
};

struct Residuals {
    double e_I = 0.0;
    double e_T = 0.0;
    double e_d = 0.0;
    double e_b = 0.0;
    double e_phy = 0.0;
};

struct EvalResult {
    double runtime_s = 0.0;
    double coverage = 0.0;
    double ior = 0.0;
    double tqs = 0.0;  // Mbit/s
    bool success = false;
    Residuals residuals;
};

// Per-cell interference in dB over the noise floor; -inf where there is no interferer.
std::vector<double> interference_over_noise_db(const RadioMap& map);

double ior(std::span<const double> interference_db, double xi_db);
double ior(const RadioMap& map, double xi_db);
// Unit-agnostic: returns the median in the units of the input.
double tqs(std::span<const double> throughput, double t_min);
double tqs(const RadioMap& map, double t_min_bps);
double median(std::vector<double> values);

double separation_residual(std::span<const Position> p, double d_min);
double boundary_residual(const FloorPlan& fp, std::span<const Position> p);

Residuals physics_residuals(const FloorPlan& fp, std::span<const Position> p, const RadioMap& map,
                            const TaskSpec& task, const ResidualWeights& w = {});

EvalResult evaluate(const FloorPlan& fp, std::span<const Position> p, const TaskSpec& task,
                    const RadioConfig& cfg, const ResidualWeights& w = {});

std::string eval_csv_header();
std::string eval_csv_row(const std::string& method, const std::string& task, uint64_t seed,
                         const EvalResult* r);

}  // namespace applan
