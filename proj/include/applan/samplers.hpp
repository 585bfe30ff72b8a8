#pragma once

#include <applan/reward.hpp>

#include <string>
#include <vector>

namespace applan {

class NoiseSchedule {
public:
    // sigma_1..sigma_T log-linear from sigma_min to sigma_max.
    static NoiseSchedule geometric(std::size_t steps, double sigma_min, double sigma_max);

    std::size_t steps() const { return sigmas_.size(); }
    // sigma(0) is 0 by convention; t in 1..T otherwise.
    double sigma(std::size_t t) const { return t == 0 ? 0.0 : sigmas_.at(t - 1); }
    const std::vector<double>& sigmas() const { return sigmas_; }

private:
    std::vector<double> sigmas_;
};

// Affine map of the floorplan bounding box onto [-1, 1]^dim. With dim 2 the
// z coordinate is pinned to the evaluation height.
class CoordinateMap {
public:
    explicit CoordinateMap(const FloorPlan& fp, int dim = 2);

    int dim() const { return dim_; }
    double half_extent(int axis) const { return half_[axis]; }
    double center(int axis) const { return center_[axis]; }

    void to_normalized(const Position& p, double* u) const;
    Position to_world(const double* u) const;
    std::vector<double> to_normalized(std::span<const Position> p) const;
    Deployment to_world(std::span<const double> u) const;

private:
    int dim_;
    double center_[3];
    double half_[3];
    double z_fixed_;
};

struct ParticleEnsemble {
    std::size_t n_aps = 0;
    int dim = 2;
    std::vector<std::vector<double>> particles;  // each n_aps * dim, row per AP
    std::vector<double> log_weights;             // normalized: logsumexp == 0
    std::size_t iteration = 0;
};

enum class Readout { Exact, Provider };

// Gradient: ratio of summed reward-weight gradients to summed weights.
// Stein: weighted mean displacement of the noisy samples over sigma^2; equal in
// expectation for smooth rewards and needs no reward gradient.
enum class ScoreForm { Gradient, Stein };

struct SamplerConfig {
    std::size_t particles = 10;
    std::size_t mc_samples = 10;
    std::size_t steps = 100;
    double beta = 1.0;
    double proposal_std = 0.1;
    double langevin_step = 1e-2;
    double ess_fraction = 0.5;  // resample when ESS < ess_fraction * K
    std::size_t perm_budget = 24;
    uint64_t seed = 42;
    double sigma_min = 1e-3;
    double sigma_max = 2.0;
    double clip = 3.0;
    int coord_dim = 2;
    bool early_stop = true;
    Readout readout = Readout::Exact;
    ScoreForm score_form = ScoreForm::Gradient;
    bool exploit_invariance = true;
    bool record_trajectory = false;
    double gradient_step = 0.1;
    double gradient_tol = 1e-6;
    std::size_t max_backtracks = 30;

    void validate() const;
};

struct TraceRow {
    std::size_t iteration = 0;
    double best_reward = 0.0;
    double mean_reward = 0.0;
    double ess = 0.0;
};

struct TrajectoryRow {
    std::size_t iteration;
    std::size_t particle;
    std::size_t ap_index;
    double x;
    double y;
};

struct PlanResult {
    std::string method;
    Deployment best;
    double best_reward = -std::numeric_limits<double>::infinity();
    Deployment weighted_mean;
    ParticleEnsemble final_ensemble;
    std::vector<TraceRow> trace;
    std::vector<TrajectoryRow> trajectory;
    double runtime_s = 0.0;
    std::size_t iterations = 0;
    std::size_t reward_calls = 0;
    bool reached_target = false;
};

double log_sum_exp(std::span<const double> v);
void normalize_log_weights(std::vector<double>& log_w);
// 1 / sum w^2 for the self-normalized weights.
double ess(std::span<const double> log_weights);
std::vector<std::size_t> multinomial_resample(std::span<const double> log_weights, std::size_t count, Rng& rng);

// Monte-Carlo estimate of the mollified score at noise level sigma_t, in
// normalized coordinates (row per AP). Rows are processed in canonical order so
// the estimate is equivariant under AP relabeling for a fixed rng state.
std::vector<double> estimate_score(const RewardProvider& provider, const FloorPlan& fp, const CoordinateMap& map,
                                   std::span<const double> p_t, double sigma_t, const SamplerConfig& cfg, Rng& rng,
                                   std::size_t* reward_calls = nullptr);

PlanResult smc_gaussian(const FloorPlan& fp, const RewardProvider& provider, const SamplerConfig& cfg,
                        const RewardConfig& task);
PlanResult smc_langevin(const FloorPlan& fp, const RewardProvider& provider, const SamplerConfig& cfg,
                        const RewardConfig& task);
PlanResult diffusion_sample(const FloorPlan& fp, const RewardProvider& provider, const SamplerConfig& cfg,
                            const RewardConfig& task);
PlanResult gradient_ascent(const FloorPlan& fp, const RewardProvider& provider, const SamplerConfig& cfg,
                           const RewardConfig& task);

// Weighted mean of the final ensemble (per-coordinate), in normalized units.
std::vector<double> ensemble_mean(const ParticleEnsemble& e);
std::vector<double> ensemble_variance(const ParticleEnsemble& e);

void write_trace_csv(const PlanResult& r, const std::string& path);
void write_trajectory_csv(const PlanResult& r, const std::string& path);

}  // namespace applan
