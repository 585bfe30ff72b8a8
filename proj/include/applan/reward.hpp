#pragma once

#include <applan/metrics.hpp>

#include <memory>
#include <string>

namespace applan {

struct RewardConfig {
    double beta = 1.0;
    double penalty_weight = 10.0;
    // Softness of the logistic indicators and of the softmin over APs, in dB
    // for pathloss/interference and Mbit/s for throughput.
    double sigmoid_temp = 2.0;
    RadioConfig radio;
    TaskSpec task;

    void validate() const;
};

class RewardProvider {
public:
    virtual ~RewardProvider() = default;
    virtual std::string name() const = 0;
    virtual double value(const FloorPlan& fp, std::span<const Position> p) const = 0;
    virtual double value_and_gradient(const FloorPlan& fp, std::span<const Position> p, Gradient& grad) const = 0;
    Gradient gradient(const FloorPlan& fp, std::span<const Position> p) const {
        Gradient g;
        value_and_gradient(fp, p, g);
        return g;
    }
    // True when value(pi(P)) == value(P) bit for bit for every relabeling pi.
    virtual bool permutation_invariant() const { return true; }
};

double exact_reward(const FloorPlan& fp, std::span<const Position> p, const RewardConfig& cfg);
double exact_reward(const FloorPlan& fp, std::span<const Position> p, const RadioMap& map, const RewardConfig& cfg);
double smooth_reward(const FloorPlan& fp, std::span<const Position> p, const RewardConfig& cfg, Gradient* grad);

// Gradient of lambda_pen * (e_d + e_b); added with a minus sign by the providers.
double penalty(const FloorPlan& fp, std::span<const Position> p, const RewardConfig& cfg, Gradient* grad);

// Value is the verifier-based reward; gradient is the smooth surrogate's.
class ExactReward : public RewardProvider {
public:
    explicit ExactReward(RewardConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }
    std::string name() const override { return "exact"; }
    double value(const FloorPlan& fp, std::span<const Position> p) const override;
    double value_and_gradient(const FloorPlan& fp, std::span<const Position> p, Gradient& grad) const override;
    const RewardConfig& config() const { return cfg_; }

private:
    RewardConfig cfg_;
};

class SmoothReward : public RewardProvider {
public:
    explicit SmoothReward(RewardConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }
    std::string name() const override { return "smooth"; }
    double value(const FloorPlan& fp, std::span<const Position> p) const override;
    double value_and_gradient(const FloorPlan& fp, std::span<const Position> p, Gradient& grad) const override;
    const RewardConfig& config() const { return cfg_; }

private:
    RewardConfig cfg_;
};

inline double boltzmann_weight(double r, double beta) { return std::exp(beta * r); }

// Sums of exp(beta r) and grad exp(beta r) over samples and AP relabelings,
// held as exp(log_scale) * {weight_sum, grad_sum} so nothing overflows.
struct SymmetrizedStats {
    double log_scale = -std::numeric_limits<double>::infinity();
    double weight_sum = 0.0;
    Gradient grad_sum;
    std::size_t terms = 0;

    double total_weight() const { return std::exp(log_scale) * weight_sum; }
    double log_total_weight() const { return log_scale + std::log(weight_sum); }
};

std::size_t permutation_count(std::size_t n_aps, std::size_t perm_budget);

// All N! relabelings for N <= 5, otherwise perm_budget uniform draws.
std::vector<std::vector<std::size_t>> permutation_set(std::size_t n_aps, std::size_t perm_budget, Rng& rng);

// When exploit_invariance is set and the provider is exactly invariant, each
// sample is evaluated once and counted |Pi| times; the result equals the
// enumerated sum up to rounding.
SymmetrizedStats symmetrized_reward_stats(const RewardProvider& provider, const FloorPlan& fp,
                                          std::span<const Deployment> samples, double beta,
                                          std::size_t perm_budget, Rng& rng, bool with_gradient = true,
                                          bool exploit_invariance = false);

}  // namespace applan
