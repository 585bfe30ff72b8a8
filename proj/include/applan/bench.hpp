#pragma once

#include <applan/agent.hpp>
#include <applan/reward_net.hpp>
#include <applan/samplers.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace applan {

enum class ProviderKind { Exact, Smooth, Learned };

ProviderKind provider_kind(const std::string& name);
const char* provider_name(ProviderKind k);

std::unique_ptr<RewardProvider> make_provider(ProviderKind kind, const RewardConfig& cfg,
                                              const std::string& model_path = {});

const std::vector<std::string>& known_methods();

struct BenchTask {
    std::string name;
    FloorPlan floorplan;
    RewardConfig reward;  // reward.task holds the TaskSpec
};

struct BenchConfig {
    std::vector<std::string> methods;
    std::vector<BenchTask> tasks;
    std::vector<uint64_t> seeds;
    ProviderKind provider = ProviderKind::Exact;
    std::string reward_model;  // required for the learned provider
    SamplerConfig sampler;
    AgentConfig agent;
    std::string agent_script;  // mock script; empty means the HTTP client from the environment
    std::string output_dir;    // empty: nothing is written
    bool write_traces = true;
    bool write_heatmaps = true;
    unsigned workers = 1;

    void validate() const;
};

struct TrialResult {
    std::string method;
    std::string task;
    uint64_t seed = 0;
    std::optional<EvalResult> eval;  // empty for a failed trial
    std::string error;
    double reward = std::numeric_limits<double>::quiet_NaN();  // exact reward of the plan
    Deployment plan;
    std::size_t iterations = 0;
    std::size_t reward_calls = 0;
    std::vector<TraceRow> trace;
    std::vector<TrajectoryRow> trajectory;  // only with sampler.record_trajectory
};

// Planner runtime is measured around the planning call only; the verifier
// evaluation of the final plan is excluded. Errors become failed trials.
TrialResult run_trial(const std::string& method, const BenchTask& task, uint64_t seed, const BenchConfig& cfg,
                      const RewardProvider* provider = nullptr);

struct Aggregate {
    std::size_t n = 0;
    double mean = std::numeric_limits<double>::quiet_NaN();
    double std = std::numeric_limits<double>::quiet_NaN();
};

// Sample standard deviation; 0 for a single value, NaN mean and std when empty.
Aggregate aggregate(std::span<const double> v);

struct ReportRow {
    std::string method;
    std::string task;
    std::size_t trials = 0;
    std::size_t successes = 0;
    double success_rate = 0.0;  // percent
    Aggregate runtime, coverage, ior, tqs, reward;
};

struct BenchReport {
    std::vector<ReportRow> rows;
    std::vector<TrialResult> trials;  // grid order: task, method, seed
};

BenchReport run_benchmark(const BenchConfig& cfg);
std::vector<ReportRow> summarize(const std::vector<TrialResult>& trials, const std::vector<std::string>& methods,
                                 const std::vector<std::string>& tasks);
std::string format_report(const BenchReport& r);
void write_report_files(const BenchConfig& cfg, const BenchReport& r);

struct AblationRow {
    double parameter = 0.0;
    ReportRow row;
};

std::vector<AblationRow> ablation_particles(BenchConfig cfg, const std::vector<std::size_t>& particle_counts);
std::vector<AblationRow> ablation_temperature(BenchConfig cfg, const std::vector<double>& temperatures);
std::string ablation_csv(const std::string& parameter_name, const std::vector<AblationRow>& rows);

}  // namespace applan
