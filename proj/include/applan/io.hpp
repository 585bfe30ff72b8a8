#pragma once

#include <applan/bench.hpp>

#include <json.hpp>

#include <string>
#include <string_view>

namespace applan {

uint64_t fnv1a64(std::string_view data);
std::string hex64(uint64_t v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Each parser starts from the given defaults and rejects unknown keys.
RadioConfig radio_from_json(const nlohmann::json& j, RadioConfig base = {});
TaskSpec task_spec_from_json(const nlohmann::json& j, TaskSpec base = {});
SamplerConfig sampler_from_json(const nlohmann::json& j, SamplerConfig base = {});
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});
AgentConfig agent_from_json(const nlohmann::json& j, AgentConfig base = {});

nlohmann::json to_json(const RadioConfig& c);
nlohmann::json to_json(const TaskSpec& t);
nlohmann::json to_json(const SamplerConfig& c);
nlohmann::json to_json(const EvalResult& r);
nlohmann::json to_json(const Deployment& p);
Deployment deployment_from_json(const nlohmann::json& j);

// "floorplan" may be a path (relative to base_dir), {"synthetic": {...}},
// {"builtin": name} or an inline floorplan document.
FloorPlan floorplan_from_spec(const nlohmann::json& spec, const std::string& base_dir);
BenchTask bench_task_from_json(const nlohmann::json& j, const std::string& base_dir);

BenchConfig bench_config_from_json(const nlohmann::json& j, const std::string& base_dir);
BenchConfig load_bench_config(const std::string& path);
// Canonical description of the grid used for the manifest hash.
nlohmann::json bench_config_to_json(const BenchConfig& cfg);

void write_manifest(const std::string& dir, const std::string& command, const nlohmann::json& config,
                    const std::vector<uint64_t>& seeds, const nlohmann::json& extra = nlohmann::json::object());

}  // namespace applan
