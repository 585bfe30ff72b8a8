#include <applan/io.hpp>
#include <applan/tasks.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace applan {

using nlohmann::json;
namespace fs = std::filesystem;

uint64_t fnv1a64(std::string_view data) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out << text;
    if (!out) throw Error("write failed: " + path);
}

namespace {

void only_keys(const json& j, const char* what, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) throw ConfigError(std::string("unknown key in ") + what + ": " + it.key());
}

template <class T>
void take(const json& j, const char* key, T& dst) {
    if (!j.contains(key)) return;
    try {
        dst = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("bad value for ") + key);
    }
}

// JSON has no infinity; null or a missing key means "disabled".
double threshold_or_inf(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (j.at(key).is_null()) return std::numeric_limits<double>::infinity();
    if (!j.at(key).is_number()) throw ConfigError(std::string("bad value for ") + key);
    return j.at(key).get<double>();
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

RadioConfig radio_from_json(const json& j, RadioConfig c) {
    only_keys(j, "radio", {"carrier_hz", "bandwidth_hz", "tx_power_dbm", "antenna_gain_dbi", "pathloss_exponent",
                           "reference_loss_db", "reference_distance_m", "noise_psd_dbm_per_hz", "noise_figure_db",
                           "pathloss_threshold_db"});
    take(j, "carrier_hz", c.carrier_hz);
    take(j, "bandwidth_hz", c.bandwidth_hz);
    take(j, "tx_power_dbm", c.tx_power_dbm);
    take(j, "antenna_gain_dbi", c.antenna_gain_dbi);
    take(j, "pathloss_exponent", c.pathloss_exponent);
    take(j, "reference_loss_db", c.reference_loss_db);
    take(j, "reference_distance_m", c.reference_distance_m);
    take(j, "noise_psd_dbm_per_hz", c.noise_psd_dbm_per_hz);
    take(j, "noise_figure_db", c.noise_figure_db);
    take(j, "pathloss_threshold_db", c.pathloss_threshold_db);
    c.validate();
    return c;
}

namespace {

void read_task_fields(const json& j, TaskSpec& t) {
    take(j, "name", t.name);
    take(j, "n_aps", t.n_aps);
    take(j, "coverage_target", t.coverage_target);
    t.interference_threshold_db = threshold_or_inf(j, "interference_threshold_db", t.interference_threshold_db);
    if (j.contains("throughput_min_mbps")) {
        double mbps = 0.0;
        take(j, "throughput_min_mbps", mbps);
        t.throughput_min_bps = mbps * 1e6;
    }
    take(j, "d_min_m", t.d_min_m);
    if (j.contains("max_runtime_s")) {
        if (j.at("max_runtime_s").is_null()) t.max_runtime_s.reset();
        else {
            double v = 0.0;
            take(j, "max_runtime_s", v);
            t.max_runtime_s = v;
        }
    }
}

}  // namespace

TaskSpec task_spec_from_json(const json& j, TaskSpec t) {
    only_keys(j, "task", {"name", "n_aps", "coverage_target", "interference_threshold_db", "throughput_min_mbps",
                          "d_min_m", "max_runtime_s"});
    read_task_fields(j, t);
    t.validate();
    return t;
}

SamplerConfig sampler_from_json(const json& j, SamplerConfig c) {
    only_keys(j, "sampler", {"particles", "mc_samples", "steps", "beta", "temperature", "proposal_std",
                             "langevin_step", "ess_fraction", "perm_budget", "seed", "sigma_min", "sigma_max", "clip",
                             "coord_dim", "early_stop", "readout", "score_form", "exploit_invariance", "record_trajectory",
                             "gradient_step", "gradient_tol", "max_backtracks"});
    take(j, "particles", c.particles);
    take(j, "mc_samples", c.mc_samples);
    take(j, "steps", c.steps);
    take(j, "beta", c.beta);
    if (j.contains("temperature")) {
        double t = 0.0;
        take(j, "temperature", t);
        if (!(t > 0.0)) throw ConfigError("temperature must be positive");
        c.beta = 1.0 / t;
    }
    take(j, "proposal_std", c.proposal_std);
    take(j, "langevin_step", c.langevin_step);
    take(j, "ess_fraction", c.ess_fraction);
    take(j, "perm_budget", c.perm_budget);
    take(j, "seed", c.seed);
    take(j, "sigma_min", c.sigma_min);
    take(j, "sigma_max", c.sigma_max);
    take(j, "clip", c.clip);
    take(j, "coord_dim", c.coord_dim);
    take(j, "early_stop", c.early_stop);
    if (j.contains("readout")) {
        std::string r;
        take(j, "readout", r);
        if (r == "exact") c.readout = Readout::Exact;
        else if (r == "provider") c.readout = Readout::Provider;
        else throw ConfigError("readout must be exact or provider");
    }
    if (j.contains("score_form")) {
        std::string f;
        take(j, "score_form", f);
        if (f == "gradient") c.score_form = ScoreForm::Gradient;
        else if (f == "stein") c.score_form = ScoreForm::Stein;
        else throw ConfigError("score_form must be gradient or stein");
    }
    take(j, "exploit_invariance", c.exploit_invariance);
    take(j, "record_trajectory", c.record_trajectory);
    take(j, "gradient_step", c.gradient_step);
    take(j, "gradient_tol", c.gradient_tol);
    take(j, "max_backtracks", c.max_backtracks);
    c.validate();
    return c;
}

TrainConfig train_config_from_json(const json& j, TrainConfig c) {
    only_keys(j, "training", {"lr", "weight_decay", "adam_beta1", "adam_beta2", "adam_eps", "epochs", "batch",
                              "val_split", "seed"});
    take(j, "lr", c.lr);
    take(j, "weight_decay", c.weight_decay);
    take(j, "adam_beta1", c.adam_beta1);
    take(j, "adam_beta2", c.adam_beta2);
    take(j, "adam_eps", c.adam_eps);
    take(j, "epochs", c.epochs);
    take(j, "batch", c.batch);
    take(j, "val_split", c.val_split);
    take(j, "seed", c.seed);
    c.validate();
    return c;
}

AgentConfig agent_from_json(const json& j, AgentConfig c) {
    only_keys(j, "agent", {"max_iters", "stop_on_target", "max_parse_failures", "map_summary_max", "mock_script"});
    take(j, "max_iters", c.max_iters);
    take(j, "stop_on_target", c.stop_on_target);
    take(j, "max_parse_failures", c.max_parse_failures);
    take(j, "map_summary_max", c.map_summary_max);
    c.validate();
    return c;
}

json to_json(const RadioConfig& c) {
    return {{"carrier_hz", c.carrier_hz},
            {"bandwidth_hz", c.bandwidth_hz},
            {"tx_power_dbm", c.tx_power_dbm},
            {"antenna_gain_dbi", c.antenna_gain_dbi},
            {"pathloss_exponent", c.pathloss_exponent},
            {"reference_loss_db", c.reference_loss_db},
            {"reference_distance_m", c.reference_distance_m},
            {"noise_psd_dbm_per_hz", c.noise_psd_dbm_per_hz},
            {"noise_figure_db", c.noise_figure_db},
            {"pathloss_threshold_db", c.pathloss_threshold_db}};
}

json to_json(const TaskSpec& t) {
    return {{"name", t.name},
            {"n_aps", t.n_aps},
            {"coverage_target", t.coverage_target},
            {"interference_threshold_db", finite_or_null(t.interference_threshold_db)},
            {"throughput_min_mbps", t.throughput_min_bps / 1e6},
            {"d_min_m", t.d_min_m},
            {"max_runtime_s", t.max_runtime_s ? json(*t.max_runtime_s) : json(nullptr)}};
}

json to_json(const SamplerConfig& c) {
    return {{"particles", c.particles},
            {"mc_samples", c.mc_samples},
            {"steps", c.steps},
            {"beta", c.beta},
            {"proposal_std", c.proposal_std},
            {"langevin_step", c.langevin_step},
            {"ess_fraction", c.ess_fraction},
            {"perm_budget", c.perm_budget},
            {"seed", c.seed},
            {"sigma_min", c.sigma_min},
            {"sigma_max", c.sigma_max},
            {"clip", c.clip},
            {"coord_dim", c.coord_dim},
            {"early_stop", c.early_stop},
            {"readout", c.readout == Readout::Exact ? "exact" : "provider"},
            {"score_form", c.score_form == ScoreForm::Gradient ? "gradient" : "stein"},
            {"exploit_invariance", c.exploit_invariance},
            {"record_trajectory", c.record_trajectory},
            {"gradient_step", c.gradient_step},
            {"gradient_tol", c.gradient_tol},
            {"max_backtracks", c.max_backtracks}};
}

json to_json(const EvalResult& r) {
    return {{"runtime_s", r.runtime_s},
            {"coverage", r.coverage},
            {"ior", r.ior},
            {"tqs_mbps", r.tqs},
            {"success", r.success},
            {"e_I", r.residuals.e_I},
            {"e_T", r.residuals.e_T},
            {"e_d", r.residuals.e_d},
            {"e_b", r.residuals.e_b},
            {"e_phy", r.residuals.e_phy}};
}

json to_json(const Deployment& p) {
    json a = json::array();
    for (const Position& q : p) a.push_back({q.x, q.y, q.z});
    return a;
}

Deployment deployment_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("deployment must be a non-empty list of [x, y, z]");
    Deployment out;
    for (const json& t : j) {
        if (!t.is_array() || t.size() != 3) throw ConfigError("each AP must be [x, y, z]");
        for (const json& v : t)
            if (!v.is_number()) throw ConfigError("AP coordinates must be numbers");
        out.push_back({t[0].get<double>(), t[1].get<double>(), t[2].get<double>()});
    }
    return out;
}

FloorPlan floorplan_from_spec(const json& spec, const std::string& base_dir) {
    if (spec.is_string()) {
        fs::path p(spec.get<std::string>());
        if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
        return load_floorplan_file(p.string());
    }
    if (spec.is_object() && spec.contains("synthetic")) {
        const json& s = spec["synthetic"];
        only_keys(s, "synthetic floorplan", {"level", "width_m", "height_m", "seed", "cell_size_m"});
        int level = 1;
        double w = 20.0, h = 15.0, cs = 0.5;
        uint64_t seed = 0;
        take(s, "level", level);
        take(s, "width_m", w);
        take(s, "height_m", h);
        take(s, "seed", seed);
        take(s, "cell_size_m", cs);
        return generate_synthetic(level, w, h, seed, cs);
    }
    if (spec.is_object() && spec.contains("builtin")) return builtin_task(spec["builtin"].get<std::string>()).floorplan;
    if (spec.is_object() && spec.contains("grid")) return load_floorplan(spec.dump());
    throw ConfigError("floorplan must be a path, {\"synthetic\": ...}, {\"builtin\": ...} or a floorplan document");
}

BenchTask bench_task_from_json(const json& j, const std::string& base_dir) {
    only_keys(j, "task", {"name", "floorplan", "n_aps", "coverage_target", "interference_threshold_db",
                          "throughput_min_mbps", "d_min_m", "max_runtime_s", "radio", "penalty_weight",
                          "sigmoid_temp"});
    if (!j.contains("floorplan")) throw ConfigError("task needs a floorplan");
    const json& spec = j["floorplan"];
    RewardConfig reward;
    std::optional<FloorPlan> fp;
    if (spec.is_object() && spec.contains("builtin")) {
        PlanningTask bt = builtin_task(spec["builtin"].get<std::string>());
        reward = bt.reward;
        fp = std::move(bt.floorplan);
    } else {
        fp = floorplan_from_spec(spec, base_dir);
        reward.task.name = fp->name();
    }
    read_task_fields(j, reward.task);
    if (j.contains("radio")) reward.radio = radio_from_json(j["radio"], reward.radio);
    take(j, "penalty_weight", reward.penalty_weight);
    take(j, "sigmoid_temp", reward.sigmoid_temp);
    reward.validate();
    return BenchTask{reward.task.name, std::move(*fp), reward};
}

BenchConfig bench_config_from_json(const json& j, const std::string& base_dir) {
    only_keys(j, "bench config", {"methods", "tasks", "seeds", "provider", "reward_model", "sampler", "agent",
                                  "output_dir", "traces", "heatmaps", "workers"});
    BenchConfig c;
    take(j, "methods", c.methods);
    if (j.contains("tasks")) {
        if (!j["tasks"].is_array()) throw ConfigError("tasks must be a list");
        for (const json& t : j["tasks"]) c.tasks.push_back(bench_task_from_json(t, base_dir));
    }
    if (j.contains("seeds")) {
        const json& s = j["seeds"];
        if (s.is_object()) {
            only_keys(s, "seeds", {"start", "count"});
            uint64_t start = 0, count = 0;
            take(s, "start", start);
            take(s, "count", count);
            for (uint64_t i = 0; i < count; ++i) c.seeds.push_back(start + i);
        } else {
            take(j, "seeds", c.seeds);
        }
    }
    if (j.contains("provider")) c.provider = provider_kind(j["provider"].get<std::string>());
    if (j.contains("reward_model")) {
        fs::path p(j["reward_model"].get<std::string>());
        if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
        c.reward_model = p.string();
    }
    if (j.contains("sampler")) c.sampler = sampler_from_json(j["sampler"], c.sampler);
    if (j.contains("agent")) {
        c.agent = agent_from_json(j["agent"], c.agent);
        if (j["agent"].contains("mock_script")) {
            fs::path p(j["agent"]["mock_script"].get<std::string>());
            if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
            c.agent_script = p.string();
        }
    }
    take(j, "output_dir", c.output_dir);
    take(j, "traces", c.write_traces);
    take(j, "heatmaps", c.write_heatmaps);
    take(j, "workers", c.workers);
    return c;
}

BenchConfig load_bench_config(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return bench_config_from_json(j, fs::path(path).parent_path().string());
}

json bench_config_to_json(const BenchConfig& cfg) {
    json tasks = json::array();
    for (const BenchTask& t : cfg.tasks) {
        json tj = to_json(t.reward.task);
        tj["floorplan"] = t.floorplan.name();
        tj["floorplan_hash"] = hex64(fnv1a64(serialize_floorplan(t.floorplan)));
        tj["radio"] = to_json(t.reward.radio);
        tj["penalty_weight"] = t.reward.penalty_weight;
        tj["sigmoid_temp"] = t.reward.sigmoid_temp;
        tasks.push_back(tj);
    }
    json j = {{"methods", cfg.methods},
              {"tasks", tasks},
              {"seeds", cfg.seeds},
              {"provider", provider_name(cfg.provider)},
              {"sampler", to_json(cfg.sampler)},
              {"agent", {{"max_iters", cfg.agent.max_iters}, {"stop_on_target", cfg.agent.stop_on_target}}}};
    if (!cfg.reward_model.empty()) j["reward_model_hash"] = hex64(fnv1a64(read_text_file(cfg.reward_model)));
    if (!cfg.agent_script.empty()) j["agent_script_hash"] = hex64(fnv1a64(read_text_file(cfg.agent_script)));
    return j;
}

void write_manifest(const std::string& dir, const std::string& command, const json& config,
                    const std::vector<uint64_t>& seeds, const json& extra) {
    fs::create_directories(dir);
    json m = {{"command", command},
              {"config", config},
              {"config_hash", hex64(fnv1a64(config.dump()))},
              {"seeds", seeds},
              {"version", "0.1.0"}};
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    write_text_file((fs::path(dir) / "manifest.json").string(), m.dump(2) + "\n");
}

}  // namespace applan
