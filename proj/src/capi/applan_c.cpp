#include <applan/applan.h>

#include <applan/io.hpp>
#include <applan/tasks.hpp>

#include <cmath>
#include <filesystem>
#include <memory>
#include <optional>
#include <fstream>
#include <new>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

struct applan_floorplan {
    applan::FloorPlan fp;
};

namespace {

thread_local std::string g_error;

struct ArgumentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class F>
applan_status guarded(F&& f) noexcept {
    try {
        f();
        g_error.clear();
        return APPLAN_OK;
    } catch (const applan::AgentAborted& e) {
        g_error = e.what();
        return APPLAN_ERR_ABORTED;
    } catch (const applan::TransportError& e) {
        g_error = e.what();
        return APPLAN_ERR_TRANSPORT;
    } catch (const applan::ConfigError& e) {
        g_error = e.what();
        return APPLAN_ERR_CONFIG;
    } catch (const applan::NumericError& e) {
        g_error = e.what();
        return APPLAN_ERR_NUMERIC;
    } catch (const json::exception& e) {
        g_error = std::string("bad JSON: ") + e.what();
        return APPLAN_ERR_CONFIG;
    } catch (const fs::filesystem_error& e) {
        g_error = e.what();
        return APPLAN_ERR_IO;
    } catch (const std::bad_alloc&) {
        g_error = "out of memory";
        return APPLAN_ERR_INTERNAL;
    } catch (const ArgumentError& e) {
        g_error = e.what();
        return APPLAN_ERR_ARGUMENT;
    } catch (const std::exception& e) {
        g_error = e.what();
        return APPLAN_ERR_INTERNAL;
    } catch (...) {
        g_error = "unknown error";
        return APPLAN_ERR_INTERNAL;
    }
}

void require(bool ok, const char* what) {
    if (!ok) throw ArgumentError(what);
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::copy(s.begin(), s.end(), out);
    out[s.size()] = '\0';
    return out;
}

applan::Deployment deployment_from(const double* xyz, std::size_t n) {
    applan::Deployment p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = {xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2]};
    return p;
}

// Task keys plus an optional "radio" object, as accepted by applan_evaluate.
applan::RewardConfig reward_from_task_json(const char* text) {
    applan::RewardConfig rc;
    if (!text || !*text) return rc;
    json j = json::parse(text);
    if (!j.is_object()) throw applan::ConfigError("task must be an object");
    if (j.contains("radio")) {
        rc.radio = applan::radio_from_json(j["radio"]);
        j.erase("radio");
    }
    if (j.contains("penalty_weight")) {
        rc.penalty_weight = j["penalty_weight"].get<double>();
        j.erase("penalty_weight");
    }
    if (j.contains("sigmoid_temp")) {
        rc.sigmoid_temp = j["sigmoid_temp"].get<double>();
        j.erase("sigmoid_temp");
    }
    rc.task = applan::task_spec_from_json(j);
    return rc;
}

void fill_eval(const applan::EvalResult& r, applan_eval* out) {
    out->runtime_s = r.runtime_s;
    out->coverage = r.coverage;
    out->ior = r.ior;
    out->tqs_mbps = r.tqs;
    out->success = r.success ? 1 : 0;
    out->e_interference = r.residuals.e_I;
    out->e_throughput = r.residuals.e_T;
    out->e_separation = r.residuals.e_d;
    out->e_boundary = r.residuals.e_b;
    out->e_phy = r.residuals.e_phy;
}

// Parsed run request shared by the command entry points.
struct Request {
    json config = json::object();
    std::string base_dir = ".";
    std::string out;
    std::optional<uint64_t> seed;
    std::optional<std::string> method, task, provider;
    std::optional<std::size_t> particles;
    std::optional<double> temperature;
};

Request parse_request(const char* text) {
    require(text != nullptr, "request must not be null");
    const json j = json::parse(text);
    if (!j.is_object()) throw applan::ConfigError("request must be an object");
    Request r;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        const json& v = it.value();
        if (v.is_null()) continue;
        if (k == "config") r.config = v;
        else if (k == "base_dir") r.base_dir = v.get<std::string>();
        else if (k == "out") r.out = v.get<std::string>();
        else if (k == "seed") r.seed = v.get<uint64_t>();
        else if (k == "method") r.method = v.get<std::string>();
        else if (k == "task") r.task = v.get<std::string>();
        else if (k == "provider") r.provider = v.get<std::string>();
        else if (k == "particles") r.particles = v.get<std::size_t>();
        else if (k == "temperature") r.temperature = v.get<double>();
        else throw applan::ConfigError("unknown request key: " + k);
    }
    if (!r.config.is_object()) throw applan::ConfigError("config must be an object");
    if (r.particles && *r.particles < 1) throw applan::ConfigError("particles must be at least 1");
    if (r.temperature && !(*r.temperature > 0.0)) throw applan::ConfigError("temperature must be positive");
    return r;
}

// Applies the sampler and provider flags to a bench-shaped config document.
void apply_overrides(json& cfg, const Request& r) {
    if (r.particles || r.temperature) {
        json& s = cfg["sampler"];
        if (s.is_null()) s = json::object();
        if (r.particles) s["particles"] = *r.particles;
        if (r.temperature) {
            s.erase("beta");
            s["temperature"] = *r.temperature;
        }
    }
    if (r.provider) cfg["provider"] = *r.provider;
    if (r.method) cfg["methods"] = json::array({*r.method});
    if (r.seed) {
        std::size_t count = 1;
        if (cfg.contains("seeds")) {
            const json& s = cfg["seeds"];
            count = s.is_array() ? s.size() : s.value("count", std::size_t{1});
        }
        cfg["seeds"] = {{"start", *r.seed}, {"count", std::max<std::size_t>(count, 1)}};
    }
}

void select_task(applan::BenchConfig& cfg, const Request& r) {
    if (!r.task) return;
    std::vector<applan::BenchTask> kept;
    for (applan::BenchTask& t : cfg.tasks)
        if (t.name == *r.task) kept.push_back(std::move(t));
    if (kept.empty()) throw applan::ConfigError("no task named " + *r.task);
    cfg.tasks = std::move(kept);
}

json aggregate_json(const applan::Aggregate& a) {
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    return {{"n", a.n}, {"mean", num(a.mean)}, {"std", num(a.std)}};
}

json row_json(const applan::ReportRow& r) {
    return {{"method", r.method},
            {"task", r.task},
            {"trials", r.trials},
            {"successes", r.successes},
            {"success_rate", r.success_rate},
            {"runtime_s", aggregate_json(r.runtime)},
            {"coverage", aggregate_json(r.coverage)},
            {"ior", aggregate_json(r.ior)},
            {"tqs_mbps", aggregate_json(r.tqs)},
            {"reward", aggregate_json(r.reward)}};
}

json trial_json(const applan::TrialResult& t) {
    json j = {{"method", t.method}, {"task", t.task}, {"seed", t.seed}, {"iterations", t.iterations},
              {"reward_calls", t.reward_calls}};
    if (t.eval) {
        j["eval"] = applan::to_json(*t.eval);
        j["reward"] = t.reward;
        j["deployment"] = applan::to_json(t.plan);
    } else {
        j["error"] = t.error;
    }
    return j;
}

applan::BenchConfig bench_from_request(const Request& r, json cfg) {
    apply_overrides(cfg, r);
    applan::BenchConfig bc = applan::bench_config_from_json(cfg, r.base_dir);
    select_task(bc, r);
    bc.output_dir = r.out;
    bc.validate();
    return bc;
}

applan::FloorPlan floorplan_for_generation(const Request& r) {
    const json& c = r.config;
    if (c.contains("builtin") || c.contains("grid")) return applan::floorplan_from_spec(c, r.base_dir);
    json s = c.contains("synthetic") ? c["synthetic"] : c;
    if (r.seed) s["seed"] = *r.seed;
    return applan::floorplan_from_spec(json{{"synthetic", s}}, r.base_dir);
}

std::string write_result(const json& j) { return j.dump(2); }

}  // namespace

extern "C" {

const char* applan_version(void) { return "0.1.0"; }

const char* applan_last_error(void) { return g_error.c_str(); }

void applan_string_free(char* s) { delete[] s; }

#define APPLAN_GUARD(...) return guarded([&] { __VA_ARGS__; })

static applan_status argument_error(const char* what) {
    g_error = what;
    return APPLAN_ERR_ARGUMENT;
}

applan_status applan_floorplan_load_json(const char* text, applan_floorplan** out) {
    if (!text || !out) return argument_error("null argument");
    *out = nullptr;
    APPLAN_GUARD(*out = new applan_floorplan{applan::load_floorplan(text)});
}

applan_status applan_floorplan_load_file(const char* path, applan_floorplan** out) {
    if (!path || !out) return argument_error("null argument");
    *out = nullptr;
    APPLAN_GUARD(*out = new applan_floorplan{applan::load_floorplan_file(path)});
}

applan_status applan_floorplan_from_spec(const char* spec_json, const char* base_dir, applan_floorplan** out) {
    if (!spec_json || !out) return argument_error("null argument");
    *out = nullptr;
    const std::string dir = base_dir ? base_dir : ".";
    APPLAN_GUARD(*out = new applan_floorplan{applan::floorplan_from_spec(json::parse(spec_json), dir)});
}

applan_status applan_floorplan_generate(int level, double width_m, double height_m, uint64_t seed,
                                        double cell_size_m, applan_floorplan** out) {
    if (!out) return argument_error("null argument");
    *out = nullptr;
    APPLAN_GUARD(*out = new applan_floorplan{applan::generate_synthetic(level, width_m, height_m, seed, cell_size_m)});
}

applan_status applan_floorplan_to_json(const applan_floorplan* fp, char** out) {
    if (!fp || !out) return argument_error("null argument");
    *out = nullptr;
    APPLAN_GUARD(*out = dup_string(applan::serialize_floorplan(fp->fp)));
}

applan_status applan_floorplan_get_info(const applan_floorplan* fp, applan_floorplan_info* out) {
    if (!fp || !out) return argument_error("null argument");
    APPLAN_GUARD({
        const applan::FloorPlan& f = fp->fp;
        *out = {f.rows(), f.cols(), f.level(), f.cell_size(), f.z_min(), f.z_max(),
                f.count(applan::CellKind::FreeSpace)};
    });
}

applan_status applan_floorplan_is_feasible(const applan_floorplan* fp, double x, double y, double z, int* out) {
    if (!fp || !out) return argument_error("null argument");
    APPLAN_GUARD(*out = applan::is_feasible_position(fp->fp, {x, y, z}) ? 1 : 0);
}

void applan_floorplan_free(applan_floorplan* fp) { delete fp; }

applan_status applan_evaluate(const applan_floorplan* fp, const double* xyz, size_t n_aps, const char* task_json,
                              applan_eval* out) {
    if (!fp || !out || (n_aps > 0 && !xyz)) return argument_error("null argument");
    APPLAN_GUARD({
        const applan::RewardConfig rc = reward_from_task_json(task_json);
        const applan::Deployment p = deployment_from(xyz, n_aps);
        fill_eval(applan::evaluate(fp->fp, p, rc.task, rc.radio), out);
    });
}

applan_status applan_exact_reward(const applan_floorplan* fp, const double* xyz, size_t n_aps, const char* task_json,
                                  double* out) {
    if (!fp || !out || (n_aps > 0 && !xyz)) return argument_error("null argument");
    APPLAN_GUARD({
        const applan::RewardConfig rc = reward_from_task_json(task_json);
        *out = applan::exact_reward(fp->fp, deployment_from(xyz, n_aps), rc);
    });
}

applan_status applan_gen_floorplan(const char* request_json, char** result_json) {
    if (!result_json) return argument_error("null argument");
    *result_json = nullptr;
    APPLAN_GUARD({
        const Request r = parse_request(request_json);
        const applan::FloorPlan fp = floorplan_for_generation(r);
        const std::string doc = applan::serialize_floorplan(fp);
        json res = {{"name", fp.name()},
                    {"level", fp.level()},
                    {"rows", fp.rows()},
                    {"cols", fp.cols()},
                    {"free_cells", fp.count(applan::CellKind::FreeSpace)},
                    {"connected", applan::free_space_connected(fp)},
                    {"floorplan_hash", applan::hex64(applan::fnv1a64(doc))}};
        if (!r.out.empty()) {
            fs::create_directories(r.out);
            const std::string path = (fs::path(r.out) / "floorplan.json").string();
            applan::write_text_file(path, doc);
            res["path"] = path;
            std::vector<uint64_t> seeds;
            if (r.seed) seeds.push_back(*r.seed);
            applan::write_manifest(r.out, "gen-floorplan", r.config, seeds, {{"floorplan_hash", res["floorplan_hash"]}});
        }
        *result_json = dup_string(write_result(res));
    });
}

applan_status applan_simulate(const char* request_json, char** result_json) {
    if (!result_json) return argument_error("null argument");
    *result_json = nullptr;
    APPLAN_GUARD({
        const Request r = parse_request(request_json);
        for (const char* k : {"task", "deployment"})
            if (!r.config.contains(k)) throw applan::ConfigError(std::string("simulate config needs ") + k);
        for (auto it = r.config.begin(); it != r.config.end(); ++it)
            if (it.key() != "task" && it.key() != "deployment") throw applan::ConfigError("unknown key: " + it.key());
        const applan::BenchTask task = applan::bench_task_from_json(r.config["task"], r.base_dir);
        const applan::Deployment p = applan::deployment_from_json(r.config["deployment"]);
        const applan::RadioMap map = applan::compute_radio_map(task.floorplan, p, task.reward.radio);
        const applan::EvalResult ev = applan::evaluate(task.floorplan, p, task.reward.task, task.reward.radio);
        json res = {{"task", task.name},
                    {"eval", applan::to_json(ev)},
                    {"reward", applan::exact_reward(task.floorplan, p, map, task.reward)}};
        if (!r.out.empty()) {
            const fs::path dir(r.out);
            fs::create_directories(dir / "heatmaps");
            applan::write_radio_map_csv(map, (dir / "radio_map.csv").string());
            for (applan::MapField f : {applan::MapField::BestPathloss, applan::MapField::Interference,
                                       applan::MapField::Sinr, applan::MapField::Throughput, applan::MapField::Covered})
                applan::write_heatmap_pgm(task.floorplan, map, f,
                                          (dir / "heatmaps" / (std::string(applan::field_name(f)) + ".pgm")).string());
            applan::write_text_file((dir / "results.csv").string(),
                                    applan::eval_csv_header() + "\n" +
                                        applan::eval_csv_row("simulate", task.name, r.seed.value_or(0), &ev) + "\n");
            std::vector<uint64_t> seeds;
            if (r.seed) seeds.push_back(*r.seed);
            applan::write_manifest(r.out, "simulate", r.config, seeds);
        }
        *result_json = dup_string(write_result(res));
    });
}

applan_status applan_plan(const char* request_json, char** result_json) {
    if (!result_json) return argument_error("null argument");
    *result_json = nullptr;
    APPLAN_GUARD({
        const Request r = parse_request(request_json);
        json cfg = json::object();
        for (auto it = r.config.begin(); it != r.config.end(); ++it) {
            const std::string& k = it.key();
            if (k == "task") cfg["tasks"] = json::array({it.value()});
            else if (k == "method") cfg["methods"] = json::array({it.value()});
            else if (k == "seed") cfg["seeds"] = json::array({it.value()});
            else if (k == "sampler" || k == "provider" || k == "reward_model" || k == "agent" || k == "traces" ||
                     k == "heatmaps")
                cfg[k] = it.value();
            else throw applan::ConfigError("unknown plan config key: " + k);
        }
        if (!cfg.contains("methods")) cfg["methods"] = json::array({"diffusion"});
        if (!cfg.contains("seeds")) cfg["seeds"] = json::array({42});
        Request single = r;
        single.task.reset();
        applan::BenchConfig bc = bench_from_request(single, cfg);
        if (bc.seeds.size() != 1) throw applan::ConfigError("plan runs a single seed");
        const applan::BenchReport rep = applan::run_benchmark(bc);
        const applan::TrialResult& t = rep.trials.at(0);
        json res = trial_json(t);
        if (!r.out.empty()) {
            applan::write_text_file((fs::path(r.out) / "plan.json").string(), res.dump(2) + "\n");
            applan::write_manifest(r.out, "plan", applan::bench_config_to_json(bc), bc.seeds);
        }
        *result_json = dup_string(write_result(res));
        if (!t.eval) throw applan::Error("planning failed: " + t.error);
    });
}

applan_status applan_bench(const char* request_json, char** result_json) {
    if (!result_json) return argument_error("null argument");
    *result_json = nullptr;
    APPLAN_GUARD({
        const Request r = parse_request(request_json);
        const applan::BenchConfig bc = bench_from_request(r, r.config);
        const applan::BenchReport rep = applan::run_benchmark(bc);
        json rows = json::array();
        for (const applan::ReportRow& row : rep.rows) rows.push_back(row_json(row));
        json res = {{"rows", rows}, {"report", applan::format_report(rep)}};
        *result_json = dup_string(write_result(res));
    });
}

applan_status applan_ablate(const char* request_json, char** result_json) {
    if (!result_json) return argument_error("null argument");
    *result_json = nullptr;
    APPLAN_GUARD({
        const Request r = parse_request(request_json);
        json cfg = r.config;
        if (!cfg.contains("ablation")) throw applan::ConfigError("ablate config needs an ablation section");
        const json ab = cfg["ablation"];
        cfg.erase("ablation");
        const std::string parameter = ab.at("parameter").get<std::string>();
        if (!cfg.contains("methods")) cfg["methods"] = json::array({"diffusion"});
        const applan::BenchConfig bc = bench_from_request(r, cfg);
        std::vector<applan::AblationRow> rows;
        if (parameter == "particles") rows = applan::ablation_particles(bc, ab.at("values").get<std::vector<std::size_t>>());
        else if (parameter == "temperature")
            rows = applan::ablation_temperature(bc, ab.at("values").get<std::vector<double>>());
        else throw applan::ConfigError("ablation parameter must be particles or temperature");
        json out = json::array();
        for (const applan::AblationRow& a : rows) {
            json j = row_json(a.row);
            j[parameter] = a.parameter;
            out.push_back(j);
        }
        *result_json = dup_string(write_result({{"parameter", parameter}, {"rows", out}}));
    });
}

applan_status applan_train_reward(const char* request_json, char** result_json) {
    if (!result_json) return argument_error("null argument");
    *result_json = nullptr;
    APPLAN_GUARD({
        const Request r = parse_request(request_json);
        const json& c = r.config;
        for (auto it = c.begin(); it != c.end(); ++it)
            if (it.key() != "floorplans" && it.key() != "records" && it.key() != "dataset" && it.key() != "training" &&
                it.key() != "radio" && it.key() != "eval")
                throw applan::ConfigError("unknown train config key: " + it.key());
        if (!c.contains("floorplans") || !c["floorplans"].is_array() || c["floorplans"].empty())
            throw applan::ConfigError("train config needs a nonempty floorplans list");

        applan::DatasetConfig dc;
        if (c.contains("radio")) dc.radio = applan::radio_from_json(c["radio"]);
        if (c.contains("dataset")) {
            const json& d = c["dataset"];
            for (auto it = d.begin(); it != d.end(); ++it)
                if (it.key() != "min_aps" && it.key() != "max_aps" && it.key() != "indoor_samples" &&
                    it.key() != "coord_dim")
                    throw applan::ConfigError("unknown dataset key: " + it.key());
            dc.min_aps = d.value("min_aps", dc.min_aps);
            dc.max_aps = d.value("max_aps", dc.max_aps);
            dc.indoor_samples = d.value("indoor_samples", dc.indoor_samples);
            dc.coord_dim = d.value("coord_dim", dc.coord_dim);
        }
        applan::TrainConfig tc;
        if (c.contains("training")) tc = applan::train_config_from_json(c["training"]);
        if (r.seed) tc.seed = *r.seed;
        const std::size_t records = c.value("records", std::size_t{200});

        auto load_all = [&](const json& list) {
            std::vector<applan::FloorPlan> fps;
            for (const json& s : list) fps.push_back(applan::floorplan_from_spec(s, r.base_dir));
            return fps;
        };
        const applan::CoverageDataset data = applan::generate_dataset(load_all(c["floorplans"]), records, tc.seed, dc);
        applan::CoverageRegressor net(dc.coord_dim, tc.seed);
        const applan::LossCurve curve = applan::train(net, data, tc);

        auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
        json res = {{"records", data.records.size()},
                    {"parameters", net.parameter_count()},
                    {"train_mse", num(curve.train_mse.empty() ? NAN : curve.train_mse.back())},
                    {"val_mse", num(curve.val_mse.empty() ? NAN : curve.val_mse.back())}};
        if (c.contains("eval")) {
            json ev = json::object();
            for (const json& e : c["eval"]) {
                const std::string name = e.at("name").get<std::string>();
                const applan::CoverageDataset held = applan::generate_dataset(
                    load_all(e.at("floorplans")), e.value("records", records), e.value("seed", tc.seed + 1), dc);
                ev[name] = applan::dataset_mse(net, held);
            }
            res["eval_mse"] = ev;
        }
        if (!r.out.empty()) {
            fs::create_directories(r.out);
            net.save((fs::path(r.out) / "model.json").string());
            applan::write_loss_csv(curve, (fs::path(r.out) / "loss.csv").string());
            applan::write_text_file((fs::path(r.out) / "results.json").string(), res.dump(2) + "\n");
            applan::write_manifest(r.out, "train-reward", r.config, {tc.seed});
        }
        *result_json = dup_string(write_result(res));
    });
}

applan_status applan_agent(const char* request_json, char** result_json) {
    if (!result_json) return argument_error("null argument");
    *result_json = nullptr;
    APPLAN_GUARD({
        const Request r = parse_request(request_json);
        const json& c = r.config;
        for (auto it = c.begin(); it != c.end(); ++it)
            if (it.key() != "task" && it.key() != "agent") throw applan::ConfigError("unknown agent config key: " + it.key());
        if (!c.contains("task")) throw applan::ConfigError("agent config needs a task");
        const applan::BenchTask task = applan::bench_task_from_json(c["task"], r.base_dir);
        applan::AgentConfig ac;
        std::string script;
        if (c.contains("agent")) {
            json a = c["agent"];
            if (a.contains("mock_script")) {
                script = (fs::path(r.base_dir) / a["mock_script"].get<std::string>()).string();
                a.erase("mock_script");
            }
            ac = applan::agent_from_json(a);
        }
        ac.radio = task.reward.radio;
        if (!r.out.empty()) {
            fs::create_directories(r.out);
            ac.transcript_path = (fs::path(r.out) / "transcript.jsonl").string();
        }
        std::unique_ptr<applan::ChatClient> client;
        if (!script.empty()) client = std::make_unique<applan::MockChatClient>(applan::MockChatClient::from_file(script));
        else client = std::make_unique<applan::HttpChatClient>(applan::HttpClientConfig::from_env());

        auto summarize = [&](const applan::AgentResult& ar, const std::string& error) {
            json hist = json::array();
            for (const applan::HistoryEntry& h : ar.history.entries())
                hist.push_back({{"iteration", h.iteration},
                                {"proposed", applan::to_json(h.proposed)},
                                {"deployment", applan::to_json(h.deployment)},
                                {"repaired", h.repaired},
                                {"eval", applan::to_json(h.eval)}});
            json res = {{"task", task.name},
                        {"iterations", ar.iterations},
                        {"reached_target", ar.reached_target},
                        {"history", hist}};
            if (!ar.best.empty()) res["best"] = applan::to_json(ar.best);
            if (!error.empty()) res["error"] = error;
            if (!r.out.empty()) {
                applan::write_text_file((fs::path(r.out) / "history.json").string(), res.dump(2) + "\n");
                std::string csv = applan::eval_csv_header() + "\n";
                if (const auto b = ar.history.best_index())
                    csv += applan::eval_csv_row("agent", task.name, r.seed.value_or(0), &ar.history.entries()[*b].eval) + "\n";
                applan::write_text_file((fs::path(r.out) / "results.csv").string(), csv);
                std::vector<uint64_t> seeds;
                if (r.seed) seeds.push_back(*r.seed);
                applan::write_manifest(r.out, "agent", r.config, seeds, {{"model", client->model()}});
            }
            return res;
        };
        try {
            const applan::AgentResult ar = applan::run_agent_loop(*client, task.floorplan, task.reward.task, ac);
            *result_json = dup_string(write_result(summarize(ar, "")));
        } catch (const applan::AgentAborted& e) {
            *result_json = dup_string(write_result(summarize(e.partial(), e.what())));
            throw;
        }
    });
}

}  // extern "C"
