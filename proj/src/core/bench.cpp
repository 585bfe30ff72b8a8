#include <applan/bench.hpp>
#include <applan/io.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <thread>

namespace applan {

namespace fs = std::filesystem;

ProviderKind provider_kind(const std::string& name) {
    if (name == "exact") return ProviderKind::Exact;
    if (name == "smooth") return ProviderKind::Smooth;
    if (name == "learned") return ProviderKind::Learned;
    throw ConfigError("unknown reward provider: " + name);
}

const char* provider_name(ProviderKind k) {
    switch (k) {
        case ProviderKind::Exact: return "exact";
        case ProviderKind::Smooth: return "smooth";
        case ProviderKind::Learned: return "learned";
    }
    return "?";
}

std::unique_ptr<RewardProvider> make_provider(ProviderKind kind, const RewardConfig& cfg,
                                              const std::string& model_path) {
    switch (kind) {
        case ProviderKind::Exact: return std::make_unique<ExactReward>(cfg);
        case ProviderKind::Smooth: return std::make_unique<SmoothReward>(cfg);
        case ProviderKind::Learned:
            if (model_path.empty()) throw ConfigError("learned provider needs a reward model file");
            return std::make_unique<LearnedReward>(CoverageRegressor::load(model_path), cfg);
    }
    throw ConfigError("unknown reward provider");
}

const std::vector<std::string>& known_methods() {
    static const std::vector<std::string> m{"diffusion", "smc_gaussian", "smc_langevin", "gradient", "agent"};
    return m;
}

void BenchConfig::validate() const {
    if (methods.empty()) throw ConfigError("no methods configured");
    if (tasks.empty()) throw ConfigError("no tasks configured");
    if (seeds.empty()) throw ConfigError("no seeds configured");
    for (const std::string& m : methods)
        if (std::find(known_methods().begin(), known_methods().end(), m) == known_methods().end())
            throw ConfigError("unknown method: " + m);
    for (const BenchTask& t : tasks) t.reward.validate();
    sampler.validate();
    if (provider == ProviderKind::Learned && reward_model.empty())
        throw ConfigError("learned provider needs a reward model file");
    if (std::find(methods.begin(), methods.end(), "agent") != methods.end()) {
        agent.validate();
        if (agent_script.empty() && HttpClientConfig::from_env().endpoint.empty())
            throw ConfigError("agent method needs a mock script or APPLAN_LLM_ENDPOINT");
    }
    if (workers < 1) throw ConfigError("workers must be at least 1");
}

namespace {

std::string trial_stem(const std::string& method, const std::string& task, uint64_t seed) {
    return method + "_" + task + "_s" + std::to_string(seed);
}

std::unique_ptr<ChatClient> make_client(const BenchConfig& cfg) {
    if (!cfg.agent_script.empty()) return std::make_unique<MockChatClient>(MockChatClient::from_file(cfg.agent_script));
    return std::make_unique<HttpChatClient>(HttpClientConfig::from_env());
}

}  // namespace

TrialResult run_trial(const std::string& method, const BenchTask& task, uint64_t seed, const BenchConfig& cfg,
                      const RewardProvider* provider) {
    TrialResult out;
    out.method = method;
    out.task = task.name;
    out.seed = seed;
    if (std::find(known_methods().begin(), known_methods().end(), method) == known_methods().end())
        throw ConfigError("unknown method: " + method);
    try {
        const FloorPlan& fp = task.floorplan;
        Deployment plan;
        double runtime = 0.0;
        if (method == "agent") {
            auto client = make_client(cfg);
            AgentConfig ac = cfg.agent;
            ac.radio = task.reward.radio;
            if (!cfg.output_dir.empty() && cfg.write_traces)
                ac.transcript_path = (fs::path(cfg.output_dir) / "traces" / (trial_stem(method, task.name, seed) + ".jsonl")).string();
            const auto t0 = std::chrono::steady_clock::now();
            AgentResult ar = run_agent_loop(*client, fp, task.reward.task, ac);
            runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            plan = ar.best;
            out.iterations = ar.iterations;
            for (const HistoryEntry& h : ar.history.entries()) {
                const double prev = out.trace.empty() ? -std::numeric_limits<double>::infinity() : out.trace.back().best_reward;
                out.trace.push_back({h.iteration, std::max(prev, h.eval.coverage), h.eval.coverage, 1.0});
            }
        } else {
            std::unique_ptr<RewardProvider> owned;
            if (!provider) {
                owned = make_provider(cfg.provider, task.reward, cfg.reward_model);
                provider = owned.get();
            }
            SamplerConfig sc = cfg.sampler;
            sc.seed = seed;
            const auto t0 = std::chrono::steady_clock::now();
            PlanResult pr;
            if (method == "diffusion") pr = diffusion_sample(fp, *provider, sc, task.reward);
            else if (method == "smc_gaussian") pr = smc_gaussian(fp, *provider, sc, task.reward);
            else if (method == "smc_langevin") pr = smc_langevin(fp, *provider, sc, task.reward);
            else pr = gradient_ascent(fp, *provider, sc, task.reward);
            runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            plan = pr.best;
            for (Position& p : plan) p = snap_to_free_cell(fp, p);
            out.iterations = pr.iterations;
            out.reward_calls = pr.reward_calls;
            out.trace = std::move(pr.trace);
            out.trajectory = std::move(pr.trajectory);
        }
        if (plan.empty()) throw Error("planner produced no deployment");
        EvalResult ev = evaluate(fp, plan, task.reward.task, task.reward.radio);
        ev.runtime_s = runtime;
        if (task.reward.task.max_runtime_s && runtime > *task.reward.task.max_runtime_s) ev.success = false;
        out.reward = exact_reward(fp, plan, task.reward);
        out.plan = std::move(plan);
        out.eval = ev;
    } catch (const std::exception& e) {
        out.eval.reset();
        out.error = e.what();
    }
    return out;
}

Aggregate aggregate(std::span<const double> v) {
    Aggregate a;
    a.n = v.size();
    if (v.empty()) return a;
    double s = 0.0;
    for (double x : v) s += x;
    a.mean = s / static_cast<double>(v.size());
    if (v.size() == 1) {
        a.std = 0.0;
        return a;
    }
    double ss = 0.0;
    for (double x : v) ss += (x - a.mean) * (x - a.mean);
    a.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    return a;
}

std::vector<ReportRow> summarize(const std::vector<TrialResult>& trials, const std::vector<std::string>& methods,
                                 const std::vector<std::string>& tasks) {
    std::vector<ReportRow> rows;
    for (const std::string& t : tasks)
        for (const std::string& m : methods) {
            ReportRow row;
            row.method = m;
            row.task = t;
            std::vector<double> rt, cov, ior_v, tqs_v, rew;
            for (const TrialResult& tr : trials) {
                if (tr.method != m || tr.task != t) continue;
                ++row.trials;
                if (!tr.eval) continue;
                if (tr.eval->success) ++row.successes;
                rt.push_back(tr.eval->runtime_s);
                cov.push_back(tr.eval->coverage);
                ior_v.push_back(tr.eval->ior);
                tqs_v.push_back(tr.eval->tqs);
                rew.push_back(tr.reward);
            }
            row.success_rate = row.trials ? 100.0 * static_cast<double>(row.successes) / static_cast<double>(row.trials) : 0.0;
            row.runtime = aggregate(rt);
            row.coverage = aggregate(cov);
            row.ior = aggregate(ior_v);
            row.tqs = aggregate(tqs_v);
            row.reward = aggregate(rew);
            rows.push_back(row);
        }
    return rows;
}

BenchReport run_benchmark(const BenchConfig& cfg) {
    cfg.validate();
    struct Job {
        std::size_t task, method;
        uint64_t seed;
    };
    std::vector<Job> jobs;
    for (std::size_t t = 0; t < cfg.tasks.size(); ++t)
        for (std::size_t m = 0; m < cfg.methods.size(); ++m)
            for (uint64_t s : cfg.seeds) jobs.push_back({t, m, s});

    std::vector<std::unique_ptr<RewardProvider>> providers;
    for (const BenchTask& t : cfg.tasks) providers.push_back(make_provider(cfg.provider, t.reward, cfg.reward_model));
    if (!cfg.output_dir.empty()) {
        fs::create_directories(fs::path(cfg.output_dir) / "traces");
        fs::create_directories(fs::path(cfg.output_dir) / "heatmaps");
    }

    BenchReport rep;
    rep.trials.resize(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
            const Job& j = jobs[i];
            rep.trials[i] = run_trial(cfg.methods[j.method], cfg.tasks[j.task], j.seed, cfg, providers[j.task].get());
        }
    };
    const unsigned n_workers = std::min<unsigned>(cfg.workers, static_cast<unsigned>(jobs.size()));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    std::vector<std::string> task_names;
    for (const BenchTask& t : cfg.tasks) task_names.push_back(t.name);
    rep.rows = summarize(rep.trials, cfg.methods, task_names);
    if (!cfg.output_dir.empty()) write_report_files(cfg, rep);
    return rep;
}

namespace {

std::string pm(const Aggregate& a, const char* f) {
    if (a.n == 0) return "null";
    char buf[96];
    std::string spec = std::string(f) + " +/- " + f;
    std::snprintf(buf, sizeof buf, spec.c_str(), a.mean, a.std);
    return buf;
}

}  // namespace

std::string format_report(const BenchReport& r) {
    std::ostringstream o;
    char line[512];
    std::snprintf(line, sizeof line, "%-14s %-18s %6s %20s %20s %18s %18s %9s\n", "method", "task", "trials",
                  "runtime_s", "coverage", "ior", "tqs_mbps", "success%");
    o << line;
    for (const ReportRow& row : r.rows) {
        std::snprintf(line, sizeof line, "%-14s %-18s %6zu %20s %20s %18s %18s %9.1f\n", row.method.c_str(),
                      row.task.c_str(), row.trials, pm(row.runtime, "%.3f").c_str(), pm(row.coverage, "%.4f").c_str(),
                      pm(row.ior, "%.4f").c_str(), pm(row.tqs, "%.2f").c_str(), row.success_rate);
        o << line;
    }
    std::map<std::string, std::vector<const ReportRow*>> by_task;
    for (const ReportRow& row : r.rows) by_task[row.task].push_back(&row);
    for (auto& [task, rows] : by_task) {
        o << "\nranking on " << task << ":\n";
        struct Metric {
            const char* name;
            bool higher_better;
            double (*get)(const ReportRow&);
        };
        const Metric metrics[] = {
            {"runtime_s", false, [](const ReportRow& x) { return x.runtime.mean; }},
            {"coverage", true, [](const ReportRow& x) { return x.coverage.mean; }},
            {"ior", false, [](const ReportRow& x) { return x.ior.mean; }},
            {"tqs", true, [](const ReportRow& x) { return x.tqs.mean; }},
            {"success", true, [](const ReportRow& x) { return x.success_rate; }},
        };
        for (const Metric& m : metrics) {
            auto sorted = rows;
            std::stable_sort(sorted.begin(), sorted.end(), [&](const ReportRow* a, const ReportRow* b) {
                const double va = m.get(*a), vb = m.get(*b);
                if (std::isnan(va)) return false;
                if (std::isnan(vb)) return true;
                return m.higher_better ? va > vb : va < vb;
            });
            o << "  " << m.name << ":";
            for (std::size_t i = 0; i < sorted.size(); ++i) o << (i ? " > " : " ") << sorted[i]->method;
            o << "\n";
        }
    }
    return o.str();
}

void write_report_files(const BenchConfig& cfg, const BenchReport& r) {
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir / "traces");
    fs::create_directories(dir / "heatmaps");
    std::string csv = eval_csv_header() + "\n";
    for (const TrialResult& t : r.trials)
        csv += eval_csv_row(t.method, t.task, t.seed, t.eval ? &*t.eval : nullptr) + "\n";
    write_text_file((dir / "results.csv").string(), csv);
    write_text_file((dir / "report.txt").string(), format_report(r));

    std::map<std::string, const BenchTask*> tasks;
    for (const BenchTask& t : cfg.tasks) tasks[t.name] = &t;
    for (const TrialResult& t : r.trials) {
        const std::string stem = trial_stem(t.method, t.task, t.seed);
        if (cfg.write_traces) {
            PlanResult pr;
            pr.trace = t.trace;
            write_trace_csv(pr, (dir / "traces" / (stem + ".csv")).string());
            if (!t.trajectory.empty()) {
                pr.trajectory = t.trajectory;
                write_trajectory_csv(pr, (dir / "traces" / (stem + "_trajectory.csv")).string());
            }
        }
        if (cfg.write_heatmaps && t.eval) {
            const BenchTask& bt = *tasks.at(t.task);
            const RadioMap map = compute_radio_map(bt.floorplan, t.plan, bt.reward.radio);
            write_heatmap_pgm(bt.floorplan, map, MapField::BestPathloss, (dir / "heatmaps" / (stem + ".pgm")).string());
        }
    }
    write_manifest(cfg.output_dir, "bench", bench_config_to_json(cfg), cfg.seeds,
                   {{"trials", r.trials.size()}});
}

std::vector<AblationRow> ablation_particles(BenchConfig cfg, const std::vector<std::size_t>& particle_counts) {
    if (particle_counts.empty()) throw ConfigError("no particle counts given");
    for (std::size_t k : particle_counts)
        if (k < 1) throw ConfigError("particle count must be at least 1");
    cfg.methods = {"diffusion"};
    const std::string out = cfg.output_dir;
    std::vector<AblationRow> rows;
    for (std::size_t k : particle_counts) {
        BenchConfig c = cfg;
        c.sampler.particles = k;
        c.output_dir = out.empty() ? "" : (fs::path(out) / ("K" + std::to_string(k))).string();
        for (const ReportRow& row : run_benchmark(c).rows) rows.push_back({static_cast<double>(k), row});
    }
    if (!out.empty()) {
        write_text_file((fs::path(out) / "ablation_particles.csv").string(), ablation_csv("particles", rows));
        nlohmann::json ks = particle_counts;
        write_manifest(out, "ablate particles", bench_config_to_json(cfg), cfg.seeds, {{"particles", ks}});
    }
    return rows;
}

std::vector<AblationRow> ablation_temperature(BenchConfig cfg, const std::vector<double>& temperatures) {
    if (temperatures.empty()) throw ConfigError("no temperatures given");
    for (double t : temperatures)
        if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("temperature must be positive and finite");
    cfg.methods = {"diffusion"};
    const std::string out = cfg.output_dir;
    std::vector<AblationRow> rows;
    for (double t : temperatures) {
        BenchConfig c = cfg;
        c.sampler.beta = 1.0 / t;
        for (BenchTask& bt : c.tasks) bt.reward.beta = c.sampler.beta;
        char name[32];
        std::snprintf(name, sizeof name, "T%g", t);
        c.output_dir = out.empty() ? "" : (fs::path(out) / name).string();
        for (const ReportRow& row : run_benchmark(c).rows) rows.push_back({t, row});
    }
    if (!out.empty()) {
        write_text_file((fs::path(out) / "ablation_temperature.csv").string(), ablation_csv("temperature", rows));
        nlohmann::json ts = temperatures;
        write_manifest(out, "ablate temperature", bench_config_to_json(cfg), cfg.seeds, {{"temperatures", ts}});
    }
    return rows;
}

std::string ablation_csv(const std::string& parameter_name, const std::vector<AblationRow>& rows) {
    std::string s = parameter_name +
                    ",method,task,trials,success_rate,runtime_mean,runtime_std,coverage_mean,coverage_std,ior_mean,"
                    "ior_std,tqs_mean,tqs_std\n";
    auto f = [](double v) {
        if (std::isnan(v)) return std::string();
        char b[32];
        std::snprintf(b, sizeof b, "%.6g", v);
        return std::string(b);
    };
    for (const AblationRow& a : rows) {
        const ReportRow& r = a.row;
        s += f(a.parameter) + "," + r.method + "," + r.task + "," + std::to_string(r.trials) + "," + f(r.success_rate) +
             "," + f(r.runtime.mean) + "," + f(r.runtime.std) + "," + f(r.coverage.mean) + "," + f(r.coverage.std) +
             "," + f(r.ior.mean) + "," + f(r.ior.std) + "," + f(r.tqs.mean) + "," + f(r.tqs.std) + "\n";
    }
    return s;
}

}  // namespace applan
