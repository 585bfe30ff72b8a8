// Acceptance suite. `applan_acceptance N` runs criterion N, `applan_acceptance`
// runs all of them. Each criterion prints one PASS/FAIL line.
#include <applan/bench.hpp>
#include <applan/io.hpp>
#include <applan/tasks.hpp>

#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>

using namespace applan;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string data_file(const std::string& name) {
    const char* dir = std::getenv("APPLAN_TEST_DATA");
    return std::string(dir ? dir : "tests/data") + "/" + name;
}

std::vector<double> flatten(const Gradient& g) {
    std::vector<double> v;
    for (const Vec3& r : g) v.insert(v.end(), r.begin(), r.end());
    return v;
}

Deployment unflatten(const std::vector<double>& x) {
    Deployment p(x.size() / 3);
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = {x[3 * k], x[3 * k + 1], x[3 * k + 2]};
    return p;
}

Deployment interior_deployment(const FloorPlan& fp, std::size_t n, Rng& rng) {
    Deployment p(n);
    for (Position& q : p)
        q = {fp.origin_x() + 1.0 + rng.uniform() * (fp.x_max() - fp.origin_x() - 2.0),
             fp.origin_y() + 1.0 + rng.uniform() * (fp.y_max() - fp.origin_y() - 2.0),
             fp.z_min() + 0.5 + rng.uniform() * (fp.z_max() - fp.z_min() - 1.0)};
    return p;
}

CoverageRegressor random_net(int dim, uint64_t seed) {
    CoverageRegressor net(dim, seed);
    Rng rng(seed, 99);
    for (DenseLayer& l : net.layers())
        for (int i = 0; i < l.bias.size(); ++i) l.bias(i) = 0.1 * rng.normal();
    return net;
}

PointSet random_points(Rng& rng, int rows, int dim) {
    PointSet m(rows, dim);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < dim; ++c) m(r, c) = 2.0 * rng.uniform() - 1.0;
    return m;
}

// 1. Samplers on a Gaussian target -----------------------------------------

Outcome gaussian_target() {
    const FloorPlan fp = open_room(6, 6);
    const oracle::QuadraticReward q(fp);
    RewardConfig task;
    task.task.n_aps = 1;
    SamplerConfig c;
    c.particles = 512;
    c.steps = 200;
    c.readout = Readout::Provider;
    c.early_stop = false;

    Outcome o{true, ""};
    for (int m = 0; m < 3; ++m) {
        const auto t0 = Clock::now();
        PlanResult r;
        if (m == 0) r = smc_gaussian(fp, q, c, task);
        else if (m == 1) r = smc_langevin(fp, q, c, task);
        else {
            SamplerConfig d = c;
            d.steps = 100;
            d.mc_samples = 100;
            r = diffusion_sample(fp, q, d, task);
        }
        const double rt = seconds_since(t0);
        const auto mu = ensemble_mean(r.final_ensemble);
        const auto var = ensemble_variance(r.final_ensemble);
        double mu_inf = 0.0;
        bool ok = rt < 60.0;
        for (double v : mu) mu_inf = std::max(mu_inf, std::abs(v));
        ok = ok && mu_inf < 0.1;
        for (double v : var) ok = ok && v >= 0.85 && v <= 1.15;
        o.pass = o.pass && ok;
        o.detail += fmt("%s%s |mean|inf=%.3f var=(%.3f, %.3f) %.1fs", m ? "; " : "", r.method.c_str(), mu_inf, var[0],
                        var[1], rt);
    }
    return o;
}

// 2. Score estimate against the closed form ---------------------------------

Outcome score_closed_form() {
    const auto t0 = Clock::now();
    const FloorPlan fp = open_room(10, 10);
    const oracle::QuadraticReward q(fp);
    const CoordinateMap map(fp, 2);
    const std::vector<double> p{1.0, 0.0};
    const double sigma = 1.0;
    const double tx = -p[0] / (1 + sigma * sigma), ty = -p[1] / (1 + sigma * sigma);
    const double norm = std::hypot(tx, ty);

    SamplerConfig cfg;
    cfg.mc_samples = 1000;
    Rng rng(cfg.seed);
    const auto s = estimate_score(q, fp, map, p, sigma, cfg, rng);
    const double single = std::hypot(s[0] - tx, s[1] - ty) / norm;

    const int trials = 200;
    auto rms_rel = [&](std::size_t mc) {
        SamplerConfig c;
        c.mc_samples = mc;
        double se = 0.0;
        for (int t = 0; t < trials; ++t) {
            Rng r(1000 + t, mc);
            const auto e = estimate_score(q, fp, map, p, sigma, c, r);
            se += (e[0] - tx) * (e[0] - tx) + (e[1] - ty) * (e[1] - ty);
        }
        return std::sqrt(se / trials) / norm;
    };
    const double e100 = rms_rel(100), e400 = rms_rel(400), e1000 = rms_rel(1000);
    const double ratio = e100 / e400;
    const double rt = seconds_since(t0);
    return {single < 0.05 && ratio >= 1.6 && ratio <= 2.5 && rt < 120.0,
            fmt("P_t=(1,0) sigma_t=1: score (%.4f, %.4f) vs (-0.5, 0), rel err %.4f at mc=1000 seed %llu; rms ratio "
                "mc100/mc400 %.3f; (info: rms rel err over %d trials at mc=1000 %.4f); %.1fs",
                s[0], s[1], single, static_cast<unsigned long long>(cfg.seed), ratio, trials, e1000, rt)};
}

// 3. Permutation invariance -------------------------------------------------

Outcome permutation_invariance() {
    const auto t0 = Clock::now();
    const FloorPlan fp = generate_synthetic(2, 10, 8, 12);
    RewardConfig cfg;
    cfg.task.interference_threshold_db = 15.0;
    cfg.task.throughput_min_bps = 40e6;
    cfg.task.d_min_m = 2.0;
    const ExactReward exact(cfg);
    const SmoothReward smooth(cfg);
    const CoverageRegressor net = random_net(2, 5);
    const PointSet indoor = indoor_sample_set(fp, 64, 1, 2);
    const CoordinateMap map(fp, 2);
    SamplerConfig sc;
    sc.mc_samples = 8;

    Rng rng(21);
    std::size_t checks = 0, failures = 0;
    auto check = [&](bool ok) {
        ++checks;
        if (!ok) ++failures;
    };
    for (int k = 0; k < 50; ++k) {
        const std::size_t n = 1 + k % 4;
        const Deployment p = oracle::random_deployment(fp, n, rng);
        const RadioMap m0 = compute_radio_map(fp, p, cfg.radio);
        Gradient g0;
        const double e0 = exact.value(fp, p);
        const double s0 = smooth.value_and_gradient(fp, p, g0);
        const PointSet a0 = normalize_positions(fp, p, 2);
        const double l0 = net.forward(a0, indoor);
        const PointSet lg0 = net.position_gradient(a0, indoor);
        const double ior0 = ior(m0, 10.0), tqs0 = tqs(m0, 50e6);
        const std::vector<double> u0 = map.to_normalized(p);
        std::vector<std::vector<double>> score0(2);
        for (int shortcut = 0; shortcut < 2; ++shortcut) {
            sc.exploit_invariance = shortcut;
            Rng r(k, 7);
            score0[shortcut] = estimate_score(smooth, fp, map, u0, 0.3, sc, r);
        }

        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        do {
            Deployment q(n);
            for (std::size_t i = 0; i < n; ++i) q[i] = p[perm[i]];
            const RadioMap m1 = compute_radio_map(fp, q, cfg.radio);
            Gradient g1;
            check(exact.value(fp, q) == e0);
            check(smooth.value_and_gradient(fp, q, g1) == s0);
            const PointSet a1 = normalize_positions(fp, q, 2);
            check(net.forward(a1, indoor) == l0);
            const PointSet lg1 = net.position_gradient(a1, indoor);
            check(ior(m1, 10.0) == ior0);
            check(tqs(m1, 50e6) == tqs0);
            for (std::size_t i = 0; i < n; ++i) {
                check(g1[i] == g0[perm[i]]);
                check(lg1.row(i) == lg0.row(perm[i]));
            }
            const std::vector<double> u1 = map.to_normalized(q);
            for (int shortcut = 0; shortcut < 2; ++shortcut) {
                sc.exploit_invariance = shortcut;
                Rng r(k, 7);
                const auto s1 = estimate_score(smooth, fp, map, u1, 0.3, sc, r);
                for (std::size_t i = 0; i < n; ++i)
                    check(s1[2 * i] == score0[shortcut][2 * perm[i]] &&
                          s1[2 * i + 1] == score0[shortcut][2 * perm[i] + 1]);
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    const double rt = seconds_since(t0);
    return {failures == 0 && rt < 30.0, fmt("%zu bit-identity checks, %zu mismatches; %.1fs", checks, failures, rt)};
}

// 4. Gradients against central differences ----------------------------------

Outcome gradient_correctness() {
    const auto t0 = Clock::now();
    const FloorPlan room = open_room(8, 6);
    RewardConfig cfg;
    cfg.radio.pathloss_threshold_db = 62.0;
    cfg.task.interference_threshold_db = 12.0;
    cfg.task.throughput_min_bps = 120e6;
    cfg.task.d_min_m = 1.5;
    Rng rng(17);
    double smooth_err = 0.0;
    for (int k = 0; k < 10; ++k) {
        const Deployment p = interior_deployment(room, 1 + k % 3, rng);
        Gradient g;
        smooth_reward(room, p, cfg, &g);
        std::vector<double> x;
        for (const Position& q : p) x.insert(x.end(), {q.x, q.y, q.z});
        const auto fd = oracle::central_difference(
            [&](const std::vector<double>& v) { return smooth_reward(room, unflatten(v), cfg, nullptr); }, x, 1e-4);
        smooth_err = std::max(smooth_err, oracle::max_relative_error(flatten(g), fd, 1e-9));
    }

    double pos_err = 0.0, weight_err = 0.0;
    for (int k = 0; k < 10; ++k) {
        const int dim = k % 2 ? 3 : 2;
        const CoverageRegressor net = random_net(dim, 100 + k);
        const PointSet aps = random_points(rng, 1 + k % 3, dim), ind = random_points(rng, 30, dim);
        const PointSet g = net.position_gradient(aps, ind);
        std::vector<double> x(aps.data(), aps.data() + aps.size());
        // Small step: the net is piecewise linear.
        const auto fd = oracle::central_difference(
            [&](const std::vector<double>& v) {
                PointSet m(aps.rows(), aps.cols());
                std::copy(v.begin(), v.end(), m.data());
                return net.forward(m, ind);
            },
            x, 1e-6);
        pos_err = std::max(pos_err,
                           oracle::max_relative_error(std::vector<double>(g.data(), g.data() + g.size()), fd, 1e-9));

        const double target = 0.3;
        std::vector<double> grad(net.parameter_count(), 0.0);
        net.accumulate_gradient(aps, ind, target, 1.0, nullptr, grad);
        const std::vector<double> p0 = net.parameters();
        CoverageRegressor probe = net;
        std::vector<double> analytic, numeric;
        for (int j = 0; j < 20; ++j) {
            const std::size_t idx = rng.index(p0.size());
            auto loss = [&](double delta) {
                std::vector<double> p = p0;
                p[idx] += delta;
                probe.set_parameters(p);
                const double e = probe.forward(aps, ind) - target;
                return e * e;
            };
            analytic.push_back(grad[idx]);
            numeric.push_back((loss(1e-5) - loss(-1e-5)) / 2e-5);
        }
        weight_err = std::max(weight_err, oracle::max_relative_error(analytic, numeric, 1e-9));
    }
    const double rt = seconds_since(t0);
    return {smooth_err < 1e-4 && pos_err < 1e-4 && weight_err < 1e-4 && rt < 60.0,
            fmt("max rel err: smooth reward %.2e, net positions %.2e, net weights %.2e (10 instances each); %.1fs",
                smooth_err, pos_err, weight_err, rt)};
}

// 5. Metric arithmetic ------------------------------------------------------

Outcome metric_arithmetic() {
    const auto t0 = Clock::now();
    bool ok = true;
    ok = ok && ior(std::vector<double>{-1, 0, 1, 3}, 0.0) == 1.0;
    ok = ok && ior(std::vector<double>{-5, -3, -1, -0.5}, 0.0) == 0.0;
    std::vector<double> one(8, 10.0);
    one[3] = 22.0;
    ok = ok && ior(one, 20.0) == 0.25;
    ok = ok && tqs(std::vector<double>{2, 4, 6, 8}, 5.0) == 2.5;
    ok = ok && tqs(std::vector<double>{7, 9, 11}, 5.0) == 9.0;
    ok = ok && tqs(std::vector<double>(5, 0.0), 1.0) == 0.0;
    const bool fixtures = ok;

    const FloorPlan room = open_room(6, 6);
    const Deployment p{{2, 3, 1.5}, {4.5, 3, 1.5}};
    const RadioMap map = compute_radio_map(room, p, {});
    const auto over = interference_over_noise_db(map);
    const double worst = *std::max_element(over.begin(), over.end());
    const double compliant = ior(map, worst);
    TaskSpec task;
    task.n_aps = 2;
    task.d_min_m = 1.0;
    task.interference_threshold_db = worst;
    task.throughput_min_bps = 1.0;
    const Residuals r = physics_residuals(room, p, map, task);
    const double rt = seconds_since(t0);
    return {fixtures && compliant == 0.0 && r.e_phy == 0.0 && rt < 5.0,
            fmt("fixtures %s; IOR on compliant map %g; e_phy on feasible deployment %g; %.2fs",
                fixtures ? "exact" : "MISMATCH", compliant, r.e_phy, rt)};
}

// 6. Fragmented landscape ordering ------------------------------------------

Outcome fragmented_landscape() {
    const auto t0 = Clock::now();
    const PlanningTask t = two_mode_task();
    BenchConfig c;
    c.tasks = {{t.reward.task.name, t.floorplan, t.reward}};
    // Every method gets the same cap of 10,000 reward evaluations:
    // diffusion K * mc * T = 10 * 10 * 100, SMC K * T = 10 * 1000, gradient 1000 steps.
    const std::vector<std::string> methods{"diffusion", "smc_gaussian", "smc_langevin", "gradient"};
    struct Stats {
        double reward = 0.0, calls = 0.0;
        int success = 0;
    };
    std::vector<Stats> stats(methods.size());
    const int seeds = 50;
    for (std::size_t m = 0; m < methods.size(); ++m) {
        BenchConfig cc = c;
        if (methods[m] != "diffusion") cc.sampler.steps = 1000;
        for (int s = 0; s < seeds; ++s) {
            const TrialResult tr = run_trial(methods[m], cc.tasks[0], s, cc);
            if (!tr.eval) continue;
            stats[m].success += tr.eval->success;
            stats[m].reward += tr.reward / seeds;
            stats[m].calls += static_cast<double>(tr.reward_calls) / seeds;
        }
    }
    bool gradient_lowest = true;
    for (std::size_t m = 0; m + 1 < methods.size(); ++m) gradient_lowest = gradient_lowest && stats.back().success < stats[m].success;
    const bool diffusion_ge = stats[0].reward >= stats[1].reward;
    const double rt = seconds_since(t0);
    std::string d;
    for (std::size_t m = 0; m < methods.size(); ++m)
        d += fmt("%s%s reward %.4f success %d%% calls %.0f", m ? "; " : "", methods[m].c_str(), stats[m].reward,
                 2 * stats[m].success, stats[m].calls);
    d += fmt(" | diffusion>=smc_gaussian: %s, gradient lowest success: %s; %.0fs", diffusion_ge ? "yes" : "no",
             gradient_lowest ? "yes" : "no", rt);
    return {diffusion_ge && gradient_lowest && rt < 900.0, d};
}

// 7. Particle ablation ------------------------------------------------------

BenchTask level2_task() {
    BenchTask t{"level2", generate_synthetic(2, 24, 18, 7), RewardConfig{}};
    t.reward.task.name = "level2";
    t.reward.task.n_aps = 1;
    t.reward.task.coverage_target = 0.60;
    return t;
}

Outcome particle_ablation() {
    const auto t0 = Clock::now();
    BenchConfig c;
    c.tasks = {level2_task()};
    c.seeds.resize(20);
    std::iota(c.seeds.begin(), c.seeds.end(), 0);
    const auto rows = ablation_particles(c, {5, 10, 20});
    bool non_decreasing = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
        non_decreasing = non_decreasing && rows[i].row.success_rate >= rows[i - 1].row.success_rate;
    const bool faster = rows.back().row.runtime.mean <= rows.front().row.runtime.mean;
    const double rt = seconds_since(t0);
    std::string d;
    for (const AblationRow& r : rows)
        d += fmt("K=%g success %.0f%% runtime %.2fs; ", r.parameter, r.row.success_rate, r.row.runtime.mean);
    d += fmt("| success non-decreasing: %s, runtime(K=20) <= runtime(K=5): %s; %.0fs", non_decreasing ? "yes" : "no",
             faster ? "yes" : "no", rt);
    return {non_decreasing && faster && rt < 900.0, d};
}

// 8. Temperature ablation ---------------------------------------------------

Outcome temperature_ablation() {
    const auto t0 = Clock::now();
    const PlanningTask t = two_mode_task();
    BenchConfig c;
    c.tasks = {{t.reward.task.name, t.floorplan, t.reward}};
    c.seeds.resize(20);
    std::iota(c.seeds.begin(), c.seeds.end(), 0);
    const auto rows = ablation_temperature(c, {0.1, 1.5, 5.0});
    const Aggregate& lo = rows[0].row.coverage;
    const Aggregate& mid = rows[1].row.coverage;
    const Aggregate& hi = rows[2].row.coverage;
    // Standard error of the difference of two arm means.
    auto pooled_se = [](const Aggregate& a, const Aggregate& b) {
        return std::sqrt(a.std * a.std / static_cast<double>(a.n) + b.std * b.std / static_cast<double>(b.n));
    };
    const bool ok_lo = mid.mean >= lo.mean - pooled_se(mid, lo);
    const bool ok_hi = mid.mean >= hi.mean - pooled_se(mid, hi);
    const double rt = seconds_since(t0);
    return {ok_lo && ok_hi && rt < 900.0,
            fmt("coverage 1/beta=0.1: %.4f+-%.4f, 1.5: %.4f+-%.4f, 5.0: %.4f+-%.4f; margins vs 0.1 %.4f (se %.4f), "
                "vs 5.0 %.4f (se %.4f); %.0fs",
                lo.mean, lo.std, mid.mean, mid.std, hi.mean, hi.std, mid.mean - lo.mean, pooled_se(mid, lo),
                mid.mean - hi.mean, pooled_se(mid, hi), rt)};
}

// 9. Reward network regime gap ----------------------------------------------

Outcome reward_net_regimes() {
    const auto t0 = Clock::now();
    std::vector<FloorPlan> train_plans, shifted;
    for (int k = 0; k < 6; ++k) train_plans.push_back(generate_synthetic(1 + k % 2, 16, 12, 100 + k));
    for (int k = 0; k < 3; ++k) shifted.push_back(generate_synthetic(4, 16, 12, 200 + k));
    DatasetConfig dc;
    dc.indoor_samples = 128;
    bool ok = true;
    std::string d;
    for (uint64_t seed = 0; seed < 3; ++seed) {
        const CoverageDataset data = generate_dataset(train_plans, 300, seed, dc);
        const CoverageDataset zero_shot = generate_dataset(shifted, 150, seed + 1, dc);
        CoverageRegressor net(2, seed);
        TrainConfig tc;
        tc.seed = seed;
        const LossCurve curve = train(net, data, tc);
        const double val = curve.val_mse.back();
        const double zs = dataset_mse(net, zero_shot);
        ok = ok && val < zs;
        d += fmt("seed %llu: val %.5f zero-shot %.5f; ", static_cast<unsigned long long>(seed), val, zs);
    }
    const double rt = seconds_since(t0);
    d += fmt("%.0fs", rt);
    return {ok && rt < 600.0, d};
}

// 10. Agent loop contract ---------------------------------------------------

Outcome agent_contract() {
    const auto t0 = Clock::now();
    const FloorPlan room = open_room(2, 2);
    TaskSpec task;
    task.name = "room";
    const std::string dir = oracle::temp_dir("acceptance_agent");

    MockChatClient ok_client = MockChatClient::from_file(data_file("mock_success.json"));
    const AgentResult ok = run_agent_loop(ok_client, room, task, {});
    const bool stopped = ok.reached_target && ok.iterations == 1;

    bool clean_abort = false;
    try {
        MockChatClient bad = MockChatClient::from_file(data_file("mock_parse_failures.json"));
        run_agent_loop(bad, room, task, {});
    } catch (const AgentAborted& e) {
        clean_abort = e.partial().history.empty() && e.partial().transcript.size() == 3;
    }

    bool reproducible = true;
    for (const char* script : {"mock_success.json", "mock_mediocre.json", "mock_parse_failures.json"}) {
        std::string text[2];
        for (int k = 0; k < 2; ++k) {
            AgentConfig cfg;
            cfg.max_iters = 3;
            cfg.transcript_path = dir + "/" + script + std::to_string(k) + ".jsonl";
            MockChatClient client = MockChatClient::from_file(data_file(script));
            try {
                run_agent_loop(client, open_room(10, 10), task, cfg);
            } catch (const AgentAborted&) {
            }
            text[k] = oracle::slurp(cfg.transcript_path);
        }
        reproducible = reproducible && !text[0].empty() && text[0] == text[1];
    }
    const double rt = seconds_since(t0);
    return {stopped && clean_abort && reproducible && rt < 10.0,
            fmt("stops on target: %s; clean abort after 3 parse failures: %s; byte-identical transcripts: %s; %.2fs",
                stopped ? "yes" : "no", clean_abort ? "yes" : "no", reproducible ? "yes" : "no", rt)};
}

// 11. Determinism -----------------------------------------------------------

std::string without_runtime(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) {
        std::size_t a = 0;
        for (int k = 0; k < 3 && a != std::string::npos; ++k) a = line.find(',', a) + 1;
        const std::size_t b = line.find(',', a);
        out += line.substr(0, a) + (b == std::string::npos ? "" : line.substr(b)) + "\n";
    }
    return out;
}

Outcome determinism() {
    const auto t0 = Clock::now();
    const PlanningTask t = two_mode_task();
    BenchConfig c;
    c.methods = known_methods();
    c.tasks = {{t.reward.task.name, t.floorplan, t.reward}};
    c.seeds = {3, 8};
    c.agent_script = data_file("mock_mediocre.json");
    c.agent.max_iters = 3;
    c.sampler.record_trajectory = true;
    const std::string root = oracle::temp_dir("acceptance_determinism");
    for (const char* run : {"a", "b"}) {
        BenchConfig cc = c;
        cc.output_dir = root + "/" + run;
        run_benchmark(cc);
    }
    bool same = without_runtime(oracle::slurp(root + "/a/results.csv")) ==
                without_runtime(oracle::slurp(root + "/b/results.csv"));
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(root + "/a/traces")) {
        ++files;
        const fs::path other = fs::path(root) / "b" / "traces" / e.path().filename();
        same = same && fs::exists(other) && oracle::slurp(e.path().string()) == oracle::slurp(other.string());
    }
    const double rt = seconds_since(t0);
    return {same && files > 0 && rt < 120.0,
            fmt("%zu trials x2, results (runtime excluded) and %zu trace files identical: %s; %.1fs",
                c.methods.size() * c.seeds.size(), files, same ? "yes" : "no", rt)};
}

const std::vector<std::pair<const char*, std::function<Outcome()>>>& criteria() {
    static const std::vector<std::pair<const char*, std::function<Outcome()>>> c{
        {"gaussian target moments", gaussian_target},
        {"closed-form score", score_closed_form},
        {"permutation invariance", permutation_invariance},
        {"gradient correctness", gradient_correctness},
        {"metric arithmetic", metric_arithmetic},
        {"fragmented landscape ordering", fragmented_landscape},
        {"particle ablation trend", particle_ablation},
        {"temperature ablation shape", temperature_ablation},
        {"reward net regime gap", reward_net_regimes},
        {"agent loop contract", agent_contract},
        {"determinism", determinism},
    };
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
    if (which.empty())
        for (int i = 1; i <= static_cast<int>(criteria().size()); ++i) which.push_back(i);
    int failed = 0;
    for (int i : which) {
        if (i < 1 || i > static_cast<int>(criteria().size())) {
            std::fprintf(stderr, "no criterion %d\n", i);
            return 2;
        }
        const auto& [name, run] = criteria()[i - 1];
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        std::printf("criterion %2d %-30s %s  %s\n", i, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed ? 1 : 0;
}
