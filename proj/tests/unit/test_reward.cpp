#include <applan/reward.hpp>
#include <applan/tasks.hpp>

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace applan;

namespace {

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

}  // namespace

TEST_CASE("boltzmann weight") {
    CHECK(boltzmann_weight(0.0, 1.0) == 1.0);
    CHECK(boltzmann_weight(std::log(2.0), 1.0) == doctest::Approx(2.0));
    CHECK(boltzmann_weight(0.5, 2.0) == doctest::Approx(2.718281828));
}

TEST_CASE("exact reward examples") {
    const FloorPlan small = open_room(2, 2);
    RewardConfig cfg;
    CHECK(exact_reward(small, Deployment{{1.5, 1.5, 1.5}}, cfg) == 1.0);

    RewardConfig deaf;
    deaf.radio.pathloss_threshold_db = 40.5;
    const FloorPlan big = open_room(20, 20);
    CHECK(exact_reward(big, Deployment{{0.25, 0.25, 1.5}}, deaf) <= 0.0);

    const FloorPlan room = open_room(6, 6);
    RewardConfig cfg6;
    cfg6.radio.pathloss_threshold_db = 62.0;
    for (const Position& ap : {Position{1, 1, 1.5}, Position{3.5, 3.5, 1.5}, Position{6, 2, 2.5}}) {
        const Deployment p{ap};
        const RadioMap map = compute_radio_map(room, p, cfg6.radio);
        std::size_t covered = 0;
        for (std::size_t i = 0; i < map.size(); ++i) covered += map.best_pathloss_db[i] <= 62.0;
        const double frac = static_cast<double>(covered) / static_cast<double>(map.size());
        CHECK(exact_reward(room, p, cfg6) == frac);
        CHECK(exact_reward(room, p, map, cfg6) == frac);
        CHECK(frac == coverage_fraction(map));
    }
    CHECK_THROWS_AS(exact_reward(room, Deployment{}, cfg), ConfigError);
}

TEST_CASE("both exact reward paths agree with constraints active") {
    const FloorPlan fp = generate_synthetic(3, 16, 12, 6);
    RewardConfig cfg;
    cfg.task.interference_threshold_db = 15.0;
    cfg.task.throughput_min_bps = 60e6;
    cfg.task.d_min_m = 3.0;
    Rng rng(4);
    for (int k = 0; k < 10; ++k) {
        const Deployment p = oracle::random_deployment(fp, 3, rng);
        const RadioMap map = compute_radio_map(fp, p, cfg.radio);
        CHECK(exact_reward(fp, p, cfg) == exact_reward(fp, p, map, cfg));
    }
}

TEST_CASE("penalty term") {
    const FloorPlan room = open_room(6, 6);
    RewardConfig cfg;
    cfg.task.d_min_m = 2.0;
    const Deployment p{{2, 3, 1.5}, {3, 3, 1.5}};
    CHECK(penalty(room, p, cfg, nullptr) == doctest::Approx(10.0 * 0.25));
    const Deployment outside{{0.25, 3, 1.5}};
    CHECK(penalty(room, outside, cfg, nullptr) == doctest::Approx(10.0 * 0.0625));
    const double covered = evaluate(room, outside, cfg.task, cfg.radio).coverage;
    CHECK(exact_reward(room, outside, cfg) == doctest::Approx(covered - 0.625));
}

TEST_CASE("smooth reward gradient matches central differences") {
    const FloorPlan room = open_room(8, 6);
    RewardConfig cfg;
    cfg.radio.pathloss_threshold_db = 62.0;
    cfg.task.interference_threshold_db = 12.0;
    cfg.task.throughput_min_bps = 120e6;
    cfg.task.d_min_m = 1.5;
    Rng rng(17);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const Deployment p = interior_deployment(room, 1 + k % 3, rng);
        Gradient g;
        smooth_reward(room, p, cfg, &g);
        std::vector<double> x;
        for (const Position& q : p) x.insert(x.end(), {q.x, q.y, q.z});
        const auto fd = oracle::central_difference(
            [&](const std::vector<double>& v) { return smooth_reward(room, unflatten(v), cfg, nullptr); }, x, 1e-4);
        worst = std::max(worst, oracle::max_relative_error(flatten(g), fd, 1e-9));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("exact provider carries the smooth gradient") {
    const FloorPlan room = open_room(8, 6);
    RewardConfig cfg;
    cfg.radio.pathloss_threshold_db = 62.0;
    const ExactReward exact(cfg);
    const SmoothReward smooth(cfg);
    Rng rng(3);
    const Deployment p = interior_deployment(room, 2, rng);
    Gradient ge, gs;
    const double v = exact.value_and_gradient(room, p, ge);
    smooth.value_and_gradient(room, p, gs);
    CHECK(v == exact.value(room, p));
    CHECK(flatten(ge) == flatten(gs));
}

TEST_CASE("providers are permutation invariant and equivariant") {
    const FloorPlan fp = generate_synthetic(2, 14, 10, 12);
    RewardConfig cfg;
    cfg.task.interference_threshold_db = 15.0;
    cfg.task.throughput_min_bps = 40e6;
    cfg.task.d_min_m = 2.0;
    const ExactReward exact(cfg);
    const SmoothReward smooth(cfg);
    Rng rng(9);
    for (int k = 0; k < 10; ++k) {
        Deployment p = oracle::random_deployment(fp, 3, rng);
        Deployment q{p[2], p[0], p[1]};
        for (const RewardProvider* prov : {static_cast<const RewardProvider*>(&exact),
                                           static_cast<const RewardProvider*>(&smooth)}) {
            Gradient gp, gq;
            const double vp = prov->value_and_gradient(fp, p, gp);
            const double vq = prov->value_and_gradient(fp, q, gq);
            CHECK(vp == vq);
            CHECK(prov->value(fp, p) == prov->value(fp, q));
            CHECK(gq[0] == gp[2]);
            CHECK(gq[1] == gp[0]);
            CHECK(gq[2] == gp[1]);
        }
    }
}

TEST_CASE("far-away AP: coverage gradient vanishes, boundary penalty pulls it back") {
    const FloorPlan room = open_room(6, 6);
    RewardConfig cfg;
    const Deployment p{{2000.0, 3.0, 1.5}};
    Gradient g, pg;
    smooth_reward(room, p, cfg, &g);
    penalty(room, p, cfg, &pg);
    double cov_norm = 0.0;
    for (int a = 0; a < 3; ++a) cov_norm += std::pow(g[0][a] + pg[0][a], 2);
    CHECK(std::sqrt(cov_norm) < 1e-8);
    const Position target = project_to_domain(room, p[0]);
    const double dot = g[0][0] * (target.x - p[0].x) + g[0][1] * (target.y - p[0].y) + g[0][2] * (target.z - p[0].z);
    CHECK(dot > 0.0);
}

TEST_CASE("smooth reward converges to the exact reward as the temperature shrinks") {
    const FloorPlan fp = generate_synthetic(2, 16, 12, 21);
    Rng rng(6);
    for (int k = 0; k < 5; ++k) {
        const Deployment p = oracle::random_deployment(fp, 2, rng);
        for (double tau : {1.0, 0.1, 0.01}) {
            RewardConfig cfg;
            cfg.sigmoid_temp = tau;
            cfg.radio.pathloss_threshold_db = 72.0;
            const RadioMap map = compute_radio_map(fp, p, cfg.radio);
            // Cells closer than 10 tau to the threshold, or to the second-best AP, may differ.
            std::size_t near = 0;
            for (std::size_t i = 0; i < map.size(); ++i) {
                double a = map.pathloss_db(0, i), b = map.pathloss_db(1, i);
                if (std::abs(std::min(a, b) - 72.0) < 10.0 * tau || std::abs(a - b) < 10.0 * tau) ++near;
            }
            const double bound = static_cast<double>(near) / static_cast<double>(map.size()) + 1e-3;
            CHECK(std::abs(smooth_reward(fp, p, cfg, nullptr) - exact_reward(fp, p, cfg)) <= bound);
        }
    }
    const FloorPlan room = open_room(6, 6);
    RewardConfig cfg;
    cfg.sigmoid_temp = 0.01;
    const Deployment p{{3, 3, 1.5}};
    CHECK(smooth_reward(room, p, cfg, nullptr) == doctest::Approx(exact_reward(room, p, cfg)).epsilon(1e-9));
}

TEST_CASE("permutation sets") {
    Rng rng(1);
    CHECK(permutation_set(1, 24, rng).size() == 1);
    CHECK(permutation_set(3, 24, rng).size() == 6);
    CHECK(permutation_set(5, 2, rng).size() == 120);
    const auto sampled = permutation_set(7, 10, rng);
    CHECK(sampled.size() == 10);
    for (auto perm : sampled) {
        std::sort(perm.begin(), perm.end());
        for (std::size_t i = 0; i < perm.size(); ++i) CHECK(perm[i] == i);
    }
    CHECK(permutation_count(4, 3) == 24);
    CHECK(permutation_count(6, 3) == 3);
    CHECK_THROWS_AS(permutation_set(3, 0, rng), ConfigError);
}

TEST_CASE("symmetrized statistics") {
    const FloorPlan room = open_room(8, 6);
    RewardConfig cfg;
    cfg.radio.pathloss_threshold_db = 62.0;
    const ExactReward prov(cfg);
    Rng rng(2);

    SUBCASE("one AP is a plain sum") {
        std::vector<Deployment> s;
        for (int k = 0; k < 4; ++k) s.push_back(interior_deployment(room, 1, rng));
        Rng r(0);
        const SymmetrizedStats st = symmetrized_reward_stats(prov, room, s, 2.0, 24, r);
        double w = 0.0;
        Vec3 g{0, 0, 0};
        for (const Deployment& d : s) {
            Gradient gd;
            const double v = prov.value_and_gradient(room, d, gd);
            w += std::exp(2.0 * v);
            for (int a = 0; a < 3; ++a) g[a] += 2.0 * std::exp(2.0 * v) * gd[0][a];
        }
        CHECK(st.terms == 4);
        CHECK(st.total_weight() == doctest::Approx(w));
        for (int a = 0; a < 3; ++a) CHECK(std::exp(st.log_scale) * st.grad_sum[0][a] == doctest::Approx(g[a]));
    }

    SUBCASE("two APs double the weight") {
        std::vector<Deployment> s{interior_deployment(room, 2, rng)};
        Rng r(0);
        const SymmetrizedStats st = symmetrized_reward_stats(prov, room, s, 1.0, 24, r);
        CHECK(st.terms == 2);
        CHECK(st.total_weight() == doctest::Approx(2.0 * std::exp(prov.value(room, s[0]))));
        Rng r2(0);
        const SymmetrizedStats fast = symmetrized_reward_stats(prov, room, s, 1.0, 24, r2, true, true);
        CHECK(fast.total_weight() == doctest::Approx(st.total_weight()));
        for (int a = 0; a < 2; ++a)
            for (int d = 0; d < 3; ++d)
                CHECK(std::exp(fast.log_scale) * fast.grad_sum[a][d] ==
                      doctest::Approx(std::exp(st.log_scale) * st.grad_sum[a][d]));
    }

    SUBCASE("three APs: full set equals a budget of six") {
        std::vector<Deployment> s{interior_deployment(room, 3, rng), interior_deployment(room, 3, rng)};
        Rng r1(0), r2(5);
        const SymmetrizedStats a = symmetrized_reward_stats(prov, room, s, 1.0, 24, r1);
        const SymmetrizedStats b = symmetrized_reward_stats(prov, room, s, 1.0, 6, r2);
        CHECK(a.log_scale == b.log_scale);
        CHECK(a.weight_sum == b.weight_sum);
        CHECK(a.grad_sum == b.grad_sum);
    }

    SUBCASE("large rewards do not overflow") {
        std::vector<Deployment> s{interior_deployment(room, 1, rng)};
        Rng r(0);
        const SymmetrizedStats st = symmetrized_reward_stats(prov, room, s, 5000.0, 24, r);
        CHECK(std::isfinite(st.log_total_weight()));
        CHECK(st.weight_sum == 1.0);
    }

    std::vector<Deployment> s{interior_deployment(room, 1, rng)};
    Rng r(0);
    CHECK_THROWS_AS(symmetrized_reward_stats(prov, room, s, 1.0, 0, r), ConfigError);
    CHECK_THROWS_AS(symmetrized_reward_stats(prov, room, s, 0.0, 24, r), ConfigError);
}

TEST_CASE("reward config validation") {
    RewardConfig cfg;
    cfg.beta = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.sigmoid_temp = -1.0;
    CHECK_THROWS_AS(ExactReward{cfg}, ConfigError);
    cfg = {};
    cfg.penalty_weight = -1.0;
    CHECK_THROWS_AS(SmoothReward{cfg}, ConfigError);
}
