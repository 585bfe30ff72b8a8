#include <applan/metrics.hpp>
#include <applan/tasks.hpp>

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace applan;

TEST_CASE("ior examples") {
    const std::vector<double> a{-1, 0, 1, 3};
    CHECK(ior(a, 0.0) == doctest::Approx(1.0));
    const std::vector<double> below{-5, -3, -1, -0.5};
    CHECK(ior(below, 0.0) == 0.0);
    std::vector<double> one(8, 10.0);
    one[3] = 22.0;
    CHECK(ior(one, 20.0) == doctest::Approx(0.25));
    CHECK_THROWS_AS(ior(std::vector<double>{}, 0.0), ConfigError);
}

TEST_CASE("tqs examples") {
    const std::vector<double> t{2, 4, 6, 8};
    CHECK(tqs(t, 5.0) == doctest::Approx(2.5));
    const std::vector<double> all{7, 9, 11};
    CHECK(tqs(all, 5.0) == doctest::Approx(9.0));
    const std::vector<double> zero(5, 0.0);
    CHECK(tqs(zero, 1.0) == 0.0);
    CHECK_THROWS_AS(tqs(std::vector<double>{}, 1.0), ConfigError);
}

TEST_CASE("ior and tqs agree with the oracles and are monotone in their thresholds") {
    const FloorPlan fp = generate_synthetic(2, 16, 12, 3);
    Rng rng(8);
    const Deployment p = oracle::random_deployment(fp, 4, rng);
    const RadioMap map = compute_radio_map(fp, p, {});
    const auto idb = interference_over_noise_db(map);
    std::vector<double> mbps;
    for (double t : map.throughput_bps) mbps.push_back(t / 1e6);
    double prev_i = INFINITY, prev_t = INFINITY;
    for (double thr = 0.0; thr < 60.0; thr += 5.0) {
        const double i = ior(map, thr);
        CHECK(i == doctest::Approx(oracle::ior(idb, thr)));
        CHECK(i <= prev_i);
        prev_i = i;
        const double q = tqs(map, thr * 1e6);
        CHECK(q == doctest::Approx(oracle::tqs(mbps, thr)));
        CHECK(q <= prev_t);
        prev_t = q;
    }
}

TEST_CASE("ior and tqs are invariant under AP relabeling") {
    const FloorPlan fp = generate_synthetic(3, 16, 12, 4);
    Rng rng(2);
    Deployment p = oracle::random_deployment(fp, 3, rng);
    const RadioMap a = compute_radio_map(fp, p, {});
    std::reverse(p.begin(), p.end());
    const RadioMap b = compute_radio_map(fp, p, {});
    CHECK(ior(a, 10.0) == ior(b, 10.0));
    CHECK(tqs(a, 50e6) == tqs(b, 50e6));
}

TEST_CASE("separation and boundary residuals") {
    const Deployment p{{2, 2, 1.5}, {3, 2, 1.5}};
    CHECK(separation_residual(p, 2.0) == doctest::Approx(0.25));
    CHECK(separation_residual(p, 1.0) == 0.0);
    CHECK(separation_residual(Deployment{{2, 2, 1.5}}, 5.0) == 0.0);
    // Three APs: only the close pair violates, averaged over three pairs.
    const Deployment q{{2, 2, 1.5}, {3, 2, 1.5}, {8, 2, 1.5}};
    CHECK(separation_residual(q, 2.0) == doctest::Approx(0.25 / 3.0));

    const FloorPlan room = open_room(6, 6);
    CHECK(boundary_residual(room, Deployment{{3, 3, 1.5}}) == 0.0);
    // Inside the border wall, 0.25 m from the free region.
    CHECK(boundary_residual(room, Deployment{{0.25, 3, 1.5}}) == doctest::Approx(0.0625));
    CHECK(boundary_residual(room, Deployment{{3, 3, 1.5}, {3, 3, 4.0}}) == doctest::Approx(0.5));
}

TEST_CASE("physics residuals vanish exactly when all constraints hold") {
    const FloorPlan room = open_room(6, 6);
    TaskSpec task;
    task.d_min_m = 1.0;
    task.interference_threshold_db = 200.0;
    task.throughput_min_bps = 1.0;
    const Deployment p{{2, 3, 1.5}, {4.5, 3, 1.5}};
    const RadioMap map = compute_radio_map(room, p, {});
    const Residuals r = physics_residuals(room, p, map, task);
    CHECK(r.e_phy == 0.0);
    CHECK(r.e_I == 0.0);
    CHECK(r.e_T == 0.0);

    task.interference_threshold_db = 0.0;
    task.throughput_min_bps = 1e12;
    const Residuals bad = physics_residuals(room, p, map, task);
    CHECK(bad.e_I > 0.0);
    CHECK(bad.e_T > 0.0);
    CHECK(bad.e_phy == doctest::Approx(bad.e_I + bad.e_T));
    const Residuals weighted = physics_residuals(room, p, map, task, {2.0, 0.5, 1.0, 1.0});
    CHECK(weighted.e_phy == doctest::Approx(2.0 * bad.e_I + 0.5 * bad.e_T));
}

TEST_CASE("evaluate") {
    // A 2x2 m room is within the reference distance of a central AP.
    const FloorPlan small = open_room(2, 2);
    TaskSpec task;
    task.coverage_target = 1.0;
    const EvalResult ok = evaluate(small, Deployment{{1.5, 1.5, 1.5}}, task, {});
    CHECK(ok.coverage == 1.0);
    CHECK(ok.success);
    CHECK(ok.ior >= 0.0);
    CHECK(ok.tqs >= 0.0);

    task.d_min_m = 2.0;
    const EvalResult close = evaluate(small, Deployment{{1.2, 1.5, 1.5}, {1.8, 1.5, 1.5}}, task, {});
    CHECK(close.coverage == 1.0);
    CHECK_FALSE(close.success);
    CHECK(close.residuals.e_d > 0.0);

    task.d_min_m = 0.0;
    CHECK_FALSE(evaluate(small, Deployment{{1.5, 1.5, 9.0}}, task, {}).success);
    CHECK_THROWS_AS(evaluate(small, Deployment{}, task, {}), ConfigError);
}

TEST_CASE("csv rows") {
    CHECK(eval_csv_header() == "method,task,seed,runtime_s,coverage,ior,tqs,success,e_I,e_T,e_d,e_b,e_phy");
    CHECK(eval_csv_row("gradient", "room", 3, nullptr) == "gradient,room,3,,,,,0,,,,,");
    EvalResult r;
    r.coverage = 0.5;
    r.success = true;
    const std::string row = eval_csv_row("diffusion", "room", 1, &r);
    CHECK(row.rfind("diffusion,room,1,0.000000,0.5,", 0) == 0);
    CHECK(std::count(row.begin(), row.end(), ',') == 12);
}
