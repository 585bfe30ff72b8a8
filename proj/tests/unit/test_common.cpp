#include <applan/common.hpp>

#include <doctest.h>

#include <algorithm>

using namespace applan;

TEST_CASE("canonical order sorts rows lexicographically and is stable") {
    const Deployment p{{2, 1, 0}, {1, 5, 0}, {1, 2, 3}, {1, 2, 1}};
    const auto o = canonical_order(p);
    CHECK(o == std::vector<std::size_t>{3, 2, 1, 0});

    Deployment q = p;
    std::reverse(q.begin(), q.end());
    const auto oq = canonical_order(q);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[o[i]] == q[oq[i]]);
}

TEST_CASE("seeded streams are reproducible and distinct") {
    Rng a(42, 1), b(42, 1), c(42, 2);
    const double x = a.normal();
    CHECK(x == b.normal());
    CHECK(x != c.normal());
    CHECK(mix_seed(1, 0) != mix_seed(1, 1));
}

TEST_CASE("index draws stay in range") {
    Rng r(7);
    for (int i = 0; i < 1000; ++i) CHECK(r.index(5) < 5);
}

TEST_CASE("distance is euclidean in 3d") {
    CHECK(distance({0, 0, 0}, {3, 4, 12}) == doctest::Approx(13.0));
}
