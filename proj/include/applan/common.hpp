#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace applan {

struct Position {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool operator==(const Position&) const = default;
};

using Deployment = std::vector<Position>;
using Vec3 = std::array<double, 3>;
// One row per AP: d(value)/d(x, y, z).
using Gradient = std::vector<Vec3>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user input: malformed files, out-of-range config values.
class ConfigError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

double distance(const Position& a, const Position& b);

// Stable lexicographic (x, y, z) order of the rows. Every permutation of the
// same multiset of positions yields the same sorted sequence, which is what
// makes the providers bit-for-bit permutation invariant.
std::vector<std::size_t> canonical_order(std::span<const Position> p);

uint64_t mix_seed(uint64_t seed, uint64_t stream);

class Rng {
public:
    explicit Rng(uint64_t seed = 0) : engine_(seed) {}
    Rng(uint64_t seed, uint64_t stream) : engine_(mix_seed(seed, stream)) {}

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    // Uniform integer in [0, n).
    std::size_t index(std::size_t n);
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace applan
