#pragma once

// Reference computations written independently of the library code paths.

#include <applan/samplers.hpp>

#include <functional>
#include <string>
#include <vector>

namespace oracle {

using applan::Deployment;
using applan::FloorPlan;
using applan::Position;

// beta * r = -|u|^2 / 2 in normalized coordinates, so at beta = 1 the Gibbs
// target is the standard normal and the mollified score is -u / (1 + sigma^2).
class QuadraticReward : public applan::RewardProvider {
public:
    explicit QuadraticReward(const FloorPlan& fp, int dim = 2) : map_(fp, dim) {}
    std::string name() const override { return "quadratic"; }
    double value(const FloorPlan& fp, std::span<const Position> p) const override;
    double value_and_gradient(const FloorPlan& fp, std::span<const Position> p, applan::Gradient& g) const override;
    const applan::CoordinateMap& map() const { return map_; }

private:
    applan::CoordinateMap map_;
};

// Wall/window/door loss along a->b found by dense sampling of the open segment.
double sampled_wall_loss(const FloorPlan& fp, const Position& a, const Position& b, std::size_t samples = 200000);

double multiwall_pathloss(double d, double walls_db, double pl0 = 40.0, double n = 3.0, double d0 = 1.0);

double median(std::vector<double> v);
// Direct definitions over plain per-cell arrays.
double ior(const std::vector<double>& interference_db, double xi_db);
double tqs(const std::vector<double>& throughput, double t_min);

// Central difference of f along each coordinate of x.
std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x, double h);

// max_i |a_i - b_i| / max(max_i |b_i|, floor)
double max_relative_error(const std::vector<double>& a, const std::vector<double>& b, double floor = 1e-12);

Deployment random_deployment(const FloorPlan& fp, std::size_t n, applan::Rng& rng);

std::string temp_dir(const std::string& tag);
std::string slurp(const std::string& path);

}  // namespace oracle
