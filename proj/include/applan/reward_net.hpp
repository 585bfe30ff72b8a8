#pragma once

#include <applan/reward.hpp>

#include <Eigen/Dense>

#include <array>
#include <mutex>
#include <string>
#include <vector>

namespace applan {

struct DenseLayer {
    Eigen::MatrixXd weight;  // out x in
    Eigen::VectorXd bias;

    int in() const { return static_cast<int>(weight.cols()); }
    int out() const { return static_cast<int>(weight.rows()); }
};

// Row-per-point matrices in normalized [-1, 1] coordinates.
using PointSet = Eigen::MatrixXd;

class CoverageRegressor {
public:
    static constexpr int kLayers = 10;
    static constexpr double kDropout = 0.2;

    explicit CoverageRegressor(int coord_dim = 2, uint64_t seed = 42);

    int coord_dim() const { return coord_dim_; }
    uint64_t seed() const { return seed_; }

    // Inference mode (no dropout). Rows of both sets are put in canonical
    // order first, so the output is bit-identical under any row permutation.
    double forward(const PointSet& aps, const PointSet& indoor) const;
    // d forward / d aps, same row order as the input.
    PointSet position_gradient(const PointSet& aps, const PointSet& indoor) const;

    std::array<DenseLayer, kLayers>& layers() { return layers_; }
    const std::array<DenseLayer, kLayers>& layers() const { return layers_; }
    std::size_t parameter_count() const;
    std::vector<double> parameters() const;
    void set_parameters(const std::vector<double>& flat);

    struct Trace;
    // One training-mode pass; dropout masks drawn from rng when given.
    // Adds d(loss)/d(params) into grad (flattened) for loss = scale * (y - target)^2
    // and returns y.
    double accumulate_gradient(const PointSet& aps, const PointSet& indoor, double target, double scale,
                               Rng* dropout_rng, std::vector<double>& grad) const;

    std::string to_json() const;
    static CoverageRegressor from_json(const std::string& text);
    void save(const std::string& path) const;
    static CoverageRegressor load(const std::string& path);

private:
    int coord_dim_;
    uint64_t seed_;
    // ap encoder 0..2, indoor encoder 3..5, head 6..9
    std::array<DenseLayer, kLayers> layers_;
};

PointSet canonical_rows(const PointSet& m);

// Affine map of the floorplan bounding box (x, y and optionally z) onto [-1, 1].
PointSet normalize_positions(const FloorPlan& fp, std::span<const Position> p, int coord_dim);
// Fixed sample of FreeSpace cell centers, normalized and in canonical order.
PointSet indoor_sample_set(const FloorPlan& fp, std::size_t count, uint64_t seed, int coord_dim);

struct DatasetConfig {
    std::size_t min_aps = 1;
    std::size_t max_aps = 4;
    std::size_t indoor_samples = 256;
    int coord_dim = 2;
    RadioConfig radio;
};

struct CoverageRecord {
    std::size_t floorplan = 0;
    Deployment deployment;
    double target = 0.0;
};

struct CoverageDataset {
    std::vector<FloorPlan> floorplans;
    std::vector<PointSet> indoor;  // one per floorplan
    std::vector<CoverageRecord> records;
    int coord_dim = 2;
};

CoverageDataset generate_dataset(std::vector<FloorPlan> floorplans, std::size_t n_records, uint64_t seed,
                                 const DatasetConfig& cfg = {});

struct TrainConfig {
    double lr = 1e-4;
    double weight_decay = 1e-5;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::size_t epochs = 100;
    std::size_t batch = 16;
    double val_split = 0.4;
    uint64_t seed = 42;

    void validate() const;
};

struct LossCurve {
    std::vector<double> train_mse;
    std::vector<double> val_mse;  // NaN when the validation split is empty
};

// Splits records into train / validation by cfg.seed; returns per-epoch MSE
// on both splits measured in inference mode after each epoch.
LossCurve train(CoverageRegressor& net, const CoverageDataset& data, const TrainConfig& cfg);

std::vector<std::size_t> validation_indices(std::size_t n, double val_split, uint64_t seed);
double dataset_mse(const CoverageRegressor& net, const CoverageDataset& data,
                   const std::vector<std::size_t>& indices);
double dataset_mse(const CoverageRegressor& net, const CoverageDataset& data);

void write_loss_csv(const LossCurve& curve, const std::string& path);

// Predicted coverage minus the geometric constraint penalties.
class LearnedReward : public RewardProvider {
public:
    LearnedReward(CoverageRegressor net, RewardConfig cfg, std::size_t indoor_samples = 256);
    std::string name() const override { return "learned"; }
    double value(const FloorPlan& fp, std::span<const Position> p) const override;
    double value_and_gradient(const FloorPlan& fp, std::span<const Position> p, Gradient& grad) const override;
    const CoverageRegressor& net() const { return net_; }

private:
    const PointSet& samples_for(const FloorPlan& fp) const;

    CoverageRegressor net_;
    RewardConfig cfg_;
    std::size_t indoor_count_;
    mutable std::mutex mu_;
    mutable std::vector<std::pair<std::string, PointSet>> cache_;
};

}  // namespace applan
