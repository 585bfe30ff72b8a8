#include <applan/reward_net.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace applan {

using nlohmann::json;

namespace {

constexpr int kDims[CoverageRegressor::kLayers][2] = {
    // in, out; in == 0 stands for coord_dim
    {0, 32}, {32, 64}, {64, 128},       // AP encoder
    {0, 16}, {16, 32}, {32, 64},        // indoor encoder
    {192, 256}, {256, 128}, {128, 64}, {64, 1},  // head
};
constexpr const char* kNames[CoverageRegressor::kLayers] = {"ap0", "ap1", "ap2", "in0", "in1",
                                                            "in2", "head0", "head1", "head2", "head3"};

std::vector<std::size_t> row_order(const PointSet& m) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(m.rows()));
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const double x = m(static_cast<Eigen::Index>(a), c), y = m(static_cast<Eigen::Index>(b), c);
            if (x != y) return x < y;
        }
        return false;
    });
    return idx;
}

PointSet take_rows(const PointSet& m, const std::vector<std::size_t>& idx) {
    PointSet out(m.rows(), m.cols());
    for (std::size_t k = 0; k < idx.size(); ++k)
        out.row(static_cast<Eigen::Index>(k)) = m.row(static_cast<Eigen::Index>(idx[k]));
    return out;
}

Eigen::MatrixXd affine_rows(const PointSet& x, const DenseLayer& l) {
    Eigen::MatrixXd h = x * l.weight.transpose();
    h.rowwise() += l.bias.transpose();
    return h;
}

Eigen::MatrixXd relu(const Eigen::MatrixXd& m) { return m.cwiseMax(0.0); }

Eigen::VectorXd mean_rows(const Eigen::MatrixXd& m) {
    return (m.colwise().sum() / static_cast<double>(m.rows())).transpose();
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

struct Pass {
    PointSet aps, indoor;
    Eigen::MatrixXd a1, a2, a3, i1, i2, i3;
    Eigen::VectorXd z, pre1, h1, pre2, h2, pre3, h3;
    Eigen::VectorXd mask1, mask2;
    double logit = 0.0, y = 0.0;
};

}  // namespace

PointSet canonical_rows(const PointSet& m) { return take_rows(m, row_order(m)); }

CoverageRegressor::CoverageRegressor(int coord_dim, uint64_t seed) : coord_dim_(coord_dim), seed_(seed) {
    if (coord_dim != 2 && coord_dim != 3) throw ConfigError("coord_dim must be 2 or 3");
    Rng rng(seed, 0x5eed);
    for (int k = 0; k < kLayers; ++k) {
        const int in = kDims[k][0] == 0 ? coord_dim : kDims[k][0];
        const int out = kDims[k][1];
        const double bound = std::sqrt(6.0 / in);
        DenseLayer& l = layers_[static_cast<std::size_t>(k)];
        l.weight.resize(out, in);
        for (int r = 0; r < out; ++r)
            for (int c = 0; c < in; ++c) l.weight(r, c) = (2.0 * rng.uniform() - 1.0) * bound;
        l.bias = Eigen::VectorXd::Zero(out);
    }
}

std::size_t CoverageRegressor::parameter_count() const {
    std::size_t n = 0;
    for (const DenseLayer& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
}

std::vector<double> CoverageRegressor::parameters() const {
    std::vector<double> out;
    out.reserve(parameter_count());
    for (const DenseLayer& l : layers_) {
        out.insert(out.end(), l.weight.data(), l.weight.data() + l.weight.size());
        out.insert(out.end(), l.bias.data(), l.bias.data() + l.bias.size());
    }
    return out;
}

void CoverageRegressor::set_parameters(const std::vector<double>& flat) {
    if (flat.size() != parameter_count()) throw ConfigError("parameter vector size mismatch");
    std::size_t off = 0;
    for (DenseLayer& l : layers_) {
        std::copy_n(flat.data() + off, l.weight.size(), l.weight.data());
        off += static_cast<std::size_t>(l.weight.size());
        std::copy_n(flat.data() + off, l.bias.size(), l.bias.data());
        off += static_cast<std::size_t>(l.bias.size());
    }
}

namespace {

void run_forward(const std::array<DenseLayer, CoverageRegressor::kLayers>& L, Pass& p, Rng* dropout_rng) {
    p.a1 = relu(affine_rows(p.aps, L[0]));
    p.a2 = relu(affine_rows(p.a1, L[1]));
    p.a3 = relu(affine_rows(p.a2, L[2]));
    p.i1 = relu(affine_rows(p.indoor, L[3]));
    p.i2 = relu(affine_rows(p.i1, L[4]));
    p.i3 = affine_rows(p.i2, L[5]);
    p.z.resize(192);
    p.z.head(128) = mean_rows(p.a3);
    p.z.tail(64) = mean_rows(p.i3);

    auto dropout = [&](Eigen::VectorXd& h, Eigen::VectorXd& mask) {
        mask = Eigen::VectorXd::Ones(h.size());
        if (!dropout_rng) return;
        const double keep = 1.0 - CoverageRegressor::kDropout;
        for (Eigen::Index k = 0; k < h.size(); ++k) mask[k] = dropout_rng->uniform() < keep ? 1.0 / keep : 0.0;
        h = h.cwiseProduct(mask);
    };
    p.pre1 = L[6].weight * p.z + L[6].bias;
    p.h1 = p.pre1.cwiseMax(0.0);
    dropout(p.h1, p.mask1);
    p.pre2 = L[7].weight * p.h1 + L[7].bias;
    p.h2 = p.pre2.cwiseMax(0.0);
    dropout(p.h2, p.mask2);
    p.pre3 = L[8].weight * p.h2 + L[8].bias;
    p.h3 = p.pre3.cwiseMax(0.0);
    p.logit = (L[9].weight * p.h3 + L[9].bias)(0);
    p.y = sigmoid(p.logit);
}

Eigen::VectorXd relu_mask(const Eigen::VectorXd& pre) {
    return pre.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
}

Eigen::MatrixXd relu_mask(const Eigen::MatrixXd& post) {
    return post.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
}

// Backward from d(out)/d(logit). Fills parameter gradients when grads is non-null
// and returns d(out)/d(aps) in the pass's row order.
PointSet run_backward(const std::array<DenseLayer, CoverageRegressor::kLayers>& L, const Pass& p, double dlogit,
                      std::array<DenseLayer, CoverageRegressor::kLayers>* grads) {
    auto add = [&](int k, const Eigen::MatrixXd& gw, const Eigen::VectorXd& gb) {
        if (!grads) return;
        (*grads)[static_cast<std::size_t>(k)].weight += gw;
        (*grads)[static_cast<std::size_t>(k)].bias += gb;
    };
    Eigen::VectorXd d_out(1);
    d_out(0) = dlogit;
    add(9, d_out * p.h3.transpose(), d_out);
    Eigen::VectorXd d3 = (L[9].weight.transpose() * d_out).cwiseProduct(relu_mask(p.pre3));
    add(8, d3 * p.h2.transpose(), d3);
    Eigen::VectorXd d2 = (L[8].weight.transpose() * d3).cwiseProduct(p.mask2).cwiseProduct(relu_mask(p.pre2));
    add(7, d2 * p.h1.transpose(), d2);
    Eigen::VectorXd d1 = (L[7].weight.transpose() * d2).cwiseProduct(p.mask1).cwiseProduct(relu_mask(p.pre1));
    add(6, d1 * p.z.transpose(), d1);
    const Eigen::VectorXd dz = L[6].weight.transpose() * d1;

    // Indoor encoder (only parameters depend on it).
    if (grads) {
        const double inv_m = 1.0 / static_cast<double>(p.indoor.rows());
        Eigen::MatrixXd g3 = Eigen::MatrixXd::Zero(p.i3.rows(), 64);
        g3.rowwise() = (dz.tail(64) * inv_m).transpose();
        add(5, g3.transpose() * p.i2, g3.colwise().sum().transpose());
        Eigen::MatrixXd g2 = (g3 * L[5].weight).cwiseProduct(relu_mask(p.i2));
        add(4, g2.transpose() * p.i1, g2.colwise().sum().transpose());
        Eigen::MatrixXd g1 = (g2 * L[4].weight).cwiseProduct(relu_mask(p.i1));
        add(3, g1.transpose() * p.indoor, g1.colwise().sum().transpose());
    }

    const double inv_n = 1.0 / static_cast<double>(p.aps.rows());
    Eigen::MatrixXd g3 = Eigen::MatrixXd::Zero(p.a3.rows(), 128);
    g3.rowwise() = (dz.head(128) * inv_n).transpose();
    g3 = g3.cwiseProduct(relu_mask(p.a3));
    add(2, g3.transpose() * p.a2, g3.colwise().sum().transpose());
    Eigen::MatrixXd g2 = (g3 * L[2].weight).cwiseProduct(relu_mask(p.a2));
    add(1, g2.transpose() * p.a1, g2.colwise().sum().transpose());
    Eigen::MatrixXd g1 = (g2 * L[1].weight).cwiseProduct(relu_mask(p.a1));
    add(0, g1.transpose() * p.aps, g1.colwise().sum().transpose());
    return g1 * L[0].weight;
}

void check_inputs(int coord_dim, const PointSet& aps, const PointSet& indoor) {
    if (aps.rows() == 0) throw ConfigError("deployment must be nonempty");
    if (indoor.rows() == 0) throw ConfigError("indoor sample set must be nonempty");
    if (aps.cols() != coord_dim || indoor.cols() != coord_dim)
        throw ConfigError("input dimension does not match coord_dim");
}

}  // namespace

double CoverageRegressor::forward(const PointSet& aps, const PointSet& indoor) const {
    check_inputs(coord_dim_, aps, indoor);
    Pass p;
    p.aps = canonical_rows(aps);
    p.indoor = canonical_rows(indoor);
    run_forward(layers_, p, nullptr);
    return p.y;
}

PointSet CoverageRegressor::position_gradient(const PointSet& aps, const PointSet& indoor) const {
    check_inputs(coord_dim_, aps, indoor);
    const auto order = row_order(aps);
    Pass p;
    p.aps = take_rows(aps, order);
    p.indoor = canonical_rows(indoor);
    run_forward(layers_, p, nullptr);
    const PointSet g = run_backward(layers_, p, p.y * (1.0 - p.y), nullptr);
    PointSet out(g.rows(), g.cols());
    for (std::size_t k = 0; k < order.size(); ++k)
        out.row(static_cast<Eigen::Index>(order[k])) = g.row(static_cast<Eigen::Index>(k));
    return out;
}

double CoverageRegressor::accumulate_gradient(const PointSet& aps, const PointSet& indoor, double target,
                                              double scale, Rng* dropout_rng, std::vector<double>& grad) const {
    check_inputs(coord_dim_, aps, indoor);
    if (grad.size() != parameter_count()) grad.assign(parameter_count(), 0.0);
    Pass p;
    p.aps = canonical_rows(aps);
    p.indoor = canonical_rows(indoor);
    run_forward(layers_, p, dropout_rng);
    std::array<DenseLayer, kLayers> g;
    for (int k = 0; k < kLayers; ++k) {
        g[static_cast<std::size_t>(k)].weight = Eigen::MatrixXd::Zero(layers_[static_cast<std::size_t>(k)].weight.rows(),
                                                                      layers_[static_cast<std::size_t>(k)].weight.cols());
        g[static_cast<std::size_t>(k)].bias = Eigen::VectorXd::Zero(layers_[static_cast<std::size_t>(k)].bias.size());
    }
    const double dy = scale * 2.0 * (p.y - target);
    run_backward(layers_, p, dy * p.y * (1.0 - p.y), &g);
    std::size_t off = 0;
    for (const DenseLayer& l : g) {
        for (Eigen::Index k = 0; k < l.weight.size(); ++k) grad[off++] += l.weight.data()[k];
        for (Eigen::Index k = 0; k < l.bias.size(); ++k) grad[off++] += l.bias.data()[k];
    }
    return p.y;
}

std::string CoverageRegressor::to_json() const {
    json doc;
    doc["format"] = "applan-coverage-regressor";
    doc["version"] = 1;
    doc["coord_dim"] = coord_dim_;
    doc["seed"] = seed_;
    json layers = json::array();
    for (int k = 0; k < kLayers; ++k) {
        const DenseLayer& l = layers_[static_cast<std::size_t>(k)];
        json row_major = json::array();
        for (int r = 0; r < l.out(); ++r)
            for (int c = 0; c < l.in(); ++c) row_major.push_back(l.weight(r, c));
        json bias = json::array();
        for (int r = 0; r < l.out(); ++r) bias.push_back(l.bias(r));
        layers.push_back({{"name", kNames[k]}, {"in", l.in()}, {"out", l.out()}, {"weight", row_major}, {"bias", bias}});
    }
    doc["layers"] = layers;
    return doc.dump();
}

CoverageRegressor CoverageRegressor::from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
        if (doc.value("format", std::string()) != "applan-coverage-regressor")
            throw ConfigError("not a coverage-regressor model file");
        CoverageRegressor net(doc.at("coord_dim").get<int>(), doc.at("seed").get<uint64_t>());
        const json& layers = doc.at("layers");
        if (layers.size() != kLayers) throw ConfigError("model file has the wrong number of layers");
        for (int k = 0; k < kLayers; ++k) {
            DenseLayer& l = net.layers_[static_cast<std::size_t>(k)];
            const json& src = layers[static_cast<std::size_t>(k)];
            if (src.at("in").get<int>() != l.in() || src.at("out").get<int>() != l.out())
                throw ConfigError("model file layer dimensions do not match the architecture");
            const auto w = src.at("weight").get<std::vector<double>>();
            const auto b = src.at("bias").get<std::vector<double>>();
            if (w.size() != static_cast<std::size_t>(l.weight.size()) || b.size() != static_cast<std::size_t>(l.bias.size()))
                throw ConfigError("model file weight count mismatch");
            for (int r = 0; r < l.out(); ++r)
                for (int c = 0; c < l.in(); ++c) l.weight(r, c) = w[static_cast<std::size_t>(r * l.in() + c)];
            for (int r = 0; r < l.out(); ++r) l.bias(r) = b[static_cast<std::size_t>(r)];
        }
        return net;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed model file: ") + e.what());
    }
}

void CoverageRegressor::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << to_json() << "\n";
}

CoverageRegressor CoverageRegressor::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open model file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

PointSet normalize_positions(const FloorPlan& fp, std::span<const Position> p, int coord_dim) {
    PointSet out(static_cast<Eigen::Index>(p.size()), coord_dim);
    const double hx = 0.5 * (fp.x_max() - fp.origin_x()), cx = fp.origin_x() + hx;
    const double hy = 0.5 * (fp.y_max() - fp.origin_y()), cy = fp.origin_y() + hy;
    const double hz = 0.5 * (fp.z_max() - fp.z_min()), cz = fp.z_min() + hz;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const auto r = static_cast<Eigen::Index>(k);
        out(r, 0) = (p[k].x - cx) / hx;
        out(r, 1) = (p[k].y - cy) / hy;
        if (coord_dim == 3) out(r, 2) = (p[k].z - cz) / hz;
    }
    return out;
}

PointSet indoor_sample_set(const FloorPlan& fp, std::size_t count, uint64_t seed, int coord_dim) {
    const auto cells = indoor_cells(fp);
    if (cells.empty()) throw ConfigError("floorplan has no feasible cells");
    if (count == 0) throw ConfigError("indoor sample count must be positive");
    std::vector<Position> picked;
    Rng rng(seed, 0x1d00);
    if (cells.size() >= count) {
        std::vector<std::size_t> idx(cells.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        for (std::size_t k = 0; k < count; ++k) std::swap(idx[k], idx[k + rng.index(idx.size() - k)]);
        for (std::size_t k = 0; k < count; ++k) picked.push_back(cells[idx[k]]);
    } else {
        for (std::size_t k = 0; k < count; ++k) picked.push_back(cells[rng.index(cells.size())]);
    }
    return canonical_rows(normalize_positions(fp, picked, coord_dim));
}

CoverageDataset generate_dataset(std::vector<FloorPlan> floorplans, std::size_t n_records, uint64_t seed,
                                 const DatasetConfig& cfg) {
    if (n_records < 1) throw ConfigError("n_records must be at least 1");
    if (floorplans.empty()) throw ConfigError("dataset needs at least one floorplan");
    if (cfg.min_aps < 1 || cfg.max_aps < cfg.min_aps) throw ConfigError("invalid AP count range");
    CoverageDataset data;
    data.coord_dim = cfg.coord_dim;
    std::vector<std::vector<CellIndex>> free;
    for (std::size_t f = 0; f < floorplans.size(); ++f) {
        free.push_back(free_cell_indices(floorplans[f]));
        if (free.back().empty()) throw ConfigError("floorplan with no feasible cells: " + floorplans[f].name());
        data.indoor.push_back(indoor_sample_set(floorplans[f], cfg.indoor_samples, seed + f, cfg.coord_dim));
    }
    Rng rng(seed, 0xda7a);
    for (std::size_t k = 0; k < n_records; ++k) {
        CoverageRecord rec;
        rec.floorplan = k % floorplans.size();
        const FloorPlan& fp = floorplans[rec.floorplan];
        const std::size_t n = cfg.min_aps + rng.index(cfg.max_aps - cfg.min_aps + 1);
        for (std::size_t a = 0; a < n; ++a) {
            const CellIndex c = free[rec.floorplan][rng.index(free[rec.floorplan].size())];
            const double u = rng.uniform(), v = rng.uniform();
            const double w = rng.uniform();
            Position p{fp.origin_x() + (c.col + u) * fp.cell_size(), fp.origin_y() + (c.row + v) * fp.cell_size(),
                       cfg.coord_dim == 3 ? fp.z_min() + w * (fp.z_max() - fp.z_min()) : fp.z_eval()};
            // Guard against rounding onto a neighbouring cell edge.
            if (!is_feasible_position(fp, p)) p = fp.cell_center(c.row, c.col, p.z);
            rec.deployment.push_back(p);
        }
        rec.target = coverage_fraction(compute_radio_map(fp, rec.deployment, cfg.radio));
        data.records.push_back(std::move(rec));
    }
    data.floorplans = std::move(floorplans);
    return data;
}

void TrainConfig::validate() const {
    if (!(lr >= 0.0)) throw ConfigError("learning rate must be non-negative");
    if (!(weight_decay >= 0.0)) throw ConfigError("weight decay must be non-negative");
    if (!(val_split >= 0.0 && val_split < 1.0)) throw ConfigError("val_split must be in [0, 1)");
    if (batch < 1) throw ConfigError("batch size must be positive");
}

std::vector<std::size_t> validation_indices(std::size_t n, double val_split, uint64_t seed) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed, 0x5b17);
    for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.index(i)]);
    std::size_t n_val = static_cast<std::size_t>(std::floor(val_split * static_cast<double>(n)));
    if (n_val >= n) n_val = n - 1;
    idx.resize(n_val);
    std::sort(idx.begin(), idx.end());
    return idx;
}

namespace {

struct Prepared {
    std::vector<PointSet> aps;
};

Prepared prepare(const CoverageDataset& data) {
    Prepared p;
    for (const CoverageRecord& r : data.records)
        p.aps.push_back(normalize_positions(data.floorplans[r.floorplan], r.deployment, data.coord_dim));
    return p;
}

double mse_on(const CoverageRegressor& net, const CoverageDataset& data, const Prepared& prep,
              const std::vector<std::size_t>& idx) {
    if (idx.empty()) return std::numeric_limits<double>::quiet_NaN();
    double sum = 0.0;
    for (std::size_t i : idx) {
        const CoverageRecord& r = data.records[i];
        const double e = net.forward(prep.aps[i], data.indoor[r.floorplan]) - r.target;
        sum += e * e;
    }
    return sum / static_cast<double>(idx.size());
}

}  // namespace

double dataset_mse(const CoverageRegressor& net, const CoverageDataset& data, const std::vector<std::size_t>& idx) {
    return mse_on(net, data, prepare(data), idx);
}

double dataset_mse(const CoverageRegressor& net, const CoverageDataset& data) {
    std::vector<std::size_t> all(data.records.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return dataset_mse(net, data, all);
}

LossCurve train(CoverageRegressor& net, const CoverageDataset& data, const TrainConfig& cfg) {
    cfg.validate();
    if (data.records.empty()) throw ConfigError("empty dataset");
    if (data.coord_dim != net.coord_dim()) throw ConfigError("dataset coord_dim does not match the network");
    const Prepared prep = prepare(data);
    const std::size_t n = data.records.size();
    const auto val = validation_indices(n, cfg.val_split, cfg.seed);
    std::vector<std::size_t> tr;
    for (std::size_t i = 0, v = 0; i < n; ++i) {
        if (v < val.size() && val[v] == i) {
            ++v;
            continue;
        }
        tr.push_back(i);
    }

    std::vector<double> params = net.parameters();
    std::vector<double> m(params.size(), 0.0), s(params.size(), 0.0), grad(params.size(), 0.0);
    Rng order_rng(cfg.seed, 0x0de5);
    Rng dropout_rng(cfg.seed, 0xd209);
    LossCurve curve;
    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::vector<std::size_t> order = tr;
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[order_rng.index(i)]);
        for (std::size_t b0 = 0; b0 < order.size(); b0 += cfg.batch) {
            const std::size_t b1 = std::min(order.size(), b0 + cfg.batch);
            std::fill(grad.begin(), grad.end(), 0.0);
            const double scale = 1.0 / static_cast<double>(b1 - b0);
            for (std::size_t k = b0; k < b1; ++k) {
                const std::size_t i = order[k];
                const CoverageRecord& r = data.records[i];
                net.accumulate_gradient(prep.aps[i], data.indoor[r.floorplan], r.target, scale, &dropout_rng, grad);
            }
            ++step;
            const double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(step));
            for (std::size_t j = 0; j < params.size(); ++j) {
                m[j] = cfg.adam_beta1 * m[j] + (1.0 - cfg.adam_beta1) * grad[j];
                s[j] = cfg.adam_beta2 * s[j] + (1.0 - cfg.adam_beta2) * grad[j] * grad[j];
                const double mh = m[j] / c1, sh = s[j] / c2;
                params[j] -= cfg.lr * (mh / (std::sqrt(sh) + cfg.adam_eps) + cfg.weight_decay * params[j]);
            }
            net.set_parameters(params);
        }
        curve.train_mse.push_back(mse_on(net, data, prep, tr));
        curve.val_mse.push_back(mse_on(net, data, prep, val));
    }
    return curve;
}

void write_loss_csv(const LossCurve& curve, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error("cannot write " + path);
    std::fprintf(f, "epoch,train_mse,val_mse\n");
    for (std::size_t e = 0; e < curve.train_mse.size(); ++e)
        std::fprintf(f, "%zu,%.10g,%.10g\n", e + 1, curve.train_mse[e], curve.val_mse[e]);
    std::fclose(f);
}

LearnedReward::LearnedReward(CoverageRegressor net, RewardConfig cfg, std::size_t indoor_samples)
    : net_(std::move(net)), cfg_(std::move(cfg)), indoor_count_(indoor_samples) {
    cfg_.validate();
}

const PointSet& LearnedReward::samples_for(const FloorPlan& fp) const {
    uint64_t h = 1469598103934665603ULL;
    auto mix = [&](uint64_t v) { h = (h ^ v) * 1099511628211ULL; };
    for (char c : fp.name()) mix(static_cast<unsigned char>(c));
    mix(fp.rows());
    mix(fp.cols());
    for (CellKind k : fp.cells()) mix(static_cast<uint64_t>(k));
    const std::string key = fp.name() + "#" + std::to_string(h);
    std::lock_guard<std::mutex> lock(mu_);
    for (const auto& [k, v] : cache_)
        if (k == key) return v;
    cache_.emplace_back(key, indoor_sample_set(fp, indoor_count_, net_.seed(), net_.coord_dim()));
    return cache_.back().second;
}

double LearnedReward::value(const FloorPlan& fp, std::span<const Position> p) const {
    if (p.empty()) throw ConfigError("empty deployment");
    const double y = net_.forward(normalize_positions(fp, p, net_.coord_dim()), samples_for(fp));
    return y - penalty(fp, p, cfg_, nullptr);
}

double LearnedReward::value_and_gradient(const FloorPlan& fp, std::span<const Position> p, Gradient& grad) const {
    if (p.empty()) throw ConfigError("empty deployment");
    const PointSet x = normalize_positions(fp, p, net_.coord_dim());
    const PointSet& ind = samples_for(fp);
    const double y = net_.forward(x, ind);
    const PointSet g = net_.position_gradient(x, ind);
    Gradient pg;
    const double pen = penalty(fp, p, cfg_, &pg);
    const double sx = 2.0 / (fp.x_max() - fp.origin_x());
    const double sy = 2.0 / (fp.y_max() - fp.origin_y());
    const double sz = 2.0 / (fp.z_max() - fp.z_min());
    grad.assign(p.size(), Vec3{});
    for (std::size_t k = 0; k < p.size(); ++k) {
        const auto r = static_cast<Eigen::Index>(k);
        grad[k][0] = g(r, 0) * sx - pg[k][0];
        grad[k][1] = g(r, 1) * sy - pg[k][1];
        grad[k][2] = (net_.coord_dim() == 3 ? g(r, 2) * sz : 0.0) - pg[k][2];
    }
    return y - pen;
}

}  // namespace applan
