#include <applan/reward.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace applan {

namespace {

constexpr double kLn10 = 2.302585092994045684;
constexpr double kLn2 = 0.693147180559945309;

double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

struct Links {
    std::size_t n = 0;
    std::size_t c = 0;
    std::vector<double> pl;  // n rows of c
    std::vector<Vec3> grad;  // same layout, filled on request
};

Links link_table(const FloorPlan& fp, std::span<const Position> p, std::span<const Position> cells,
                 const RadioConfig& radio, bool with_grad) {
    Links t;
    t.n = p.size();
    t.c = cells.size();
    t.pl.resize(t.n * t.c);
    if (with_grad) t.grad.resize(t.n * t.c);
    for (std::size_t n = 0; n < t.n; ++n)
        for (std::size_t i = 0; i < t.c; ++i) {
            Vec3 g;
            t.pl[n * t.c + i] = pathloss_db(fp, p[n], cells[i], radio, g);
            if (with_grad) t.grad[n * t.c + i] = g;
        }
    return t;
}

// Fraction of cells meeting all three hard indicators. Per-cell arithmetic
// mirrors compute_radio_map so both paths agree bit for bit.
double exact_fraction(const Links& t, const RewardConfig& cfg) {
    const RadioConfig& radio = cfg.radio;
    const double eirp = radio.eirp_dbm();
    const double noise = radio.noise_mw();
    const double xi = cfg.task.interference_threshold_db;
    const double xi_mw = noise * std::pow(10.0, xi / 10.0);
    std::vector<double> others;
    std::size_t good = 0;
    for (std::size_t i = 0; i < t.c; ++i) {
        std::size_t s = 0;
        for (std::size_t n = 1; n < t.n; ++n)
            if (t.pl[n * t.c + i] < t.pl[s * t.c + i]) s = n;
        const double best = t.pl[s * t.c + i];
        if (!(best <= radio.pathloss_threshold_db)) continue;
        others.clear();
        for (std::size_t n = 0; n < t.n; ++n)
            if (n != s) others.push_back(dbm_to_mw(eirp - t.pl[n * t.c + i]));
        std::sort(others.begin(), others.end());
        double interference = 0.0;
        for (double v : others) interference += v;
        if (std::isfinite(xi) && interference > xi_mw) continue;
        const double sinr = dbm_to_mw(eirp - best) / (interference + noise);
        const double thr = radio.bandwidth_hz * std::log2(1.0 + sinr);
        if (thr < cfg.task.throughput_min_bps) continue;
        ++good;
    }
    return static_cast<double>(good) / static_cast<double>(t.c);
}

double smooth_fraction(const Links& t, const RewardConfig& cfg, std::vector<Vec3>* grad) {
    const RadioConfig& radio = cfg.radio;
    const double tau = cfg.sigmoid_temp;
    const double eta = radio.pathloss_threshold_db;
    const double eirp = radio.eirp_dbm();
    const double noise = radio.noise_mw();
    const double xi = cfg.task.interference_threshold_db;
    const double tmin = cfg.task.throughput_min_bps / 1e6;
    const bool use_i = std::isfinite(xi);
    const bool use_t = tmin > 0.0;
    const double bw_mbps = radio.bandwidth_hz / 1e6;

    std::vector<double> a(t.n), pw(t.n);
    double total = 0.0;
    for (std::size_t i = 0; i < t.c; ++i) {
        double m = t.pl[i];
        for (std::size_t n = 1; n < t.n; ++n) m = std::min(m, t.pl[n * t.c + i]);
        double z = 0.0;
        for (std::size_t n = 0; n < t.n; ++n) {
            a[n] = std::exp(-(t.pl[n * t.c + i] - m) / tau);
            z += a[n];
        }
        for (std::size_t n = 0; n < t.n; ++n) a[n] /= z;
        const double soft_pl = m - tau * std::log(z);
        const double cov = logistic((eta - soft_pl) / tau);

        double phi_i = 1.0, phi_t = 1.0;
        double sig = 0.0, intf = 0.0, sinr = 0.0;
        if (use_i || use_t) {
            for (std::size_t n = 0; n < t.n; ++n) {
                pw[n] = dbm_to_mw(eirp - t.pl[n * t.c + i]);
                sig += a[n] * pw[n];
                intf += (1.0 - a[n]) * pw[n];
            }
            if (use_i && intf > 0.0) phi_i = logistic((xi - 10.0 * std::log10(intf / noise)) / tau);
            sinr = sig / (intf + noise);
            if (use_t) phi_t = logistic((bw_mbps * std::log2(1.0 + sinr) - tmin) / tau);
        }
        total += cov * phi_i * phi_t;
        if (!grad) continue;

        for (std::size_t n = 0; n < t.n; ++n) {
            double df = -cov * (1.0 - cov) / tau * a[n] * phi_i * phi_t;
            if (use_i || use_t) {
                const double dp = -(kLn10 / 10.0) * pw[n];
                const double ds = a[n] * dp - (a[n] / tau) * (pw[n] - sig);
                const double di = dp - ds;
                if (use_i && intf > 0.0) {
                    const double dinr = (10.0 / kLn10) * di / intf;
                    df += cov * phi_i * (1.0 - phi_i) * (-1.0 / tau) * dinr * phi_t;
                }
                if (use_t) {
                    const double den = intf + noise;
                    const double dsinr = (ds * den - sig * di) / (den * den);
                    const double dthr = bw_mbps / (kLn2 * (1.0 + sinr)) * dsinr;
                    df += cov * phi_i * phi_t * (1.0 - phi_t) / tau * dthr;
                }
            }
            const Vec3& g = t.grad[n * t.c + i];
            Vec3& out = (*grad)[n];
            out[0] += df * g[0];
            out[1] += df * g[1];
            out[2] += df * g[2];
        }
    }
    const double inv = 1.0 / static_cast<double>(t.c);
    if (grad)
        for (Vec3& g : *grad)
            for (double& v : g) v *= inv;
    return total * inv;
}

std::vector<Position> reorder(std::span<const Position> p, const std::vector<std::size_t>& order) {
    std::vector<Position> out(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) out[k] = p[order[k]];
    return out;
}

}  // namespace

void RewardConfig::validate() const {
    if (!(beta > 0.0)) throw ConfigError("beta must be positive");
    if (!(penalty_weight >= 0.0)) throw ConfigError("penalty weight must be non-negative");
    if (!(sigmoid_temp > 0.0)) throw ConfigError("sigmoid temperature must be positive");
    radio.validate();
    task.validate();
}

double penalty(const FloorPlan& fp, std::span<const Position> p, const RewardConfig& cfg, Gradient* grad) {
    const std::size_t n = p.size();
    const double lam = cfg.penalty_weight;
    const double e_d = separation_residual(p, cfg.task.d_min_m);
    const double e_b = boundary_residual(fp, p);
    if (grad) {
        grad->assign(n, Vec3{0.0, 0.0, 0.0});
        const double d_min = cfg.task.d_min_m;
        if (n >= 2 && d_min > 0.0) {
            const double k = 2.0 / (static_cast<double>(n) * static_cast<double>(n - 1));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) {
                    const double d = distance(p[i], p[j]);
                    const double v = (d_min - d) / d_min;
                    if (v <= 0.0 || d == 0.0) continue;
                    const double s = lam * k * 2.0 * v * (-1.0 / d_min) / d;
                    const Vec3 diff{p[i].x - p[j].x, p[i].y - p[j].y, p[i].z - p[j].z};
                    for (int a = 0; a < 3; ++a) {
                        (*grad)[i][a] += s * diff[a];
                        (*grad)[j][a] -= s * diff[a];
                    }
                }
        }
        for (std::size_t i = 0; i < n; ++i) {
            const Position q = project_to_domain(fp, p[i]);
            const double s = lam * 2.0 / static_cast<double>(n);
            (*grad)[i][0] += s * (p[i].x - q.x);
            (*grad)[i][1] += s * (p[i].y - q.y);
            (*grad)[i][2] += s * (p[i].z - q.z);
        }
    }
    return lam * (e_d + e_b);
}

double exact_reward(const FloorPlan& fp, std::span<const Position> p, const RewardConfig& cfg) {
    if (p.empty()) throw ConfigError("empty deployment");
    const auto cells = indoor_cells(fp);
    if (cells.empty()) throw ConfigError("floorplan has no indoor cells");
    const Links t = link_table(fp, p, cells, cfg.radio, false);
    return exact_fraction(t, cfg) - penalty(fp, p, cfg, nullptr);
}

double exact_reward(const FloorPlan& fp, std::span<const Position> p, const RadioMap& map, const RewardConfig& cfg) {
    if (map.size() == 0) throw ConfigError("floorplan has no indoor cells");
    const double xi = cfg.task.interference_threshold_db;
    const double xi_mw = map.noise_mw * std::pow(10.0, xi / 10.0);
    std::size_t good = 0;
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (!map.covered[i]) continue;
        if (std::isfinite(xi) && map.interference_mw[i] > xi_mw) continue;
        if (map.throughput_bps[i] < cfg.task.throughput_min_bps) continue;
        ++good;
    }
    return static_cast<double>(good) / static_cast<double>(map.size()) - penalty(fp, p, cfg, nullptr);
}

double smooth_reward(const FloorPlan& fp, std::span<const Position> p_in, const RewardConfig& cfg, Gradient* grad) {
    if (p_in.empty()) throw ConfigError("empty deployment");
    const auto cells = indoor_cells(fp);
    if (cells.empty()) throw ConfigError("floorplan has no indoor cells");
    const auto order = canonical_order(p_in);
    const auto p = reorder(p_in, order);
    const Links t = link_table(fp, p, cells, cfg.radio, grad != nullptr);
    if (!grad) return smooth_fraction(t, cfg, nullptr) - penalty(fp, p, cfg, nullptr);

    std::vector<Vec3> g(p.size(), Vec3{0.0, 0.0, 0.0});
    const double frac = smooth_fraction(t, cfg, &g);
    Gradient pg;
    const double pen = penalty(fp, p, cfg, &pg);
    grad->assign(p.size(), Vec3{});
    for (std::size_t k = 0; k < p.size(); ++k)
        for (int a = 0; a < 3; ++a) (*grad)[order[k]][a] = g[k][a] - pg[k][a];
    return frac - pen;
}

double ExactReward::value(const FloorPlan& fp, std::span<const Position> p) const {
    return exact_reward(fp, p, cfg_);
}

double ExactReward::value_and_gradient(const FloorPlan& fp, std::span<const Position> p_in, Gradient& grad) const {
    if (p_in.empty()) throw ConfigError("empty deployment");
    const auto cells = indoor_cells(fp);
    if (cells.empty()) throw ConfigError("floorplan has no indoor cells");
    const auto order = canonical_order(p_in);
    const auto p = reorder(p_in, order);
    const Links t = link_table(fp, p, cells, cfg_.radio, true);
    std::vector<Vec3> g(p.size(), Vec3{0.0, 0.0, 0.0});
    smooth_fraction(t, cfg_, &g);
    Gradient pg;
    const double pen = penalty(fp, p, cfg_, &pg);
    grad.assign(p.size(), Vec3{});
    for (std::size_t k = 0; k < p.size(); ++k)
        for (int a = 0; a < 3; ++a) grad[order[k]][a] = g[k][a] - pg[k][a];
    return exact_fraction(t, cfg_) - pen;
}

double SmoothReward::value(const FloorPlan& fp, std::span<const Position> p) const {
    return smooth_reward(fp, p, cfg_, nullptr);
}

double SmoothReward::value_and_gradient(const FloorPlan& fp, std::span<const Position> p, Gradient& grad) const {
    return smooth_reward(fp, p, cfg_, &grad);
}

std::size_t permutation_count(std::size_t n_aps, std::size_t perm_budget) {
    if (perm_budget < 1) throw ConfigError("perm_budget must be at least 1");
    if (n_aps > 5) return perm_budget;
    std::size_t f = 1;
    for (std::size_t k = 2; k <= n_aps; ++k) f *= k;
    return f;
}

std::vector<std::vector<std::size_t>> permutation_set(std::size_t n_aps, std::size_t perm_budget, Rng& rng) {
    if (perm_budget < 1) throw ConfigError("perm_budget must be at least 1");
    std::vector<std::size_t> base(n_aps);
    std::iota(base.begin(), base.end(), std::size_t{0});
    std::vector<std::vector<std::size_t>> out;
    if (n_aps <= 5) {
        do out.push_back(base);
        while (std::next_permutation(base.begin(), base.end()));
        return out;
    }
    for (std::size_t k = 0; k < perm_budget; ++k) {
        std::vector<std::size_t> perm = base;
        // Fisher-Yates with our own index draws keeps the sequence portable.
        for (std::size_t i = n_aps - 1; i > 0; --i) std::swap(perm[i], perm[rng.index(i + 1)]);
        out.push_back(std::move(perm));
    }
    return out;
}

SymmetrizedStats symmetrized_reward_stats(const RewardProvider& provider, const FloorPlan& fp,
                                          std::span<const Deployment> samples, double beta,
                                          std::size_t perm_budget, Rng& rng, bool with_gradient,
                                          bool exploit_invariance) {
    if (perm_budget < 1) throw ConfigError("perm_budget must be at least 1");
    if (!(beta > 0.0)) throw ConfigError("beta must be positive");
    SymmetrizedStats st;
    if (samples.empty()) return st;
    const std::size_t n = samples[0].size();
    const bool shortcut = exploit_invariance && provider.permutation_invariant();
    std::vector<std::vector<std::size_t>> perms;
    double log_multiplicity = 0.0;
    if (shortcut) {
        perms.push_back({});
        perms[0].resize(n);
        std::iota(perms[0].begin(), perms[0].end(), std::size_t{0});
        log_multiplicity = std::log(static_cast<double>(permutation_count(n, perm_budget)));
    } else {
        perms = permutation_set(n, perm_budget, rng);
    }

    std::vector<double> log_w;
    std::vector<Gradient> grads;
    log_w.reserve(samples.size() * perms.size());
    Deployment q(n);
    Gradient g;
    for (const Deployment& s : samples) {
        if (s.size() != n) throw ConfigError("samples must share the AP count");
        for (const auto& perm : perms) {
            for (std::size_t k = 0; k < n; ++k) q[k] = s[perm[k]];
            double r;
            if (with_gradient) {
                r = provider.value_and_gradient(fp, q, g);
                Gradient back(n);
                for (std::size_t k = 0; k < n; ++k) back[perm[k]] = g[k];
                grads.push_back(std::move(back));
            } else {
                r = provider.value(fp, q);
            }
            log_w.push_back(beta * r);
        }
    }
    double m = -std::numeric_limits<double>::infinity();
    for (double v : log_w) m = std::max(m, v);
    st.terms = log_w.size();
    st.grad_sum.assign(n, Vec3{0.0, 0.0, 0.0});
    if (!std::isfinite(m)) {
        st.log_scale = m;
        return st;
    }
    st.log_scale = m + log_multiplicity;
    for (std::size_t k = 0; k < log_w.size(); ++k) {
        const double w = std::exp(log_w[k] - m);
        st.weight_sum += w;
        if (with_gradient)
            for (std::size_t a = 0; a < n; ++a)
                for (int d = 0; d < 3; ++d) st.grad_sum[a][d] += beta * w * grads[k][a][d];
    }
    return st;
}

}  // namespace applan
