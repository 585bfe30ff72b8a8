#include <applan/samplers.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace applan {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

NoiseSchedule NoiseSchedule::geometric(std::size_t steps, double sigma_min, double sigma_max) {
    if (steps < 1) throw ConfigError("noise schedule needs at least one step");
    if (!(sigma_min > 0.0) || !(sigma_max > sigma_min)) throw ConfigError("need 0 < sigma_min < sigma_max");
    NoiseSchedule s;
    s.sigmas_.resize(steps);
    if (steps == 1) {
        s.sigmas_[0] = sigma_max;
        return s;
    }
    const double lo = std::log(sigma_min), hi = std::log(sigma_max);
    for (std::size_t t = 0; t < steps; ++t)
        s.sigmas_[t] = std::exp(lo + (hi - lo) * static_cast<double>(t) / static_cast<double>(steps - 1));
    return s;
}

CoordinateMap::CoordinateMap(const FloorPlan& fp, int dim) : dim_(dim) {
    if (dim != 2 && dim != 3) throw ConfigError("coord_dim must be 2 or 3");
    const double lo[3] = {fp.origin_x(), fp.origin_y(), fp.z_min()};
    const double hi[3] = {fp.x_max(), fp.y_max(), fp.z_max()};
    for (int a = 0; a < 3; ++a) {
        if (!(hi[a] > lo[a])) throw ConfigError("degenerate floorplan extent");
        center_[a] = 0.5 * (lo[a] + hi[a]);
        half_[a] = 0.5 * (hi[a] - lo[a]);
    }
    z_fixed_ = fp.z_eval();
}

void CoordinateMap::to_normalized(const Position& p, double* u) const {
    u[0] = (p.x - center_[0]) / half_[0];
    u[1] = (p.y - center_[1]) / half_[1];
    if (dim_ == 3) u[2] = (p.z - center_[2]) / half_[2];
}

Position CoordinateMap::to_world(const double* u) const {
    return {center_[0] + half_[0] * u[0], center_[1] + half_[1] * u[1],
            dim_ == 3 ? center_[2] + half_[2] * u[2] : z_fixed_};
}

std::vector<double> CoordinateMap::to_normalized(std::span<const Position> p) const {
    std::vector<double> u(p.size() * static_cast<std::size_t>(dim_));
    for (std::size_t k = 0; k < p.size(); ++k) to_normalized(p[k], &u[k * static_cast<std::size_t>(dim_)]);
    return u;
}

Deployment CoordinateMap::to_world(std::span<const double> u) const {
    const auto d = static_cast<std::size_t>(dim_);
    Deployment out(u.size() / d);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = to_world(&u[k * d]);
    return out;
}

void SamplerConfig::validate() const {
    if (particles < 1) throw ConfigError("particle count must be at least 1");
    if (mc_samples < 1) throw ConfigError("mc_samples must be at least 1");
    if (steps < 1) throw ConfigError("steps must be at least 1");
    if (!(beta > 0.0)) throw ConfigError("beta must be positive");
    if (!(proposal_std >= 0.0)) throw ConfigError("proposal_std must be non-negative");
    if (!(langevin_step >= 0.0)) throw ConfigError("langevin_step must be non-negative");
    if (!(ess_fraction > 0.0 && ess_fraction <= 1.0)) throw ConfigError("ess threshold must be in (0, K]");
    if (perm_budget < 1) throw ConfigError("perm_budget must be at least 1");
    if (!(clip > 0.0)) throw ConfigError("clip must be positive");
    if (coord_dim != 2 && coord_dim != 3) throw ConfigError("coord_dim must be 2 or 3");
    if (!(gradient_step > 0.0)) throw ConfigError("gradient_step must be positive");
}

double log_sum_exp(std::span<const double> v) {
    double m = kNegInf;
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

void normalize_log_weights(std::vector<double>& log_w) {
    const double z = log_sum_exp(log_w);
    if (!std::isfinite(z)) throw NumericError("all particle weights vanished");
    for (double& x : log_w) x -= z;
}

double ess(std::span<const double> log_weights) {
    const double z = log_sum_exp(log_weights);
    if (!std::isfinite(z)) return 0.0;
    std::vector<double> twice(log_weights.size());
    for (std::size_t k = 0; k < twice.size(); ++k) twice[k] = 2.0 * (log_weights[k] - z);
    return std::exp(-log_sum_exp(twice));
}

std::vector<std::size_t> multinomial_resample(std::span<const double> log_weights, std::size_t count, Rng& rng) {
    const double z = log_sum_exp(log_weights);
    std::vector<double> cdf(log_weights.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < cdf.size(); ++k) {
        acc += std::exp(log_weights[k] - z);
        cdf[k] = acc;
    }
    std::vector<std::size_t> out(count);
    for (std::size_t j = 0; j < count; ++j) {
        const double u = rng.uniform() * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        out[j] = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
    }
    return out;
}

namespace {

std::vector<std::size_t> row_order(std::span<const double> u, std::size_t d) {
    const std::size_t n = u.size() / d;
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(u.begin() + static_cast<std::ptrdiff_t>(a * d),
                                            u.begin() + static_cast<std::ptrdiff_t>((a + 1) * d),
                                            u.begin() + static_cast<std::ptrdiff_t>(b * d),
                                            u.begin() + static_cast<std::ptrdiff_t>((b + 1) * d));
    });
    return idx;
}

// Log Gibbs density (up to the constant) of a normalized particle, with its
// gradient in normalized units: beta * r_sym(u), r_sym averaging exp(beta r)
// over AP relabelings.
struct Target {
    const FloorPlan& fp;
    const RewardProvider& provider;
    const CoordinateMap& map;
    const SamplerConfig& cfg;
    std::size_t calls = 0;

    double log_density(std::span<const double> u, std::vector<double>* grad, Rng& rng) {
        const Deployment w = map.to_world(u);
        const std::size_t n = w.size();
        const std::size_t d = static_cast<std::size_t>(map.dim());
        const Deployment samples[1] = {w};
        const SymmetrizedStats st = symmetrized_reward_stats(provider, fp, samples, cfg.beta, cfg.perm_budget, rng,
                                                             grad != nullptr, cfg.exploit_invariance);
        calls += cfg.exploit_invariance && provider.permutation_invariant() ? 1 : st.terms;
        const double mult = static_cast<double>(permutation_count(n, cfg.perm_budget));
        if (!(st.weight_sum > 0.0) || !std::isfinite(st.log_scale)) {
            if (grad) grad->assign(n * d, 0.0);
            return kNegInf;
        }
        if (grad) {
            grad->resize(n * d);
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t a = 0; a < d; ++a)
                    (*grad)[k * d + a] = st.grad_sum[k][a] / st.weight_sum * map.half_extent(static_cast<int>(a));
        }
        return st.log_total_weight() - std::log(mult);
    }
};

class Runner {
public:
    Runner(const FloorPlan& fp, const RewardProvider& provider, const SamplerConfig& cfg, const RewardConfig& task,
           const char* method)
        : fp_(fp), provider_(provider), cfg_(cfg), task_(task), map_(fp, cfg.coord_dim) {
        cfg_.validate();
        task_.task.validate();
        result_.method = method;
        n_ = task.task.n_aps;
        d_ = static_cast<std::size_t>(cfg.coord_dim);
        start_ = std::chrono::steady_clock::now();
        for (std::size_t k = 0; k < cfg.particles; ++k) rngs_.emplace_back(cfg.seed, 1 + k);
    }

    const CoordinateMap& map() const { return map_; }
    std::size_t dim() const { return n_ * d_; }
    Rng& rng(std::size_t k) { return rngs_[k]; }

    // Exact (or provider) value of the snapped deployment for each particle;
    // updates best-so-far and appends a trace row. Returns true to stop early.
    bool readout(std::size_t iteration, const std::vector<std::vector<double>>& particles,
                 const std::vector<double>& log_w) {
        double mean = 0.0;
        const double z = log_sum_exp(log_w);
        for (std::size_t k = 0; k < particles.size(); ++k) {
            Deployment w = map_.to_world(particles[k]);
            double r;
            if (cfg_.readout == Readout::Exact) {
                for (Position& p : w) p = snap_to_free_cell(fp_, p);
                r = exact_reward(fp_, w, task_);
            } else {
                r = provider_.value(fp_, w);
            }
            mean += std::exp(log_w[k] - z) * r;
            if (r > result_.best_reward) {
                result_.best_reward = r;
                result_.best = w;
            }
            if (cfg_.record_trajectory) {
                const Deployment raw = map_.to_world(particles[k]);
                for (std::size_t a = 0; a < raw.size(); ++a)
                    result_.trajectory.push_back({iteration, k, a, raw[a].x, raw[a].y});
            }
        }
        result_.trace.push_back({iteration, result_.best_reward, mean, ess(log_w)});
        result_.iterations = iteration;
        if (cfg_.early_stop && cfg_.readout == Readout::Exact && result_.best_reward >= task_.task.coverage_target) {
            result_.reached_target = true;
            return true;
        }
        return false;
    }

    PlanResult finish(std::vector<std::vector<double>> particles, std::vector<double> log_w, std::size_t calls) {
        normalize_log_weights(log_w);
        ParticleEnsemble& e = result_.final_ensemble;
        e.n_aps = n_;
        e.dim = cfg_.coord_dim;
        e.particles = std::move(particles);
        e.log_weights = std::move(log_w);
        e.iteration = result_.iterations;
        result_.weighted_mean = map_.to_world(ensemble_mean(e));
        result_.reward_calls = calls;
        result_.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        return std::move(result_);
    }

    std::vector<double> initial_particle(std::size_t k, double scale, double bound) {
        std::vector<double> u(dim());
        for (double& x : u) x = std::clamp(scale * rngs_[k].normal(), -bound, bound);
        return u;
    }

private:
    const FloorPlan& fp_;
    const RewardProvider& provider_;
    SamplerConfig cfg_;
    RewardConfig task_;
    CoordinateMap map_;
    std::size_t n_ = 1, d_ = 2;
    std::vector<Rng> rngs_;
    PlanResult result_;
    std::chrono::steady_clock::time_point start_;
};

enum class Kernel { Gaussian, Langevin };

PlanResult run_smc(const FloorPlan& fp, const RewardProvider& provider, const SamplerConfig& cfg,
                   const RewardConfig& task, Kernel kernel) {
    Runner run(fp, provider, cfg, task, kernel == Kernel::Gaussian ? "smc_gaussian" : "smc_langevin");
    Target target{fp, provider, run.map(), cfg};
    const std::size_t K = cfg.particles;
    const std::size_t D = run.dim();
    const bool langevin = kernel == Kernel::Langevin;
    const double eta = cfg.langevin_step;
    Rng master(cfg.seed, 0);

    std::vector<std::vector<double>> x(K), grad(K);
    std::vector<double> logp(K), log_w(K);
    for (std::size_t k = 0; k < K; ++k) {
        x[k] = run.initial_particle(k, 1.0, cfg.clip);
        logp[k] = target.log_density(x[k], langevin ? &grad[k] : nullptr, run.rng(k));
        // Importance correction from the N(0, I) initialization to the Gibbs target.
        double sq = 0.0;
        for (double v : x[k]) sq += v * v;
        log_w[k] = logp[k] + 0.5 * sq;
    }
    const double threshold = cfg.ess_fraction * static_cast<double>(K);
    auto maybe_resample = [&]() {
        normalize_log_weights(log_w);
        if (ess(log_w) >= threshold) return;
        const auto pick = multinomial_resample(log_w, K, master);
        auto nx = x, ng = grad;
        auto nl = logp;
        for (std::size_t k = 0; k < K; ++k) {
            nx[k] = x[pick[k]];
            ng[k] = grad[pick[k]];
            nl[k] = logp[pick[k]];
        }
        x.swap(nx);
        grad.swap(ng);
        logp.swap(nl);
        std::fill(log_w.begin(), log_w.end(), -std::log(static_cast<double>(K)));
    };
    maybe_resample();
    bool stop = run.readout(0, x, log_w);

    std::vector<double> prop(D), prop_grad;
    for (std::size_t t = 1; t <= cfg.steps && !stop; ++t) {
        for (std::size_t k = 0; k < K; ++k) {
            Rng& rng = run.rng(k);
            double log_q_ratio = 0.0;
            if (langevin) {
                if (eta == 0.0) continue;
                const double s = std::sqrt(2.0 * eta);
                for (std::size_t j = 0; j < D; ++j) prop[j] = x[k][j] + eta * grad[k][j] + s * rng.normal();
            } else {
                if (cfg.proposal_std == 0.0) continue;
                for (std::size_t j = 0; j < D; ++j) prop[j] = x[k][j] + cfg.proposal_std * rng.normal();
            }
            const double lp = target.log_density(prop, langevin ? &prop_grad : nullptr, rng);
            if (langevin && std::isfinite(lp)) {
                // log q(x | prop) - log q(prop | x) for the Langevin kernel.
                double fwd = 0.0, rev = 0.0;
                for (std::size_t j = 0; j < D; ++j) {
                    const double a = prop[j] - x[k][j] - eta * grad[k][j];
                    const double b = x[k][j] - prop[j] - eta * prop_grad[j];
                    fwd += a * a;
                    rev += b * b;
                }
                log_q_ratio = (fwd - rev) / (4.0 * eta);
            }
            const double log_alpha = lp - logp[k] + log_q_ratio;
            if (std::isfinite(lp) && std::log(rng.uniform()) < log_alpha) {
                x[k] = prop;
                logp[k] = lp;
                if (langevin) grad[k] = prop_grad;
            }
        }
        maybe_resample();
        stop = run.readout(t, x, log_w);
    }
    return run.finish(std::move(x), std::move(log_w), target.calls);
}

}  // namespace

std::vector<double> estimate_score(const RewardProvider& provider, const FloorPlan& fp, const CoordinateMap& map,
                                   std::span<const double> p_t, double sigma_t, const SamplerConfig& cfg, Rng& rng,
                                   std::size_t* reward_calls) {
    if (cfg.mc_samples < 1) throw ConfigError("mc_samples must be at least 1");
    if (cfg.score_form == ScoreForm::Stein && !(sigma_t > 0.0)) throw ConfigError("noise level must be positive");
    const auto d = static_cast<std::size_t>(map.dim());
    const std::size_t n = p_t.size() / d;
    const auto order = row_order(p_t, d);
    std::vector<double> base(p_t.size());
    for (std::size_t k = 0; k < n; ++k)
        std::copy_n(&p_t[order[k] * d], d, &base[k * d]);

    std::vector<Deployment> samples(cfg.mc_samples);
    std::vector<std::vector<double>> noisy(cfg.mc_samples, std::vector<double>(p_t.size()));
    for (std::size_t j = 0; j < samples.size(); ++j) {
        for (std::size_t i = 0; i < base.size(); ++i) noisy[j][i] = base[i] + sigma_t * rng.normal();
        samples[j] = map.to_world(noisy[j]);
    }
    const bool shortcut = cfg.exploit_invariance && provider.permutation_invariant();
    auto underflow = [](double log_w) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "score underflow (max log-weight %g)", log_w);
        return NumericError(buf);
    };
    std::vector<double> out(p_t.size(), 0.0);

    if (cfg.score_form == ScoreForm::Stein) {
        // Same expectation written with the Gaussian displacement instead of the
        // reward gradient: E[e^{br} (P0 - Pt)] / (sigma^2 E[e^{br}]).
        std::vector<double> log_w(samples.size());
        for (std::size_t j = 0; j < samples.size(); ++j) {
            const SymmetrizedStats st = symmetrized_reward_stats(provider, fp, std::span(&samples[j], 1), cfg.beta,
                                                                 cfg.perm_budget, rng, false, cfg.exploit_invariance);
            if (reward_calls) *reward_calls += shortcut ? 1 : st.terms;
            log_w[j] = st.weight_sum > 0.0 ? st.log_total_weight() : -std::numeric_limits<double>::infinity();
        }
        const double z = log_sum_exp(log_w);
        if (!std::isfinite(z)) throw underflow(*std::max_element(log_w.begin(), log_w.end()));
        std::vector<double> acc(p_t.size(), 0.0);
        for (std::size_t j = 0; j < samples.size(); ++j) {
            const double w = std::exp(log_w[j] - z);
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * (noisy[j][i] - base[i]);
        }
        const double inv = 1.0 / (sigma_t * sigma_t);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t a = 0; a < d; ++a) out[order[k] * d + a] = acc[k * d + a] * inv;
        return out;
    }

    const SymmetrizedStats st =
        symmetrized_reward_stats(provider, fp, samples, cfg.beta, cfg.perm_budget, rng, true, cfg.exploit_invariance);
    if (reward_calls) *reward_calls += shortcut ? samples.size() : st.terms;
    if (!(st.weight_sum > 0.0) || !std::isfinite(st.log_scale)) throw underflow(st.log_scale);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t a = 0; a < d; ++a)
            out[order[k] * d + a] = st.grad_sum[k][a] / st.weight_sum * map.half_extent(static_cast<int>(a));
    return out;
}

PlanResult smc_gaussian(const FloorPlan& fp, const RewardProvider& provider, const SamplerConfig& cfg,
                        const RewardConfig& task) {
    return run_smc(fp, provider, cfg, task, Kernel::Gaussian);
}

PlanResult smc_langevin(const FloorPlan& fp, const RewardProvider& provider, const SamplerConfig& cfg,
                        const RewardConfig& task) {
    return run_smc(fp, provider, cfg, task, Kernel::Langevin);
}

PlanResult diffusion_sample(const FloorPlan& fp, const RewardProvider& provider, const SamplerConfig& cfg,
                            const RewardConfig& task) {
    Runner run(fp, provider, cfg, task, "diffusion");
    const NoiseSchedule sched = NoiseSchedule::geometric(cfg.steps, cfg.sigma_min, cfg.sigma_max);
    const std::size_t K = cfg.particles;
    const std::size_t D = run.dim();
    const std::size_t T = sched.steps();
    std::size_t calls = 0;

    // Start from the terminal marginal of the forward process for unit-scale data.
    const double s_top = std::sqrt(1.0 + sched.sigma(T) * sched.sigma(T));
    std::vector<std::vector<double>> x(K);
    for (std::size_t k = 0; k < K; ++k) x[k] = run.initial_particle(k, s_top, cfg.clip * s_top);
    std::vector<double> log_w(K, -std::log(static_cast<double>(K)));
    bool stop = run.readout(0, x, log_w);

    for (std::size_t t = T, it = 1; t >= 1 && !stop; --t, ++it) {
        const double sig = sched.sigma(t), prev = sched.sigma(t - 1);
        const double delta = sig * sig - prev * prev;
        const double sq = std::sqrt(delta);
        const double bound = cfg.clip * std::sqrt(1.0 + prev * prev);
        for (std::size_t k = 0; k < K; ++k) {
            Rng& rng = run.rng(k);
            const auto score = estimate_score(provider, fp, run.map(), x[k], sig, cfg, rng, &calls);
            for (std::size_t j = 0; j < D; ++j)
                x[k][j] = std::clamp(x[k][j] + delta * score[j] + sq * rng.normal(), -bound, bound);
        }
        stop = run.readout(it, x, log_w);
    }
    return run.finish(std::move(x), std::move(log_w), calls);
}

PlanResult gradient_ascent(const FloorPlan& fp, const RewardProvider& provider, const SamplerConfig& cfg,
                           const RewardConfig& task) {
    SamplerConfig one = cfg;
    one.particles = 1;
    Runner run(fp, provider, one, task, "gradient");
    const CoordinateMap& map = run.map();
    const std::size_t D = run.dim();
    const auto d = static_cast<std::size_t>(map.dim());
    std::size_t calls = 0;

    auto eval = [&](const std::vector<double>& u, std::vector<double>* g) {
        const Deployment w = map.to_world(u);
        ++calls;
        if (!g) return provider.value(fp, w);
        Gradient gw;
        const double r = provider.value_and_gradient(fp, w, gw);
        g->resize(D);
        for (std::size_t k = 0; k < w.size(); ++k)
            for (std::size_t a = 0; a < d; ++a) (*g)[k * d + a] = gw[k][a] * map.half_extent(static_cast<int>(a));
        return r;
    };
    auto project = [](std::vector<double>& u) {
        for (double& v : u) v = std::clamp(v, -1.0, 1.0);
    };

    std::vector<double> x = run.initial_particle(0, 1.0, 1.0);
    std::vector<double> g;
    double r = eval(x, &g);
    const std::vector<double> log_w{0.0};
    std::vector<std::vector<double>> view{x};
    bool stop = run.readout(0, view, log_w);
    std::vector<double> cand(D);
    for (std::size_t t = 1; t <= cfg.steps && !stop; ++t) {
        double norm = 0.0;
        for (double v : g) norm += v * v;
        if (std::sqrt(norm) < cfg.gradient_tol) break;
        double h = cfg.gradient_step;
        bool moved = false;
        for (std::size_t b = 0; b <= cfg.max_backtracks; ++b, h *= 0.5) {
            for (std::size_t j = 0; j < D; ++j) cand[j] = x[j] + h * g[j];
            project(cand);
            const double rc = eval(cand, nullptr);
            if (rc >= r) {
                x = cand;
                r = eval(x, &g);
                moved = true;
                break;
            }
        }
        if (!moved) break;
        view[0] = x;
        stop = run.readout(t, view, log_w);
    }
    return run.finish({x}, {0.0}, calls);
}

std::vector<double> ensemble_mean(const ParticleEnsemble& e) {
    const std::size_t D = e.particles.empty() ? 0 : e.particles[0].size();
    std::vector<double> m(D, 0.0);
    const double z = log_sum_exp(e.log_weights);
    for (std::size_t k = 0; k < e.particles.size(); ++k) {
        const double w = std::exp(e.log_weights[k] - z);
        for (std::size_t j = 0; j < D; ++j) m[j] += w * e.particles[k][j];
    }
    return m;
}

std::vector<double> ensemble_variance(const ParticleEnsemble& e) {
    const auto m = ensemble_mean(e);
    std::vector<double> v(m.size(), 0.0);
    const double z = log_sum_exp(e.log_weights);
    for (std::size_t k = 0; k < e.particles.size(); ++k) {
        const double w = std::exp(e.log_weights[k] - z);
        for (std::size_t j = 0; j < m.size(); ++j) {
            const double dx = e.particles[k][j] - m[j];
            v[j] += w * dx * dx;
        }
    }
    return v;
}

void write_trace_csv(const PlanResult& r, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error("cannot write " + path);
    std::fprintf(f, "iteration,best_reward,mean_reward,ess\n");
    for (const TraceRow& t : r.trace)
        std::fprintf(f, "%zu,%.10g,%.10g,%.10g\n", t.iteration, t.best_reward, t.mean_reward, t.ess);
    std::fclose(f);
}

void write_trajectory_csv(const PlanResult& r, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error("cannot write " + path);
    std::fprintf(f, "iteration,particle,ap_index,x,y\n");
    for (const TrajectoryRow& t : r.trajectory)
        std::fprintf(f, "%zu,%zu,%zu,%.6f,%.6f\n", t.iteration, t.particle, t.ap_index, t.x, t.y);
    std::fclose(f);
}

}  // namespace applan
