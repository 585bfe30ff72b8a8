#include <applan/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace applan {

void TaskSpec::validate() const {
    if (n_aps < 1) throw ConfigError("task needs at least one AP");
    if (!(coverage_target > 0.0 && coverage_target <= 1.0)) throw ConfigError("coverage target must be in (0, 1]");
    if (!(d_min_m >= 0.0)) throw ConfigError("d_min must be non-negative");
    if (!(throughput_min_bps >= 0.0)) throw ConfigError("throughput minimum must be non-negative");
    if (std::isnan(interference_threshold_db)) throw ConfigError("interference threshold is NaN");
}

std::vector<double> interference_over_noise_db(const RadioMap& map) {
    std::vector<double> out(map.size());
    for (std::size_t i = 0; i < map.size(); ++i) {
        const double v = map.interference_mw[i];
        out[i] = v > 0.0 ? 10.0 * std::log10(v / map.noise_mw) : -std::numeric_limits<double>::infinity();
    }
    return out;
}

double ior(std::span<const double> interference_db, double xi_db) {
    if (interference_db.empty()) throw ConfigError("floorplan has no indoor cells");
    double sum = 0.0;
    for (double v : interference_db) {
        const double excess = v - xi_db;
        if (excess > 0.0) sum += excess;
    }
    return sum / static_cast<double>(interference_db.size());
}

double ior(const RadioMap& map, double xi_db) {
    const auto db = interference_over_noise_db(map);
    return ior(db, xi_db);
}

double median(std::vector<double> v) {
    if (v.empty()) throw ConfigError("median of an empty set");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double tqs(std::span<const double> throughput, double t_min) {
    if (throughput.empty()) throw ConfigError("floorplan has no indoor cells");
    std::size_t ok = 0;
    for (double t : throughput)
        if (t >= t_min) ++ok;
    const double m = median(std::vector<double>(throughput.begin(), throughput.end()));
    return m * static_cast<double>(ok) / static_cast<double>(throughput.size());
}

double tqs(const RadioMap& map, double t_min_bps) {
    std::vector<double> mbps(map.size());
    for (std::size_t i = 0; i < map.size(); ++i) mbps[i] = map.throughput_bps[i] / 1e6;
    return tqs(mbps, t_min_bps / 1e6);
}

double separation_residual(std::span<const Position> p, double d_min) {
    const std::size_t n = p.size();
    if (n < 2 || d_min <= 0.0) return 0.0;
    std::vector<double> terms;
    terms.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = (d_min - distance(p[i], p[j])) / d_min;
            if (v > 0.0) terms.push_back(v * v);
        }
    std::sort(terms.begin(), terms.end());
    double sum = 0.0;
    for (double t : terms) sum += t;
    return 2.0 * sum / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double boundary_residual(const FloorPlan& fp, std::span<const Position> p) {
    if (p.empty()) return 0.0;
    std::vector<double> terms;
    for (const Position& q : p) {
        const Position proj = project_to_domain(fp, q);
        const double d = distance(q, proj);
        if (d > 0.0) terms.push_back(d * d);
    }
    std::sort(terms.begin(), terms.end());
    double sum = 0.0;
    for (double t : terms) sum += t;
    return sum / static_cast<double>(p.size());
}

Residuals physics_residuals(const FloorPlan& fp, std::span<const Position> p, const RadioMap& map,
                            const TaskSpec& task, const ResidualWeights& w) {
    Residuals r;
    const std::size_t C = map.size();
    if (C > 0 && std::isfinite(task.interference_threshold_db)) {
        const double xi_mw = map.noise_mw * std::pow(10.0, task.interference_threshold_db / 10.0);
        double sum = 0.0;
        for (std::size_t i = 0; i < C; ++i) {
            const double v = (map.interference_mw[i] - xi_mw) / xi_mw;
            if (v > 0.0) sum += v * v;
        }
        r.e_I = sum / static_cast<double>(C);
    }
    if (C > 0 && task.throughput_min_bps > 0.0) {
        double sum = 0.0;
        for (std::size_t i = 0; i < C; ++i) {
            const double v = (task.throughput_min_bps - map.throughput_bps[i]) / task.throughput_min_bps;
            if (v > 0.0) sum += v * v;
        }
        r.e_T = sum / static_cast<double>(C);
    }
    r.e_d = separation_residual(p, task.d_min_m);
    r.e_b = boundary_residual(fp, p);
    r.e_phy = w.interference * r.e_I + w.throughput * r.e_T + w.separation * r.e_d + w.boundary * r.e_b;
    return r;
}

EvalResult evaluate(const FloorPlan& fp, std::span<const Position> p, const TaskSpec& task,
                    const RadioConfig& cfg, const ResidualWeights& w) {
    const RadioMap map = compute_radio_map(fp, p, cfg);
    EvalResult out;
    out.coverage = coverage_fraction(map);
    out.ior = std::isfinite(task.interference_threshold_db) ? ior(map, task.interference_threshold_db) : 0.0;
    out.tqs = tqs(map, task.throughput_min_bps);
    out.residuals = physics_residuals(fp, p, map, task, w);
    out.success = out.coverage >= task.coverage_target && out.residuals.e_d == 0.0 && out.residuals.e_b == 0.0;
    return out;
}

std::string eval_csv_header() { return "method,task,seed,runtime_s,coverage,ior,tqs,success,e_I,e_T,e_d,e_b,e_phy"; }

std::string eval_csv_row(const std::string& method, const std::string& task, uint64_t seed, const EvalResult* r) {
    char buf[512];
    if (!r) {
        std::snprintf(buf, sizeof buf, "%s,%s,%llu,,,,,0,,,,,", method.c_str(), task.c_str(),
                      static_cast<unsigned long long>(seed));
        return buf;
    }
    std::snprintf(buf, sizeof buf, "%s,%s,%llu,%.6f,%.10g,%.10g,%.10g,%d,%.10g,%.10g,%.10g,%.10g,%.10g",
                  method.c_str(), task.c_str(), static_cast<unsigned long long>(seed), r->runtime_s, r->coverage,
                  r->ior, r->tqs, r->success ? 1 : 0, r->residuals.e_I, r->residuals.e_T, r->residuals.e_d,
                  r->residuals.e_b, r->residuals.e_phy);
    return buf;
}

}  // namespace applan
