#include <applan/propagation.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <tuple>

namespace applan {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn10 = 2.302585092994045684;
}  // namespace

void RadioConfig::validate() const {
    if (!(bandwidth_hz > 0.0)) throw ConfigError("bandwidth must be positive");
    if (!(pathloss_exponent >= 2.0)) throw ConfigError("pathloss exponent must be at least 2");
    if (!(reference_distance_m > 0.0)) throw ConfigError("reference distance must be positive");
    if (!(pathloss_threshold_db > reference_loss_db))
        throw ConfigError("pathloss threshold must exceed the reference loss");
}

double RadioConfig::noise_dbm() const {
    return noise_psd_dbm_per_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

double RadioConfig::noise_mw() const { return dbm_to_mw(noise_dbm()); }

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double mw_to_dbm(double mw) { return mw > 0.0 ? 10.0 * std::log10(mw) : -kInf; }

namespace {

template <class Visit>
void traverse(const FloorPlan& fp, const Position& a_in, const Position& b_in, Visit&& visit) {
    Position a = a_in, b = b_in;
    if (std::tie(b.x, b.y) < std::tie(a.x, a.y)) std::swap(a, b);
    const double cs = fp.cell_size();
    const double W = static_cast<double>(fp.cols());
    const double H = static_cast<double>(fp.rows());
    const double u0 = (a.x - fp.origin_x()) / cs, v0 = (a.y - fp.origin_y()) / cs;
    const double du = (b.x - fp.origin_x()) / cs - u0, dv = (b.y - fp.origin_y()) / cs - v0;
    if (du == 0.0 && dv == 0.0) return;

    double t0 = 0.0, t1 = 1.0;
    const double p[4] = {-du, du, -dv, dv};
    const double q[4] = {u0, W - u0, v0, H - v0};
    for (int k = 0; k < 4; ++k) {
        if (p[k] == 0.0) {
            if (q[k] < 0.0) return;
            continue;
        }
        const double r = q[k] / p[k];
        if (p[k] < 0.0)
            t0 = std::max(t0, r);
        else
            t1 = std::min(t1, r);
    }
    if (!(t0 < t1)) return;

    const double us = u0 + du * t0, vs = v0 + dv * t0;
    // A segment running exactly along a grid line touches no cell interior.
    if ((du == 0.0 && us == std::floor(us)) || (dv == 0.0 && vs == std::floor(vs))) return;

    auto start_index = [](double s, double d, double n) {
        double f = std::floor(s);
        if (d < 0.0 && s == f) f -= 1.0;
        return static_cast<long>(std::clamp(f, 0.0, n - 1.0));
    };
    long col = start_index(us, du, W);
    long row = start_index(vs, dv, H);
    const long step_c = du > 0.0 ? 1 : (du < 0.0 ? -1 : 0);
    const long step_r = dv > 0.0 ? 1 : (dv < 0.0 ? -1 : 0);
    const double delta_c = du != 0.0 ? 1.0 / std::abs(du) : kInf;
    const double delta_r = dv != 0.0 ? 1.0 / std::abs(dv) : kInf;
    double tmax_c = du > 0.0 ? (col + 1 - u0) / du : (du < 0.0 ? (col - u0) / du : kInf);
    double tmax_r = dv > 0.0 ? (row + 1 - v0) / dv : (dv < 0.0 ? (row - v0) / dv : kInf);
    const double len = std::hypot(du, dv);

    double t = t0;
    while (true) {
        const double t_exit = std::min({tmax_c, tmax_r, t1});
        if ((t_exit - t) * len > 1e-9) visit(static_cast<std::size_t>(row), static_cast<std::size_t>(col));
        if (t_exit >= t1) break;
        if (tmax_c < tmax_r) {
            col += step_c;
            t = tmax_c;
            tmax_c += delta_c;
        } else if (tmax_r < tmax_c) {
            row += step_r;
            t = tmax_r;
            tmax_r += delta_r;
        } else {
            col += step_c;
            row += step_r;
            t = tmax_c;
            tmax_c += delta_c;
            tmax_r += delta_r;
        }
        if (col < 0 || row < 0 || col >= static_cast<long>(W) || row >= static_cast<long>(H)) break;
    }
}

}  // namespace

std::vector<CellIndex> crossed_cells(const FloorPlan& fp, const Position& a, const Position& b) {
    std::vector<CellIndex> out;
    traverse(fp, a, b, [&](std::size_t r, std::size_t c) { out.push_back({r, c}); });
    return out;
}

double wall_loss_db(const FloorPlan& fp, const Position& a, const Position& b) {
    double loss = 0.0;
    traverse(fp, a, b, [&](std::size_t r, std::size_t c) { loss += fp.loss_db(r, c); });
    return loss;
}

double pathloss_db(const FloorPlan& fp, const Position& ap, const Position& r, const RadioConfig& cfg) {
    Vec3 unused;
    return pathloss_db(fp, ap, r, cfg, unused);
}

double pathloss_db(const FloorPlan& fp, const Position& ap, const Position& r, const RadioConfig& cfg,
                   Vec3& grad) {
    const double d = distance(ap, r);
    const double d0 = cfg.reference_distance_m;
    double pl = cfg.reference_loss_db + wall_loss_db(fp, ap, r);
    if (d > d0) {
        pl += 10.0 * cfg.pathloss_exponent * std::log10(d / d0);
        const double k = 10.0 * cfg.pathloss_exponent / (kLn10 * d * d);
        grad = {k * (ap.x - r.x), k * (ap.y - r.y), k * (ap.z - r.z)};
    } else {
        grad = {0.0, 0.0, 0.0};
    }
    return pl;
}

RadioMap compute_radio_map(const FloorPlan& fp, std::span<const Position> aps, const RadioConfig& cfg) {
    if (aps.empty()) throw ConfigError("empty deployment");
    RadioMap m;
    m.n_aps = aps.size();
    const double z = fp.z_eval();
    for (std::size_t r = 0; r < fp.rows(); ++r)
        for (std::size_t c = 0; c < fp.cols(); ++c)
            if (fp.at(r, c) == CellKind::FreeSpace) {
                m.cells.push_back(fp.cell_center(r, c, z));
                m.cell_index.push_back({r, c});
            }
    const std::size_t C = m.cells.size();
    const std::size_t N = aps.size();
    m.noise_mw = cfg.noise_mw();
    m.pathloss.resize(N * C);
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t i = 0; i < C; ++i) m.pathloss[n * C + i] = pathloss_db(fp, aps[n], m.cells[i], cfg);

    m.serving_ap.resize(C);
    m.best_pathloss_db.resize(C);
    m.serving_power_dbm.resize(C);
    m.interference_mw.resize(C);
    m.sinr.resize(C);
    m.throughput_bps.resize(C);
    m.covered.resize(C);
    const double eirp = cfg.eirp_dbm();
    std::vector<double> others;
    others.reserve(N);
    for (std::size_t i = 0; i < C; ++i) {
        std::size_t s = 0;
        for (std::size_t n = 1; n < N; ++n)
            if (m.pathloss[n * C + i] < m.pathloss[s * C + i]) s = n;
        const double best = m.pathloss[s * C + i];
        others.clear();
        for (std::size_t n = 0; n < N; ++n)
            if (n != s) others.push_back(dbm_to_mw(eirp - m.pathloss[n * C + i]));
        // Value order, not AP order, so the sum is invariant to AP relabeling.
        std::sort(others.begin(), others.end());
        double interference = 0.0;
        for (double v : others) interference += v;
        const double signal = dbm_to_mw(eirp - best);
        const double sinr = signal / (interference + m.noise_mw);
        m.serving_ap[i] = s;
        m.best_pathloss_db[i] = best;
        m.serving_power_dbm[i] = eirp - best;
        m.interference_mw[i] = interference;
        m.sinr[i] = sinr;
        m.throughput_bps[i] = cfg.bandwidth_hz * std::log2(1.0 + sinr);
        m.covered[i] = best <= cfg.pathloss_threshold_db ? 1 : 0;
    }
    return m;
}

double coverage_fraction(const RadioMap& map) {
    if (map.cells.empty()) throw ConfigError("floorplan has no indoor cells");
    std::size_t n = 0;
    for (uint8_t c : map.covered) n += c;
    return static_cast<double>(n) / static_cast<double>(map.cells.size());
}

void write_radio_map_csv(const RadioMap& map, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error("cannot write " + path);
    std::fprintf(f, "cell_x,cell_y,pathloss_best_db,interference_dbm,sinr_db,throughput_mbps,covered\n");
    for (std::size_t i = 0; i < map.size(); ++i) {
        std::fprintf(f, "%.6f,%.6f,%.10g,%.10g,%.10g,%.10g,%d\n", map.cells[i].x, map.cells[i].y,
                     map.best_pathloss_db[i], mw_to_dbm(map.interference_mw[i]), 10.0 * std::log10(map.sinr[i]),
                     map.throughput_bps[i] / 1e6, static_cast<int>(map.covered[i]));
    }
    std::fclose(f);
}

const char* field_name(MapField field) {
    switch (field) {
        case MapField::BestPathloss: return "pathloss_best_db";
        case MapField::Interference: return "interference_dbm";
        case MapField::Sinr: return "sinr_db";
        case MapField::Throughput: return "throughput_mbps";
        case MapField::Covered: return "covered";
    }
    return "unknown";
}

void write_heatmap_pgm(const FloorPlan& fp, const RadioMap& map, MapField field, const std::string& path) {
    std::vector<double> v(map.size());
    for (std::size_t i = 0; i < map.size(); ++i) {
        switch (field) {
            case MapField::BestPathloss: v[i] = map.best_pathloss_db[i]; break;
            case MapField::Interference: v[i] = mw_to_dbm(map.interference_mw[i]); break;
            case MapField::Sinr: v[i] = 10.0 * std::log10(map.sinr[i]); break;
            case MapField::Throughput: v[i] = map.throughput_bps[i] / 1e6; break;
            case MapField::Covered: v[i] = map.covered[i]; break;
        }
    }
    double lo = kInf, hi = -kInf;
    for (double x : v)
        if (std::isfinite(x)) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    std::vector<unsigned char> px(fp.rows() * fp.cols(), 0);
    for (std::size_t i = 0; i < map.size(); ++i) {
        double x = std::isfinite(v[i]) ? v[i] : lo;
        unsigned char g = 255;
        if (hi > lo) g = static_cast<unsigned char>(1 + std::lround(254.0 * (x - lo) / (hi - lo)));
        px[map.cell_index[i].row * fp.cols() + map.cell_index[i].col] = g;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << "P5\n" << fp.cols() << " " << fp.rows() << "\n255\n";
    out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
}

}  // namespace applan
