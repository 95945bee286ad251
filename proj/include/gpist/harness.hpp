#pragma once

// Perturbation generators, configuration, the stability experiment and the
// diagnostics aggregate.

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>

#include "marchenko.hpp"
#include "pde_oracle.hpp"

namespace gpist {

// ---------------------------------------------------------------- perturbations

/// u1 and its first three derivatives at x.
using Jet = std::array<cplx, 4>;
using JetFn = std::function<Jet(double)>;

struct Perturbation {
    std::string family;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    double alpha = 1.0;             // scale applied to the raw shape
    double weighted_sup = 0.0;      // certified sup <x>^4 |d^k u1|, k <= 3
    JetFn u1;                       // already scaled
    FieldProfile profile;           // U0 + eps u1
};

namespace detail {

inline Jet gaussian_jet(double x, double c, double w) {
    const double s = (x - c) / w;
    const double g = std::exp(-0.5 * s * s);
    return {g, -s * g / w, (s * s - 1.0) * g / (w * w), (-s * s * s + 3.0 * s) * g / (w * w * w)};
}

inline Jet algebraic_jet(double x) {
    const double r = 1.0 + x * x;
    return {std::pow(r, -2.5), -5.0 * x * std::pow(r, -3.5), -5.0 * std::pow(r, -3.5) + 35.0 * x * x * std::pow(r, -4.5),
            105.0 * x * std::pow(r, -4.5) - 315.0 * x * x * x * std::pow(r, -5.5)};
}

// splitmix64: portable, seed-stable stream
struct SplitMix {
    std::uint64_t s;
    std::uint64_t next() {
        std::uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double uniform(double a, double b) { return a + (b - a) * double(next() >> 11) * 0x1.0p-53; }
};

inline double weighted(const JetFn& f, double x, int k) {
    const double w = 1.0 + x * x;
    return w * w * std::abs(f(x)[k]);
}

/// sup over [-L, L] of <x>^4 |d^k f|, k <= 3: scan on a grid of spacing h,
/// then golden-section refinement around every local maximum of the scan.
inline double weighted_sup(const JetFn& f, double L, double h) {
    const std::size_t n = std::size_t(std::llround(2.0 * L / h)) + 1;
    double best = 0.0;
    for (int k = 0; k <= 3; ++k) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = weighted(f, -L + h * double(i), k);
        for (std::size_t i = 0; i < n; ++i) {
            best = std::max(best, v[i]);
            if (i == 0 || i + 1 == n || v[i] < v[i - 1] || v[i] < v[i + 1]) continue;
            double a = -L + h * double(i - 1), b = -L + h * double(i + 1);
            const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
            double c = b - gr * (b - a), d = a + gr * (b - a);
            double fc = weighted(f, c, k), fd = weighted(f, d, k);
            while (b - a > 1e-12) {
                if (fc > fd) {
                    b = d; d = c; fd = fc; c = b - gr * (b - a); fc = weighted(f, c, k);
                } else {
                    a = c; c = d; fc = fd; d = a + gr * (b - a); fd = weighted(f, d, k);
                }
            }
            best = std::max({best, fc, fd});
        }
    }
    return best;
}

}  // namespace detail

inline const std::vector<std::string>& perturbation_families() {
    static const std::vector<std::string> f{"gaussian_real", "gaussian_complex", "algebraic_x4", "random_bump"};
    return f;
}

/// u0 = U0 + eps u1 with u1 rescaled so that sup <x>^4 |d^k u1| = 1 (k <= 3).
/// The bound is certified on a grid 10x finer than the profile grid.
inline Perturbation make_perturbation(const std::string& family, double epsilon, std::uint64_t seed,
                                      const Grid1D& grid) {
    JetFn raw;
    if (family == "gaussian_real") {
        raw = [](double x) { return Jet(detail::gaussian_jet(x, 0.0, kSqrt2)); };
    } else if (family == "gaussian_complex") {
        raw = [](double x) {
            Jet j = detail::gaussian_jet(x, 0.0, kSqrt2);
            for (auto& v : j) v *= cplx(1.0, 1.0);
            return j;
        };
    } else if (family == "algebraic_x4") {
        raw = [](double x) { return detail::algebraic_jet(x); };
    } else if (family == "random_bump") {
        detail::SplitMix rng{seed};
        struct Bump { double c, w; cplx amp; };
        std::vector<Bump> bumps;
        for (int k = 0; k < 4; ++k) {
            const double c = rng.uniform(-3.0, 3.0), w = rng.uniform(0.7, 1.5);
            const double r = rng.uniform(0.2, 1.0), th = rng.uniform(0.0, 2.0 * kPi);
            bumps.push_back({c, w, std::polar(r, th)});
        }
        raw = [bumps](double x) {
            Jet j{};
            for (const auto& b : bumps) {
                const Jet g = detail::gaussian_jet(x, b.c, b.w);
                for (int k = 0; k < 4; ++k) j[k] += b.amp * g[k];
            }
            return j;
        };
    } else {
        throw Error("harness", "InvalidArgument", "unknown perturbation family '" + family + "'");
    }
    const double fine = grid.h() / 10.0;
    const double sup = detail::weighted_sup(raw, grid.x_max, fine);
    if (!(sup > 0.0) || !std::isfinite(sup)) throw Error("harness", "NormalizationFailed", "degenerate shape");
    const double alpha = 1.0 / sup;
    Perturbation p;
    p.family = family;
    p.epsilon = epsilon;
    p.seed = seed;
    p.alpha = alpha;
    p.u1 = [raw, alpha](double x) {
        Jet j = raw(x);
        for (auto& v : j) v *= alpha;
        return j;
    };
    // certification on the refined grid, independent of the refinement above
    const std::size_t nf = std::size_t(std::llround(2.0 * grid.x_max / fine)) + 1;
    double cert = 0.0;
    for (std::size_t i = 0; i < nf; ++i)
        for (int k = 0; k <= 3; ++k) cert = std::max(cert, detail::weighted(p.u1, -grid.x_max + fine * double(i), k));
    p.weighted_sup = cert;
    if (cert > 1.0 + 1e-9)
        throw Error("harness", "NormalizationFailed", "weighted sup " + std::to_string(cert) + " exceeds 1");
    p.profile = sample_profile(grid, [&](double x) {
        return epsilon == 0.0 ? cplx(black_soliton(x), 0.0) : black_soliton(x) + epsilon * p.u1(x)[0];
    });
    return p;
}

// ---------------------------------------------------------------- configuration

struct ExperimentConfig {
    double epsilon = 0.05;
    std::string family = "gaussian_real";
    std::uint64_t seed = 1;
    double x_max = 40.0;
    double h = 0.02;
    int substeps = 2;
    double zeta_max = 30.0;
    int n_zeta = 4096;
    double zeta_min = 1e-3;
    double p_max = 12.0;
    int n_p = 400;
    std::vector<double> times{0.5, 1.0, 2.0};
    double core = 10.0;          // half width of the uniformly sampled core
    double core_step = 0.25;     // requested spacing there (snapped to the lattice)
    double tail_step = 2.0;      // sparse stations out to the interior window
    double dt = 5e-5;
    bool pde = true;
    bool left = true;
    std::string output_dir = ".";
    Tolerances tol;

    double window() const { return x_max - 5.0; }

    void validate() const {
        if (!(epsilon >= 0.0 && epsilon <= 0.2)) throw Error("config", "InvalidConfig", "epsilon must lie in [0, 0.2]");
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (times[i] < 0.0) throw Error("config", "InvalidConfig", "times must be nonnegative");
            if (i && times[i] < times[i - 1]) throw Error("config", "InvalidConfig", "times must be sorted");
        }
        if (n_p < 16) throw Error("config", "InvalidConfig", "n_p must be >= 16");
        if (!(core > 0.0 && core_step > 0.0 && tail_step > 0.0))
            throw Error("config", "InvalidConfig", "station spacings must be positive");
    }
};

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

/// key = value lines, '#' starts a comment.
inline std::map<std::string, std::string> parse_key_values(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error("config", "ParseError", "line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw Error("config", "ParseError", "line " + std::to_string(lineno) + ": empty key");
        kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

inline ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig c;
    auto kv = parse_key_values(in);
    auto num = [&](const std::string& k, const std::string& v) {
        try {
            std::size_t pos = 0;
            double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw Error("config", "ParseError", "key '" + k + "': not a number: '" + v + "'");
        }
    };
    auto flag = [&](const std::string& k, const std::string& v) {
        if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
        if (v == "off" || v == "false" || v == "0" || v == "no") return false;
        throw Error("config", "ParseError", "key '" + k + "': expected on/off");
    };
    for (const auto& [k, v] : kv) {
        if (k == "epsilon") c.epsilon = num(k, v);
        else if (k == "family") c.family = v;
        else if (k == "seed") c.seed = std::uint64_t(num(k, v));
        else if (k == "x_max") c.x_max = num(k, v);
        else if (k == "h") c.h = num(k, v);
        else if (k == "substeps") c.substeps = int(num(k, v));
        else if (k == "zeta_max") c.zeta_max = num(k, v);
        else if (k == "n_zeta") c.n_zeta = int(num(k, v));
        else if (k == "zeta_min") c.zeta_min = num(k, v);
        else if (k == "p_max") c.p_max = num(k, v);
        else if (k == "n_p") c.n_p = int(num(k, v));
        else if (k == "core") c.core = num(k, v);
        else if (k == "core_step") c.core_step = num(k, v);
        else if (k == "tail_step") c.tail_step = num(k, v);
        else if (k == "dt") c.dt = num(k, v);
        else if (k == "pde") c.pde = flag(k, v);
        else if (k == "left") c.left = flag(k, v);
        else if (k == "output_dir") c.output_dir = v;
        else if (k == "times") {
            c.times.clear();
            std::stringstream ss(v);
            std::string item;
            while (std::getline(ss, item, ',')) {
                item = trim(item);
                if (!item.empty()) c.times.push_back(num(k, item));
            }
        }
        else if (k == "tol_norm") c.tol.norm = num(k, v);
        else if (k == "tol_zero") c.tol.zero = num(k, v);
        else if (k == "tol_real") c.tol.real = num(k, v);
        else if (k == "tol_ratio") c.tol.ratio = num(k, v);
        else if (k == "tol_deriv") c.tol.deriv = num(k, v);
        else if (k == "tol_imag") c.tol.imag_leak = num(k, v);
        else if (k == "tol_res") c.tol.residual = num(k, v);
        else if (k == "tol_cond") c.tol.cond_max = num(k, v);
        else if (k == "tol_bc") c.tol.bc = num(k, v);
        else if (k == "tol_boundary") c.tol.boundary = num(k, v);
        else throw Error("config", "ParseError", "unknown key '" + k + "'");
    }
    c.validate();
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("config", "IoError", "cannot open " + path);
    return parse_config(in);
}

// ---------------------------------------------------------------- pipeline pieces

inline double lattice_step(const ExperimentConfig& c) { return 2.0 * c.p_max / double(c.n_p - 1); }

/// Uniform core stations on [-core, core] plus sparse stations out to the
/// interior window; all on the half lattice and symmetric about 0.
inline std::vector<double> stability_stations(const ExperimentConfig& c, bool with_tail = true) {
    const double dz = lattice_step(c);
    const long stride = std::max(1L, std::lround(c.core_step / (0.5 * dz)));
    const long mc = long(std::floor(2.0 * c.core / dz / double(stride))) * stride;
    std::vector<double> xs;
    for (long m = -mc; m <= mc; m += stride) xs.push_back(station_x(m, dz));
    if (with_tail) {
        const long ts = std::max(stride, std::lround(c.tail_step / (0.5 * dz)));
        const long mw = long(std::floor(2.0 * c.window() / dz));
        std::vector<double> extra;
        for (long m = mc + ts; m <= mw; m += ts) extra.push_back(station_x(m, dz));
        for (double x : extra) {
            xs.push_back(x);
            xs.push_back(-x);
        }
        std::sort(xs.begin(), xs.end());
    }
    return xs;
}

struct Reconstruction {
    std::vector<double> x;
    std::vector<cplx> u;
    double max_cond = 0.0;
    double max_residual = 0.0;
    double imag_leak = 0.0;
    std::vector<MarchenkoKernels> kernels;  // kept on request
    std::vector<KernelField> fields;
};

/// u(t) at the stations: right system for x >= 0, left system for x < 0
/// (each side is used where its operator is well conditioned).
inline Reconstruction reconstruct_at(const EvolvedData& ev, const std::vector<double>& xs, const ExperimentConfig& c,
                                     bool use_left = true, bool keep = false) {
    InverseOptions o;
    o.p_max = c.p_max;
    o.n_p = c.n_p;
    o.kernel.tol = c.tol;
    o.solve.tol = c.tol;
    std::vector<double> xr, xl;
    for (double x : xs) (x >= 0.0 || !use_left ? xr : xl).push_back(x);
    Reconstruction R;
    const double dy = lattice_step(c);
    auto add = [&](const MarchenkoKernels& K, const std::vector<double>& pts) {
        const auto f = solve_marchenko(&ev, K, pts, c.p_max, c.n_p, o.solve);
        const auto r = reconstruct_field(f);
        for (std::size_t i = 0; i < r.x.size(); ++i) {
            R.x.push_back(r.x[i]);
            R.u.push_back(r.u[i]);
        }
        for (const auto& st : f.stations) {
            R.max_cond = std::max(R.max_cond, st.cond);
            R.max_residual = std::max(R.max_residual, st.residual);
        }
        R.imag_leak = std::max(R.imag_leak, K.imag_leak);
        if (keep) {
            R.kernels.push_back(K);
            R.fields.push_back(f);
        }
    };
    if (!xl.empty()) {
        const auto K = build_kernels(ev, plan_lattice(xl, dy, c.n_p, MarchenkoSide::Left), MarchenkoSide::Left, o.kernel);
        add(K, xl);
    }
    if (!xr.empty()) {
        const auto K = build_kernels(ev, plan_lattice(xr, dy, c.n_p, MarchenkoSide::Right), MarchenkoSide::Right, o.kernel);
        add(K, xr);
    }
    std::vector<std::size_t> idx(R.x.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return R.x[a] < R.x[b]; });
    Reconstruction S = R;
    S.kernels = std::move(R.kernels);
    S.fields = std::move(R.fields);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        S.x[i] = R.x[idx[i]];
        S.u[i] = R.u[idx[i]];
    }
    return S;
}

/// Six-point Lagrange interpolation of a profile at x.
inline cplx interpolate(const FieldProfile& p, double x) {
    const double h = p.grid.h();
    const double s = (x - p.grid.x_min) / h;
    long j = long(std::floor(s)) - 2;
    j = std::clamp(j, 0L, long(p.grid.n) - 6);
    const double xs[6] = {0, 1, 2, 3, 4, 5};
    return lagrange_eval(xs, p.u.data() + j, 6, s - double(j));
}

inline ScatteringData run_forward(const FieldProfile& u0, const ExperimentConfig& c) {
    const auto sg = make_spectral_grid(std::size_t(c.n_zeta), c.zeta_max, c.zeta_min);
    ForwardOptions fo;
    fo.substeps = c.substeps;
    fo.tol = c.tol;
    return forward_scatter(u0, sg, fo);
}

// ---------------------------------------------------------------- stability

struct StabilityRow {
    double t = 0.0;
    double shift = 0.0;            // 2 lambda0 t
    double sup_distance = 0.0;     // sup_x |u(t, x + shift) - U0(x)| over the stations
    double best_shift = 0.0;
    double best_sup_distance = 0.0;
    double energy_distance = 0.0;  // d_E on the uniform core
    bool has_oracle = false;
    double oracle_linf = 0.0;
    double oracle_l2 = 0.0;
    double max_cond = 0.0;
};

struct StabilityReport {
    ExperimentConfig config;
    double lambda0 = 0.0, nu0 = 0.0, mu0 = 0.0;
    cplx b0 = 0.0;
    double window = 0.0;
    double core = 0.0;
    std::size_t n_stations = 0;
    std::vector<StabilityRow> rows;
    double max_sup_distance = 0.0;
    double empirical_c = 0.0;
    std::string horizon_note;
    std::vector<Reconstruction> fields;   // per row
    std::vector<FieldProfile> oracle;     // per row when the PDE runs
};

namespace detail {

inline double sup_vs_soliton(const Reconstruction& r, double s, double window) {
    double m = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        if (std::abs(r.x[i]) > window + 1e-12) continue;
        m = std::max(m, std::abs(r.u[i] - black_soliton(r.x[i] - s)));
    }
    return m;
}

}  // namespace detail

inline StabilityReport run_stability(const ExperimentConfig& c) {
    c.validate();
    const Grid1D grid = make_grid(c.x_max, c.h);
    const Perturbation pert = make_perturbation(c.family, c.epsilon, c.seed, grid);
    auto sd = std::make_shared<const ScatteringData>(run_forward(pert.profile, c));

    StabilityReport rep;
    rep.config = c;
    rep.lambda0 = sd->lambda0;
    rep.nu0 = sd->nu0;
    rep.mu0 = sd->mu0;
    rep.b0 = sd->b0;
    rep.window = c.window();
    rep.core = c.core;
    rep.horizon_note = "finite forward horizon: times up to " +
                       std::to_string(c.times.empty() ? 0.0 : c.times.back()) +
                       "; the bound is claimed for all t but only these times are tested";
    const auto xs = stability_stations(c);
    rep.n_stations = xs.size();

    PDETrajectory traj;
    if (c.pde && !c.times.empty()) {
        PDEOptions po;
        po.record_times = c.times;
        po.tol = c.tol;
        traj = integrate(pert.profile, c.times.back(), c.dt, po);
    }
    auto oracle_at = [&](double t) -> const FieldProfile* {
        for (const auto& s : traj.states)
            if (std::abs(s.t - t) < 1e-12) return &s.profile;
        return nullptr;
    };

    for (double t : c.times) {
        const EvolvedData ev = evolve(sd, t);
        Reconstruction r = reconstruct_at(ev, xs, c, c.left);
        for (const auto& v : r.u)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw Error("harness", "NonFinite", "reconstruction produced NaN at t = " + std::to_string(t));
        StabilityRow row;
        row.t = t;
        row.shift = 2.0 * sd->lambda0 * t;
        row.sup_distance = detail::sup_vs_soliton(r, row.shift, rep.window);
        // best shift in [shift - 0.5, shift + 0.5]
        {
            double a = row.shift - 0.5, b = row.shift + 0.5;
            const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
            auto f = [&](double s) { return detail::sup_vs_soliton(r, s, rep.window); };
            double cc = b - gr * (b - a), dd = a + gr * (b - a), fc = f(cc), fd = f(dd);
            while (b - a > 1e-9) {
                if (fc < fd) { b = dd; dd = cc; fd = fc; cc = b - gr * (b - a); fc = f(cc); }
                else { a = cc; cc = dd; fc = fd; dd = a + gr * (b - a); fd = f(dd); }
            }
            row.best_shift = 0.5 * (a + b);
            row.best_sup_distance = std::min(row.sup_distance, f(row.best_shift));
        }
        // d_E on the uniform core
        {
            std::vector<cplx> uc, vc;
            double xmin = 0.0, xmax = 0.0;
            for (std::size_t i = 0; i < r.x.size(); ++i)
                if (std::abs(r.x[i]) <= c.core + 1e-9) {
                    if (uc.empty()) xmin = r.x[i];
                    xmax = r.x[i];
                    uc.push_back(r.u[i]);
                    vc.push_back(black_soliton(r.x[i] - row.shift));
                }
            FieldProfile pu, pv;
            pu.grid = Grid1D{xmin, xmax, uc.size()};
            pv.grid = pu.grid;
            pu.u = uc;
            pv.u = vc;
            row.energy_distance = energy_distance(pu, pv);
        }
        if (const FieldProfile* o = oracle_at(t)) {
            row.has_oracle = true;
            double l2 = 0.0, prev_x = 0.0;
            bool first = true;
            for (std::size_t i = 0; i < r.x.size(); ++i) {
                if (std::abs(r.x[i]) > rep.window + 1e-12) continue;
                const double g = std::abs(r.u[i] - interpolate(*o, r.x[i]));
                row.oracle_linf = std::max(row.oracle_linf, g);
                if (!first) l2 += g * g * (r.x[i] - prev_x);
                prev_x = r.x[i];
                first = false;
            }
            row.oracle_l2 = std::sqrt(l2);
            rep.oracle.push_back(*o);
        }
        row.max_cond = r.max_cond;
        rep.rows.push_back(row);
        rep.fields.push_back(std::move(r));
        rep.max_sup_distance = std::max(rep.max_sup_distance, row.sup_distance);
    }
    rep.empirical_c = c.epsilon > 0.0 ? rep.max_sup_distance / c.epsilon : 0.0;
    return rep;
}

// ---------------------------------------------------------------- diagnostics

struct DiagnosticRecord {
    ZeroLimitRecord zero_limit;
    double zero_count = 0.0;
    double min_abs_a_gap = 0.0;
    double lambda0 = 0.0;
    double edge_min_abs_a = 0.0;  // near the gap edges, below the bulk scan
    double edge_nu = 0.0;         // signed: + right edge, - left edge
    double b_decay_c = 0.0;       // max |b| / (eps min(|zeta|^-1, |zeta|^-3))
    double b_weighted_max = 0.0;  // max |b| <zeta>^3 / eps
    double kernel_tail = 0.0;     // int_M^zmax |F1^(2)| + |F2^(2)| + |F2'^(2)|
    double kernel_tail_m = 5.0;
    double plancherel_f1 = 0.0;   // ||F1^(2)||^2 on the lattice
    double plancherel_c = 0.0;    // (1/2pi) int |c1|^2 dzeta
    double norm_violation = 0.0;
    double epsilon = 0.0;
};

inline DiagnosticRecord run_diagnostics(const ExperimentConfig& c) {
    c.validate();
    const Grid1D grid = make_grid(c.x_max, c.h);
    const Perturbation pert = make_perturbation(c.family, c.epsilon, c.seed, grid);
    auto sd = std::make_shared<const ScatteringData>(run_forward(pert.profile, c));
    GaussPotential pot(pert.profile, c.substeps);

    DiagnosticRecord d;
    d.epsilon = c.epsilon;
    d.zero_limit = zero_limit_diagnostic(*sd);
    d.zero_count = zero_count(pot);
    d.min_abs_a_gap = sd->min_abs_a;
    d.lambda0 = sd->lambda0;
    const auto edge = edge_scan(pot);
    d.edge_min_abs_a = edge.first;
    d.edge_nu = edge.second;
    d.norm_violation = sd->norm_violation();
    const double eps = std::max(c.epsilon, 1e-300);
    for (int br = 0; br < 2; ++br)
        for (std::size_t i = 0; i < sd->grid.size(); ++i) {
            const double z = std::abs(sd->grid.zeta[i]);
            const double ab = std::abs(sd->b[br][i]);
            d.b_decay_c = std::max(d.b_decay_c, ab / (eps * std::min(1.0 / z, 1.0 / (z * z * z))));
            d.b_weighted_max = std::max(d.b_weighted_max, ab * std::pow(1.0 + z * z, 1.5) / eps);
        }
    // continuous kernel part on [0, 2 * zeta lattice extent]
    const double dz = lattice_step(c);
    Lattice lat;
    lat.dz = dz;
    lat.k_min = 0;
    lat.n = std::size_t(std::ceil(4.0 * c.p_max / dz)) + 1;
    const EvolvedData ev = evolve(sd, 0.0);
    KernelOptions ko;
    ko.tol = c.tol;
    const auto K = build_kernels(ev, lat, MarchenkoSide::Right, ko);
    std::vector<double> tail, f1sq;
    for (std::size_t k = 0; k < lat.n; ++k) {
        const double z = lat.z(k);
        const double e = K.mu0_t * std::exp(-K.nu0 * z);
        const double f1 = K.F1[k] + K.lambda0 * e, f2 = K.F2[k] + e, f3 = K.F2prime[k] - K.nu0 * e;
        f1sq.push_back(f1 * f1);
        tail.push_back(z >= d.kernel_tail_m - 1e-12 ? std::abs(f1) + std::abs(f2) + std::abs(f3) : 0.0);
    }
    d.kernel_tail = detail::trapezoid(tail, dz);
    d.plancherel_f1 = detail::trapezoid(f1sq, dz);
    {
        const auto& zg = sd->grid.zeta;
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < zg.size(); ++i) {
            auto c1 = [&](std::size_t j) { return std::norm(sd->c(0, j) + sd->c(1, j)); };
            s += 0.5 * (c1(i) + c1(i + 1)) * (zg[i + 1] - zg[i]);
        }
        d.plancherel_c = s / (2.0 * kPi);
    }
    return d;
}

}  // namespace gpist
