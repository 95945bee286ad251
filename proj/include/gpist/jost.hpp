#pragma once

// Jost solutions of the Zakharov-Shabat system
//     i v1' + q* v2 = lambda v1,   -i v2' + q v1 = lambda v2,   q = u/sqrt2,
// written as v' = A(x) v with A = [[-i lambda, i q*], [-i q, i lambda]].
// Propagation uses the two-point Gauss-Legendre Magnus integrator of order 4;
// the 2x2 exponential is exact (traceless Omega), so the free oscillation
// e^{+-i zeta x} is carried without step-size restriction.

#include <array>
#include <functional>

#include "quadrature.hpp"
#include "spectral_core.hpp"

namespace gpist {

struct Tolerances {
    double norm = 1e-6;        // |a|^2 - |b|^2 - 1
    double zero = 1e-4;        // acceptance of the gap zero of a
    double real = 1e-5;        // imaginary part of mu0
    double ratio = 1e-5;       // agreement of the two b0 component ratios
    double deriv = 1e-3;       // relative agreement of the two a'(lambda0)
    double imag_leak = 1e-6;   // Im of assembled kernels
    double residual = 1e-7;    // Marchenko discrete residual
    double cond_max = 1e8;     // Marchenko condition estimate
    double bc = 1e-5;          // boundary identity
    double boundary = 1e-4;    // PDE clamp contamination
};

struct FieldProfile {
    Grid1D grid;
    std::vector<cplx> u;

    cplx q(std::size_t i) const { return kHalfSqrt2 * u[i]; }
    std::size_t zero_index() const { return (grid.n - 1) / 2; }

    void validate(double tail_tol = 1e-3) const {
        grid.validate();
        if (u.size() != grid.n) throw Error("profile", "InvalidProfile", "sample count does not match grid");
        if ((grid.n - 1) % 2 != 0) throw Error("profile", "InvalidProfile", "grid must contain x = 0");
        for (const auto& v : u)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw Error("profile", "InvalidProfile", "non-finite sample");
        if (std::abs(u.back() - 1.0) > tail_tol || std::abs(u.front() + 1.0) > tail_tol)
            throw Error("profile", "InvalidProfile", "tails have not reached -1 / +1");
    }

    /// sup_x <x>^4 |d^k (u -+ 1)| over both half lines, max over k <= 3,
    /// using centered differences.
    double decay_weight() const {
        const std::size_t n = grid.n;
        const double h = grid.h();
        std::vector<cplx> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = u[i] - (grid.x(i) >= 0.0 ? 1.0 : -1.0);
        double best = 0.0;
        for (int k = 0; k <= 3; ++k) {
            double sr = 0.0, sl = 0.0;
            for (std::size_t i = 2; i + 2 < n; ++i) {
                cplx d;
                switch (k) {
                    case 0: d = r[i]; break;
                    case 1: d = (r[i + 1] - r[i - 1]) / (2 * h); break;
                    case 2: d = (r[i + 1] - 2.0 * r[i] + r[i - 1]) / (h * h); break;
                    default: d = (r[i + 2] - 2.0 * r[i + 1] + 2.0 * r[i - 1] - r[i - 2]) / (2 * h * h * h); break;
                }
                const double x = grid.x(i);
                const double w = std::pow(1.0 + x * x, 2.0) * std::abs(d);
                // the jump of the reference at 0 is not part of the tail
                if (std::abs(x) < 3 * h) continue;
                (x >= 0.0 ? sr : sl) = std::max(x >= 0.0 ? sr : sl, w);
            }
            best = std::max(best, sr + sl);
        }
        return best;
    }
};

inline FieldProfile sample_profile(const Grid1D& g, const std::function<cplx(double)>& f) {
    FieldProfile p;
    p.grid = g;
    p.u.resize(g.n);
    for (std::size_t i = 0; i < g.n; ++i) p.u[i] = f(g.x(i));
    return p;
}

inline FieldProfile black_soliton_profile(const Grid1D& g) {
    return sample_profile(g, [](double x) { return cplx(black_soliton(x), 0.0); });
}

/// Magnus4 is the production stepper. Rk4 is the classical scheme, kept as a
/// reference: it does not conserve |a|^2 - |b|^2 exactly, so the violation
/// shows its discretization error.
enum class Stepper { Magnus4, Rk4 };

/// q at the two Gauss nodes of every substep cell, from 6-point Lagrange
/// interpolation of the grid samples (plus cell ends and midpoints for Rk4).
class GaussPotential {
public:
    GaussPotential(const FieldProfile& p, int substeps, Stepper stepper = Stepper::Magnus4)
        : grid_(p.grid), sub_(substeps), stepper_(stepper) {
        if (substeps < 1) throw Error("jost", "InvalidArgument", "substeps must be >= 1");
        const std::size_t n = grid_.n;
        const double c1 = 0.5 - kSqrt3 / 6.0, c2 = 0.5 + kSqrt3 / 6.0;
        lo_.resize((n - 1) * sub_);
        hi_.resize((n - 1) * sub_);
        std::vector<cplx> q(n);
        for (std::size_t i = 0; i < n; ++i) q[i] = p.q(i);
        const double xs[6] = {0, 1, 2, 3, 4, 5};
        for (std::size_t i = 0; i + 1 < n; ++i) {
            std::size_t j = (i >= 2) ? i - 2 : 0;
            if (j + 6 > n) j = n - 6;
            for (int s = 0; s < sub_; ++s) {
                const double ta = double(i - j) + (s + c1) / sub_;
                const double tb = double(i - j) + (s + c2) / sub_;
                lo_[i * sub_ + s] = lagrange_eval(xs, q.data() + j, 6, ta);
                hi_[i * sub_ + s] = lagrange_eval(xs, q.data() + j, 6, tb);
            }
        }
        if (stepper_ == Stepper::Rk4) {
            // per substep: start, midpoint, end
            start_.resize((n - 1) * sub_);
            mid_.resize((n - 1) * sub_);
            end_.resize((n - 1) * sub_);
            for (std::size_t i = 0; i + 1 < n; ++i) {
                std::size_t j = (i >= 2) ? i - 2 : 0;
                if (j + 6 > n) j = n - 6;
                for (int s = 0; s < sub_; ++s) {
                    const double t0 = double(i - j) + double(s) / sub_;
                    start_[i * sub_ + s] = lagrange_eval(xs, q.data() + j, 6, t0);
                    mid_[i * sub_ + s] = lagrange_eval(xs, q.data() + j, 6, t0 + 0.5 / sub_);
                    end_[i * sub_ + s] = lagrange_eval(xs, q.data() + j, 6, t0 + 1.0 / sub_);
                }
            }
        }
    }

    const Grid1D& grid() const { return grid_; }
    int substeps() const { return sub_; }
    double H() const { return grid_.h() / sub_; }
    cplx lo(std::size_t c) const { return lo_[c]; }
    cplx hi(std::size_t c) const { return hi_[c]; }
    Stepper stepper() const { return stepper_; }
    cplx start(std::size_t c) const { return start_[c]; }
    cplx mid(std::size_t c) const { return mid_[c]; }
    cplx end(std::size_t c) const { return end_[c]; }

private:
    Grid1D grid_;
    int sub_;
    Stepper stepper_;
    std::vector<cplx> lo_, hi_;
    std::vector<cplx> start_, mid_, end_;
};

struct M2 {
    cplx a, b, c, d;
};

/// exp(Omega) for one Magnus step of signed length H; q1 is sampled at the
/// first Gauss node in the direction of travel.
inline M2 magnus_step(cplx lam, double H, cplx q1, cplx q2) {
    const cplx al = -kI * lam;
    const cplx b1 = kI * std::conj(q1), b2 = kI * std::conj(q2);
    const cplx c1 = -kI * q1, c2 = -kI * q2;
    const double k = kSqrt3 * H * H / 12.0;
    const cplx o00 = H * al + k * (b2 * c1 - b1 * c2);
    const cplx o01 = 0.5 * H * (b1 + b2) + k * 2.0 * al * (b1 - b2);
    const cplx o10 = 0.5 * H * (c1 + c2) + k * 2.0 * al * (c2 - c1);
    const cplx k2 = o00 * o00 + o01 * o10;
    const cplx kap = std::sqrt(k2);
    cplx ch, sh;
    if (std::abs(kap) < 1e-4) {
        ch = 1.0 + k2 * (0.5 + k2 / 24.0);
        sh = 1.0 + k2 * (1.0 / 6.0 + k2 / 120.0);
    } else {
        const cplx e = std::exp(kap), ei = 1.0 / e;
        ch = 0.5 * (e + ei);
        sh = 0.5 * (e - ei) / kap;
    }
    return {ch + sh * o00, sh * o01, sh * o10, ch - sh * o00};
}

/// Classical RK4 propagator of v' = A(x) v over a step of signed length H,
/// with q at the start, midpoint and end of the step.
inline M2 rk4_step(cplx lam, double H, cplx q0, cplx qm, cplx q1) {
    auto A = [&](cplx q) {
        Mat2 m;
        m << -kI * lam, kI * std::conj(q), -kI * q, kI * lam;
        return m;
    };
    const Mat2 I = Mat2::Identity();
    const Mat2 A0 = A(q0), Am = A(qm), A1 = A(q1);
    const Mat2 k1 = A0;
    const Mat2 k2 = Am * (I + 0.5 * H * k1);
    const Mat2 k3 = Am * (I + 0.5 * H * k2);
    const Mat2 k4 = A1 * (I + H * k3);
    const Mat2 m = I + H / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    return {m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
}

inline void apply(const M2& m, cplx& v0, cplx& v1) {
    const cplx t0 = m.a * v0 + m.b * v1;
    v1 = m.c * v0 + m.d * v1;
    v0 = t0;
}

/// Propagates vectors between grid nodes i_from and i_to (either direction).
/// visit(i, vecs) is called at every node including both ends.
template <std::size_t K, class Visit>
void propagate(const GaussPotential& pot, cplx lam, std::size_t i_from, std::size_t i_to,
               std::array<Vec2, K>& v, Visit&& visit) {
    const int sub = pot.substeps();
    const double H = pot.H();
    visit(i_from, v);
    if (i_from == i_to) return;
    const bool up = i_to > i_from;
    std::size_t i = i_from;
    while (i != i_to) {
        const std::size_t cell = up ? i : i - 1;
        for (int s = 0; s < sub; ++s) {
            M2 m;
            const std::size_t c = up ? cell * sub + s : cell * sub + (sub - 1 - s);
            if (pot.stepper() == Stepper::Rk4) {
                m = up ? rk4_step(lam, H, pot.start(c), pot.mid(c), pot.end(c))
                       : rk4_step(lam, -H, pot.end(c), pot.mid(c), pot.start(c));
            } else {
                m = up ? magnus_step(lam, H, pot.lo(c), pot.hi(c)) : magnus_step(lam, -H, pot.hi(c), pot.lo(c));
            }
            for (auto& w : v) apply(m, w(0), w(1));
        }
        i = up ? i + 1 : i - 1;
        visit(i, v);
    }
}

struct JostPair {
    SheetPoint point;
    Which side;
    Grid1D grid;
    std::vector<Vec2> values;  // e^{+-i zeta x} v, see raw()
    bool renormalized = true;

    // psi1, phi1 carry e^{-i zeta x}; psi2, phi2 carry e^{+i zeta x}.
    cplx phase_sign() const { return (side == Which::Psi1 || side == Which::Phi1) ? -1.0 : 1.0; }
    Vec2 raw(std::size_t i) const {
        if (!renormalized) return values[i];
        return values[i] * std::exp(phase_sign() * kI * point.zeta * grid.x(i));
    }
};

inline JostPair jost_solve(const GaussPotential& pot, const SheetPoint& pt, Which side) {
    const Grid1D& g = pot.grid();
    const bool gap = !pt.on_real_branch();
    if (gap && (side == Which::Psi1 || side == Which::Phi2))
        throw Error("jost", "GapGrowth",
                    "normalization grows toward the interior on the gap; use psi2 or phi1");
    const bool from_right = side == Which::Psi1 || side == Which::Psi2;
    const double xe = from_right ? g.x_max : g.x_min;
    auto fs = free_states(pt, xe, from_right ? Side::Plus : Side::Minus);
    const bool first = side == Which::Psi1 || side == Which::Phi1;
    std::array<Vec2, 1> v{first ? fs.first : fs.second};
    JostPair jp{pt, side, g, std::vector<Vec2>(g.n), true};
    const cplx ps = jp.phase_sign();
    propagate(pot, pt.lambda, from_right ? g.n - 1 : 0, from_right ? 0 : g.n - 1, v,
              [&](std::size_t i, const std::array<Vec2, 1>& w) {
                  jp.values[i] = w[0] * std::exp(-ps * kI * pt.zeta * g.x(i));
              });
    return jp;
}

inline JostPair jost_solve(const FieldProfile& prof, const SheetPoint& pt, Which side, int substeps = 2) {
    GaussPotential pot(prof, substeps);
    return jost_solve(pot, pt, side);
}

struct WronskianResult {
    cplx value;
    double max_deviation;
};

inline WronskianResult wronskian(const JostPair& v, const JostPair& w) {
    if (v.grid.n != w.grid.n || v.grid.x_min != w.grid.x_min || v.grid.x_max != w.grid.x_max)
        throw Error("jost", "MismatchedGrids", "Jost solutions live on different grids");
    if (v.point.lambda != w.point.lambda || v.point.zeta != w.point.zeta)
        throw Error("jost", "MismatchedGrids", "Jost solutions belong to different spectral points");
    const std::size_t n = v.grid.n;
    std::vector<cplx> ws(n);
    cplx mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ws[i] = wronskian(v.raw(i), w.raw(i));
        mean += ws[i];
    }
    mean /= double(n);
    double dev = 0.0;
    for (auto& x : ws) dev = std::max(dev, std::abs(x - mean));
    return {mean, dev};
}

struct ScatteringData {
    SpectralGrid grid;
    // index 0: lambda = +sqrt(zeta^2+1/2), index 1: lambda = -sqrt(...)
    std::array<std::vector<cplx>, 2> a, b;

    bool has_discrete = false;
    double lambda0 = 0.0;
    double nu0 = kHalfSqrt2;
    cplx b0 = 0.0;
    cplx a_prime0 = 0.0;           // centered difference
    cplx a_prime0_integral = 0.0;  // norming-integral formula
    double mu0 = 0.0;
    double mu0_imag = 0.0;
    double min_abs_a = 0.0;

    static int branch_sign(int branch) { return branch == 0 ? 1 : -1; }
    SheetPoint point(int branch, std::size_t i) const { return lift(grid.zeta[i], branch_sign(branch)); }
    cplx c(int branch, std::size_t i) const { return b[branch][i] / a[branch][i]; }

    double norm_violation() const {
        double m = 0.0;
        for (int br = 0; br < 2; ++br)
            for (std::size_t i = 0; i < grid.size(); ++i)
                m = std::max(m, std::abs(std::norm(a[br][i]) - std::norm(b[br][i]) - 1.0));
        return m;
    }
};

struct ForwardOptions {
    int substeps = 2;
    Stepper stepper = Stepper::Magnus4;
    Tolerances tol;
};

struct JostAtZero {
    Vec2 psi1, psi2, phi1;
};

inline JostAtZero jost_at_zero(const GaussPotential& pot, const SheetPoint& pt) {
    const Grid1D& g = pot.grid();
    const std::size_t i0 = (g.n - 1) / 2;
    auto fp = free_states(pt, g.x_max, Side::Plus);
    auto fm = free_states(pt, g.x_min, Side::Minus);
    std::array<Vec2, 2> right{fp.first, fp.second};
    std::array<Vec2, 1> left{fm.first};
    auto none = [](std::size_t, const auto&) {};
    propagate(pot, pt.lambda, g.n - 1, i0, right, none);
    propagate(pot, pt.lambda, 0, i0, left, none);
    return {right[0], right[1], left[0]};
}

/// a and b for both branches at every zeta of the grid; Wronskians at x = 0.
inline ScatteringData transition_coefficients(const FieldProfile& prof, const SpectralGrid& grid,
                                              const ForwardOptions& opt = {}) {
    prof.validate();
    GaussPotential pot(prof, opt.substeps, opt.stepper);
    ScatteringData sd;
    sd.grid = grid;
    const std::size_t nz = grid.size();
    for (int br = 0; br < 2; ++br) {
        sd.a[br].assign(nz, 0.0);
        sd.b[br].assign(nz, 0.0);
    }
    parallel_for(2 * nz, [&](std::size_t k) {
        const int br = int(k / nz);
        const std::size_t i = k % nz;
        const SheetPoint pt = lift(grid.zeta[i], ScatteringData::branch_sign(br));
        const JostAtZero j = jost_at_zero(pot, pt);
        const cplx den = 4.0 * pt.zeta * (pt.lambda - pt.zeta);
        sd.a[br][i] = wronskian(j.phi1, j.psi2) / den;
        sd.b[br][i] = -wronskian(j.phi1, j.psi1) / den;
    });
    return sd;
}

/// a(lambda) on the upper sheet from the two decaying solutions.
struct UpperA {
    cplx a;
    Vec2 phi1, psi2;
    SheetPoint point;
};

inline UpperA transmission_upper(const GaussPotential& pot, cplx lambda) {
    const SheetPoint pt = upper_point(lambda);
    const Grid1D& g = pot.grid();
    const std::size_t i0 = (g.n - 1) / 2;
    auto fp = free_states(pt, g.x_max, Side::Plus);
    auto fm = free_states(pt, g.x_min, Side::Minus);
    std::array<Vec2, 1> r{fp.second}, l{fm.first};
    auto none = [](std::size_t, const auto&) {};
    propagate(pot, pt.lambda, g.n - 1, i0, r, none);
    propagate(pot, pt.lambda, 0, i0, l, none);
    const cplx den = 4.0 * pt.zeta * (pt.lambda - pt.zeta);
    return {wronskian(l[0], r[0]) / den, l[0], r[0], pt};
}

struct DiscreteData {
    double lambda0, nu0;
    cplx b0, a_prime_fd, a_prime_integral;
    double mu0, mu0_imag, min_abs_a;
    double ratio_mismatch;
    double norm_integral;  // integral of |psi2(x, lambda0)|^2
};

struct DiscreteOptions {
    int substeps = 2;
    int n_scan = 512;
    double fd_step = 1e-4;
    Tolerances tol;
};

inline DiscreteData discrete_data(const FieldProfile& prof, const DiscreteOptions& opt = {}) {
    prof.validate();
    GaussPotential pot(prof, opt.substeps);
    const double lo = -kHalfSqrt2 + 1e-4, hi = kHalfSqrt2 - 1e-4;
    const int n = opt.n_scan;
    std::vector<double> lam(n), mag(n);
    parallel_for(n, [&](std::size_t k) {
        lam[k] = lo + (hi - lo) * double(k) / double(n - 1);
        mag[k] = std::abs(transmission_upper(pot, lam[k]).a);
    });
    const int k = int(std::min_element(mag.begin(), mag.end()) - mag.begin());
    // golden-section refinement inside the neighbouring samples
    double l = lam[std::max(0, k - 1)], r = lam[std::min(n - 1, k + 1)];
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    auto f = [&](double x) { return std::abs(transmission_upper(pot, x).a); };
    double c = r - gr * (r - l), d = l + gr * (r - l);
    double fc = f(c), fd = f(d);
    while (r - l > 1e-13) {
        if (fc < fd) {
            r = d;
            d = c;
            fd = fc;
            c = r - gr * (r - l);
            fc = f(c);
        } else {
            l = c;
            c = d;
            fc = fd;
            d = l + gr * (r - l);
            fd = f(d);
        }
    }
    DiscreteData dd{};
    dd.lambda0 = 0.5 * (l + r);
    const UpperA at = transmission_upper(pot, dd.lambda0);
    dd.min_abs_a = std::abs(at.a);
    if (!(dd.min_abs_a < opt.tol.zero))
        throw Error("jost", "NoZeroFound",
                    "min |a| on the gap is " + std::to_string(dd.min_abs_a) + " at lambda = " +
                        std::to_string(dd.lambda0));
    dd.nu0 = std::sqrt(0.5 - dd.lambda0 * dd.lambda0);
    const cplx r1 = at.phi1(0) / at.psi2(0), r2 = at.phi1(1) / at.psi2(1);
    dd.ratio_mismatch = std::abs(r1 - r2) / std::max(1.0, std::abs(r1));
    if (dd.ratio_mismatch > opt.tol.ratio)
        throw Error("jost", "InconsistentNormingConstant",
                    "component ratios differ by " + std::to_string(dd.ratio_mismatch));
    dd.b0 = 0.5 * (r1 + r2);

    const double hd = opt.fd_step;
    dd.a_prime_fd = (transmission_upper(pot, dd.lambda0 + hd).a - transmission_upper(pot, dd.lambda0 - hd).a) / (2 * hd);

    // integral of |psi2|^2: psi2 on [0, inf), phi1 / b0 on (-inf, 0]
    const Grid1D& g = pot.grid();
    const std::size_t i0 = (g.n - 1) / 2;
    const SheetPoint pt = at.point;
    auto fp = free_states(pt, g.x_max, Side::Plus);
    auto fm = free_states(pt, g.x_min, Side::Minus);
    std::vector<double> right(i0 + 1), left(i0 + 1);
    std::array<Vec2, 1> vr{fp.second}, vl{fm.first};
    propagate(pot, pt.lambda, g.n - 1, i0, vr,
              [&](std::size_t i, const std::array<Vec2, 1>& w) { right[i - i0] = w[0].squaredNorm(); });
    propagate(pot, pt.lambda, 0, i0, vl,
              [&](std::size_t i, const std::array<Vec2, 1>& w) { left[i] = w[0].squaredNorm(); });
    auto wts = gregory_weights(i0 + 1, g.h(), 5);
    double ir = 0.0, il = 0.0;
    for (std::size_t i = 0; i <= i0; ++i) {
        ir += wts[i] * right[i];
        il += wts[i] * left[i];
    }
    dd.norm_integral = ir + il / std::norm(dd.b0);
    const cplx zeta0 = pt.zeta;
    dd.a_prime_integral = -kI * dd.b0 * dd.norm_integral / (2.0 * kSqrt2 * zeta0);
    if (std::abs(dd.a_prime_fd - dd.a_prime_integral) > opt.tol.deriv * std::abs(dd.a_prime_fd))
        throw Error("jost", "DerivativeMismatch",
                    "a'(lambda0) by difference and by integral differ by " +
                        std::to_string(std::abs(dd.a_prime_fd - dd.a_prime_integral)));
    const cplx mu = dd.b0 / (dd.nu0 * dd.a_prime_fd);
    dd.mu0 = mu.real();
    dd.mu0_imag = mu.imag();
    if (std::abs(mu.imag()) > opt.tol.real)
        throw Error("jost", "InconsistentNormingConstant",
                    "mu0 has imaginary part " + std::to_string(mu.imag()));
    return dd;
}

inline void attach_discrete(ScatteringData& sd, const DiscreteData& dd) {
    sd.has_discrete = true;
    sd.lambda0 = dd.lambda0;
    sd.nu0 = dd.nu0;
    sd.b0 = dd.b0;
    sd.a_prime0 = dd.a_prime_fd;
    sd.a_prime0_integral = dd.a_prime_integral;
    sd.mu0 = dd.mu0;
    sd.mu0_imag = dd.mu0_imag;
    sd.min_abs_a = dd.min_abs_a;
}

/// Full forward stage: continuous coefficients plus discrete data.
inline ScatteringData forward_scatter(const FieldProfile& prof, const SpectralGrid& grid,
                                      const ForwardOptions& opt = {}) {
    ScatteringData sd = transition_coefficients(prof, grid, opt);
    DiscreteOptions dopt;
    dopt.substeps = opt.substeps;
    dopt.tol = opt.tol;
    attach_discrete(sd, discrete_data(prof, dopt));
    return sd;
}

struct ZeroLimitRecord {
    // 1/zeta coefficients of a and b near zeta = 0, per branch
    std::array<cplx, 2> sigma_a{}, sigma_b{};
    double sigma_plus = 0.0;   // max(|sigma_a|, |sigma_b|) on the + branch
    double sigma_minus = 0.0;  // same on the - branch
    double zeta_a_min = 0.0;   // max over branches of |zeta a| at min |zeta|
    double zeta_b_min = 0.0;
    double max_abs_a = 0.0;
};

/// Least squares of f = s/zeta + c0 + c1 zeta over the 8 smallest |zeta|.
inline ZeroLimitRecord zero_limit_diagnostic(const ScatteringData& sd) {
    const auto& z = sd.grid.zeta;
    std::vector<std::size_t> idx(z.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::partial_sort(idx.begin(), idx.begin() + 8, idx.end(),
                      [&](std::size_t p, std::size_t q) { return std::abs(z[p]) < std::abs(z[q]); });
    Eigen::MatrixXcd A(8, 3);
    for (int r = 0; r < 8; ++r) {
        const double zz = z[idx[r]];
        A(r, 0) = 1.0 / zz;
        A(r, 1) = 1.0;
        A(r, 2) = zz;
    }
    auto qr = A.colPivHouseholderQr();
    ZeroLimitRecord rec;
    for (int br = 0; br < 2; ++br) {
        Eigen::VectorXcd fa(8), fb(8);
        for (int r = 0; r < 8; ++r) {
            fa(r) = sd.a[br][idx[r]];
            fb(r) = sd.b[br][idx[r]];
        }
        rec.sigma_a[br] = qr.solve(fa)(0);
        rec.sigma_b[br] = qr.solve(fb)(0);
        const double zm = std::abs(z[idx[0]]);
        rec.zeta_a_min = std::max(rec.zeta_a_min, zm * std::abs(sd.a[br][idx[0]]));
        rec.zeta_b_min = std::max(rec.zeta_b_min, zm * std::abs(sd.b[br][idx[0]]));
        for (auto& v : sd.a[br]) rec.max_abs_a = std::max(rec.max_abs_a, std::abs(v));
    }
    rec.sigma_plus = std::max(std::abs(rec.sigma_a[0]), std::abs(rec.sigma_b[0]));
    rec.sigma_minus = std::max(std::abs(rec.sigma_a[1]), std::abs(rec.sigma_b[1]));
    return rec;
}

struct Rectangle {
    double re_min = -0.6, re_max = 0.6, im_min = -0.3, im_max = 0.3;
};

/// Winding number of a(lambda) along the rectangle on the upper sheet,
/// (1/2 pi) * sum of arg(a_{k+1}/a_k) over n_side samples per edge.
inline double zero_count(const GaussPotential& pot, const Rectangle& rc = {}, int n_side = 200) {
    std::vector<cplx> path;
    const cplx c0(rc.re_min, rc.im_min), c1(rc.re_max, rc.im_min), c2(rc.re_max, rc.im_max),
        c3(rc.re_min, rc.im_max);
    const cplx corners[5] = {c0, c1, c2, c3, c0};
    for (int e = 0; e < 4; ++e)
        for (int k = 0; k < n_side; ++k)
            path.push_back(corners[e] + (corners[e + 1] - corners[e]) * (double(k) / n_side));
    std::vector<cplx> a(path.size());
    parallel_for(path.size(), [&](std::size_t i) { a[i] = transmission_upper(pot, path[i]).a; });
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::arg(a[(i + 1) % a.size()] / a[i]);
    return s / (2.0 * kPi);
}

/// min |a| over the gap edge strips nu in [nu_min, nu_max] (both edges);
/// detects zeros the bulk scan cannot resolve.
inline std::pair<double, double> edge_scan(const GaussPotential& pot, double nu_min = 1e-5,
                                           double nu_max = 1e-2, int n = 61) {
    std::vector<double> m(2 * n), nus(2 * n);
    parallel_for(2 * n, [&](std::size_t k) {
        const double nu = nu_min * std::pow(nu_max / nu_min, double(k % n) / double(n - 1));
        const double lam = (k < std::size_t(n) ? 1.0 : -1.0) * std::sqrt(0.5 - nu * nu);
        nus[k] = (k < std::size_t(n) ? 1.0 : -1.0) * nu;
        m[k] = std::abs(transmission_upper(pot, lam).a);
    });
    const auto it = std::min_element(m.begin(), m.end());
    return {*it, nus[it - m.begin()]};
}

}  // namespace gpist
