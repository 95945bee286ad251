#pragma once

// Direct integrator for i u_t + u_xx = (|u|^2 - 1) u on a bounded grid with
// the two end nodes held at their initial values.

#include "jost.hpp"

namespace gpist {

/// Dark soliton of speed c: sqrt(1-c^2/2) tanh(sqrt(1-c^2/2) x / sqrt2) + i c / sqrt2.
inline cplx traveling_wave(double c, double x) {
    const double k = std::sqrt(1.0 - 0.5 * c * c);
    return cplx(k * std::tanh(k * x / kSqrt2), c / kSqrt2);
}

namespace detail {

/// Sixth-order centered first derivative; lower order near the ends.
inline std::vector<cplx> derivative(const std::vector<cplx>& u, double h) {
    const std::size_t n = u.size();
    std::vector<cplx> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i >= 3 && i + 3 < n) {
            d[i] = (45.0 * (u[i + 1] - u[i - 1]) - 9.0 * (u[i + 2] - u[i - 2]) + (u[i + 3] - u[i - 3])) / (60.0 * h);
        } else if (i >= 1 && i + 1 < n) {
            d[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
        } else if (i == 0) {
            d[i] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
        } else {
            d[i] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
        }
    }
    return d;
}

inline std::vector<cplx> centered(const std::vector<cplx>& u, double h) {
    const std::size_t n = u.size();
    std::vector<cplx> d(n);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
    d[0] = (u[1] - u[0]) / h;
    d[n - 1] = (u[n - 1] - u[n - 2]) / h;
    return d;
}

inline double trapezoid(const std::vector<double>& f, double h) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += (i == 0 || i + 1 == f.size() ? 0.5 : 1.0) * f[i];
    return s * h;
}

}  // namespace detail

/// Ginzburg-Landau energy by trapezoid quadrature with sixth-order derivatives.
inline double energy(const FieldProfile& p) {
    const double h = p.grid.h();
    const auto d = detail::derivative(p.u, h);
    std::vector<double> f(p.u.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double m = std::norm(p.u[i]) - 1.0;
        f[i] = 0.5 * std::norm(d[i]) + 0.25 * m * m;
    }
    return detail::trapezoid(f, h);
}

/// Energy of the semi-discrete scheme (forward differences); conserved
/// exactly by the method-of-lines flow with fixed end nodes.
inline double discrete_energy(const FieldProfile& p) {
    const double h = p.grid.h();
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < p.u.size(); ++i) s += 0.5 * std::norm((p.u[i + 1] - p.u[i]) / h);
    for (std::size_t i = 0; i < p.u.size(); ++i) {
        const double m = std::norm(p.u[i]) - 1.0;
        s += 0.25 * m * m;
    }
    return s * h;
}

inline void check_same_grid(const FieldProfile& a, const FieldProfile& b) {
    if (a.grid.n != b.grid.n || a.grid.x_min != b.grid.x_min || a.grid.x_max != b.grid.x_max ||
        a.u.size() != b.u.size())
        throw Error("pde_oracle", "MismatchedGrids", "profiles live on different grids");
}

/// d_E(u,v) = |u(0)-v(0)| + ||u'-v'||_L2 + || |u|^2 - |v|^2 ||_L2.
inline double energy_distance(const FieldProfile& a, const FieldProfile& b) {
    check_same_grid(a, b);
    const double h = a.grid.h();
    const auto da = detail::centered(a.u, h), db = detail::centered(b.u, h);
    std::vector<double> f1(a.u.size()), f2(a.u.size());
    for (std::size_t i = 0; i < f1.size(); ++i) {
        f1[i] = std::norm(da[i] - db[i]);
        const double m = std::norm(a.u[i]) - std::norm(b.u[i]);
        f2[i] = m * m;
    }
    const std::size_t i0 = a.zero_index();
    return std::abs(a.u[i0] - b.u[i0]) + std::sqrt(detail::trapezoid(f1, h)) + std::sqrt(detail::trapezoid(f2, h));
}

struct PDEState {
    FieldProfile profile;
    double t = 0.0;
    double energy = 0.0;
};

struct PDEOptions {
    std::vector<double> record_times;  // sorted; t_end is always recorded
    double energy_interval = 0.05;     // spacing of the energy log
    Tolerances tol;
};

struct PDETrajectory {
    std::vector<PDEState> states;
    std::vector<std::pair<double, double>> energy_log;  // (t, H)
    double boundary_deviation = 0.0;
    double max_energy_drift = 0.0;  // relative, over the log
};

namespace detail {

inline void gp_rhs(const std::vector<cplx>& u, std::vector<cplx>& r, double inv_h2) {
    const std::size_t n = u.size();
    r[0] = 0.0;
    r[n - 1] = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const cplx lap = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv_h2;
        const cplx nl = (std::norm(u[i]) - 1.0) * u[i];
        const cplx v = lap - nl;
        r[i] = cplx(-v.imag(), v.real());  // i * v
    }
}

}  // namespace detail

/// Classical RK4 in time, second-order centered Laplacian in space.
inline PDETrajectory integrate(const FieldProfile& u0, double t_end, double dt, const PDEOptions& opt = {}) {
    u0.grid.validate();
    const double h = u0.grid.h();
    if (!(dt > 0.0) || dt > 0.2 * h * h * (1.0 + 1e-12))
        throw Error("pde_oracle", "CFLViolation",
                    "dt = " + std::to_string(dt) + " exceeds the bound 0.2 h^2 = " + std::to_string(0.2 * h * h));
    if (!(t_end >= 0.0)) throw Error("pde_oracle", "InvalidArgument", "t_end must be >= 0");
    std::vector<double> marks;
    for (double t : opt.record_times)
        if (t > 0.0 && t < t_end) marks.push_back(t);
    std::sort(marks.begin(), marks.end());
    marks.push_back(t_end);

    const std::size_t n = u0.u.size();
    const double inv_h2 = 1.0 / (h * h);
    std::vector<cplx> u = u0.u, k1(n), k2(n), k3(n), k4(n), tmp(n);
    PDETrajectory tr;
    const double H0 = energy(u0);
    tr.energy_log.emplace_back(0.0, H0);
    for (double t : opt.record_times)
        if (t == 0.0) tr.states.push_back({u0, 0.0, H0});
    auto boundary_dev = [&] {
        double d = 0.0;
        for (std::size_t j = 0; j < 5; ++j) {
            d = std::max(d, std::abs(u[j] - u0.u[0]));
            d = std::max(d, std::abs(u[n - 1 - j] - u0.u[n - 1]));
        }
        return d;
    };
    double t = 0.0;
    double next_log = opt.energy_interval;
    for (double mark : marks) {
        const double span = mark - t;
        const long steps = std::max(1L, long(std::ceil(span / dt - 1e-9)));
        const double s = span / double(steps);
        for (long k = 0; k < steps; ++k) {
            detail::gp_rhs(u, k1, inv_h2);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * s * k1[i];
            detail::gp_rhs(tmp, k2, inv_h2);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * s * k2[i];
            detail::gp_rhs(tmp, k3, inv_h2);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + s * k3[i];
            detail::gp_rhs(tmp, k4, inv_h2);
            for (std::size_t i = 0; i < n; ++i) u[i] += s / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            const double tn = t + s * double(k + 1);
            if (opt.energy_interval > 0.0 && tn >= next_log - 1e-12 && k + 1 < steps) {
                FieldProfile p{u0.grid, u};
                tr.energy_log.emplace_back(tn, energy(p));
                next_log += opt.energy_interval;
            }
        }
        t = mark;
        for (const auto& v : u)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw Error("pde_oracle", "NonFinite", "solution blew up before t = " + std::to_string(t));
        FieldProfile p{u0.grid, u};
        const double E = energy(p);
        tr.states.push_back({p, t, E});
        if (tr.energy_log.back().first < t - 1e-12) tr.energy_log.emplace_back(t, E);
        tr.boundary_deviation = std::max(tr.boundary_deviation, boundary_dev());
        if (tr.boundary_deviation > opt.tol.boundary)
            throw Error("pde_oracle", "BoundaryContamination",
                        "deviation " + std::to_string(tr.boundary_deviation) + " near the clamped ends at t = " +
                            std::to_string(t));
    }
    for (const auto& [tt, E] : tr.energy_log)
        tr.max_energy_drift = std::max(tr.max_energy_drift, std::abs(E - H0) / std::max(std::abs(H0), 1e-300));
    return tr;
}

using TestVector = std::function<Vec2(double)>;

/// max over interior nodes and test vectors of |([L_u, B_u] - C_u) chi|, with
///   L_u = i diag(1+sqrt3, 1-sqrt3) d/dx + [[0, u^*], [u, 0]],
///   B_u = -sqrt3 d^2/dx^2 + [[(|u|^2-1)/(sqrt3+1), i u_x^*], [-i u_x, (|u|^2-1)/(sqrt3-1)]],
///   C_u = [[0, -u_xx^* + (|u|^2-1) u^*], [u_xx - (|u|^2-1) u, 0]],
/// all derivatives by second-order centered differences.
inline double lax_residual(const FieldProfile& p, const std::vector<TestVector>& tests) {
    const std::size_t n = p.u.size();
    const double h = p.grid.h();
    const auto& u = p.u;
    auto d1 = [&](const std::vector<cplx>& f, std::size_t i) { return (f[i + 1] - f[i - 1]) / (2.0 * h); };
    auto d2 = [&](const std::vector<cplx>& f, std::size_t i) { return (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h); };
    std::vector<cplx> ux(n, 0.0), uxx(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        ux[i] = d1(u, i);
        uxx[i] = d2(u, i);
    }
    const cplx l1 = kI * (1.0 + kSqrt3), l2 = kI * (1.0 - kSqrt3);
    auto applyL = [&](const std::vector<cplx>& c1, const std::vector<cplx>& c2, std::vector<cplx>& o1,
                      std::vector<cplx>& o2, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            o1[i] = l1 * d1(c1, i) + std::conj(u[i]) * c2[i];
            o2[i] = l2 * d1(c2, i) + u[i] * c1[i];
        }
    };
    auto applyB = [&](const std::vector<cplx>& c1, const std::vector<cplx>& c2, std::vector<cplx>& o1,
                      std::vector<cplx>& o2, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const double m = std::norm(u[i]) - 1.0;
            o1[i] = -kSqrt3 * d2(c1, i) + m / (kSqrt3 + 1.0) * c1[i] + kI * std::conj(ux[i]) * c2[i];
            o2[i] = -kSqrt3 * d2(c2, i) - kI * ux[i] * c1[i] + m / (kSqrt3 - 1.0) * c2[i];
        }
    };
    double worst = 0.0;
    for (const auto& tv : tests) {
        std::vector<cplx> c1(n), c2(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 v = tv(p.grid.x(i));
            c1[i] = v(0);
            c2[i] = v(1);
        }
        std::vector<cplx> b1(n, 0.0), b2(n, 0.0), lb1(n, 0.0), lb2(n, 0.0);
        std::vector<cplx> a1(n, 0.0), a2(n, 0.0), bl1(n, 0.0), bl2(n, 0.0);
        applyB(c1, c2, b1, b2, 2, n - 2);
        applyL(b1, b2, lb1, lb2, 3, n - 3);
        applyL(c1, c2, a1, a2, 1, n - 1);
        applyB(a1, a2, bl1, bl2, 3, n - 3);
        for (std::size_t i = 4; i + 4 < n; ++i) {
            const double m = std::norm(u[i]) - 1.0;
            const cplx e12 = -std::conj(uxx[i]) + m * std::conj(u[i]);
            const cplx e21 = uxx[i] - m * u[i];
            const cplx r1 = lb1[i] - bl1[i] - e12 * c2[i];
            const cplx r2 = lb2[i] - bl2[i] - e21 * c1[i];
            worst = std::max(worst, std::sqrt(std::norm(r1) + std::norm(r2)));
        }
    }
    return worst;
}

}  // namespace gpist
