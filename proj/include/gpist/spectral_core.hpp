#pragma once

// Spectral variety lambda^2 - zeta^2 = 1/2, grids, and the closed forms of
// the black soliton U0(x) = tanh(x/sqrt2) used as ground truth.

#include <utility>

#include "common.hpp"

namespace gpist {

enum class Sheet { RealBranchPos, RealBranchNeg, GapUpper, GapLower };

struct SheetPoint {
    cplx lambda;
    cplx zeta;
    Sheet sheet;

    cplx energy() const { return 2.0 * lambda / kSqrt3; }
    bool on_real_branch() const {
        return sheet == Sheet::RealBranchPos || sheet == Sheet::RealBranchNeg;
    }
};

inline Sheet classify(cplx lambda, cplx zeta) {
    double scale = std::max(1.0, std::abs(zeta));
    if (std::abs(zeta.imag()) <= 1e-14 * scale && zeta.real() != 0.0)
        return lambda.real() >= 0.0 ? Sheet::RealBranchPos : Sheet::RealBranchNeg;
    return zeta.imag() >= 0.0 ? Sheet::GapUpper : Sheet::GapLower;
}

inline SheetPoint lift(cplx zeta, int branch_sign) {
    cplx lam = std::sqrt(zeta * zeta + 0.5);
    if (branch_sign < 0) lam = -lam;
    return {lam, zeta, classify(lam, zeta)};
}

/// Point of the upper sheet (Im zeta >= 0) above a given lambda.
inline SheetPoint upper_point(cplx lambda) {
    cplx z = std::sqrt(lambda * lambda - 0.5);
    if (z.imag() < 0.0 || (z.imag() == 0.0 && z.real() < 0.0)) z = -z;
    return {lambda, z, classify(lambda, z)};
}

/// Real lambda inside the gap, zeta = i nu with nu > 0.
inline SheetPoint gap_point(double lambda) {
    if (!(std::abs(lambda) < kHalfSqrt2))
        throw Error("spectral_core", "InvalidArgument", "gap point needs |lambda| < sqrt2/2");
    double nu = std::sqrt(0.5 - lambda * lambda);
    return {cplx(lambda, 0.0), cplx(0.0, nu), Sheet::GapUpper};
}

enum class Side { Plus, Minus };

/// Free states (X1, X2) at x. Plus: normalization at +inf, Minus: at -inf.
inline std::pair<Vec2, Vec2> free_states(const SheetPoint& pt, double x, Side side) {
    const cplx d = kSqrt2 * (pt.lambda - pt.zeta);
    const cplx em = std::exp(-kI * pt.zeta * x);
    const cplx ep = std::exp(kI * pt.zeta * x);
    const double s = side == Side::Plus ? 1.0 : -1.0;
    Vec2 x1(em, s * d * em);
    Vec2 x2(s * d * ep, ep);
    return {x1, x2};
}

inline cplx wronskian(const Vec2& v, const Vec2& w) { return v(0) * w(1) - v(1) * w(0); }

/// Transmission coefficient of U0; the reflection coefficient is zero.
inline cplx unperturbed_a(const SheetPoint& pt) {
    const cplx s = pt.lambda + pt.zeta;
    return (s - kI * kHalfSqrt2) / (s + kI * kHalfSqrt2);
}

enum class Which { Psi1, Psi2, Phi1, Phi2 };

inline Vec2 unperturbed_jost(const SheetPoint& pt, double x, Which which) {
    const cplx lam = pt.lambda, z = pt.zeta;
    const cplx d = lam - z;
    const double r = kHalfSqrt2;
    // f = 1/(1+e^{sqrt2 x}), g = e^{sqrt2 x}/(1+e^{sqrt2 x}) written to avoid overflow
    const double f = 1.0 / (1.0 + std::exp(kSqrt2 * x));
    const double g = 1.0 / (1.0 + std::exp(-kSqrt2 * x));
    const cplx em = std::exp(-kI * z * x);
    const cplx ep = std::exp(kI * z * x);
    switch (which) {
        case Which::Psi1:
            return em * Vec2(1.0 - f * (r - kI * d) / (r + kI * z),
                             kSqrt2 * d - f * (r * kI + d) / (r + kI * z));
        case Which::Psi2:
            return ep * Vec2(kSqrt2 * d - f * (-r * kI + d) / (r - kI * z),
                             1.0 - f * (r + kI * d) / (r - kI * z));
        case Which::Phi1:
            return em * Vec2(1.0 - g * (r + kI * d) / (r - kI * z),
                             -kSqrt2 * d + g * (-r * kI + d) / (r - kI * z));
        case Which::Phi2:
            return ep * Vec2(-kSqrt2 * d + g * (r * kI + d) / (r + kI * z),
                             1.0 - g * (r - kI * d) / (r + kI * z));
    }
    return Vec2::Zero();
}

/// Psi0(x, x+2p) as [[Psi11, Psi12], [Psi21, Psi22]].
inline Mat2 unperturbed_kernel(double x, double p) {
    if (p < 0.0) throw Error("spectral_core", "InvalidArgument", "p must be >= 0");
    const double w = std::exp(-kSqrt2 * p) / (kSqrt2 * (1.0 + std::exp(kSqrt2 * x)));
    Mat2 m;
    m(0, 0) = w;
    m(0, 1) = -kI * w;
    m(1, 0) = std::conj(m(0, 1));
    m(1, 1) = std::conj(m(0, 0));
    return m;
}

struct Grid1D {
    double x_min = -40.0;
    double x_max = 40.0;
    std::size_t n = 4001;

    double h() const { return (x_max - x_min) / double(n - 1); }
    double x(std::size_t i) const { return x_min + double(i) * h(); }

    void validate() const {
        if (n < 16) throw Error("grid", "InvalidGrid", "need at least 16 samples");
        if (!(x_max > x_min)) throw Error("grid", "InvalidGrid", "x_max must exceed x_min");
        if (std::abs(x_min + x_max) > 1e-12 * x_max)
            throw Error("grid", "InvalidGrid", "grid must be symmetric about 0");
    }
};

inline Grid1D make_grid(double x_max, double h) {
    Grid1D g;
    g.x_min = -x_max;
    g.x_max = x_max;
    g.n = static_cast<std::size_t>(std::llround(2.0 * x_max / h)) + 1;
    g.validate();
    return g;
}

struct SpectralGrid {
    std::vector<double> zeta;  // ascending, symmetric, no zero
    double zeta_max = 0.0;

    std::size_t size() const { return zeta.size(); }
    std::size_t mirror(std::size_t i) const { return zeta.size() - 1 - i; }
};

/// n_total symmetric samples. Per side: n_geo geometric samples on
/// [zeta_min, zeta_split) then uniform samples on [zeta_split, zeta_max].
inline SpectralGrid make_spectral_grid(std::size_t n_total = 4096, double zeta_max = 30.0,
                                       double zeta_min = 1e-3, double zeta_split = 0.5,
                                       std::size_t n_geo = 256) {
    if (n_total % 2 != 0 || n_total / 2 <= n_geo + 1)
        throw Error("spectral_core", "InvalidGrid", "n_total must be even and exceed 2*(n_geo+1)");
    if (!(0.0 < zeta_min && zeta_min < zeta_split && zeta_split < zeta_max))
        throw Error("spectral_core", "InvalidGrid", "need 0 < zeta_min < zeta_split < zeta_max");
    const std::size_t half = n_total / 2;
    std::vector<double> pos;
    pos.reserve(half);
    const double r = std::log(zeta_split / zeta_min) / double(n_geo);
    for (std::size_t k = 0; k < n_geo; ++k) pos.push_back(zeta_min * std::exp(r * double(k)));
    const std::size_t nu = half - n_geo;
    for (std::size_t k = 0; k < nu; ++k)
        pos.push_back(zeta_split + (zeta_max - zeta_split) * double(k) / double(nu - 1));
    SpectralGrid g;
    g.zeta_max = zeta_max;
    g.zeta.reserve(n_total);
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) g.zeta.push_back(-*it);
    for (double v : pos) g.zeta.push_back(v);
    return g;
}

}  // namespace gpist
