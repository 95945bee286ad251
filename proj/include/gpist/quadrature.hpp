#pragma once

#include "common.hpp"

namespace gpist {

// Gregory end corrections: trapezoid plus m corrected weights at each end.
// The corrections c_j solve sum_j c_j j^k = t_k (k < m) where t_k are the
// Euler-Maclaurin moments of the trapezoid error; order m+1 accuracy for
// smooth integrands.
inline std::vector<double> gregory_corrections(int m) {
    if (m <= 0) return {};
    std::vector<double> bern(m + 2, 0.0);
    bern[0] = 1.0;
    for (int n = 1; n < m + 2; ++n) {
        double s = 0.0;
        double binom = 1.0;  // C(n+1, k)
        for (int k = 0; k < n; ++k) {
            s += binom * bern[k];
            binom = binom * double(n + 1 - k) / double(k + 1);
        }
        bern[n] = -s / double(n + 1);
    }
    Eigen::MatrixXd a(m, m);
    Eigen::VectorXd t(m);
    for (int k = 0; k < m; ++k) {
        for (int j = 0; j < m; ++j) a(k, j) = (k == 0) ? 1.0 : std::pow(double(j), k);
        if (k == 0) t(k) = -0.5;
        else if (k % 2 == 1) t(k) = bern[k + 1] / double(k + 1);
        else t(k) = 0.0;
    }
    Eigen::VectorXd c = a.fullPivLu().solve(t);
    return std::vector<double>(c.data(), c.data() + m);
}

/// Weights for n equispaced nodes with spacing h.
inline std::vector<double> gregory_weights(std::size_t n, double h, int m) {
    if (n < 2) throw Error("quadrature", "InvalidArgument", "need at least 2 nodes");
    std::vector<double> w(n, h);
    if (m <= 0 || n < std::size_t(2 * m)) {
        w.front() *= 0.5;
        w.back() *= 0.5;
        return w;
    }
    auto c = gregory_corrections(m);
    for (int j = 0; j < m; ++j) {
        w[j] += h * c[j];
        w[n - 1 - j] += h * c[j];
    }
    return w;
}

template <class T>
T lagrange_eval(const double* xs, const T* ys, int n, double x) {
    T r{};
    for (int m = 0; m < n; ++m) {
        double w = 1.0;
        for (int k = 0; k < n; ++k)
            if (k != m) w *= (x - xs[k]) / (xs[m] - xs[k]);
        r += w * ys[m];
    }
    return r;
}

/// Composite Simpson on an equispaced segment with an even number of panels.
inline double simpson(const std::vector<double>& f, double h) {
    std::size_t n = f.size();
    if (n < 3 || n % 2 == 0) throw Error("quadrature", "InvalidArgument", "Simpson needs odd sample count >= 3");
    double s = f.front() + f.back();
    for (std::size_t i = 1; i + 1 < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f[i];
    return s * h / 3.0;
}

/// Integral of (fa + (fb-fa) s) exp(i(pa + d s)) over s in [0,1],
/// times panel width dz. Amplitude linear, phase linear.
inline cplx filon_panel(double dz, cplx fa, cplx fb, double pa, double d) {
    cplx e0, e1;
    if (std::abs(d) < 1e-3) {
        const double d2 = d * d;
        e0 = cplx(1.0 - d2 / 6.0, d / 2.0 - d * d2 / 24.0);
        e1 = cplx(0.5 - d2 / 8.0, d / 3.0 - d * d2 / 30.0);
    } else {
        const cplx e = std::exp(cplx(0.0, d));
        const cplx id = cplx(0.0, d);
        e0 = (e - 1.0) / id;
        e1 = e / id - (e - 1.0) / (id * id);
    }
    return dz * std::exp(cplx(0.0, pa)) * (fa * e0 + (fb - fa) * e1);
}

}  // namespace gpist
