#pragma once

// Marchenko kernels and integral equations.
//
// Right system, y >= x, z = s + y:
//   2 sqrt2 Psi11(x,y) = F2(x+y) - int_x^inf [Psi12 sqrt2 (F1 - i F2')(s+y) + Psi11 F2(s+y)] ds
//   2 sqrt2 Psi12(x,y) = sqrt2 (F1 + i F2')(x+y)
//                        - int_x^inf [Psi11 sqrt2 (F1 + i F2')(s+y) + Psi12 F2(s+y)] ds
//   u(x) = 2 sqrt2 i Psi12(x,x)^* + 1.
//
// The left system is the right one for the mirrored potential
// q^(x) = -q^*(-x), whose data are a^ = a, b^ = b^*, mu0^ = mu0/|b0|^2 with
// the same lambda0. With G_k(z) = F^_k(-z) (G3 is F^2' taken at -z):
//   2 sqrt2 Phi11(x,y) = G2(x+y) + int_-inf^x [Phi12 sqrt2 (G1 + i G3) - Phi11 G2](s+y) ds
//   2 sqrt2 Phi12(x,y) = -sqrt2 (G1 - i G3)(x+y)
//                        + int_-inf^x [Phi11 sqrt2 (G1 - i G3) - Phi12 G2](s+y) ds
//   u(x) = -2 sqrt2 i Phi12(x,x)^* - 1.
//
// Both are discretized by Nystrom on y_j = x +- j dz with Gregory-corrected
// trapezoid weights, so every node s + y falls on the kernel lattice z = k dz.

#include <optional>

#include "evolution.hpp"

namespace gpist {

/// Integer lattice z_k = k dz for k in [k_min, k_min + n).
struct Lattice {
    long k_min = 0;
    std::size_t n = 0;
    double dz = 0.0;

    double z(std::size_t idx) const { return double(k_min + long(idx)) * dz; }
    bool contains(long k) const { return k >= k_min && k < k_min + long(n); }
    std::size_t index(long k) const { return std::size_t(k - k_min); }
};

/// Station index m such that 2x = m dz.
inline long station_index(double x, double dz) { return std::lround(2.0 * x / dz); }
inline double station_x(long m, double dz) { return 0.5 * double(m) * dz; }

/// Stations from x_lo to x_hi spaced by `stride` half-lattice steps.
inline std::vector<double> make_stations(double x_lo, double x_hi, double dz, long stride) {
    std::vector<double> xs;
    const long m0 = long(std::ceil(2.0 * x_lo / dz - 1e-9));
    const long m1 = long(std::floor(2.0 * x_hi / dz + 1e-9));
    for (long m = m0; m <= m1; m += stride) xs.push_back(station_x(m, dz));
    return xs;
}

enum class MarchenkoSide { Right, Left };

/// Lattice covering all z = s + y reached from the given stations.
inline Lattice plan_lattice(const std::vector<double>& xs, double dz, int n_p, MarchenkoSide side) {
    if (xs.empty()) throw Error("marchenko", "InvalidArgument", "no stations");
    long mmin = station_index(xs.front(), dz), mmax = mmin;
    for (double x : xs) {
        mmin = std::min(mmin, station_index(x, dz));
        mmax = std::max(mmax, station_index(x, dz));
    }
    const long span = 2L * (n_p - 1);
    Lattice L;
    L.dz = dz;
    if (side == MarchenkoSide::Right) {
        L.k_min = mmin;
        L.n = std::size_t(mmax + span - mmin + 1);
    } else {
        L.k_min = mmin - span;
        L.n = std::size_t(mmax - mmin + span + 1);
    }
    return L;
}

struct MarchenkoKernels {
    MarchenkoSide side = MarchenkoSide::Right;
    double t = 0.0;
    Lattice lattice;
    std::vector<double> F1, F2, F2prime;  // right: F; left: G as described above
    double imag_leak = 0.0;
    double lambda0 = 0.0, nu0 = 0.0, mu0_t = 0.0;  // discrete term actually used
};

struct KernelOptions {
    int extrap_side = 3;  // samples per side for the zeta = 0 value
    Tolerances tol;
};

namespace detail {

/// c at zeta = 0 from a Lagrange fit through the nearest samples on each side.
inline cplx extrapolate_zero(const std::vector<double>& z, const std::vector<cplx>& v, int per_side) {
    const std::size_t i = std::size_t(std::lower_bound(z.begin(), z.end(), 0.0) - z.begin());
    if (i < std::size_t(per_side) || i + per_side > z.size())
        throw Error("marchenko", "InvalidGrid", "not enough samples around zeta = 0");
    return lagrange_eval(z.data() + i - per_side, v.data() + i - per_side, 2 * per_side, 0.0);
}

}  // namespace detail

/// F_k = F_k^(2) - F_k^(1). The continuous part is the zeta transform of
/// c1 = c(lambda) + c(-lambda), c2 = (c(lambda) - c(-lambda))/lambda and
/// i zeta c2, lambda = +sqrt(zeta^2 + 1/2). Amplitudes are linear per panel
/// and the phase zeta z -+ 4 lambda zeta t is linearized per panel, then
/// integrated exactly; a zeta = 0 node is inserted by extrapolation.
inline MarchenkoKernels build_kernels(const EvolvedData& ev, const Lattice& lat, MarchenkoSide side,
                                      const KernelOptions& opt = {}) {
    const ScatteringData& sd = ev.base();
    const double t = ev.t();
    const auto& zg = sd.grid.zeta;
    const std::size_t nz = zg.size();
    const bool left = side == MarchenkoSide::Left;

    // amplitudes at t = 0 (the time phase goes into the Filon phase)
    std::vector<cplx> cp(nz), cm(nz);
    for (std::size_t i = 0; i < nz; ++i) {
        cp[i] = (left ? std::conj(sd.b[0][i]) : sd.b[0][i]) / sd.a[0][i];
        cm[i] = (left ? std::conj(sd.b[1][i]) : sd.b[1][i]) / sd.a[1][i];
    }
    const std::size_t i0 = std::size_t(std::lower_bound(zg.begin(), zg.end(), 0.0) - zg.begin());
    std::vector<double> Z;
    std::vector<cplx> CP, CM;
    Z.reserve(nz + 1);
    for (std::size_t i = 0; i <= nz; ++i) {
        if (i == i0) {
            Z.push_back(0.0);
            CP.push_back(detail::extrapolate_zero(zg, cp, opt.extrap_side));
            CM.push_back(detail::extrapolate_zero(zg, cm, opt.extrap_side));
        }
        if (i < nz) {
            Z.push_back(zg[i]);
            CP.push_back(cp[i]);
            CM.push_back(cm[i]);
        }
    }
    const std::size_t m = Z.size();
    std::vector<double> lam(m), tp(m);
    std::vector<cplx> ap2(m), am2(m), ap3(m), am3(m);
    for (std::size_t i = 0; i < m; ++i) {
        lam[i] = std::sqrt(Z[i] * Z[i] + 0.5);
        tp[i] = 4.0 * lam[i] * Z[i] * t;  // time phase magnitude
        ap2[i] = CP[i] / lam[i];
        am2[i] = CM[i] / lam[i];
        ap3[i] = kI * Z[i] * ap2[i];
        am3[i] = kI * Z[i] * am2[i];
    }
    // mirrored data evolve with the conjugate phase
    const double tsign = left ? 1.0 : -1.0;

    MarchenkoKernels K;
    K.side = side;
    K.t = t;
    K.lattice = lat;
    K.F1.assign(lat.n, 0.0);
    K.F2.assign(lat.n, 0.0);
    K.F2prime.assign(lat.n, 0.0);
    K.lambda0 = sd.lambda0;
    K.nu0 = sd.nu0;
    K.mu0_t = left ? ev.mu0() / std::norm(ev.b0()) : ev.mu0();

    std::vector<double> leak(lat.n, 0.0);
    parallel_for(lat.n, [&](std::size_t k) {
        const double w = left ? -lat.z(k) : lat.z(k);
        cplx s1 = 0.0, s2 = 0.0, s3 = 0.0;
        for (std::size_t i = 0; i + 1 < m; ++i) {
            const double dz = Z[i + 1] - Z[i];
            for (int br = 0; br < 2; ++br) {
                const double sg = br == 0 ? 1.0 : -1.0;  // lambda sign on this branch
                const double pa = Z[i] * w + tsign * sg * tp[i];
                const double pb = Z[i + 1] * w + tsign * sg * tp[i + 1];
                const double d = pb - pa;
                cplx e0, e1;
                if (std::abs(d) < 1e-3) {
                    const double d2 = d * d;
                    e0 = cplx(1.0 - d2 / 6.0, d / 2.0 - d * d2 / 24.0);
                    e1 = cplx(0.5 - d2 / 8.0, d / 3.0 - d * d2 / 30.0);
                } else {
                    const cplx e = std::exp(cplx(0.0, d));
                    const cplx id(0.0, d);
                    e0 = (e - 1.0) / id;
                    e1 = e / id - (e - 1.0) / (id * id);
                }
                const cplx ph = dz * std::exp(cplx(0.0, pa));
                const cplx u0 = ph * (e0 - e1), u1 = ph * e1;  // weights on endpoints
                if (br == 0) {
                    s1 += u0 * CP[i] + u1 * CP[i + 1];
                    s2 += u0 * ap2[i] + u1 * ap2[i + 1];
                    s3 += u0 * ap3[i] + u1 * ap3[i + 1];
                } else {
                    s1 += u0 * CM[i] + u1 * CM[i + 1];
                    s2 -= u0 * am2[i] + u1 * am2[i + 1];
                    s3 -= u0 * am3[i] + u1 * am3[i + 1];
                }
            }
        }
        s1 /= 2.0 * kPi;
        s2 /= 2.0 * kPi;
        s3 /= 2.0 * kPi;
        leak[k] = std::max({std::abs(s1.imag()), std::abs(s2.imag()), std::abs(s3.imag())});
        const double e = K.mu0_t * std::exp(-K.nu0 * w);
        K.F1[k] = s1.real() - K.lambda0 * e;
        K.F2[k] = s2.real() - e;
        K.F2prime[k] = s3.real() + K.nu0 * e;
    });
    K.imag_leak = *std::max_element(leak.begin(), leak.end());
    if (K.imag_leak > opt.tol.imag_leak)
        throw Error("marchenko", "ImaginaryLeak",
                    "max |Im F| = " + std::to_string(K.imag_leak) + " exceeds tolerance");
    return K;
}

struct FiniteRank {
    std::vector<cplx> psi11, psi12;
};

/// Closed-form solution of the rank-one system (continuous spectrum off).
inline FiniteRank finite_rank_solution(double lambda0, double nu0, double mu0_t, double x,
                                       const std::vector<double>& p) {
    const cplx den = 1.0 - (2.0 * kSqrt2 * nu0 / mu0_t) * std::exp(2.0 * nu0 * x);
    if (std::abs(den) < 1e-10) throw Error("marchenko", "PoleHit", "finite-rank denominator vanishes");
    FiniteRank fr;
    fr.psi11.resize(p.size());
    fr.psi12.resize(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double e = std::exp(-2.0 * nu0 * p[j]);
        fr.psi11[j] = nu0 * e / den;
        fr.psi12[j] = kSqrt2 * nu0 * cplx(lambda0, -nu0) * e / den;
    }
    return fr;
}

inline FiniteRank finite_rank_solution(const EvolvedData& ev, double x, const std::vector<double>& p) {
    return finite_rank_solution(ev.base().lambda0, ev.base().nu0, ev.mu0(), x, p);
}

struct StationSolution {
    double x = 0.0;
    std::vector<cplx> psi11, psi12;       // Psi (right) or Phi (left) along the p grid
    std::vector<cplx> remainder11, remainder12;  // minus the finite-rank part (right side)
    double rcond = 0.0, cond = 0.0, residual = 0.0, sigma_min_proxy = 0.0;
};

struct KernelField {
    MarchenkoSide side = MarchenkoSide::Right;
    double t = 0.0;
    double dy = 0.0;
    int n_p = 0;
    std::vector<double> p;  // p_j = j dy / 2, y = x +- 2 p
    std::vector<StationSolution> stations;
};

struct SolveOptions {
    int gregory = 5;  // corrected end weights per end
    Tolerances tol;
    bool split_finite_rank = true;
};

/// Solves the system at one station. The 2N x 2N complex matrix is assembled
/// densely and factored by partial-pivot LU.
inline StationSolution solve_station(const MarchenkoKernels& K, double x, int n_p, const SolveOptions& opt) {
    const Lattice& L = K.lattice;
    const long m = station_index(x, L.dz);
    if (std::abs(station_x(m, L.dz) - x) > 1e-9 * std::max(1.0, std::abs(x)))
        throw Error("marchenko", "InvalidArgument", "station is not on the half lattice");
    const bool right = K.side == MarchenkoSide::Right;
    const long span = 2L * (n_p - 1);
    if (!L.contains(m) || !L.contains(right ? m + span : m - span))
        throw Error("marchenko", "InvalidArgument", "kernels do not cover the station range");
    const std::size_t N = std::size_t(n_p);
    const auto w = gregory_weights(N, L.dz, opt.gregory);
    auto at = [&](long off) { return L.index(right ? m + off : m - off); };

    Eigen::MatrixXcd M(2 * N, 2 * N);
    Eigen::VectorXcd rhs(2 * N);
    const double s2 = kSqrt2, d = 2.0 * kSqrt2;
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
            const std::size_t k = at(long(i + j));
            const double f1 = K.F1[k], f2 = K.F2[k], f3 = K.F2prime[k];
            if (right) {
                M(i, j) = w[j] * f2;
                M(i, N + j) = w[j] * s2 * cplx(f1, -f3);
                M(N + i, j) = w[j] * s2 * cplx(f1, f3);
                M(N + i, N + j) = w[j] * f2;
            } else {
                M(i, j) = w[j] * f2;
                M(i, N + j) = -w[j] * s2 * cplx(f1, f3);
                M(N + i, j) = -w[j] * s2 * cplx(f1, -f3);
                M(N + i, N + j) = w[j] * f2;
            }
        }
        M(i, i) += d;
        M(N + i, N + i) += d;
        const std::size_t k = at(long(i));
        if (right) {
            rhs(i) = K.F2[k];
            rhs(N + i) = s2 * cplx(K.F1[k], K.F2prime[k]);
        } else {
            rhs(i) = K.F2[k];
            rhs(N + i) = -s2 * cplx(K.F1[k], -K.F2prime[k]);
        }
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
    StationSolution st;
    st.x = station_x(m, L.dz);
    st.rcond = lu.rcond();
    st.cond = st.rcond > 0.0 ? 1.0 / st.rcond : std::numeric_limits<double>::infinity();
    st.sigma_min_proxy = st.rcond * M.cwiseAbs().colwise().sum().maxCoeff();
    if (!(st.cond <= opt.tol.cond_max))
        throw Error("marchenko", "IllConditioned",
                    "condition estimate " + std::to_string(st.cond) + " at x = " + std::to_string(st.x));
    Eigen::VectorXcd sol = lu.solve(rhs);
    st.residual = (M * sol - rhs).norm() / std::max(rhs.norm(), 1e-300);
    if (!(st.residual <= opt.tol.residual))
        throw Error("marchenko", "ResidualTooLarge",
                    "relative residual " + std::to_string(st.residual) + " at x = " + std::to_string(st.x));
    st.psi11.assign(sol.data(), sol.data() + N);
    st.psi12.assign(sol.data() + N, sol.data() + 2 * N);
    return st;
}

inline KernelField solve_marchenko(const EvolvedData* ev, const MarchenkoKernels& K,
                                   const std::vector<double>& xs, double p_max, int n_p,
                                   const SolveOptions& opt = {}) {
    const double dy = 2.0 * p_max / double(n_p - 1);
    if (std::abs(dy - K.lattice.dz) > 1e-12 * dy)
        throw Error("marchenko", "InvalidArgument", "kernel lattice spacing must equal 2 p_max/(n_p-1)");
    KernelField f;
    f.side = K.side;
    f.t = K.t;
    f.dy = dy;
    f.n_p = n_p;
    f.p.resize(n_p);
    for (int j = 0; j < n_p; ++j) f.p[j] = 0.5 * dy * j;
    f.stations.resize(xs.size());
    parallel_for(xs.size(), [&](std::size_t s) { f.stations[s] = solve_station(K, xs[s], n_p, opt); });
    if (ev && opt.split_finite_rank && K.side == MarchenkoSide::Right) {
        for (auto& st : f.stations) {
            auto fr = finite_rank_solution(K.lambda0, K.nu0, K.mu0_t, st.x, f.p);
            st.remainder11.resize(n_p);
            st.remainder12.resize(n_p);
            for (int j = 0; j < n_p; ++j) {
                st.remainder11[j] = st.psi11[j] - fr.psi11[j];
                st.remainder12[j] = st.psi12[j] - fr.psi12[j];
            }
        }
    }
    return f;
}

struct ReconstructionResult {
    double t = 0.0;
    std::vector<double> x;
    std::vector<cplx> u;
    double residual_ode = 0.0;
    double residual_time = 0.0;
    double boundary_residual = 0.0;  // against a reference profile, if given
    double diagonal_residual = 0.0;  // d/dx Psi11(x,x) = (q - r)(q^* + r)/2, r = sqrt2/2
};

using ReferenceField = std::function<cplx(double)>;

inline ReconstructionResult reconstruct_field(const KernelField& f, const ReferenceField& ref = {}) {
    ReconstructionResult r;
    r.t = f.t;
    const bool right = f.side == MarchenkoSide::Right;
    for (const auto& st : f.stations) {
        r.x.push_back(st.x);
        const cplx p12 = st.psi12[0];
        r.u.push_back(right ? 2.0 * kSqrt2 * kI * std::conj(p12) + 1.0
                            : -2.0 * kSqrt2 * kI * std::conj(p12) - 1.0);
    }
    if (ref) {
        for (std::size_t s = 0; s < r.x.size(); ++s) {
            const cplx q = kHalfSqrt2 * ref(r.x[s]);
            const cplx p21 = std::conj(f.stations[s].psi12[0]);
            const cplx target = right ? -0.5 * kI * (q - kHalfSqrt2) : 0.5 * kI * (q + kHalfSqrt2);
            r.boundary_residual = std::max(r.boundary_residual, std::abs(p21 - target));
        }
    }
    if (right && r.x.size() >= 3) {
        for (std::size_t s = 1; s + 1 < r.x.size(); ++s) {
            const double h1 = r.x[s] - r.x[s - 1], h2 = r.x[s + 1] - r.x[s];
            if (std::abs(h1 - h2) > 1e-9) continue;
            const cplx dpsi = (f.stations[s + 1].psi11[0] - f.stations[s - 1].psi11[0]) / (2.0 * h1);
            const cplx q = kHalfSqrt2 * r.u[s];
            const cplx rhs = 0.5 * (q - kHalfSqrt2) * (std::conj(q) + kHalfSqrt2);
            r.diagonal_residual = std::max(r.diagonal_residual, std::abs(dpsi - rhs));
        }
    }
    return r;
}

/// Left reconstruction for stations x <= 0.
inline ReconstructionResult left_reconstruct(const EvolvedData& ev, const std::vector<double>& xs, double p_max,
                                             int n_p, const SolveOptions& sopt = {},
                                             const KernelOptions& kopt = {}, const ReferenceField& ref = {}) {
    for (double x : xs)
        if (x > 1e-12) throw Error("marchenko", "InvalidArgument", "left stations must satisfy x <= 0");
    const double dy = 2.0 * p_max / double(n_p - 1);
    const Lattice lat = plan_lattice(xs, dy, n_p, MarchenkoSide::Left);
    const auto K = build_kernels(ev, lat, MarchenkoSide::Left, kopt);
    const auto f = solve_marchenko(&ev, K, xs, p_max, n_p, sopt);
    return reconstruct_field(f, ref);
}

/// psi1(x, lambda) = X1+(x) - int_x^inf Psi(x,y) X1+(y) dy from a solved station.
inline Vec2 assemble_psi1(const StationSolution& st, double dy, const SheetPoint& pt, int gregory = 5) {
    const std::size_t N = st.psi11.size();
    const auto w = gregory_weights(N, dy, gregory);
    Vec2 v = free_states(pt, st.x, Side::Plus).first;
    for (std::size_t j = 0; j < N; ++j) {
        const double y = st.x + dy * double(j);
        const Vec2 X = free_states(pt, y, Side::Plus).first;
        const cplx p11 = st.psi11[j], p12 = st.psi12[j];
        v(0) -= w[j] * (p11 * X(0) + p12 * X(1));
        v(1) -= w[j] * (std::conj(p12) * X(0) + std::conj(p11) * X(1));
    }
    return v;
}

/// Defect of v' = A v for psi1 assembled at three equally spaced stations,
/// with q taken from the reconstruction at the centre.
inline double ode_residual(const KernelField& f, std::size_t centre, const SheetPoint& pt) {
    if (f.side != MarchenkoSide::Right || centre == 0 || centre + 1 >= f.stations.size())
        throw Error("marchenko", "InvalidArgument", "ode residual needs right stations on both sides");
    const auto& a = f.stations[centre - 1];
    const auto& b = f.stations[centre];
    const auto& c = f.stations[centre + 1];
    const double h = b.x - a.x;
    const Vec2 va = assemble_psi1(a, f.dy, pt), vb = assemble_psi1(b, f.dy, pt), vc = assemble_psi1(c, f.dy, pt);
    const cplx u = 2.0 * kSqrt2 * kI * std::conj(b.psi12[0]) + 1.0;
    const cplx q = kHalfSqrt2 * u;
    Mat2 A;
    A << -kI * pt.lambda, kI * std::conj(q), -kI * q, kI * pt.lambda;
    const Vec2 d = (vc - va) / (2.0 * h) - A * vb;
    return d.norm();
}

/// Defect of  chi_t + i B_u chi - i sqrt3 (E/2 - zeta)^2 chi  at the centre
/// station of a 3x3 (time x space) stencil of right kernel fields, where
/// chi = ((sqrt3-1)^{1/2} e^{iEx/2} psi1_1, (sqrt3+1)^{1/2} e^{iEx/2} psi1_2).
inline double time_residual(const KernelField& prev, const KernelField& cur, const KernelField& next,
                            std::size_t centre, const SheetPoint& pt) {
    const double dt = 0.5 * (next.t - prev.t);
    const double h = cur.stations[centre].x - cur.stations[centre - 1].x;
    const cplx E = pt.energy();
    auto chi = [&](const KernelField& f, std::size_t s) {
        const auto& st = f.stations[s];
        const Vec2 v = assemble_psi1(st, f.dy, pt);
        const cplx ph = std::exp(kI * E * st.x / 2.0);
        return Vec2(std::sqrt(kSqrt3 - 1.0) * ph * v(0), std::sqrt(kSqrt3 + 1.0) * ph * v(1));
    };
    auto field = [&](const KernelField& f, std::size_t s) {
        return 2.0 * kSqrt2 * kI * std::conj(f.stations[s].psi12[0]) + 1.0;
    };
    const Vec2 cm = chi(cur, centre - 1), c0 = chi(cur, centre), cp = chi(cur, centre + 1);
    const Vec2 chi_t = (chi(next, centre) - chi(prev, centre)) / (2.0 * dt);
    const Vec2 chi_xx = (cp - 2.0 * c0 + cm) / (h * h);
    const cplx u = field(cur, centre);
    const cplx ux = (field(cur, centre + 1) - field(cur, centre - 1)) / (2.0 * h);
    const double m2 = std::norm(u) - 1.0;
    Vec2 Bchi = -kSqrt3 * chi_xx;
    Bchi(0) += m2 / (kSqrt3 + 1.0) * c0(0) + kI * std::conj(ux) * c0(1);
    Bchi(1) += -kI * ux * c0(0) + m2 / (kSqrt3 - 1.0) * c0(1);
    const cplx k = E / 2.0 - pt.zeta;
    const Vec2 d = chi_t + kI * Bchi - kI * kSqrt3 * k * k * c0;
    return d.norm();
}

struct ConsistencyResiduals {
    double residual_ode = 0.0;
    double residual_time = 0.0;
};

/// ZS and time-evolution residuals at interior stations for a few real-branch points.
/// `prev`/`next` are fields at t -+ dt on the same stations (optional).
inline ConsistencyResiduals consistency_residuals(const KernelField& cur, const std::vector<SheetPoint>& pts,
                                                  const KernelField* prev = nullptr,
                                                  const KernelField* next = nullptr) {
    ConsistencyResiduals r;
    for (std::size_t s = 1; s + 1 < cur.stations.size(); ++s)
        for (const auto& pt : pts) {
            r.residual_ode = std::max(r.residual_ode, ode_residual(cur, s, pt));
            if (prev && next) r.residual_time = std::max(r.residual_time, time_residual(*prev, cur, *next, s, pt));
        }
    return r;
}

/// Full right pipeline: kernels on the needed lattice, solve, reconstruct.
struct InverseOptions {
    double p_max = 12.0;
    int n_p = 400;
    KernelOptions kernel;
    SolveOptions solve;
};

inline KernelField right_field(const EvolvedData& ev, const std::vector<double>& xs, const InverseOptions& o) {
    const double dy = 2.0 * o.p_max / double(o.n_p - 1);
    const Lattice lat = plan_lattice(xs, dy, o.n_p, MarchenkoSide::Right);
    const auto K = build_kernels(ev, lat, MarchenkoSide::Right, o.kernel);
    return solve_marchenko(&ev, K, xs, o.p_max, o.n_p, o.solve);
}

}  // namespace gpist
