// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>

#include <gpist/harness.hpp>

using namespace gpist;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what) {
    std::printf("%s [%d] %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

// run one criterion; a thrown stage error counts as FAIL
template <class Fn>
void guarded(int id, Fn&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        report(id, false, std::string("raised ") + e.what());
    }
}

}  // namespace

int main() {
    const ExperimentConfig defaults;
    const Grid1D grid = make_grid(defaults.x_max, defaults.h);
    std::shared_ptr<const ScatteringData> soliton;

    // 1 + 2: forward stage of U0 on the default grids
    guarded(1, [&] {
        Stopwatch sw;
        soliton = std::make_shared<const ScatteringData>(run_forward(black_soliton_profile(grid), defaults));
        const double secs = sw.seconds();
        double ea = 0.0, mb = 0.0;
        for (int br = 0; br < 2; ++br)
            for (std::size_t i = 0; i < soliton->grid.size(); ++i) {
                const cplx a0 = unperturbed_a(soliton->point(br, i));
                ea = std::max(ea, std::abs(soliton->a[br][i] - a0) / std::abs(a0));
                mb = std::max(mb, std::abs(soliton->b[br][i]));
            }
        report(1, ea <= 1e-6 && mb <= 1e-7 && secs <= 60.0,
               fmt("unperturbed forward stage: max rel err a = %.2e (<= 1e-6), max |b| = %.2e (<= 1e-7), %.1f s (<= 60)",
                   ea, mb, secs));
    });
    guarded(2, [&] {
        if (!soliton) throw Error("acceptance", "Skipped", "forward stage unavailable");
        const auto& s = *soliton;
        const double dl = std::abs(s.lambda0), db = std::abs(s.b0 - kI), dm = std::abs(s.mu0 + 2.0);
        const double da = std::abs(s.a_prime0 - s.a_prime0_integral) / std::abs(s.a_prime0);
        report(2, dl <= 1e-6 && db <= 1e-5 && dm <= 1e-4 && da <= 1e-4,
               fmt("discrete data: |lambda0| = %.1e, |b0 - i| = %.1e, |mu0 + 2| = %.1e, a' rel mismatch = %.1e", dl, db,
                   dm, da));
    });

    // 3: normalization
    guarded(3, [&] {
        double worst = soliton ? soliton->norm_violation() : 1.0;
        std::string detail = fmt("eps=0: %.1e", worst);
        for (double eps : {0.01, 0.05}) {
            const auto p = make_perturbation("gaussian_real", eps, 0, grid);
            const double v = run_forward(p.profile, defaults).norm_violation();
            detail += fmt(", eps=%.2f: %.1e", eps, v);
            worst = std::max(worst, v);
        }
        report(3, worst <= 1e-6, "normalization |a|^2-|b|^2 = 1 on the default grid, " + detail + " (<= 1e-6)");

        // h-halving: the production stepper conserves the invariant to rounding
        // at every h, so the convergence study uses the classical RK4 stepper
        // on |zeta| <= 5
        const auto sg = make_spectral_grid(512, 5.0, 1e-2, 0.5, 64);
        double viol[2][2];
        for (int k = 0; k < 2; ++k) {
            const double h = k == 0 ? 0.04 : 0.02;
            const auto p = make_perturbation("gaussian_real", 0.05, 0, make_grid(defaults.x_max, h));
            for (int m = 0; m < 2; ++m) {
                ForwardOptions fo;
                fo.substeps = m == 0 ? 1 : 2;
                fo.stepper = m == 0 ? Stepper::Rk4 : Stepper::Magnus4;
                viol[m][k] = transition_coefficients(p.profile, sg, fo).norm_violation();
            }
        }
        const double ratio = viol[0][0] / viol[0][1];
        report(3, ratio >= 8.0,
               fmt("h-halving 0.04 -> 0.02, eps=0.05: RK4 violation %.2e -> %.2e, ratio %.1f (>= 8); "
                   "production Magnus %.1e -> %.1e (rounding level)",
                   viol[0][0], viol[0][1], ratio, viol[1][0], viol[1][1]));
    });

    const double dz = lattice_step(defaults);

    // 4: unperturbed Marchenko from the computed forward data
    guarded(4, [&] {
        if (!soliton) throw Error("acceptance", "Skipped", "forward stage unavailable");
        Stopwatch sw;
        const EvolvedData ev = evolve(soliton, 0.0);
        const auto xr = make_stations(0.0, 8.0, dz, 16), xl = make_stations(-8.0, -dz / 2, dz, 16);
        InverseOptions o;
        const KernelField fr = right_field(ev, xr, o);
        double epsi = 0.0;
        for (const auto& st : fr.stations)
            for (std::size_t j = 0; j < fr.p.size(); ++j) {
                const Mat2 ref = unperturbed_kernel(st.x, fr.p[j]);
                epsi = std::max({epsi, std::abs(st.psi11[j] - ref(0, 0)), std::abs(st.psi12[j] - ref(0, 1))});
            }
        const auto rr = reconstruct_field(fr);
        const auto rl = left_reconstruct(ev, xl, o.p_max, o.n_p);
        double eu = 0.0;
        for (const auto* r : {&rr, &rl})
            for (std::size_t i = 0; i < r->x.size(); ++i) eu = std::max(eu, std::abs(r->u[i] - black_soliton(r->x[i])));
        const double secs = sw.seconds();
        report(4, epsi <= 1e-6 && eu <= 1e-6 && secs <= 120.0,
               fmt("unperturbed Marchenko: sup |Psi - Psi0| = %.2e, sup |u - tanh| = %.2e over %zu stations "
                   "in [-8, 8], %.1f s (<= 120)",
                   epsi, eu, rr.x.size() + rl.x.size(), secs));
    });

    // 5: finite-rank consistency
    guarded(5, [&] {
        double ea = 0.0;
        const std::vector<double> p{0.0, 0.5, 2.0, 7.0};
        for (double x : {-4.0, -1.0, 0.0, 1.5, 4.0}) {
            const auto fr = finite_rank_solution(0.0, kHalfSqrt2, -2.0, x, p);
            for (std::size_t j = 0; j < p.size(); ++j) {
                const Mat2 ref = unperturbed_kernel(x, p[j]);
                ea = std::max({ea, std::abs(fr.psi11[j] - ref(0, 0)), std::abs(fr.psi12[j] - ref(0, 1))});
            }
        }
        // b = 0 with a moving eigenvalue: the solver must return the rank-one solution
        auto sd = std::make_shared<ScatteringData>();
        sd->grid = make_spectral_grid();
        for (int br = 0; br < 2; ++br) {
            sd->a[br].resize(sd->grid.size());
            sd->b[br].assign(sd->grid.size(), 0.0);
            for (std::size_t i = 0; i < sd->grid.size(); ++i) sd->a[br][i] = unperturbed_a(sd->point(br, i));
        }
        sd->has_discrete = true;
        sd->lambda0 = 0.3;
        sd->nu0 = std::sqrt(0.5 - 0.09);
        sd->mu0 = -1.5;
        const EvolvedData ev = evolve(std::shared_ptr<const ScatteringData>(sd), 0.4);
        const auto f = right_field(ev, make_stations(-2.0, 4.0, dz, 40), {});
        double es = 0.0;
        for (const auto& st : f.stations) {
            const auto fr = finite_rank_solution(ev, st.x, f.p);
            for (std::size_t j = 0; j < f.p.size(); ++j)
                es = std::max({es, std::abs(st.psi11[j] - fr.psi11[j]), std::abs(st.psi12[j] - fr.psi12[j])});
        }
        report(5, ea <= 1e-14 && es <= 1e-8,
               fmt("finite rank: closed form vs Psi0 %.1e; solver with b = 0 (lambda0 = 0.3, t = 0.4) vs closed form "
                   "%.2e (<= 1e-8)",
                   ea, es));
    });

    // 6-9: stability runs
    std::vector<StabilityReport> runs;
    const std::vector<double> eps_list{0.01, 0.02, 0.05};
    double oracle_secs = 0.0;
    try {
        for (double eps : eps_list) {
            ExperimentConfig c = defaults;
            c.epsilon = eps;
            c.times = {0.0, 0.5, 1.0, 2.0};
            c.pde = eps == 0.05;
            Stopwatch sw;
            runs.push_back(run_stability(c));
            if (c.pde) oracle_secs = sw.seconds();
        }
    } catch (const std::exception& e) {
        for (int id : {6, 7, 8}) report(id, false, std::string("stability run raised ") + e.what());
    }
    if (runs.size() == eps_list.size()) {
        const StabilityReport& r5 = runs.back();
        guarded(6, [&] {
            const auto& row = r5.rows.front();
            const double budget = std::max(1e-4, 0.02 * 0.05);
            report(6, row.has_oracle && row.t == 0.0 && row.oracle_linf <= budget,
                   fmt("round trip t = 0, eps = 0.05: sup |u_rec - u0| = %.2e (<= %.0e) over %zu stations, |x| <= %.0f",
                       row.oracle_linf, budget, r5.n_stations, r5.window));
        });
        guarded(7, [&] {
            double gap = 0.0;
            std::string d;
            for (const auto& row : r5.rows)
                if (row.t > 0.0) {
                    gap = std::max(gap, row.oracle_linf);
                    d += fmt(" t=%.1f: %.2e", row.t, row.oracle_linf);
                }
            report(7, gap <= 5e-3 && oracle_secs <= 900.0,
                   "Marchenko vs PDE, eps = 0.05, sup gap on |x| <= " + fmt("%.0f", r5.window) + ":" + d +
                       fmt(" (<= 5e-3), %.0f s (<= 900)", oracle_secs));
        });
        guarded(8, [&] {
            bool ok = true;
            std::string d;
            for (const auto& r : runs) {
                ok = ok && r.max_sup_distance <= 3.0 * r.config.epsilon;
                d += fmt(" eps=%.2f: %.2e (C=%.3f)", r.config.epsilon, r.max_sup_distance, r.empirical_c);
            }
            const double ratio = runs[1].max_sup_distance / runs[0].max_sup_distance;
            ok = ok && ratio >= 1.4 && ratio <= 2.8;
            report(8, ok, "max_t sup|u(t,x+2 lambda0 t) - U0(x)| <= 3 eps:" + d +
                              fmt("; ratio eps 0.02/0.01 = %.2f (in [1.4, 2.8])", ratio));
        });
    }

    // 9: argument principle, every tested eps and every family at eps = 0.05
    guarded(9, [&] {
        bool ok = true;
        std::string d;
        auto count = [&](const std::string& fam, double eps) {
            const auto p = make_perturbation(fam, eps, 1, grid);
            GaussPotential pot(p.profile, defaults.substeps);
            const double n = zero_count(pot);
            ok = ok && std::abs(n - 1.0) <= 0.05;
            d += fmt(" %s/%.2f: %.4f", fam.c_str(), eps, n);
        };
        for (double eps : eps_list) count("gaussian_real", eps);
        for (const auto& fam : perturbation_families())
            if (fam != "gaussian_real") count(fam, 0.05);
        report(9, ok, "zero count of a in the gap rectangle:" + d + " (within 0.05 of 1)");
    });

    // 10: PDE oracle validation
    guarded(10, [&] {
        const double c = 0.5;
        const auto u0 = sample_profile(grid, [c](double x) { return traveling_wave(c, x); });
        const auto tr = integrate(u0, 1.0, defaults.dt);
        const auto& u = tr.states.back().profile;
        double err = 0.0;
        for (std::size_t i = 0; i < grid.n; ++i)
            if (std::abs(grid.x(i)) <= defaults.window())
                err = std::max(err, std::abs(u.u[i] - traveling_wave(c, grid.x(i) - c)));
        std::vector<TestVector> tv{
            [](double x) { return Vec2(std::exp(-x * x / 2), kI * x * std::exp(-x * x / 2)); },
            [](double x) { return Vec2(std::cos(x) / std::cosh(x), std::sin(2 * x) / std::cosh(x)); }};
        auto lax = [&](double h) {
            const auto p = make_perturbation("gaussian_complex", 0.05, 0, make_grid(15.0, h));
            return lax_residual(p.profile, tv);
        };
        const double l1 = lax(0.1), l2 = lax(0.05);
        report(10, err <= 1e-4 && tr.max_energy_drift <= 1e-6 && l1 / l2 >= 3.5,
               fmt("PDE: U_0.5 at t = 1 sup err %.2e (<= 1e-4); energy drift %.1e (<= 1e-6); Lax residual %.2e -> "
                   "%.2e, ratio %.2f (>= 3.5)",
                   err, tr.max_energy_drift, l1, l2, l1 / l2));
    });

    // 11: ZS equation and time evolution of the reconstructed psi1
    guarded(11, [&] {
        const auto p = make_perturbation("gaussian_real", 0.05, 0, grid);
        auto sd = std::make_shared<const ScatteringData>(run_forward(p.profile, defaults));
        const std::vector<SheetPoint> pts{lift(0.7, 1), lift(-1.3, 1), lift(0.4, -1)};
        const double t = 0.5;
        double ode[2], tim[2];
        for (int lvl = 0; lvl < 2; ++lvl) {
            const long stride = lvl == 0 ? 8 : 4;
            const double dt = lvl == 0 ? 0.1 : 0.05;
            std::vector<double> xs;
            const long m0 = station_index(2.0, dz);
            for (long m = m0 - stride; m <= m0 + stride; m += stride) xs.push_back(station_x(m, dz));
            InverseOptions o;
            const auto fc = right_field(evolve(sd, t), xs, o);
            const auto fp = right_field(evolve(sd, t - dt), xs, o);
            const auto fn = right_field(evolve(sd, t + dt), xs, o);
            const auto r = consistency_residuals(fc, pts, &fp, &fn);
            ode[lvl] = r.residual_ode;
            tim[lvl] = r.residual_time;
        }
        report(11, ode[0] / ode[1] >= 3.5 && tim[0] / tim[1] >= 3.5,
               fmt("residuals at x = 2, t = 0.5, eps = 0.05 under (h, dt) halving: ZS %.2e -> %.2e (ratio %.2f), "
                   "time %.2e -> %.2e (ratio %.2f), both >= 3.5",
                   ode[0], ode[1], ode[0] / ode[1], tim[0], tim[1], tim[0] / tim[1]));
    });

    std::printf("%s: %d criterion line(s) failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
