// gpist command line: forward scattering, evolution, reconstruction, the
// direct PDE integrator and the stability / diagnostics drivers.

#include <iostream>

#include <CLI11.hpp>

#include <gpist/io.hpp>

namespace fs = std::filesystem;
using namespace gpist;

namespace {

struct DataSource {
    std::string profile;
    std::string data;
    std::string discrete;
    double zeta_max = 30.0;
    int n_zeta = 4096;
    int substeps = 2;

    void add(CLI::App* c) {
        c->add_option("--profile", profile, "profile CSV (x,re_u,im_u); runs the forward stage");
        c->add_option("--data", data, "scattering CSV written by 'scatter'");
        c->add_option("--discrete", discrete, "discrete-data JSON written by 'scatter'");
        c->add_option("--zeta-max", zeta_max, "spectral cutoff")->capture_default_str();
        c->add_option("--n-zeta", n_zeta, "spectral samples (both signs)")->capture_default_str();
        c->add_option("--substeps", substeps, "integrator substeps per cell")->capture_default_str();
    }

    ScatteringData load() const {
        if (!profile.empty()) {
            ExperimentConfig c;
            c.zeta_max = zeta_max;
            c.n_zeta = n_zeta;
            c.substeps = substeps;
            return run_forward(io::read_profile(profile), c);
        }
        if (data.empty() || discrete.empty())
            throw Error("cli", "InvalidArgument", "give --profile, or both --data and --discrete");
        return io::read_scattering(data, discrete);
    }
};

std::string tag(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", t);
    return buf;
}

void write_reconstruction(const std::string& path, const Reconstruction& r, double t) {
    io::write_profile(path, r.x, r.u, t);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"inverse scattering near the black soliton of the 1D Gross-Pitaevskii equation"};
    app.require_subcommand(1);
    std::string out_dir = ".";
    app.add_option("-o,--out-dir", out_dir, "directory for outputs")->capture_default_str();

    // scatter
    auto* scatter = app.add_subcommand("scatter", "a(lambda), b(lambda) and discrete data of a profile");
    std::string scatter_in;
    DataSource scatter_src;
    scatter->add_option("profile", scatter_in, "profile CSV")->required();
    scatter->add_option("--zeta-max", scatter_src.zeta_max)->capture_default_str();
    scatter->add_option("--n-zeta", scatter_src.n_zeta)->capture_default_str();
    scatter->add_option("--substeps", scatter_src.substeps)->capture_default_str();

    // evolve
    auto* evolve_cmd = app.add_subcommand("evolve", "scattering data at time t");
    DataSource evolve_src;
    double evolve_t = 0.0;
    evolve_src.add(evolve_cmd);
    evolve_cmd->add_option("--t", evolve_t, "time")->required();

    // reconstruct
    auto* recon = app.add_subcommand("reconstruct", "u(t, x) from scattering data");
    DataSource recon_src;
    double recon_t = 0.0, x_lo = -10.0, x_hi = 10.0, step = 0.25;
    ExperimentConfig recon_cfg;
    recon_src.add(recon);
    recon->add_option("--t", recon_t, "time")->required();
    recon->add_option("--x-min", x_lo)->capture_default_str();
    recon->add_option("--x-max", x_hi)->capture_default_str();
    recon->add_option("--step", step, "station spacing (snapped to the lattice)")->capture_default_str();
    recon->add_option("--p-max", recon_cfg.p_max)->capture_default_str();
    recon->add_option("--n-p", recon_cfg.n_p)->capture_default_str();
    bool right_only = false;
    recon->add_flag("--right-only", right_only, "use the right system for x < 0 too");

    // pde
    auto* pde = app.add_subcommand("pde", "direct integration of the GP equation");
    double t_end = 1.0, dt = 5e-5, pde_eps = 0.0, pde_h = 0.02, pde_xmax = 40.0;
    std::string pde_profile, pde_family = "gaussian_real";
    std::uint64_t pde_seed = 1;
    std::vector<double> record;
    pde->add_option("--t-end", t_end)->required();
    pde->add_option("--dt", dt)->required();
    pde->add_option("--profile", pde_profile, "initial profile CSV (default: generated)");
    pde->add_option("--family", pde_family)->capture_default_str();
    pde->add_option("--epsilon", pde_eps)->capture_default_str();
    pde->add_option("--seed", pde_seed)->capture_default_str();
    pde->add_option("--dx", pde_h, "grid spacing")->capture_default_str();
    pde->add_option("--x-max", pde_xmax)->capture_default_str();
    pde->add_option("--record", record, "extra output times");

    // stability / diagnose
    auto* stab = app.add_subcommand("stability", "the perturbed-soliton stability experiment");
    std::string stab_cfg;
    stab->add_option("--config", stab_cfg)->required()->check(CLI::ExistingFile);
    auto* diag = app.add_subcommand("diagnose", "spectral diagnostics of a perturbed soliton");
    std::string diag_cfg;
    diag->add_option("--config", diag_cfg)->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        const fs::path out(out_dir);
        if (*scatter) {
            ExperimentConfig c;
            c.zeta_max = scatter_src.zeta_max;
            c.n_zeta = scatter_src.n_zeta;
            c.substeps = scatter_src.substeps;
            const auto prof = io::read_profile(scatter_in);
            const auto sd = run_forward(prof, c);
            io::write_scattering((out / "scattering.csv").string(), sd);
            io::write_discrete((out / "discrete.json").string(), sd);
            io::write_json((out / "summary.json").string(),
                           {{"command", "scatter"},
                            {"input", scatter_in},
                            {"discrete", io::discrete_json(sd)},
                            {"norm_violation", sd.norm_violation()},
                            {"min_abs_a_gap", sd.min_abs_a},
                            {"aprime_integral", {sd.a_prime0_integral.real(), sd.a_prime0_integral.imag()}}});
            std::cout << "lambda0 = " << sd.lambda0 << "  b0 = " << sd.b0 << "  mu0 = " << sd.mu0 << '\n';
        } else if (*evolve_cmd) {
            auto base = std::make_shared<const ScatteringData>(evolve_src.load());
            const auto sd = evolve(base, evolve_t).materialize();
            io::write_scattering((out / ("scattering_t" + tag(evolve_t) + ".csv")).string(), sd);
            io::write_discrete((out / ("discrete_t" + tag(evolve_t) + ".json")).string(), sd);
            io::write_json((out / "summary.json").string(),
                           {{"command", "evolve"}, {"t", evolve_t}, {"discrete", io::discrete_json(sd)}});
        } else if (*recon) {
            auto base = std::make_shared<const ScatteringData>(recon_src.load());
            const auto ev = evolve(base, recon_t);
            if (!(x_lo < x_hi) || !(step > 0.0)) throw Error("cli", "InvalidArgument", "need x-min < x-max, step > 0");
            const double dz = lattice_step(recon_cfg);
            const long stride = std::max(1L, std::lround(step / (0.5 * dz)));
            std::vector<double> xs = make_stations(x_lo, x_hi, dz, stride);
            const auto r = reconstruct_at(ev, xs, recon_cfg, !right_only, true);
            write_reconstruction((out / ("reconstruction_t" + tag(recon_t) + ".csv")).string(), r, recon_t);
            for (std::size_t k = 0; k < r.kernels.size(); ++k) {
                const std::string side = r.kernels[k].side == MarchenkoSide::Right ? "right" : "left";
                io::write_kernels((out / ("kernels_" + side + ".csv")).string(), r.kernels[k]);
                io::write_kernel_field((out / ("kernel_field_" + side + ".csv")).string(), r.fields[k]);
            }
            io::write_json((out / "summary.json").string(), {{"command", "reconstruct"},
                                                              {"t", recon_t},
                                                              {"stations", r.x.size()},
                                                              {"max_cond", r.max_cond},
                                                              {"max_residual", r.max_residual},
                                                              {"imag_leak", r.imag_leak},
                                                              {"discrete", io::discrete_json(ev.materialize())}});
        } else if (*pde) {
            FieldProfile u0 = pde_profile.empty()
                                  ? make_perturbation(pde_family, pde_eps, pde_seed, make_grid(pde_xmax, pde_h)).profile
                                  : io::read_profile(pde_profile);
            PDEOptions po;
            po.record_times = record;
            std::sort(po.record_times.begin(), po.record_times.end());
            const auto tr = integrate(u0, t_end, dt, po);
            io::write_profile((out / "pde_t0.csv").string(), u0, 0.0);
            for (const auto& s : tr.states)
                io::write_profile((out / ("pde_t" + tag(s.t) + ".csv")).string(), s.profile, s.t);
            io::write_energy((out / "energy.csv").string(), tr);
            io::write_json((out / "summary.json").string(), {{"command", "pde"},
                                                              {"t_end", t_end},
                                                              {"dt", dt},
                                                              {"max_energy_drift", tr.max_energy_drift},
                                                              {"boundary_deviation", tr.boundary_deviation}});
        } else if (*stab) {
            const auto cfg = load_config(stab_cfg);
            const fs::path dir = out_dir != "." ? out : fs::path(cfg.output_dir);
            const auto rep = run_stability(cfg);
            io::write_stability_csv((dir / "stability.csv").string(), rep);
            for (std::size_t k = 0; k < rep.rows.size(); ++k)
                write_reconstruction((dir / ("reconstruction_t" + tag(rep.rows[k].t) + ".csv")).string(),
                                     rep.fields[k], rep.rows[k].t);
            io::write_json((dir / "summary.json").string(), io::stability_json(rep));
            for (const auto& w : rep.rows)
                std::cout << "t = " << w.t << "  sup distance = " << w.sup_distance
                          << (w.has_oracle ? "  oracle gap = " + std::to_string(w.oracle_linf) : "") << '\n';
            std::cout << "empirical C = " << rep.empirical_c << '\n';
        } else if (*diag) {
            const auto cfg = load_config(diag_cfg);
            const fs::path dir = out_dir != "." ? out : fs::path(cfg.output_dir);
            const auto d = run_diagnostics(cfg);
            io::write_json((dir / "diagnostics.json").string(), io::diagnostics_json(d));
            std::cout << io::diagnostics_json(d).dump(2) << '\n';
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: [cli] " << e.what() << '\n';
        return 1;
    }
    return 0;
}
