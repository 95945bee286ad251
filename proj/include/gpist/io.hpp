#pragma once

// CSV / JSON emission and ingestion. Numbers are written with 17 significant
// digits so identical runs give identical files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "harness.hpp"

namespace gpist::io {

using json = nlohmann::json;

namespace detail {

inline std::string num(double v) {
    if (!std::isfinite(v)) throw Error("io", "NonFinite", "refusing to emit a non-finite value");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::ofstream open_out(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "IoError", "cannot write " + path);
    return out;
}

inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

inline double parse_num(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error("io", "ParseError", where + ": not a number: '" + s + "'");
    }
}

inline void write_json(const std::string& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

}  // namespace detail

// ---------------------------------------------------------------- profiles

/// header x,re_u,im_u (plus t when given)
inline void write_profile(const std::string& path, const std::vector<double>& x, const std::vector<cplx>& u,
                          std::optional<double> t = std::nullopt) {
    auto out = detail::open_out(path);
    out << (t ? "x,re_u,im_u,t\n" : "x,re_u,im_u\n");
    for (std::size_t i = 0; i < x.size(); ++i) {
        out << detail::num(x[i]) << ',' << detail::num(u[i].real()) << ',' << detail::num(u[i].imag());
        if (t) out << ',' << detail::num(*t);
        out << '\n';
    }
}

inline void write_profile(const std::string& path, const FieldProfile& p, std::optional<double> t = std::nullopt) {
    std::vector<double> x(p.grid.n);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = p.grid.x(i);
    write_profile(path, x, p.u, t);
}

/// Reads x,re_u,im_u[,t]; the x column must be uniform.
inline FieldProfile read_profile(std::istream& in, const std::string& name = "profile") {
    std::string line;
    if (!std::getline(in, line)) throw Error("io", "ParseError", name + ": empty file");
    const auto head = detail::split(line);
    if (head.size() < 3 || head[0] != "x" || head[1] != "re_u" || head[2] != "im_u")
        throw Error("io", "ParseError", name + ": expected header x,re_u,im_u");
    std::vector<double> x;
    std::vector<cplx> u;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto f = detail::split(line);
        const std::string where = name + ":" + std::to_string(lineno);
        if (f.size() != head.size()) throw Error("io", "ParseError", where + ": wrong column count");
        x.push_back(detail::parse_num(f[0], where));
        u.emplace_back(detail::parse_num(f[1], where), detail::parse_num(f[2], where));
    }
    if (x.size() < 16) throw Error("io", "ParseError", name + ": too few rows");
    FieldProfile p;
    p.grid = Grid1D{x.front(), x.back(), x.size()};
    const double h = p.grid.h();
    for (std::size_t i = 0; i < x.size(); ++i)
        if (std::abs(x[i] - p.grid.x(i)) > 1e-9 * std::max(1.0, std::abs(x[i])) + 1e-6 * h)
            throw Error("io", "ParseError", name + ": x column is not uniform");
    p.u = std::move(u);
    return p;
}

inline FieldProfile read_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("io", "IoError", "cannot open " + path);
    return read_profile(in, path);
}

// ---------------------------------------------------------------- scattering data

inline void write_scattering(const std::string& path, const ScatteringData& sd) {
    auto out = detail::open_out(path);
    out << "zeta,branch,re_a,im_a,re_b,im_b\n";
    for (int br = 0; br < 2; ++br)
        for (std::size_t i = 0; i < sd.grid.size(); ++i)
            out << detail::num(sd.grid.zeta[i]) << ',' << ScatteringData::branch_sign(br) << ','
                << detail::num(sd.a[br][i].real()) << ',' << detail::num(sd.a[br][i].imag()) << ','
                << detail::num(sd.b[br][i].real()) << ',' << detail::num(sd.b[br][i].imag()) << '\n';
}

inline json discrete_json(const ScatteringData& sd) {
    return json{{"lambda0", sd.lambda0},
                {"nu0", sd.nu0},
                {"re_b0", sd.b0.real()},
                {"im_b0", sd.b0.imag()},
                {"re_aprime", sd.a_prime0.real()},
                {"im_aprime", sd.a_prime0.imag()},
                {"mu0", sd.mu0}};
}

inline void write_discrete(const std::string& path, const ScatteringData& sd) {
    detail::write_json(path, discrete_json(sd));
}

/// Reads a scattering CSV and its discrete-data sidecar.
inline ScatteringData read_scattering(const std::string& csv_path, const std::string& json_path) {
    std::ifstream in(csv_path);
    if (!in) throw Error("io", "IoError", "cannot open " + csv_path);
    std::string line;
    std::getline(in, line);
    if (detail::split(line) != std::vector<std::string>{"zeta", "branch", "re_a", "im_a", "re_b", "im_b"})
        throw Error("io", "ParseError", csv_path + ": expected header zeta,branch,re_a,im_a,re_b,im_b");
    ScatteringData sd;
    std::array<std::vector<double>, 2> z;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto f = detail::split(line);
        const std::string where = csv_path + ":" + std::to_string(lineno);
        if (f.size() != 6) throw Error("io", "ParseError", where + ": wrong column count");
        const int br = f[1] == "1" ? 0 : f[1] == "-1" ? 1 : -1;
        if (br < 0) throw Error("io", "ParseError", where + ": branch must be 1 or -1");
        z[br].push_back(detail::parse_num(f[0], where));
        sd.a[br].emplace_back(detail::parse_num(f[2], where), detail::parse_num(f[3], where));
        sd.b[br].emplace_back(detail::parse_num(f[4], where), detail::parse_num(f[5], where));
    }
    if (z[0] != z[1] || z[0].empty()) throw Error("io", "ParseError", csv_path + ": branches must share one zeta grid");
    sd.grid.zeta = z[0];
    sd.grid.zeta_max = z[0].back();
    std::ifstream jin(json_path);
    if (!jin) throw Error("io", "IoError", "cannot open " + json_path);
    json j;
    try {
        jin >> j;
        sd.lambda0 = j.at("lambda0").get<double>();
        sd.nu0 = j.at("nu0").get<double>();
        sd.b0 = cplx(j.at("re_b0").get<double>(), j.at("im_b0").get<double>());
        sd.a_prime0 = cplx(j.at("re_aprime").get<double>(), j.at("im_aprime").get<double>());
        sd.mu0 = j.at("mu0").get<double>();
    } catch (const json::exception& e) {
        throw Error("io", "ParseError", json_path + ": " + e.what());
    }
    sd.has_discrete = true;
    return sd;
}

// ---------------------------------------------------------------- kernels

inline void write_kernels(const std::string& path, const MarchenkoKernels& K) {
    auto out = detail::open_out(path);
    out << "z,F1,F2,F2prime\n";
    for (std::size_t k = 0; k < K.lattice.n; ++k)
        out << detail::num(K.lattice.z(k)) << ',' << detail::num(K.F1[k]) << ',' << detail::num(K.F2[k]) << ','
            << detail::num(K.F2prime[k]) << '\n';
}

/// rows (x, p) with y = x + 2p; p = j dy / 2
inline void write_kernel_field(const std::string& path, const KernelField& f) {
    auto out = detail::open_out(path);
    out << "x,p,re_psi11,im_psi11,re_psi12,im_psi12\n";
    for (const auto& st : f.stations)
        for (std::size_t j = 0; j < st.psi11.size(); ++j)
            out << detail::num(st.x) << ',' << detail::num(0.5 * f.dy * double(j)) << ','
                << detail::num(st.psi11[j].real()) << ',' << detail::num(st.psi11[j].imag()) << ','
                << detail::num(st.psi12[j].real()) << ',' << detail::num(st.psi12[j].imag()) << '\n';
}

// ---------------------------------------------------------------- pde

inline void write_energy(const std::string& path, const PDETrajectory& tr) {
    auto out = detail::open_out(path);
    out << "t,H\n";
    for (const auto& [t, H] : tr.energy_log) out << detail::num(t) << ',' << detail::num(H) << '\n';
}

// ---------------------------------------------------------------- reports

inline void write_stability_csv(const std::string& path, const StabilityReport& r) {
    auto out = detail::open_out(path);
    out << "t,shift,sup_distance,best_shift,best_sup_distance,energy_distance,oracle_linf,oracle_l2\n";
    for (const auto& w : r.rows) {
        out << detail::num(w.t) << ',' << detail::num(w.shift) << ',' << detail::num(w.sup_distance) << ','
            << detail::num(w.best_shift) << ',' << detail::num(w.best_sup_distance) << ','
            << detail::num(w.energy_distance) << ',';
        if (w.has_oracle) out << detail::num(w.oracle_linf) << ',' << detail::num(w.oracle_l2);
        else out << ',';
        out << '\n';
    }
}

inline json config_json(const ExperimentConfig& c) {
    return json{{"epsilon", c.epsilon}, {"family", c.family},     {"seed", c.seed},         {"x_max", c.x_max},
                {"h", c.h},             {"zeta_max", c.zeta_max}, {"n_zeta", c.n_zeta},     {"p_max", c.p_max},
                {"n_p", c.n_p},         {"times", c.times},       {"dt", c.dt},             {"pde", c.pde},
                {"left", c.left},       {"core", c.core},         {"core_step", c.core_step}, {"tail_step", c.tail_step}};
}

inline json stability_json(const StabilityReport& r) {
    json rows = json::array();
    for (const auto& w : r.rows) {
        json row{{"t", w.t},
                 {"shift", w.shift},
                 {"sup_distance", w.sup_distance},
                 {"best_shift", w.best_shift},
                 {"best_sup_distance", w.best_sup_distance},
                 {"energy_distance", w.energy_distance},
                 {"max_cond", w.max_cond}};
        if (w.has_oracle) {
            row["oracle_linf"] = w.oracle_linf;
            row["oracle_l2"] = w.oracle_l2;
        }
        rows.push_back(row);
    }
    return json{{"config", config_json(r.config)},
                {"lambda0", r.lambda0},
                {"nu0", r.nu0},
                {"re_b0", r.b0.real()},
                {"im_b0", r.b0.imag()},
                {"mu0", r.mu0},
                {"window", r.window},
                {"core", r.core},
                {"n_stations", r.n_stations},
                {"rows", rows},
                {"max_sup_distance", r.max_sup_distance},
                {"empirical_c", r.empirical_c},
                {"horizon", r.horizon_note}};
}

inline json diagnostics_json(const DiagnosticRecord& d) {
    return json{{"epsilon", d.epsilon},
                {"sigma_plus", d.zero_limit.sigma_plus},
                {"sigma_minus", d.zero_limit.sigma_minus},
                {"zeta_a_at_min", d.zero_limit.zeta_a_min},
                {"zeta_b_at_min", d.zero_limit.zeta_b_min},
                {"zero_count", d.zero_count},
                {"min_abs_a_gap", d.min_abs_a_gap},
                {"lambda0", d.lambda0},
                {"edge_min_abs_a", d.edge_min_abs_a},
                {"edge_nu", d.edge_nu},
                {"b_decay_c", d.b_decay_c},
                {"b_weighted_max", d.b_weighted_max},
                {"kernel_tail_m", d.kernel_tail_m},
                {"kernel_tail", d.kernel_tail},
                {"plancherel_f1", d.plancherel_f1},
                {"plancherel_c", d.plancherel_c},
                {"norm_violation", d.norm_violation}};
}

using detail::write_json;

}  // namespace gpist::io
