// Command-line driver: phase diagrams, line scans, exponent fits,
// semiclassical trajectories and basins, and finite-eta quantum steady
// states with Wigner diagnostics.
//
// Exit codes: 0 success, 2 config error, 3 degenerate fit, 4 quantum-solver
// failure.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <random>

#include "aqrm/fluctuations.hpp"
#include "aqrm/io.hpp"
#include "aqrm/lindblad.hpp"
#include "aqrm/meanfield.hpp"
#include "aqrm/params.hpp"
#include "aqrm/semiclassical.hpp"
#include "aqrm/util.hpp"
#include "aqrm/wigner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace aqrm;

namespace {

struct GlobalArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

json require_config(const GlobalArgs& g) {
    if (g.config_path.empty()) throw ConfigError("--config is required");
    return load_json(g.config_path);
}

std::string out_path(const GlobalArgs& g, const std::string& name) {
    fs::create_directories(g.out_dir);
    return (fs::path(g.out_dir) / name).string();
}

double get_num(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing key: ") + key);
    if (!j.at(key).is_number())
        throw ConfigError(std::string("key is not a number: ") + key);
    return j.at(key).get<double>();
}

struct AxisSpec {
    double min, max;
    int n;
};

AxisSpec axis_from_json(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing axis: ") + key);
    const auto& a = j.at(key);
    AxisSpec s{get_num(a, "min"), get_num(a, "max"), int(get_num(a, "n"))};
    if (s.n < 2) throw ConfigError("axis resolution must be >= 2");
    if (!(s.max > s.min)) throw ConfigError("axis range must be nonempty");
    return s;
}

double axis_at(const AxisSpec& a, int i) {
    return a.min + (a.max - a.min) * i / (a.n - 1);
}

CouplingLine line_from_json(const json& j, double kappa_bar) {
    if (!j.contains("line")) throw ConfigError("missing key: line");
    const auto& l = j.at("line");
    CouplingLine ln;
    if (l.contains("slope") && l.at("slope").is_string()) {
        auto [emin, emax] = epsilon_bounds(kappa_bar);
        const std::string s = l.at("slope").get<std::string>();
        if (s == "epsilon_min") ln.slope = emin;
        else if (s == "epsilon_max") ln.slope = emax;
        else throw ConfigError("line.slope string must be epsilon_min or epsilon_max");
    } else {
        ln.slope = get_num(l, "slope");
    }
    ln.intercept = l.value("intercept", 0.0);
    return ln;
}

// ------------------------------------------------------------------ phase-diagram

int cmd_phase_diagram(const GlobalArgs& g) {
    const json cfg = require_config(g);
    const double kb = get_num(cfg, "kappa_bar");
    const AxisSpec ar = axis_from_json(cfg, "g_r"), ac = axis_from_json(cfg, "g_cr");
    const std::string hash = config_hash(cfg, g.seed);

    struct Row {
        PhasePoint pt;
        double s_z_sp, x_bar, y_bar;
    };
    std::vector<Row> rows(std::size_t(ar.n) * ac.n);
    parallel_for(rows.size(), g.threads, [&](std::size_t idx) {
        const int i = int(idx / ac.n), j = int(idx % ac.n);
        const double gr = axis_at(ar, i), gcr = axis_at(ac, j);
        Row r;
        r.pt = classify_phase(gr, gcr, kb);
        r.s_z_sp = r.x_bar = r.y_bar = std::numeric_limits<double>::quiet_NaN();
        if (gr > 0.0) {
            if (auto sp = sp_solution(gr, gcr / gr, kb, +1)) {
                r.s_z_sp = sp->s_z;
                r.x_bar = sp->alpha_bar.real();
                r.y_bar = sp->alpha_bar.imag();
            }
        }
        rows[idx] = r;
    });

    CsvWriter csv(out_path(g, "phase_diagram.csv"), hash,
                  {"g_r", "g_cr", "kappa_bar", "phase", "s_z_sp", "x_bar",
                   "y_bar", "A_np", "A_sp"});
    for (const auto& r : rows) {
        csv.row({format_double(r.pt.g_r), format_double(r.pt.g_cr),
                 format_double(kb), to_string(r.pt.phase), format_double(r.s_z_sp),
                 format_double(r.x_bar), format_double(r.y_bar),
                 format_double(r.pt.A_np), format_double(r.pt.A_sp)});
    }

    // NP boundary polyline: linear interpolation of A_np sign changes on
    // grid edges
    auto a_np_at = [&](int i, int j) {
        const double gr = axis_at(ar, i), gcr = axis_at(ac, j);
        const double gs = std::max(gr, gcr);
        return np_stability_A(gs, gs > 0 ? std::min(gr, gcr) / gs : 0.0, kb);
    };
    CsvWriter bcsv(out_path(g, "boundary.csv"), hash, {"g_r", "g_cr"});
    for (int i = 0; i < ar.n; ++i)
        for (int j = 0; j < ac.n; ++j) {
            const double a0 = a_np_at(i, j);
            if (i + 1 < ar.n) {
                const double a1 = a_np_at(i + 1, j);
                if ((a0 < 0) != (a1 < 0)) {
                    const double t = a0 / (a0 - a1);
                    bcsv.row_doubles({axis_at(ar, i) +
                                          t * (axis_at(ar, i + 1) - axis_at(ar, i)),
                                      axis_at(ac, j)});
                }
            }
            if (j + 1 < ac.n) {
                const double a1 = a_np_at(i, j + 1);
                if ((a0 < 0) != (a1 < 0)) {
                    const double t = a0 / (a0 - a1);
                    bcsv.row_doubles({axis_at(ar, i),
                                      axis_at(ac, j) +
                                          t * (axis_at(ac, j + 1) - axis_at(ac, j))});
                }
            }
        }

    auto tps = tricritical_points(kb);
    json tj = {{"config_hash", hash},
               {"kappa_bar", kb},
               {"tricritical", json::array({{{"g_r", tps[0].first},
                                             {"g_cr", tps[0].second}},
                                            {{"g_r", tps[1].first},
                                             {"g_cr", tps[1].second}}})}};
    std::ofstream(out_path(g, "tricritical.json")) << tj.dump(2) << "\n";
    return 0;
}

// ------------------------------------------------------------------ line-scan

int cmd_line_scan(const GlobalArgs& g) {
    const json cfg = require_config(g);
    const double kb = get_num(cfg, "kappa_bar");
    const CouplingLine line = line_from_json(cfg, kb);
    const AxisSpec ag = axis_from_json(cfg, "g");
    const std::string hash = config_hash(cfg, g.seed);

    struct Row {
        double g, gcr;
        PhaseLabel phase;
        double amp_np, amp_sp;
        complexd l_np, l_sp;
        double n_np, n_sp;
    };
    std::vector<Row> rows(ag.n);
    parallel_for(rows.size(), g.threads, [&](std::size_t idx) {
        const double gv = axis_at(ag, int(idx));
        const double gcr = line.g_cr(gv);
        Row r{};
        r.g = gv;
        r.gcr = gcr;
        const auto pt = classify_phase(gv, gcr, kb);
        r.phase = pt.phase;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        r.amp_np = pt.A_np > 0 ? 0.0 : nan;
        r.amp_sp = nan;
        r.n_np = nan;
        r.n_sp = nan;
        const double gs = std::max(gv, gcr);
        const double eps_sym = gs > 0 ? std::min(gv, gcr) / gs : 0.0;
        r.l_np = np_eigenvalues(gs, eps_sym, kb).first;
        r.l_sp = complexd(nan, nan);
        if (pt.A_np > 0) {
            try {
                r.n_np = np_excitation(gs, eps_sym, kb);
            } catch (const BoundaryDivergence&) {
            }
        }
        if (gv > 0.0) {
            if (auto sp = sp_solution(gv, gcr / gv, kb, +1)) {
                r.amp_sp = std::abs(sp->alpha_bar);
                const auto c = sp_coefficients(gv, gcr / gv, kb, +1);
                r.l_sp = sp_eigenvalues(c, kb).first;
                if (sp->stable) {
                    try {
                        r.n_sp = sp_excitation(c, kb);
                    } catch (const BoundaryDivergence&) {
                    }
                }
            }
        }
        rows[idx] = r;
    });

    CsvWriter csv(out_path(g, "line_scan.csv"), hash,
                  {"g", "g_cr", "phase", "amp_np", "amp_sp", "re_l_np_plus",
                   "im_l_np_plus", "re_l_sp_plus", "im_l_sp_plus", "n_np", "n_sp"});
    for (const auto& r : rows)
        csv.row({format_double(r.g), format_double(r.gcr), to_string(r.phase),
                 format_double(r.amp_np), format_double(r.amp_sp),
                 format_double(r.l_np.real()), format_double(r.l_np.imag()),
                 format_double(r.l_sp.real()), format_double(r.l_sp.imag()),
                 format_double(r.n_np), format_double(r.n_sp)});

    // per-phase fluctuation sweep: one row per stable phase at each g
    CsvWriter fcsv(out_path(g, "fluctuation_sweep.csv"), hash,
                   {"g", "phase", "re_l_plus", "im_l_plus", "adr", "n_excitation"});
    for (const auto& r : rows) {
        if (!std::isnan(r.n_np))
            fcsv.row({format_double(r.g), "NP", format_double(r.l_np.real()),
                      format_double(r.l_np.imag()), format_double(-r.l_np.real()),
                      format_double(r.n_np)});
        if (!std::isnan(r.n_sp))
            fcsv.row({format_double(r.g), "SP", format_double(r.l_sp.real()),
                      format_double(r.l_sp.imag()), format_double(-r.l_sp.real()),
                      format_double(r.n_sp)});
    }
    return 0;
}

// ------------------------------------------------------------------ exponents

struct BoundaryLocation {
    double g_c;
};

double bisect_on_line(const std::function<double(double)>& f, double a, double b) {
    double fa = f(a);
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b), fm = f(m);
        if ((fa < 0) == (fm < 0)) a = m, fa = fm;
        else b = m;
    }
    return 0.5 * (a + b);
}

int cmd_exponents(const GlobalArgs& g) {
    const json cfg = require_config(g);
    const double kb = get_num(cfg, "kappa_bar");
    const std::string hash = config_hash(cfg, g.seed);
    const json wj = cfg.value("window", json{{"min", 1e-4}, {"max", 1e-2}, {"n", 16}});
    const double wmin = get_num(wj, "min"), wmax = get_num(wj, "max");
    const int wn = int(get_num(wj, "n"));
    if (!cfg.contains("fits") || !cfg.at("fits").is_array())
        throw ConfigError("missing key: fits (array)");

    json report = json::array();
    for (const auto& fit : cfg.at("fits")) {
        const CouplingLine line = line_from_json(fit, kb);
        const std::string boundary = fit.value("boundary", "gc_minus");
        const std::string side = fit.value("side", "below");
        const std::string quantity = fit.value("quantity", "adr");
        const std::string phase_s = fit.value("phase", "np");
        const double lo = fit.value("g_lo", 0.05), hi = fit.value("g_hi", 4.0);
        const Phase phase = phase_s == "sp" ? Phase::sp : Phase::np;

        auto a_np_line = [&](double gv) {
            const double gcr = line.g_cr(gv);
            const double gs = std::max(gv, gcr);
            return np_stability_A(gs, gs > 0 ? std::min(gv, gcr) / gs : 0.0, kb);
        };
        auto sp_exists_line = [&](double gv) {
            return sp_spin_z(gv, line.epsilon(gv), kb).has_value() ? 1.0 : -1.0;
        };

        double g_c;
        if (boundary == "gc_minus" || boundary == "gc_plus") {
            // first/second root of A_np along the line
            std::vector<double> roots;
            double prev = lo, fprev = a_np_line(lo);
            const int scan = 4096;
            for (int i = 1; i <= scan && roots.size() < 2; ++i) {
                const double gv = lo + (hi - lo) * i / scan;
                const double f = a_np_line(gv);
                if ((fprev < 0) != (f < 0)) roots.push_back(bisect_on_line(a_np_line, prev, gv));
                prev = gv;
                fprev = f;
            }
            if (boundary == "gc_minus" && roots.size() >= 1) g_c = roots[0];
            else if (boundary == "gc_plus" && roots.size() >= 2) g_c = roots[1];
            else throw ConfigError("boundary root not found on the line");
        } else if (boundary == "g_eps_min") {
            double prev = lo, fprev = sp_exists_line(lo);
            std::optional<double> root;
            const int scan = 4096;
            for (int i = 1; i <= scan && !root; ++i) {
                const double gv = lo + (hi - lo) * i / scan;
                const double f = sp_exists_line(gv);
                if (fprev > 0 && f < 0) root = bisect_on_line(sp_exists_line, prev, gv);
                prev = gv;
                fprev = f;
            }
            if (!root) throw ConfigError("SP existence boundary not found on the line");
            g_c = *root;
        } else if (boundary == "tangent_touch") {
            g_c = adr_touch_point(line, kb, lo, hi);
        } else {
            throw ConfigError("unknown boundary: " + boundary);
        }

        auto value_at = [&](double gv) -> double {
            const double gcr = line.g_cr(gv);
            if (quantity == "adr") return adr(gv, gcr, kb, phase);
            if (phase == Phase::np) {
                const double gs = std::max(gv, gcr);
                return np_excitation(gs, gs > 0 ? std::min(gv, gcr) / gs : 0.0, kb);
            }
            return sp_excitation(sp_coefficients(gv, gcr / gv, kb), kb);
        };
        const bool diverging = quantity != "adr";

        auto run_side = [&](int dir) {
            std::vector<std::pair<double, double>> samples;
            for (int i = 0; i < wn; ++i) {
                const double d =
                    wmin * std::pow(wmax / wmin, double(i) / (wn - 1));
                samples.push_back({g_c + dir * d, value_at(g_c + dir * d)});
            }
            return fit_exponent(samples, g_c, diverging);
        };
        json entry = {{"name", fit.value("name", boundary)},
                      {"boundary", boundary},
                      {"g_c", g_c},
                      {"side", side},
                      {"quantity", quantity},
                      {"phase", phase_s},
                      {"window", {{"min", wmin}, {"max", wmax}, {"n", wn}}}};
        if (side == "below" || side == "both") {
            auto f = run_side(-1);
            entry["nu_below"] = f.nu;
            entry["r2_below"] = f.r_squared;
            if (side == "below") {
                entry["nu"] = f.nu;
                entry["r2"] = f.r_squared;
            }
        }
        if (side == "above" || side == "both") {
            auto f = run_side(+1);
            entry["nu_above"] = f.nu;
            entry["r2_above"] = f.r_squared;
            if (side == "above") {
                entry["nu"] = f.nu;
                entry["r2"] = f.r_squared;
            }
        }
        report.push_back(entry);
    }
    json out = {{"config_hash", hash}, {"kappa_bar", kb}, {"fits", report}};
    std::ofstream(out_path(g, "exponents.json")) << out.dump(2) << "\n";
    return 0;
}

// ------------------------------------------------------------------ trajectory / basin

TrajectoryControls controls_from_json(const json& cfg) {
    TrajectoryControls c;
    c.t_max = cfg.value("t_max", 200.0);
    c.rtol = cfg.value("rtol", 1e-9);
    c.atol = cfg.value("atol", 1e-12);
    c.sample_dt = cfg.value("sample_dt", 0.05);
    return c;
}

int cmd_trajectory(const GlobalArgs& g, double t_max_cli, double rtol_cli,
                   double atol_cli, bool adiabatic_cli, double eta_cli,
                   int sz_sign_cli) {
    json cfg = require_config(g);
    const double kb = get_num(cfg, "kappa_bar");
    const double gr = get_num(cfg, "g_r"), gcr = get_num(cfg, "g_cr");
    if (t_max_cli > 0) cfg["t_max"] = t_max_cli;
    if (rtol_cli > 0) cfg["rtol"] = rtol_cli;
    if (atol_cli > 0) cfg["atol"] = atol_cli;
    if (adiabatic_cli) cfg["adiabatic"] = true;
    if (eta_cli > 0) cfg["eta"] = eta_cli;
    if (sz_sign_cli != 0) cfg["sz_sign"] = sz_sign_cli;
    TrajectoryControls c = controls_from_json(cfg);
    const bool adiabatic = cfg.value("adiabatic", false);
    const double eta = cfg.value("eta", 1e4);
    const int sz_sign = cfg.value("sz_sign", -1);
    const std::string hash = config_hash(cfg, g.seed);

    std::vector<complexd> initials;
    if (cfg.contains("initial")) {
        for (const auto& a : cfg.at("initial"))
            initials.emplace_back(get_num(a, "re"), get_num(a, "im"));
    }
    if (cfg.contains("n_random")) {
        std::mt19937_64 rng(g.seed);
        std::uniform_real_distribution<double> u(-0.5, 0.5);
        for (int i = 0; i < int(get_num(cfg, "n_random")); ++i) {
            const double re = u(rng), im = u(rng);
            initials.emplace_back(re, im);
        }
    }
    if (initials.empty()) throw ConfigError("no initial conditions given");

    std::vector<Trajectory> trs(initials.size());
    parallel_for(initials.size(), g.threads, [&](std::size_t i) {
        trs[i] = adiabatic
                     ? integrate_adiabatic(initials[i], gr, gcr, kb, c, sz_sign)
                     : integrate_full(initials[i], gr, gcr, kb, eta, c, sz_sign);
    });

    CsvWriter sum(out_path(g, "trajectory_summary.csv"), hash,
                  {"index", "re_alpha0", "im_alpha0", "attractor"});
    for (std::size_t i = 0; i < trs.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "trajectory_%03zu.csv", i);
        CsvWriter csv(out_path(g, name), hash,
                      {"t_bar", "re_alpha", "im_alpha", "s_x", "s_y", "s_z"});
        for (const auto& s : trs[i].samples)
            csv.row_doubles({s.t_bar, s.alpha_bar.real(), s.alpha_bar.imag(),
                             s.s_x, s.s_y, s.s_z});
        sum.row({std::to_string(i), format_double(initials[i].real()),
                 format_double(initials[i].imag()), to_string(trs[i].attractor)});
    }
    return 0;
}

int cmd_basin(const GlobalArgs& g) {
    const json cfg = require_config(g);
    const double kb = get_num(cfg, "kappa_bar");
    const double gr = get_num(cfg, "g_r"), gcr = get_num(cfg, "g_cr");
    TrajectoryControls c = controls_from_json(cfg);
    const bool adiabatic = cfg.value("adiabatic", true);
    const double eta = cfg.value("eta", 1e4);
    const std::string hash = config_hash(cfg, g.seed);

    std::vector<complexd> initials;
    if (cfg.contains("grid")) {
        const auto& gj = cfg.at("grid");
        const int n = int(get_num(gj, "n"));
        if (n < 2) throw ConfigError("basin grid resolution must be >= 2");
        const double rmin = get_num(gj, "re_min"), rmax = get_num(gj, "re_max");
        const double imin = get_num(gj, "im_min"), imax = get_num(gj, "im_max");
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                initials.emplace_back(rmin + (rmax - rmin) * i / (n - 1),
                                      imin + (imax - imin) * j / (n - 1));
    } else if (cfg.contains("n_random")) {
        std::mt19937_64 rng(g.seed);
        std::uniform_real_distribution<double> u(-0.5, 0.5);
        for (int i = 0; i < int(get_num(cfg, "n_random")); ++i) {
            const double re = u(rng), im = u(rng);
            initials.emplace_back(re, im);
        }
    } else {
        throw ConfigError("basin needs either grid or n_random");
    }

    std::vector<Attractor> at(initials.size());
    parallel_for(initials.size(), g.threads, [&](std::size_t i) {
        auto tr = adiabatic ? integrate_adiabatic(initials[i], gr, gcr, kb, c)
                            : integrate_full(initials[i], gr, gcr, kb, eta, c);
        at[i] = tr.attractor;
    });
    CsvWriter csv(out_path(g, "basin.csv"), hash,
                  {"re_alpha0", "im_alpha0", "attractor"});
    for (std::size_t i = 0; i < initials.size(); ++i)
        csv.row({format_double(initials[i].real()),
                 format_double(initials[i].imag()), to_string(at[i])});
    return 0;
}

// ------------------------------------------------------------------ quantum

int cmd_quantum(const GlobalArgs& g) {
    const json cfg = require_config(g);
    if (!cfg.contains("params")) throw ConfigError("missing key: params");
    const ModelParams p = params_from_json(cfg.at("params"));
    const int N = int(cfg.value("dim_fock", 120.0));
    if (N < 2) throw ConfigError("dim_fock must be >= 2");
    const std::string hash = config_hash(cfg, g.seed);

    auto H = build_hamiltonian(p, N);
    auto L = build_liouvillian(H, p.kappa, p.gamma_spin);
    SteadyStateOptions opt;
    opt.check_gap = cfg.value("gap", true);
    opt.sigma = cfg.value("sigma", 0.05 * p.omega0);
    auto ss = steady_state(L, N, opt);

    auto ops = product_operators(N);
    const double n_expect = expectation(ss.rho, ops.n_phot).real();

    json dj = {{"trace", ss.rho.trace()},
               {"min_eig", ss.min_eigenvalue},
               {"top_fock_pop", ss.top_fock_pop},
               {"n_expect", n_expect},
               {"gap_estimate", ss.gap_estimate},
               {"config_hash", hash}};
    std::ofstream(out_path(g, "quantum_diagnostics.json")) << dj.dump(2) << "\n";

    const json wj = cfg.value("wigner", json::object());
    const int points = int(wj.value("points", 141.0));
    const double pad = wj.value("pad", 3.5);
    const std::string project = wj.value("project", "down");
    Eigen::MatrixXcd rosc = project == "trace" ? partial_trace_spin(ss.rho)
                                               : project_spin_down(ss.rho);
    auto wg = wigner_auto(rosc, points, pad, g.threads);

    if (cfg.value("binary_grid", false)) {
        std::ofstream bin(out_path(g, "wigner.bin"), std::ios::binary);
        for (Eigen::Index i = 0; i < wg.values.rows(); ++i)
            for (Eigen::Index j = 0; j < wg.values.cols(); ++j) {
                const double v = wg.values(i, j);
                bin.write(reinterpret_cast<const char*>(&v), sizeof(v));
            }
        json hj = {{"re_min", wg.re_axis[0]},
                   {"re_max", wg.re_axis[wg.re_axis.size() - 1]},
                   {"im_min", wg.im_axis[0]},
                   {"im_max", wg.im_axis[wg.im_axis.size() - 1]},
                   {"nx", wg.re_axis.size()},
                   {"ny", wg.im_axis.size()},
                   {"config_hash", hash}};
        std::ofstream(out_path(g, "wigner_grid.json")) << hj.dump(2) << "\n";
    } else {
        CsvWriter csv(out_path(g, "wigner.csv"), hash, {"re_alpha", "im_alpha", "w"});
        for (Eigen::Index i = 0; i < wg.values.rows(); ++i)
            for (Eigen::Index j = 0; j < wg.values.cols(); ++j)
                csv.row_doubles({wg.re_axis[j], wg.im_axis[i], wg.values(i, j)});
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anisotropic open quantum Rabi model toolkit"};
    app.require_subcommand(1);
    GlobalArgs g;
    app.add_option("--config", g.config_path, "JSON run configuration");
    app.add_option("--out", g.out_dir, "output directory");
    app.add_option("--seed", g.seed, "RNG seed for sampled initial conditions");
    app.add_option("--threads", g.threads, "worker threads for sweeps");

    auto* pd = app.add_subcommand("phase-diagram", "phase grid + tricritical points");
    auto* ls = app.add_subcommand("line-scan", "order parameter and spectra along a line");
    auto* ex = app.add_subcommand("exponents", "critical-exponent fits");
    auto* tj = app.add_subcommand("trajectory", "semiclassical trajectories");
    auto* bs = app.add_subcommand("basin", "basin map over initial conditions");
    auto* qt = app.add_subcommand("quantum", "finite-eta steady state + Wigner");

    double t_max = -1, rtol = -1, atol = -1, eta = -1;
    bool adiabatic = false;
    int sz_sign = 0;
    tj->add_option("--t-max", t_max, "integration horizon");
    tj->add_option("--rtol", rtol, "relative tolerance");
    tj->add_option("--atol", atol, "absolute tolerance");
    tj->add_flag("--adiabatic", adiabatic, "use the adiabatic cavity equation");
    tj->add_option("--eta", eta, "frequency ratio for the full system");
    tj->add_option("--sz-sign", sz_sign, "spin branch of the initial condition");

    try {
        app.parse(argc, argv);
        if (pd->parsed()) return cmd_phase_diagram(g);
        if (ls->parsed()) return cmd_line_scan(g);
        if (ex->parsed()) return cmd_exponents(g);
        if (tj->parsed())
            return cmd_trajectory(g, t_max, rtol, atol, adiabatic, eta, sz_sign);
        if (bs->parsed()) return cmd_basin(g);
        if (qt->parsed()) return cmd_quantum(g);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidParams& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const FitDegenerate& e) {
        std::cerr << "fit error: " << e.what() << "\n";
        return 3;
    } catch (const DegenerateSteadyState& e) {
        std::cerr << "quantum solver error: " << e.what() << "\n";
        return 4;
    } catch (const TruncationUnsafe& e) {
        std::cerr << "quantum solver error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
