// dptom command-line front end. Talks to the core exclusively through the
// shared-library C API; results are written as CSV or JSON artifacts
// suitable for plotting.

#include "dptom/dptom.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <unistd.h>

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using json = nlohmann::ordered_json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numeric = 3;

struct CliError : std::runtime_error {
    int code;
    CliError(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

[[noreturn]] void fail_config(const std::string& msg) { throw CliError(exit_config, msg); }

void check(dptom_status st, const char* kernel) {
    if (st == DPTOM_OK) return;
    std::ostringstream os;
    os << kernel << " failed (" << dptom_status_name(st) << "): " << dptom_last_error();
    throw CliError(st == DPTOM_ERR_INVALID_ARGUMENT ? exit_config : exit_numeric, os.str());
}

// Shortest round-trip float formatting; deterministic across runs.
std::string fmt(double v) {
    std::array<char, 40> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), end);
}

struct Range {
    double lo = 0.0, hi = 0.0;
    int count = 0;
};

// "min:max:count" sweep syntax.
Range parse_range(const std::string& text, const char* what) {
    Range r;
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        fail_config(std::string(what) + ": expected min:max:count, got '" + text + "'");
    try {
        r.lo = std::stod(text.substr(0, c1));
        r.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        r.count = std::stoi(text.substr(c2 + 1));
    } catch (const std::exception&) {
        fail_config(std::string(what) + ": malformed range '" + text + "'");
    }
    if (r.count < 2) fail_config(std::string(what) + ": count must be >= 2");
    if (!(r.hi > r.lo)) fail_config(std::string(what) + ": need max > min");
    return r;
}

std::vector<double> parse_doubles(const std::string& text, std::size_t want, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ','))
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            fail_config(std::string(what) + ": bad number '" + tok + "'");
        }
    if (out.size() != want)
        fail_config(std::string(what) + ": expected " + std::to_string(want) + " values");
    return out;
}

// Atomic write: stage into a temp file in the same directory, then rename.
void write_file(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::fwrite(content.data(), 1, content.size(), stdout);
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp-" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw CliError(exit_config, "cannot open output file " + tmp.string());
        out.write(content.data(), std::streamsize(content.size()));
        if (!out) throw CliError(exit_numeric, "short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw CliError(exit_numeric, "rename to " + target.string() + " failed: " + ec.message());
    }
}

std::string table_to_csv(const dptom_table* t) {
    std::string out;
    const std::size_t cols = dptom_table_cols(t);
    for (std::size_t c = 0; c < cols; ++c) {
        if (c) out += ',';
        out += dptom_table_column_name(t, c);
    }
    out += '\n';
    for (std::size_t r = 0; r < dptom_table_rows(t); ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (c) out += ',';
            out += fmt(dptom_table_get(t, r, c));
        }
        out += '\n';
    }
    return out;
}

// ------------------------------------------------------------------
// Shared option plumbing
// ------------------------------------------------------------------

struct CommonOpts {
    double kappa = 0.0;
    double gamma = 0.0;
    double omega_m = 1.0;
    double eps_stab = 0.0; // 0 = library default
    double eps_band = 0.0;
    std::string out;
};

struct PointOpts {
    std::optional<double> dtilde, g, delta, etilde;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    static std::string config_sink;
    cmd->add_option("--config", config_sink,
                    "flat key=value file mirroring this subcommand's flags");
    cmd->add_option("--kappa", opts.kappa, "cavity amplitude damping rate")->required();
    cmd->add_option("--gamma", opts.gamma, "mechanical damping rate");
    cmd->add_option("--omega-m", opts.omega_m, "mechanical frequency (the unit)");
    cmd->add_option("--eps-stab", opts.eps_stab, "strict-stability threshold");
    cmd->add_option("--eps-band", opts.eps_band, "marginality band on |Re lambda_1|");
    cmd->add_option("--out,-o", opts.out, "output path ('-' or empty = stdout)");
}

void add_point(CLI::App* cmd, PointOpts& p) {
    cmd->add_option("--dtilde", p.dtilde, "effective detuning");
    cmd->add_option("--g", p.g, "effective coupling");
    cmd->add_option("--delta", p.delta, "bare detuning");
    cmd->add_option("--etilde", p.etilde, "rescaled drive");
}

dptom_tolerances tolerances_of(const CommonOpts& c) {
    dptom_tolerances tol;
    dptom_tolerances_default(&tol);
    if (c.eps_stab > 0.0) tol.eps_stab = c.eps_stab;
    if (c.eps_band > 0.0) tol.eps_band = c.eps_band;
    return tol;
}

dptom_params resolve_point(const CommonOpts& c, const PointOpts& p) {
    const bool eff = p.dtilde.has_value() || p.g.has_value();
    const bool bare = p.delta.has_value() || p.etilde.has_value();
    if (eff == bare)
        fail_config("give exactly one coordinate pair: --dtilde/--g or --delta/--etilde");
    dptom_params out;
    if (eff) {
        if (!p.dtilde || !p.g) fail_config("--dtilde and --g must be given together");
        check(dptom_params_from_effective(*p.dtilde, *p.g, c.kappa, c.gamma, c.omega_m, &out),
              "params_from_effective");
    } else {
        if (!p.delta || !p.etilde) fail_config("--delta and --etilde must be given together");
        check(dptom_params_from_bare(*p.delta, *p.etilde, c.kappa, c.gamma, c.omega_m, &out),
              "params_from_bare");
    }
    return out;
}

int resolve_threads(const CLI::Option* flag, int flag_value) {
    if (flag && flag->count() > 0) return flag_value;
    if (const char* env = std::getenv("DPTOM_THREADS")) {
        try {
            return std::max(1, std::stoi(env));
        } catch (const std::exception&) {
            fail_config("DPTOM_THREADS is not an integer");
        }
    }
    return 0; // library picks hardware concurrency
}

json params_json(const dptom_params& p) {
    return json{{"kappa", p.kappa},   {"gamma", p.gamma_m},   {"omega_m", p.omega_m},
                {"delta", p.delta},   {"e_tilde", p.e_tilde}, {"dtilde", p.dtilde},
                {"g_eff", p.g_eff}};
}

// Expand `--config file` by appending `--key=value` for every file entry
// whose flag is not already present on the command line; explicit flags win.
std::vector<std::string> apply_config_file(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;

    std::ifstream in(path);
    if (!in) fail_config("cannot read config file " + path);

    auto flag_present = [&](const std::string& key) {
        const std::string full = "--" + key;
        for (const std::string& a : args)
            if (a == full || a.rfind(full + "=", 0) == 0) return true;
        return false;
    };

    std::vector<std::string> out = args;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail_config(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        const auto kend = key.find_last_not_of(" \t");
        key = key.substr(0, kend == std::string::npos ? 0 : kend + 1);
        const auto vstart = value.find_first_not_of(" \t");
        value = vstart == std::string::npos ? "" : value.substr(vstart);
        if (key.empty()) fail_config(path + ":" + std::to_string(lineno) + ": empty key");
        if (!flag_present(key)) out.push_back("--" + key + "=" + value);
    }
    return out;
}

// ------------------------------------------------------------------
// Subcommands
// ------------------------------------------------------------------

int run_branches(const CommonOpts& c, const PointOpts& pt) {
    const dptom_params p = resolve_point(c, pt);
    const dptom_tolerances tol = tolerances_of(c);

    dptom_branch branches[3];
    check(dptom_branches(&p, branches), "branches");

    json doc;
    doc["params"] = params_json(p);
    doc["branches"] = json::array();
    for (const dptom_branch& b : branches) {
        json jb{{"index", b.index}, {"physical", b.physical != 0}, {"n_tilde", b.n_tilde}};
        if (b.physical) {
            jb["alpha_tilde"] = {b.alpha_re, b.alpha_im};
            jb["beta_tilde"] = {b.beta_re, b.beta_im};
            dptom_stability rep;
            check(dptom_stability_report(&p, b.index, &tol, &rep), "stability_report");
            json js{{"class", dptom_stability_class_name(dptom_stability_class(rep.cls))},
                    {"hard_margin", rep.hard_margin},
                    {"soft_margin", rep.soft_margin},
                    {"gap_real", rep.gap_real},
                    {"gap_imag", rep.gap_imag},
                    {"margins_consistent", rep.margins_consistent != 0}};
            json eigs = json::array();
            for (int k = 0; k < 4; ++k) eigs.push_back({rep.eig_re[k], rep.eig_im[k]});
            js["eigenvalues"] = eigs;
            jb["stability"] = js;
        } else {
            jb["n_tilde"] = b.n_tilde; // real part of the complex pair
        }
        doc["branches"].push_back(jb);
    }
    dptom_region region;
    check(dptom_classify(p.dtilde, p.g_eff, p.kappa, p.gamma_m, p.omega_m, &tol, &region),
          "classify");
    doc["region"] = region.label;
    doc["stable_branches"] = json::array();
    for (int j = 0; j < 3; ++j)
        if (region.stable_mask & (1u << j)) doc["stable_branches"].push_back(j + 1);

    write_file(c.out, doc.dump(2) + "\n");
    return exit_ok;
}

int run_phase_diagram(const CommonOpts& c, const std::string& dtilde_range,
                      const std::string& g_range, const std::vector<std::string>& measures,
                      int select_branch, const CLI::Option* threads_flag, int threads_value) {
    const Range rx = parse_range(dtilde_range, "--dtilde");
    const Range ry = parse_range(g_range, "--g");

    unsigned mask = DPTOM_MEASURE_NONE;
    for (const std::string& m : measures) {
        if (m == "entanglement")
            mask |= DPTOM_MEASURE_ENTANGLEMENT;
        else if (m == "squeezing")
            mask |= DPTOM_MEASURE_SQUEEZING;
        else if (m == "fluctuations")
            mask |= DPTOM_MEASURE_FLUCTUATIONS;
        else
            fail_config("unknown measure '" + m +
                        "' (expected entanglement, squeezing or fluctuations)");
    }

    dptom_grid_spec spec{rx.lo, rx.hi, rx.count, ry.lo, ry.hi, ry.count};
    const dptom_tolerances tol = tolerances_of(c);
    dptom_phasemap* map = nullptr;
    check(dptom_sweep_grid(&spec, c.kappa, c.gamma, c.omega_m, mask, select_branch,
                           resolve_threads(threads_flag, threads_value), &tol, &map),
          "sweep_grid");

    std::string csv = "dtilde,g,region,n1,n2,n3,stable_I,stable_II,stable_III,gap_real,gap_imag";
    if (mask & DPTOM_MEASURE_ENTANGLEMENT) csv += ",log_neg";
    if (mask & DPTOM_MEASURE_SQUEEZING) csv += ",min_eig";
    if (mask & DPTOM_MEASURE_FLUCTUATIONS) csv += ",fluct";
    csv += '\n';
    for (int iy = 0; iy < ry.count; ++iy)
        for (int ix = 0; ix < rx.count; ++ix) {
            dptom_cell cell;
            check(dptom_phasemap_cell(map, ix, iy, &cell), "phasemap_cell");
            csv += fmt(cell.dtilde);
            csv += ',';
            csv += fmt(cell.g);
            csv += ',';
            csv += cell.label;
            for (int j = 0; j < 3; ++j) {
                csv += ',';
                csv += fmt(cell.n[j]);
            }
            for (int j = 0; j < 3; ++j) {
                csv += ',';
                csv += (cell.stable_mask & (1u << j)) ? '1' : '0';
            }
            csv += ',';
            csv += fmt(cell.gap_real);
            csv += ',';
            csv += fmt(cell.gap_imag);
            if (mask & DPTOM_MEASURE_ENTANGLEMENT) {
                csv += ',';
                csv += fmt(cell.log_neg);
            }
            if (mask & DPTOM_MEASURE_SQUEEZING) {
                csv += ',';
                csv += fmt(cell.min_eig);
            }
            if (mask & DPTOM_MEASURE_FLUCTUATIONS) {
                csv += ',';
                csv += fmt(cell.fluct);
            }
            csv += '\n';
        }
    dptom_phasemap_destroy(map);
    write_file(c.out, csv);
    return exit_ok;
}

int run_slice(const CommonOpts& c, const std::string& dtilde_opt, const std::string& g_opt,
              int resolution) {
    // exactly one of the two coordinates is a range
    const bool dt_is_range = dtilde_opt.find(':') != std::string::npos;
    const bool g_is_range = g_opt.find(':') != std::string::npos;
    if (dt_is_range == g_is_range)
        fail_config("slice: exactly one of --dtilde/--g must be a min:max:count range");

    int axis;
    double fixed = 0.0;
    Range r;
    try {
        if (g_is_range) {
            axis = 0;
            fixed = std::stod(dtilde_opt);
            r = parse_range(g_opt, "--g");
        } else {
            axis = 1;
            fixed = std::stod(g_opt);
            r = parse_range(dtilde_opt, "--dtilde");
        }
    } catch (const CliError&) {
        throw;
    } catch (const std::exception&) {
        fail_config("slice: bad fixed coordinate");
    }
    const int res = resolution > 0 ? resolution : r.count;

    const dptom_tolerances tol = tolerances_of(c);
    std::vector<dptom_transition> events(64);
    size_t n = 0;
    check(dptom_slice_transitions(axis, fixed, r.lo, r.hi, res, c.kappa, c.gamma, c.omega_m,
                                  &tol, events.data(), events.size(), &n),
          "slice_transitions");

    std::string csv = "position,kind,branch_from,branch_to,n_jump,lambda_imag\n";
    for (size_t i = 0; i < n; ++i) {
        const dptom_transition& ev = events[i];
        csv += fmt(ev.position);
        csv += ',';
        csv += dptom_transition_kind_name(dptom_transition_kind(ev.kind));
        csv += ',';
        csv += std::to_string(ev.branch_from);
        csv += ',';
        csv += std::to_string(ev.branch_to);
        csv += ',';
        csv += fmt(ev.n_jump);
        csv += ',';
        csv += fmt(ev.lambda_imag);
        csv += '\n';
    }
    write_file(c.out, csv);
    return exit_ok;
}

int run_evolve(const CommonOpts& c, const PointOpts& pt, const std::string& mode, int branch,
               const std::string& alpha0, const std::string& beta0, const std::string& x0_str,
               const std::string& v0_str, double t_end, double tol_ode, int samples) {
    const dptom_params p = resolve_point(c, pt);
    dptom_table* table = nullptr;

    if (mode == "semiclassical") {
        double ar, ai, br, bi;
        if (alpha0.empty() || beta0.empty()) {
            // default: start at the branch fixed point
            dptom_branch branches[3];
            check(dptom_branches(&p, branches), "branches");
            const dptom_branch& b = branches[branch - 1];
            if (!b.physical) fail_config("requested branch is unphysical at this point");
            ar = b.alpha_re;
            ai = b.alpha_im;
            br = b.beta_re;
            bi = b.beta_im;
        } else {
            const auto a = parse_doubles(alpha0, 2, "--alpha0");
            const auto b = parse_doubles(beta0, 2, "--beta0");
            ar = a[0];
            ai = a[1];
            br = b[0];
            bi = b[1];
        }
        check(dptom_evolve_semiclassical(&p, ar, ai, br, bi, t_end, tol_ode, samples, &table),
              "evolve_semiclassical");
    } else if (mode == "moments") {
        std::array<double, 4> x0{};
        if (!x0_str.empty()) {
            const auto x = parse_doubles(x0_str, 4, "--x0");
            std::copy(x.begin(), x.end(), x0.begin());
        }
        std::array<double, 16> v0{};
        const double* v0_ptr = nullptr;
        if (v0_str == "identity") {
            for (int i = 0; i < 4; ++i) v0[std::size_t(5 * i)] = 1.0;
            v0_ptr = v0.data();
        } else if (v0_str == "vacuum" || v0_str.empty()) {
            v0_ptr = nullptr; // library default I/2
        } else {
            const auto v = parse_doubles(v0_str, 16, "--v0");
            std::copy(v.begin(), v.end(), v0.begin());
            v0_ptr = v0.data();
        }
        check(dptom_evolve_moments(&p, branch, x0.data(), v0_ptr, t_end, tol_ode, samples,
                                   &table),
              "evolve_moments");
    } else {
        fail_config("--mode must be semiclassical or moments");
    }

    const std::string csv = table_to_csv(table);
    dptom_table_destroy(table);
    write_file(c.out, csv);
    return exit_ok;
}

int run_hysteresis(const CommonOpts& c, const PointOpts& pt, const std::string& ramp,
                   double dwell_tol, double max_periods) {
    const dptom_params p = resolve_point(c, pt);
    const Range r = parse_range(ramp, "--etilde-ramp");
    dptom_table* table = nullptr;
    check(dptom_hysteresis(&p, r.lo, r.hi, r.count, dwell_tol, max_periods, &table),
          "hysteresis");
    const std::string csv = table_to_csv(table);
    dptom_table_destroy(table);
    write_file(c.out, csv);
    return exit_ok;
}

int run_covariance(const CommonOpts& c, const PointOpts& pt, int branch) {
    const dptom_params p = resolve_point(c, pt);
    const dptom_tolerances tol = tolerances_of(c);

    int use_branch = branch;
    dptom_region region;
    check(dptom_classify(p.dtilde, p.g_eff, p.kappa, p.gamma_m, p.omega_m, &tol, &region),
          "classify");
    if (use_branch == 0) {
        // region convention: A,B -> III; C,D,E -> I; F,G -> II
        const std::string label = region.label;
        if (label == "A" || label == "B")
            use_branch = 3;
        else if (label == "C" || label == "D" || label == "E")
            use_branch = 1;
        else if (label == "F" || label == "G")
            use_branch = 2;
        else
            fail_config("no branch-selection convention at region '" + label +
                        "'; pass --branch explicitly");
    }

    dptom_gaussian st;
    check(dptom_steady_covariance(&p, use_branch, &tol, &st), "steady_covariance");
    dptom_entanglement en;
    check(dptom_log_negativity(st.cov, &en), "log_negativity");
    dptom_squeezing sq;
    check(dptom_squeezing_report(st.cov, &sq), "squeezing");
    double fluct = 0.0;
    check(dptom_photon_fluctuations(st.cov, &fluct), "photon_fluctuations");
    double nu[2];
    check(dptom_symplectic_eigenvalues(st.cov, nu), "symplectic_eigenvalues");

    json doc;
    doc["params"] = params_json(p);
    doc["branch"] = use_branch;
    doc["region"] = region.label;
    json cov = json::array();
    for (int i = 0; i < 4; ++i) {
        json row = json::array();
        for (int j = 0; j < 4; ++j) row.push_back(st.cov[4 * i + j]);
        cov.push_back(row);
    }
    doc["covariance"] = cov;
    doc["lyapunov_residual"] = st.lyapunov_residual;
    doc["symplectic_eigenvalues"] = {nu[0], nu[1]};
    doc["entanglement"] = {{"sigma", en.sigma},
                           {"eta_minus", en.eta_minus},
                           {"log_neg", en.log_neg},
                           {"entangled", en.entangled != 0}};
    doc["squeezing"] = {{"min_eigenvalue", sq.min_eigenvalue},
                        {"min_diagonal", sq.min_diagonal},
                        {"squeezed_hybrid", sq.squeezed_hybrid != 0},
                        {"squeezed_local", sq.squeezed_local != 0}};
    doc["photon_fluctuations"] = fluct;

    write_file(c.out, doc.dump(2) + "\n");
    return exit_ok;
}

int run_critical(const CommonOpts& c, const std::string& window, int points,
                 const std::string& side) {
    double lo = 1e-4, hi = 1e-2;
    if (!window.empty()) {
        const auto pos = window.find(':');
        if (pos == std::string::npos) fail_config("--window expects lo:hi");
        try {
            lo = std::stod(window.substr(0, pos));
            hi = std::stod(window.substr(pos + 1));
        } catch (const std::exception&) {
            fail_config("--window: bad numbers");
        }
    }
    if (side != "below" && side != "above") fail_config("--side must be below or above");

    dptom_critical crit;
    check(dptom_estimate_exponents(c.kappa, c.gamma, c.omega_m, lo, hi, points,
                                   side == "below" ? 0 : 1, &crit),
          "estimate_exponents");

    json doc;
    doc["kappa"] = c.kappa;
    doc["gamma"] = c.gamma;
    doc["omega_m"] = c.omega_m;
    doc["dtilde_c"] = crit.dtilde_c;
    doc["g_c"] = crit.g_c;
    doc["residuals"] = {{"soft", crit.soft_residual}, {"fold", crit.fold_residual}};
    doc["nu_adr"] = crit.nu_adr;
    doc["nu_c"] = crit.nu_c;
    doc["r2_adr"] = crit.r2_adr;
    doc["r2_c"] = crit.r2_c;
    doc["fit_window"] = {crit.window_lo, crit.window_hi};
    doc["fit_samples"] = crit.n_samples;
    doc["approach_side"] = side;

    write_file(c.out, doc.dump(2) + "\n");
    return exit_ok;
}

int run_spectrum(const CommonOpts& c, double dtilde, const std::string& g_range, int branch) {
    const Range r = parse_range(g_range, "--g");
    dptom_table* table = nullptr;
    check(dptom_spectrum_sweep(dtilde, r.lo, r.hi, r.count, branch, c.kappa, c.gamma, c.omega_m,
                               &table),
          "spectrum_sweep");
    const std::string csv = table_to_csv(table);
    dptom_table_destroy(table);
    write_file(c.out, csv);
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dissipative-phase-transition toolkit for driven optomechanics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(dptom_version()));

    // branches
    CommonOpts c_br;
    PointOpts p_br;
    auto* cmd_br = app.add_subcommand("branches", "stationary branches and stability at a point");
    add_common(cmd_br, c_br);
    add_point(cmd_br, p_br);

    // phase-diagram
    CommonOpts c_pd;
    std::string pd_dt, pd_g;
    std::vector<std::string> pd_measures;
    int pd_branch = 0, pd_threads = 0;
    auto* cmd_pd =
        app.add_subcommand("phase-diagram", "region map over a (dtilde, G) grid -> CSV");
    add_common(cmd_pd, c_pd);
    cmd_pd->add_option("--dtilde", pd_dt, "dtilde range min:max:count")->required();
    cmd_pd->add_option("--g", pd_g, "G range min:max:count")->required();
    cmd_pd->add_option("--measures", pd_measures,
                       "per-cell measures: entanglement, squeezing, fluctuations")
        ->delimiter(',');
    cmd_pd->add_option("--select-branch", pd_branch,
                       "branch used for measures: 0 = region convention, 1..3 forced")
        ->check(CLI::Range(0, 3));
    auto* pd_threads_opt = cmd_pd->add_option("--threads", pd_threads, "worker cap");

    // slice
    CommonOpts c_sl;
    std::string sl_dt, sl_g;
    int sl_res = 0;
    auto* cmd_sl = app.add_subcommand("slice", "transition events along a line -> CSV");
    add_common(cmd_sl, c_sl);
    cmd_sl->add_option("--dtilde", sl_dt, "fixed value or min:max:count range")->required();
    cmd_sl->add_option("--g", sl_g, "fixed value or min:max:count range")->required();
    cmd_sl->add_option("--resolution", sl_res, "scan resolution (default: range count)");

    // evolve
    CommonOpts c_ev;
    PointOpts p_ev;
    std::string ev_mode = "semiclassical", ev_alpha0, ev_beta0, ev_x0, ev_v0;
    int ev_branch = 1, ev_samples = 400;
    double ev_tend = 100.0, ev_tol = 1e-10;
    auto* cmd_ev = app.add_subcommand("evolve", "mean-field or moment trajectories -> CSV");
    add_common(cmd_ev, c_ev);
    add_point(cmd_ev, p_ev);
    cmd_ev->add_option("--mode", ev_mode, "semiclassical | moments");
    cmd_ev->add_option("--branch", ev_branch, "branch for moments / default start")
        ->check(CLI::Range(1, 3));
    cmd_ev->add_option("--alpha0", ev_alpha0, "initial cavity amplitude re,im");
    cmd_ev->add_option("--beta0", ev_beta0, "initial mechanical amplitude re,im");
    cmd_ev->add_option("--x0", ev_x0, "initial first moments x1,x2,x3,x4");
    cmd_ev->add_option("--v0", ev_v0, "initial covariance: vacuum | identity | 16 values");
    cmd_ev->add_option("--t-end", ev_tend, "integration horizon");
    cmd_ev->add_option("--tol", ev_tol, "local error tolerance");
    cmd_ev->add_option("--samples", ev_samples, "number of output samples");

    // hysteresis
    CommonOpts c_hy;
    PointOpts p_hy;
    std::string hy_ramp;
    double hy_dwell = 0.0, hy_max_periods = 0.0;
    auto* cmd_hy =
        app.add_subcommand("hysteresis", "quasi-static drive ramp up and down -> CSV");
    add_common(cmd_hy, c_hy);
    add_point(cmd_hy, p_hy);
    cmd_hy->add_option("--etilde-ramp", hy_ramp, "drive ramp min:max:count")->required();
    cmd_hy->add_option("--dwell-tol", hy_dwell, "per-period change considered stationary");
    cmd_hy->add_option("--max-periods", hy_max_periods, "dwell cap per ramp point");

    // covariance
    CommonOpts c_cv;
    PointOpts p_cv;
    int cv_branch = 0;
    auto* cmd_cv = app.add_subcommand(
        "covariance", "steady covariance, entanglement and squeezing at a point -> JSON");
    add_common(cmd_cv, c_cv);
    add_point(cmd_cv, p_cv);
    cmd_cv->add_option("--branch", cv_branch, "0 = region convention, 1..3 forced")
        ->check(CLI::Range(0, 3));

    // critical
    CommonOpts c_cr;
    std::string cr_window, cr_side = "below";
    int cr_points = 25;
    auto* cmd_cr =
        app.add_subcommand("critical", "critical point and critical exponents -> JSON");
    add_common(cmd_cr, c_cr);
    cmd_cr->add_option("--window", cr_window,
                       "fit window lo:hi in |G - G_c| (default 1e-4:1e-2)");
    cmd_cr->add_option("--points", cr_points, "fit sample count");
    cmd_cr->add_option("--side", cr_side, "approach side: below | above");

    // spectrum
    CommonOpts c_sp;
    double sp_dt = 0.0;
    std::string sp_g;
    int sp_branch = 0;
    auto* cmd_sp =
        app.add_subcommand("spectrum", "drift eigenvalues against G at fixed dtilde -> CSV");
    add_common(cmd_sp, c_sp);
    cmd_sp->add_option("--dtilde", sp_dt, "fixed effective detuning")->required();
    cmd_sp->add_option("--g", sp_g, "G range min:max:count")->required();
    cmd_sp->add_option("--branch", sp_branch, "0 = all branches")->check(CLI::Range(0, 3));

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = apply_config_file(args);
        // CLI11 consumes the vector reversed
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e);
            return 0; // --help / --version
        }
        std::cerr << e.what() << "\n";
        return exit_config;
    } catch (const CliError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code;
    }

    try {
        if (cmd_br->parsed()) return run_branches(c_br, p_br);
        if (cmd_pd->parsed())
            return run_phase_diagram(c_pd, pd_dt, pd_g, pd_measures, pd_branch, pd_threads_opt,
                                     pd_threads);
        if (cmd_sl->parsed()) return run_slice(c_sl, sl_dt, sl_g, sl_res);
        if (cmd_ev->parsed())
            return run_evolve(c_ev, p_ev, ev_mode, ev_branch, ev_alpha0, ev_beta0, ev_x0, ev_v0,
                              ev_tend, ev_tol, ev_samples);
        if (cmd_hy->parsed())
            return run_hysteresis(c_hy, p_hy, hy_ramp, hy_dwell, hy_max_periods);
        if (cmd_cv->parsed()) return run_covariance(c_cv, p_cv, cv_branch);
        if (cmd_cr->parsed()) return run_critical(c_cr, cr_window, cr_points, cr_side);
        if (cmd_sp->parsed()) return run_spectrum(c_sp, sp_dt, sp_g, sp_branch);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numeric;
    }
    return exit_config;
}
