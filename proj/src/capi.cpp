#include "dptom/dptom.h"

#include "dptom/gaussian.hpp"
#include "dptom/model.hpp"
#include "dptom/phasediagram.hpp"
#include "dptom/semiclassical.hpp"
#include "dptom/stability.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

using namespace dptom;

namespace {

thread_local std::string g_last_error;

dptom_status status_from(const Error& e) {
    g_last_error = e.what();
    switch (e.code()) {
        case Errc::invalid_argument:
        case Errc::non_positive_frequency:
        case Errc::negative_rate:
        case Errc::non_positive_data:
        case Errc::insufficient_points:
            return DPTOM_ERR_INVALID_ARGUMENT;
        case Errc::unphysical_branch:
        case Errc::unphysical_covariance:
            return DPTOM_ERR_UNPHYSICAL_BRANCH;
        case Errc::unstable_drift:
            return DPTOM_ERR_UNSTABLE_DRIFT;
        case Errc::singular_system:
        case Errc::singular_covariance:
        case Errc::degenerate_leading_coefficient:
            return DPTOM_ERR_SINGULAR;
        case Errc::no_intersection:
        case Errc::fit_range_crosses_boundary:
            return DPTOM_ERR_NOT_FOUND;
        default:
            return DPTOM_ERR_NUMERICS;
    }
}

template <typename F>
dptom_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return DPTOM_OK;
    } catch (const Error& e) {
        return status_from(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return DPTOM_ERR_NUMERICS;
    }
}

SystemParams to_core(const dptom_params& p) {
    SystemParams sp;
    sp.kappa = p.kappa;
    sp.gamma = p.gamma_m;
    sp.omega_m = p.omega_m;
    sp.delta = p.delta;
    sp.e_tilde = p.e_tilde;
    sp.dtilde = p.dtilde;
    sp.g_eff = p.g_eff;
    return sp;
}

dptom_params from_core(const SystemParams& sp) {
    dptom_params p;
    p.kappa = sp.kappa;
    p.gamma_m = sp.gamma;
    p.omega_m = sp.omega_m;
    p.delta = sp.delta;
    p.e_tilde = sp.e_tilde;
    p.dtilde = sp.dtilde;
    p.g_eff = sp.g_eff;
    return p;
}

Tolerances to_core(const dptom_tolerances* tol) {
    Tolerances t;
    if (tol) {
        t.eps_stab = tol->eps_stab;
        t.eps_band = tol->eps_band;
    }
    return t;
}

Mat4 mat_from(const double m[16]) {
    Mat4 a;
    std::memcpy(a.m.data(), m, 16 * sizeof(double));
    return a;
}

void mat_to(const Mat4& a, double m[16]) { std::memcpy(m, a.m.data(), 16 * sizeof(double)); }

void fill_branch(const Branch& b, dptom_branch& out) {
    out.index = b.index;
    out.physical = b.physical ? 1 : 0;
    out.n_tilde = b.n_tilde;
    out.alpha_re = b.alpha_tilde.real();
    out.alpha_im = b.alpha_tilde.imag();
    out.beta_re = b.beta_tilde.real();
    out.beta_im = b.beta_tilde.imag();
}

void fill_stability(const StabilityReport& rep, dptom_stability& out) {
    out.branch_index = rep.branch_index;
    out.cls = int(rep.cls);
    out.hard_margin = rep.hard_margin;
    out.soft_margin = rep.soft_margin;
    for (int k = 0; k < 4; ++k) {
        out.eig_re[k] = rep.spectrum.eigenvalues[std::size_t(k)].real();
        out.eig_im[k] = rep.spectrum.eigenvalues[std::size_t(k)].imag();
    }
    out.gap_real = rep.gap_real;
    out.gap_imag = rep.gap_imag;
    out.margins_consistent = rep.margins_consistent ? 1 : 0;
}

constexpr double nan_d = std::numeric_limits<double>::quiet_NaN();

} // namespace

struct dptom_table {
    std::vector<std::string> names;
    std::vector<double> data; // row-major
    std::size_t rows = 0;
};

struct dptom_phasemap {
    PhaseMap map;
};

extern "C" {

const char* dptom_version(void) { return "0.1.0"; }

const char* dptom_status_name(dptom_status s) {
    switch (s) {
        case DPTOM_OK: return "ok";
        case DPTOM_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case DPTOM_ERR_UNPHYSICAL_BRANCH: return "unphysical_branch";
        case DPTOM_ERR_UNSTABLE_DRIFT: return "unstable_drift";
        case DPTOM_ERR_SINGULAR: return "singular";
        case DPTOM_ERR_NUMERICS: return "numerics";
        case DPTOM_ERR_NOT_FOUND: return "not_found";
        case DPTOM_ERR_BUFFER_TOO_SMALL: return "buffer_too_small";
    }
    return "?";
}

const char* dptom_last_error(void) { return g_last_error.c_str(); }

void dptom_tolerances_default(dptom_tolerances* out) {
    if (!out) return;
    Tolerances t;
    out->eps_stab = t.eps_stab;
    out->eps_band = t.eps_band;
}

dptom_status dptom_params_from_effective(double dtilde, double g_eff, double kappa,
                                         double gamma_m, double omega_m, dptom_params* out) {
    if (!out) return DPTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] { *out = from_core(params_from_effective(dtilde, g_eff, kappa, gamma_m, omega_m)); });
}

dptom_status dptom_params_from_bare(double delta, double e_tilde, double kappa, double gamma_m,
                                    double omega_m, dptom_params* out) {
    if (!out) return DPTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] { *out = from_core(effective_from_bare(delta, e_tilde, kappa, gamma_m, omega_m)); });
}

dptom_status dptom_branches(const dptom_params* p, dptom_branch out[3]) {
    if (!p || !out) return DPTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const auto branches = photon_number_branches(to_core(*p));
        for (int j = 0; j < 3; ++j) fill_branch(branches[std::size_t(j)], out[j]);
    });
}

const char* dptom_stability_class_name(dptom_stability_class c) {
    return stability_class_name(StabilityClass(c));
}

dptom_status dptom_stability_report(const dptom_params* p, int branch_index,
                                    const dptom_tolerances* tol, dptom_stability* out) {
    if (!p || !out) return DPTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const SystemParams sp = to_core(*p);
        const Branch b = branch_amplitudes(sp, branch_index);
        fill_stability(drift_spectrum(sp, b, to_core(tol)), *out);
    });
}

dptom_status dptom_drift_matrix(const dptom_params* p, int branch_index, double out[16]) {
    if (!p || !out) return DPTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const SystemParams sp = to_core(*p);
        mat_to(drift_matrix(sp, branch_amplitudes(sp, branch_index)), out);
    });
}

dptom_status dptom_classify(double dtilde, double g_eff, double kappa, double gamma_m,
                            double omega_m, const dptom_tolerances* tol, dptom_region* out) {
    if (!out) return DPTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const RegionSignature sig =
            classify_point(dtilde, g_eff, kappa, gamma_m, omega_m, to_core(tol));
        for (int j = 0; j < 3; ++j) {
            out->branch_class[j] = int(sig.branch_class[std::size_t(j)]);
            out->physical[j] = sig.physical[std::size_t(j)] ? 1 : 0;
        }
        out->stable_mask = sig.stable_mask;
        std::snprintf(out->label, sizeof(out->label), "%s", region_name(sig.label));
        out->consistent = sig.consistent ? 1 : 0;
    });
}

dptom_status dptom_steady_covariance(const dptom_params* p, int branch_index,
                                     const dptom_tolerances* tol, dptom_gaussian* out) {
    if (!p || !out) return DPTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const SystemParams sp = to_core(*p);
        const GaussianState st =
            steady_covariance(sp, branch_amplitudes(sp, branch_index), to_core(tol));
        for (int i = 0; i < 4; ++i) out->mean[i] = st.mean[std::size_t(i)];
        mat_to(st.cov, out->cov);
        out->lyapunov_residual = st.lyapunov_residual;
    });
}

dptom_status dptom_log_negativity(const double cov[16], dptom_entanglement* out) {
    if (!cov || !out) return DPTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const EntanglementReport rep = log_negativity(mat_from(cov));
        out->sigma = rep.sigma;
        out->eta_minus = rep.eta_minus;
        out->log_neg = rep.log_neg;
        out->entangled = rep.entangled ? 1 : 0;
    });
}

dptom_status dptom_squeezing_report(const double cov[16], dptom_squeezing* out) {
    if (!cov || !out) return DPTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const SqueezingReport rep = squeezing_spectrum(mat_from(cov));
        out->min_eigenvalue = rep.min_eigenvalue;
        out->min_diagonal = rep.min_diagonal;
        out->squeezed_hybrid = rep.squeezed_hybrid ? 1 : 0;
        out->squeezed_local = rep.squeezed_local ? 1 : 0;
    });
}

dptom_status dptom_photon_fluctuations(const double cov[16], double* out) {
    if (!cov || !out) return DPTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] { *out = photon_fluctuations(mat_from(cov)); });
}

dptom_status dptom_wigner_density(const dptom_gaussian* state, const double x[4], double* out) {
    if (!state || !x || !out) return DPTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        GaussianState st;
        for (int i = 0; i < 4; ++i) st.mean[std::size_t(i)] = state->mean[i];
        st.cov = mat_from(state->cov);
        *out = wigner_density(st, Vec4{x[0], x[1], x[2], x[3]});
    });
}

dptom_status dptom_symplectic_eigenvalues(const double cov[16], double out[2]) {
    if (!cov || !out) return DPTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const auto nu = symplectic_eigenvalues(mat_from(cov));
        out[0] = nu[0];
        out[1] = nu[1];
    });
}

size_t dptom_table_rows(const dptom_table* t) { return t ? t->rows : 0; }
size_t dptom_table_cols(const dptom_table* t) { return t ? t->names.size() : 0; }

const char* dptom_table_column_name(const dptom_table* t, size_t col) {
    if (!t || col >= t->names.size()) return "";
    return t->names[col].c_str();
}

double dptom_table_get(const dptom_table* t, size_t row, size_t col) {
    if (!t || row >= t->rows || col >= t->names.size()) return nan_d;
    return t->data[row * t->names.size() + col];
}

void dptom_table_destroy(dptom_table* t) { delete t; }

dptom_status dptom_evolve_semiclassical(const dptom_params* p, double alpha_re, double alpha_im,
                                        double beta_re, double beta_im, double t_end,
                                        double tol, int n_samples, dptom_table** out) {
    if (!p || !out) return DPTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const SemiclassicalTrajectory tr =
            integrate_semiclassical(to_core(*p), Complex(alpha_re, alpha_im),
                                    Complex(beta_re, beta_im), t_end, tol, n_samples);
        auto* t = new dptom_table;
        t->names = {"t", "alpha_re", "alpha_im", "beta_re", "beta_im", "n"};
        t->rows = tr.t.size();
        t->data.reserve(t->rows * t->names.size());
        for (std::size_t i = 0; i < t->rows; ++i) {
            t->data.push_back(tr.t[i]);
            t->data.push_back(tr.alpha[i].real());
            t->data.push_back(tr.alpha[i].imag());
            t->data.push_back(tr.beta[i].real());
            t->data.push_back(tr.beta[i].imag());
            t->data.push_back(std::norm(tr.alpha[i]));
        }
        *out = t;
    });
}

dptom_status dptom_evolve_moments(const dptom_params* p, int branch_index, const double x0[4],
                                  const double v0[16], double t_end, double tol, int n_samples,
                                  dptom_table** out) {
    if (!p || !x0 || !out) return DPTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const SystemParams sp = to_core(*p);
        const Branch b = branch_amplitudes(sp, branch_index);
        Mat4 v = v0 ? mat_from(v0) : 0.5 * Mat4::identity();
        const MomentTrajectory tr =
            evolve_moments(sp, b, Vec4{x0[0], x0[1], x0[2], x0[3]}, v, t_end, tol, n_samples);
        auto* t = new dptom_table;
        t->names = {"t",   "x1",  "x2",  "x3",  "x4",  "v11", "v12",
                    "v13", "v14", "v22", "v23", "v24", "v33", "v34", "v44"};
        t->rows = tr.t.size();
        t->data.reserve(t->rows * t->names.size());
        for (std::size_t i = 0; i < t->rows; ++i) {
            t->data.push_back(tr.t[i]);
            for (int k = 0; k < 4; ++k) t->data.push_back(tr.mean[i][std::size_t(k)]);
            const Mat4& vi = tr.cov[i];
            t->data.push_back(vi(0, 0));
            t->data.push_back(vi(0, 1));
            t->data.push_back(vi(0, 2));
            t->data.push_back(vi(0, 3));
            t->data.push_back(vi(1, 1));
            t->data.push_back(vi(1, 2));
            t->data.push_back(vi(1, 3));
            t->data.push_back(vi(2, 2));
            t->data.push_back(vi(2, 3));
            t->data.push_back(vi(3, 3));
        }
        *out = t;
    });
}

dptom_status dptom_hysteresis(const dptom_params* base, double e_lo, double e_hi, int n_points,
                              double dwell_rel_change, double max_periods, dptom_table** out) {
    if (!base || !out) return DPTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        DwellOptions opts;
        if (dwell_rel_change > 0.0) opts.rel_change = dwell_rel_change;
        if (max_periods > 0.0) opts.max_periods = max_periods;
        const HysteresisCurve c = hysteresis_sweep(to_core(*base), e_lo, e_hi, n_points, opts);
        auto* t = new dptom_table;
        t->names = {"e_tilde", "n_up", "n_down", "converged_up", "converged_down"};
        t->rows = c.e_tilde.size();
        for (std::size_t i = 0; i < t->rows; ++i) {
            t->data.push_back(c.e_tilde[i]);
            t->data.push_back(c.n_up[i]);
            t->data.push_back(c.n_down[i]);
            t->data.push_back(c.converged_up[i] ? 1.0 : 0.0);
            t->data.push_back(c.converged_down[i] ? 1.0 : 0.0);
        }
        *out = t;
    });
}

dptom_status dptom_spectrum_sweep(double dtilde, double g_lo, double g_hi, int n_points,
                                  int branch_index, double kappa, double gamma_m,
                                  double omega_m, dptom_table** out) {
    if (!out) return DPTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const auto rows =
            spectrum_sweep(dtilde, g_lo, g_hi, n_points, branch_index, kappa, gamma_m, omega_m);
        auto* t = new dptom_table;
        t->names = {"g",   "branch", "physical", "re1", "im1", "re2",
                    "im2", "re3",    "im3",      "re4", "im4"};
        t->rows = rows.size();
        for (const SpectrumSample& s : rows) {
            t->data.push_back(s.g);
            t->data.push_back(double(s.branch_index));
            t->data.push_back(s.physical ? 1.0 : 0.0);
            for (int k = 0; k < 4; ++k) {
                t->data.push_back(s.eigenvalues[std::size_t(k)].real());
                t->data.push_back(s.eigenvalues[std::size_t(k)].imag());
            }
        }
        *out = t;
    });
}

dptom_status dptom_sweep_grid(const dptom_grid_spec* spec, double kappa, double gamma_m,
                              double omega_m, unsigned measures, int branch_rule, int threads,
                              const dptom_tolerances* tol, dptom_phasemap** out) {
    if (!spec || !out) return DPTOM_ERR_INVALID_ARGUMENT;
    if (branch_rule < 0 || branch_rule > 3) return DPTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        GridSpec gs;
        gs.dtilde_min = spec->dtilde_min;
        gs.dtilde_max = spec->dtilde_max;
        gs.nx = spec->nx;
        gs.g_min = spec->g_min;
        gs.g_max = spec->g_max;
        gs.ny = spec->ny;
        auto* m = new dptom_phasemap;
        m->map = sweep_grid(gs, kappa, gamma_m, omega_m, measures, BranchRule(branch_rule),
                            threads, to_core(tol));
        *out = m;
    });
}

dptom_status dptom_phasemap_cell(const dptom_phasemap* m, int ix, int iy, dptom_cell* out) {
    if (!m || !out) return DPTOM_ERR_INVALID_ARGUMENT;
    if (ix < 0 || ix >= m->map.spec.nx || iy < 0 || iy >= m->map.spec.ny)
        return DPTOM_ERR_INVALID_ARGUMENT;
    const PhaseCell& c = m->map.at(ix, iy);
    out->dtilde = c.dtilde;
    out->g = c.g;
    std::snprintf(out->label, sizeof(out->label), "%s", region_name(c.sig.label));
    out->stable_mask = c.sig.stable_mask;
    out->consistent = c.sig.consistent ? 1 : 0;
    for (int j = 0; j < 3; ++j) {
        out->n[j] = c.n[std::size_t(j)];
        out->physical[j] = c.sig.physical[std::size_t(j)] ? 1 : 0;
    }
    out->gap_real = c.gap_real;
    out->gap_imag = c.gap_imag;
    out->selected_branch = c.selected_branch;
    out->log_neg = c.log_neg;
    out->min_eig = c.min_eig;
    out->fluct = c.fluct;
    out->measure_error = c.measure_error ? 1 : 0;
    return DPTOM_OK;
}

void dptom_phasemap_dims(const dptom_phasemap* m, int* nx, int* ny) {
    if (!m) return;
    if (nx) *nx = m->map.spec.nx;
    if (ny) *ny = m->map.spec.ny;
}

void dptom_phasemap_destroy(dptom_phasemap* m) { delete m; }

const char* dptom_transition_kind_name(dptom_transition_kind k) {
    return transition_kind_name(TransitionKind(k));
}

dptom_status dptom_slice_transitions(int axis, double fixed_value, double lo, double hi,
                                     int resolution, double kappa, double gamma_m,
                                     double omega_m, const dptom_tolerances* tol,
                                     dptom_transition* out, size_t capacity, size_t* n_events) {
    if (!n_events || (capacity > 0 && !out)) return DPTOM_ERR_INVALID_ARGUMENT;
    if (axis != 0 && axis != 1) return DPTOM_ERR_INVALID_ARGUMENT;
    bool truncated = false;
    dptom_status st = guarded([&] {
        const auto events = slice_transitions(
            axis == 0 ? SliceAxis::sweep_g : SliceAxis::sweep_dtilde, fixed_value, lo, hi,
            resolution, kappa, gamma_m, omega_m, to_core(tol));
        *n_events = events.size();
        const std::size_t n = std::min(capacity, events.size());
        for (std::size_t i = 0; i < n; ++i) {
            out[i].position = events[i].position;
            out[i].kind = int(events[i].kind);
            out[i].branch_from = events[i].branch_from;
            out[i].branch_to = events[i].branch_to;
            out[i].n_jump = events[i].n_jump;
            out[i].lambda_imag = events[i].lambda_imag;
        }
        truncated = events.size() > capacity;
    });
    if (st == DPTOM_OK && truncated) {
        g_last_error = "slice_transitions: event buffer too small";
        return DPTOM_ERR_BUFFER_TOO_SMALL;
    }
    return st;
}

dptom_status dptom_trace_boundary(int kind, int branch_index, double seed_dtilde, double seed_g,
                                  double step, size_t max_points, double kappa, double gamma_m,
                                  double omega_m, double* xy_out, size_t capacity,
                                  size_t* n_points, int* lost_track) {
    if (!xy_out || !n_points || !lost_track) return DPTOM_ERR_INVALID_ARGUMENT;
    if (kind < 0 || kind > 2) return DPTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const Polyline line =
            trace_boundary(BoundaryKind(kind), branch_index, seed_dtilde, seed_g, step,
                           std::min(max_points, capacity), kappa, gamma_m, omega_m);
        *n_points = line.points.size();
        *lost_track = line.lost_track ? 1 : 0;
        for (std::size_t i = 0; i < line.points.size(); ++i) {
            xy_out[2 * i] = line.points[i][0];
            xy_out[2 * i + 1] = line.points[i][1];
        }
    });
}

dptom_status dptom_find_critical_point(double kappa, double gamma_m, double omega_m,
                                       dptom_critical* out) {
    if (!out) return DPTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const CriticalPoint cp = find_critical_point(kappa, gamma_m, omega_m);
        *out = {};
        out->dtilde_c = cp.dtilde_c;
        out->g_c = cp.g_c;
        out->soft_residual = cp.soft_residual;
        out->fold_residual = cp.fold_residual;
        out->nu_adr = out->nu_c = out->r2_adr = out->r2_c = nan_d;
    });
}

dptom_status dptom_estimate_exponents(double kappa, double gamma_m, double omega_m,
                                      double dist_lo, double dist_hi, int n_samples, int side,
                                      dptom_critical* out) {
    if (!out) return DPTOM_ERR_INVALID_ARGUMENT;
    if (side != 0 && side != 1) return DPTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const ExponentFit fit = estimate_exponents(
            kappa, gamma_m, omega_m, dist_lo, dist_hi, n_samples,
            side == 0 ? ApproachSide::below : ApproachSide::above);
        out->dtilde_c = fit.critical.dtilde_c;
        out->g_c = fit.critical.g_c;
        out->soft_residual = fit.critical.soft_residual;
        out->fold_residual = fit.critical.fold_residual;
        out->nu_adr = fit.nu_adr;
        out->nu_c = fit.nu_c;
        out->r2_adr = fit.r2_adr;
        out->r2_c = fit.r2_c;
        out->window_lo = fit.window_lo;
        out->window_hi = fit.window_hi;
        out->n_samples = fit.n_samples;
    });
}

} // extern "C"
