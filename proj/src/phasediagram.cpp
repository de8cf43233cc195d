#include "dptom/phasediagram.hpp"

#include "dptom/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace dptom {

namespace {

constexpr double nan_d = std::numeric_limits<double>::quiet_NaN();

int select_branch(const RegionSignature& sig, BranchRule rule) {
    if (rule != BranchRule::automatic) {
        const int j = int(rule);
        return (sig.stable_mask & (1u << (j - 1))) ? j : 0;
    }
    switch (sig.label) {
        case Region::A: return 3;
        case Region::B: return 3;
        case Region::C: return 1;
        case Region::D:
        case Region::E: return 1;
        case Region::F:
        case Region::G: return 2;
        default: return 0;
    }
}

} // namespace

PhaseMap sweep_grid(const GridSpec& spec, double kappa, double gamma, double omega_m,
                    std::uint32_t measures, BranchRule rule, int threads,
                    const Tolerances& tol) {
    if (spec.nx < 2 || spec.ny < 2)
        throw Error(Errc::invalid_argument, "sweep_grid: nx and ny must be >= 2");
    if (!(spec.dtilde_max > spec.dtilde_min) || !(spec.g_max > spec.g_min))
        throw Error(Errc::invalid_argument, "sweep_grid: empty ranges");

    PhaseMap map;
    map.spec = spec;
    map.cells.resize(std::size_t(spec.nx) * std::size_t(spec.ny));

    auto work_cell = [&](int ix, int iy) {
        PhaseCell& cell = map.cells[std::size_t(iy) * std::size_t(spec.nx) + std::size_t(ix)];
        cell.dtilde = spec.dtilde_min +
                      (spec.dtilde_max - spec.dtilde_min) * double(ix) / double(spec.nx - 1);
        cell.g = spec.g_min + (spec.g_max - spec.g_min) * double(iy) / double(spec.ny - 1);
        cell.log_neg = cell.min_eig = cell.fluct = nan_d;
        cell.gap_real = cell.gap_imag = nan_d;
        cell.n = {nan_d, nan_d, nan_d};

        PointAnalysis pa = analyze_point(cell.dtilde, cell.g, kappa, gamma, omega_m, tol);
        cell.sig = pa.sig;
        for (int j = 0; j < 3; ++j)
            if (pa.branches[std::size_t(j)].physical)
                cell.n[std::size_t(j)] = pa.branches[std::size_t(j)].n_tilde;

        cell.selected_branch = select_branch(pa.sig, rule);
        if (cell.selected_branch == 0) return;
        const StabilityReport& rep = pa.reports[std::size_t(cell.selected_branch - 1)];
        cell.gap_real = rep.gap_real;
        cell.gap_imag = rep.gap_imag;

        if (measures == measure_none) return;
        try {
            const Branch& b = pa.branches[std::size_t(cell.selected_branch - 1)];
            GaussianState st = steady_covariance(pa.params, b, tol);
            if (measures & measure_entanglement) cell.log_neg = log_negativity(st.cov).log_neg;
            if (measures & measure_squeezing) cell.min_eig = sym_eigenvalues(st.cov)[0];
            if (measures & measure_fluctuations) cell.fluct = photon_fluctuations(st.cov);
        } catch (const Error&) {
            cell.measure_error = true; // recorded in-cell, never thrown
        }
    };

    int n_threads = threads > 0 ? threads : int(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    n_threads = std::min<int>(n_threads, spec.ny);

    if (n_threads == 1) {
        for (int iy = 0; iy < spec.ny; ++iy)
            for (int ix = 0; ix < spec.nx; ++ix) work_cell(ix, iy);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(std::size_t(n_threads));
        for (int w = 0; w < n_threads; ++w) {
            pool.emplace_back([&, w]() {
                for (int iy = w; iy < spec.ny; iy += n_threads)
                    for (int ix = 0; ix < spec.nx; ++ix) work_cell(ix, iy);
            });
        }
        for (auto& th : pool) th.join();
    }
    return map;
}

const char* transition_kind_name(TransitionKind k) {
    switch (k) {
        case TransitionKind::continuous: return "continuous";
        case TransitionKind::discontinuous: return "discontinuous";
        case TransitionKind::hard: return "hard";
    }
    return "?";
}

namespace {

struct SliceState {
    std::uint8_t stable = 0;
    std::uint8_t physical = 0;
    bool boundary = false;
};

bool operator==(const SliceState& a, const SliceState& b) {
    return a.stable == b.stable && a.physical == b.physical;
}

} // namespace

std::vector<TransitionEvent> slice_transitions(SliceAxis axis, double fixed_value, double lo,
                                               double hi, int resolution, double kappa,
                                               double gamma, double omega_m,
                                               const Tolerances& tol) {
    if (resolution < 2) throw Error(Errc::invalid_argument, "slice: resolution must be >= 2");
    if (!(hi > lo)) throw Error(Errc::invalid_argument, "slice: empty range");

    auto analyze = [&](double pos) {
        const double dt = axis == SliceAxis::sweep_g ? fixed_value : pos;
        const double g = axis == SliceAxis::sweep_g ? pos : fixed_value;
        return analyze_point(dt, g, kappa, gamma, omega_m, tol);
    };
    auto state_of = [](const PointAnalysis& pa) {
        SliceState s;
        s.stable = pa.sig.stable_mask;
        for (int j = 0; j < 3; ++j)
            if (pa.sig.physical[std::size_t(j)]) s.physical |= std::uint8_t(1u << j);
        s.boundary = pa.sig.label == Region::boundary;
        return s;
    };

    std::vector<TransitionEvent> events;
    double prev_pos = lo;
    SliceState prev_state = state_of(analyze(lo));

    for (int i = 1; i < resolution; ++i) {
        const double pos = lo + (hi - lo) * double(i) / double(resolution - 1);
        SliceState cur_state = state_of(analyze(pos));
        if (cur_state == prev_state || cur_state.boundary) {
            if (!cur_state.boundary) {
                prev_state = cur_state;
                prev_pos = pos;
            }
            continue;
        }

        // Bisect the change to 1e-8 in the swept coordinate.
        double a = prev_pos, b = pos;
        SliceState sa = prev_state;
        while (b - a > 1e-8) {
            const double mid = 0.5 * (a + b);
            SliceState sm = state_of(analyze(mid));
            if (sm == sa)
                a = mid;
            else
                b = mid;
        }
        const double position = 0.5 * (a + b);

        const PointAnalysis at = analyze(position);
        int marginal = 0;
        double best_gap = std::numeric_limits<double>::infinity();
        for (int j = 0; j < 3; ++j) {
            if (!at.sig.physical[std::size_t(j)]) continue;
            const StabilityReport& rep = at.reports[std::size_t(j)];
            if (rep.gap_real < best_gap) {
                best_gap = rep.gap_real;
                marginal = j + 1;
            }
        }

        TransitionEvent ev;
        ev.position = position;

        // Side states a safe distance outside the marginality band.
        const double side_step = 0.5 * (hi - lo) / double(resolution - 1);
        const PointAnalysis pa_lo = analyze(std::max(lo, position - side_step));
        const PointAnalysis pa_hi = analyze(std::min(hi, position + side_step));
        const SliceState st_lo = state_of(pa_lo);
        const SliceState st_hi = state_of(pa_hi);
        const std::uint8_t s_lo = st_lo.stable, s_hi = st_hi.stable;
        const std::uint8_t lost = s_lo & std::uint8_t(~s_hi);
        const std::uint8_t gained = s_hi & std::uint8_t(~s_lo);
        const std::uint8_t kept = s_lo & s_hi;
        const bool pair_appears = st_lo.physical != st_hi.physical;
        auto first_bit = [](std::uint8_t m) {
            for (int j = 0; j < 3; ++j)
                if (m & (1u << j)) return j + 1;
            return 0;
        };
        // Second marginal branch at the point, if any: the exchange partner.
        auto marginal_partner = [&](int changed) {
            for (int j = 1; j <= 3; ++j) {
                if (j == changed || !at.sig.physical[std::size_t(j - 1)]) continue;
                if (at.reports[std::size_t(j - 1)].gap_real <= 10.0 * tol.eps_band * omega_m)
                    return j;
            }
            return 0;
        };
        if (lost && gained) {
            // Stability handed between two branches across the line.
            ev.branch_from = first_bit(lost);
            ev.branch_to = first_bit(gained);
        } else if (pair_appears) {
            // Branches 2 and 3 are born or vanish here; the steady state
            // jumps between the stable member of the pair and the survivor.
            const int changed = gained ? first_bit(gained) : first_bit(lost);
            const int survivor = kept ? first_bit(kept) : marginal;
            ev.branch_from = gained ? survivor : changed;
            ev.branch_to = gained ? changed : survivor;
        } else if (gained || lost) {
            // One branch flips stability with the branch structure intact:
            // it exchanges with a coincident (but unstable) partner root.
            const int changed = gained ? first_bit(gained) : first_bit(lost);
            int partner = marginal_partner(changed);
            if (partner == 0) partner = kept ? first_bit(kept) : changed;
            ev.branch_from = gained ? partner : changed;
            ev.branch_to = gained ? changed : partner;
        } else {
            ev.branch_from = ev.branch_to = marginal;
        }

        // The kind follows the marginal mode of the branch whose stability
        // flips, read off on a side where that branch exists: a zero (real)
        // crossing is soft, an imaginary pair is hard.
        {
            const int probe = gained ? first_bit(gained) : (lost ? first_bit(lost) : marginal);
            double lambda_im = 0.0;
            if (probe) {
                const PointAnalysis* side = nullptr;
                if (pa_hi.sig.physical[std::size_t(probe - 1)]) side = &pa_hi;
                if (pa_lo.sig.physical[std::size_t(probe - 1)]) {
                    if (!side || pa_lo.reports[std::size_t(probe - 1)].gap_real <
                                     side->reports[std::size_t(probe - 1)].gap_real)
                        side = &pa_lo;
                }
                if (side) lambda_im = side->reports[std::size_t(probe - 1)].gap_imag;
            }
            ev.lambda_imag = lambda_im;
        }

        // Photon-number jump between the branches the transition exchanges,
        // measured at the nearest point where both of them exist.
        double n_from = nan_d, n_to = nan_d;
        for (const PointAnalysis* pa : {&at, &pa_lo, &pa_hi}) {
            if (ev.branch_from < 1 || ev.branch_to < 1) break;
            if (!pa->sig.physical[std::size_t(ev.branch_from - 1)] ||
                !pa->sig.physical[std::size_t(ev.branch_to - 1)])
                continue;
            n_from = pa->branches[std::size_t(ev.branch_from - 1)].n_tilde;
            n_to = pa->branches[std::size_t(ev.branch_to - 1)].n_tilde;
            break;
        }
        double jump = (std::isfinite(n_from) && std::isfinite(n_to)) ? std::abs(n_to - n_from)
                                                                     : 0.0;

        const double hard_band = 1e-6 * omega_m;
        if (ev.lambda_imag > hard_band) {
            ev.kind = TransitionKind::hard;
            ev.n_jump = 0.0;
        } else {
            const double n_scale =
                std::max({std::isfinite(n_from) ? n_from : 0.0, std::isfinite(n_to) ? n_to : 0.0,
                          1e-12});
            ev.kind = (jump > 1e-3 * n_scale) ? TransitionKind::discontinuous
                                              : TransitionKind::continuous;
            ev.n_jump = (ev.kind == TransitionKind::discontinuous) ? jump : 0.0;
        }
        events.push_back(ev);

        prev_state = cur_state;
        prev_pos = pos;
    }
    return events;
}

// ---------------------------------------------------------------------------
// Boundary tracing
// ---------------------------------------------------------------------------

namespace {

// Normalized boundary margin; NaN when undefined (e.g. unphysical branch).
double boundary_margin(BoundaryKind kind, int branch_index, double dtilde, double g,
                       double kappa, double gamma, double omega_m) {
    if (g < 0.0) return nan_d;
    if (kind == BoundaryKind::fold) {
        const double k2 = (omega_m * omega_m + gamma * gamma) / omega_m;
        const double g2 = g * g;
        const double scale =
            g2 * g2 + kappa * kappa * k2 * k2 + 2.0 * g2 * std::abs(dtilde) * k2 + 1e-300;
        return fold_discriminant(dtilde, g, kappa, gamma, omega_m) / scale;
    }
    try {
        const SystemParams p = params_from_effective(dtilde, g, kappa, gamma, omega_m);
        const auto branches = photon_number_branches(p);
        const Branch& b = branches[std::size_t(branch_index - 1)];
        if (!b.physical) return nan_d;
        const Margins m = routh_hurwitz_margins(p, b);
        if (kind == BoundaryKind::soft) return m.soft / (m.soft_scale + 1e-300);
        return m.hard / (m.hard_scale + 1e-300);
    } catch (const Error&) {
        return nan_d;
    }
}

} // namespace

Polyline trace_boundary(BoundaryKind kind, int branch_index, double seed_dtilde, double seed_g,
                        double step, std::size_t max_points, double kappa, double gamma,
                        double omega_m) {
    if (!(step != 0.0) || max_points == 0)
        throw Error(Errc::invalid_argument, "trace_boundary: bad step or point budget");
    if (kind != BoundaryKind::fold && (branch_index < 1 || branch_index > 3))
        throw Error(Errc::invalid_argument, "trace_boundary: branch index must be 1..3");

    auto margin = [&](double dt, double g) {
        return boundary_margin(kind, branch_index, dt, g, kappa, gamma, omega_m);
    };
    auto gradient = [&](double dt, double g, double& gx, double& gy) {
        const double hx = 1e-7 * std::max(1.0, std::abs(dt));
        const double hy = 1e-7 * std::max(1.0, std::abs(g));
        const double fxp = margin(dt + hx, g), fxm = margin(dt - hx, g);
        const double fyp = margin(dt, g + hy), fym = margin(dt, g - hy);
        gx = (fxp - fxm) / (2.0 * hx);
        gy = (fyp - fym) / (2.0 * hy);
        return std::isfinite(gx) && std::isfinite(gy) && (gx != 0.0 || gy != 0.0);
    };
    // The gap scales as sqrt(margin) across a fold, so fold points must be
    // pinned much tighter than soft/hard points to stay inside the
    // marginality band when reclassified.
    const double target = (kind == BoundaryKind::fold) ? 1e-15 : 1e-12;
    const double accept = (kind == BoundaryKind::fold) ? 1e-13 : 1e-8;
    auto correct = [&](double& dt, double& g) {
        for (int it = 0; it < 30; ++it) {
            const double f = margin(dt, g);
            if (!std::isfinite(f)) return false;
            if (std::abs(f) < target) return true;
            double gx, gy;
            if (!gradient(dt, g, gx, gy)) return false;
            const double n2 = gx * gx + gy * gy;
            dt -= f * gx / n2;
            g -= f * gy / n2;
        }
        return std::abs(margin(dt, g)) < accept;
    };

    Polyline line;
    double dt = seed_dtilde, g = seed_g;
    if (!correct(dt, g)) {
        line.lost_track = true;
        return line;
    }
    line.points.push_back({dt, g});

    const double h = std::abs(step);
    const double direction = step > 0.0 ? 1.0 : -1.0;
    double tx = 0.0, ty = 0.0; // previous tangent, for orientation continuity

    for (std::size_t k = 1; k < max_points; ++k) {
        double gx, gy;
        if (!gradient(dt, g, gx, gy)) {
            line.lost_track = true;
            break;
        }
        double nx = -gy, ny = gx;
        const double nn = std::hypot(nx, ny);
        nx /= nn;
        ny /= nn;
        if (k == 1) {
            // Initial orientation: positive step heads toward +G, ties +dtilde.
            double want = (std::abs(ny) >= 0.3) ? ny : nx;
            if (want * direction < 0.0) {
                nx = -nx;
                ny = -ny;
            }
        } else if (nx * tx + ny * ty < 0.0) {
            nx = -nx;
            ny = -ny;
        }
        tx = nx;
        ty = ny;

        double ndt = dt + h * nx;
        double ng = g + h * ny;
        if (!correct(ndt, ng)) {
            line.lost_track = true;
            break;
        }
        line.points.push_back({ndt, ng});
        dt = ndt;
        g = ng;
    }
    return line;
}

// ---------------------------------------------------------------------------
// Critical point and exponents
// ---------------------------------------------------------------------------

namespace {

// G on the branch-1 soft boundary at a given dtilde < 0 (margin zero set is
// linear in G^2).
double soft1_g(double dtilde, double kappa, double gamma, double omega_m) {
    if (!(dtilde < 0.0)) return nan_d;
    const double k2 = omega_m * omega_m + gamma * gamma;
    const double g2 = -(k2 * (kappa * kappa + dtilde * dtilde)) / (4.0 * omega_m * dtilde);
    return std::sqrt(g2);
}

} // namespace

CriticalPoint find_critical_point(double kappa, double gamma, double omega_m) {
    if (!(kappa > 0.0))
        throw Error(Errc::invalid_argument, "find_critical_point: kappa must be positive");

    auto soft_n = [&](double dt, double g) {
        return boundary_margin(BoundaryKind::soft, 1, dt, g, kappa, gamma, omega_m);
    };
    auto fold_n = [&](double dt, double g) {
        return boundary_margin(BoundaryKind::fold, 0, dt, g, kappa, gamma, omega_m);
    };
    auto fold_along_soft = [&](double dt) {
        return std::abs(fold_n(dt, soft1_g(dt, kappa, gamma, omega_m)));
    };

    // Scan the soft line for the closest approach of the fold.
    const double lo = -6.0 * kappa, hi = -0.05 * kappa;
    int best = -1;
    double best_val = std::numeric_limits<double>::infinity();
    constexpr int n_scan = 600;
    for (int i = 0; i <= n_scan; ++i) {
        const double dt = lo + (hi - lo) * double(i) / double(n_scan);
        const double v = fold_along_soft(dt);
        if (std::isfinite(v) && v < best_val) {
            best_val = v;
            best = i;
        }
    }
    if (best < 0 || best_val > 1e-2)
        throw Error(Errc::no_intersection, "find_critical_point: boundaries do not meet");

    double a = lo + (hi - lo) * double(std::max(best - 1, 0)) / double(n_scan);
    double b = lo + (hi - lo) * double(std::min(best + 1, n_scan)) / double(n_scan);
    // Golden-section on the tangency gap.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = fold_along_soft(x1), f2 = fold_along_soft(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-13; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = fold_along_soft(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = fold_along_soft(x2);
        }
    }
    double dt = 0.5 * (a + b);
    double g = soft1_g(dt, kappa, gamma, omega_m);

    // Damped Gauss-Newton polish on the normalized margin pair. The zero
    // curves touch here, so the Jacobian degenerates; damping keeps the
    // iteration contracting to the tangency point.
    double lambda = 1e-6;
    for (int it = 0; it < 200; ++it) {
        const double f1v = soft_n(dt, g), f2v = fold_n(dt, g);
        const double fn = std::max(std::abs(f1v), std::abs(f2v));
        if (fn < 1e-12) break;
        const double hx = 1e-8 * std::max(1.0, std::abs(dt));
        const double hy = 1e-8 * std::max(1.0, std::abs(g));
        const double j11 = (soft_n(dt + hx, g) - soft_n(dt - hx, g)) / (2.0 * hx);
        const double j12 = (soft_n(dt, g + hy) - soft_n(dt, g - hy)) / (2.0 * hy);
        const double j21 = (fold_n(dt + hx, g) - fold_n(dt - hx, g)) / (2.0 * hx);
        const double j22 = (fold_n(dt, g + hy) - fold_n(dt, g - hy)) / (2.0 * hy);
        // Solve (J^T J + lambda I) s = -J^T F.
        const double a11 = j11 * j11 + j21 * j21 + lambda;
        const double a12 = j11 * j12 + j21 * j22;
        const double a22 = j12 * j12 + j22 * j22 + lambda;
        const double b1 = -(j11 * f1v + j21 * f2v);
        const double b2 = -(j12 * f1v + j22 * f2v);
        const double det = a11 * a22 - a12 * a12;
        if (!(std::abs(det) > 1e-300)) break;
        const double sx = (b1 * a22 - b2 * a12) / det;
        const double sy = (b2 * a11 - b1 * a12) / det;
        const double nf = std::max(std::abs(soft_n(dt + sx, g + sy)),
                                   std::abs(fold_n(dt + sx, g + sy)));
        if (nf < fn) {
            dt += sx;
            g += sy;
            lambda = std::max(lambda * 0.3, 1e-12);
        } else {
            lambda *= 10.0;
            if (lambda > 1e6) break;
        }
    }

    CriticalPoint cp;
    cp.dtilde_c = dt;
    cp.g_c = g;
    cp.soft_residual = std::abs(soft_n(dt, g));
    cp.fold_residual = std::abs(fold_n(dt, g));
    if (std::max(cp.soft_residual, cp.fold_residual) > 1e-9)
        throw Error(Errc::no_intersection, "find_critical_point: refinement did not converge");
    return cp;
}

ExponentFit estimate_exponents(double kappa, double gamma, double omega_m, double dist_lo,
                               double dist_hi, int n_samples, ApproachSide side,
                               const Tolerances& tol) {
    if (!(dist_hi > dist_lo) || n_samples < 5)
        throw Error(Errc::invalid_argument, "estimate_exponents: bad window");

    ExponentFit fit;
    fit.critical = find_critical_point(kappa, gamma, omega_m);
    fit.window_lo = std::max(dist_lo, 1e-5); // numerical gap floor
    fit.window_hi = dist_hi;

    std::vector<double> dist, adr, fluct;
    for (int i = 0; i < n_samples; ++i) {
        const double f = double(i) / double(n_samples - 1);
        const double d = fit.window_lo * std::pow(fit.window_hi / fit.window_lo, f);
        const double g =
            side == ApproachSide::below ? fit.critical.g_c - d : fit.critical.g_c + d;
        PointAnalysis pa = analyze_point(fit.critical.dtilde_c, g, kappa, gamma, omega_m, tol);
        const StabilityReport& rep = pa.reports[0];
        if (!pa.branches[0].physical || rep.cls != StabilityClass::stable) {
            std::ostringstream os;
            os << "sample at |G-G_c|=" << d << " is not on the stable side (class "
               << stability_class_name(rep.cls) << ")";
            throw Error(Errc::fit_range_crosses_boundary, os.str());
        }
        GaussianState st = steady_covariance(pa.params, pa.branches[0], tol);
        dist.push_back(d);
        adr.push_back(rep.gap_real);
        fluct.push_back(photon_fluctuations(st.cov));
    }

    const LogLogFit fa = fit_loglog(dist, adr);
    const LogLogFit fc = fit_loglog(dist, fluct);
    fit.nu_adr = fa.slope;
    fit.r2_adr = fa.r_squared;
    fit.nu_c = fc.slope;
    fit.r2_c = fc.r_squared;
    fit.n_samples = n_samples;
    return fit;
}

std::vector<SpectrumSample> spectrum_sweep(double dtilde, double g_lo, double g_hi, int n_points,
                                           int branch_index, double kappa, double gamma,
                                           double omega_m) {
    if (n_points < 2) throw Error(Errc::invalid_argument, "spectrum_sweep: need >= 2 points");
    if (branch_index < 0 || branch_index > 3)
        throw Error(Errc::invalid_argument, "spectrum_sweep: branch index must be 0..3");

    std::vector<SpectrumSample> out;
    for (int i = 0; i < n_points; ++i) {
        const double g = g_lo + (g_hi - g_lo) * double(i) / double(n_points - 1);
        const SystemParams p = params_from_effective(dtilde, g, kappa, gamma, omega_m);
        const auto branches = photon_number_branches(p);
        for (int j = 1; j <= 3; ++j) {
            if (branch_index != 0 && branch_index != j) continue;
            SpectrumSample s;
            s.g = g;
            s.branch_index = j;
            s.physical = branches[std::size_t(j - 1)].physical;
            if (s.physical) {
                const Spectrum4 sp = eig4(drift_matrix(p, branches[std::size_t(j - 1)]));
                s.eigenvalues = sp.eigenvalues;
            } else {
                s.eigenvalues = {Complex(nan_d, nan_d), Complex(nan_d, nan_d),
                                 Complex(nan_d, nan_d), Complex(nan_d, nan_d)};
            }
            out.push_back(s);
        }
    }
    return out;
}

} // namespace dptom
