#include "dptom/semiclassical.hpp"

#include "dptom/numerics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace dptom {

namespace {

constexpr double nan_d = std::numeric_limits<double>::quiet_NaN();

Complex amplitude_alpha(const SystemParams& p, double n_j) {
    // alpha_j = i G sqrt(dtilde^2 + kappa^2) / (Delta_j + i kappa)
    const double k2 = p.omega_m * p.omega_m + p.gamma * p.gamma;
    const double delta_j = p.dtilde + 2.0 * p.omega_m * (n_j - p.g_eff * p.g_eff) / k2;
    const Complex num = Complex(0.0, 1.0) * p.g_eff * std::hypot(p.dtilde, p.kappa);
    return num / Complex(delta_j, p.kappa);
}

Complex amplitude_beta(const SystemParams& p, double n_j) {
    // beta_j = -n_j / (omega_m - i gamma)
    return -n_j / Complex(p.omega_m, -p.gamma);
}

} // namespace

double branch_detuning(const SystemParams& p, const Branch& b) {
    const double k2 = p.omega_m * p.omega_m + p.gamma * p.gamma;
    return p.dtilde + 2.0 * p.omega_m * (b.n_tilde - p.g_eff * p.g_eff) / k2;
}

double fold_discriminant(double dtilde, double g_eff, double kappa, double gamma,
                         double omega_m) {
    const double k2 = (omega_m * omega_m + gamma * gamma) / omega_m;
    const double g2 = g_eff * g_eff;
    return g2 * g2 - kappa * kappa * k2 * k2 - 2.0 * g2 * dtilde * k2;
}

std::array<Branch, 3> photon_number_branches(const SystemParams& p) {
    std::array<Branch, 3> out;
    const double g2 = p.g_eff * p.g_eff;
    const double k2 = (p.omega_m * p.omega_m + p.gamma * p.gamma) / p.omega_m;

    // Branch 1: the reference, n1 = G^2, physical everywhere.
    out[0].index = 1;
    out[0].physical = true;
    out[0].n_tilde = g2;
    out[0].alpha_tilde = amplitude_alpha(p, g2);
    out[0].beta_tilde = amplitude_beta(p, g2);

    // Branches 2 ("-") and 3 ("+") from the closed form.
    const double half = 0.5 * g2 - 0.5 * p.dtilde * k2;
    const double disc = g2 * g2 - p.kappa * p.kappa * k2 * k2 - 2.0 * g2 * p.dtilde * k2;

    for (int j = 2; j <= 3; ++j) {
        Branch& b = out[std::size_t(j - 1)];
        b.index = j;
        const double sign = (j == 3) ? 1.0 : -1.0;
        if (disc >= 0.0) {
            const double n = half + sign * 0.5 * std::sqrt(disc);
            b.n_tilde = n;
            b.physical = n > -1e-12;
            if (b.physical) {
                b.n_tilde = std::max(n, 0.0);
                b.alpha_tilde = amplitude_alpha(p, b.n_tilde);
                b.beta_tilde = amplitude_beta(p, b.n_tilde);
            }
        } else {
            // Complex pair: real within |Im| < 1e-9 max(1,|Re|) would require
            // sqrt(|disc|)/2 below the band, which the >= 0 branch covers.
            b.n_tilde = half;
            b.physical = 0.5 * std::sqrt(-disc) < 1e-9 * std::max(1.0, std::abs(half));
            if (b.physical) {
                b.n_tilde = std::max(half, 0.0);
                b.alpha_tilde = amplitude_alpha(p, b.n_tilde);
                b.beta_tilde = amplitude_beta(p, b.n_tilde);
            }
        }
        if (!b.physical) {
            b.alpha_tilde = Complex(nan_d, nan_d);
            b.beta_tilde = Complex(nan_d, nan_d);
        }
    }

    // Every physical root must satisfy the steady-state cubic.
    const auto c = photon_cubic_coefficients(p.delta, p.e_tilde, p.kappa, p.gamma, p.omega_m);
    double scale = std::max({std::abs(c[0]), std::abs(c[1]), std::abs(c[2]), std::abs(c[3])});
    for (const Branch& b : out) {
        if (!b.physical) continue;
        const double n = b.n_tilde;
        const double val = ((c[0] * n + c[1]) * n + c[2]) * n + c[3];
        const double mag = std::abs(c[0]) * n * n * n + std::abs(c[1]) * n * n +
                           std::abs(c[2]) * n + std::abs(c[3]);
        if (std::abs(val) > 1e-9 * std::max(mag, scale)) {
            std::ostringstream os;
            os << "branch " << b.index << " root residual " << std::abs(val) / std::max(mag, scale)
               << " at dtilde=" << p.dtilde << " g=" << p.g_eff;
            throw Error(Errc::cubic_solve_failure, os.str());
        }
    }
    return out;
}

Branch branch_amplitudes(const SystemParams& p, int j) {
    if (j < 1 || j > 3)
        throw Error(Errc::invalid_argument, "branch index must be 1, 2 or 3");
    const auto branches = photon_number_branches(p);
    const Branch& b = branches[std::size_t(j - 1)];
    if (!b.physical) {
        std::ostringstream os;
        os << "branch " << j << " unphysical at dtilde=" << p.dtilde << " g=" << p.g_eff;
        throw Error(Errc::unphysical_branch, os.str());
    }
    return b;
}

namespace {

// Mean-field right-hand side in (Re a, Im a, Re b, Im b).
struct MeanFieldRhs {
    double delta, e_tilde, kappa, gamma, omega;

    void operator()(double, std::span<const double> y, std::span<double> dy) const {
        const double ar = y[0], ai = y[1], br = y[2], bi = y[3];
        const double det = delta - 2.0 * br; // effective detuning with displaced mechanics
        dy[0] = -det * ai - kappa * ar + e_tilde;
        dy[1] = det * ar - kappa * ai;
        dy[2] = omega * bi - gamma * br;
        dy[3] = -omega * br - gamma * bi - (ar * ar + ai * ai);
    }
};

OdeRhs make_rhs(const SystemParams& p) {
    MeanFieldRhs rhs{p.delta, p.e_tilde, p.kappa, p.gamma, p.omega_m};
    return [rhs](double t, std::span<const double> y, std::span<double> dy) { rhs(t, y, dy); };
}

} // namespace

SemiclassicalTrajectory integrate_semiclassical(const SystemParams& p, Complex alpha0,
                                                Complex beta0, double t_end, double tol,
                                                int n_samples) {
    if (n_samples < 2) throw Error(Errc::invalid_argument, "need at least 2 samples");
    std::vector<double> samples(std::size_t(n_samples), 0.0);
    for (int i = 0; i < n_samples; ++i)
        samples[std::size_t(i)] = t_end * double(i) / double(n_samples - 1);

    const std::array<double, 4> y0 = {alpha0.real(), alpha0.imag(), beta0.real(), beta0.imag()};
    OdeSolution sol = integrate_ode(make_rhs(p), y0, 0.0, t_end, tol, samples);

    SemiclassicalTrajectory tr;
    tr.t = sol.t;
    tr.alpha.reserve(sol.y.size());
    tr.beta.reserve(sol.y.size());
    for (const auto& y : sol.y) {
        tr.alpha.emplace_back(y[0], y[1]);
        tr.beta.emplace_back(y[2], y[3]);
    }
    return tr;
}

HysteresisCurve hysteresis_sweep(const SystemParams& base, double e_lo, double e_hi,
                                 int n_points, const DwellOptions& opts) {
    if (n_points < 2) throw Error(Errc::invalid_argument, "need at least 2 ramp points");
    if (!(e_hi > e_lo) || e_lo < 0.0)
        throw Error(Errc::invalid_argument, "ramp must satisfy 0 <= e_lo < e_hi");

    HysteresisCurve curve;
    curve.e_tilde.resize(std::size_t(n_points));
    curve.n_up.assign(std::size_t(n_points), 0.0);
    curve.n_down.assign(std::size_t(n_points), 0.0);
    curve.converged_up.assign(std::size_t(n_points), false);
    curve.converged_down.assign(std::size_t(n_points), false);
    for (int i = 0; i < n_points; ++i)
        curve.e_tilde[std::size_t(i)] = e_lo + (e_hi - e_lo) * double(i) / double(n_points - 1);

    const double period = 2.0 * M_PI / base.omega_m;

    auto dwell = [&](std::vector<double>& y, double e_tilde, bool& converged) {
        SystemParams p = base;
        p.e_tilde = e_tilde;
        const OdeRhs rhs = make_rhs(p);
        double t = 0.0;
        converged = false;
        std::vector<double> prev = y;
        for (double periods = 0.0; periods < opts.max_periods; periods += 1.0) {
            advance_ode(rhs, y, t, t + period, opts.ode_tol);
            double change = 0.0, norm = 0.0;
            for (std::size_t k = 0; k < 4; ++k) {
                change = std::max(change, std::abs(y[k] - prev[k]));
                norm = std::max(norm, std::abs(y[k]));
            }
            if (change < opts.rel_change * (1.0 + norm)) {
                converged = true;
                break;
            }
            prev = y;
        }
        return y[0] * y[0] + y[1] * y[1];
    };

    // Start from the reference steady state at the low end of the ramp.
    std::vector<double> y(4, 0.0);
    {
        SystemParams p0 = effective_from_bare(base.delta, curve.e_tilde.front(), base.kappa,
                                              base.gamma, base.omega_m);
        Branch b = branch_amplitudes(p0, 1);
        y = {b.alpha_tilde.real(), b.alpha_tilde.imag(), b.beta_tilde.real(),
             b.beta_tilde.imag()};
    }

    for (int i = 0; i < n_points; ++i) {
        bool conv = false;
        curve.n_up[std::size_t(i)] = dwell(y, curve.e_tilde[std::size_t(i)], conv);
        curve.converged_up[std::size_t(i)] = conv;
    }
    for (int i = n_points - 1; i >= 0; --i) {
        bool conv = false;
        curve.n_down[std::size_t(i)] = dwell(y, curve.e_tilde[std::size_t(i)], conv);
        curve.converged_down[std::size_t(i)] = conv;
    }
    return curve;
}

} // namespace dptom
