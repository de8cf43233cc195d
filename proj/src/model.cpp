#include "dptom/model.hpp"

#include "dptom/numerics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace dptom {

namespace {

void validate_rates(double kappa, double gamma, double omega_m) {
    if (!(omega_m > 0.0))
        throw Error(Errc::non_positive_frequency, "omega_m must be positive");
    if (kappa < 0.0 || gamma < 0.0)
        throw Error(Errc::negative_rate, "kappa and gamma must be nonnegative");
    if (kappa == 0.0 && gamma == 0.0)
        throw Error(Errc::invalid_argument, "at least one damping channel required");
}

} // namespace

std::array<double, 4> photon_cubic_coefficients(double delta, double e_tilde, double kappa,
                                                double gamma, double omega_m) {
    // (delta + c n)^2 n + kappa^2 n - e_tilde^2 with c = 2 omega_m / (omega_m^2 + gamma^2)
    const double c = 2.0 * omega_m / (omega_m * omega_m + gamma * gamma);
    return {c * c, 2.0 * c * delta, delta * delta + kappa * kappa, -e_tilde * e_tilde};
}

SystemParams params_from_effective(double dtilde, double g_eff, double kappa, double gamma,
                                   double omega_m) {
    validate_rates(kappa, gamma, omega_m);
    if (g_eff < 0.0)
        throw Error(Errc::invalid_argument, "g_eff must be nonnegative");

    SystemParams p;
    p.kappa = kappa;
    p.gamma = gamma;
    p.omega_m = omega_m;
    p.dtilde = dtilde;
    p.g_eff = g_eff;
    p.delta = dtilde - 2.0 * omega_m * g_eff * g_eff / (omega_m * omega_m + gamma * gamma);
    p.e_tilde = g_eff * std::hypot(dtilde, kappa);
    return p;
}

SystemParams effective_from_bare(double delta, double e_tilde, double kappa, double gamma,
                                 double omega_m) {
    validate_rates(kappa, gamma, omega_m);
    if (e_tilde < 0.0)
        throw Error(Errc::invalid_argument, "e_tilde must be nonnegative");

    SystemParams p;
    p.kappa = kappa;
    p.gamma = gamma;
    p.omega_m = omega_m;
    p.delta = delta;
    p.e_tilde = e_tilde;

    if (e_tilde == 0.0) {
        p.dtilde = delta;
        p.g_eff = 0.0;
        return p;
    }

    const auto c = photon_cubic_coefficients(delta, e_tilde, kappa, gamma, omega_m);
    const CubicRoots roots = cubic_roots(c[0], c[1], c[2], c[3]);

    // Reference root: the one continuously connected to n=0 under a drive
    // ramp, which is always the smallest real nonnegative root.
    double n1 = std::numeric_limits<double>::infinity();
    for (const Complex& r : roots.roots) {
        const double re = r.real();
        if (std::abs(r.imag()) > 1e-9 * std::max(1.0, std::abs(re))) continue;
        if (re < -1e-12) continue;
        n1 = std::min(n1, std::max(re, 0.0));
    }
    if (!std::isfinite(n1)) {
        std::ostringstream os;
        os << "no real nonnegative photon-number root at delta=" << delta
           << " e_tilde=" << e_tilde;
        throw Error(Errc::cubic_solve_failure, os.str());
    }

    p.g_eff = std::sqrt(n1);
    p.dtilde = delta + 2.0 * omega_m * n1 / (omega_m * omega_m + gamma * gamma);
    return p;
}

} // namespace dptom
