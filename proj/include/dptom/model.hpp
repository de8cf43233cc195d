#pragma once

// Parameter records and conversions between the bare drive coordinates
// (delta, e_tilde) and the effective coordinates (dtilde, g_eff). Effective
// coordinates are the canonical internal representation; bare coordinates
// are an I/O convenience.

#include "dptom/core.hpp"

namespace dptom {

/// Rates and drive coordinates, all dimensionless relative to omega_m.
/// Both coordinate pairs are kept consistent by the constructors below.
struct SystemParams {
    double kappa = 0.0;   ///< cavity amplitude damping rate
    double gamma = 0.0;   ///< mechanical damping rate
    double omega_m = 1.0; ///< mechanical frequency (the global unit)
    double delta = 0.0;   ///< bare detuning
    double e_tilde = 0.0; ///< rescaled drive, >= 0
    double dtilde = 0.0;  ///< effective detuning
    double g_eff = 0.0;   ///< effective coupling, >= 0
};

/// Build params from effective coordinates:
///   delta   = dtilde - 2 omega_m g^2 / (omega_m^2 + gamma^2)
///   e_tilde = g sqrt(dtilde^2 + kappa^2)
SystemParams params_from_effective(double dtilde, double g_eff, double kappa,
                                   double gamma, double omega_m = 1.0);

/// Build params from bare coordinates. Solves the steady-state cubic in the
/// rescaled photon number and selects the reference root: the one reached by
/// adiabatically ramping the drive from zero, i.e. the smallest real
/// nonnegative root. Throws Errc::cubic_solve_failure if no such root exists
/// (cannot happen for valid inputs).
SystemParams effective_from_bare(double delta, double e_tilde, double kappa,
                                 double gamma, double omega_m = 1.0);

/// Coefficients {c3, c2, c1, c0} of the steady-state photon-number cubic
///   c3 n^3 + c2 n^2 + c1 n + c0 = 0
/// at the given bare coordinates.
std::array<double, 4> photon_cubic_coefficients(double delta, double e_tilde,
                                                double kappa, double gamma,
                                                double omega_m);

} // namespace dptom
