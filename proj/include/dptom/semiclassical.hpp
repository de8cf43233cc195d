#pragma once

// The three semiclassical stationary branches and the rescaled nonlinear
// mean-field dynamics: trajectories, basins and quasi-static hysteresis.

#include "dptom/core.hpp"
#include "dptom/model.hpp"

#include <vector>

namespace dptom {

struct Branch {
    int index = 0;        ///< 1, 2 or 3
    bool physical = false;
    double n_tilde = 0.0; ///< rescaled photon number (real part when unphysical)
    Complex alpha_tilde{};
    Complex beta_tilde{};
};

/// Branch 1 is n1 = G^2 and always physical. Branches 2 ("-" discriminant
/// root) and 3 ("+" root) come from the closed form; physicality means real
/// within 1e-9*max(1,|Re|) and nonnegative within -1e-12 (clamped to zero).
/// Amplitudes are filled for physical branches, NaN otherwise.
std::array<Branch, 3> photon_number_branches(const SystemParams& p);

/// Single branch with amplitudes; throws Errc::unphysical_branch.
Branch branch_amplitudes(const SystemParams& p, int j);

/// Effective detuning of a branch: dtilde + 2 omega_m (n_j - G^2)/(omega_m^2+gamma^2).
double branch_detuning(const SystemParams& p, const Branch& b);

/// Discriminant of the branch-2/3 closed form; negative means the pair is
/// complex (unphysical). Its zero set is the fold boundary where the two
/// branches merge.
double fold_discriminant(double dtilde, double g_eff, double kappa, double gamma,
                         double omega_m = 1.0);

struct SemiclassicalTrajectory {
    std::vector<double> t;
    std::vector<Complex> alpha;
    std::vector<Complex> beta;
};

/// Integrate the rescaled mean-field equations from the given amplitudes.
SemiclassicalTrajectory integrate_semiclassical(const SystemParams& p, Complex alpha0,
                                                Complex beta0, double t_end, double tol,
                                                int n_samples = 200);

struct DwellOptions {
    double rel_change = 1e-8;  ///< per-period change considered stationary
    double max_periods = 1e4;  ///< dwell cap per drive value
    double ode_tol = 1e-10;
};

struct HysteresisCurve {
    std::vector<double> e_tilde;     ///< the drive grid (ascending)
    std::vector<double> n_up;        ///< quasi-static photon number, up sweep
    std::vector<double> n_down;      ///< same grid, down sweep
    std::vector<bool> converged_up;
    std::vector<bool> converged_down;
};

/// Quasi-static drive ramp at fixed bare detuning: integrate to a near-steady
/// state at each drive value, warm-starting from the previous state; then the
/// same backwards. Non-converged points are flagged, not errors.
HysteresisCurve hysteresis_sweep(const SystemParams& base, double e_lo, double e_hi,
                                 int n_points, const DwellOptions& opts = {});

} // namespace dptom
