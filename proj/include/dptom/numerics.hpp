#pragma once

// Self-contained numerical kernels: closed-form cubic/quartic root solving
// with Newton polishing, a 4x4 real eigensolver, a dense Kronecker-form
// continuous-Lyapunov solver, an adaptive embedded Runge-Kutta integrator,
// and log-log linear regression. No external dependencies.

#include "dptom/core.hpp"

#include <functional>
#include <span>
#include <vector>

namespace dptom {

struct CubicRoots {
    std::array<Complex, 3> roots;
    std::array<double, 3> residuals; ///< |p(root)| relative to evaluation magnitude
};

/// All three complex roots of c3 x^3 + c2 x^2 + c1 x + c0, Newton-polished.
/// Conjugate pairing is enforced for the real coefficients given.
/// Throws Errc::degenerate_leading_coefficient when |c3| is negligible
/// against the other coefficients.
CubicRoots cubic_roots(double c3, double c2, double c1, double c0);

struct Spectrum4 {
    /// Sorted ascending by |Re|, ties by |Im|, then by sign of Im.
    std::array<Complex, 4> eigenvalues;
    std::array<double, 4> residuals;
};

/// Eigenvalues of a real 4x4 matrix: the characteristic quartic is expanded
/// through Newton's identities, solved in closed form and each root polished
/// against the quartic. Throws Errc::convergence_failure if any residual
/// stays above tolerance.
Spectrum4 eig4(const Mat4& a);

/// Coefficients {c0, c1, c2, c3} of det(xI - A) = x^4 + c3 x^3 + c2 x^2 + c1 x + c0.
std::array<double, 4> characteristic_quartic(const Mat4& a);

/// Solve A V + V A^T + D = 0 for symmetric V via the 16x16 Kronecker system
/// with partially pivoted elimination and iterative refinement.
/// Preconditions: max Re(eig(A)) < -eps_stab (else Errc::unstable_drift),
/// D symmetric. Throws Errc::singular_system when the linear system is
/// numerically singular, which happens at gap closure.
Mat4 solve_lyapunov(const Mat4& a, const Mat4& d, double eps_stab = Tolerances{}.eps_stab);

/// Eigenvalues of a symmetric 4x4 matrix (cyclic Jacobi), ascending.
std::array<double, 4> sym_eigenvalues(const Mat4& v);

using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct OdeSolution {
    std::vector<double> t;              ///< sample times actually delivered
    std::vector<std::vector<double>> y; ///< state at each sample time
    std::size_t steps = 0;
    std::size_t rejected = 0;
};

/// Adaptive Dormand-Prince 5(4) integration from t0 to t1 with absolute and
/// relative local error per step below tol. Steps land exactly on the
/// requested sample times; with no sample times only the endpoint is
/// returned. Throws Errc::step_size_underflow near blow-up (message carries
/// the last valid time).
OdeSolution integrate_ode(const OdeRhs& f, std::span<const double> y0, double t0,
                          double t1, double tol,
                          std::span<const double> sample_times = {});

/// Single adaptive advance of `y` in place from `t` to `t_target`.
/// Used by dwell loops that integrate period by period.
void advance_ode(const OdeRhs& f, std::vector<double>& y, double& t, double t_target,
                 double tol);

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Least-squares line through (ln x, ln y). Throws Errc::non_positive_data
/// or Errc::insufficient_points (< 5 points).
LogLogFit fit_loglog(std::span<const double> xs, std::span<const double> ys);

} // namespace dptom
