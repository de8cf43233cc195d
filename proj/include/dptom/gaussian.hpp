#pragma once

// Quantum steady-state layer: steady covariance from the Lyapunov equation,
// joint first/second-moment dynamics, logarithmic negativity, squeezing,
// photon-number fluctuations and Wigner-density evaluation.
//
// Convention: vacuum variance 1/2 (x = (a + a^dag)/sqrt(2)), so a state is
// physical when both symplectic eigenvalues are >= 1/2.

#include "dptom/core.hpp"
#include "dptom/semiclassical.hpp"
#include "dptom/stability.hpp"

#include <vector>

namespace dptom {

struct GaussianState {
    Vec4 mean{};   ///< steady first moments in fluctuation coordinates (zero)
    Mat4 cov{};    ///< symmetric steady covariance
    double lyapunov_residual = 0.0;
};

/// Steady covariance of a strictly stable branch. Throws Errc::unstable_drift
/// near and beyond transition lines (the Gaussian steady state ceases to
/// exist there) and Errc::singular_system exactly at gap closure.
GaussianState steady_covariance(const SystemParams& p, const Branch& b,
                                const Tolerances& tol = {});

struct MomentTrajectory {
    std::vector<double> t;
    std::vector<Vec4> mean;
    std::vector<Mat4> cov;
};

/// Integrate d<x>/dt = A<x> and dV/dt = A V + V A^T + D jointly.
MomentTrajectory evolve_moments(const SystemParams& p, const Branch& b, const Vec4& x0,
                                const Mat4& v0, double t_end, double tol,
                                int n_samples = 200);

struct EntanglementReport {
    double sigma = 0.0;     ///< det a + det c - 2 det b over the 2x2 blocks
    double eta_minus = 0.0; ///< smallest partially transposed symplectic eigenvalue
    double log_neg = 0.0;   ///< max(0, -ln 2 eta_minus), natural-log units
    bool entangled = false; ///< eta_minus < 1/2
};

/// Logarithmic negativity of a two-mode covariance.
/// Throws Errc::unphysical_covariance when a symplectic eigenvalue is below
/// 1/2 - 1e-9 and Errc::negative_discriminant if the inner discriminant is
/// negative beyond the clamp band.
EntanglementReport log_negativity(const Mat4& v);

struct SqueezingReport {
    double min_eigenvalue = 0.0; ///< hybrid-mode squeezing when < 1/2
    double min_diagonal = 0.0;   ///< local quadrature squeezing when < 1/2
    bool squeezed_hybrid = false;
    bool squeezed_local = false;
};

SqueezingReport squeezing_spectrum(const Mat4& v);

/// Cavity occupation (V11 + V22 - 1)/2, clamped at zero within -1e-9.
double photon_fluctuations(const Mat4& v);

/// W(x) = exp(-1/2 (x-xs)^T V^-1 (x-xs)) / (4 pi^2 sqrt(det V)).
/// Throws Errc::singular_covariance when det V < 1e-14.
double wigner_density(const GaussianState& state, const Vec4& x);

/// Symplectic (Williamson) eigenvalues of a 4x4 covariance, ascending.
std::array<double, 2> symplectic_eigenvalues(const Mat4& v);

} // namespace dptom
