#pragma once

// Per-branch drift matrix, Routh-Hurwitz margins, drift spectrum and the
// region classification of a point in the (dtilde, G) plane.

#include "dptom/core.hpp"
#include "dptom/model.hpp"
#include "dptom/numerics.hpp"
#include "dptom/semiclassical.hpp"

#include <cstdint>

namespace dptom {

/// Drift matrix in the quadrature basis (x_c, p_c, x_m, p_m).
/// The diagonal is (-kappa, -kappa, -gamma, -gamma); the mechanical row
/// couples through (2 Re alpha, -2 Im alpha).
Mat4 drift_matrix(const SystemParams& p, const Branch& b);

/// Diffusion matrix diag(kappa, kappa, gamma, gamma).
Mat4 diffusion_matrix(const SystemParams& p);

struct Margins {
    double hard = 0.0;      ///< hard-mode criterion left-hand side
    double soft = 0.0;      ///< soft-mode criterion left-hand side
    double hard_scale = 0.0; ///< sum of term magnitudes, for normalization
    double soft_scale = 0.0;
};

/// Both margins, positive means stable. Throws Errc::unphysical_branch.
Margins routh_hurwitz_margins(const SystemParams& p, const Branch& b);

enum class StabilityClass : std::uint8_t {
    stable,
    soft_unstable,
    hard_unstable,
    both_unstable,
    marginal,
    unphysical,
};

const char* stability_class_name(StabilityClass c);

struct StabilityReport {
    int branch_index = 0;
    double hard_margin = 0.0;
    double soft_margin = 0.0;
    Spectrum4 spectrum{};
    double gap_real = 0.0; ///< |Re lambda_1|
    double gap_imag = 0.0; ///< |Im lambda_1|
    StabilityClass cls = StabilityClass::unphysical;
    bool margins_consistent = true; ///< margin signs agree with the spectrum
};

/// Spectrum, gap and class for one branch. The class comes from the spectrum
/// with the margins as cross-check; instability kind comes from the margin
/// signs (hard < 0, soft < 0), falling back to Im(lambda) of the growing mode.
StabilityReport drift_spectrum(const SystemParams& p, const Branch& b,
                               const Tolerances& tol = {});

enum class Region : std::uint8_t { A, B, C, D, E, F, G, boundary, unknown };

const char* region_name(Region r);

struct RegionSignature {
    std::array<StabilityClass, 3> branch_class{StabilityClass::unphysical,
                                               StabilityClass::unphysical,
                                               StabilityClass::unphysical};
    std::array<bool, 3> physical{false, false, false};
    std::uint8_t stable_mask = 0; ///< bit j-1 set when branch j is stable
    Region label = Region::unknown;
    bool consistent = true;
};

/// Evaluate all three branches at a point and assign the region label.
/// Points where any physical branch sits inside the marginality band are
/// labeled boundary. The label lookup is calibrated at kappa=1/4, gamma=0:
///  stable {I}     -> D when branches 2,3 are unphysical, E otherwise
///  stable {I,III} -> B,  {I,II} -> C,  {II,III} -> A
///  stable {II}    -> F when branch 1 is soft-unstable, G when hard-unstable
/// Anything else (including an empty stable set) -> unknown.
RegionSignature classify_point(double dtilde, double g_eff, double kappa, double gamma,
                               double omega_m = 1.0, const Tolerances& tol = {});

struct PointAnalysis {
    SystemParams params;
    std::array<Branch, 3> branches;
    std::array<StabilityReport, 3> reports; ///< valid only for physical branches
    RegionSignature sig;
};

/// classify_point plus everything computed on the way there.
PointAnalysis analyze_point(double dtilde, double g_eff, double kappa, double gamma,
                            double omega_m = 1.0, const Tolerances& tol = {});

} // namespace dptom
