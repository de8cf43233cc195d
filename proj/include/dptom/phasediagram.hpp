#pragma once

// Grid sweeps over (dtilde, G), transition detection along slices, boundary
// tracing by arc-length continuation, critical-point location and
// critical-exponent estimation.

#include "dptom/core.hpp"
#include "dptom/gaussian.hpp"
#include "dptom/stability.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace dptom {

struct GridSpec {
    double dtilde_min = 0.0, dtilde_max = 0.0;
    int nx = 2;
    double g_min = 0.0, g_max = 0.0;
    int ny = 2;
};

enum Measure : std::uint32_t {
    measure_none = 0,
    measure_entanglement = 1u << 0,
    measure_squeezing = 1u << 1,
    measure_fluctuations = 1u << 2,
};

/// Which branch supplies per-cell measures. `automatic` follows the
/// multistable-region convention A -> III, B -> III, C -> I; monostable
/// regions use their stable branch.
enum class BranchRule : std::uint8_t { automatic = 0, branch1 = 1, branch2 = 2, branch3 = 3 };

struct PhaseCell {
    double dtilde = 0.0;
    double g = 0.0;
    RegionSignature sig{};
    std::array<double, 3> n{};       ///< branch photon numbers (NaN when unphysical)
    double gap_real = 0.0;           ///< |Re lambda_1| of the selected branch (NaN if none)
    double gap_imag = 0.0;
    int selected_branch = 0;         ///< 0 when no branch selected
    double log_neg = 0.0, min_eig = 0.0, fluct = 0.0; ///< NaN unless requested and defined
    bool measure_error = false;      ///< a measure computation failed in-cell
};

struct PhaseMap {
    GridSpec spec;
    std::vector<PhaseCell> cells; ///< row-major: iy * nx + ix
    const PhaseCell& at(int ix, int iy) const { return cells[std::size_t(iy) * spec.nx + ix]; }
};

/// Deterministic grid sweep; cells inside the marginality band are labeled
/// boundary; per-cell failures are recorded in-cell, never thrown.
/// threads = 0 picks hardware concurrency.
PhaseMap sweep_grid(const GridSpec& spec, double kappa, double gamma, double omega_m = 1.0,
                    std::uint32_t measures = measure_none,
                    BranchRule rule = BranchRule::automatic, int threads = 0,
                    const Tolerances& tol = {});

enum class TransitionKind : std::uint8_t { continuous, discontinuous, hard };

const char* transition_kind_name(TransitionKind k);

struct TransitionEvent {
    double position = 0.0; ///< swept coordinate at the boundary
    TransitionKind kind = TransitionKind::continuous;
    int branch_from = 0;   ///< branch on the low side of the crossing
    int branch_to = 0;     ///< branch on the high side
    double n_jump = 0.0;   ///< photon-number discontinuity (0 for continuous)
    double lambda_imag = 0.0; ///< |Im lambda| of the marginal mode
};

enum class SliceAxis : std::uint8_t { sweep_g, sweep_dtilde };

/// Scan a line through the diagram, bisect every classification change to
/// 1e-8 in the swept coordinate and classify each event.
std::vector<TransitionEvent> slice_transitions(SliceAxis axis, double fixed_value,
                                               double lo, double hi, int resolution,
                                               double kappa, double gamma,
                                               double omega_m = 1.0,
                                               const Tolerances& tol = {});

enum class BoundaryKind : std::uint8_t {
    soft, ///< soft-mode margin zero set of a branch
    hard, ///< hard-mode margin zero set of a branch
    fold, ///< discriminant zero set where branches 2 and 3 merge
};

struct Polyline {
    std::vector<std::array<double, 2>> points; ///< (dtilde, g)
    bool lost_track = false;
};

/// Predictor-corrector arc-length continuation of a boundary's zero set,
/// seeded near the curve. Returns the partial polyline with lost_track set
/// when the corrector fails.
Polyline trace_boundary(BoundaryKind kind, int branch_index, double seed_dtilde,
                        double seed_g, double step, std::size_t max_points,
                        double kappa, double gamma, double omega_m = 1.0);

struct CriticalPoint {
    double dtilde_c = 0.0;
    double g_c = 0.0;
    double soft_residual = 0.0; ///< normalized branch-1 soft margin at the point
    double fold_residual = 0.0; ///< normalized discriminant at the point
};

/// Touching point of the branch-1 soft boundary and the branch-2/3 fold.
/// Throws Errc::no_intersection when the scan finds none.
CriticalPoint find_critical_point(double kappa, double gamma, double omega_m = 1.0);

enum class ApproachSide : std::uint8_t { below, above };

struct ExponentFit {
    CriticalPoint critical;
    double nu_adr = 0.0; ///< slope of |Re lambda_1| vs |G - G_c|
    double nu_c = 0.0;   ///< slope of photon fluctuations vs |G - G_c|
    double r2_adr = 0.0;
    double r2_c = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    int n_samples = 0;
};

/// Log-log power-law fits along dtilde = dtilde_c approaching G_c from the
/// branch-1 stable side. Distances below 1e-5 are excluded (numerical gap
/// floor). Throws Errc::fit_range_crosses_boundary if a sample leaves the
/// stable region.
ExponentFit estimate_exponents(double kappa, double gamma, double omega_m = 1.0,
                               double dist_lo = 1e-4, double dist_hi = 1e-2,
                               int n_samples = 25,
                               ApproachSide side = ApproachSide::below,
                               const Tolerances& tol = {});

struct SpectrumSample {
    double g = 0.0;
    int branch_index = 0;
    bool physical = false;
    std::array<Complex, 4> eigenvalues{};
};

/// Drift-spectrum sweep over G at fixed dtilde for one branch (0 = all three).
std::vector<SpectrumSample> spectrum_sweep(double dtilde, double g_lo, double g_hi,
                                           int n_points, int branch_index,
                                           double kappa, double gamma,
                                           double omega_m = 1.0);

} // namespace dptom
