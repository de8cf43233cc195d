#include <doctest.h>

#include "dptom/phasediagram.hpp"

#include <cmath>
#include <set>

using namespace dptom;

TEST_CASE("sweep_grid: undriven row is monostable branch I") {
    GridSpec spec{-1.0, -0.3, 8, 0.0, 0.2, 5};
    const PhaseMap map = sweep_grid(spec, 0.25, 0.1, 1.0); // gamma > 0 damps the free row
    for (int ix = 0; ix < spec.nx; ++ix) {
        const PhaseCell& cell = map.at(ix, 0);
        CHECK(cell.g == 0.0);
        CHECK(cell.sig.stable_mask == 0b001);
    }
}

TEST_CASE("sweep_grid: refined grid agrees at shared points") {
    GridSpec coarse{-1.2, -0.1, 13, 0.05, 0.8, 11};
    GridSpec fine{-1.2, -0.1, 25, 0.05, 0.8, 21};
    const PhaseMap a = sweep_grid(coarse, 0.25, 0.0, 1.0);
    const PhaseMap b = sweep_grid(fine, 0.25, 0.0, 1.0);
    for (int iy = 0; iy < coarse.ny; ++iy)
        for (int ix = 0; ix < coarse.nx; ++ix) {
            const PhaseCell& ca = a.at(ix, iy);
            const PhaseCell& cb = b.at(2 * ix, 2 * iy);
            REQUIRE(ca.dtilde == doctest::Approx(cb.dtilde).epsilon(1e-14));
            REQUIRE(ca.g == doctest::Approx(cb.g).epsilon(1e-14));
            if (ca.sig.label == Region::boundary || cb.sig.label == Region::boundary) continue;
            CHECK(ca.sig.label == cb.sig.label);
        }
}

TEST_CASE("sweep_grid: all seven regions appear in the reference window") {
    GridSpec spec{-2.0, 0.5, 120, 0.0, 1.0, 120};
    const PhaseMap map = sweep_grid(spec, 0.25, 0.0, 1.0);
    std::set<Region> seen;
    int contradictions = 0;
    for (const PhaseCell& cell : map.cells) {
        if (cell.sig.label != Region::boundary && cell.sig.label != Region::unknown)
            seen.insert(cell.sig.label);
        if (cell.sig.label != Region::boundary && !cell.sig.consistent) ++contradictions;
    }
    CHECK(seen.size() == 7);
    CHECK(contradictions == 0);
}

TEST_CASE("sweep_grid: measures follow the region branch convention") {
    GridSpec spec{-0.25, -0.15, 3, 0.33, 0.40, 4};
    const PhaseMap map = sweep_grid(spec, 0.25, 0.0, 1.0,
                                    measure_entanglement | measure_squeezing |
                                        measure_fluctuations);
    for (const PhaseCell& cell : map.cells) {
        if (cell.selected_branch == 0) continue;
        if (cell.sig.label == Region::A || cell.sig.label == Region::B)
            CHECK(cell.selected_branch == 3);
        if (cell.sig.label == Region::C || cell.sig.label == Region::D ||
            cell.sig.label == Region::E)
            CHECK(cell.selected_branch == 1);
        if (!cell.measure_error && cell.selected_branch != 0) {
            CHECK(std::isfinite(cell.log_neg));
            CHECK(cell.min_eig > 0.0);
            CHECK(cell.fluct >= 0.0);
        }
    }
}

TEST_CASE("slice_transitions: the reference slice shows one jump and one exchange") {
    const auto events = slice_transitions(SliceAxis::sweep_g, -0.2, 0.05, 0.9, 800, 0.25, 0.0);
    REQUIRE(events.size() == 3);

    CHECK(events[0].kind == TransitionKind::discontinuous);
    CHECK(events[0].branch_from == 1);
    CHECK(events[0].branch_to == 3);
    CHECK(events[0].n_jump > 1e-3);
    CHECK(events[0].position == doctest::Approx(std::sqrt(0.120156)).epsilon(1e-4));

    CHECK(events[1].kind == TransitionKind::continuous);
    CHECK(events[1].branch_from == 1);
    CHECK(events[1].branch_to == 2);
    CHECK(events[1].n_jump == 0.0);
    CHECK(events[1].position == doctest::Approx(std::sqrt(0.128125)).epsilon(1e-6));

    CHECK(events[2].kind == TransitionKind::hard);
    CHECK(events[2].position == doctest::Approx(std::sqrt(0.15625)).epsilon(1e-6));
}

TEST_CASE("slice_transitions: hard event on the resonance slice") {
    const auto events = slice_transitions(SliceAxis::sweep_g, -1.0, 0.16, 0.20, 400, 0.25, 0.0);
    REQUIRE(!events.empty());
    bool found_hard = false;
    for (const auto& ev : events)
        if (ev.kind == TransitionKind::hard &&
            std::abs(ev.position - 1.0 / (4.0 * std::sqrt(2.0))) < 1e-6)
            found_hard = true;
    CHECK(found_hard);
}

TEST_CASE("slice_transitions: detuning sweep crosses four distinct boundaries") {
    // fixed G = 0.45: hard (branch III), exchange (I with III), fold
    // (II and III vanish), and the hard line of branch I at zero detuning
    const auto events =
        slice_transitions(SliceAxis::sweep_dtilde, 0.45, -0.4, 0.3, 1400, 0.25, 0.0);
    REQUIRE(events.size() == 4);

    CHECK(events[0].kind == TransitionKind::hard);
    CHECK(events[0].position == doctest::Approx(-0.0625 / (2 * 0.2025)).epsilon(1e-4));

    CHECK(events[1].kind == TransitionKind::continuous);
    CHECK(events[1].branch_from == 3);
    CHECK(events[1].branch_to == 1);

    CHECK(events[2].kind == TransitionKind::discontinuous);
    CHECK(events[2].branch_from == 2);
    CHECK(events[2].branch_to == 1);
    CHECK(events[2].n_jump > 0.05);

    CHECK(events[3].kind == TransitionKind::hard);
    CHECK(std::abs(events[3].position) < 1e-6);
}

TEST_CASE("slice_transitions: a slice inside one region is empty") {
    const auto events = slice_transitions(SliceAxis::sweep_g, -0.5, 0.02, 0.20, 200, 0.25, 0.0);
    CHECK(events.empty());
}

TEST_CASE("trace_boundary: branch-1 soft line matches its closed form") {
    const double seed_dt = -0.8;
    const double seed_g = std::sqrt((0.0625 + seed_dt * seed_dt) / (4.0 * std::abs(seed_dt)));
    const Polyline line =
        trace_boundary(BoundaryKind::soft, 1, seed_dt, seed_g * 1.001, 1e-3, 400, 0.25, 0.0);
    REQUIRE(line.points.size() > 100);
    for (const auto& pt : line.points) {
        const double want = std::sqrt((0.0625 + pt[0] * pt[0]) / (4.0 * std::abs(pt[0])));
        CHECK(std::abs(pt[1] - want) < 1e-6);
    }
}

TEST_CASE("trace_boundary: soft line reaches the critical point") {
    const Polyline line = trace_boundary(BoundaryKind::soft, 1, -0.22, 0.36, 1e-3, 400, 0.25, 0.0);
    REQUIRE(!line.points.empty());
    const double dtc = -0.25 / std::sqrt(3.0);
    const double gc = std::sqrt(0.25 / std::sqrt(3.0));
    double best = 1e300;
    for (const auto& pt : line.points)
        best = std::min(best, std::hypot(pt[0] - dtc, pt[1] - gc));
    CHECK(best < 2e-3);
}

TEST_CASE("trace_boundary: hard line passes through the reference point") {
    const Polyline line =
        trace_boundary(BoundaryKind::hard, 3, -1.0, 0.177, 1e-3, 100, 0.25, 0.0);
    REQUIRE(!line.points.empty());
    double best = 1e300;
    for (const auto& pt : line.points)
        best = std::min(best, std::abs(pt[1] - 0.25 / std::sqrt(2.0 * std::abs(pt[0]))));
    CHECK(best < 1e-6);
    // the seed sits at dtilde = -1, so the first corrected point must hit
    // G = 1/(4 sqrt 2) there
    CHECK(std::abs(line.points[0][0] + 1.0) < 2e-3);
    CHECK(std::abs(line.points[0][1] - 1.0 / (4.0 * std::sqrt(2.0))) < 1e-4);
}

TEST_CASE("trace_boundary: polyline points classify as boundary") {
    const Polyline line = trace_boundary(BoundaryKind::fold, 0, -0.6, 0.38, 2e-3, 60, 0.25, 0.0);
    REQUIRE(line.points.size() > 10);
    int boundary_count = 0;
    for (const auto& pt : line.points) {
        const RegionSignature sig = classify_point(pt[0], pt[1], 0.25, 0.0);
        if (sig.label == Region::boundary) ++boundary_count;
    }
    CHECK(boundary_count == int(line.points.size()));
}

TEST_CASE("find_critical_point: matches the closed form at the reference parameters") {
    const CriticalPoint cp = find_critical_point(0.25, 0.0);
    CHECK(std::abs(cp.dtilde_c + 0.25 / std::sqrt(3.0)) < 1e-6);
    CHECK(std::abs(cp.g_c - std::sqrt(0.25 / std::sqrt(3.0))) < 1e-6);
    CHECK(cp.soft_residual < 1e-9);
    CHECK(cp.fold_residual < 1e-9);
}

TEST_CASE("find_critical_point: moves continuously with mechanical damping") {
    const CriticalPoint a = find_critical_point(0.25, 0.0);
    const CriticalPoint b = find_critical_point(0.25, 0.05);
    CHECK(std::hypot(a.dtilde_c - b.dtilde_c, a.g_c - b.g_c) < 0.1);
    // triple-root closed form holds for any gamma
    CHECK(std::abs(b.dtilde_c + 0.25 / std::sqrt(3.0)) < 1e-5);
    CHECK(std::abs(b.g_c - std::sqrt(0.25 * 1.0025 / std::sqrt(3.0))) < 1e-5);
}

TEST_CASE("estimate_exponents: decay rate and fluctuations follow unit power laws") {
    const ExponentFit fit = estimate_exponents(0.25, 0.0, 1.0, 1e-3, 1e-2, 9);
    CHECK(std::abs(fit.nu_adr - 1.0) < 0.05);
    CHECK(std::abs(fit.nu_c + 1.0) < 0.05);
    CHECK(fit.r2_adr > 0.999);
    CHECK(fit.r2_c > 0.999);
}

TEST_CASE("estimate_exponents: leaving the stable side is an error") {
    // above G_c the reference branch is the unstable middle root
    try {
        estimate_exponents(0.25, 0.0, 1.0, 1e-3, 1e-2, 9, ApproachSide::above);
        FAIL("expected fit_range_crosses_boundary");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::fit_range_crosses_boundary);
    }
}

TEST_CASE("trace_boundary: unreachable margin reports a lost track") {
    // branch 2 does not exist below the fold, so its soft margin is undefined
    const Polyline line =
        trace_boundary(BoundaryKind::soft, 2, -0.5, 0.05, 1e-3, 50, 0.25, 0.0);
    CHECK(line.lost_track);
    CHECK(line.points.empty());
}

TEST_CASE("estimate_exponents: sampling density does not move the slopes") {
    const ExponentFit a = estimate_exponents(0.25, 0.0, 1.0, 1e-3, 1e-2, 10);
    const ExponentFit b = estimate_exponents(0.25, 0.0, 1.0, 1e-3, 1e-2, 20);
    CHECK(std::abs(a.nu_adr - b.nu_adr) < 0.01 * std::abs(a.nu_adr));
    CHECK(std::abs(a.nu_c - b.nu_c) < 0.01 * std::abs(a.nu_c));
}

TEST_CASE("spectrum_sweep: resonance frequencies split and the lower branch closes") {
    const auto rows = spectrum_sweep(-1.0, 0.0, std::sqrt(1.0625 / 4.0), 40, 1, 0.25, 0.0);
    REQUIRE(rows.size() == 40);
    // at G = 0 both pairs oscillate at the bare frequency
    std::set<double> f0;
    for (const auto& l : rows[0].eigenvalues) f0.insert(std::round(std::abs(l.imag()) * 1e9));
    CHECK(f0.size() == 1);
    // mid-sweep the frequencies have split into two distinct branches
    const auto& mid = rows[rows.size() / 2];
    double lo = 1e300, hi = 0.0;
    for (const auto& l : mid.eigenvalues) {
        const double f = std::abs(l.imag());
        lo = std::min(lo, f);
        hi = std::max(hi, f);
    }
    CHECK(hi - lo > 0.3);
    // at the soft boundary the slow mode frequency (and gap) is zero
    const auto& last = rows.back();
    double min_abs = 1e300;
    for (const auto& l : last.eigenvalues) min_abs = std::min(min_abs, std::abs(l));
    CHECK(min_abs < 5e-4);
}

TEST_CASE("fold_discriminant: sign tracks the existence of branches 2 and 3") {
    CHECK(fold_discriminant(-0.2, std::sqrt(0.125), 0.25, 0.0) > 0.0);
    CHECK(fold_discriminant(-0.2, std::sqrt(0.115), 0.25, 0.0) < 0.0);
    // zero on the fold curve G^2 = dtilde + sqrt(dtilde^2 + kappa^2)
    const double g2 = -0.2 + std::sqrt(0.04 + 0.0625);
    CHECK(std::abs(fold_discriminant(-0.2, std::sqrt(g2), 0.25, 0.0)) < 1e-12);
}
