#include "dptom/stability.hpp"

#include <cmath>
#include <sstream>

namespace dptom {

namespace {

void require_physical(const SystemParams& p, const Branch& b) {
    if (!b.physical) {
        std::ostringstream os;
        os << "branch " << b.index << " unphysical at dtilde=" << p.dtilde << " g=" << p.g_eff;
        throw Error(Errc::unphysical_branch, os.str());
    }
}

} // namespace

Mat4 drift_matrix(const SystemParams& p, const Branch& b) {
    require_physical(p, b);
    const double g2 = p.g_eff * p.g_eff;
    const double k2 = p.omega_m * p.omega_m + p.gamma * p.gamma;
    const double shift = 2.0 * (p.omega_m * g2 / k2 + b.beta_tilde.real());
    const double ar = b.alpha_tilde.real();
    const double ai = b.alpha_tilde.imag();

    Mat4 a;
    a(0, 0) = -p.kappa;
    a(0, 1) = -shift + p.dtilde;
    a(0, 2) = 2.0 * ai;
    a(0, 3) = 0.0;
    a(1, 0) = shift - p.dtilde;
    a(1, 1) = -p.kappa;
    a(1, 2) = 2.0 * ar;
    a(1, 3) = 0.0;
    a(2, 0) = 0.0;
    a(2, 1) = 0.0;
    a(2, 2) = -p.gamma;
    a(2, 3) = -p.omega_m;
    a(3, 0) = 2.0 * ar;
    a(3, 1) = -2.0 * ai;
    a(3, 2) = p.omega_m;
    a(3, 3) = -p.gamma;
    return a;
}

Mat4 diffusion_matrix(const SystemParams& p) {
    return Mat4::diag(p.kappa, p.kappa, p.gamma, p.gamma);
}

Margins routh_hurwitz_margins(const SystemParams& p, const Branch& b) {
    require_physical(p, b);
    const double g2 = p.g_eff * p.g_eff;
    const double k2 = p.omega_m * p.omega_m + p.gamma * p.gamma;
    const double s = 2.0 * (p.omega_m * g2 / k2 + b.beta_tilde.real());
    const double n = std::norm(b.alpha_tilde);
    const double gk = p.gamma + p.kappa;
    const double w = p.omega_m;

    // Scales are smooth positive envelopes of the terms (not the |terms|
    // themselves, which can vanish on the zero set and would turn the
    // normalized margin into a step function).
    Margins m;
    {
        const double t1 = 4.0 * p.gamma * p.kappa * (gk * gk + (s + w - p.dtilde) * (s + w - p.dtilde)) *
                          (gk * gk + (-s + w + p.dtilde) * (-s + w + p.dtilde));
        const double t2 = 16.0 * gk * gk * w * n * (s - p.dtilde);
        m.hard = t1 + t2;
        m.hard_scale = std::abs(t1) + 16.0 * gk * gk * w * n * (w + std::abs(s - p.dtilde));
    }
    {
        const double t1 = k2 * (p.kappa * p.kappa + (s - p.dtilde) * (s - p.dtilde));
        const double t2 = -4.0 * w * n * (s - p.dtilde);
        m.soft = t1 + t2;
        m.soft_scale = std::abs(t1) + 4.0 * w * n * (w + std::abs(s - p.dtilde));
    }
    return m;
}

const char* stability_class_name(StabilityClass c) {
    switch (c) {
        case StabilityClass::stable: return "stable";
        case StabilityClass::soft_unstable: return "soft_unstable";
        case StabilityClass::hard_unstable: return "hard_unstable";
        case StabilityClass::both_unstable: return "both_unstable";
        case StabilityClass::marginal: return "marginal";
        case StabilityClass::unphysical: return "unphysical";
    }
    return "?";
}

StabilityReport drift_spectrum(const SystemParams& p, const Branch& b, const Tolerances& tol) {
    require_physical(p, b);
    StabilityReport rep;
    rep.branch_index = b.index;

    const Margins m = routh_hurwitz_margins(p, b);
    rep.hard_margin = m.hard;
    rep.soft_margin = m.soft;

    rep.spectrum = eig4(drift_matrix(p, b));
    const Complex l1 = rep.spectrum.eigenvalues[0];
    rep.gap_real = std::abs(l1.real());
    rep.gap_imag = std::abs(l1.imag());

    double max_re = rep.spectrum.eigenvalues[0].real();
    for (const Complex& l : rep.spectrum.eigenvalues) max_re = std::max(max_re, l.real());

    const double band = tol.eps_band * p.omega_m;
    if (rep.gap_real <= band) {
        rep.cls = StabilityClass::marginal;
    } else if (max_re < 0.0) {
        rep.cls = StabilityClass::stable;
    } else {
        // Instability kind from the margin signs; the spectrum referees ties.
        const bool hard_neg = m.hard < 0.0;
        const bool soft_neg = m.soft < 0.0;
        if (hard_neg && soft_neg)
            rep.cls = StabilityClass::both_unstable;
        else if (hard_neg)
            rep.cls = StabilityClass::hard_unstable;
        else if (soft_neg)
            rep.cls = StabilityClass::soft_unstable;
        else {
            // Margins say stable, spectrum says growing: classify by the
            // growing mode and flag the disagreement.
            Complex growing = rep.spectrum.eigenvalues[0];
            for (const Complex& l : rep.spectrum.eigenvalues)
                if (l.real() > growing.real()) growing = l;
            rep.cls = (std::abs(growing.imag()) > band) ? StabilityClass::hard_unstable
                                                        : StabilityClass::soft_unstable;
        }
    }

    // Consistency of margin signs with the spectral verdict, outside bands.
    const double hn = (m.hard_scale > 0.0) ? m.hard / m.hard_scale : 0.0;
    const double sn = (m.soft_scale > 0.0) ? m.soft / m.soft_scale : 0.0;
    const double margin_band = 10.0 * tol.eps_band;
    if (rep.gap_real > band && std::abs(hn) > margin_band && std::abs(sn) > margin_band) {
        const bool margins_stable = m.hard > 0.0 && m.soft > 0.0;
        const bool spectrum_stable = max_re < 0.0;
        rep.margins_consistent = (margins_stable == spectrum_stable);
    }
    return rep;
}

const char* region_name(Region r) {
    switch (r) {
        case Region::A: return "A";
        case Region::B: return "B";
        case Region::C: return "C";
        case Region::D: return "D";
        case Region::E: return "E";
        case Region::F: return "F";
        case Region::G: return "G";
        case Region::boundary: return "boundary";
        case Region::unknown: return "unknown";
    }
    return "?";
}

PointAnalysis analyze_point(double dtilde, double g_eff, double kappa, double gamma,
                            double omega_m, const Tolerances& tol) {
    PointAnalysis pa;
    pa.params = params_from_effective(dtilde, g_eff, kappa, gamma, omega_m);
    pa.branches = photon_number_branches(pa.params);

    RegionSignature& sig = pa.sig;
    bool any_marginal = false;
    for (int j = 0; j < 3; ++j) {
        const Branch& b = pa.branches[std::size_t(j)];
        sig.physical[std::size_t(j)] = b.physical;
        if (!b.physical) continue;
        const StabilityReport rep = drift_spectrum(pa.params, b, tol);
        pa.reports[std::size_t(j)] = rep;
        sig.branch_class[std::size_t(j)] = rep.cls;
        sig.consistent = sig.consistent && rep.margins_consistent;
        if (rep.cls == StabilityClass::marginal) any_marginal = true;
        if (rep.cls == StabilityClass::stable) sig.stable_mask |= std::uint8_t(1u << j);
    }

    // Points within machine reach of the fold classify as boundary even from
    // the side where branches 2 and 3 do not exist yet.
    if (!sig.physical[1] && !sig.physical[2]) {
        const double k2 = (omega_m * omega_m + gamma * gamma) / omega_m;
        const double g2 = g_eff * g_eff;
        const double disc = fold_discriminant(dtilde, g_eff, kappa, gamma, omega_m);
        const double scale =
            g2 * g2 + kappa * kappa * k2 * k2 + 2.0 * g2 * std::abs(dtilde) * k2 + 1e-300;
        if (std::abs(disc) <= 1e-13 * scale) any_marginal = true;
    }

    if (any_marginal) {
        sig.label = Region::boundary;
        return pa;
    }

    switch (sig.stable_mask) {
        case 0b001: // only branch 1
            sig.label = (sig.physical[1] || sig.physical[2]) ? Region::E : Region::D;
            break;
        case 0b101: sig.label = Region::B; break; // branches 1 and 3
        case 0b011: sig.label = Region::C; break; // branches 1 and 2
        case 0b110: sig.label = Region::A; break; // branches 2 and 3
        case 0b010: // only branch 2
            if (sig.branch_class[0] == StabilityClass::soft_unstable ||
                sig.branch_class[0] == StabilityClass::both_unstable)
                sig.label = Region::F;
            else if (sig.branch_class[0] == StabilityClass::hard_unstable)
                sig.label = Region::G;
            else
                sig.label = Region::unknown;
            break;
        default: sig.label = Region::unknown; break;
    }
    return pa;
}

RegionSignature classify_point(double dtilde, double g_eff, double kappa, double gamma,
                               double omega_m, const Tolerances& tol) {
    return analyze_point(dtilde, g_eff, kappa, gamma, omega_m, tol).sig;
}

} // namespace dptom
