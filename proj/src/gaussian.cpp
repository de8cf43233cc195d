#include "dptom/gaussian.hpp"

#include "dptom/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dptom {

namespace {

constexpr double physicality_band = 1e-9;

double det2(double a, double b, double c, double d) { return a * d - b * c; }

void require_physical_cov(const Mat4& v) {
    if (!v.is_finite())
        throw Error(Errc::unphysical_covariance, "covariance has non-finite entries");
    const auto nu = symplectic_eigenvalues(v);
    if (nu[0] < 0.5 - physicality_band) {
        std::ostringstream os;
        os << "smallest symplectic eigenvalue " << nu[0] << " below 1/2";
        throw Error(Errc::unphysical_covariance, os.str());
    }
}

} // namespace

std::array<double, 2> symplectic_eigenvalues(const Mat4& v) {
    // Eigenvalues of (Omega V) are +-i nu; pair the |Im| values.
    Mat4 omega;
    omega(0, 1) = 1.0;
    omega(1, 0) = -1.0;
    omega(2, 3) = 1.0;
    omega(3, 2) = -1.0;
    const Spectrum4 sp = eig4(omega * v);
    std::array<double, 4> im;
    for (int k = 0; k < 4; ++k) im[std::size_t(k)] = std::abs(sp.eigenvalues[std::size_t(k)].imag());
    std::sort(im.begin(), im.end());
    return {0.5 * (im[0] + im[1]), 0.5 * (im[2] + im[3])};
}

GaussianState steady_covariance(const SystemParams& p, const Branch& b, const Tolerances& tol) {
    if (!b.physical)
        throw Error(Errc::unphysical_branch, "steady_covariance: branch unphysical");
    const Mat4 a = drift_matrix(p, b);
    const Mat4 d = diffusion_matrix(p);

    GaussianState st;
    st.mean = {0.0, 0.0, 0.0, 0.0}; // fluctuation frame around the branch
    st.cov = solve_lyapunov(a, d, tol.eps_stab * p.omega_m);
    st.lyapunov_residual = (a * st.cov + st.cov * a.transposed() + d).max_abs();
    require_physical_cov(st.cov);
    return st;
}

MomentTrajectory evolve_moments(const SystemParams& p, const Branch& b, const Vec4& x0,
                                const Mat4& v0, double t_end, double tol, int n_samples) {
    if (!b.physical)
        throw Error(Errc::unphysical_branch, "evolve_moments: branch unphysical");
    if (n_samples < 2) throw Error(Errc::invalid_argument, "need at least 2 samples");
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (std::abs(v0(i, j) - v0(j, i)) > 1e-12 * std::max(1.0, v0.max_abs()))
                throw Error(Errc::invalid_argument, "initial covariance not symmetric");

    const Mat4 a = drift_matrix(p, b);
    const Mat4 d = diffusion_matrix(p);

    // State layout: x (4) then the upper triangle of V (10).
    static constexpr int tri_i[10] = {0, 0, 0, 0, 1, 1, 1, 2, 2, 3};
    static constexpr int tri_j[10] = {0, 1, 2, 3, 1, 2, 3, 2, 3, 3};

    auto pack = [&](const Vec4& x, const Mat4& v, std::vector<double>& y) {
        for (int i = 0; i < 4; ++i) y[std::size_t(i)] = x[std::size_t(i)];
        for (int k = 0; k < 10; ++k) y[std::size_t(4 + k)] = v(tri_i[k], tri_j[k]);
    };
    auto unpack_cov = [&](std::span<const double> y, Mat4& v) {
        for (int k = 0; k < 10; ++k) {
            v(tri_i[k], tri_j[k]) = y[std::size_t(4 + k)];
            v(tri_j[k], tri_i[k]) = y[std::size_t(4 + k)];
        }
    };

    OdeRhs rhs = [a, d, unpack_cov](double, std::span<const double> y, std::span<double> dy) {
        for (int i = 0; i < 4; ++i) {
            double s = 0.0;
            for (int j = 0; j < 4; ++j) s += a(i, j) * y[std::size_t(j)];
            dy[std::size_t(i)] = s;
        }
        Mat4 v;
        unpack_cov(y, v);
        const Mat4 av = a * v;
        for (int k = 0; k < 10; ++k) {
            const int i = tri_i[k], j = tri_j[k];
            dy[std::size_t(4 + k)] = av(i, j) + av(j, i) + d(i, j);
        }
    };

    std::vector<double> y0(14);
    pack(x0, v0, y0);
    std::vector<double> samples(std::size_t(n_samples), 0.0);
    for (int i = 0; i < n_samples; ++i)
        samples[std::size_t(i)] = t_end * double(i) / double(n_samples - 1);

    OdeSolution sol = integrate_ode(rhs, y0, 0.0, t_end, tol, samples);

    MomentTrajectory tr;
    tr.t = sol.t;
    tr.mean.reserve(sol.y.size());
    tr.cov.reserve(sol.y.size());
    for (const auto& y : sol.y) {
        Vec4 x{y[0], y[1], y[2], y[3]};
        Mat4 v;
        unpack_cov(y, v);
        tr.mean.push_back(x);
        tr.cov.push_back(v);
    }
    return tr;
}

EntanglementReport log_negativity(const Mat4& v) {
    require_physical_cov(v);

    const double det_a = det2(v(0, 0), v(0, 1), v(1, 0), v(1, 1));
    const double det_c = det2(v(2, 2), v(2, 3), v(3, 2), v(3, 3));
    const double det_b = det2(v(0, 2), v(0, 3), v(1, 2), v(1, 3));

    // det V by cofactor-free elimination on a copy.
    double det_v;
    {
        Mat4 lu = v;
        det_v = 1.0;
        for (int k = 0; k < 4; ++k) {
            int piv = k;
            for (int i = k + 1; i < 4; ++i)
                if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
            if (piv != k) {
                for (int j = 0; j < 4; ++j) std::swap(lu(k, j), lu(piv, j));
                det_v = -det_v;
            }
            det_v *= lu(k, k);
            if (lu(k, k) == 0.0) break;
            for (int i = k + 1; i < 4; ++i) {
                double f = lu(i, k) / lu(k, k);
                for (int j = k; j < 4; ++j) lu(i, j) -= f * lu(k, j);
            }
        }
    }

    EntanglementReport rep;
    rep.sigma = det_a + det_c - 2.0 * det_b;

    double disc = rep.sigma * rep.sigma - 4.0 * det_v;
    const double disc_scale = std::max(1.0, rep.sigma * rep.sigma);
    if (disc < 0.0) {
        if (disc < -1e-12 * disc_scale) {
            std::ostringstream os;
            os << "discriminant " << disc << " negative beyond clamp band";
            throw Error(Errc::negative_discriminant, os.str());
        }
        disc = 0.0;
    }
    double inner = rep.sigma - std::sqrt(disc);
    if (inner < 0.0) inner = 0.0;
    rep.eta_minus = std::sqrt(0.5 * inner);
    rep.entangled = rep.eta_minus < 0.5;
    rep.log_neg = std::max(0.0, -std::log(std::max(2.0 * rep.eta_minus, 1e-300)));
    return rep;
}

SqueezingReport squeezing_spectrum(const Mat4& v) {
    require_physical_cov(v);
    SqueezingReport rep;
    rep.min_eigenvalue = sym_eigenvalues(v)[0];
    rep.min_diagonal = std::min({v(0, 0), v(1, 1), v(2, 2), v(3, 3)});
    rep.squeezed_hybrid = rep.min_eigenvalue < 0.5;
    rep.squeezed_local = rep.min_diagonal < 0.5;
    return rep;
}

double photon_fluctuations(const Mat4& v) {
    require_physical_cov(v);
    const double occ = 0.5 * (v(0, 0) + v(1, 1) - 1.0);
    if (occ < -1e-9)
        throw Error(Errc::unphysical_covariance, "negative cavity occupation");
    return std::max(occ, 0.0);
}

double wigner_density(const GaussianState& state, const Vec4& x) {
    const Mat4& v = state.cov;
    // LU factor once for both the determinant and the solve.
    Mat4 lu = v;
    std::array<int, 4> piv{};
    double det = 1.0;
    for (int k = 0; k < 4; ++k) {
        int p = k;
        for (int i = k + 1; i < 4; ++i)
            if (std::abs(lu(i, k)) > std::abs(lu(p, k))) p = i;
        piv[std::size_t(k)] = p;
        if (p != k) {
            for (int j = 0; j < 4; ++j) std::swap(lu(k, j), lu(p, j));
            det = -det;
        }
        det *= lu(k, k);
        if (lu(k, k) != 0.0)
            for (int i = k + 1; i < 4; ++i) {
                double f = lu(i, k) / lu(k, k);
                lu(i, k) = f;
                for (int j = k + 1; j < 4; ++j) lu(i, j) -= f * lu(k, j);
            }
    }
    if (!(det > 1e-14)) {
        std::ostringstream os;
        os << "covariance determinant " << det << " below 1e-14";
        throw Error(Errc::singular_covariance, os.str());
    }

    Vec4 r{};
    for (int i = 0; i < 4; ++i) r[std::size_t(i)] = x[std::size_t(i)] - state.mean[std::size_t(i)];
    for (int k = 0; k < 4; ++k) {
        if (piv[std::size_t(k)] != k) std::swap(r[std::size_t(k)], r[std::size_t(piv[std::size_t(k)])]);
        for (int i = k + 1; i < 4; ++i) r[std::size_t(i)] -= lu(i, k) * r[std::size_t(k)];
    }
    for (int k = 3; k >= 0; --k) {
        for (int j = k + 1; j < 4; ++j) r[std::size_t(k)] -= lu(k, j) * r[std::size_t(j)];
        r[std::size_t(k)] /= lu(k, k);
    }
    double quad = 0.0;
    for (int i = 0; i < 4; ++i) quad += (x[std::size_t(i)] - state.mean[std::size_t(i)]) * r[std::size_t(i)];

    return std::exp(-0.5 * quad) / (4.0 * M_PI * M_PI * std::sqrt(det));
}

} // namespace dptom
