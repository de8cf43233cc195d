#include "dptom/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

namespace dptom {

namespace {

std::string format_matrix(const Mat4& a) {
    std::ostringstream os;
    os.precision(17);
    os << "[";
    for (int i = 0; i < 4; ++i) {
        os << (i ? "; " : "");
        for (int j = 0; j < 4; ++j) os << (j ? "," : "") << a(i, j);
    }
    os << "]";
    return os.str();
}

} // namespace

Mat4 Mat4::identity() {
    Mat4 r;
    for (int i = 0; i < 4; ++i) r(i, i) = 1.0;
    return r;
}

Mat4 Mat4::diag(double a, double b, double c, double d) {
    Mat4 r;
    r(0, 0) = a;
    r(1, 1) = b;
    r(2, 2) = c;
    r(3, 3) = d;
    return r;
}

Mat4 Mat4::transposed() const {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(i, j) = (*this)(j, i);
    return r;
}

double Mat4::max_abs() const {
    double m = 0.0;
    for (double v : this->m) m = std::max(m, std::abs(v));
    return m;
}

bool Mat4::is_finite() const {
    for (double v : m)
        if (!std::isfinite(v)) return false;
    return true;
}

Mat4 operator+(const Mat4& a, const Mat4& b) {
    Mat4 r;
    for (int i = 0; i < 16; ++i) r.m[i] = a.m[i] + b.m[i];
    return r;
}

Mat4 operator-(const Mat4& a, const Mat4& b) {
    Mat4 r;
    for (int i = 0; i < 16; ++i) r.m[i] = a.m[i] - b.m[i];
    return r;
}

Mat4 operator*(const Mat4& a, const Mat4& b) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) s += a(i, k) * b(k, j);
            r(i, j) = s;
        }
    return r;
}

Mat4 operator*(double s, const Mat4& a) {
    Mat4 r;
    for (int i = 0; i < 16; ++i) r.m[i] = s * a.m[i];
    return r;
}

Vec4 operator*(const Mat4& a, const Vec4& x) {
    Vec4 r{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r[i] += a(i, j) * x[j];
    return r;
}

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::invalid_argument: return "InvalidArgument";
        case Errc::non_positive_frequency: return "NonPositiveFrequency";
        case Errc::negative_rate: return "NegativeRate";
        case Errc::degenerate_leading_coefficient: return "DegenerateLeadingCoefficient";
        case Errc::cubic_solve_failure: return "CubicSolveFailure";
        case Errc::convergence_failure: return "ConvergenceFailure";
        case Errc::unstable_drift: return "UnstableDrift";
        case Errc::singular_system: return "SingularSystem";
        case Errc::step_size_underflow: return "StepSizeUnderflow";
        case Errc::non_positive_data: return "NonPositiveData";
        case Errc::insufficient_points: return "InsufficientPoints";
        case Errc::unphysical_branch: return "UnphysicalBranch";
        case Errc::unphysical_covariance: return "UnphysicalCovariance";
        case Errc::negative_discriminant: return "NegativeDiscriminant";
        case Errc::singular_covariance: return "SingularCovariance";
        case Errc::fit_range_crosses_boundary: return "FitRangeCrossesBoundary";
        case Errc::no_intersection: return "NoIntersection";
    }
    return "UnknownError";
}

// ---------------------------------------------------------------------------
// Polynomial root finding
// ---------------------------------------------------------------------------

namespace {

// Backward-error style residual: |p(x)| normalized by the evaluation
// magnitude sum_k |c_k| max(|x|, scale)^k. The scale floor keeps the measure
// meaningful for roots at (or near) zero with a vanishing constant term,
// where the plain componentwise ratio tends to 1 regardless of accuracy.
double poly_residual(std::span<const double> coeffs_low_to_high, Complex x, double scale) {
    Complex p = 0.0;
    double mag = 0.0;
    Complex xp = 1.0;
    const double xm = std::max(std::abs(x), scale);
    double xmp = 1.0;
    for (double c : coeffs_low_to_high) {
        p += c * xp;
        mag += std::abs(c) * xmp;
        xp *= x;
        xmp *= xm;
    }
    if (mag < 1e-300) return std::abs(p);
    return std::abs(p) / mag;
}

Complex poly_newton(std::span<const double> coeffs_low_to_high, Complex x, int iters) {
    const std::size_t n = coeffs_low_to_high.size();
    for (int it = 0; it < iters; ++it) {
        Complex p = 0.0, dp = 0.0;
        // Horner from the top coefficient down.
        for (std::size_t k = n; k-- > 0;) {
            dp = dp * x + p;
            p = p * x + coeffs_low_to_high[k];
        }
        if (std::abs(dp) < 1e-300) break;
        Complex step = p / dp;
        x -= step;
        if (std::abs(step) < 1e-16 * (1.0 + std::abs(x))) break;
    }
    return x;
}

// Force a root set of a real polynomial to be closed under conjugation:
// roots with tiny imaginary part become real, the rest are averaged with a
// conjugate partner.
template <std::size_t N>
void symmetrize_conjugates(std::array<Complex, N>& roots) {
    double scale = 0.0;
    for (auto& r : roots) scale = std::max(scale, std::abs(r));
    const double band = 1e-12 * std::max(1.0, scale);

    std::array<bool, N> paired{};
    for (std::size_t i = 0; i < N; ++i) {
        if (std::abs(roots[i].imag()) <= band) {
            roots[i] = Complex(roots[i].real(), 0.0);
            paired[i] = true;
        }
    }
    for (std::size_t i = 0; i < N; ++i) {
        if (paired[i]) continue;
        std::size_t best = N;
        double best_d = std::numeric_limits<double>::max();
        for (std::size_t j = i + 1; j < N; ++j) {
            if (paired[j]) continue;
            double d = std::abs(roots[j] - std::conj(roots[i]));
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        if (best == N) {
            // Unpartnered leftover: demote to real.
            roots[i] = Complex(roots[i].real(), 0.0);
            paired[i] = true;
            continue;
        }
        Complex z = 0.5 * (roots[i] + std::conj(roots[best]));
        if (z.imag() < 0.0) z = std::conj(z);
        roots[i] = std::conj(z);
        roots[best] = z;
        paired[i] = paired[best] = true;
    }
}

std::array<Complex, 2> quadratic_roots_c(Complex a, Complex b, Complex c) {
    if (std::abs(a) < 1e-300) {
        if (std::abs(b) < 1e-300) return {Complex(0), Complex(0)};
        return {-c / b, -c / b};
    }
    Complex disc = std::sqrt(b * b - 4.0 * a * c);
    // Pick the sign that avoids cancellation.
    Complex q = (std::real(std::conj(b) * disc) >= 0.0) ? -0.5 * (b + disc)
                                                        : -0.5 * (b - disc);
    Complex r1 = q / a;
    Complex r2 = (std::abs(q) > 1e-300) ? c / q : Complex(0);
    return {r1, r2};
}

} // namespace

CubicRoots cubic_roots(double c3, double c2, double c1, double c0) {
    const double scale = std::max({std::abs(c3), std::abs(c2), std::abs(c1), std::abs(c0)});
    if (scale <= 0.0 || !std::isfinite(scale))
        throw Error(Errc::invalid_argument, "cubic_roots: zero or non-finite coefficients");
    if (std::abs(c3) < 1e-14 * scale)
        throw Error(Errc::degenerate_leading_coefficient,
                    "cubic_roots: |c3| below 1e-14 of coefficient scale");

    // Monic, then depressed: x = t - b/3 with x^3 + b x^2 + c x + d.
    const double b = c2 / c3, c = c1 / c3, d = c0 / c3;
    const double p = c - b * b / 3.0;
    const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;

    std::array<Complex, 3> t;
    const double disc = q * q / 4.0 + p * p * p / 27.0;
    if (disc >= 0.0) {
        // One real root via Cardano; pick the cube root away from cancellation.
        double sq = std::sqrt(disc);
        double u3 = -q / 2.0 + (q <= 0.0 ? sq : -sq);
        double u = std::cbrt(u3);
        double v = (u != 0.0) ? -p / (3.0 * u) : 0.0;
        double t0 = u + v;
        t[0] = t0;
        // Deflate: t^2 + t0 t + (t0^2 + p) = 0.
        auto rest = quadratic_roots_c(1.0, t0, t0 * t0 + p);
        t[1] = rest[0];
        t[2] = rest[1];
    } else {
        // Three distinct real roots: trigonometric form.
        double r = std::sqrt(-p * p * p / 27.0);
        double phi = std::acos(std::clamp(-q / (2.0 * r), -1.0, 1.0));
        double m = 2.0 * std::sqrt(-p / 3.0);
        for (int k = 0; k < 3; ++k)
            t[std::size_t(k)] = m * std::cos((phi + 2.0 * M_PI * k) / 3.0);
    }

    CubicRoots out;
    const std::array<double, 4> coeffs = {c0, c1, c2, c3};
    for (int k = 0; k < 3; ++k) {
        Complex x = t[std::size_t(k)] - b / 3.0;
        x = poly_newton(coeffs, x, 8);
        out.roots[std::size_t(k)] = x;
    }
    symmetrize_conjugates(out.roots);
    std::sort(out.roots.begin(), out.roots.end(), [](const Complex& a, const Complex& z) {
        if (a.real() != z.real()) return a.real() < z.real();
        return a.imag() < z.imag();
    });
    double typ = 0.0;
    for (const Complex& x : out.roots) typ = std::max(typ, std::abs(x));
    for (int k = 0; k < 3; ++k)
        out.residuals[std::size_t(k)] = poly_residual(coeffs, out.roots[std::size_t(k)], typ);
    return out;
}

namespace {

// Roots of a monic real quartic x^4 + a3 x^3 + a2 x^2 + a1 x + a0 via the
// resolvent cubic (Ferrari), all in complex arithmetic, then polished.
std::array<Complex, 4> quartic_roots(double a3, double a2, double a1, double a0) {
    // Depress: x = y - a3/4.
    const double sh = a3 / 4.0;
    const double p = a2 - 3.0 * a3 * a3 / 8.0;
    const double q = a1 - a3 * a2 / 2.0 + a3 * a3 * a3 / 8.0;
    const double r = a0 - a3 * a1 / 4.0 + a3 * a3 * a2 / 16.0 - 3.0 * a3 * a3 * a3 * a3 / 256.0;

    std::array<Complex, 4> y;
    const double qscale = std::max({std::abs(p), std::abs(q), std::abs(r), 1e-30});
    if (std::abs(q) < 1e-14 * qscale) {
        // Biquadratic.
        auto z = quadratic_roots_c(1.0, p, r);
        y[0] = std::sqrt(z[0]);
        y[1] = -y[0];
        y[2] = std::sqrt(z[1]);
        y[3] = -y[2];
    } else {
        // Resolvent cubic z^3 - p z^2 - 4 r z + (4 p r - q^2) = 0; any real
        // root works, prefer the one keeping |z - p| large.
        CubicRoots res = cubic_roots(1.0, -p, -4.0 * r, 4.0 * p * r - q * q);
        double z0 = res.roots[0].real();
        double best = -1.0;
        for (const Complex& z : res.roots) {
            if (std::abs(z.imag()) > 1e-8 * std::max(1.0, std::abs(z))) continue;
            double gain = std::abs(z.real() - p);
            if (gain > best) {
                best = gain;
                z0 = z.real();
            }
        }
        Complex s = std::sqrt(Complex(z0 - p));
        if (std::abs(s) < 1e-150) {
            auto z = quadratic_roots_c(1.0, p, r);
            y[0] = std::sqrt(z[0]);
            y[1] = -y[0];
            y[2] = std::sqrt(z[1]);
            y[3] = -y[2];
        } else {
            // y^4+py^2+qy+r = (y^2 + s y + z0/2 - t)(y^2 - s y + z0/2 + t)
            Complex t = q / (2.0 * s);
            auto q1 = quadratic_roots_c(1.0, s, 0.5 * z0 - t);
            auto q2 = quadratic_roots_c(1.0, -s, 0.5 * z0 + t);
            y = {q1[0], q1[1], q2[0], q2[1]};
        }
    }

    std::array<Complex, 4> x;
    for (int k = 0; k < 4; ++k) x[std::size_t(k)] = y[std::size_t(k)] - sh;
    return x;
}

} // namespace

std::array<double, 4> characteristic_quartic(const Mat4& a) {
    // Newton's identities on the power sums tr(A^k).
    const Mat4 a2 = a * a;
    const Mat4 a3m = a2 * a;
    const Mat4 a4m = a2 * a2;
    auto tr = [](const Mat4& x) { return x(0, 0) + x(1, 1) + x(2, 2) + x(3, 3); };
    const double p1 = tr(a), p2 = tr(a2), p3 = tr(a3m), p4 = tr(a4m);
    const double e1 = p1;
    const double e2 = (e1 * p1 - p2) / 2.0;
    const double e3 = (e2 * p1 - e1 * p2 + p3) / 3.0;
    const double e4 = (e3 * p1 - e2 * p2 + e1 * p3 - p4) / 4.0;
    // x^4 + c3 x^3 + c2 x^2 + c1 x + c0
    return {e4, -e3, e2, -e1};
}

Spectrum4 eig4(const Mat4& a) {
    if (!a.is_finite())
        throw Error(Errc::invalid_argument, "eig4: non-finite matrix entries");

    const auto c = characteristic_quartic(a); // {c0, c1, c2, c3}

    // Scale for conditioning: solve for x = lambda/s.
    double s = 0.0;
    s = std::max(s, std::abs(c[3]));
    s = std::max(s, std::sqrt(std::abs(c[2])));
    s = std::max(s, std::cbrt(std::abs(c[1])));
    s = std::max(s, std::pow(std::abs(c[0]), 0.25));
    if (s == 0.0) {
        Spectrum4 out;
        out.eigenvalues = {Complex(0), Complex(0), Complex(0), Complex(0)};
        out.residuals = {0, 0, 0, 0};
        return out;
    }

    const double b3 = c[3] / s;
    const double b2 = c[2] / (s * s);
    const double b1 = c[1] / (s * s * s);
    const double b0 = c[0] / (s * s * s * s);

    std::array<Complex, 4> roots = quartic_roots(b3, b2, b1, b0);
    const std::array<double, 5> coeffs = {c[0], c[1], c[2], c[3], 1.0};
    for (auto& x : roots) {
        x *= s;
        x = poly_newton(coeffs, x, 10);
    }
    symmetrize_conjugates(roots);

    Spectrum4 out;
    out.eigenvalues = roots;
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
              [](const Complex& x, const Complex& y) {
                  double rx = std::abs(x.real()), ry = std::abs(y.real());
                  if (rx != ry) return rx < ry;
                  double ix = std::abs(x.imag()), iy = std::abs(y.imag());
                  if (ix != iy) return ix < iy;
                  return x.imag() < y.imag();
              });
    double worst = 0.0;
    for (int k = 0; k < 4; ++k) {
        out.residuals[std::size_t(k)] = poly_residual(coeffs, out.eigenvalues[std::size_t(k)], s);
        worst = std::max(worst, out.residuals[std::size_t(k)]);
    }
    if (worst > 1e-8) {
        std::ostringstream os;
        os << "eig4: residual " << worst << " above 1e-8 for matrix " << format_matrix(a);
        throw Error(Errc::convergence_failure, os.str());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dense linear solves
// ---------------------------------------------------------------------------

namespace {

// Partially pivoted LU on an n x n row-major matrix. Returns false when a
// pivot falls below tol * scale.
template <int N>
bool lu_factor(std::array<double, std::size_t(N) * N>& a, std::array<int, std::size_t(N)>& piv,
               double& det, double pivot_tol) {
    det = 1.0;
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return false;
    for (int k = 0; k < N; ++k) {
        int p = k;
        double best = std::abs(a[std::size_t(k) * N + k]);
        for (int i = k + 1; i < N; ++i) {
            double v = std::abs(a[std::size_t(i) * N + k]);
            if (v > best) {
                best = v;
                p = i;
            }
        }
        piv[std::size_t(k)] = p;
        if (p != k) {
            for (int j = 0; j < N; ++j)
                std::swap(a[std::size_t(k) * N + j], a[std::size_t(p) * N + j]);
            det = -det;
        }
        double pivot = a[std::size_t(k) * N + k];
        det *= pivot;
        if (std::abs(pivot) < pivot_tol * scale) return false;
        for (int i = k + 1; i < N; ++i) {
            double f = a[std::size_t(i) * N + k] / pivot;
            a[std::size_t(i) * N + k] = f;
            for (int j = k + 1; j < N; ++j)
                a[std::size_t(i) * N + j] -= f * a[std::size_t(k) * N + j];
        }
    }
    return true;
}

template <int N>
void lu_solve(const std::array<double, std::size_t(N) * N>& lu,
              const std::array<int, std::size_t(N)>& piv, std::array<double, std::size_t(N)>& b) {
    // Factorization stores fully swapped rows, so permute b first.
    for (int k = 0; k < N; ++k)
        if (piv[std::size_t(k)] != k) std::swap(b[std::size_t(k)], b[std::size_t(piv[std::size_t(k)])]);
    for (int k = 0; k < N; ++k)
        for (int i = k + 1; i < N; ++i) b[std::size_t(i)] -= lu[std::size_t(i) * N + k] * b[std::size_t(k)];
    for (int k = N - 1; k >= 0; --k) {
        for (int j = k + 1; j < N; ++j) b[std::size_t(k)] -= lu[std::size_t(k) * N + j] * b[std::size_t(j)];
        b[std::size_t(k)] /= lu[std::size_t(k) * N + k];
    }
}

} // namespace

Mat4 solve_lyapunov(const Mat4& a, const Mat4& d, double eps_stab) {
    if (!a.is_finite() || !d.is_finite())
        throw Error(Errc::invalid_argument, "solve_lyapunov: non-finite input");
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (std::abs(d(i, j) - d(j, i)) > 1e-12 * std::max(1.0, d.max_abs()))
                throw Error(Errc::invalid_argument, "solve_lyapunov: D not symmetric");

    Spectrum4 sp = eig4(a);
    double max_re = -std::numeric_limits<double>::infinity();
    for (const Complex& l : sp.eigenvalues) max_re = std::max(max_re, l.real());
    if (!(max_re < -eps_stab)) {
        std::ostringstream os;
        os << "solve_lyapunov: drift not strictly stable (max Re lambda = " << max_re
           << ", eps_stab = " << eps_stab << ")";
        throw Error(Errc::unstable_drift, os.str());
    }

    // Row-major vec: v[4i+j] = V_ij; M[(ij),(kl)] = A_ik delta_jl + A_jl delta_ik.
    constexpr int N = 16;
    std::array<double, N * N> mat{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l) {
                    double v = 0.0;
                    if (j == l) v += a(i, k);
                    if (i == k) v += a(j, l);
                    if (v != 0.0) mat[std::size_t(4 * i + j) * N + (4 * k + l)] = v;
                }

    std::array<double, N * N> lu = mat;
    std::array<int, N> piv{};
    double det = 0.0;
    if (!lu_factor<N>(lu, piv, det, 1e-13)) {
        std::ostringstream os;
        os << "solve_lyapunov: Kronecker system numerically singular (gap closure), "
              "max Re lambda = "
           << max_re;
        throw Error(Errc::singular_system, os.str());
    }

    std::array<double, N> x{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) x[std::size_t(4 * i + j)] = -d(i, j);
    std::array<double, N> rhs = x;
    lu_solve<N>(lu, piv, x);

    // Iterative refinement with an extended-precision residual keeps the
    // residual contract reachable when the gap is small and V is large.
    for (int iter = 0; iter < 4; ++iter) {
        std::array<double, N> res{};
        double rmax = 0.0;
        for (int i = 0; i < N; ++i) {
            long double acc = -static_cast<long double>(rhs[std::size_t(i)]);
            for (int j = 0; j < N; ++j)
                acc += static_cast<long double>(mat[std::size_t(i) * N + j]) *
                       static_cast<long double>(x[std::size_t(j)]);
            res[std::size_t(i)] = static_cast<double>(acc);
            rmax = std::max(rmax, std::abs(res[std::size_t(i)]));
        }
        if (rmax < 1e-13 * std::max(1.0, d.max_abs())) break;
        lu_solve<N>(lu, piv, res);
        for (int i = 0; i < N; ++i) x[std::size_t(i)] -= res[std::size_t(i)];
    }

    Mat4 v;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) v(i, j) = x[std::size_t(4 * i + j)];
    // Symmetrize; the exact solution is symmetric when D is.
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            double s = 0.5 * (v(i, j) + v(j, i));
            v(i, j) = v(j, i) = s;
        }

    Mat4 resid = a * v + v * a.transposed() + d;
    double rmax = resid.max_abs();
    // Contract: residual below 1e-10 * ||D||_max. For diverging V near gap
    // closure that bound drops under the double-precision floor eps*||A||*||V||,
    // so the throw budget never demands the unattainable.
    double floor = 32.0 * std::numeric_limits<double>::epsilon() *
                   (1.0 + a.max_abs()) * v.max_abs();
    double budget = std::max(Tolerances{}.lyap_residual * std::max(d.max_abs(), 1e-300), floor);
    if (rmax > budget) {
        std::ostringstream os;
        os << "solve_lyapunov: residual " << rmax << " exceeds " << budget
           << " (gap " << -max_re << ")";
        throw Error(Errc::singular_system, os.str());
    }
    return v;
}

std::array<double, 4> sym_eigenvalues(const Mat4& v) {
    Mat4 a = v;
    // Cyclic Jacobi; 4x4 converges in a handful of sweeps.
    for (int sweep = 0; sweep < 32; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-30) break;
        for (int p = 0; p < 4; ++p)
            for (int q = p + 1; q < 4; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                double t = std::copysign(1.0, theta) /
                           (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                double cth = 1.0 / std::sqrt(1.0 + t * t);
                double sth = t * cth;
                for (int k = 0; k < 4; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = cth * akp - sth * akq;
                    a(k, q) = sth * akp + cth * akq;
                }
                for (int k = 0; k < 4; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = cth * apk - sth * aqk;
                    a(q, k) = sth * apk + cth * aqk;
                }
            }
    }
    std::array<double, 4> ev = {a(0, 0), a(1, 1), a(2, 2), a(3, 3)};
    std::sort(ev.begin(), ev.end());
    return ev;
}

// ---------------------------------------------------------------------------
// Adaptive Runge-Kutta (Dormand-Prince 5(4))
// ---------------------------------------------------------------------------

namespace {

struct Dopri5 {
    const OdeRhs& f;
    std::size_t n;
    std::vector<double> k1, k2, k3, k4, k5, k6, k7, ytmp;

    explicit Dopri5(const OdeRhs& rhs, std::size_t dim)
        : f(rhs), n(dim), k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim),
          ytmp(dim) {}

    // One trial step from (t, y); on acceptance writes ynew and the error
    // estimate norm (scaled). k1 must hold f(t, y) on entry (FSAL).
    double attempt(double t, const std::vector<double>& y, double h, std::vector<double>& ynew,
                   double tol) {
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (0.2 * k1[i]);
        f(t + 0.2 * h, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (3.0 / 40.0 * k1[i] + 9.0 / 40.0 * k2[i]);
        f(t + 0.3 * h, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (44.0 / 45.0 * k1[i] - 56.0 / 15.0 * k2[i] + 32.0 / 9.0 * k3[i]);
        f(t + 0.8 * h, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (19372.0 / 6561.0 * k1[i] - 25360.0 / 2187.0 * k2[i] +
                                  64448.0 / 6561.0 * k3[i] - 212.0 / 729.0 * k4[i]);
        f(t + 8.0 / 9.0 * h, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (9017.0 / 3168.0 * k1[i] - 355.0 / 33.0 * k2[i] +
                                  46732.0 / 5247.0 * k3[i] + 49.0 / 176.0 * k4[i] -
                                  5103.0 / 18656.0 * k5[i]);
        f(t + h, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (35.0 / 384.0 * k1[i] + 500.0 / 1113.0 * k3[i] +
                                  125.0 / 192.0 * k4[i] - 2187.0 / 6784.0 * k5[i] +
                                  11.0 / 84.0 * k6[i]);
        f(t + h, ynew, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double e = h * (71.0 / 57600.0 * k1[i] - 71.0 / 16695.0 * k3[i] +
                            71.0 / 1920.0 * k4[i] - 17253.0 / 339200.0 * k5[i] +
                            22.0 / 525.0 * k6[i] - 1.0 / 40.0 * k7[i]);
            double sc = tol + tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            double r = e / sc;
            err += r * r;
        }
        return std::sqrt(err / double(n));
    }
};

} // namespace

namespace {

// Shared driver: integrates to t1, invoking `on_sample` at each requested
// time (sample times must be sorted, within (t0, t1]).
void dopri5_drive(const OdeRhs& f, std::vector<double>& y, double t0, double t1, double tol,
                  std::span<const double> sample_times,
                  const std::function<void(double, const std::vector<double>&)>& on_sample,
                  std::size_t* steps_out, std::size_t* rejected_out) {
    if (!(tol > 0.0)) throw Error(Errc::invalid_argument, "integrate_ode: tol must be > 0");
    const std::size_t n = y.size();
    Dopri5 rk(f, n);
    std::vector<double> ynew(n);

    double t = t0;
    std::size_t next_sample = 0;
    std::size_t steps = 0, rejected = 0;

    f(t, y, rk.k1);
    double h = (t1 - t0) * 1e-3;
    // Initial step from the customary curvature-free heuristic.
    {
        double ynorm = 0.0, fnorm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            ynorm = std::max(ynorm, std::abs(y[i]));
            fnorm = std::max(fnorm, std::abs(rk.k1[i]));
        }
        if (fnorm > 1e-300) h = std::min(h, 0.01 * (1.0 + ynorm) / fnorm);
        h = std::max(h, 1e-12 * std::max(1.0, std::abs(t1 - t0)));
    }

    while (t < t1) {
        while (next_sample < sample_times.size() && sample_times[next_sample] <= t) {
            on_sample(sample_times[next_sample], y);
            ++next_sample;
        }
        double t_stop = (next_sample < sample_times.size()) ? sample_times[next_sample] : t1;
        bool hit = false;
        if (t + h >= t_stop - 1e-14 * std::max(1.0, std::abs(t_stop))) {
            h = t_stop - t;
            hit = true;
        }
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
            std::ostringstream os;
            os.precision(17);
            os << "step size underflow at t = " << t << ", last valid state [";
            for (std::size_t i = 0; i < n; ++i) os << (i ? "," : "") << y[i];
            os << "]";
            throw Error(Errc::step_size_underflow, os.str());
        }

        // Accept well below the nominal tolerance; the margin keeps the
        // accumulated error of long runs near tol as well.
        double err = rk.attempt(t, y, h, ynew, tol);
        if (err <= 0.5) {
            t = hit ? t_stop : t + h;
            y.swap(ynew);
            rk.k1.swap(rk.k7); // FSAL
            ++steps;
            if (hit && next_sample < sample_times.size() &&
                t_stop == sample_times[next_sample]) {
                on_sample(t_stop, y);
                ++next_sample;
            }
            double grow = std::pow(0.1 / std::max(err, 1e-10), 0.2);
            h *= std::clamp(grow, 0.2, 5.0);
        } else {
            ++rejected;
            h *= std::clamp(std::pow(0.1 / err, 0.2), 0.1, 0.9);
        }
        if (steps + rejected > 50'000'000)
            throw Error(Errc::convergence_failure, "integrate_ode: step budget exhausted");
    }
    while (next_sample < sample_times.size()) {
        on_sample(sample_times[next_sample], y);
        ++next_sample;
    }
    if (steps_out) *steps_out = steps;
    if (rejected_out) *rejected_out = rejected;
}

} // namespace

OdeSolution integrate_ode(const OdeRhs& f, std::span<const double> y0, double t0, double t1,
                          double tol, std::span<const double> sample_times) {
    if (t1 < t0) throw Error(Errc::invalid_argument, "integrate_ode: t1 < t0");
    OdeSolution sol;
    std::vector<double> y(y0.begin(), y0.end());
    std::vector<double> samples(sample_times.begin(), sample_times.end());
    if (samples.empty()) samples.push_back(t1);
    for (double ts : samples)
        if (ts < t0 || ts > t1)
            throw Error(Errc::invalid_argument, "integrate_ode: sample time outside span");

    // Samples at exactly t0 are served from the initial state.
    auto on_sample = [&](double ts, const std::vector<double>& ys) {
        sol.t.push_back(ts);
        sol.y.push_back(ys);
    };
    std::size_t k = 0;
    while (k < samples.size() && samples[k] <= t0) {
        on_sample(t0, y);
        ++k;
    }
    dopri5_drive(f, y, t0, t1, tol, std::span<const double>(samples).subspan(k), on_sample,
                 &sol.steps, &sol.rejected);
    return sol;
}

void advance_ode(const OdeRhs& f, std::vector<double>& y, double& t, double t_target,
                 double tol) {
    if (t_target <= t) return;
    dopri5_drive(f, y, t, t_target, tol, {}, [](double, const std::vector<double>&) {}, nullptr,
                 nullptr);
    t = t_target;
}

// ---------------------------------------------------------------------------
// Regression
// ---------------------------------------------------------------------------

LogLogFit fit_loglog(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size())
        throw Error(Errc::invalid_argument, "fit_loglog: size mismatch");
    if (xs.size() < 5)
        throw Error(Errc::insufficient_points, "fit_loglog: need at least 5 points");
    const std::size_t n = xs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw Error(Errc::non_positive_data, "fit_loglog: inputs must be positive");
        double lx = std::log(xs[i]), ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
    }
    double dn = double(n);
    double vxx = sxx - sx * sx / dn;
    double vxy = sxy - sx * sy / dn;
    double vyy = syy - sy * sy / dn;
    if (vxx <= 0.0)
        throw Error(Errc::non_positive_data, "fit_loglog: degenerate abscissa");
    LogLogFit fit;
    fit.slope = vxy / vxx;
    fit.intercept = (sy - fit.slope * sx) / dn;
    fit.r_squared = (vyy > 0.0) ? (vxy * vxy) / (vxx * vyy) : 1.0;
    return fit;
}

} // namespace dptom
