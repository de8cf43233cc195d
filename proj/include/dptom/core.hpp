#pragma once

// Small fixed-size linear algebra, the error taxonomy and the tolerance knobs
// shared by every module. Everything here is value-semantic and header-light.

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

namespace dptom {

using Complex = std::complex<double>;
using Vec4 = std::array<double, 4>;

/// Dense real 4x4 matrix, row-major.
struct Mat4 {
    std::array<double, 16> m{};

    double& operator()(int i, int j) { return m[4 * i + j]; }
    double operator()(int i, int j) const { return m[4 * i + j]; }

    static Mat4 identity();
    static Mat4 diag(double a, double b, double c, double d);

    Mat4 transposed() const;
    double max_abs() const;
    bool is_finite() const;
};

Mat4 operator+(const Mat4& a, const Mat4& b);
Mat4 operator-(const Mat4& a, const Mat4& b);
Mat4 operator*(const Mat4& a, const Mat4& b);
Mat4 operator*(double s, const Mat4& a);
Vec4 operator*(const Mat4& a, const Vec4& x);

enum class Errc {
    invalid_argument,
    non_positive_frequency,
    negative_rate,
    degenerate_leading_coefficient,
    cubic_solve_failure,
    convergence_failure,
    unstable_drift,
    singular_system,
    step_size_underflow,
    non_positive_data,
    insufficient_points,
    unphysical_branch,
    unphysical_covariance,
    negative_discriminant,
    singular_covariance,
    fit_range_crosses_boundary,
    no_intersection,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail)
        : std::runtime_error(std::string(errc_name(code)) + ": " + detail),
          code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// Tolerance configuration. Values are in units of omega_m where dimensional.
struct Tolerances {
    double eps_stab = 1e-9;       ///< strict stability: max Re(lambda) < -eps_stab
    double eps_band = 1e-7;       ///< marginality band on |Re(lambda_1)|
    double root_residual = 1e-9;  ///< polynomial root acceptance (relative)
    double lyap_residual = 1e-10; ///< Lyapunov residual, relative to ||D||_max
};

} // namespace dptom
