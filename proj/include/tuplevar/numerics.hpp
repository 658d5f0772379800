#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace tuplevar {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using ComplexRow = Eigen::RowVectorXcd;

/// Pivots (and product factors) below this magnitude count as exact zeros.
inline constexpr double kZeroThreshold = 1e-300;

/**
 * A complex number stored as (natural-log magnitude, phase).
 *
 * Determinants of Krylov matrices routinely fall far outside the range of a
 * double, so every product in the library is carried in this form.  When
 * `is_zero` is set the other two fields carry no meaning.
 */
struct LogComplex {
    double log_mag = 0.0;
    double phase = 0.0;  // radians, in (-pi, pi]
    bool is_zero = false;

    static LogComplex zero() { return {0.0, 0.0, true}; }
    static LogComplex one() { return {}; }
    static LogComplex from(Complex z);
    static LogComplex from_polar(double log_mag, double phase);

    LogComplex& operator*=(const LogComplex& rhs);
    LogComplex& operator/=(const LogComplex& rhs);
    friend LogComplex operator*(LogComplex a, const LogComplex& b) { return a *= b; }
    friend LogComplex operator/(LogComplex a, const LogComplex& b) { return a /= b; }

    /// Integer power; pow(0) of zero is one.
    LogComplex pow(std::int64_t e) const;
    LogComplex conj() const;

    /// Back to an ordinary complex number.  Overflows to inf / underflows to 0
    /// exactly as exp() does.
    Complex value() const;
    double log10_mag() const;
};

/// Maps any angle into (-pi, pi].
double wrap_phase(double phase);

/**
 * Running product of complex factors with a separate binary exponent, so
 * long products neither overflow nor pay for a log() per factor.
 */
class ProductAccumulator {
public:
    void multiply(Complex z);
    void multiply(const LogComplex& z);
    LogComplex result() const;
    bool is_zero() const { return zero_; }
    /// Smallest |factor| seen so far, as a natural log (+inf when empty).
    double min_log_factor() const { return min_log_factor_; }

private:
    void renormalize();

    Complex mantissa_{1.0, 0.0};
    long exponent2_ = 0;
    double extra_log_ = 0.0;
    double extra_phase_ = 0.0;
    bool zero_ = false;
    double min_log_factor_ = std::numeric_limits<double>::infinity();
    int pending_ = 0;
};

struct SpectralData {
    ComplexVector eigenvalues;
    ComplexMatrix eigenvectors;  // unit-norm columns, same order as eigenvalues
    double min_gap = 0.0;
    double backward_error = 0.0;
};

/// Complex Schur based eigendecomposition with eigenvalues sorted by real part,
/// then imaginary part.  Throws NumericalFailure if the QR iteration fails.
SpectralData eigendecomposition(const ComplexMatrix& a);

/// Minimum pairwise distance between entries of `values` (+inf for size < 2).
double min_pairwise_gap(const ComplexVector& values);

/// Determinant by LU with partial pivoting, accumulated in log form.
LogComplex lu_logdet(const ComplexMatrix& m);

std::vector<double> singular_values(const ComplexMatrix& m);
double smallest_singular_value(const ComplexMatrix& m);

/// Number of singular values strictly above tol * sigma_max.
int numerical_rank(const ComplexMatrix& m, double tol);

}  // namespace tuplevar
