#include "tuplevar/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "tuplevar/error.hpp"

namespace tuplevar {

double wrap_phase(double phase) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (phase > -std::numbers::pi && phase <= std::numbers::pi) return phase;
    double r = std::fmod(phase, two_pi);
    if (r <= -std::numbers::pi) r += two_pi;
    if (r > std::numbers::pi) r -= two_pi;
    return r;
}

LogComplex LogComplex::from(Complex z) {
    const double mag = std::abs(z);
    if (!(mag >= kZeroThreshold)) return zero();
    return {std::log(mag), std::arg(z), false};
}

LogComplex LogComplex::from_polar(double log_mag, double phase) {
    return {log_mag, wrap_phase(phase), false};
}

LogComplex& LogComplex::operator*=(const LogComplex& rhs) {
    if (is_zero || rhs.is_zero) {
        *this = zero();
        return *this;
    }
    log_mag += rhs.log_mag;
    phase = wrap_phase(phase + rhs.phase);
    return *this;
}

LogComplex& LogComplex::operator/=(const LogComplex& rhs) {
    if (rhs.is_zero) {
        // x / 0 has no finite representation; callers check the divisor first.
        log_mag = std::numeric_limits<double>::infinity();
        phase = 0.0;
        is_zero = false;
        return *this;
    }
    if (is_zero) return *this;
    log_mag -= rhs.log_mag;
    phase = wrap_phase(phase - rhs.phase);
    return *this;
}

LogComplex LogComplex::pow(std::int64_t e) const {
    if (e == 0) return one();
    if (is_zero) return e > 0 ? zero() : LogComplex{std::numeric_limits<double>::infinity(), 0.0, false};
    const double de = static_cast<double>(e);
    // Reduce the phase before scaling so large exponents keep their accuracy.
    return {log_mag * de, wrap_phase(std::fmod(phase * de, 2.0 * std::numbers::pi)), false};
}

LogComplex LogComplex::conj() const {
    if (is_zero) return *this;
    return {log_mag, wrap_phase(-phase), false};
}

Complex LogComplex::value() const {
    if (is_zero) return {0.0, 0.0};
    return std::polar(std::exp(log_mag), phase);
}

double LogComplex::log10_mag() const {
    if (is_zero) return -std::numeric_limits<double>::infinity();
    return log_mag / std::numbers::ln10;
}

void ProductAccumulator::multiply(Complex z) {
    const double mag = std::abs(z);
    if (mag < std::exp(min_log_factor_)) min_log_factor_ = mag > 0.0 ? std::log(mag) : -std::numeric_limits<double>::infinity();
    if (!(mag >= kZeroThreshold)) {
        zero_ = true;
        return;
    }
    if (zero_) return;
    mantissa_ *= z;
    renormalize();
}

void ProductAccumulator::multiply(const LogComplex& z) {
    if (z.is_zero) {
        zero_ = true;
        min_log_factor_ = -std::numeric_limits<double>::infinity();
        return;
    }
    min_log_factor_ = std::min(min_log_factor_, z.log_mag);
    if (zero_) return;
    extra_log_ += z.log_mag;
    extra_phase_ = wrap_phase(extra_phase_ + z.phase);
}

void ProductAccumulator::renormalize() {
    const double big = std::max(std::abs(mantissa_.real()), std::abs(mantissa_.imag()));
    int e = 0;
    std::frexp(big, &e);
    if (e != 0) {
        mantissa_ = {std::ldexp(mantissa_.real(), -e), std::ldexp(mantissa_.imag(), -e)};
        exponent2_ += e;
    }
}

LogComplex ProductAccumulator::result() const {
    if (zero_) return LogComplex::zero();
    LogComplex out = LogComplex::from(mantissa_);
    out.log_mag += static_cast<double>(exponent2_) * std::numbers::ln2 + extra_log_;
    out.phase = wrap_phase(out.phase + extra_phase_);
    return out;
}

double min_pairwise_gap(const ComplexVector& values) {
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < values.size(); ++i)
        for (Eigen::Index j = i + 1; j < values.size(); ++j)
            gap = std::min(gap, std::abs(values[i] - values[j]));
    return gap;
}

SpectralData eigendecomposition(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) throw Error(ErrorKind::InvalidIndex, "eigendecomposition needs a square matrix");
    const Eigen::Index n = a.rows();
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(a, true);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorKind::NumericalFailure, "complex Schur iteration did not converge");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    const auto& vals = solver.eigenvalues();
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
        if (vals[x].real() != vals[y].real()) return vals[x].real() < vals[y].real();
        return vals[x].imag() < vals[y].imag();
    });

    SpectralData out;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index src = order[static_cast<std::size_t>(j)];
        out.eigenvalues[j] = vals[src];
        ComplexVector v = solver.eigenvectors().col(src);
        const double norm = v.norm();
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw Error(ErrorKind::NumericalFailure, "eigenvector with zero or non-finite norm");
        out.eigenvectors.col(j) = v / norm;
    }
    out.min_gap = min_pairwise_gap(out.eigenvalues);

    const double scale = std::max(a.norm(), std::numeric_limits<double>::min());
    double worst = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const ComplexVector r = a * out.eigenvectors.col(j) - out.eigenvalues[j] * out.eigenvectors.col(j);
        worst = std::max(worst, r.norm() / scale);
    }
    out.backward_error = worst;
    return out;
}

LogComplex lu_logdet(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw Error(ErrorKind::InvalidIndex, "determinant needs a square matrix");
    if (m.rows() == 0) return LogComplex::one();
    Eigen::PartialPivLU<ComplexMatrix> lu(m);
    const ComplexMatrix& packed = lu.matrixLU();
    ProductAccumulator acc;
    for (Eigen::Index i = 0; i < packed.rows(); ++i) acc.multiply(packed(i, i));
    if (acc.is_zero()) return LogComplex::zero();
    LogComplex det = acc.result();
    if (lu.permutationP().determinant() < 0) det *= LogComplex::from(Complex(-1.0, 0.0));
    return det;
}

std::vector<double> singular_values(const ComplexMatrix& m) {
    if (m.size() == 0) return {};
    Eigen::BDCSVD<ComplexMatrix> svd(m);
    if (svd.info() != Eigen::Success) throw Error(ErrorKind::NumericalFailure, "SVD did not converge");
    const auto& s = svd.singularValues();
    return {s.data(), s.data() + s.size()};
}

double smallest_singular_value(const ComplexMatrix& m) {
    const auto s = singular_values(m);
    return s.empty() ? 0.0 : *std::min_element(s.begin(), s.end());
}

int numerical_rank(const ComplexMatrix& m, double tol) {
    const auto s = singular_values(m);
    if (s.empty()) return 0;
    const double smax = *std::max_element(s.begin(), s.end());
    if (!(smax > 0.0)) return 0;
    return static_cast<int>(std::count_if(s.begin(), s.end(), [&](double x) { return x > tol * smax; }));
}

}  // namespace tuplevar
