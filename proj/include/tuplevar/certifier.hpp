#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tuplevar/generators.hpp"
#include "tuplevar/multilinear.hpp"
#include "tuplevar/numerics.hpp"
#include "tuplevar/spectral.hpp"

namespace tuplevar {

/// How P = det M is evaluated.
enum class PRoute {
    /// From the Krylov matrix of the induced operator and the covector.
    Krylov,
    /// From the eigendecompositions of the A_i: Vandermonde of the eigenvalue
    /// sums times the covector pairings, over det of the eigenvector basis.
    Spectral,
};

enum class KrylovMethod {
    /// Unitary Hessenberg reduction started at the covector; det M is read
    /// off the subdiagonal.  Accurate for every N the library accepts.
    Orthogonal,
    /// LU of the explicit row-scaled Krylov matrix.  Loses accuracy quickly
    /// with N (the matrix is Vandermonde-like); kept as a cross-check.
    Explicit,
};

struct EvalOptions {
    PRoute route = PRoute::Krylov;
    KrylovMethod krylov = KrylovMethod::Orthogonal;
    std::size_t size_cap = kDefaultSizeCap;
    /// The spectral route refuses matrices with eigenvalues closer than this.
    double gap_tol = 1e-8;
};

struct KrylovMatrix {
    ComplexMatrix rows;                 // unit-norm rows
    std::vector<double> row_log_scales;  // true row r = exp(row_log_scales[r]) * rows.row(r)
};

/// Rows w, wA, ..., wA^{N-1}, each renormalized as it is produced.
KrylovMatrix build_krylov_matrix(const ComplexMatrix& a, const ComplexRow& w,
                                 std::size_t size_cap = kDefaultSizeCap);

/// det [w; wA; ...; wA^{N-1}].
LogComplex krylov_determinant(const ComplexMatrix& a, const ComplexRow& w, KrylovMethod method);

/// Dimension of the cyclic space span{w, wA, wA^2, ...}: the index of the
/// first Hessenberg subdiagonal below tol * |A|_2, started at w.  Equals
/// rank M in exact arithmetic without forming the Krylov matrix.
int krylov_dimension(const ComplexMatrix& a, const ComplexRow& w, double tol);

/// The pieces of the spectral route: P = vandermonde * pairings / eigenvector_det.
struct SpectralFactors {
    LogComplex vandermonde;
    LogComplex pairings;
    LogComplex eigenvector_det;
    /// Smallest log|w.v_J| over the eigen-index tuples J.
    double min_log_pairing = 0.0;
};

struct PhatValue {
    LogComplex value;
    LogComplex p;
    Denominator denominator;
    /// Set when the denominator vanishes or a charged factor is below the
    /// margin floor; the quotient is then 0/0 up to rounding.
    bool indeterminate = false;
};

/// Evaluates P and P-hat for many tuples of one partition; the covector and
/// the D-factor lists are built once.
class Evaluator {
public:
    Evaluator(const Partition& p, EvalOptions options = {});

    const Partition& partition() const { return basis_.partition(); }
    const EvalOptions& options() const { return options_; }
    const TensorBasis& basis() const { return basis_; }
    const ComplexRow& covector() const { return w_; }
    const FactorPlan& plan() const { return plan_; }

    LogComplex P(const MatrixTuple& t) const;
    LogComplex P(const MatrixTuple& t, std::span<const SpectralData> spectra) const;
    PhatValue Phat(const MatrixTuple& t) const;
    SpectralFactors spectral_factors(std::span<const SpectralData> spectra) const;

private:
    void check(const MatrixTuple& t) const;

    TensorBasis basis_;
    ComplexRow w_;
    FactorPlan plan_;
    EvalOptions options_;
};

/// Phat is flagged indeterminate when the denominator margin is below this.
inline const double kDenominatorFloor = std::log(1e-6);

std::vector<SpectralData> spectra_of(const MatrixTuple& t);

LogComplex eval_P(const MatrixTuple& t, const EvalOptions& options = {});
PhatValue eval_Phat(const MatrixTuple& t, const EvalOptions& options = {});

/// Degree of P-hat in the entries of A_i:
/// C(n,2) C(n-2, k_i - 1) prod_{j != i} C(n, k_j).
std::int64_t hatP_degree(const Partition& p, int i);
std::int64_t hatP_total_degree(const Partition& p);

struct HomogeneityResult {
    double error = 0.0;      // |observed log shift - expected log shift|
    double tolerance = 0.0;  // 1e-6 * degree
    bool indeterminate = false;
    bool passed() const { return !indeterminate && error <= tolerance; }
};

/// Compares log|Phat| before and after A_i <- c A_i with degree_i * ln c.
HomogeneityResult homogeneity_check(const MatrixTuple& t, int i, double c, const EvalOptions& options = {});

/// Same for P under scaling every matrix by c; P has degree C(N,2) jointly.
HomogeneityResult joint_homogeneity_check(const MatrixTuple& t, double c, const EvalOptions& options = {});

enum class VerdictStatus { OnVariety, Generic, Indeterminate };
const char* to_string(VerdictStatus s) noexcept;

struct CertifyConfig {
    double drop = 23.0;
    double margin = 11.5;
    double gap_tol = 1e-8;
    int calibration_samples = 8;
    Seed seed{0x7475706c65766172ULL};
    std::size_t size_cap = kDefaultSizeCap;
    PRoute route = PRoute::Spectral;
    KrylovMethod krylov = KrylovMethod::Orthogonal;
    /// Finite-difference step for the gradient of log Phat (unit-norm inputs).
    double fd_step = 1e-6;
};

struct Verdict {
    VerdictStatus status = VerdictStatus::Indeterminate;
    /// log(|Phat| / |grad Phat|) at the normalized tuple: a first-order
    /// estimate of the log distance to the zero set.
    double residual = 0.0;
    /// Mean residual over random tuples of the same partition.
    double scale = 0.0;
    double denom_margin = 0.0;
    double log_abs_phat = 0.0;
    std::vector<double> eigen_gaps;
    std::vector<std::string> notes;
};

/**
 * log(|Phat| / |grad_T Phat|) where the gradient is taken over all matrix
 * entries and projected off each matrix's radial direction.  `t` should be
 * normalized.  Returns -inf when Phat vanishes.
 */
double log_distance_estimate(const Evaluator& ev, const MatrixTuple& t, const PhatValue& at_t, double step);

/// Mean log distance over cfg.calibration_samples seeded random tuples.
/// Memoized per (partition, seed, samples, route, step).
double calibration_scale(const Partition& p, const CertifyConfig& cfg);

Verdict certify_membership(const MatrixTuple& t, const CertifyConfig& cfg = {});

}  // namespace tuplevar
