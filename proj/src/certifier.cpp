#include "tuplevar/certifier.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "tuplevar/error.hpp"

namespace tuplevar {

const char* to_string(VerdictStatus s) noexcept {
    switch (s) {
        case VerdictStatus::OnVariety: return "OnVariety";
        case VerdictStatus::Generic: return "Generic";
        case VerdictStatus::Indeterminate: return "Indeterminate";
    }
    return "Unknown";
}

KrylovMatrix build_krylov_matrix(const ComplexMatrix& a, const ComplexRow& w, std::size_t size_cap) {
    if (a.rows() != a.cols() || a.cols() != w.size())
        throw Error(ErrorKind::InvalidIndex, "operator and covector shapes disagree");
    if (static_cast<std::size_t>(a.rows()) > size_cap)
        throw Error(ErrorKind::TooLarge, "Krylov matrix exceeds size cap");
    const Eigen::Index n = a.rows();
    KrylovMatrix k{ComplexMatrix::Zero(n, n), std::vector<double>(static_cast<std::size_t>(n))};
    ComplexRow row = w;
    double log_scale = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) {
        if (r > 0) row = row * a;
        const double norm = row.norm();
        if (!(norm > 0.0)) {
            // Krylov space exhausted: this and every later row is zero.
            for (Eigen::Index s = r; s < n; ++s)
                k.row_log_scales[static_cast<std::size_t>(s)] = -std::numeric_limits<double>::infinity();
            break;
        }
        row /= norm;
        log_scale += std::log(norm);
        k.rows.row(r) = row;
        k.row_log_scales[static_cast<std::size_t>(r)] = log_scale;
    }
    return k;
}

namespace {

LogComplex explicit_krylov_det(const ComplexMatrix& a, const ComplexRow& w) {
    const KrylovMatrix k = build_krylov_matrix(a, w, std::numeric_limits<std::size_t>::max());
    double total = 0.0;
    for (double g : k.row_log_scales) {
        if (!std::isfinite(g)) return LogComplex::zero();
        total += g;
    }
    LogComplex det = lu_logdet(k.rows);
    if (det.is_zero) return det;
    det.log_mag += total;
    return det;
}

struct Reduced {
    Complex alpha;
    ComplexMatrix h;
    ComplexMatrix q;
};

// Reflect b = w^T onto alpha e1 and reduce B = A^T to Hessenberg form with
// the reflected b as starting vector (Q e1 = e1).
Reduced reduce_at_covector(const ComplexMatrix& a, const ComplexRow& w) {
    const ComplexVector b = w.transpose();
    const double nb = b.norm();
    const Complex phase = std::abs(b(0)) > 0.0 ? b(0) / std::abs(b(0)) : Complex(1.0, 0.0);
    const Complex alpha = -phase * nb;
    ComplexVector u = b;
    u(0) -= alpha;
    const double beta = 2.0 / u.squaredNorm();

    ComplexMatrix bt = a.transpose();
    bt -= beta * u * (u.adjoint() * bt);
    bt -= beta * (bt * u) * u.adjoint();

    Eigen::HessenbergDecomposition<ComplexMatrix> hess(bt);
    return {alpha, hess.matrixH(), hess.matrixQ()};
}

// With b = w^T and B = A^T, det M = det [b, Bb, ..., B^{N-1} b].  Reflect b
// onto alpha e1, reduce to Hessenberg form H with Q e1 = e1; the Krylov
// matrix of (e1, H) is upper triangular with diagonal prod_{s<r} h_{s+1,s}.
LogComplex orthogonal_krylov_det(const ComplexMatrix& a, const ComplexRow& w) {
    const Eigen::Index n = a.rows();
    if (n == 1) return LogComplex::from(w(0));
    if (!(w.norm() > 0.0)) return LogComplex::zero();
    const Reduced r = reduce_at_covector(a, w);

    LogComplex det = LogComplex::from(r.alpha).pow(n);
    det *= LogComplex::from(Complex(-1.0, 0.0));  // the reflector
    det *= lu_logdet(r.q);
    for (Eigen::Index s = 0; s + 1 < n; ++s) {
        const LogComplex sub = LogComplex::from(r.h(s + 1, s));
        if (sub.is_zero) return LogComplex::zero();
        det *= sub.pow(n - 1 - s);
    }
    return det;
}

}  // namespace

LogComplex krylov_determinant(const ComplexMatrix& a, const ComplexRow& w, KrylovMethod method) {
    if (a.rows() != a.cols() || a.cols() != w.size())
        throw Error(ErrorKind::InvalidIndex, "operator and covector shapes disagree");
    return method == KrylovMethod::Explicit ? explicit_krylov_det(a, w) : orthogonal_krylov_det(a, w);
}

int krylov_dimension(const ComplexMatrix& a, const ComplexRow& w, double tol) {
    if (a.rows() != a.cols() || a.cols() != w.size())
        throw Error(ErrorKind::InvalidIndex, "operator and covector shapes disagree");
    const Eigen::Index n = a.rows();
    if (!(w.norm() > 0.0)) return 0;
    if (n == 1) return 1;
    const double cutoff = tol * singular_values(a).front();
    const Reduced r = reduce_at_covector(a, w);
    for (Eigen::Index s = 0; s + 1 < n; ++s)
        if (std::abs(r.h(s + 1, s)) <= cutoff) return static_cast<int>(s + 1);
    return static_cast<int>(n);
}

std::vector<SpectralData> spectra_of(const MatrixTuple& t) {
    std::vector<SpectralData> out;
    out.reserve(static_cast<std::size_t>(t.size()));
    for (const auto& m : t.matrices()) out.push_back(eigendecomposition(m));
    return out;
}

namespace {

const Partition& within_cap(const Partition& p, std::size_t cap) {
    if (p.dimension() > cap)
        throw Error(ErrorKind::TooLarge, "tensor dimension " + std::to_string(p.dimension()) + " exceeds size cap");
    return p;
}

}  // namespace

Evaluator::Evaluator(const Partition& p, EvalOptions options)
    : basis_(within_cap(p, options.size_cap)), w_(build_w_covector(basis_)), plan_(p), options_(options) {}

void Evaluator::check(const MatrixTuple& t) const {
    if (!(t.partition() == partition())) throw Error(ErrorKind::InvalidPartition, "tuple has a different partition");
}

SpectralFactors Evaluator::spectral_factors(std::span<const SpectralData> spectra) const {
    const Partition& p = partition();
    const int n = p.n();
    const std::size_t dim = basis_.size();
    for (const auto& s : spectra)
        if (!(s.min_gap > options_.gap_tol))
            throw Error(ErrorKind::NonDiagonalizable, "spectral route needs distinct eigenvalues");

    std::vector<Complex> mu(dim);
    ProductAccumulator pairings;
    ComplexMatrix stacked(n, n);
    for (std::size_t flat = 0; flat < dim; ++flat) {
        const auto d = basis_.digits(flat);
        Complex sum{0.0, 0.0};
        Eigen::Index col = 0;
        for (int i = 0; i < p.length(); ++i) {
            const auto& spec = spectra[static_cast<std::size_t>(i)];
            for (int j : basis_.factor_basis(i)[d[static_cast<std::size_t>(i)]]) {
                sum += spec.eigenvalues[j];
                stacked.col(col++) = spec.eigenvectors.col(j);
            }
        }
        mu[flat] = sum;
        pairings.multiply(lu_logdet(stacked));
    }

    ProductAccumulator vander;
    for (std::size_t j = 0; j < dim; ++j)
        for (std::size_t k = j + 1; k < dim; ++k) vander.multiply(mu[k] - mu[j]);

    LogComplex eig_det = LogComplex::one();
    for (int i = 0; i < p.length(); ++i) {
        const std::int64_t copies = binomial(n - 1, p.part(i) - 1) *
                                    static_cast<std::int64_t>(dim / static_cast<std::size_t>(binomial(n, p.part(i))));
        eig_det *= lu_logdet(spectra[static_cast<std::size_t>(i)].eigenvectors).pow(copies);
    }
    return {vander.result(), pairings.result(), eig_det, pairings.min_log_factor()};
}

LogComplex Evaluator::P(const MatrixTuple& t) const {
    check(t);
    if (options_.route == PRoute::Spectral) {
        const auto spectra = spectra_of(t);
        return P(t, spectra);
    }
    return P(t, {});
}

LogComplex Evaluator::P(const MatrixTuple& t, std::span<const SpectralData> spectra) const {
    check(t);
    if (options_.route == PRoute::Spectral) {
        const SpectralFactors f = spectral_factors(spectra);
        return f.vandermonde * f.pairings / f.eigenvector_det;
    }
    const ComplexMatrix a = kronecker_sum_operator(t, options_.size_cap);
    return krylov_determinant(a, w_, options_.krylov);
}

PhatValue Evaluator::Phat(const MatrixTuple& t) const {
    check(t);
    const auto spectra = spectra_of(t);
    PhatValue out;
    out.p = P(t, spectra);
    out.denominator = eval_denominator(plan_, spectra);
    out.indeterminate = out.denominator.vanished.has_value() || out.denominator.margin < kDenominatorFloor;
    if (out.denominator.value.is_zero) {
        out.value = LogComplex{std::numeric_limits<double>::quiet_NaN(), 0.0, false};
        out.indeterminate = true;
    } else {
        out.value = out.p / out.denominator.value;
    }
    return out;
}

LogComplex eval_P(const MatrixTuple& t, const EvalOptions& options) {
    return Evaluator(t.partition(), options).P(t);
}

PhatValue eval_Phat(const MatrixTuple& t, const EvalOptions& options) {
    return Evaluator(t.partition(), options).Phat(t);
}

std::int64_t hatP_degree(const Partition& p, int i) {
    if (i < 0 || i >= p.length()) throw Error(ErrorKind::InvalidIndex, "matrix index out of range");
    const int n = p.n();
    std::int64_t d = binomial(n, 2) * binomial(n - 2, p.part(i) - 1);
    for (int j = 0; j < p.length(); ++j)
        if (j != i) d *= binomial(n, p.part(j));
    return d;
}

std::int64_t hatP_total_degree(const Partition& p) {
    std::int64_t total = 0;
    for (int i = 0; i < p.length(); ++i) total += hatP_degree(p, i);
    return total;
}

HomogeneityResult homogeneity_check(const MatrixTuple& t, int i, double c, const EvalOptions& options) {
    const Evaluator ev(t.partition(), options);
    const auto degree = static_cast<double>(hatP_degree(t.partition(), i));
    HomogeneityResult r;
    r.tolerance = 1e-6 * degree;
    if (c == 1.0) return r;
    const PhatValue base = ev.Phat(t);
    const PhatValue scaled = ev.Phat(t.with_matrix(i, c * t.matrix(i)));
    if (base.indeterminate || scaled.indeterminate || base.value.is_zero || scaled.value.is_zero) {
        r.indeterminate = true;
        return r;
    }
    r.error = std::abs(scaled.value.log_mag - base.value.log_mag - degree * std::log(c));
    return r;
}

HomogeneityResult joint_homogeneity_check(const MatrixTuple& t, double c, const EvalOptions& options) {
    const Evaluator ev(t.partition(), options);
    const auto n = static_cast<double>(t.partition().dimension());
    const double degree = n * (n - 1.0) / 2.0;
    HomogeneityResult r;
    r.tolerance = 1e-6 * degree;
    if (c == 1.0) return r;
    std::vector<ComplexMatrix> scaled;
    for (const auto& m : t.matrices()) scaled.push_back(c * m);
    const LogComplex base = ev.P(t);
    const LogComplex moved = ev.P(MatrixTuple(t.partition(), std::move(scaled)));
    if (base.is_zero || moved.is_zero) {
        r.indeterminate = true;
        return r;
    }
    r.error = std::abs(moved.log_mag - base.log_mag - degree * std::log(c));
    return r;
}

double log_distance_estimate(const Evaluator& ev, const MatrixTuple& t, const PhatValue& at_t, double step) {
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    if (at_t.value.is_zero) return neg_inf;
    double grad_sq = 0.0;
    for (int i = 0; i < t.size(); ++i) {
        const ComplexMatrix& a = t.matrix(i);
        ComplexMatrix g(a.rows(), a.cols());
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
            for (Eigen::Index c = 0; c < a.cols(); ++c) {
                ComplexMatrix plus = a, minus = a;
                plus(r, c) += step;
                minus(r, c) -= step;
                const Complex rp = (ev.Phat(t.with_matrix(i, std::move(plus))).value / at_t.value).value();
                const Complex rm = (ev.Phat(t.with_matrix(i, std::move(minus))).value / at_t.value).value();
                g(r, c) = (rp - rm) / (2.0 * step);
            }
        }
        if (!g.allFinite()) return neg_inf;
        // Drop the radial (Euler) component: scaling A_i only rescales Phat.
        const double norm_sq = a.squaredNorm();
        const Complex euler = (g.array() * a.array()).sum();
        const ComplexMatrix tangential = g - (euler / norm_sq) * a.conjugate();
        grad_sq += tangential.squaredNorm();
    }
    if (!(grad_sq > 0.0)) return std::numeric_limits<double>::infinity();
    if (!std::isfinite(grad_sq)) return neg_inf;
    return -0.5 * std::log(grad_sq);
}

namespace {

EvalOptions eval_options(const CertifyConfig& cfg) {
    EvalOptions o;
    o.route = cfg.route;
    o.krylov = cfg.krylov;
    o.size_cap = cfg.size_cap;
    o.gap_tol = cfg.gap_tol;
    return o;
}

using CalibrationKey = std::tuple<int, std::vector<int>, std::uint64_t, int, int, int, double, double>;

}  // namespace

double calibration_scale(const Partition& p, const CertifyConfig& cfg) {
    static std::mutex mutex;
    static std::map<CalibrationKey, double> memo;
    const CalibrationKey key{p.n(), p.parts(), cfg.seed.value, cfg.calibration_samples,
                             static_cast<int>(cfg.route), static_cast<int>(cfg.krylov), cfg.fd_step, cfg.gap_tol};
    {
        std::lock_guard lock(mutex);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
    }
    const Evaluator ev(p, eval_options(cfg));
    double sum = 0.0;
    int used = 0;
    for (int j = 0; j < cfg.calibration_samples; ++j) {
        const MatrixTuple t = random_tuple(p, derive_seed(cfg.seed, static_cast<std::uint64_t>(j)));
        try {
            const PhatValue v = ev.Phat(t);
            if (v.indeterminate) continue;
            const double d = log_distance_estimate(ev, t, v, cfg.fd_step);
            if (!std::isfinite(d)) continue;
            sum += d;
            ++used;
        } catch (const Error&) {
            continue;
        }
    }
    if (used == 0) throw Error(ErrorKind::NumericalFailure, "no usable calibration sample");
    const double scale = sum / used;
    std::lock_guard lock(mutex);
    memo.emplace(key, scale);
    return scale;
}

Verdict certify_membership(const MatrixTuple& t, const CertifyConfig& cfg) {
    Verdict v;
    const Partition& p = t.partition();
    if (hatP_total_degree(p) == 0) {
        v.status = VerdictStatus::Generic;
        v.residual = std::numeric_limits<double>::infinity();
        v.scale = std::numeric_limits<double>::infinity();
        v.denom_margin = std::numeric_limits<double>::infinity();
        v.notes.push_back("a single part fills the space: the variety is empty");
        return v;
    }
    try {
        const MatrixTuple u = t.normalized();
        const auto spectra = spectra_of(u);
        double min_gap = std::numeric_limits<double>::infinity();
        for (const auto& s : spectra) {
            v.eigen_gaps.push_back(s.min_gap);
            min_gap = std::min(min_gap, s.min_gap);
        }
        if (!(min_gap >= cfg.gap_tol)) {
            v.notes.push_back("repeated eigenvalue (gap below gap_tol): the converse direction does not apply");
            return v;
        }
        const Evaluator ev(p, eval_options(cfg));
        const PhatValue phat = ev.Phat(u);
        v.denom_margin = phat.denominator.margin;
        v.log_abs_phat = phat.value.is_zero ? -std::numeric_limits<double>::infinity() : phat.value.log_mag;
        if (phat.indeterminate) {
            std::string note = "charged D-factor nearly vanishes";
            if (phat.denominator.vanished) note += " (sub-partition " + phat.denominator.vanished->to_string() + ")";
            v.notes.push_back(note + "; retry with a small random perturbation");
            return v;
        }
        v.residual = log_distance_estimate(ev, u, phat, cfg.fd_step);
        v.scale = calibration_scale(p, cfg);
        if (v.residual < v.scale - cfg.drop) {
            v.status = VerdictStatus::OnVariety;
        } else if (v.residual > v.scale - cfg.margin) {
            v.status = VerdictStatus::Generic;
        } else {
            v.notes.push_back("residual between the drop and margin thresholds");
        }
    } catch (const Error& e) {
        v.status = VerdictStatus::Indeterminate;
        v.notes.push_back(std::string(to_string(e.kind())) + ": " + e.what());
    }
    return v;
}

}  // namespace tuplevar
