#include "tuplevar/generators.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "tuplevar/error.hpp"

namespace tuplevar {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr int kMaxAttempts = 32;

}  // namespace

Seed derive_seed(Seed base, std::uint64_t stream) {
    return {splitmix64(base.value ^ splitmix64(stream + 0x632BE59BD9B4E019ULL))};
}

Complex ComplexGaussian::draw() {
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

ComplexMatrix ComplexGaussian::matrix(Eigen::Index rows, Eigen::Index cols) {
    ComplexMatrix m(rows, cols);
    // Row-major fill so the draw order does not depend on Eigen's storage.
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = draw();
    return m;
}

double ComplexGaussian::uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

ComplexMatrix random_unitary(ComplexGaussian& rng, Eigen::Index n) {
    const ComplexMatrix g = rng.matrix(n, n);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < n; ++j) {
        const double mag = std::abs(r(j, j));
        if (mag > 0.0) q.col(j) *= r(j, j) / mag;
    }
    return q;
}

MatrixTuple random_tuple(const Partition& p, Seed seed) {
    ComplexGaussian rng(seed);
    std::vector<ComplexMatrix> ms;
    for (int i = 0; i < p.length(); ++i) {
        ComplexMatrix m = rng.matrix(p.n(), p.n());
        m /= m.norm();
        ms.push_back(std::move(m));
    }
    return {p, std::move(ms)};
}

namespace {

double condition_number(const ComplexMatrix& m) {
    const auto s = singular_values(m);
    const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
    return *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
}

Subset nearest_indices(const ComplexVector& eigenvalues, const std::vector<Complex>& targets) {
    Subset out;
    for (const Complex& t : targets) {
        Eigen::Index best = 0;
        (eigenvalues.array() - t).abs().minCoeff(&best);
        out.push_back(static_cast<int>(best));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

PlantedTuple on_variety_tuple(const Partition& p, Seed seed, double gap_tol) {
    if (p.length() < 2)
        throw Error(ErrorKind::GenerationFailure, "a single-part partition has an empty variety");
    const int n = p.n();
    const double min_gap = std::max(gap_tol, 1e-3);
    ComplexGaussian rng(seed);

    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        const ComplexMatrix hyperplane = rng.matrix(n, n - 1);
        const ComplexMatrix vectors = hyperplane * rng.matrix(n - 1, n);

        std::vector<ComplexMatrix> ms;
        std::vector<SpectralData> spectra;
        std::vector<Subset> choice;
        bool ok = true;
        int offset = 0;
        for (int i = 0; i < p.length() && ok; ++i) {
            const int k = p.part(i);
            ComplexMatrix basis(n, n);
            basis.leftCols(k) = vectors.middleCols(offset, k);
            basis.rightCols(n - k) = rng.matrix(n, n - k);
            offset += k;
            // Upper triangular in this basis keeps the first k columns invariant.
            ComplexMatrix tri = rng.matrix(n, n).triangularView<Eigen::Upper>();
            if (condition_number(basis) > 1e3) {
                ok = false;
                break;
            }
            ComplexMatrix a = basis * tri * basis.inverse();
            const double scale = a.norm();
            a /= scale;
            SpectralData spec = eigendecomposition(a);
            if (!(spec.min_gap > min_gap)) {
                ok = false;
                break;
            }
            std::vector<Complex> planted;
            for (int j = 0; j < k; ++j) planted.push_back(tri(j, j) / scale);
            choice.push_back(nearest_indices(spec.eigenvalues, planted));
            ms.push_back(std::move(a));
            spectra.push_back(std::move(spec));
        }
        if (!ok) continue;

        Witness w;
        w.choice = choice;
        w.basis = stack_choice(spectra, choice);
        w.sigma_min = smallest_singular_value(w.basis);
        return {MatrixTuple(p, std::move(ms)), std::move(w)};
    }
    throw Error(ErrorKind::GenerationFailure, "on-variety generation exhausted its retries");
}

std::vector<std::int64_t> collision_value_set(int a, int b) {
    if (a < 1 || 2 * a > b || b > 62)
        throw Error(ErrorKind::GenerationFailure, "collision set needs 1 <= a and 2a <= b <= 62");
    std::vector<std::int64_t> out;
    for (int e = 1; e <= b; ++e) {
        if (e == 2 * a) {
            out.push_back(-((std::int64_t{1} << (2 * a)) - 2));
        } else {
            const std::int64_t mag = std::int64_t{1} << e;
            out.push_back(e % 2 == 0 ? mag : -mag);
        }
    }
    return out;
}

EqualSumSearch find_equal_sum_pairs(const std::vector<std::int64_t>& values) {
    EqualSumSearch out;
    const int b = static_cast<int>(values.size());
    std::vector<signed char> label(static_cast<std::size_t>(b), 0);
    std::int64_t ordered = 0;
    std::function<void(int, std::int64_t, bool, bool)> rec = [&](int pos, std::int64_t diff, bool has_left,
                                                                 bool has_right) {
        if (pos == b) {
            if (diff == 0 && has_left && has_right) {
                ++ordered;
                if (out.left.empty()) {
                    for (int j = 0; j < b; ++j) {
                        if (label[static_cast<std::size_t>(j)] == 1) out.left.push_back(j);
                        if (label[static_cast<std::size_t>(j)] == 2) out.right.push_back(j);
                    }
                }
            }
            return;
        }
        const std::int64_t v = values[static_cast<std::size_t>(pos)];
        label[static_cast<std::size_t>(pos)] = 0;
        rec(pos + 1, diff, has_left, has_right);
        label[static_cast<std::size_t>(pos)] = 1;
        rec(pos + 1, diff + v, true, has_right);
        label[static_cast<std::size_t>(pos)] = 2;
        rec(pos + 1, diff - v, has_left, true);
        label[static_cast<std::size_t>(pos)] = 0;
    };
    rec(0, 0, false, false);
    out.pair_count = ordered / 2;
    return out;
}

MatrixTuple single_collision_tuple(const Partition& p, const SubPartition& s, Seed seed,
                                   CollisionOptions options) {
    check_sub_partition(p, s);
    const int n = p.n();
    const int a = s.weight();
    if (a < 2) throw Error(ErrorKind::GenerationFailure, "collision tuples need sub-partition weight >= 2");
    for (int i = 0; i < p.length(); ++i)
        if (2 * s.kprime[static_cast<std::size_t>(i)] > n)
            throw Error(ErrorKind::GenerationFailure, "2 k'_i > n leaves no room for a disjoint pair");

    const auto values = collision_value_set(a, n * p.length());
    const EqualSumSearch found = find_equal_sum_pairs(values);
    if (found.pair_count != 1 || static_cast<int>(found.left.size()) != a ||
        static_cast<int>(found.right.size()) != a)
        throw Error(ErrorKind::GenerationFailure, "equal-sum pair is not unique or has the wrong sizes");

    std::vector<char> used(values.size(), 0);
    for (int j : found.left) used[static_cast<std::size_t>(j)] = 1;
    for (int j : found.right) used[static_cast<std::size_t>(j)] = 1;
    std::vector<int> spare;
    for (std::size_t j = 0; j < values.size(); ++j)
        if (!used[j]) spare.push_back(static_cast<int>(j));

    ComplexGaussian rng(seed);
    std::vector<ComplexMatrix> ms;
    std::size_t li = 0, ri = 0, si = 0;
    for (int i = 0; i < p.length(); ++i) {
        const int kp = s.kprime[static_cast<std::size_t>(i)];
        std::vector<int> picks;
        for (int c = 0; c < kp; ++c) picks.push_back(found.left[li++]);
        for (int c = 0; c < kp; ++c) picks.push_back(found.right[ri++]);
        for (int c = 0; c < n - 2 * kp; ++c) picks.push_back(spare[si++]);

        ComplexVector diag(n);
        for (int c = 0; c < n; ++c) diag[c] = static_cast<double>(values[static_cast<std::size_t>(picks[static_cast<std::size_t>(c)])]);
        if (!options.conjugate) {
            ms.push_back(diag.asDiagonal());
            continue;
        }
        // S = U diag(d) V^H with d in [1, 10]; S^{-1} is formed from the factors.
        const ComplexMatrix u = random_unitary(rng, n);
        const ComplexMatrix v = random_unitary(rng, n);
        Eigen::VectorXd d(n);
        for (int c = 0; c < n; ++c) d[c] = rng.uniform(1.0, 10.0);
        const ComplexMatrix sim = u * d.cast<Complex>().asDiagonal() * v.adjoint();
        const ComplexMatrix inv = v * d.cwiseInverse().cast<Complex>().asDiagonal() * u.adjoint();
        ms.push_back(sim * diag.asDiagonal() * inv);
    }
    return {p, std::move(ms)};
}

MatrixTuple perturb(const MatrixTuple& t, double eps, Seed seed) {
    ComplexGaussian rng(seed);
    std::vector<ComplexMatrix> ms;
    for (const auto& m : t.matrices()) {
        ComplexMatrix g = rng.matrix(m.rows(), m.cols());
        ms.push_back(m + eps * g / g.norm());
    }
    return {t.partition(), std::move(ms)};
}

}  // namespace tuplevar
