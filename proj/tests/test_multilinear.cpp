#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <unsupported/Eigen/MatrixFunctions>

#include "helpers.hpp"
#include "tuplevar/error.hpp"
#include "tuplevar/generators.hpp"
#include "tuplevar/multilinear.hpp"

using namespace tuplevar;
using testing::diag;

// Subsets are 0-based in code: {1,2} in the usual 1-based notation is {0,1} here.

namespace {

std::vector<Partition> all_compositions(int max_n) {
    std::vector<Partition> out;
    for (int n = 1; n <= max_n; ++n) {
        std::vector<int> cur;
        std::function<void(int)> rec = [&](int left) {
            if (left == 0) {
                out.emplace_back(n, cur);
                return;
            }
            for (int k = 1; k <= left; ++k) {
                cur.push_back(k);
                rec(left - k);
                cur.pop_back();
            }
        };
        rec(n);
    }
    return out;
}

std::int64_t factorial(int n) { return n <= 1 ? 1 : n * factorial(n - 1); }

}  // namespace

TEST_CASE("binomial and permutation sign") {
    CHECK(binomial(4, 2) == 6);
    CHECK(binomial(0, 0) == 1);
    CHECK(binomial(2, 3) == 0);
    CHECK(binomial(3, -1) == 0);
    CHECK(binomial(-1, 0) == 0);
    const std::vector<int> id{0, 1, 2}, swap{1, 0, 2}, cyc{1, 2, 0};
    CHECK(permutation_sign(id) == 1);
    CHECK(permutation_sign(swap) == -1);
    CHECK(permutation_sign(cyc) == 1);
}

TEST_CASE("Partition validation") {
    CHECK_NOTHROW(Partition(3, {1, 2}));
    CHECK(Partition(3, {1, 2}).dimension() == 9);
    CHECK(Partition(4, {2, 2}).dimension() == 36);
    CHECK(Partition(3, {1, 2}).to_string() == "n=3,k=(1,2)");
    try {
        Partition(3, {1, 1});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidPartition);
        CHECK(std::string(e.what()) == "partition must sum to n");
    }
    CHECK_THROWS_AS(Partition(2, {0, 2}), Error);
    CHECK_THROWS_AS(Partition(2, {}), Error);
}

TEST_CASE("enumerate_wedge_basis examples") {
    CHECK(enumerate_wedge_basis(3, 2) == std::vector<Subset>{{0, 1}, {0, 2}, {1, 2}});
    CHECK(enumerate_wedge_basis(3, 3) == std::vector<Subset>{{0, 1, 2}});
    CHECK(enumerate_wedge_basis(4, 1) == std::vector<Subset>{{0}, {1}, {2}, {3}});
    CHECK_THROWS_AS(enumerate_wedge_basis(3, 0), Error);
    CHECK_THROWS_AS(enumerate_wedge_basis(3, 4), Error);
    for (int n = 1; n <= 6; ++n)
        for (int k = 1; k <= n; ++k) {
            const auto b = enumerate_wedge_basis(n, k);
            CHECK(static_cast<std::int64_t>(b.size()) == binomial(n, k));
            CHECK(std::is_sorted(b.begin(), b.end()));
            for (std::size_t r = 0; r < b.size(); ++r) CHECK(subset_rank(n, b[r]) == r);
        }
}

TEST_CASE("flat_index examples") {
    const TensorBasis b2(Partition(2, {1, 1}));
    CHECK(b2.flat_index({{0}, {0}}) == 0);
    CHECK(b2.flat_index({{0}, {1}}) == 1);
    CHECK(b2.flat_index({{1}, {0}}) == 2);
    const TensorBasis b3(Partition(3, {1, 2}));
    CHECK(b3.flat_index({{1}, {0, 2}}) == 4);
    CHECK_THROWS_AS(b3.flat_index({{1}, {2, 0}}), Error);
    CHECK_THROWS_AS(b3.flat_index({{1}, {0}}), Error);
    CHECK_THROWS_AS(b3.flat_index({{3}, {0, 1}}), Error);
    CHECK_THROWS_AS(b3.unflat_index(9), Error);
}

TEST_CASE("unflat(flat) is the identity for every partition with n <= 5") {
    for (const auto& p : all_compositions(5)) {
        const TensorBasis b(p);
        REQUIRE(b.size() == p.dimension());
        for (std::size_t f = 0; f < b.size(); ++f) {
            const auto s = b.unflat_index(f);
            if (b.flat_index(s) != f) FAIL_CHECK("round trip failed for " << p.to_string() << " at " << f);
        }
    }
}

TEST_CASE("wedge_derivation examples") {
    CHECK(wedge_derivation(ComplexMatrix::Identity(3, 3), 2).isApprox(2.0 * ComplexMatrix::Identity(3, 3)));
    CHECK(wedge_derivation(diag({2, 3, 7}), 2).isApprox(diag({5, 9, 10})));
    ComplexGaussian rng(Seed{21});
    const ComplexMatrix a = rng.matrix(4, 4);
    CHECK(wedge_derivation(a, 1) == a);
    CHECK(wedge_derivation(a, 4).isApprox(a.trace() * ComplexMatrix::Identity(1, 1)));
}

TEST_CASE("wedge_derivation generates the compound of the exponential") {
    // C_k(exp(A)) = exp(D_k(A)) ties the derivation to the compound matrix.
    ComplexGaussian rng(Seed{22});
    for (int n = 2; n <= 5; ++n) {
        const ComplexMatrix a = 0.5 * rng.matrix(n, n);
        const ComplexMatrix ea = a.exp();
        for (int k = 1; k <= n; ++k) {
            const ComplexMatrix lhs = compound_matrix(ea, k);
            const ComplexMatrix rhs = wedge_derivation(a, k).exp();
            CHECK((lhs - rhs).norm() < 1e-12 * lhs.norm());
        }
    }
}

TEST_CASE("compound matrix: Sylvester-Franke determinant") {
    ComplexGaussian rng(Seed{23});
    for (int n = 2; n <= 5; ++n) {
        const ComplexMatrix a = rng.matrix(n, n);
        const LogComplex det = lu_logdet(a);
        for (int k = 1; k <= n; ++k) {
            const LogComplex c = lu_logdet(compound_matrix(a, k));
            const LogComplex want = det.pow(binomial(n - 1, k - 1));
            CHECK(c.log_mag == doctest::Approx(want.log_mag).epsilon(1e-10));
            CHECK(std::abs(wrap_phase(c.phase - want.phase)) < 1e-9);
        }
    }
}

TEST_CASE("wedge_derivation spectrum is the k-fold sums") {
    ComplexGaussian rng(Seed{24});
    for (int n = 2; n <= 5; ++n) {
        const ComplexMatrix a = rng.matrix(n, n);
        const SpectralData s = eigendecomposition(a);
        for (int k = 1; k <= n; ++k) {
            std::vector<Complex> want;
            for (const auto& sub : enumerate_wedge_basis(n, k)) {
                Complex z{0, 0};
                for (int j : sub) z += s.eigenvalues[j];
                want.push_back(z);
            }
            const SpectralData d = eigendecomposition(wedge_derivation(a, k));
            auto key = [](Complex x, Complex y) { return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag()); };
            std::sort(want.begin(), want.end(), key);
            for (std::size_t j = 0; j < want.size(); ++j)
                CHECK(std::abs(d.eigenvalues[static_cast<Eigen::Index>(j)] - want[j]) < 1e-8 * a.norm());
        }
    }
}

TEST_CASE("kronecker_sum_operator examples") {
    ComplexGaussian rng(Seed{25});
    const ComplexMatrix a1 = rng.matrix(2, 2), a2 = rng.matrix(2, 2);
    const MatrixTuple t(Partition(2, {1, 1}), {a1, a2});
    const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
    ComplexMatrix want(4, 4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            want(r, c) = a1(r / 2, c / 2) * i2(r % 2, c % 2) + i2(r / 2, c / 2) * a2(r % 2, c % 2);
    CHECK(kronecker_sum_operator(t).isApprox(want));

    const MatrixTuple d(Partition(2, {1, 1}), {diag({1, 2}), diag({10, 20})});
    CHECK(kronecker_sum_operator(d).isApprox(diag({11, 21, 12, 22})));

    for (const auto& p : all_compositions(4)) {
        std::vector<ComplexMatrix> ids(static_cast<std::size_t>(p.length()), ComplexMatrix::Identity(p.n(), p.n()));
        const auto n = static_cast<Eigen::Index>(p.dimension());
        CHECK(kronecker_sum_operator(MatrixTuple(p, ids)).isApprox(p.n() * ComplexMatrix::Identity(n, n)));
    }
    const MatrixTuple tb = random_tuple(Partition(4, {1, 1, 1, 1}), Seed{1});
    CHECK_THROWS_AS(kronecker_sum_operator(tb, 255), Error);
    CHECK_NOTHROW(kronecker_sum_operator(tb, 256));
}

TEST_CASE("build_w_covector examples and support size") {
    const TensorBasis b2(Partition(2, {1, 1}));
    const ComplexRow w2 = build_w_covector(b2);
    CHECK(w2[b2.flat_index({{0}, {1}})] == Complex(1, 0));
    CHECK(w2[b2.flat_index({{1}, {0}})] == Complex(-1, 0));
    CHECK(w2[b2.flat_index({{0}, {0}})] == Complex(0, 0));
    const TensorBasis b3(Partition(3, {1, 2}));
    const ComplexRow w3 = build_w_covector(b3);
    CHECK(w3[b3.flat_index({{1}, {0, 2}})] == Complex(-1, 0));
    CHECK(w3[b3.flat_index({{0}, {0, 1}})] == Complex(0, 0));

    for (const auto& p : all_compositions(5)) {
        const ComplexRow w = build_w_covector(TensorBasis(p));
        std::int64_t nonzero = 0;
        for (Eigen::Index j = 0; j < w.size(); ++j) {
            const Complex z = w[j];
            CHECK((z == Complex(0, 0) || z == Complex(1, 0) || z == Complex(-1, 0)));
            nonzero += z != Complex(0, 0);
        }
        std::int64_t want = factorial(p.n());
        for (int k : p.parts()) want /= factorial(k);
        CHECK(nonzero == want);
    }
}

TEST_CASE("pairing with decomposable tensors") {
    for (const auto& p : all_compositions(4)) {
        const TensorBasis basis(p);
        const ComplexRow w = build_w_covector(basis);
        // Standard basis vectors in natural order.
        std::vector<ComplexMatrix> groups;
        int next = 0;
        for (int i = 0; i < p.length(); ++i) {
            groups.push_back(ComplexMatrix::Identity(p.n(), p.n()).middleCols(next, p.part(i)));
            next += p.part(i);
        }
        CHECK(std::abs(pair_with_decomposable(basis, w, groups) - Complex(1, 0)) < 1e-15);

        if (p.length() >= 2) {
            ComplexGaussian rng(Seed{26});
            auto dup = groups;
            for (auto& g : dup) g = rng.matrix(p.n(), g.cols());
            dup[1].col(0) = dup[0].col(0);
            CHECK(std::abs(pair_with_decomposable(basis, w, dup)) < 1e-14);
        }

        ComplexGaussian rng(Seed{27});
        for (int rep = 0; rep < 100; ++rep) {
            ComplexMatrix all(p.n(), p.n());
            int col = 0;
            for (auto& g : groups) {
                g = rng.matrix(p.n(), g.cols());
                all.middleCols(col, g.cols()) = g;
                col += static_cast<int>(g.cols());
            }
            const Complex want = all.determinant();
            CHECK(std::abs(pair_with_decomposable(basis, w, groups) - want) <= 1e-12 * std::abs(want));
        }
    }
}

TEST_CASE("MatrixTuple validation and normalization") {
    const Partition p(2, {1, 1});
    CHECK_THROWS_AS(MatrixTuple(p, {diag({1, 2})}), Error);
    CHECK_THROWS_AS(MatrixTuple(p, {diag({1, 2}), diag({1, 2, 3})}), Error);
    ComplexMatrix bad = diag({1, 2});
    bad(0, 1) = std::nan("");
    CHECK_THROWS_AS(MatrixTuple(p, {diag({1, 2}), bad}), Error);
    const MatrixTuple t(p, {diag({3, 4}), ComplexMatrix::Zero(2, 2)});
    const MatrixTuple u = t.normalized();
    CHECK(u.matrix(0).norm() == doctest::Approx(1.0));
    CHECK(u.matrix(1).norm() == 0.0);
    CHECK(t.with_matrix(1, diag({5, 6})).matrix(1) == diag({5, 6}));
}
