#include <doctest.h>

#include <algorithm>

#include "tuplevar/certifier.hpp"
#include "tuplevar/error.hpp"
#include "tuplevar/generators.hpp"
#include "tuplevar/oracle.hpp"

using namespace tuplevar;

namespace {

bool identical(const MatrixTuple& a, const MatrixTuple& b) {
    if (a.size() != b.size()) return false;
    for (int i = 0; i < a.size(); ++i)
        if (a.matrix(i) != b.matrix(i)) return false;
    return true;
}

}  // namespace

TEST_CASE("seed derivation") {
    CHECK(derive_seed(Seed{1}, 0).value == derive_seed(Seed{1}, 0).value);
    CHECK(derive_seed(Seed{1}, 0).value != derive_seed(Seed{1}, 1).value);
    CHECK(derive_seed(Seed{1}, 0).value != derive_seed(Seed{2}, 0).value);
}

TEST_CASE("random_tuple is deterministic and unit-norm") {
    const Partition p(3, {1, 1, 1});
    CHECK(identical(random_tuple(p, Seed{7}), random_tuple(p, Seed{7})));
    CHECK_FALSE(identical(random_tuple(p, Seed{7}), random_tuple(p, Seed{8})));
    const MatrixTuple t = random_tuple(p, Seed{7});
    for (const auto& m : t.matrices()) CHECK(std::abs(m.norm() - 1.0) < 1e-12);
}

TEST_CASE("random_unitary is unitary") {
    ComplexGaussian rng(Seed{3});
    const ComplexMatrix q = random_unitary(rng, 5);
    CHECK((q.adjoint() * q - ComplexMatrix::Identity(5, 5)).norm() < 1e-13);
}

TEST_CASE("on_variety_tuple") {
    const Partition k11(2, {1, 1});
    const PlantedTuple a = on_variety_tuple(k11, Seed{1});
    const PlantedTuple b = on_variety_tuple(k11, Seed{1});
    CHECK(identical(a.tuple, b.tuple));
    CHECK(a.planted.choice == b.planted.choice);

    // n = 2: the hyperplane is a line, so the planted eigenvectors coincide.
    const auto spectra = spectra_of(a.tuple);
    const ComplexMatrix stacked = stack_choice(spectra, a.planted.choice);
    CHECK(std::abs(stacked.col(0).dot(stacked.col(1))) == doctest::Approx(1.0));

    for (const auto& p : {k11, Partition(3, {1, 2}), Partition(3, {2, 1}), Partition(3, {1, 1, 1}), Partition(4, {2, 2}),
                          Partition(4, {1, 1, 2}), Partition(4, {1, 3})}) {
        for (std::uint64_t s = 0; s < 10; ++s) {
            const PlantedTuple t = on_variety_tuple(p, Seed{s});
            for (const auto& m : t.tuple.matrices()) CHECK(std::abs(m.norm() - 1.0) < 1e-12);
            for (const auto& sd : spectra_of(t.tuple)) CHECK(sd.min_gap > 1e-3);
            const OracleResult o = oracle_detect(t.tuple, 1e-8);
            CHECK(o.min_sigma < 1e-8);
            CHECK(smallest_singular_value(stack_choice(spectra_of(t.tuple), t.planted.choice)) < 1e-8);
        }
    }
    CHECK_THROWS_AS(on_variety_tuple(Partition(3, {3}), Seed{1}), Error);
}

TEST_CASE("collision value sets") {
    CHECK(collision_value_set(2, 4) == std::vector<std::int64_t>{-2, 4, -8, -14});
    const EqualSumSearch s = find_equal_sum_pairs(collision_value_set(2, 4));
    CHECK(s.pair_count == 1);
    std::vector<std::int64_t> l, r;
    const auto v = collision_value_set(2, 4);
    for (int j : s.left) l.push_back(v[static_cast<std::size_t>(j)]);
    for (int j : s.right) r.push_back(v[static_cast<std::size_t>(j)]);
    std::sort(l.begin(), l.end());
    std::sort(r.begin(), r.end());
    const bool as_expected = (l == std::vector<std::int64_t>{-8, -2} && r == std::vector<std::int64_t>{-14, 4}) ||
                             (r == std::vector<std::int64_t>{-8, -2} && l == std::vector<std::int64_t>{-14, 4});
    CHECK(as_expected);

    // Powers of -2 alone never collide.
    CHECK(find_equal_sum_pairs({-2, 4, -8, 16, -32}).pair_count == 0);
    CHECK(find_equal_sum_pairs({1, 2, 3}).pair_count == 1);
}

TEST_CASE("single_collision_tuple") {
    const Partition k11(2, {1, 1});
    const MatrixTuple d = single_collision_tuple(k11, SubPartition{{1, 1}}, Seed{1}, CollisionOptions{false});
    auto sorted_diag = [](const ComplexMatrix& m) {
        std::vector<double> x{m(0, 0).real(), m(1, 1).real()};
        std::sort(x.begin(), x.end());
        return x;
    };
    const auto d0 = sorted_diag(d.matrix(0)), d1 = sorted_diag(d.matrix(1));
    const bool split = (d0 == std::vector<double>{-2, 4} && d1 == std::vector<double>{-14, -8}) ||
                       (d0 == std::vector<double>{-14, -8} && d1 == std::vector<double>{-2, 4}) ||
                       (d0 == std::vector<double>{-8, -2} && d1 == std::vector<double>{-14, 4}) ||
                       (d0 == std::vector<double>{-14, 4} && d1 == std::vector<double>{-8, -2});
    CHECK(split);

    CHECK(identical(single_collision_tuple(k11, SubPartition{{1, 1}}, Seed{9}),
                    single_collision_tuple(k11, SubPartition{{1, 1}}, Seed{9})));

    for (const auto& p : {k11, Partition(3, {1, 2}), Partition(3, {1, 1, 1}), Partition(4, {2, 2}), Partition(4, {1, 1, 2})}) {
        const Evaluator ev(p);
        for (const auto& s : enumerate_sub_partitions(p)) {
            if (s.weight() < 2 || fg_pair_count(p, s) == 0) continue;
            for (bool conj : {false, true}) {
                const MatrixTuple t = single_collision_tuple(p, s, Seed{17}, CollisionOptions{conj});
                const auto spectra = spectra_of(t);
                const double log_scale = std::log(eigenvalue_scale(spectra));
                for (const auto& other : enumerate_sub_partitions(p)) {
                    if (other.weight() < 2 || fg_pair_count(p, other) == 0) continue;
                    const DValue dv = eval_D(spectra, p, other);
                    const bool vanishes = dv.value.is_zero || dv.min_log_factor - log_scale < std::log(1e-10);
                    CHECK_MESSAGE(vanishes == (other == s), p.to_string() << " " << s.to_string() << " vs " << other.to_string());
                }
                const std::int64_t e = exponent(p, s);
                if (e > 0 && p.dimension() <= 36) {
                    const int dim = krylov_dimension(kronecker_sum_operator(t), ev.covector(), 1e-8);
                    CHECK(dim <= static_cast<int>(p.dimension() - static_cast<std::size_t>(e)));
                }
            }
        }
    }
    CHECK_THROWS_AS(single_collision_tuple(k11, SubPartition{{1, 0}}, Seed{1}), Error);
    CHECK_THROWS_AS(single_collision_tuple(Partition(3, {2, 1}), SubPartition{{2, 0}}, Seed{1}), Error);
}

TEST_CASE("single collision kernel bound on the explicit Krylov matrix") {
    const Partition k11(2, {1, 1});
    const MatrixTuple t = single_collision_tuple(k11, SubPartition{{1, 1}}, Seed{2});
    const Evaluator ev(k11);
    const KrylovMatrix m = build_krylov_matrix(kronecker_sum_operator(t), ev.covector());
    CHECK(numerical_rank(m.rows, 1e-8) <= 3);
    CHECK(eval_P(MatrixTuple(k11, {t.matrix(0), t.matrix(1)})).log_mag < -20);
}

TEST_CASE("perturb") {
    const Partition p(3, {1, 2});
    const MatrixTuple t = random_tuple(p, Seed{1});
    const MatrixTuple u = perturb(t, 1e-3, Seed{2});
    for (int i = 0; i < 2; ++i) CHECK((u.matrix(i) - t.matrix(i)).norm() == doctest::Approx(1e-3));
    CHECK(identical(u, perturb(t, 1e-3, Seed{2})));
}
