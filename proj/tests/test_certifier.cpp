#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "tuplevar/certifier.hpp"
#include "tuplevar/error.hpp"
#include "tuplevar/generators.hpp"
#include "tuplevar/oracle.hpp"

using namespace tuplevar;
using testing::diag;
using testing::real_matrix;

// Reference values below were computed in exact rational arithmetic (P) and
// 60-digit arithmetic (eigenvalue factors) by tests/oracle/derive_values.py,
// which builds the operator from compound matrices and shares no code with
// the library.

namespace {

const Partition k11(2, {1, 1});
const Partition k12(3, {1, 2});
const Partition k111(3, {1, 1, 1});

MatrixTuple int_pair() { return MatrixTuple(k11, {real_matrix({{1, 2}, {3, 4}}), real_matrix({{0, 1}, {-2, 3}})}); }

MatrixTuple int_k12() {
    return MatrixTuple(k12, {real_matrix({{2, 1, 0}, {1, 0, 1}, {0, 3, 1}}), real_matrix({{1, 0, 2}, {0, 2, 1}, {1, -1, 0}})});
}

MatrixTuple int_k12_degenerate() {
    return MatrixTuple(k12, {real_matrix({{1, 2, 0}, {0, -1, 3}, {1, 1, 2}}), real_matrix({{2, 0, 1}, {1, 3, -1}, {0, 1, 1}})});
}

MatrixTuple int_k111() {
    return MatrixTuple(k111, {real_matrix({{1, 2, 0}, {0, -1, 3}, {1, 1, 2}}), real_matrix({{2, 0, 1}, {1, 3, -1}, {0, 1, 1}}),
                              real_matrix({{0, 1, 1}, {2, 0, -1}, {1, -2, 1}})});
}

EvalOptions route(PRoute r, KrylovMethod m = KrylovMethod::Orthogonal) {
    EvalOptions o;
    o.route = r;
    o.krylov = m;
    return o;
}

void check_value(const LogComplex& got, double log_mag, double phase, double tol) {
    REQUIRE_FALSE(got.is_zero);
    CHECK(std::abs(got.log_mag - log_mag) < tol * std::max(1.0, std::abs(log_mag)));
    CHECK(std::abs(wrap_phase(got.phase - phase)) < tol * std::max(1.0, std::abs(log_mag)));
}

}  // namespace

TEST_CASE("build_krylov_matrix examples") {
    const Evaluator ev(k11);
    const ComplexRow& w = ev.covector();
    const KrylovMatrix id = build_krylov_matrix(ComplexMatrix::Identity(4, 4), w);
    for (int r = 0; r < 4; ++r) {
        CHECK(id.rows.row(r).isApprox(w / w.norm()));
        CHECK(id.row_log_scales[static_cast<std::size_t>(r)] == doctest::Approx(std::log(w.norm())));
    }

    // Diagonal case: row r is (w_J mu_J^r) with mu the four eigenvalue sums.
    const MatrixTuple t(k11, {diag({1, 2}), diag({3, 5})});
    const ComplexMatrix a = kronecker_sum_operator(t);
    const KrylovMatrix k = build_krylov_matrix(a, w);
    const double mu[4] = {4, 6, 5, 7};
    for (int r = 0; r < 4; ++r)
        for (int j = 0; j < 4; ++j) {
            const Complex want = w[j] * std::pow(mu[j], r);
            CHECK(std::abs(std::exp(k.row_log_scales[static_cast<std::size_t>(r)]) * k.rows(r, j) - want) < 1e-12 * std::pow(7.0, r));
        }
    CHECK_THROWS_AS(build_krylov_matrix(a, w, 3), Error);
}

TEST_CASE("P matches exact reference values on every route") {
    for (auto opts : {route(PRoute::Krylov), route(PRoute::Krylov, KrylovMethod::Explicit), route(PRoute::Spectral)}) {
        check_value(eval_P(int_pair(), opts), std::log(128.0), 0.0, 1e-12);
        check_value(eval_P(MatrixTuple(k11, {diag({1, 2}), real_matrix({{0, 1}, {1, 0}})}), opts), std::log(3.0), 0.0, 1e-12);
        check_value(eval_P(int_k12(), opts), 28.51960015780299583, 0.0, 1e-11);
    }
    check_value(eval_P(int_k111(), route(PRoute::Krylov)), 346.17782426145667009, std::numbers::pi, 1e-11);
    check_value(eval_P(int_k111(), route(PRoute::Spectral)), 346.17782426145667009, std::numbers::pi, 1e-11);
}

TEST_CASE("Phat matches exact reference values") {
    for (auto opts : {route(PRoute::Krylov), route(PRoute::Spectral)}) {
        const PhatValue a = eval_Phat(int_pair(), opts);
        CHECK_FALSE(a.indeterminate);
        check_value(a.value, std::log(4.0), 0.0, 1e-12);
        check_value(a.denominator.value, std::log(32.0), 0.0, 1e-12);
        const PhatValue b = eval_Phat(int_k12(), opts);
        check_value(b.value, std::log(32761.0), 0.0, 1e-11);
        const PhatValue c = eval_Phat(int_k111(), opts);
        check_value(c.value, 40.219833823502082589, 0.0, 1e-10);
    }
}

TEST_CASE("n=2: Phat = -det(A1 A2 - A2 A1)") {
    const ComplexMatrix a1 = real_matrix({{1, 2}, {3, 4}}), a2 = real_matrix({{0, 1}, {-2, 3}});
    const ComplexMatrix c = a1 * a2 - a2 * a1;
    CHECK(c.determinant().real() == doctest::Approx(-4.0));
    for (std::uint64_t s = 0; s < 10; ++s) {
        const MatrixTuple t = random_tuple(k11, Seed{100 + s});
        const PhatValue v = eval_Phat(t);
        const ComplexMatrix cc = t.matrix(0) * t.matrix(1) - t.matrix(1) * t.matrix(0);
        CHECK(std::abs(v.value.value() / cc.determinant() + 1.0) < 1e-10);
    }
}

TEST_CASE("P is zero on the zero-set examples") {
    // Shared eigenvector (0,1).
    const MatrixTuple shared(k11, {diag({1, 2}), real_matrix({{3, 0}, {1, 4}})});
    CHECK(eval_P(shared, route(PRoute::Spectral)).is_zero);
    const LogComplex pk = eval_P(shared);
    CHECK((pk.is_zero || std::exp(pk.log_mag) < 1e-12));

    // Both diagonal: every eigenvector is shared.
    const MatrixTuple both_diag(k11, {diag({1, 2}), diag({3, 5})});
    CHECK(eval_P(both_diag, route(PRoute::Spectral)).is_zero);
    const Evaluator ev(k11);
    CHECK(krylov_dimension(kronecker_sum_operator(both_diag), ev.covector(), 1e-8) < 4);

    // Exact cancellation found by the reference computation.
    const MatrixTuple deg = int_k12_degenerate();
    const Evaluator e12(k12);
    CHECK(krylov_dimension(kronecker_sum_operator(deg), e12.covector(), 1e-8) < 9);
    CHECK(oracle_detect(deg, 1e-8).min_sigma < 1e-7);
}

TEST_CASE("Krylov determinant routes agree on random tuples") {
    for (const auto& parts : std::vector<std::vector<int>>{{1, 1}, {1, 2}, {2, 1}, {1, 1, 1}, {2, 2}, {1, 3}, {1, 1, 2}, {1, 1, 1, 1}}) {
        int n = 0;
        for (int k : parts) n += k;
        const Partition p(n, parts);
        for (std::uint64_t s = 0; s < 3; ++s) {
            const MatrixTuple t = random_tuple(p, Seed{200 + s});
            const LogComplex a = eval_P(t, route(PRoute::Krylov));
            const LogComplex b = eval_P(t, route(PRoute::Spectral));
            CHECK_MESSAGE(std::abs(a.log_mag - b.log_mag) < 1e-9 * std::abs(b.log_mag), p.to_string());
            CHECK_MESSAGE(std::abs(wrap_phase(a.phase - b.phase)) < 1e-7, p.to_string());
            if (p.dimension() <= 9) {
                const LogComplex c = eval_P(t, route(PRoute::Krylov, KrylovMethod::Explicit));
                CHECK(std::abs(c.log_mag - b.log_mag) < 1e-9 * std::abs(b.log_mag));
            }
        }
    }
}

TEST_CASE("spectral factors: eigenvector determinant power") {
    const MatrixTuple t = random_tuple(k12, Seed{300});
    const Evaluator ev(k12, route(PRoute::Spectral));
    const auto spectra = spectra_of(t);
    const SpectralFactors f = ev.spectral_factors(spectra);
    // det V = det(V1)^{C(2,0)*9/3} det(V2)^{C(2,1)*9/3}
    const LogComplex want = lu_logdet(spectra[0].eigenvectors).pow(3) * lu_logdet(spectra[1].eigenvectors).pow(6);
    CHECK(f.eigenvector_det.log_mag == doctest::Approx(want.log_mag));
    CHECK(std::isfinite(f.min_log_pairing));

    const MatrixTuple rep(k11, {diag({1, 1}), diag({1, 2})});
    CHECK_THROWS_AS(eval_P(rep, route(PRoute::Spectral)), Error);
}

TEST_CASE("degree formulas") {
    CHECK(hatP_degree(k11, 0) == 2);
    CHECK(hatP_degree(k11, 1) == 2);
    CHECK(hatP_total_degree(k11) == 4);
    for (int i = 0; i < 3; ++i) CHECK(hatP_degree(k111, i) == 27);
    CHECK(hatP_total_degree(k111) == 81);
    const Partition k22(4, {2, 2});
    CHECK(hatP_degree(k22, 0) == 72);
    CHECK(hatP_total_degree(k22) == 144);
    CHECK(hatP_total_degree(Partition(3, {3})) == 0);
    CHECK_THROWS_AS(hatP_degree(k11, 2), Error);
}

TEST_CASE("homogeneity examples") {
    const MatrixTuple t = random_tuple(k11, Seed{400});
    const EvalOptions krylov = route(PRoute::Krylov);
    CHECK(homogeneity_check(t, 0, 1.0, krylov).error == 0.0);
    const HomogeneityResult h = homogeneity_check(t, 0, 2.0, krylov);
    CHECK(h.passed());
    CHECK(h.error < 1e-8);
    for (const auto& p : {k12, k111, Partition(4, {2, 2})}) {
        const MatrixTuple u = random_tuple(p, Seed{401});
        for (int i = 0; i < p.length(); ++i) CHECK(homogeneity_check(u, i, 0.7, krylov).passed());
        const HomogeneityResult j = joint_homogeneity_check(u, 1.3, krylov);
        CHECK(j.passed());
    }
}

TEST_CASE("certify_membership examples") {
    const CertifyConfig cfg;
    const MatrixTuple shared(k11, {diag({1, 2}), real_matrix({{3, 0}, {1, 4}})});
    CHECK(certify_membership(shared, cfg).status == VerdictStatus::OnVariety);

    const Verdict g = certify_membership(MatrixTuple(k11, {diag({1, 2}), real_matrix({{0, 1}, {1, 0}})}), cfg);
    CHECK(g.status == VerdictStatus::Generic);
    CHECK(g.eigen_gaps.size() == 2);

    const Verdict j = certify_membership(MatrixTuple(k11, {real_matrix({{1, 1}, {0, 1}}), diag({1, 2})}), cfg);
    CHECK(j.status == VerdictStatus::Indeterminate);
    CHECK_FALSE(j.notes.empty());

    // Both matrices diagonal: the coordinate axes are shared eigenvectors.
    CHECK(certify_membership(MatrixTuple(k11, {diag({1, 2}), diag({3, 5})}), cfg).status == VerdictStatus::OnVariety);

    // A single part is never on the variety.
    const Verdict one = certify_membership(random_tuple(Partition(3, {3}), Seed{1}), cfg);
    CHECK(one.status == VerdictStatus::Generic);
}

TEST_CASE("certify_membership is invariant under scaling and common conjugation") {
    const CertifyConfig cfg;
    ComplexGaussian rng(Seed{500});
    for (const auto& p : {k11, k12, k111}) {
        for (std::uint64_t s = 0; s < 5; ++s) {
            const PlantedTuple on = on_variety_tuple(p, Seed{510 + s});
            const MatrixTuple off = random_tuple(p, Seed{520 + s});
            const ComplexMatrix sim = random_unitary(rng, p.n()) * (ComplexMatrix::Identity(p.n(), p.n()) +
                                                                     0.3 * rng.matrix(p.n(), p.n()));
            const ComplexMatrix inv = sim.inverse();
            for (const MatrixTuple* t : {&on.tuple, &off}) {
                std::vector<ComplexMatrix> moved, scaled;
                for (int i = 0; i < p.length(); ++i) {
                    moved.push_back(sim * t->matrix(i) * inv);
                    scaled.push_back((3.0 + i) * t->matrix(i));
                }
                const VerdictStatus base = certify_membership(*t, cfg).status;
                CHECK(base != VerdictStatus::Indeterminate);
                CHECK(certify_membership(MatrixTuple(p, moved), cfg).status == base);
                CHECK(certify_membership(MatrixTuple(p, scaled), cfg).status == base);
            }
        }
    }
}

TEST_CASE("collision tuples: Phat is flagged, P vanishes") {
    const MatrixTuple t(k11, {diag({-2, 4}), diag({-8, -14})});
    const PhatValue v = eval_Phat(t, route(PRoute::Spectral));
    CHECK(v.indeterminate);
    CHECK(v.denominator.value.is_zero);
    CHECK(eval_P(t, route(PRoute::Spectral)).is_zero);

    const MatrixTuple c = single_collision_tuple(k11, SubPartition{{1, 1}}, Seed{600});
    const PhatValue w = eval_Phat(c);
    CHECK(w.indeterminate);
    CHECK(w.denominator.margin < kDenominatorFloor);
}

TEST_CASE("calibration is deterministic and memoized") {
    CertifyConfig cfg;
    const double a = calibration_scale(k12, cfg);
    CHECK(calibration_scale(k12, cfg) == a);
    cfg.seed = Seed{1};
    CHECK(calibration_scale(k12, cfg) != a);
}

TEST_CASE("Evaluator rejects mismatched tuples and oversized partitions") {
    const Evaluator ev(k11);
    CHECK_THROWS_AS(ev.P(random_tuple(k12, Seed{1})), Error);
    CHECK_THROWS_AS(Evaluator(Partition(6, {1, 1, 1, 1, 1, 1})), Error);
}
