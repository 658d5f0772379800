#include "tuplevar/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "tuplevar/certifier.hpp"
#include "tuplevar/error.hpp"
#include "tuplevar/oracle.hpp"
#include "tuplevar/spectral.hpp"

namespace tuplevar {

namespace {

// Tolerances and time budgets, pinned.
constexpr double kZeroSetBudgetSmall = 300.0;   // seconds, n <= 3
constexpr double kZeroSetBudgetLarge = 900.0;   // seconds, including n = 4
constexpr double kRankTol = 1e-8;               // relative to sigma_max
constexpr double kHomogeneityRel = 1e-6;        // times the degree
constexpr double kSpectrumRel = 1e-7;           // times |A|_2
constexpr double kPairingRel = 1e-12;
constexpr double kRatioRelStd = 1e-6;
constexpr double kPermutationRel = 1e-8;
constexpr double kCommutatorZero = 1e-10;       // |det[A1, A2]| for unit-norm inputs
constexpr int kHomogeneityTuples = 10;
constexpr int kPairingFamilies = 100;
constexpr int kRatioPairs = 10;
constexpr int kPermutations = 20;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<Partition> compositions_upto(int lo, int hi, bool need_two_parts = false) {
    std::vector<Partition> out;
    for (int n = lo; n <= hi; ++n)
        for (auto& p : compositions(n))
            if (!need_two_parts || p.length() >= 2) out.push_back(std::move(p));
    return out;
}

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

CriterionResult start(int id, std::string name) {
    CriterionResult r;
    r.id = id;
    r.name = std::move(name);
    return r;
}

}  // namespace

std::vector<Partition> compositions(int n) {
    std::vector<Partition> out;
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
    return out;
}

CriterionResult check_zero_set(const AcceptanceOptions& o) {
    auto r = start(1, "zero set: certifier vs oracle on planted and random tuples");
    const auto t0 = Clock::now();
    std::vector<Partition> parts{Partition(2, {1, 1}), Partition(3, {1, 2}), Partition(3, {1, 1, 1})};
    if (o.max_n >= 4) {
        parts.emplace_back(4, std::vector<int>{1, 1, 1, 1});
        parts.emplace_back(4, std::vector<int>{2, 2});
    }
    const CertifyConfig cfg;
    std::ostringstream detail;
    bool ok = true;
    double small_seconds = 0.0;
    for (const auto& p : parts) {
        int on_hits = 0, generic_hits = 0, agreements = 0, planted_deps = 0;
        double worst_on = -1e300, best_generic = 1e300;
        for (int j = 0; j < o.samples; ++j) {
            const auto planted = on_variety_tuple(p, derive_seed(o.seed, 100000 + static_cast<std::uint64_t>(j)), cfg.gap_tol);
            const Verdict v = certify_membership(planted.tuple, cfg);
            const OracleResult orc = oracle_detect(planted.tuple, cfg.gap_tol);
            on_hits += v.status == VerdictStatus::OnVariety;
            planted_deps += orc.min_sigma < kOracleSigmaThreshold;
            agreements += agree(v, orc) && v.status != VerdictStatus::Indeterminate;
            worst_on = std::max(worst_on, v.residual - v.scale);

            const MatrixTuple t = random_tuple(p, derive_seed(o.seed, 200000 + static_cast<std::uint64_t>(j)));
            const Verdict g = certify_membership(t, cfg);
            const OracleResult org = oracle_detect(t, cfg.gap_tol);
            generic_hits += g.status == VerdictStatus::Generic;
            agreements += agree(g, org) && g.status != VerdictStatus::Indeterminate;
            best_generic = std::min(best_generic, g.residual - g.scale);
        }
        const bool part_ok = on_hits == o.samples && generic_hits == o.samples && agreements == 2 * o.samples &&
                             planted_deps == o.samples;
        ok = ok && part_ok;
        detail << p.to_string() << ": on " << on_hits << "/" << o.samples << ", generic " << generic_hits << "/"
               << o.samples << ", oracle agree " << agreements << "/" << 2 * o.samples
               << ", residual-scale on<=" << fmt("%.1f", worst_on) << " generic>=" << fmt("%.1f", best_generic)
               << "; ";
        if (p.n() <= 3) small_seconds = seconds_since(t0);
    }
    r.seconds = seconds_since(t0);
    const bool fast = small_seconds < kZeroSetBudgetSmall && r.seconds < kZeroSetBudgetLarge;
    if (!fast) detail << "time budget exceeded; ";
    detail << "n<=3 in " << fmt("%.1f", small_seconds) << " s";
    r.passed = ok && fast;
    r.detail = detail.str();
    return r;
}

CriterionResult check_kernel_deficiency(const AcceptanceOptions& o) {
    auto r = start(2, "kernel of M on single-collision tuples");
    const auto t0 = Clock::now();
    std::ostringstream detail;
    bool ok = true;
    int cases = 0;
    for (const auto& p : compositions_upto(2, 3, true)) {
        const Evaluator ev(p);
        const std::size_t big_n = p.dimension();
        // Control: a random tuple has a full cyclic space.
        const MatrixTuple control = random_tuple(p, derive_seed(o.seed, 300000));
        const ComplexMatrix ac = kronecker_sum_operator(control);
        const int control_dim = krylov_dimension(ac, ev.covector(), kRankTol);
        const int control_rank = numerical_rank(build_krylov_matrix(ac, ev.covector()).rows, kRankTol);
        if (control_dim != static_cast<int>(big_n)) ok = false;
        detail << p.to_string() << " control dim " << control_dim << "/" << big_n << " (explicit rank "
               << control_rank << ")";
        for (const auto& s : enumerate_sub_partitions(p)) {
            const std::int64_t e = exponent(p, s);
            if (s.weight() < 2 || e <= 0) continue;
            ++cases;
            const MatrixTuple t = single_collision_tuple(p, s, derive_seed(o.seed, 310000 + static_cast<std::uint64_t>(cases)));
            const ComplexMatrix a = kronecker_sum_operator(t);
            const int rank = numerical_rank(build_krylov_matrix(a, ev.covector()).rows, kRankTol);
            const int dim = krylov_dimension(a, ev.covector(), kRankTol);
            const auto bound = static_cast<int>(static_cast<std::int64_t>(big_n) - e);
            const bool case_ok = rank <= bound && dim <= bound;
            ok = ok && case_ok;
            detail << ", k'=" << s.to_string() << " rank " << rank << " dim " << dim << " <= " << bound
                   << (case_ok ? "" : " FAIL");
        }
        detail << "; ";
    }
    detail << cases << " sub-partitions";
    r.passed = ok && cases > 0;
    r.detail = detail.str();
    r.seconds = seconds_since(t0);
    return r;
}

CriterionResult check_degrees(const AcceptanceOptions& o) {
    auto r = start(3, "multihomogeneity degrees of Phat");
    const auto t0 = Clock::now();
    std::ostringstream detail;
    bool ok = true;
    double worst = 0.0;
    int checks = 0, skipped = 0;
    EvalOptions opts;
    opts.route = PRoute::Krylov;
    ComplexGaussian crng(derive_seed(o.seed, 400000));
    for (const auto& p : compositions_upto(2, o.max_n)) {
        int good = 0;
        for (std::uint64_t j = 0; good < kHomogeneityTuples && j < 4 * kHomogeneityTuples; ++j) {
            const MatrixTuple t = random_tuple(p, derive_seed(o.seed, 410000 + 1000 * static_cast<std::uint64_t>(p.length()) + j));
            std::vector<HomogeneityResult> rs;
            for (int i = 0; i < p.length(); ++i) rs.push_back(homogeneity_check(t, i, crng.uniform(0.5, 2.0), opts));
            if (std::any_of(rs.begin(), rs.end(), [](const auto& h) { return h.indeterminate; })) {
                ++skipped;
                continue;
            }
            ++good;
            for (int i = 0; i < p.length(); ++i) {
                ++checks;
                const auto& h = rs[static_cast<std::size_t>(i)];
                worst = std::max(worst, h.error / std::max<double>(1.0, static_cast<double>(hatP_degree(p, i))));
                ok = ok && h.passed();
            }
        }
        if (good < kHomogeneityTuples) {
            ok = false;
            detail << p.to_string() << " only " << good << " well-conditioned tuples; ";
        }
    }
    // Closed-form checks on the degree bookkeeping itself.
    for (int n = 2; n <= std::max(o.max_n, 4); ++n) {
        const Partition ones(n, std::vector<int>(static_cast<std::size_t>(n), 1));
        std::int64_t nn = 1;
        for (int i = 0; i < n; ++i) nn *= n;
        if (hatP_total_degree(ones) != nn * binomial(n, 2)) {
            ok = false;
            detail << "total degree mismatch at n=" << n << "; ";
        }
    }
    for (const auto& p : compositions_upto(1, 4)) {
        const auto big_n = static_cast<std::int64_t>(p.dimension());
        std::int64_t sum = 0;
        for (const auto& s : enumerate_sub_partitions(p)) sum += exponent(p, s) * 2 * fg_pair_count(p, s);
        if (sum != big_n * (big_n - 1)) {
            ok = false;
            detail << "pair count identity fails for " << p.to_string() << "; ";
        }
    }
    detail << checks << " checks, worst error/degree " << fmt("%.2e", worst) << ", skipped " << skipped
           << " ill-conditioned draws; k=(1,..,1) totals equal n^n C(n,2)";
    r.passed = ok;
    r.detail = detail.str();
    r.seconds = seconds_since(t0);
    return r;
}

CriterionResult check_joint_homogeneity(const AcceptanceOptions& o) {
    auto r = start(4, "joint homogeneity of P with degree C(N,2)");
    const auto t0 = Clock::now();
    bool ok = true;
    double worst = 0.0;
    int checks = 0;
    EvalOptions opts;
    opts.route = PRoute::Krylov;
    ComplexGaussian crng(derive_seed(o.seed, 500000));
    for (const auto& p : compositions_upto(2, std::min(3, o.max_n))) {
        const auto big_n = static_cast<double>(p.dimension());
        for (std::uint64_t j = 0; j < static_cast<std::uint64_t>(kHomogeneityTuples); ++j) {
            const MatrixTuple t = random_tuple(p, derive_seed(o.seed, 510000 + 100 * static_cast<std::uint64_t>(p.length()) + j));
            const HomogeneityResult h = joint_homogeneity_check(t, crng.uniform(0.5, 2.0), opts);
            ++checks;
            ok = ok && h.passed();
            worst = std::max(worst, h.error / std::max(1.0, big_n * (big_n - 1) / 2));
        }
    }
    r.passed = ok;
    r.detail = std::to_string(checks) + " tuples, worst error/degree " + fmt("%.2e", worst);
    r.seconds = seconds_since(t0);
    return r;
}

CriterionResult check_kronecker_spectrum(const AcceptanceOptions& o) {
    auto r = start(5, "spectrum of the induced operator");
    const auto t0 = Clock::now();
    bool ok = true;
    double worst = 0.0;
    int count = 0;
    for (const auto& p : compositions_upto(1, o.max_n)) {
        const MatrixTuple t = random_tuple(p, derive_seed(o.seed, 600000 + static_cast<std::uint64_t>(count++)));
        const ComplexMatrix a = kronecker_sum_operator(t);
        const TensorBasis basis(p);
        const auto spectra = spectra_of(t);
        std::vector<Complex> expected(basis.size());
        for (std::size_t flat = 0; flat < basis.size(); ++flat) {
            const auto subsets = basis.unflat_index(flat);
            Complex sum{0.0, 0.0};
            for (int i = 0; i < p.length(); ++i)
                for (int j : subsets[static_cast<std::size_t>(i)]) sum += spectra[static_cast<std::size_t>(i)].eigenvalues[j];
            expected[flat] = sum;
        }
        Eigen::ComplexEigenSolver<ComplexMatrix> solver(a, false);
        if (solver.info() != Eigen::Success) {
            ok = false;
            continue;
        }
        const ComplexVector got = solver.eigenvalues();
        // Global greedy matching on pairwise distances.
        const std::size_t m = expected.size();
        std::vector<std::tuple<double, std::size_t, std::size_t>> d;
        d.reserve(m * m);
        for (std::size_t x = 0; x < m; ++x)
            for (std::size_t y = 0; y < m; ++y) d.emplace_back(std::abs(got[static_cast<Eigen::Index>(x)] - expected[y]), x, y);
        std::sort(d.begin(), d.end());
        std::vector<char> used_x(m, 0), used_y(m, 0);
        double max_err = 0.0;
        std::size_t matched = 0;
        for (const auto& [dist, x, y] : d) {
            if (used_x[x] || used_y[y]) continue;
            used_x[x] = used_y[y] = 1;
            max_err = std::max(max_err, dist);
            if (++matched == m) break;
        }
        const double scale = singular_values(a).front();
        worst = std::max(worst, max_err / scale);
        ok = ok && max_err <= kSpectrumRel * scale;
    }
    r.passed = ok;
    r.detail = std::to_string(count) + " partitions, worst mismatch/|A| " + fmt("%.2e", worst);
    r.seconds = seconds_since(t0);
    return r;
}

CriterionResult check_covector_pairing(const AcceptanceOptions& o) {
    auto r = start(6, "covector pairing equals the determinant");
    const auto t0 = Clock::now();
    bool ok = true;
    double worst = 0.0;
    int count = 0;
    ComplexGaussian rng(derive_seed(o.seed, 700000));
    for (const auto& p : compositions_upto(1, o.max_n)) {
        const TensorBasis basis(p);
        const ComplexRow w = build_w_covector(basis);
        for (int f = 0; f < kPairingFamilies; ++f) {
            std::vector<ComplexMatrix> groups;
            ComplexMatrix all(p.n(), p.n());
            Eigen::Index col = 0;
            for (int i = 0; i < p.length(); ++i) {
                groups.push_back(rng.matrix(p.n(), p.part(i)));
                all.middleCols(col, p.part(i)) = groups.back();
                col += p.part(i);
            }
            const Complex got = pair_with_decomposable(basis, w, groups);
            const Complex want = all.partialPivLu().determinant();
            const double rel = std::abs(got - want) / std::abs(want);
            worst = std::max(worst, rel);
            ok = ok && rel <= kPairingRel;
            ++count;
        }
    }
    r.passed = ok;
    r.detail = std::to_string(count) + " families, worst relative error " + fmt("%.2e", worst);
    r.seconds = seconds_since(t0);
    return r;
}

CriterionResult check_commutator_ratio(const AcceptanceOptions& o) {
    auto r = start(7, "n=2: Phat proportional to det[A1,A2]");
    const auto t0 = Clock::now();
    const Partition p(2, {1, 1});
    EvalOptions opts;
    opts.route = PRoute::Krylov;
    const Evaluator ev(p, opts);
    std::vector<Complex> ratios;
    for (std::uint64_t j = 0; static_cast<int>(ratios.size()) < kRatioPairs && j < 4 * kRatioPairs; ++j) {
        const MatrixTuple t = random_tuple(p, derive_seed(o.seed, 800000 + j));
        const PhatValue v = ev.Phat(t);
        if (v.indeterminate) continue;
        const ComplexMatrix c = t.matrix(0) * t.matrix(1) - t.matrix(1) * t.matrix(0);
        ratios.push_back(v.value.value() / c.determinant());
    }
    Complex mean{0.0, 0.0};
    for (auto z : ratios) mean += z;
    mean /= static_cast<double>(ratios.size());
    double var = 0.0;
    for (auto z : ratios) var += std::norm(z - mean);
    const double rel_std = std::sqrt(var / static_cast<double>(ratios.size())) / std::abs(mean);

    // Zero sets: the commutator determinant vanishes exactly when the oracle
    // finds a shared eigenvector.
    int agreements = 0, total = 0;
    for (std::uint64_t j = 0; j < static_cast<std::uint64_t>(kRatioPairs); ++j) {
        for (int planted = 0; planted < 2; ++planted) {
            const MatrixTuple t = planted ? on_variety_tuple(p, derive_seed(o.seed, 810000 + j)).tuple
                                          : random_tuple(p, derive_seed(o.seed, 820000 + j));
            const ComplexMatrix c = t.matrix(0) * t.matrix(1) - t.matrix(1) * t.matrix(0);
            const bool comm_zero = std::abs(c.determinant()) < kCommutatorZero;
            const bool oracle_zero = oracle_detect(t, 1e-8).min_sigma < kOracleSigmaThreshold;
            agreements += comm_zero == oracle_zero && comm_zero == static_cast<bool>(planted);
            ++total;
        }
    }
    r.passed = static_cast<int>(ratios.size()) == kRatioPairs && rel_std < kRatioRelStd && agreements == total;
    r.detail = std::to_string(ratios.size()) + " pairs, ratio " + fmt("%.6g", mean.real()) + fmt("%+.6gi", mean.imag()) +
               ", relative std " + fmt("%.2e", rel_std) + ", zero-set agreement " + std::to_string(agreements) + "/" +
               std::to_string(total);
    r.seconds = seconds_since(t0);
    return r;
}

CriterionResult check_permutation_invariance(const AcceptanceOptions& o) {
    auto r = start(8, "weight>=2 D-factors invariant under eigenvalue relabelling");
    const auto t0 = Clock::now();
    bool ok = true;
    double worst = 0.0;
    int checks = 0;
    std::mt19937_64 shuffler(derive_seed(o.seed, 900000).value);
    std::uint64_t stream = 0;
    for (const auto& p : compositions_upto(2, o.max_n)) {
        const MatrixTuple t = random_tuple(p, derive_seed(o.seed, 910000 + stream++));
        const auto spectra = spectra_of(t);
        for (const auto& s : enumerate_sub_partitions(p)) {
            if (s.weight() < 2 || fg_pair_count(p, s) == 0) continue;
            const LogComplex base = eval_D(spectra, p, s).value;
            for (int q = 0; q < kPermutations; ++q) {
                auto shuffled = spectra;
                for (auto& sd : shuffled) {
                    std::vector<Complex> ev(sd.eigenvalues.data(), sd.eigenvalues.data() + sd.eigenvalues.size());
                    std::shuffle(ev.begin(), ev.end(), shuffler);
                    for (std::size_t j = 0; j < ev.size(); ++j) sd.eigenvalues[static_cast<Eigen::Index>(j)] = ev[j];
                }
                const LogComplex moved = eval_D(shuffled, p, s).value;
                const double rel = std::abs((moved / base).value() - 1.0);
                worst = std::max(worst, rel);
                ok = ok && rel <= kPermutationRel;
                ++checks;
            }
        }
    }
    r.passed = ok && checks > 0;
    r.detail = std::to_string(checks) + " permuted evaluations, worst relative change " + fmt("%.2e", worst);
    r.seconds = seconds_since(t0);
    return r;
}

CriterionResult check_collision_uniqueness(const AcceptanceOptions&) {
    auto r = start(9, "unique equal-sum pair in the collision value sets");
    const auto t0 = Clock::now();
    bool ok = true;
    int sets = 0;
    std::ostringstream bad;
    for (int a = 2; a <= 4; ++a) {
        for (int b = 2 * a; b <= 16; ++b) {
            const auto values = collision_value_set(a, b);
            const EqualSumSearch found = find_equal_sum_pairs(values);
            std::int64_t ls = 0, rs = 0;
            for (int j : found.left) ls += values[static_cast<std::size_t>(j)];
            for (int j : found.right) rs += values[static_cast<std::size_t>(j)];
            const bool set_ok = found.pair_count == 1 && static_cast<int>(found.left.size()) == a &&
                                static_cast<int>(found.right.size()) == a && ls == rs;
            if (!set_ok) bad << " (a=" << a << ",b=" << b << ")";
            ok = ok && set_ok;
            ++sets;
        }
    }
    r.passed = ok;
    r.detail = std::to_string(sets) + " value sets with 2<=a<=4, 2a<=b<=16" +
               (ok ? std::string(", each with exactly one pair of size a") : ", failures:" + bad.str());
    r.seconds = seconds_since(t0);
    return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& o,
                                            const std::function<void(const CriterionResult&)>& report) {
    if (o.samples < 1) throw Error(ErrorKind::InvalidIndex, "samples must be ≥ 1");
    if (o.max_n < 2 || o.max_n > 4) throw Error(ErrorKind::InvalidIndex, "max-n must be between 2 and 4");
    using Check = CriterionResult (*)(const AcceptanceOptions&);
    const Check checks[] = {check_zero_set,           check_kernel_deficiency, check_degrees,
                            check_joint_homogeneity,  check_kronecker_spectrum, check_covector_pairing,
                            check_commutator_ratio,   check_permutation_invariance, check_collision_uniqueness};
    std::vector<CriterionResult> out;
    for (Check c : checks) {
        CriterionResult res;
        try {
            res = c(o);
        } catch (const Error& e) {
            res.id = static_cast<int>(out.size()) + 1;
            res.name = "criterion " + std::to_string(res.id);
            res.detail = std::string("error ") + to_string(e.kind()) + ": " + e.what();
        }
        if (report) report(res);
        out.push_back(std::move(res));
    }
    return out;
}

std::string format_result(const CriterionResult& r) {
    std::ostringstream s;
    s << (r.passed ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << " (" << fmt("%.2f", r.seconds)
      << " s): " << r.detail;
    return s.str();
}

}  // namespace tuplevar
