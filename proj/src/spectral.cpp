#include "tuplevar/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "tuplevar/error.hpp"

namespace tuplevar {

int SubPartition::weight() const {
    int w = 0;
    for (int x : kprime) w += x;
    return w;
}

std::string SubPartition::to_string() const {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < kprime.size(); ++i) os << (i ? "," : "") << kprime[i];
    os << ")";
    return os.str();
}

void check_sub_partition(const Partition& p, const SubPartition& s) {
    if (static_cast<int>(s.kprime.size()) != p.length())
        throw Error(ErrorKind::InvalidPartition, "sub-partition length must match the partition");
    for (int i = 0; i < p.length(); ++i) {
        const int x = s.kprime[static_cast<std::size_t>(i)];
        if (x < 0 || x > p.part(i))
            throw Error(ErrorKind::InvalidPartition, "sub-partition entries must satisfy 0 <= k'_i <= k_i");
    }
    if (s.weight() < 1) throw Error(ErrorKind::InvalidPartition, "sub-partition must have positive weight");
}

std::vector<SubPartition> enumerate_sub_partitions(const Partition& p) {
    std::vector<SubPartition> out;
    SubPartition cur{std::vector<int>(static_cast<std::size_t>(p.length()), 0)};
    std::function<void(int)> rec = [&](int i) {
        if (i == p.length()) {
            if (cur.weight() > 0) out.push_back(cur);
            return;
        }
        for (int x = 0; x <= p.part(i); ++x) {
            cur.kprime[static_cast<std::size_t>(i)] = x;
            rec(i + 1);
        }
        cur.kprime[static_cast<std::size_t>(i)] = 0;
    };
    rec(0);
    return out;
}

namespace {

/// All k-subsets of {0..n-1} \ excluded, lexicographic.  k = 0 gives {{}}.
std::vector<Subset> subsets_avoiding(int n, int k, const Subset& excluded) {
    std::vector<int> pool;
    for (int x = 0; x < n; ++x)
        if (!std::binary_search(excluded.begin(), excluded.end(), x)) pool.push_back(x);
    std::vector<Subset> out;
    if (k == 0) {
        out.emplace_back();
        return out;
    }
    if (k > static_cast<int>(pool.size())) return out;
    for (const Subset& idx : enumerate_wedge_basis(static_cast<int>(pool.size()), k)) {
        Subset s;
        for (int j : idx) s.push_back(pool[static_cast<std::size_t>(j)]);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

std::vector<FGPair> enumerate_fg_pairs(const Partition& p, const SubPartition& s) {
    check_sub_partition(p, s);
    const int n = p.n();
    int lead = 0;
    while (s.kprime[static_cast<std::size_t>(lead)] == 0) ++lead;

    std::vector<FGPair> out;
    FGPair cur{std::vector<Subset>(static_cast<std::size_t>(p.length())),
               std::vector<Subset>(static_cast<std::size_t>(p.length()))};
    std::function<void(int)> rec = [&](int i) {
        if (i == p.length()) {
            out.push_back(cur);
            return;
        }
        const int k = s.kprime[static_cast<std::size_t>(i)];
        for (const Subset& f : subsets_avoiding(n, k, {})) {
            for (const Subset& g : subsets_avoiding(n, k, f)) {
                if (i == lead && !(f.front() < g.front())) continue;
                cur.f[static_cast<std::size_t>(i)] = f;
                cur.g[static_cast<std::size_t>(i)] = g;
                rec(i + 1);
            }
        }
    };
    rec(0);
    return out;
}

std::int64_t fg_pair_count(const Partition& p, const SubPartition& s) {
    check_sub_partition(p, s);
    std::int64_t ordered = 1;
    for (int i = 0; i < p.length(); ++i) {
        const int k = s.kprime[static_cast<std::size_t>(i)];
        ordered *= binomial(p.n(), k) * binomial(p.n() - k, k);
    }
    return ordered / 2;
}

std::int64_t exponent(const Partition& p, const SubPartition& s) {
    check_sub_partition(p, s);
    std::int64_t e = 1;
    for (int i = 0; i < p.length(); ++i) {
        const int kp = s.kprime[static_cast<std::size_t>(i)];
        e *= binomial(p.n() - 2 * kp, p.part(i) - kp);
    }
    return e;
}

namespace {

Complex pair_factor(std::span<const SpectralData> spectra, const FGPair& pair) {
    Complex sum{0.0, 0.0};
    for (std::size_t i = 0; i < pair.f.size(); ++i) {
        const auto& lam = spectra[i].eigenvalues;
        for (int j : pair.f[i]) sum += lam[j];
        for (int j : pair.g[i]) sum -= lam[j];
    }
    return sum;
}

void check_spectra(std::span<const SpectralData> spectra, const Partition& p) {
    if (static_cast<int>(spectra.size()) != p.length())
        throw Error(ErrorKind::InvalidIndex, "one spectrum per matrix required");
    for (const auto& s : spectra)
        if (s.eigenvalues.size() != p.n()) throw Error(ErrorKind::InvalidIndex, "spectrum has the wrong size");
}

}  // namespace

DValue eval_D(std::span<const SpectralData> spectra, const Partition& p, const SubPartition& s) {
    check_spectra(spectra, p);
    ProductAccumulator acc;
    for (const FGPair& pair : enumerate_fg_pairs(p, s)) acc.multiply(pair_factor(spectra, pair));
    return {acc.result(), acc.min_log_factor()};
}

FactorPlan::FactorPlan(const Partition& p) : partition_(p) {
    for (SubPartition& s : enumerate_sub_partitions(p)) {
        Entry e;
        e.exponent = exponent(p, s);
        e.pair_count = fg_pair_count(p, s);
        e.offsets.push_back(0);
        for (const FGPair& pair : enumerate_fg_pairs(p, s)) {
            for (int i = 0; i < p.length(); ++i) {
                for (int j : pair.f[static_cast<std::size_t>(i)]) {
                    e.matrix.push_back(static_cast<std::int16_t>(i));
                    e.index.push_back(static_cast<std::int16_t>(j));
                    e.sign.push_back(1);
                }
                for (int j : pair.g[static_cast<std::size_t>(i)]) {
                    e.matrix.push_back(static_cast<std::int16_t>(i));
                    e.index.push_back(static_cast<std::int16_t>(j));
                    e.sign.push_back(-1);
                }
            }
            e.offsets.push_back(static_cast<std::uint32_t>(e.matrix.size()));
        }
        e.sub = std::move(s);
        entries_.push_back(std::move(e));
    }
}

DValue FactorPlan::evaluate(const Entry& e, std::span<const SpectralData> spectra) const {
    check_spectra(spectra, partition_);
    ProductAccumulator acc;
    for (std::size_t q = 0; q + 1 < e.offsets.size(); ++q) {
        Complex sum{0.0, 0.0};
        for (std::uint32_t t = e.offsets[q]; t < e.offsets[q + 1]; ++t) {
            const Complex lam = spectra[static_cast<std::size_t>(e.matrix[t])].eigenvalues[e.index[t]];
            sum += e.sign[t] > 0 ? lam : -lam;
        }
        acc.multiply(sum);
    }
    return {acc.result(), acc.min_log_factor()};
}

double eigenvalue_scale(std::span<const SpectralData> spectra) {
    double scale = 0.0;
    for (const auto& s : spectra) scale += s.eigenvalues.cwiseAbs().maxCoeff();
    return scale;
}

Denominator eval_denominator(const FactorPlan& plan, std::span<const SpectralData> spectra) {
    Denominator out;
    out.value = LogComplex::one();
    out.margin = std::numeric_limits<double>::infinity();
    const double log_scale = std::log(std::max(eigenvalue_scale(spectra), std::numeric_limits<double>::min()));
    for (const auto& e : plan.entries()) {
        if (e.sub.weight() < 2 || e.exponent <= 0) continue;
        const DValue d = plan.evaluate(e, spectra);
        out.margin = std::min(out.margin, d.min_log_factor - log_scale);
        if (d.value.is_zero && !out.vanished) out.vanished = e.sub;
        out.value *= d.value.pow(e.exponent);
    }
    return out;
}

Denominator eval_denominator(std::span<const SpectralData> spectra, const Partition& p) {
    return eval_denominator(FactorPlan(p), spectra);
}

}  // namespace tuplevar
