#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tuplevar/multilinear.hpp"
#include "tuplevar/numerics.hpp"

namespace tuplevar {

/// k'_1..k'_l with 0 <= k'_i <= k_i and at least one nonzero entry.
struct SubPartition {
    std::vector<int> kprime;

    int weight() const;
    std::string to_string() const;  // e.g. "(1,0,1)"
    friend bool operator==(const SubPartition&, const SubPartition&) = default;
};

/// Validates `s` against `p` (length, bounds, weight >= 1); throws InvalidPartition.
void check_sub_partition(const Partition& p, const SubPartition& s);

/// Every sub-partition of `p` in lexicographic order of k'.
std::vector<SubPartition> enumerate_sub_partitions(const Partition& p);

/// Disjoint per-factor eigenvalue index sets; oriented so that at the first
/// factor with k'_i != 0, min F(i) < min G(i).
struct FGPair {
    std::vector<Subset> f;
    std::vector<Subset> g;
};

std::vector<FGPair> enumerate_fg_pairs(const Partition& p, const SubPartition& s);

/// (1/2) prod_i C(n, k'_i) C(n - k'_i, k'_i): the size of enumerate_fg_pairs.
std::int64_t fg_pair_count(const Partition& p, const SubPartition& s);

/// prod_i C(n - 2k'_i, k_i - k'_i); zero when any factor is out of range.
std::int64_t exponent(const Partition& p, const SubPartition& s);

struct DValue {
    LogComplex value;
    /// Smallest log|factor| in the product (+inf for an empty product).
    double min_log_factor = 0.0;
};

/**
 * Product over the oriented (F, G) pairs of
 *   sum_i ( sum_{j in F(i)} lambda_{i,j} - sum_{j in G(i)} lambda_{i,j} ).
 * `spectra[i]` holds the eigenvalues of the i-th matrix.
 */
DValue eval_D(std::span<const SpectralData> spectra, const Partition& p, const SubPartition& s);

/**
 * Precomputed factor lists for every sub-partition of a partition, so the
 * D-factors can be re-evaluated cheaply for many tuples of the same shape.
 */
class FactorPlan {
public:
    explicit FactorPlan(const Partition& p);

    struct Entry {
        SubPartition sub;
        std::int64_t exponent = 0;
        std::int64_t pair_count = 0;
        // Flattened signed terms: for pair q, terms [offsets[q], offsets[q+1]).
        std::vector<std::uint32_t> offsets;
        std::vector<std::int16_t> matrix;
        std::vector<std::int16_t> index;
        std::vector<std::int8_t> sign;
    };

    const Partition& partition() const { return partition_; }
    const std::vector<Entry>& entries() const { return entries_; }

    DValue evaluate(const Entry& e, std::span<const SpectralData> spectra) const;

private:
    Partition partition_;
    std::vector<Entry> entries_;
};

struct Denominator {
    LogComplex value;
    /// Smallest log of a charged factor relative to the eigenvalue scale
    /// (sum of the spectral radii); +inf when nothing is charged.
    double margin = 0.0;
    /// First charged sub-partition whose product vanished exactly, if any.
    std::optional<SubPartition> vanished;
};

/// prod over weight >= 2 sub-partitions with positive exponent of D^exponent.
Denominator eval_denominator(const FactorPlan& plan, std::span<const SpectralData> spectra);
Denominator eval_denominator(std::span<const SpectralData> spectra, const Partition& p);

/// Sum of spectral radii; the natural magnitude of a factor.
double eigenvalue_scale(std::span<const SpectralData> spectra);

}  // namespace tuplevar
