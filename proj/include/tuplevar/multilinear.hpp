#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tuplevar/numerics.hpp"

namespace tuplevar {

/// Default refusal threshold for the tensor dimension N.
inline constexpr std::size_t kDefaultSizeCap = 4096;

/// Sorted, 0-based subset of {0, ..., n-1}.
using Subset = std::vector<int>;

/// C(a, b); zero when b < 0 or b > a, and for negative a.
std::int64_t binomial(std::int64_t a, std::int64_t b);

/// Sign (+1/-1) of the permutation spelled by `word`, via inversion count.
int permutation_sign(std::span<const int> word);

/**
 * Ambient dimension n together with the subspace dimensions k_1..k_l.
 * Construction enforces sum(k) == n and 1 <= k_i <= n.
 */
class Partition {
public:
    Partition(int n, std::vector<int> parts);

    int n() const { return n_; }
    int length() const { return static_cast<int>(parts_.size()); }
    int part(int i) const { return parts_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& parts() const { return parts_; }

    /// N = prod_i C(n, k_i), the dimension of the tensor space.
    std::size_t dimension() const;
    std::string to_string() const;  // e.g. "n=3,k=(1,2)"

    friend bool operator==(const Partition&, const Partition&) = default;

private:
    int n_;
    std::vector<int> parts_;
};

/// All k-subsets of {0..n-1} in lexicographic order.
std::vector<Subset> enumerate_wedge_basis(int n, int k);

/// Lexicographic rank of a sorted k-subset of {0..n-1}.
std::size_t subset_rank(int n, const Subset& s);

/**
 * Flat indexing of the basis of the tensor product of exterior powers.
 * Row-major over factors: the first factor is the most significant digit.
 */
class TensorBasis {
public:
    explicit TensorBasis(Partition p);

    const Partition& partition() const { return partition_; }
    std::size_t size() const { return size_; }
    const std::vector<Subset>& factor_basis(int i) const { return bases_[static_cast<std::size_t>(i)]; }
    std::size_t stride(int i) const { return strides_[static_cast<std::size_t>(i)]; }

    std::size_t flat_index(const std::vector<Subset>& subsets) const;
    std::vector<Subset> unflat_index(std::size_t flat) const;
    /// Per-factor lexicographic ranks of a flat index.
    std::vector<std::size_t> digits(std::size_t flat) const;

private:
    Partition partition_;
    std::vector<std::vector<Subset>> bases_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 1;
};

/// l square matrices of size n plus the partition they are tested against.
class MatrixTuple {
public:
    MatrixTuple(Partition p, std::vector<ComplexMatrix> matrices);

    const Partition& partition() const { return partition_; }
    const std::vector<ComplexMatrix>& matrices() const { return matrices_; }
    const ComplexMatrix& matrix(int i) const { return matrices_[static_cast<std::size_t>(i)]; }
    int size() const { return static_cast<int>(matrices_.size()); }

    /// Copy with matrix i replaced.
    MatrixTuple with_matrix(int i, ComplexMatrix m) const;
    /// Copy with every matrix scaled to unit Frobenius norm (zero matrices kept).
    MatrixTuple normalized() const;

private:
    Partition partition_;
    std::vector<ComplexMatrix> matrices_;
};

/// Matrix of the derivation induced by `a` on the k-th exterior power,
/// in the lexicographic wedge basis.  k = 1 returns `a`.
ComplexMatrix wedge_derivation(const ComplexMatrix& a, int k);

/// k-th compound matrix (all k x k minors, rows and columns in lexicographic order).
ComplexMatrix compound_matrix(const ComplexMatrix& a, int k);

/// The induced operator sum_i I x .. x wedge_derivation(A_i, k_i) x .. x I.
ComplexMatrix kronecker_sum_operator(const MatrixTuple& t, std::size_t size_cap = kDefaultSizeCap);

/// The determinant covector: entry is the sign of the concatenated word when
/// the subsets partition {0..n-1}, zero otherwise.
ComplexRow build_w_covector(const TensorBasis& basis);

/// Pairs the covector with (x)_i (^)_j v_{i,j}.  `groups[i]` is n x k_i,
/// one column per vector.
Complex pair_with_decomposable(const TensorBasis& basis, const ComplexRow& w,
                               std::span<const ComplexMatrix> groups);

}  // namespace tuplevar
