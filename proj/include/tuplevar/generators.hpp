#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "tuplevar/multilinear.hpp"
#include "tuplevar/oracle.hpp"
#include "tuplevar/spectral.hpp"

namespace tuplevar {

struct Seed {
    std::uint64_t value = 0;
};

/// Derives an independent stream seed from (base, stream) via splitmix64.
Seed derive_seed(Seed base, std::uint64_t stream);

/// Seeded source of complex Gaussians; identical seeds give identical draws.
class ComplexGaussian {
public:
    explicit ComplexGaussian(Seed seed) : engine_(seed.value) {}

    /// Circular standard normal: E|z|^2 = 1.
    Complex draw();
    ComplexMatrix matrix(Eigen::Index rows, Eigen::Index cols);
    double uniform(double lo, double hi);

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Random unitary matrix (Q factor of a Gaussian matrix, phases fixed).
ComplexMatrix random_unitary(ComplexGaussian& rng, Eigen::Index n);

/// i.i.d. complex Gaussian entries, each matrix scaled to unit Frobenius norm.
MatrixTuple random_tuple(const Partition& p, Seed seed);

struct PlantedTuple {
    MatrixTuple tuple;
    Witness planted;
};

/**
 * A tuple on the variety: all sum(k_i) = n planted vectors lie in one random
 * hyperplane, and A_i keeps the span of its k_i vectors invariant.  Each A_i
 * has eigenvalue gap above max(gap_tol, 1e-3) and is unit-normalized.
 */
PlantedTuple on_variety_tuple(const Partition& p, Seed seed, double gap_tol = 1e-8);

/// {(-2)^1, ..., (-2)^(2a-1), -(2^(2a) - 2), (-2)^(2a+1), ..., (-2)^b}.
std::vector<std::int64_t> collision_value_set(int a, int b);

struct EqualSumSearch {
    /// Unordered pairs of disjoint nonempty subsets with equal sums.
    std::int64_t pair_count = 0;
    /// Positions (into the value set) of the first pair found.
    std::vector<int> left, right;
};

/// Exhaustive scan of all 3^b labelings.
EqualSumSearch find_equal_sum_pairs(const std::vector<std::int64_t>& values);

struct CollisionOptions {
    /// Conjugate each diagonal matrix by its own random similarity with
    /// condition number <= 10.  Off: emit the diagonal matrices themselves.
    bool conjugate = true;
};

/**
 * Tuple whose eigenvalues make exactly one weight >= 2 factor D_{s} vanish.
 * Throws GenerationFailure if the equal-sum pair is not unique or does not
 * split as s requires.
 */
MatrixTuple single_collision_tuple(const Partition& p, const SubPartition& s, Seed seed,
                                   CollisionOptions options = {});

/// Adds eps * (unit-Frobenius Gaussian) to each matrix.
MatrixTuple perturb(const MatrixTuple& t, double eps, Seed seed);

}  // namespace tuplevar
