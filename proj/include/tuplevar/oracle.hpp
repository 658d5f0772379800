#pragma once

#include <vector>

#include "tuplevar/multilinear.hpp"
#include "tuplevar/numerics.hpp"

namespace tuplevar {

struct Verdict;

/// Below this sigma_min the oracle calls the chosen subspaces dependent.
inline constexpr double kOracleSigmaThreshold = 1e-7;

/// A choice of eigenvector indices per matrix together with the smallest
/// singular value of the n stacked unit eigenvectors it selects.
struct Witness {
    std::vector<Subset> choice;
    double sigma_min = 0.0;
    ComplexMatrix basis;  // n x n, columns grouped by matrix
};

/// Index sets of the k-dimensional invariant subspaces spanned by eigenvectors.
/// Throws NonDiagonalizable when eigenvalues are closer than gap_tol, where
/// the enumeration would miss subspaces.
std::vector<Subset> invariant_subspaces(const SpectralData& spec, int k, double gap_tol);

struct OracleResult {
    double min_sigma = 0.0;
    Witness witness;
};

/// Scans every choice of eigenvector-spanned invariant subspaces and keeps the
/// most nearly dependent one.
OracleResult oracle_detect(const MatrixTuple& t, double gap_tol);

/// Restacks the eigenvectors selected by `choice`.
ComplexMatrix stack_choice(std::span<const SpectralData> spectra, const std::vector<Subset>& choice);

/// True when the certifier and the oracle do not contradict each other.
/// An Indeterminate verdict never counts as disagreement.
bool agree(const Verdict& verdict, const OracleResult& oracle);

}  // namespace tuplevar
