#include "tuplevar/oracle.hpp"

#include <functional>
#include <limits>

#include "tuplevar/certifier.hpp"
#include "tuplevar/error.hpp"

namespace tuplevar {

std::vector<Subset> invariant_subspaces(const SpectralData& spec, int k, double gap_tol) {
    if (!(spec.min_gap > gap_tol))
        throw Error(ErrorKind::NonDiagonalizable,
                    "eigenvalues closer than gap tolerance; invariant subspaces are not all eigenvector-spanned");
    return enumerate_wedge_basis(static_cast<int>(spec.eigenvalues.size()), k);
}

ComplexMatrix stack_choice(std::span<const SpectralData> spectra, const std::vector<Subset>& choice) {
    const Eigen::Index n = spectra.front().eigenvectors.rows();
    ComplexMatrix basis(n, n);
    Eigen::Index col = 0;
    for (std::size_t i = 0; i < choice.size(); ++i)
        for (int j : choice[i]) basis.col(col++) = spectra[i].eigenvectors.col(j);
    return basis;
}

OracleResult oracle_detect(const MatrixTuple& t, double gap_tol) {
    const Partition& p = t.partition();
    std::vector<SpectralData> spectra;
    std::vector<std::vector<Subset>> options;
    for (int i = 0; i < p.length(); ++i) {
        spectra.push_back(eigendecomposition(t.matrix(i)));
        options.push_back(invariant_subspaces(spectra.back(), p.part(i), gap_tol));
    }

    OracleResult best;
    best.min_sigma = std::numeric_limits<double>::infinity();
    std::vector<Subset> choice(static_cast<std::size_t>(p.length()));
    std::function<void(int)> scan = [&](int i) {
        if (i == p.length()) {
            ComplexMatrix basis = stack_choice(spectra, choice);
            const double s = smallest_singular_value(basis);
            if (s < best.min_sigma) {
                best.min_sigma = s;
                best.witness = Witness{choice, s, std::move(basis)};
            }
            return;
        }
        for (const Subset& s : options[static_cast<std::size_t>(i)]) {
            choice[static_cast<std::size_t>(i)] = s;
            scan(i + 1);
        }
    };
    scan(0);
    return best;
}

bool agree(const Verdict& verdict, const OracleResult& oracle) {
    if (verdict.status == VerdictStatus::Indeterminate) return true;
    const bool dependent = oracle.min_sigma < kOracleSigmaThreshold;
    return (verdict.status == VerdictStatus::OnVariety) == dependent;
}

}  // namespace tuplevar
