#include "tuplevar/multilinear.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tuplevar/error.hpp"

namespace tuplevar {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidPartition: return "InvalidPartition";
        case ErrorKind::InvalidIndex: return "InvalidIndex";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::NumericalFailure: return "NumericalFailure";
        case ErrorKind::NonDiagonalizable: return "NonDiagonalizable";
        case ErrorKind::GenerationFailure: return "GenerationFailure";
        case ErrorKind::InvalidDocument: return "InvalidDocument";
    }
    return "Unknown";
}

std::int64_t binomial(std::int64_t a, std::int64_t b) {
    if (a < 0 || b < 0 || b > a) return 0;
    b = std::min(b, a - b);
    std::int64_t r = 1;
    for (std::int64_t i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
}

int permutation_sign(std::span<const int> word) {
    int inversions = 0;
    for (std::size_t i = 0; i < word.size(); ++i)
        for (std::size_t j = i + 1; j < word.size(); ++j)
            if (word[i] > word[j]) ++inversions;
    return (inversions % 2 == 0) ? 1 : -1;
}

Partition::Partition(int n, std::vector<int> parts) : n_(n), parts_(std::move(parts)) {
    if (n_ < 1) throw Error(ErrorKind::InvalidPartition, "n must be positive");
    if (parts_.empty()) throw Error(ErrorKind::InvalidPartition, "partition must have at least one part");
    int sum = 0;
    for (int k : parts_) {
        if (k < 1 || k > n_) throw Error(ErrorKind::InvalidPartition, "every part must lie in [1, n]");
        sum += k;
    }
    if (sum != n_) throw Error(ErrorKind::InvalidPartition, "partition must sum to n");
}

std::size_t Partition::dimension() const {
    std::size_t d = 1;
    for (int k : parts_) d *= static_cast<std::size_t>(binomial(n_, k));
    return d;
}

std::string Partition::to_string() const {
    std::ostringstream os;
    os << "n=" << n_ << ",k=(";
    for (std::size_t i = 0; i < parts_.size(); ++i) os << (i ? "," : "") << parts_[i];
    os << ")";
    return os.str();
}

std::vector<Subset> enumerate_wedge_basis(int n, int k) {
    if (k < 1 || k > n) throw Error(ErrorKind::InvalidPartition, "wedge degree must lie in [1, n]");
    std::vector<Subset> out;
    Subset s(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) s[static_cast<std::size_t>(i)] = i;
    while (true) {
        out.push_back(s);
        int i = k - 1;
        while (i >= 0 && s[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++s[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) s[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

namespace {

void check_subset(int n, const Subset& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] < 0 || s[i] >= n) throw Error(ErrorKind::InvalidIndex, "subset element out of range");
        if (i > 0 && s[i] <= s[i - 1]) throw Error(ErrorKind::InvalidIndex, "subset must be strictly increasing");
    }
}

}  // namespace

std::size_t subset_rank(int n, const Subset& s) {
    check_subset(n, s);
    const auto k = static_cast<std::int64_t>(s.size());
    std::int64_t rank = 0;
    int prev = -1;
    for (std::int64_t i = 0; i < k; ++i) {
        const int cur = s[static_cast<std::size_t>(i)];
        for (int v = prev + 1; v < cur; ++v) rank += binomial(n - 1 - v, k - 1 - i);
        prev = cur;
    }
    return static_cast<std::size_t>(rank);
}

TensorBasis::TensorBasis(Partition p) : partition_(std::move(p)) {
    const int l = partition_.length();
    bases_.reserve(static_cast<std::size_t>(l));
    for (int k : partition_.parts()) bases_.push_back(enumerate_wedge_basis(partition_.n(), k));
    strides_.assign(static_cast<std::size_t>(l), 1);
    for (int i = l - 2; i >= 0; --i)
        strides_[static_cast<std::size_t>(i)] = strides_[static_cast<std::size_t>(i + 1)] * bases_[static_cast<std::size_t>(i + 1)].size();
    size_ = strides_[0] * bases_[0].size();
}

std::size_t TensorBasis::flat_index(const std::vector<Subset>& subsets) const {
    if (static_cast<int>(subsets.size()) != partition_.length())
        throw Error(ErrorKind::InvalidIndex, "wrong number of subsets for partition");
    std::size_t flat = 0;
    for (int i = 0; i < partition_.length(); ++i) {
        const Subset& s = subsets[static_cast<std::size_t>(i)];
        if (static_cast<int>(s.size()) != partition_.part(i))
            throw Error(ErrorKind::InvalidIndex, "subset size does not match partition");
        flat += subset_rank(partition_.n(), s) * stride(i);
    }
    return flat;
}

std::vector<std::size_t> TensorBasis::digits(std::size_t flat) const {
    if (flat >= size_) throw Error(ErrorKind::InvalidIndex, "flat index out of range");
    std::vector<std::size_t> d(static_cast<std::size_t>(partition_.length()));
    for (int i = 0; i < partition_.length(); ++i) {
        d[static_cast<std::size_t>(i)] = flat / stride(i);
        flat %= stride(i);
    }
    return d;
}

std::vector<Subset> TensorBasis::unflat_index(std::size_t flat) const {
    const auto d = digits(flat);
    std::vector<Subset> out;
    out.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) out.push_back(bases_[i][d[i]]);
    return out;
}

MatrixTuple::MatrixTuple(Partition p, std::vector<ComplexMatrix> matrices)
    : partition_(std::move(p)), matrices_(std::move(matrices)) {
    if (static_cast<int>(matrices_.size()) != partition_.length())
        throw Error(ErrorKind::InvalidPartition, "number of matrices must equal the number of parts");
    for (const auto& m : matrices_) {
        if (m.rows() != partition_.n() || m.cols() != partition_.n())
            throw Error(ErrorKind::InvalidPartition, "every matrix must be n x n");
        if (!m.allFinite()) throw Error(ErrorKind::InvalidPartition, "matrix entries must be finite");
    }
}

MatrixTuple MatrixTuple::with_matrix(int i, ComplexMatrix m) const {
    auto copy = matrices_;
    copy.at(static_cast<std::size_t>(i)) = std::move(m);
    return {partition_, std::move(copy)};
}

MatrixTuple MatrixTuple::normalized() const {
    auto copy = matrices_;
    for (auto& m : copy) {
        const double f = m.norm();
        if (f > 0.0) m /= f;
    }
    return {partition_, std::move(copy)};
}

ComplexMatrix wedge_derivation(const ComplexMatrix& a, int k) {
    if (a.rows() != a.cols()) throw Error(ErrorKind::InvalidIndex, "wedge derivation needs a square matrix");
    const int n = static_cast<int>(a.rows());
    const auto basis = enumerate_wedge_basis(n, k);
    if (k == 1) return a;
    const auto m = static_cast<Eigen::Index>(basis.size());
    ComplexMatrix out = ComplexMatrix::Zero(m, m);
    Subset target;
    for (Eigen::Index col = 0; col < m; ++col) {
        const Subset& t = basis[static_cast<std::size_t>(col)];
        for (int j = 0; j < k; ++j) {
            const int slot = t[static_cast<std::size_t>(j)];
            for (int row = 0; row < n; ++row) {
                const Complex coeff = a(row, slot);
                if (coeff == Complex(0.0, 0.0)) continue;
                if (row == slot) {
                    out(col, col) += coeff;
                    continue;
                }
                if (std::binary_search(t.begin(), t.end(), row)) continue;
                // Moving e_row to its sorted place crosses every remaining
                // element strictly between slot and row.
                const int lo = std::min(row, slot), hi = std::max(row, slot);
                int crossed = 0;
                for (int x : t)
                    if (x != slot && x > lo && x < hi) ++crossed;
                target = t;
                target[static_cast<std::size_t>(j)] = row;
                std::sort(target.begin(), target.end());
                const auto r = static_cast<Eigen::Index>(subset_rank(n, target));
                out(r, col) += (crossed % 2 == 0 ? coeff : -coeff);
            }
        }
    }
    return out;
}

ComplexMatrix compound_matrix(const ComplexMatrix& a, int k) {
    const int rows = static_cast<int>(a.rows()), cols = static_cast<int>(a.cols());
    const auto rb = enumerate_wedge_basis(rows, k);
    const auto cb = enumerate_wedge_basis(cols, k);
    ComplexMatrix out(static_cast<Eigen::Index>(rb.size()), static_cast<Eigen::Index>(cb.size()));
    ComplexMatrix minor(k, k);
    for (std::size_t r = 0; r < rb.size(); ++r)
        for (std::size_t c = 0; c < cb.size(); ++c) {
            for (int x = 0; x < k; ++x)
                for (int y = 0; y < k; ++y) minor(x, y) = a(rb[r][static_cast<std::size_t>(x)], cb[c][static_cast<std::size_t>(y)]);
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = minor.determinant();
        }
    return out;
}

ComplexMatrix kronecker_sum_operator(const MatrixTuple& t, std::size_t size_cap) {
    const Partition& p = t.partition();
    const std::size_t dim = p.dimension();
    if (dim > size_cap) throw Error(ErrorKind::TooLarge, "tensor dimension " + std::to_string(dim) + " exceeds size cap");
    const TensorBasis basis(p);
    std::vector<ComplexMatrix> factors;
    for (int i = 0; i < p.length(); ++i) factors.push_back(wedge_derivation(t.matrix(i), p.part(i)));

    const auto n = static_cast<Eigen::Index>(dim);
    ComplexMatrix a = ComplexMatrix::Zero(n, n);
    for (std::size_t col = 0; col < dim; ++col) {
        const auto d = basis.digits(col);
        for (int i = 0; i < p.length(); ++i) {
            const ComplexMatrix& f = factors[static_cast<std::size_t>(i)];
            const auto di = static_cast<Eigen::Index>(d[static_cast<std::size_t>(i)]);
            const std::size_t base = col - d[static_cast<std::size_t>(i)] * basis.stride(i);
            for (Eigen::Index r = 0; r < f.rows(); ++r) {
                const Complex c = f(r, di);
                if (c == Complex(0.0, 0.0)) continue;
                a(static_cast<Eigen::Index>(base + static_cast<std::size_t>(r) * basis.stride(i)), static_cast<Eigen::Index>(col)) += c;
            }
        }
    }
    return a;
}

ComplexRow build_w_covector(const TensorBasis& basis) {
    const Partition& p = basis.partition();
    ComplexRow w = ComplexRow::Zero(static_cast<Eigen::Index>(basis.size()));
    std::vector<int> word;
    std::vector<char> seen(static_cast<std::size_t>(p.n()));
    for (std::size_t flat = 0; flat < basis.size(); ++flat) {
        word.clear();
        std::fill(seen.begin(), seen.end(), 0);
        bool overlap = false;
        for (const Subset& s : basis.unflat_index(flat)) {
            for (int x : s) {
                if (seen[static_cast<std::size_t>(x)]) overlap = true;
                seen[static_cast<std::size_t>(x)] = 1;
                word.push_back(x);
            }
        }
        if (!overlap) w[static_cast<Eigen::Index>(flat)] = static_cast<double>(permutation_sign(word));
    }
    return w;
}

Complex pair_with_decomposable(const TensorBasis& basis, const ComplexRow& w,
                               std::span<const ComplexMatrix> groups) {
    const Partition& p = basis.partition();
    if (static_cast<int>(groups.size()) != p.length())
        throw Error(ErrorKind::InvalidIndex, "one vector group per factor required");
    if (static_cast<std::size_t>(w.size()) != basis.size())
        throw Error(ErrorKind::InvalidIndex, "covector length does not match basis");
    // Coordinates of each wedge in its lexicographic basis are the row minors.
    std::vector<ComplexVector> coords;
    for (int i = 0; i < p.length(); ++i) {
        const ComplexMatrix& g = groups[static_cast<std::size_t>(i)];
        if (g.rows() != p.n() || g.cols() != p.part(i))
            throw Error(ErrorKind::InvalidIndex, "vector group has the wrong shape");
        const auto& fb = basis.factor_basis(i);
        ComplexVector c(static_cast<Eigen::Index>(fb.size()));
        for (std::size_t r = 0; r < fb.size(); ++r) {
            ComplexMatrix minor(p.part(i), p.part(i));
            for (int x = 0; x < p.part(i); ++x) minor.row(x) = g.row(fb[r][static_cast<std::size_t>(x)]);
            c[static_cast<Eigen::Index>(r)] = minor.determinant();
        }
        coords.push_back(std::move(c));
    }
    Complex sum{0.0, 0.0};
    for (std::size_t flat = 0; flat < basis.size(); ++flat) {
        const Complex wj = w[static_cast<Eigen::Index>(flat)];
        if (wj == Complex(0.0, 0.0)) continue;
        Complex term = wj;
        const auto d = basis.digits(flat);
        for (std::size_t i = 0; i < d.size(); ++i) term *= coords[i][static_cast<Eigen::Index>(d[i])];
        sum += term;
    }
    return sum;
}

}  // namespace tuplevar
