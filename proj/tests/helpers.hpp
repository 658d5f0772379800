#pragma once

#include <initializer_list>

#include "tuplevar/numerics.hpp"

namespace testing {

/// Real matrix from nested braces, row by row.
inline tuplevar::ComplexMatrix real_matrix(std::initializer_list<std::initializer_list<double>> rows) {
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = static_cast<Eigen::Index>(rows.begin()->size());
    tuplevar::ComplexMatrix m(r, c);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (double x : row) m(i, j++) = x;
        ++i;
    }
    return m;
}

inline tuplevar::ComplexMatrix diag(std::initializer_list<double> d) {
    tuplevar::ComplexMatrix m = tuplevar::ComplexMatrix::Zero(static_cast<Eigen::Index>(d.size()),
                                                              static_cast<Eigen::Index>(d.size()));
    Eigen::Index i = 0;
    for (double x : d) {
        m(i, i) = x;
        ++i;
    }
    return m;
}

}  // namespace testing
