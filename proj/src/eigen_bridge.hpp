#pragma once

#include <Eigen/Dense>

#include "infprod/matrix.hpp"

namespace infprod::detail {

using EigenMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

inline EigenMatrix to_eigen(const ComplexMatrix& m) {
    EigenMatrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
    return out;
}

inline ComplexMatrix from_eigen(const EigenMatrix& m) {
    ComplexMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
    return out;
}

}  // namespace infprod::detail
