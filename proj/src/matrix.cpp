#include "infprod/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "eigen_bridge.hpp"
#include "infprod/errors.hpp"

namespace infprod {

namespace {

std::string shape_str(const ComplexMatrix& m) {
    std::ostringstream os;
    os << m.rows() << "x" << m.cols();
    return os.str();
}

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ShapeError(std::string(op) + ": shapes " + shape_str(a) + " and " + shape_str(b) +
                         " differ");
}

// Partial-pivoted LU of a square matrix; throws if some pivot is negligible
// relative to the largest entry of the matrix.
Eigen::PartialPivLU<detail::EigenMatrix> checked_lu(const detail::EigenMatrix& m) {
    Eigen::PartialPivLU<detail::EigenMatrix> lu(m);
    const double scale = m.cwiseAbs().maxCoeff();
    const double tol =
        static_cast<double>(m.rows()) * std::numeric_limits<double>::epsilon() * scale;
    const auto& packed = lu.matrixLU();
    double min_pivot = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < packed.rows(); ++i)
        min_pivot = std::min(min_pivot, std::abs(packed(i, i)));
    if (!(min_pivot > tol)) {
        std::ostringstream os;
        os << "matrix is singular to working precision (pivot modulus " << min_pivot << ")";
        throw SingularMatrixError(os.str(), min_pivot);
    }
    return lu;
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : ComplexMatrix(rows, cols, std::vector<Complex>(rows * cols)) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (rows_ == 0 || cols_ == 0) throw ShapeError("matrix dimensions must be positive");
    if (data_.size() != rows_ * cols_)
        throw ShapeError("entry count does not match " + shape_str(*this));
    if (!all_finite()) throw NonFiniteError("matrix entries must be finite");
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
    if (rows_ == 0 || cols_ == 0) throw ShapeError("matrix dimensions must be positive");
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
        if (row.size() != cols_) throw ShapeError("ragged matrix literal");
        for (double v : row) data_.emplace_back(v, 0.0);
    }
    if (!all_finite()) throw NonFiniteError("matrix entries must be finite");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
    return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
}

ComplexMatrix ComplexMatrix::block(std::size_t r0, std::size_t c0, std::size_t rows,
                                   std::size_t cols) const {
    if (r0 + rows > rows_ || c0 + cols > cols_)
        throw ShapeError("block exceeds bounds of " + shape_str(*this));
    ComplexMatrix out(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) out(i, j) = (*this)(r0 + i, c0 + j);
    return out;
}

void ComplexMatrix::set_block(std::size_t r0, std::size_t c0, const ComplexMatrix& src) {
    if (r0 + src.rows() > rows_ || c0 + src.cols() > cols_)
        throw ShapeError("block " + shape_str(src) + " does not fit in " + shape_str(*this));
    for (std::size_t i = 0; i < src.rows(); ++i)
        for (std::size_t j = 0; j < src.cols(); ++j) (*this)(r0 + i, c0 + j) = src(i, j);
}

double ComplexMatrix::max_abs() const noexcept {
    double out = 0.0;
    for (const auto& z : data_) out = std::max(out, std::abs(z));
    return out;
}

bool ComplexMatrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
    require_same_shape(*this, rhs, "add");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += rhs.data_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
    require_same_shape(*this, rhs, "subtract");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= rhs.data_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex factor) {
    for (auto& z : data_) z *= factor;
    return *this;
}

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }
ComplexMatrix operator*(Complex factor, ComplexMatrix m) { return m *= factor; }

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows())
        throw ShapeError("matmul: " + shape_str(a) + " times " + shape_str(b));
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    if (!out.all_finite()) throw NonFiniteError("matmul: product overflowed");
    return out;
}

ComplexMatrix solve_right(const ComplexMatrix& b, const ComplexMatrix& m) {
    if (!m.is_square() || b.cols() != m.rows())
        throw ShapeError("solve_right: " + shape_str(b) + " against " + shape_str(m));
    // X m = b  <=>  m^T X^T = b^T
    const auto lu = checked_lu(detail::to_eigen(m).transpose());
    detail::EigenMatrix xt = lu.solve(detail::to_eigen(b).transpose());
    ComplexMatrix out = detail::from_eigen(xt.transpose());
    if (!out.all_finite()) throw NonFiniteError("solve_right: solution overflowed");
    return out;
}

ComplexMatrix solve_left(const ComplexMatrix& m, const ComplexMatrix& b) {
    if (!m.is_square() || b.rows() != m.rows())
        throw ShapeError("solve_left: " + shape_str(m) + " against " + shape_str(b));
    const auto lu = checked_lu(detail::to_eigen(m));
    ComplexMatrix out = detail::from_eigen(lu.solve(detail::to_eigen(b)));
    if (!out.all_finite()) throw NonFiniteError("solve_left: solution overflowed");
    return out;
}

ComplexMatrix identity_minus(const ComplexMatrix& c) {
    if (!c.is_square()) throw ShapeError("identity_minus: " + shape_str(c) + " is not square");
    ComplexMatrix out = -1.0 * c;
    for (std::size_t i = 0; i < c.rows(); ++i) out(i, i) += 1.0;
    return out;
}

double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_shape(a, b, "frobenius_distance");
    double sum = 0.0;
    for (std::size_t k = 0; k < a.entries().size(); ++k) sum += std::norm(a.entries()[k] - b.entries()[k]);
    return std::sqrt(sum);
}

}  // namespace infprod
