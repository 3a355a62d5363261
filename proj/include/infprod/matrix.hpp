#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace infprod {

using Complex = std::complex<double>;

/// Dense row-major matrix over the complex numbers.
///
/// Both dimensions are at least one and every entry is finite; the
/// constructors enforce this. Real input is embedded with zero imaginary
/// parts.
class ComplexMatrix {
public:
    /// rows x cols zero matrix.
    ComplexMatrix(std::size_t rows, std::size_t cols);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

    /// Real matrix from nested rows, e.g. `ComplexMatrix{{0, 2}, {0, 0}}`.
    ComplexMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
    static ComplexMatrix scalar(Complex value) { return {1, 1, {value}}; }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

    std::span<const Complex> entries() const noexcept { return data_; }

    ComplexMatrix adjoint() const;
    ComplexMatrix transpose() const;

    /// Copy of the rows x cols block whose top-left corner is (r0, c0).
    ComplexMatrix block(std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) const;

    /// Overwrite the block at (r0, c0) with `src`.
    void set_block(std::size_t r0, std::size_t c0, const ComplexMatrix& src);

    double max_abs() const noexcept;
    bool all_finite() const noexcept;

    ComplexMatrix& operator+=(const ComplexMatrix& rhs);
    ComplexMatrix& operator-=(const ComplexMatrix& rhs);
    ComplexMatrix& operator*=(Complex factor);

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator*(Complex factor, ComplexMatrix m);

/// Matrix product a * b. Throws ShapeError unless a.cols() == b.rows(), and
/// NonFiniteError if the product overflows.
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);

/// Solves X * m = b for X by partial-pivoted LU of m; m is never inverted.
///
/// Throws SingularMatrixError (carrying the offending pivot modulus) when m
/// is singular to working precision.
ComplexMatrix solve_right(const ComplexMatrix& b, const ComplexMatrix& m);

/// Solves m * X = b.
ComplexMatrix solve_left(const ComplexMatrix& m, const ComplexMatrix& b);

/// I - c for square c.
ComplexMatrix identity_minus(const ComplexMatrix& c);

double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace infprod
