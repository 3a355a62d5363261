#pragma once

#include <cstddef>
#include <span>

#include "infprod/block_form.hpp"
#include "infprod/matrix.hpp"
#include "infprod/norms.hpp"

namespace infprod {

/// Snapshot of the right partial product P_n = A_1 A_2 ... A_n = [[I, X_n], [0, Gamma_n]]
/// together with the limit candidate L_n = B_n (I - C_n)^{-1} and the deviation
/// D_n = X_n - L_n.
///
/// L_0 is taken to be 0, so y_prev at n = 1 is L_1 itself. All norms are in
/// the certificate norm used for stepping (row_block_norm for the s x (d-s)
/// blocks).
struct ProductState {
    std::size_t n = 0;
    ComplexMatrix x;
    ComplexMatrix gamma;
    ComplexMatrix l;
    ComplexMatrix l_prev;
    ComplexMatrix d_dev;
    /// Y_{n-1} = L_n - L_{n-1}.
    ComplexMatrix y_prev;
    /// Certified upper bound on ||D_n||.
    double bound = 0.0;
    double norm_y = 0.0;
    double norm_d = 0.0;
    /// ||D_n - (D_{n-1} - Y_{n-1}) C_n||_F, recorded at every step.
    double identity_residual = 0.0;

    /// State for the empty product P_0 = I.
    static ProductState initial(std::size_t s, std::size_t tail);

    std::size_t s() const noexcept { return x.rows(); }
    std::size_t tail() const noexcept { return x.cols(); }
};

/// One per-step diagnostic record; serialized as a CSV row
/// `n,norm_X,norm_Y,norm_D,bound,norm_gamma`.
struct TraceRow {
    std::size_t n;
    double norm_x;
    double norm_y;
    double norm_d;
    double bound;
    double norm_gamma;
};

/// Appends factor A_{n+1} = a.
///
///   X' = B + X C,  Gamma' = Gamma C,  L' = B (I - C)^{-1},  Y = L' - L,  D' = X' - L'
///
/// The bound starts at ||D_1|| and then follows ||D_{n+1}|| <= (||D_n|| + ||Y_n||) r,
/// which is the one-step form of r^{n-1}||D_1|| + sum_{i=1}^{n-1} ||Y_{n-i}|| r^i.
///
/// Throws CertificateViolatedError (with the 1-based factor index) when
/// ||C|| exceeds the certificate rate, InvalidCertificateError for a k-step
/// certificate with k > 1, and ShapeError for non-conforming a. The identity
/// D' = (D - Y) C is checked on every call.
ProductState step(const ProductState& state, const BlockUpperTriangular& a,
                  const ContractionCertificate& cert);

TraceRow trace_row(const ProductState& state, const ContractionCertificate& cert);

/// X_n by the closed-form sum  sum_{i=0}^{n-1} B_{n-i} (C_{n+1-i} ... C_n),
/// where the i = 0 product is empty (the identity). The would-be i = n term
/// involves B_0, which does not exist (P_0 = I), and is dropped.
ComplexMatrix explicit_sum(std::span<const BlockUpperTriangular> seq, std::size_t n);

/// A_1 A_2 ... A_n by dense multiplication. Brute-force reference for the
/// structured recurrences.
ComplexMatrix dense_partial_product(std::span<const BlockUpperTriangular> seq, std::size_t n);

/// r^{n-1} ||D_1|| + sum_{i=1}^{n-1} ||Y_{n-i}|| r^i, with y_norms[k] = ||Y_{k+1}||.
double error_bound_series(std::span<const double> y_norms, double d1_norm, double rate,
                          std::size_t n);

/// Left partial product A_n ... A_1 = [[I, Z_n], [0, Gamma_n]].
struct LeftProductState {
    ComplexMatrix z;
    ComplexMatrix gamma;

    static LeftProductState initial(std::size_t s, std::size_t tail);
};

/// Z' = Z + B Gamma,  Gamma' = C Gamma.
LeftProductState left_product_step(const LeftProductState& state, const BlockUpperTriangular& a);

}  // namespace infprod
