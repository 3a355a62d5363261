#include "infprod/product_engine.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "infprod/errors.hpp"

namespace infprod {

namespace {

constexpr double kRateSlack = 1e-12;
constexpr double kIdentityTol = 1e-10;

double fro(const ComplexMatrix& m) { return norm_value(m, NormKind::frobenius()); }

void require_length(std::span<const BlockUpperTriangular> seq, std::size_t n) {
    if (n == 0 || n > seq.size())
        throw std::out_of_range("partial product index " + std::to_string(n) +
                                " outside 1.." + std::to_string(seq.size()));
}

}  // namespace

ProductState ProductState::initial(std::size_t s, std::size_t tail) {
    ComplexMatrix zero(s, tail);
    return ProductState{0, zero, ComplexMatrix::identity(tail), zero, zero, zero, zero,
                        0.0, 0.0, 0.0, 0.0};
}

ProductState step(const ProductState& state, const BlockUpperTriangular& a,
                  const ContractionCertificate& cert) {
    if (a.s() != state.s() || a.tail() != state.tail())
        throw ShapeError("step: factor does not conform to the product's block shape");
    if (!cert.one_step())
        throw InvalidCertificateError("step needs a one-step certificate, got " + cert.describe());

    const std::size_t index = state.n + 1;
    const double c_norm = norm_value(a.c(), cert.norm());
    if (c_norm > cert.rate() + kRateSlack) {
        std::ostringstream os;
        os.precision(17);
        os << "factor " << index << ": ||C|| = " << c_norm << " exceeds certified rate "
           << cert.rate() << " in the " << cert.norm().name() << " norm";
        throw CertificateViolatedError(os.str(), index);
    }

    ComplexMatrix x = a.b() + matmul(state.x, a.c());
    ComplexMatrix gamma = matmul(state.gamma, a.c());
    ComplexMatrix l = solve_right(a.b(), identity_minus(a.c()));
    ComplexMatrix y = l - state.l;
    ComplexMatrix d_dev = x - l;

    const double norm_y = row_block_norm(y, cert.norm());
    const double norm_d = row_block_norm(d_dev, cert.norm());
    const double bound = state.n == 0 ? norm_d : (state.bound + norm_y) * cert.rate();

    const ComplexMatrix predicted = matmul(state.d_dev - y, a.c());
    const double residual = frobenius_distance(d_dev, predicted);
    const double scale = 1.0 + fro(x) + fro(l);
    if (residual > kIdentityTol * scale) {
        std::ostringstream os;
        os << "step " << index << ": deviation identity residual " << residual;
        throw Error(os.str());
    }
    return ProductState{index, std::move(x), std::move(gamma), std::move(l), state.l,
                        std::move(d_dev), std::move(y), bound, norm_y, norm_d, residual};
}

TraceRow trace_row(const ProductState& state, const ContractionCertificate& cert) {
    return {state.n,
            row_block_norm(state.x, cert.norm()),
            state.norm_y,
            state.norm_d,
            state.bound,
            norm_value(state.gamma, cert.norm())};
}

ComplexMatrix explicit_sum(std::span<const BlockUpperTriangular> seq, std::size_t n) {
    require_length(seq, n);
    // 1-based: factor k is seq[k - 1].
    const auto& first = seq.front();
    ComplexMatrix sum(first.s(), first.tail());
    for (std::size_t i = 0; i < n; ++i) {
        ComplexMatrix tail_product = ComplexMatrix::identity(first.tail());
        for (std::size_t k = n + 1 - i; k <= n; ++k)
            tail_product = matmul(tail_product, seq[k - 1].c());
        sum += matmul(seq[n - i - 1].b(), tail_product);
    }
    return sum;
}

ComplexMatrix dense_partial_product(std::span<const BlockUpperTriangular> seq, std::size_t n) {
    require_length(seq, n);
    ComplexMatrix product = to_dense(seq[0]);
    for (std::size_t k = 1; k < n; ++k) product = matmul(product, to_dense(seq[k]));
    return product;
}

double error_bound_series(std::span<const double> y_norms, double d1_norm, double rate,
                          std::size_t n) {
    if (!(rate >= 0.0 && rate < 1.0))
        throw InvalidCertificateError("error bound needs a rate in [0, 1)");
    if (n == 0) throw std::out_of_range("error bound index must be positive");
    if (y_norms.size() + 1 < n)
        throw std::out_of_range("error bound needs ||Y_1|| .. ||Y_{n-1}||");
    double total = std::pow(rate, static_cast<double>(n - 1)) * d1_norm;
    double power = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        power *= rate;
        total += y_norms[n - i - 1] * power;
    }
    return total;
}

LeftProductState LeftProductState::initial(std::size_t s, std::size_t tail) {
    return {ComplexMatrix(s, tail), ComplexMatrix::identity(tail)};
}

LeftProductState left_product_step(const LeftProductState& state, const BlockUpperTriangular& a) {
    if (a.s() != state.z.rows() || a.tail() != state.z.cols())
        throw ShapeError("left_product_step: factor does not conform");
    return {state.z + matmul(a.b(), state.gamma), matmul(a.c(), state.gamma)};
}

}  // namespace infprod
