#include "infprod/norms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "eigen_bridge.hpp"
#include "infprod/errors.hpp"

namespace infprod {

namespace {

constexpr double kHermitianTol = 1e-12;

double one_norm(const ComplexMatrix& m) {
    double best = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < m.rows(); ++i) sum += std::abs(m(i, j));
        best = std::max(best, sum);
    }
    return best;
}

double inf_norm(const ComplexMatrix& m) {
    double best = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) sum += std::abs(m(i, j));
        best = std::max(best, sum);
    }
    return best;
}

double frobenius_norm(const ComplexMatrix& m) {
    double sum = 0.0;
    for (const auto& z : m.entries()) sum += std::norm(z);
    return std::sqrt(sum);
}

double spectral_norm(const detail::EigenMatrix& m) {
    Eigen::JacobiSVD<detail::EigenMatrix> svd(m);
    return svd.singularValues()(0);
}

// M L^{-*} for lower-triangular L.
detail::EigenMatrix right_unweight(const ComplexMatrix& m, const ComplexMatrix& chol) {
    const detail::EigenMatrix l = detail::to_eigen(chol);
    return l.triangularView<Eigen::Lower>().solve(detail::to_eigen(m).adjoint()).adjoint();
}

NormKind solve_stein(std::span<const ComplexMatrix> cs) {
    if (cs.empty()) throw ShapeError("Stein equation needs at least one matrix");
    const std::size_t n = cs.front().rows();
    for (const auto& c : cs)
        if (!c.is_square() || c.rows() != n)
            throw ShapeError("Stein equation needs square matrices of one size");

    // Column-major vec(P): entry (i, j) sits at i + j n. The coefficient of
    // P(k, l) in (C* P C)(i, j) is conj(C(k, i)) C(l, j).
    const std::size_t nn = n * n;
    ComplexMatrix system = ComplexMatrix::identity(nn);
    ComplexMatrix rhs(nn, 1);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t row = i + j * n;
            if (i == j) rhs(row, 0) = 1.0;
            for (const auto& c : cs)
                for (std::size_t l = 0; l < n; ++l)
                    for (std::size_t k = 0; k < n; ++k)
                        system(row, k + l * n) -= std::conj(c(k, i)) * c(l, j);
        }

    ComplexMatrix vec_p(nn, 1);
    try {
        vec_p = solve_left(system, rhs);
    } catch (const SingularMatrixError& e) {
        throw NoContractingNormError(std::string("Stein system is singular: ") + e.what());
    }

    ComplexMatrix p(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) p(i, j) = vec_p(i + j * n, 0);
    p = 0.5 * (p + p.adjoint());

    std::optional<NormKind> kind;
    try {
        kind = NormKind::lyapunov(p);
    } catch (const std::invalid_argument& e) {
        throw NoContractingNormError(std::string("Stein solution is not a valid weight: ") +
                                     e.what());
    }
    for (const auto& c : cs)
        if (!(norm_value(c, *kind) < 1.0))
            throw NoContractingNormError("Stein solution does not contract every matrix");
    return *kind;
}

}  // namespace

NormKind NormKind::lyapunov(ComplexMatrix weight) {
    if (!weight.is_square()) throw std::invalid_argument("Lyapunov weight must be square");
    const double tol = kHermitianTol * std::max(1.0, weight.max_abs());
    if (frobenius_distance(weight, weight.adjoint()) > tol)
        throw std::invalid_argument("Lyapunov weight must be Hermitian");
    Eigen::LLT<detail::EigenMatrix> llt(detail::to_eigen(weight));
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("Lyapunov weight must be positive definite");
    NormKind out(NormTag::LyapunovScaled);
    out.chol_ = detail::from_eigen(llt.matrixL());
    out.weight_ = std::move(weight);
    return out;
}

const ComplexMatrix& NormKind::weight() const {
    if (!weight_) throw std::logic_error(name() + " norm has no weight");
    return *weight_;
}

const ComplexMatrix& NormKind::cholesky_factor() const {
    if (!chol_) throw std::logic_error(name() + " norm has no weight");
    return *chol_;
}

std::string NormKind::name() const {
    switch (tag_) {
        case NormTag::One: return "one";
        case NormTag::Inf: return "inf";
        case NormTag::Frobenius: return "fro";
        case NormTag::LyapunovScaled: return "lyapunov";
    }
    return "?";
}

NormKind builtin_norm(NormTag tag) {
    switch (tag) {
        case NormTag::One: return NormKind::one();
        case NormTag::Inf: return NormKind::inf();
        case NormTag::Frobenius: return NormKind::frobenius();
        case NormTag::LyapunovScaled: break;
    }
    throw std::invalid_argument("Lyapunov norm is not a built-in norm");
}

double norm_value(const ComplexMatrix& m, const NormKind& kind) {
    switch (kind.tag()) {
        case NormTag::One: return one_norm(m);
        case NormTag::Inf: return inf_norm(m);
        case NormTag::Frobenius: return frobenius_norm(m);
        case NormTag::LyapunovScaled: {
            const auto& l = kind.cholesky_factor();
            if (!m.is_square() || m.rows() != l.rows())
                throw ShapeError("Lyapunov norm: matrix does not conform to weight");
            // ||M||_P = ||L* M L^{-*}||_2
            const detail::EigenMatrix lstar = detail::to_eigen(l).adjoint();
            return spectral_norm(lstar * right_unweight(m, l));
        }
    }
    return 0.0;
}

double row_block_norm(const ComplexMatrix& m, const NormKind& kind) {
    if (!kind.is_lyapunov()) return norm_value(m, kind);
    const auto& l = kind.cholesky_factor();
    if (m.cols() != l.rows()) throw ShapeError("Lyapunov row-block norm: column count mismatch");
    return spectral_norm(right_unweight(m, l));
}

ContractionCertificate::ContractionCertificate(NormKind norm, double rate, CertificateKind kind,
                                               std::size_t power)
    : norm_(std::move(norm)), rate_(rate), kind_(kind), power_(power) {
    if (!(rate >= 0.0 && rate < 1.0)) {
        std::ostringstream os;
        os << "contraction rate must lie in [0, 1), got " << rate;
        throw InvalidCertificateError(os.str());
    }
    if (power == 0) throw InvalidCertificateError("Gelfand power must be positive");
    if (kind != CertificateKind::GelfandPower && power != 1)
        throw InvalidCertificateError("only Gelfand certificates carry a power");
}

std::string ContractionCertificate::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
        case CertificateKind::Declared: os << "declared"; break;
        case CertificateKind::GelfandPower: os << "gelfand-power k=" << power_; break;
        case CertificateKind::Lyapunov: os << "lyapunov"; break;
    }
    os << " norm=" << norm_.name() << " rate=" << rate_;
    return os.str();
}

NormKind lyapunov_scaling(const ComplexMatrix& c) {
    return solve_stein(std::span<const ComplexMatrix>(&c, 1));
}

NormKind common_lyapunov_scaling(std::span<const ComplexMatrix> cs) { return solve_stein(cs); }

double stein_residual(const ComplexMatrix& weight, std::span<const ComplexMatrix> cs) {
    ComplexMatrix r = weight - ComplexMatrix::identity(weight.rows());
    for (const auto& c : cs) r -= matmul(c.adjoint(), matmul(weight, c));
    return frobenius_norm(r);
}

std::optional<ContractionCertificate> spectral_certificate(const ComplexMatrix& c,
                                                           std::size_t k_max) {
    if (!c.is_square()) throw ShapeError("spectral_certificate: matrix is not square");
    if (k_max == 0) throw std::invalid_argument("spectral_certificate: k_max must be positive");

    ComplexMatrix power = c;
    for (std::size_t k = 1; k <= k_max; ++k) {
        if (k > 1) {
            try {
                power = matmul(power, c);
            } catch (const NonFiniteError&) {
                break;
            }
        }
        for (NormTag tag : kBuiltinNorms) {
            const NormKind norm = builtin_norm(tag);
            const double value = norm_value(power, norm);
            if (value < 1.0) {
                const double rate = std::pow(value, 1.0 / static_cast<double>(k));
                if (!(rate < 1.0)) continue;
                return ContractionCertificate(norm, rate, CertificateKind::GelfandPower, k);
            }
        }
    }

    try {
        NormKind norm = lyapunov_scaling(c);
        const double rate = norm_value(c, norm);
        return ContractionCertificate(std::move(norm), rate, CertificateKind::Lyapunov);
    } catch (const NoContractingNormError&) {
        return std::nullopt;
    }
}

}  // namespace infprod
