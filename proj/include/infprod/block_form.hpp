#pragma once

#include <cstddef>

#include "infprod/matrix.hpp"

namespace infprod {

/// A d x d matrix of the form [[I_s, B], [0, C]] stored as (s, B, C).
///
/// The identity block is implicit. Requires s >= 1, C square with at least
/// one row, and B of shape s x C.rows(). Whether C contracts is a separate
/// question, answered by a ContractionCertificate.
class BlockUpperTriangular {
public:
    BlockUpperTriangular(std::size_t s, ComplexMatrix b, ComplexMatrix c);

    /// Shape is inferred from b.
    BlockUpperTriangular(ComplexMatrix b, ComplexMatrix c);

    std::size_t s() const noexcept { return s_; }
    /// Size of the C block, d - s.
    std::size_t tail() const noexcept { return c_.rows(); }
    std::size_t d() const noexcept { return s_ + c_.rows(); }

    const ComplexMatrix& b() const noexcept { return b_; }
    const ComplexMatrix& c() const noexcept { return c_; }

    bool conforms_to(const BlockUpperTriangular& other) const noexcept {
        return s_ == other.s_ && tail() == other.tail();
    }

    friend bool operator==(const BlockUpperTriangular&, const BlockUpperTriangular&) = default;

private:
    std::size_t s_;
    ComplexMatrix b_;
    ComplexMatrix c_;
};

ComplexMatrix to_dense(const BlockUpperTriangular& a);

/// Recovers (s, B, C) from a dense matrix. Throws ShapeError unless the
/// top-left s x s block is exactly I and the bottom-left block exactly 0.
BlockUpperTriangular from_dense(const ComplexMatrix& m, std::size_t s);

/// a1 * a2 = [[I, B2 + B1 C2], [0, C1 C2]].
BlockUpperTriangular block_mul(const BlockUpperTriangular& a1, const BlockUpperTriangular& a2);

/// Pads with zero blocks so that the identity block and the C block have the
/// same order max(s, d - s):
///   s >= d - s:  B~ = [B | 0],  C~ = [[C, 0], [0, 0]]
///   s <  d - s:  B~ = [B ; 0],  C~ = C
/// Balanced input is returned unchanged.
BlockUpperTriangular pad_to_balanced(const BlockUpperTriangular& a);

}  // namespace infprod
