#include "infprod/block_form.hpp"

#include <string>

#include "infprod/errors.hpp"

namespace infprod {

BlockUpperTriangular::BlockUpperTriangular(std::size_t s, ComplexMatrix b, ComplexMatrix c)
    : s_(s), b_(std::move(b)), c_(std::move(c)) {
    if (s_ == 0) throw ShapeError("identity block order s must be at least 1");
    if (!c_.is_square()) throw ShapeError("C block must be square");
    if (b_.rows() != s_ || b_.cols() != c_.rows())
        throw ShapeError("B block must be s x (d - s) = " + std::to_string(s_) + "x" +
                         std::to_string(c_.rows()));
}

BlockUpperTriangular::BlockUpperTriangular(ComplexMatrix b, ComplexMatrix c)
    : BlockUpperTriangular(b.rows(), std::move(b), std::move(c)) {}

ComplexMatrix to_dense(const BlockUpperTriangular& a) {
    ComplexMatrix out(a.d(), a.d());
    for (std::size_t i = 0; i < a.s(); ++i) out(i, i) = 1.0;
    out.set_block(0, a.s(), a.b());
    out.set_block(a.s(), a.s(), a.c());
    return out;
}

BlockUpperTriangular from_dense(const ComplexMatrix& m, std::size_t s) {
    if (!m.is_square() || s == 0 || s >= m.rows())
        throw ShapeError("from_dense: need a square matrix with 1 <= s < d");
    const std::size_t d = m.rows();
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j)
            if (m(i, j) != Complex(i == j ? 1.0 : 0.0))
                throw ShapeError("from_dense: top-left block is not the identity");
    for (std::size_t i = s; i < d; ++i)
        for (std::size_t j = 0; j < s; ++j)
            if (m(i, j) != Complex{}) throw ShapeError("from_dense: bottom-left block is not zero");
    return {s, m.block(0, s, s, d - s), m.block(s, s, d - s, d - s)};
}

BlockUpperTriangular block_mul(const BlockUpperTriangular& a1, const BlockUpperTriangular& a2) {
    if (!a1.conforms_to(a2)) throw ShapeError("block_mul: block shapes differ");
    return {a1.s(), a2.b() + matmul(a1.b(), a2.c()), matmul(a1.c(), a2.c())};
}

BlockUpperTriangular pad_to_balanced(const BlockUpperTriangular& a) {
    const std::size_t s = a.s();
    const std::size_t m = a.tail();
    if (s == m) return a;
    if (s > m) {
        ComplexMatrix b(s, s);
        b.set_block(0, 0, a.b());
        ComplexMatrix c(s, s);
        c.set_block(0, 0, a.c());
        return {s, std::move(b), std::move(c)};
    }
    ComplexMatrix b(m, m);
    b.set_block(0, 0, a.b());
    return {m, std::move(b), a.c()};
}

}  // namespace infprod
