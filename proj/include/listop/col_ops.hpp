// Random column operations: retained-column subcodes (with or without
// replacement) and the expected ball load that drives the subcode
// list-decodability argument.
#pragma once

#include "listop/code_matrix.hpp"
#include "listop/oracles.hpp"
#include "listop/rng.hpp"
#include "listop/row_ops.hpp"  // Replacement

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace listop {

/// A replayable subcode draw: the retained column indices, in draw order.
struct SubcodeDraw {
    Rational p{0};        // retention parameter (N/N0 when N was explicit)
    std::uint32_t N = 0;  // number of retained columns
    Replacement replacement = Replacement::with_replacement;
    std::uint64_t seed = 0;
    std::vector<std::uint32_t> retained;

    bool operator==(const SubcodeDraw&) const = default;
};

/// Target size of a subcode draw: either a retention probability p
/// (N = max(1, round(p*N0)), ties rounding up) or an explicit count.
struct SubcodeSize {
    std::optional<Rational> p;
    std::optional<std::uint32_t> count;

    static SubcodeSize retention(const Rational& p) {
        SubcodeSize s;
        s.p = p;
        return s;
    }
    static SubcodeSize exact(std::uint32_t n) {
        SubcodeSize s;
        s.count = n;
        return s;
    }
};

/// The retention probability 1 / (q^{eps*n} * L0) at which a random subcode
/// of a code with ball counts below L0 stays list-decodable with lists of
/// size 3/eps.  Requires eps*n integral so the value stays rational.
inline Rational retention_rate(std::uint64_t q, const Rational& eps, std::uint32_t n,
                                      std::uint32_t l0) {
    if (l0 == 0) throw input_error("retention_rate: L0 must be positive");
    if (eps < Rational(0)) throw input_error("retention_rate: eps must be nonnegative");
    const Rational en = eps * Rational(n);
    if (en.denominator() != 1)
        throw input_error("retention_rate: eps*n must be an integer exponent");
    const std::uint64_t power = checked_pow(q, static_cast<std::uint32_t>(en.numerator()));
    if (power > std::numeric_limits<std::int64_t>::max() / l0)
        throw input_error("retention_rate: denominator overflows");
    return Rational(1, static_cast<std::int64_t>(power * l0));
}

/// Draw a random subcode.  With replacement the indices are i.i.d. uniform;
/// without replacement they are the first N entries of a uniform permutation
/// (so N = N0 yields a permutation of the code).  The retained sequence
/// orders the columns of the result.
inline std::pair<CodeMatrix, SubcodeDraw> draw_subcode(const CodeMatrix& c0,
                                                       const SubcodeSize& size,
                                                       Replacement replacement,
                                                       std::uint64_t seed) {
    const std::uint32_t n0_cols = c0.size();
    SubcodeDraw d;
    d.replacement = replacement;
    d.seed = seed;

    if (size.p.has_value() == size.count.has_value())
        throw input_error("draw_subcode: specify exactly one of p and N");
    if (size.p) {
        if (*size.p < Rational(0)) throw input_error("draw_subcode: p must be nonnegative");
        d.p = *size.p;
        // round(p*N0) to nearest, ties up: floor(p*N0 + 1/2).
        const Rational target = d.p * Rational(n0_cols) + Rational(1, 2);
        const std::int64_t rounded = rational_floor(target);
        d.N = rounded < 1 ? 1u : static_cast<std::uint32_t>(rounded);
    } else {
        d.N = *size.count;
        if (d.N == 0) throw input_error("draw_subcode: N must be positive");
        d.p = Rational(d.N, n0_cols);
    }
    if (replacement == Replacement::without_replacement && d.N > n0_cols)
        throw input_error("draw_subcode: cannot retain " + std::to_string(d.N) +
                          " distinct columns from " + std::to_string(n0_cols));

    Rng rng(seed);
    d.retained.reserve(d.N);
    if (replacement == Replacement::with_replacement) {
        for (std::uint32_t i = 0; i < d.N; ++i)
            d.retained.push_back(static_cast<std::uint32_t>(rng.below(n0_cols)));
    } else {
        auto perm = rng.permutation(n0_cols);
        d.retained.assign(perm.begin(), perm.begin() + d.N);
    }

    CodeMatrix sub(c0.q(), c0.length(), d.N);
    for (std::uint32_t j = 0; j < d.N; ++j) {
        auto col = c0.column(d.retained[j]);
        for (std::uint32_t i = 0; i < c0.length(); ++i) sub.set_raw(i, j, col[i]);
    }
    return {std::move(sub), std::move(d)};
}

/// Number of distinct column values.
inline std::uint64_t distinct_count(const CodeMatrix& c) { return c.distinct_count(); }

/// Expected number of retained codewords (at retention p) inside the ball of
/// relative radius rho around z: p * |B(z, floor(rho*n)) ∩ C0|, exact.
inline Rational expected_ball_load(const CodeMatrix& c0, std::span<const Symbol> z,
                                   const Rational& rho, const Rational& p) {
    if (z.size() != c0.length())
        throw input_error("expected_ball_load: center length mismatch");
    for (Symbol s : z)
        if (s >= c0.q()) throw input_error("expected_ball_load: center symbol out of range");
    if (rho < Rational(0) || rho > Rational(1))
        throw input_error("expected_ball_load: rho must lie in [0,1]");
    if (p < Rational(0)) throw input_error("expected_ball_load: p must be nonnegative");
    const std::uint32_t radius = detail::absolute_radius(rho, c0.length());
    std::uint32_t count = 0;
    for (std::uint32_t j = 0; j < c0.size(); ++j)
        if (hamming_distance(c0.column(j), z) <= radius) ++count;
    return p * Rational(count);
}

inline Rational expected_ball_load(const CodeMatrix& c0, const std::vector<Symbol>& z,
                                   const Rational& rho, const Rational& p) {
    return expected_ball_load(c0, std::span<const Symbol>(z), rho, p);
}

}  // namespace listop
