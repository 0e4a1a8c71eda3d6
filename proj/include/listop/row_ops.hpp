// Random row operations on code matrices: coordinate sampling, puncturing,
// t-wise XOR / inner products, t-wise aggregation, t-wise folding, and
// hash-based alphabet reduction; plus the exact per-row collision/agreement
// probabilities and the resulting pairwise-distance and injectivity bounds.
//
// Exact hypergeometric formulas are the source of truth; the with-replacement
// approximations used in closed-form analyses are exposed side by side.
// Probabilities are arbitrary-precision rationals (binomial coefficients such
// as C(128,16) overflow 64-bit numerators).
#pragma once

#include "listop/code_matrix.hpp"
#include "listop/rng.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace listop {

enum class RowOpKind { sampling, puncturing, xor_t, aggregate_t, fold_t, hash_reduce };
enum class Replacement { with_replacement, without_replacement };

inline std::string row_op_kind_name(RowOpKind k) {
    switch (k) {
        case RowOpKind::sampling: return "sampling";
        case RowOpKind::puncturing: return "puncturing";
        case RowOpKind::xor_t: return "xor_t";
        case RowOpKind::aggregate_t: return "aggregate_t";
        case RowOpKind::fold_t: return "fold_t";
        case RowOpKind::hash_reduce: return "hash_reduce";
    }
    throw input_error("unknown row-op kind");
}

inline RowOpKind row_op_kind_from_name(const std::string& s) {
    if (s == "sampling") return RowOpKind::sampling;
    if (s == "puncturing") return RowOpKind::puncturing;
    if (s == "xor_t") return RowOpKind::xor_t;
    if (s == "aggregate_t") return RowOpKind::aggregate_t;
    if (s == "fold_t") return RowOpKind::fold_t;
    if (s == "hash_reduce") return RowOpKind::hash_reduce;
    throw input_error("unknown row-op kind: " + s);
}

/// One output row: either an inner product with a coefficient vector over a
/// prime field, or an aggregation of a set of coordinates into one
/// product-alphabet symbol.
struct BasicRowOp {
    enum class Kind { inner_product, aggregate };
    Kind kind = Kind::aggregate;
    std::vector<Symbol> v;           // inner_product: length n0, entries in [0,q)
    std::vector<std::uint32_t> S;    // aggregate: distinct ascending indices in [0,n0)

    bool operator==(const BasicRowOp&) const = default;
};

/// One output coordinate of a hash-based alphabet reduction:
/// h(x) = <m, digits(x)> + b over the prime base field.
struct HashCoordOp {
    std::vector<Symbol> m;  // length k over [0, base)
    Symbol b = 0;

    bool operator==(const HashCoordOp&) const = default;
};

struct RowOpParams {
    RowOpKind kind = RowOpKind::sampling;
    std::uint32_t n0 = 0;  // source length
    std::uint32_t n = 0;   // output length (hash_reduce forces n = n0)
    std::uint32_t t = 1;   // arity of xor/aggregate/fold
    std::uint64_t q = 2;   // source alphabet size
    std::uint64_t hash_base = 2;  // hash_reduce target field (prime)
};

/// A fully materialized draw: replayable and serializable without
/// re-deriving anything from the seed.
struct RowOpTuple {
    RowOpKind source_kind = RowOpKind::sampling;
    Replacement replacement = Replacement::with_replacement;
    std::uint64_t seed = 0;
    std::uint32_t n0 = 0;
    std::uint32_t t = 1;
    std::uint64_t q = 2;          // source alphabet size
    std::uint64_t hash_base = 2;  // hash_reduce only
    std::uint32_t hash_k = 1;     // hash_reduce only: q == hash_base^hash_k
    std::vector<BasicRowOp> ops;        // all kinds except hash_reduce
    std::vector<HashCoordOp> hash_ops;  // hash_reduce only

    std::uint32_t n() const {
        return static_cast<std::uint32_t>(source_kind == RowOpKind::hash_reduce
                                              ? hash_ops.size()
                                              : ops.size());
    }
    bool operator==(const RowOpTuple&) const = default;
};

namespace detail {

/// k with base^k == q, or error.
inline std::uint32_t tuple_length_for(std::uint64_t q, std::uint64_t base) {
    if (base < 2) throw input_error("hash_reduce: base must be at least 2");
    std::uint32_t k = 0;
    std::uint64_t acc = 1;
    while (acc < q) {
        if (acc > std::numeric_limits<std::uint64_t>::max() / base) {
            acc = 0;
            break;
        }
        acc *= base;
        ++k;
    }
    if (acc != q)
        throw input_error("hash_reduce: source alphabet " + std::to_string(q) +
                          " is not a power of the base field " + std::to_string(base));
    if (k == 0) throw input_error("hash_reduce: source alphabet must exceed 1 symbol");
    return k;
}

}  // namespace detail

/// Draw a replayable row-operation tuple from the distribution selected by
/// params.kind:
///   sampling     n i.i.d. uniform single coordinates (with replacement)
///   puncturing   the first n entries of a uniform permutation (distinct)
///   xor_t        n i.i.d. uniform weight-t coefficient vectors (prime q;
///                support a uniform t-subset, values uniform in [1,q))
///   aggregate_t  n i.i.d. uniform t-subsets
///   fold_t       a uniform partition of [0,n0) into n=n0/t blocks of size t
///   hash_reduce  n0 i.i.d. uniform (m,b) hash coefficients
inline RowOpTuple draw_row_operation(const RowOpParams& p, std::uint64_t seed) {
    if (p.n0 == 0) throw input_error("draw_row_operation: n0 must be positive");
    if (p.q < 2) throw input_error("draw_row_operation: q must be at least 2");

    RowOpTuple f;
    f.source_kind = p.kind;
    f.seed = seed;
    f.n0 = p.n0;
    f.t = p.t;
    f.q = p.q;
    Rng rng(seed);

    switch (p.kind) {
        case RowOpKind::sampling: {
            if (p.n == 0) throw input_error("sampling: n must be positive");
            f.t = 1;
            f.replacement = Replacement::with_replacement;
            f.ops.reserve(p.n);
            for (std::uint32_t i = 0; i < p.n; ++i) {
                BasicRowOp op;
                op.kind = BasicRowOp::Kind::aggregate;
                op.S = {static_cast<std::uint32_t>(rng.below(p.n0))};
                f.ops.push_back(std::move(op));
            }
            return f;
        }
        case RowOpKind::puncturing: {
            if (p.n == 0 || p.n > p.n0)
                throw input_error("puncturing: need 1 <= n <= n0");
            f.t = 1;
            f.replacement = Replacement::without_replacement;
            auto perm = rng.permutation(p.n0);
            f.ops.reserve(p.n);
            for (std::uint32_t i = 0; i < p.n; ++i) {
                BasicRowOp op;
                op.kind = BasicRowOp::Kind::aggregate;
                op.S = {perm[i]};
                f.ops.push_back(std::move(op));
            }
            return f;
        }
        case RowOpKind::xor_t: {
            if (p.n == 0) throw input_error("xor_t: n must be positive");
            if (p.t == 0 || p.t > p.n0) throw input_error("xor_t: need 1 <= t <= n0");
            if (!is_prime(p.q))
                throw input_error("xor_t: inner products require a prime alphabet, got q=" +
                                  std::to_string(p.q));
            f.replacement = Replacement::with_replacement;
            f.ops.reserve(p.n);
            for (std::uint32_t i = 0; i < p.n; ++i) {
                BasicRowOp op;
                op.kind = BasicRowOp::Kind::inner_product;
                op.v.assign(p.n0, 0);
                for (std::uint32_t pos : rng.subset(p.n0, p.t))
                    op.v[pos] = p.q == 2 ? 1 : 1 + rng.below(p.q - 1);
                f.ops.push_back(std::move(op));
            }
            return f;
        }
        case RowOpKind::aggregate_t: {
            if (p.n == 0) throw input_error("aggregate_t: n must be positive");
            if (p.t == 0 || p.t > p.n0) throw input_error("aggregate_t: need 1 <= t <= n0");
            f.replacement = Replacement::with_replacement;
            f.ops.reserve(p.n);
            for (std::uint32_t i = 0; i < p.n; ++i) {
                BasicRowOp op;
                op.kind = BasicRowOp::Kind::aggregate;
                op.S = rng.subset(p.n0, p.t);
                f.ops.push_back(std::move(op));
            }
            return f;
        }
        case RowOpKind::fold_t: {
            if (p.t == 0 || p.n0 % p.t != 0)
                throw input_error("fold_t: t must divide n0 (t=" + std::to_string(p.t) +
                                  ", n0=" + std::to_string(p.n0) + ")");
            const std::uint32_t blocks = p.n0 / p.t;
            if (p.n != 0 && p.n != blocks)
                throw input_error("fold_t: n must equal n0/t");
            f.replacement = Replacement::without_replacement;
            auto perm = rng.permutation(p.n0);
            f.ops.reserve(blocks);
            for (std::uint32_t i = 0; i < blocks; ++i) {
                BasicRowOp op;
                op.kind = BasicRowOp::Kind::aggregate;
                op.S.assign(perm.begin() + static_cast<std::size_t>(i) * p.t,
                            perm.begin() + static_cast<std::size_t>(i + 1) * p.t);
                std::sort(op.S.begin(), op.S.end());
                f.ops.push_back(std::move(op));
            }
            return f;
        }
        case RowOpKind::hash_reduce: {
            if (p.n != 0 && p.n != p.n0)
                throw input_error("hash_reduce: output length equals n0");
            if (!is_prime(p.hash_base))
                throw input_error("hash_reduce: base field must be prime, got " +
                                  std::to_string(p.hash_base));
            f.hash_base = p.hash_base;
            f.hash_k = detail::tuple_length_for(p.q, p.hash_base);
            f.t = 1;
            f.replacement = Replacement::with_replacement;
            f.hash_ops.reserve(p.n0);
            for (std::uint32_t i = 0; i < p.n0; ++i) {
                HashCoordOp h;
                h.m.resize(f.hash_k);
                for (auto& mv : h.m) mv = rng.below(p.hash_base);
                h.b = rng.below(p.hash_base);
                f.hash_ops.push_back(std::move(h));
            }
            return f;
        }
    }
    throw input_error("draw_row_operation: unknown kind");
}

namespace detail {

/// Big-endian base-q digits of x, length k (most significant first).
inline void unpack_digits(Symbol x, std::uint64_t base, std::uint32_t k,
                          std::vector<Symbol>& out) {
    out.assign(k, 0);
    for (std::uint32_t i = k; i > 0; --i) {
        out[i - 1] = x % base;
        x /= base;
    }
}

}  // namespace detail

/// Apply a drawn tuple to a source matrix.  Aggregate rows emit symbols in
/// the product alphabet q^t (base-q digits of the selected coordinates,
/// big-endian over the stored ascending index order); inner-product rows stay
/// over F_q; hash rows map to the prime base field.  Column identity is
/// preserved: output column j transforms source column j.
inline CodeMatrix apply_row_op(const CodeMatrix& c0, const RowOpTuple& f) {
    if (c0.q() != f.q)
        throw input_error("apply_row_op: tuple drawn for q=" + std::to_string(f.q) +
                          " applied to code over q=" + std::to_string(c0.q()));
    if (c0.length() != f.n0)
        throw input_error("apply_row_op: tuple drawn for n0=" + std::to_string(f.n0) +
                          " applied to code of length " + std::to_string(c0.length()));

    const std::uint32_t N = c0.size();

    if (f.source_kind == RowOpKind::hash_reduce) {
        const std::uint32_t n = f.n();
        if (n != c0.length()) throw input_error("apply_row_op: hash tuple length mismatch");
        if (checked_pow(f.hash_base, f.hash_k) != f.q)
            throw input_error("apply_row_op: hash base/k inconsistent with alphabet");
        CodeMatrix out(f.hash_base, n, N);
        std::vector<Symbol> digits;
        for (std::uint32_t j = 0; j < N; ++j)
            for (std::uint32_t i = 0; i < n; ++i) {
                const auto& h = f.hash_ops[i];
                if (h.m.size() != f.hash_k)
                    throw input_error("apply_row_op: hash coefficient length mismatch");
                detail::unpack_digits(c0.at(i, j), f.hash_base, f.hash_k, digits);
                Symbol acc = h.b % f.hash_base;
                for (std::uint32_t d = 0; d < f.hash_k; ++d)
                    acc = (acc + h.m[d] % f.hash_base * digits[d]) % f.hash_base;
                out.set_raw(i, j, acc);
            }
        return out;
    }

    if (f.ops.empty()) throw input_error("apply_row_op: empty operation tuple");
    const std::uint32_t n = static_cast<std::uint32_t>(f.ops.size());
    const bool ip = f.ops.front().kind == BasicRowOp::Kind::inner_product;
    for (const auto& op : f.ops) {
        if ((op.kind == BasicRowOp::Kind::inner_product) != ip)
            throw input_error("apply_row_op: mixed op kinds in one tuple");
        if (ip) {
            if (op.v.size() != c0.length())
                throw input_error("apply_row_op: coefficient vector length mismatch");
        } else {
            if (op.S.empty() || op.S.size() != f.ops.front().S.size())
                throw input_error("apply_row_op: aggregate sets must share one size");
            for (std::size_t s = 0; s < op.S.size(); ++s) {
                if (op.S[s] >= c0.length())
                    throw input_error("apply_row_op: aggregate index out of range");
                if (s > 0 && op.S[s] <= op.S[s - 1])
                    throw input_error("apply_row_op: aggregate indices must ascend");
            }
        }
    }

    if (ip) {
        if (!is_prime(c0.q()))
            throw input_error("apply_row_op: inner products require a prime alphabet");
        CodeMatrix out(c0.q(), n, N);
        for (std::uint32_t j = 0; j < N; ++j) {
            auto col = c0.column(j);
            for (std::uint32_t i = 0; i < n; ++i) {
                const auto& v = f.ops[i].v;
                Symbol acc = 0;
                for (std::uint32_t r = 0; r < c0.length(); ++r)
                    if (v[r] != 0) acc = (acc + v[r] * col[r]) % c0.q();
                out.set_raw(i, j, acc);
            }
        }
        return out;
    }

    const std::uint32_t t = static_cast<std::uint32_t>(f.ops.front().S.size());
    CodeMatrix out(checked_pow(c0.q(), t), n, N);
    for (std::uint32_t j = 0; j < N; ++j) {
        auto col = c0.column(j);
        for (std::uint32_t i = 0; i < n; ++i) {
            Symbol acc = 0;
            for (std::uint32_t idx : f.ops[i].S) acc = acc * c0.q() + col[idx];
            out.set_raw(i, j, acc);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exact per-row probabilities (hypergeometric forms) and the with-replacement
// approximations they are usually replaced with in closed-form analyses.
// ---------------------------------------------------------------------------

/// Pr over a uniform weight-t binary vector v that <v,x> is odd, for a fixed
/// x of weight w: sum over odd j of C(w,j) C(n0-w, t-j) / C(n0, t).
inline BigRational xor_parity_probability(std::uint32_t n0, std::uint32_t w, std::uint32_t t) {
    if (w > n0) throw input_error("xor_parity_probability: w must not exceed n0");
    if (t == 0 || t > n0) throw input_error("xor_parity_probability: need 1 <= t <= n0");
    BigInt odd = 0;
    for (std::uint32_t j = 1; j <= std::min(w, t); j += 2)
        odd += binomial(w, j) * binomial(n0 - w, t - j);
    return BigRational(odd, binomial(n0, t));
}

/// Pr over a uniform weight-t vector with i.i.d. uniform nonzero values (prime
/// q) that <v,x> = 0 for a fixed x of weight w.  Conditioned on the support
/// hitting j nonzero coordinates of x, the inner product is a sum of j
/// i.i.d. uniform nonzero field elements; p_j = Pr[sum = 0] satisfies
/// p_0 = 1, p_j = (1 - p_{j-1})/(q-1).  At q = 2 this reduces to the parity
/// complement.
inline BigRational inner_product_collision_probability(std::uint64_t q, std::uint32_t n0,
                                                       std::uint32_t w, std::uint32_t t) {
    if (!is_prime(q)) throw input_error("inner_product_collision_probability: q must be prime");
    if (w > n0) throw input_error("inner_product_collision_probability: w must not exceed n0");
    if (t == 0 || t > n0)
        throw input_error("inner_product_collision_probability: need 1 <= t <= n0");
    std::vector<BigRational> pj(std::min(w, t) + 1);
    pj[0] = 1;
    for (std::size_t j = 1; j < pj.size(); ++j)
        pj[j] = (BigRational(1) - pj[j - 1]) / BigRational(q - 1);
    BigRational total = 0;
    for (std::uint32_t j = 0; j <= std::min(w, t); ++j)
        total += BigRational(binomial(w, j) * binomial(n0 - w, t - j)) * pj[j];
    return total / BigRational(binomial(n0, t));
}

/// Pr a uniform size-t subset avoids a weight-w support: C(n0-w,t)/C(n0,t)
/// (the probability that one aggregated row *agrees* on a pair at distance w).
inline BigRational aggregation_agreement_probability(std::uint32_t n0, std::uint32_t w,
                                                     std::uint32_t t) {
    if (w > n0) throw input_error("aggregation_agreement_probability: w must not exceed n0");
    if (t == 0 || t > n0)
        throw input_error("aggregation_agreement_probability: need 1 <= t <= n0");
    return BigRational(binomial(n0 - w, t), binomial(n0, t));
}

/// With-replacement approximation of the XOR difference probability:
/// (1/2)(1 - (1-delta0)^t).
inline BigRational xor_difference_approximation(const BigRational& delta0, std::uint32_t t) {
    BigRational keep = 1;
    BigRational base = BigRational(1) - delta0;
    for (std::uint32_t i = 0; i < t; ++i) keep *= base;
    return (BigRational(1) - keep) / 2;
}

/// With-replacement approximation of the aggregation agreement probability:
/// (1 - delta0)^t.
inline BigRational aggregation_agreement_approximation(const BigRational& delta0,
                                                       std::uint32_t t) {
    BigRational keep = 1;
    BigRational base = BigRational(1) - delta0;
    for (std::uint32_t i = 0; i < t; ++i) keep *= base;
    return keep;
}

struct PairwiseDistanceSummary {
    BigRational min_expected;
    BigRational mean_expected;
    BigRational max_expected;
    std::uint64_t pairs = 0;  // unordered pairs of distinct column values
};

/// Exact expected relative distance of the transformed pair, per unordered
/// pair of *distinct* column values, summarized over all such pairs.
/// Each output row is marginally identical (folding shares the aggregation
/// marginal), so the expected relative distance equals the per-row
/// difference probability.
inline PairwiseDistanceSummary expected_pairwise_distance(const CodeMatrix& c0, RowOpKind kind,
                                                          std::uint32_t t,
                                                          std::uint64_t hash_base = 2) {
    const std::uint32_t n0 = c0.length();
    const std::uint32_t N = c0.size();

    // Per-row difference probability as a function of the pair's absolute
    // distance w, cached across pairs.
    std::vector<std::optional<BigRational>> by_w(n0 + 1);
    const auto row_diff = [&](std::uint32_t w) -> const BigRational& {
        auto& slot = by_w[w];
        if (!slot) {
            switch (kind) {
                case RowOpKind::xor_t:
                    slot = BigRational(1) -
                           inner_product_collision_probability(c0.q(), n0, w, t);
                    break;
                case RowOpKind::aggregate_t:
                case RowOpKind::fold_t:
                    slot = BigRational(1) - aggregation_agreement_probability(n0, w, t);
                    break;
                case RowOpKind::hash_reduce: {
                    std::uint32_t k = detail::tuple_length_for(c0.q(), hash_base);
                    (void)k;
                    if (!is_prime(hash_base))
                        throw input_error("expected_pairwise_distance: hash base must be prime");
                    // delta0 * (1 - 1/base): differing coordinates collide
                    // with probability exactly 1/base each.
                    slot = BigRational(w, n0) *
                           (BigRational(1) - BigRational(1, hash_base));
                    break;
                }
                default:
                    throw input_error(
                        "expected_pairwise_distance: kind must be xor_t, aggregate_t, fold_t "
                        "or hash_reduce");
            }
        }
        return *slot;
    };

    PairwiseDistanceSummary s;
    bool first = true;
    BigRational total = 0;
    for (std::uint32_t i = 0; i < N; ++i)
        for (std::uint32_t j = i + 1; j < N; ++j) {
            std::uint32_t w = hamming_distance(c0.column(i), c0.column(j));
            if (w == 0) continue;  // identical columns are the same codeword
            const BigRational& d = row_diff(w);
            if (first || d < s.min_expected) s.min_expected = d;
            if (first || d > s.max_expected) s.max_expected = d;
            first = false;
            total += d;
            ++s.pairs;
        }
    if (s.pairs == 0)
        throw input_error("expected_pairwise_distance: fewer than two distinct codewords");
    s.mean_expected = total / BigRational(s.pairs);
    return s;
}

struct InjectivityBound {
    BigRational exact_union_bound;          // sum over pairs of exact collision prob
    std::optional<BigRational> closed_form_bound; // closed form, when one exists
};

/// Probability bound that the row operation identifies two distinct
/// codewords.  The exact part sums, over unordered pairs of distinct column
/// values, the probability that every output row collides (rows i.i.d. for
/// xor/aggregate; folding covers every coordinate, so a nonzero difference
/// always survives and the exact probability is 0).  The closed form
/// N^2 eps^{2nt} (aggregate/fold) or N^2 ((1+eps^2)/2)^n (xor) requires the
/// caller's eps with delta_0 >= 1 - eps^2; the hash reduction has no closed
/// form here.
inline InjectivityBound injectivity_failure_bound(const CodeMatrix& c0, RowOpKind kind,
                                                  std::uint32_t t, std::uint32_t n,
                                                  std::optional<BigRational> eps = std::nullopt,
                                                  std::uint64_t hash_base = 2) {
    const std::uint32_t n0 = c0.length();
    const std::uint32_t N = c0.size();
    if (n == 0) throw input_error("injectivity_failure_bound: n must be positive");

    std::vector<std::optional<BigRational>> by_w(n0 + 1);
    const auto pair_collision = [&](std::uint32_t w) -> const BigRational& {
        auto& slot = by_w[w];
        if (!slot) {
            BigRational row;
            switch (kind) {
                case RowOpKind::xor_t:
                    row = inner_product_collision_probability(c0.q(), n0, w, t);
                    break;
                case RowOpKind::aggregate_t:
                    row = aggregation_agreement_probability(n0, w, t);
                    break;
                case RowOpKind::fold_t:
                    // A partition touches every coordinate; some block sees
                    // the difference with certainty.
                    slot = BigRational(0);
                    return *slot;
                case RowOpKind::hash_reduce:
                    if (!is_prime(hash_base))
                        throw input_error("injectivity_failure_bound: hash base must be prime");
                    row = BigRational(1, hash_base);
                    // All w differing coordinates must collide; agreeing
                    // coordinates always agree.
                    slot = [&] {
                        BigRational acc = 1;
                        for (std::uint32_t i = 0; i < w; ++i) acc *= row;
                        return acc;
                    }();
                    return *slot;
                default:
                    throw input_error(
                        "injectivity_failure_bound: kind must be xor_t, aggregate_t, fold_t "
                        "or hash_reduce");
            }
            BigRational acc = 1;
            for (std::uint32_t i = 0; i < n; ++i) acc *= row;
            slot = acc;
        }
        return *slot;
    };

    InjectivityBound b;
    b.exact_union_bound = 0;
    for (std::uint32_t i = 0; i < N; ++i)
        for (std::uint32_t j = i + 1; j < N; ++j) {
            std::uint32_t w = hamming_distance(c0.column(i), c0.column(j));
            if (w == 0) continue;
            b.exact_union_bound += pair_collision(w);
        }

    if (eps) {
        BigRational NN = BigRational(N) * BigRational(N);
        switch (kind) {
            case RowOpKind::aggregate_t:
            case RowOpKind::fold_t: {
                BigRational acc = 1;
                for (std::uint64_t i = 0; i < 2ull * n * t; ++i) acc *= *eps;
                b.closed_form_bound = NN * acc;
                break;
            }
            case RowOpKind::xor_t: {
                BigRational base = (BigRational(1) + *eps * *eps) / 2;
                BigRational acc = 1;
                for (std::uint32_t i = 0; i < n; ++i) acc *= base;
                b.closed_form_bound = NN * acc;
                break;
            }
            default:
                break;  // hash_reduce: no closed form
        }
    }
    return b;
}

}  // namespace listop
