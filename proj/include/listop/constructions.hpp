// Base-code generators (random, random linear, Reed-Solomon, Hadamard),
// weight distributions, and the adversarial cluster-code construction whose
// random subcodes have provably bad list sizes.
#pragma once

#include "listop/code_matrix.hpp"
#include "listop/oracles.hpp"
#include "listop/rng.hpp"

#include <bit>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace listop {

/// N i.i.d. uniform codewords.
inline CodeMatrix random_code(std::uint64_t q, std::uint32_t n, std::uint32_t N,
                              std::uint64_t seed) {
    CodeMatrix c(q, n, N);
    Rng rng(seed);
    for (std::uint32_t j = 0; j < N; ++j)
        for (std::uint32_t i = 0; i < n; ++i) c.set_raw(i, j, rng.below(q));
    return c;
}

/// Uniform k x n generator over prime F_q; the columns enumerate all q^k
/// message encodings (column j encodes the base-q digits of j, least
/// significant digit = generator row 0).
inline CodeMatrix random_linear_code(std::uint64_t q, std::uint32_t n, std::uint32_t k,
                                     std::uint64_t seed, std::uint64_t cap = default_budget) {
    if (!is_prime(q)) throw input_error("random_linear_code: q must be prime");
    if (k > n) throw input_error("random_linear_code: k must not exceed n");
    const std::uint64_t big_n = checked_pow(q, k);
    if (big_n > cap) throw budget_error("random_linear_code: q^k exceeds the budget");

    Rng rng(seed);
    std::vector<std::vector<Symbol>> gen(k, std::vector<Symbol>(n));
    for (auto& row : gen)
        for (auto& s : row) s = rng.below(q);

    CodeMatrix c(q, n, static_cast<std::uint32_t>(big_n));
    for (std::uint64_t msg = 0; msg < big_n; ++msg) {
        std::uint64_t rest = msg;
        std::vector<Symbol> word(n, 0);
        for (std::uint32_t i = 0; i < k; ++i) {
            const Symbol digit = rest % q;
            rest /= q;
            if (digit != 0)
                for (std::uint32_t col = 0; col < n; ++col)
                    word[col] = (word[col] + digit * gen[i][col]) % q;
        }
        for (std::uint32_t row = 0; row < n; ++row)
            c.set_raw(row, static_cast<std::uint32_t>(msg), word[row]);
    }
    return c;
}

/// Evaluations of all q^k polynomials of degree < k at the given distinct
/// points (column j's polynomial has coefficients = base-q digits of j,
/// least significant digit = constant term).
inline CodeMatrix reed_solomon(std::uint64_t q, std::uint32_t k,
                               const std::vector<Symbol>& points,
                               std::uint64_t cap = default_budget) {
    if (!is_prime(q)) throw input_error("reed_solomon: q must be prime");
    if (points.empty()) throw input_error("reed_solomon: need at least one evaluation point");
    if (k > points.size())
        throw input_error("reed_solomon: degree bound exceeds the number of points");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i] >= q) throw input_error("reed_solomon: evaluation point out of range");
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (points[i] == points[j])
                throw input_error("reed_solomon: evaluation points must be distinct");
    }
    const std::uint64_t big_n = checked_pow(q, k);
    if (big_n > cap) throw budget_error("reed_solomon: q^k exceeds the budget");

    const auto n = static_cast<std::uint32_t>(points.size());
    CodeMatrix c(q, n, static_cast<std::uint32_t>(big_n));
    std::vector<Symbol> coeff(k == 0 ? 1 : k, 0);
    for (std::uint64_t msg = 0; msg < big_n; ++msg) {
        std::uint64_t rest = msg;
        for (std::uint32_t i = 0; i < k; ++i) {
            coeff[i] = rest % q;
            rest /= q;
        }
        for (std::uint32_t row = 0; row < n; ++row) {
            // Horner evaluation, highest coefficient first.
            Symbol acc = 0;
            for (std::uint32_t i = k; i > 0; --i) acc = (acc * points[row] + coeff[i - 1]) % q;
            c.set_raw(row, static_cast<std::uint32_t>(msg), acc);
        }
    }
    return c;
}

/// Binary Hadamard code of dimension k: length 2^k, codeword m has entry
/// <x, m> over F_2 at position x.
inline CodeMatrix hadamard(std::uint32_t k) {
    if (k == 0) throw input_error("hadamard: k must be at least 1");
    if (k > 24) throw input_error("hadamard: k too large to materialize");
    const std::uint32_t size = 1u << k;
    CodeMatrix c(2, size, size);
    for (std::uint32_t m = 0; m < size; ++m)
        for (std::uint32_t x = 0; x < size; ++x)
            c.set_raw(x, m, static_cast<Symbol>(std::popcount(x & m) & 1u));
    return c;
}

/// Exact histogram of column Hamming weights, with the agreement-threshold
/// fraction A(beta) = |{c : agr(c, 0) >= beta*n}| / N derived from it.
struct WeightDistribution {
    std::map<std::uint32_t, std::uint64_t> histogram;
    std::uint32_t n = 0;
    std::uint64_t total = 0;

    /// Fraction of codewords agreeing with the zero word on at least beta*n
    /// coordinates (weight at most (1-beta)*n), compared exactly.
    Rational agreement_fraction(const Rational& beta) const {
        if (beta < Rational(0) || beta > Rational(1))
            throw input_error("agreement_fraction: beta must lie in [0,1]");
        std::uint64_t count = 0;
        for (const auto& [w, c] : histogram)
            if (Rational(n) - Rational(w) >= beta * Rational(n)) count += c;
        return Rational(static_cast<std::int64_t>(count), static_cast<std::int64_t>(total));
    }
};

inline WeightDistribution weight_distribution(const CodeMatrix& c) {
    WeightDistribution w;
    w.n = c.length();
    w.total = c.size();
    for (std::uint32_t j = 0; j < c.size(); ++j) {
        std::uint32_t weight = 0;
        for (Symbol s : c.column(j))
            if (s != 0) ++weight;
        ++w.histogram[weight];
    }
    return w;
}

/// True when every pair of distinct columns is at Hamming distance >= d
/// (early exit per pair; duplicates fail for d >= 1).
inline bool min_distance_at_least(const CodeMatrix& c, std::uint32_t d) {
    if (d == 0) return true;
    for (std::uint32_t i = 0; i < c.size(); ++i) {
        auto a = c.column(i);
        for (std::uint32_t j = i + 1; j < c.size(); ++j) {
            auto b = c.column(j);
            std::uint32_t mismatches = 0;
            for (std::uint32_t r = 0; r < c.length(); ++r)
                if (a[r] != b[r] && ++mismatches >= d) break;
            if (mismatches < d) return false;
        }
    }
    return true;
}

struct ClusterParams {
    Rational rho{0};
    Rational beta{0};
    Rational r{0};        // center-code rate (1 - rho - beta) / 6
    std::uint32_t log_scale = 0;  // m with 1 - rho - beta = 2^{-m}
    std::uint32_t cluster_size = 0;
    std::uint32_t retries = 0;    // center redraws needed to reach distance >= 3
    bool centers_precondition_held = false;  // q >= 2^{1/r}
    std::uint64_t seed = 0;
};

/// The adversarial code: disjoint clusters of distance-1 neighbours around
/// well-separated random centers.
struct ClusterCode {
    CodeMatrix c0;       // the assembled code, cluster by cluster
    CodeMatrix centers;  // the inner code C*
    std::vector<std::uint32_t> cluster_of;  // column of c0 -> center index
    ClusterParams params;
};

/// Deterministic cluster members around each center: member i bumps
/// coordinate i by +1 mod q, giving cluster_size distinct words at Hamming
/// distance exactly 1 from the center.  Validates disjointness.
inline std::pair<CodeMatrix, std::vector<std::uint32_t>> assemble_cluster_code(
    const CodeMatrix& centers, std::uint32_t cluster_size) {
    if (cluster_size == 0) throw input_error("assemble_cluster_code: cluster size must be >= 1");
    if (cluster_size > centers.length())
        throw input_error("assemble_cluster_code: cluster size exceeds the block length");
    const std::uint64_t total =
        static_cast<std::uint64_t>(centers.size()) * cluster_size;
    if (total > (std::uint64_t{1} << 31))
        throw input_error("assemble_cluster_code: code too large to materialize");

    CodeMatrix c0(centers.q(), centers.length(), static_cast<std::uint32_t>(total));
    std::vector<std::uint32_t> cluster_of(total);
    for (std::uint32_t z = 0; z < centers.size(); ++z) {
        auto center = centers.column(z);
        for (std::uint32_t t = 0; t < cluster_size; ++t) {
            const std::uint32_t j = z * cluster_size + t;
            cluster_of[j] = z;
            for (std::uint32_t i = 0; i < centers.length(); ++i)
                c0.set_raw(i, j, i == t ? (center[i] + 1) % centers.q() : center[i]);
        }
    }
    if (c0.distinct_count() != total)
        throw construction_error("assemble_cluster_code: clusters overlap (center distance < 3)");
    return {std::move(c0), std::move(cluster_of)};
}

/// Smallest beta > 0 with 1 - rho - beta a power of 1/2; returns (beta, m)
/// with 1 - rho - beta = 2^{-m}.
inline std::pair<Rational, std::uint32_t> cluster_beta(const Rational& rho) {
    if (rho <= Rational(0) || rho >= Rational(1))
        throw input_error("cluster_beta: rho must lie in (0,1)");
    const Rational survive = Rational(1) - rho;
    std::uint32_t m = 1;
    while (m < 62 && Rational(1, std::int64_t{1} << m) >= survive) ++m;
    if (Rational(1, std::int64_t{1} << m) >= survive)
        throw input_error("cluster_beta: rho too close to 1");
    return {survive - Rational(1, std::int64_t{1} << m), m};
}

/// Build the full construction: centers drawn as a random code of rate
/// (1-rho-beta)/6 redrawn until distance >= 3 (up to retry_cap attempts),
/// then cluster_size = floor(beta*n / (8*m)) - 1 neighbours per center.
inline ClusterCode build_cluster_code(const Rational& rho, std::uint32_t n, std::uint64_t q,
                                      std::uint64_t seed, std::uint32_t retry_cap = 64) {
    ClusterCode cc;
    cc.params.rho = rho;
    cc.params.seed = seed;
    auto [beta, m] = cluster_beta(rho);
    cc.params.beta = beta;
    cc.params.log_scale = m;
    cc.params.r = Rational(1, 6 * (std::int64_t{1} << m));

    const Rational size_term = beta * Rational(n) / Rational(8 * static_cast<std::int64_t>(m));
    const std::int64_t cluster_size = rational_floor(size_term) - 1;
    if (cluster_size < 1)
        throw input_error("build_cluster_code: block length " + std::to_string(n) +
                          " is too small for a nonempty cluster (needs beta*n/(8*m) >= 2)");
    cc.params.cluster_size = static_cast<std::uint32_t>(cluster_size);

    // |C*| = floor(q^{r n}) computed exactly: q^{a/b} via the b-th root.
    const Rational rn = cc.params.r * Rational(n);
    const BigInt size_big = integer_kth_root(
        big_pow(BigInt(q), static_cast<std::uint32_t>(rn.numerator())),
        static_cast<std::uint64_t>(rn.denominator()));
    if (size_big < 2)
        throw input_error("build_cluster_code: fewer than two centers at this rate");
    if (size_big > (std::int64_t{1} << 24))
        throw input_error("build_cluster_code: center code too large to materialize");
    const auto n_star = static_cast<std::uint32_t>(size_big);

    // q >= 2^{1/r}  <=>  q^{r numerator... } exact power comparison.
    cc.params.centers_precondition_held =
        big_pow(BigInt(q), static_cast<std::uint32_t>(cc.params.r.numerator())) >=
        big_pow(BigInt(2), static_cast<std::uint32_t>(cc.params.r.denominator()));

    for (std::uint32_t attempt = 0;; ++attempt) {
        if (attempt >= retry_cap)
            throw construction_error(
                "build_cluster_code: no center draw reached distance 3 within the retry cap");
        CodeMatrix centers =
            random_code(q, n, n_star, derive_seed(seed, "cluster-centers", attempt));
        if (!min_distance_at_least(centers, 3)) continue;
        cc.params.retries = attempt;
        cc.centers = std::move(centers);
        break;
    }

    auto [c0, cluster_of] = assemble_cluster_code(cc.centers, cc.params.cluster_size);
    cc.c0 = std::move(c0);
    cc.cluster_of = std::move(cluster_of);
    return cc;
}

struct GammaCheck {
    Rational gamma{0};
    std::uint32_t list_bound = 0;
    LdReport report;
};

struct CentersReport {
    std::vector<GammaCheck> checks;
    bool precondition_held = false;  // q >= 2^{1/r}
};

/// For each gamma a power of 1/2 in (2r, 1], exhaustively check that the
/// center code is (1 - gamma, ceil(1/(gamma - 2r)))-list decodable.
inline CentersReport verify_random_centers(const CodeMatrix& centers, const Rational& r,
                                           std::uint64_t cap = default_budget) {
    if (r <= Rational(0) || Rational(2) * r >= Rational(1))
        throw input_error("verify_random_centers: need 0 < r < 1/2");
    CentersReport rep;
    rep.precondition_held =
        big_pow(BigInt(centers.q()), static_cast<std::uint32_t>(r.numerator())) >=
        big_pow(BigInt(2), static_cast<std::uint32_t>(r.denominator()));
    for (Rational gamma(1); gamma > Rational(2) * r; gamma /= 2) {
        GammaCheck gc;
        gc.gamma = gamma;
        const Rational margin = gamma - Rational(2) * r;
        gc.list_bound = static_cast<std::uint32_t>(
            ceil_div(margin.denominator(), margin.numerator()));
        gc.report = is_list_decodable(centers, Rational(1) - gamma, gc.list_bound,
                                      LdMode::exhaustive, cap);
        rep.checks.push_back(std::move(gc));
    }
    return rep;
}

}  // namespace listop
