// Exact (brute-force) list-decodability checkers and ball-counting oracles.
//
// Radii are relative rationals; every checker works with the absolute radius
// floor(rho*n) and compares integer counts exactly.  Exhaustive modes respect
// a caller-supplied evaluation budget and *fail* (budget_error) when the
// enumeration would exceed it -- they never silently fall back to sampling.
//
// Budget accounting: one "evaluation" is one candidate-center/codeword
// distance (standard checks, qⁿ·N total), one enumerated word (ball
// intersections, qⁿ total), or one set-member visit (average-radius checks,
// C(N,L)·L total).
#pragma once

#include "listop/code_matrix.hpp"
#include "listop/rng.hpp"

#include <optional>
#include <vector>

namespace listop {

inline BigInt hamming_ball_volume(std::uint64_t q, std::uint32_t n, std::uint32_t r) {
    if (q < 2) throw input_error("hamming_ball_volume: q must be at least 2");
    BigInt v = 0;
    for (std::uint32_t i = 0; i <= std::min(r, n); ++i)
        v += binomial(n, i) * big_pow(BigInt(q - 1), i);
    return v;
}

enum class LdMode { exhaustive, sampled };
enum class LdVerdict {
    decodable,          // proven over the full enumeration (exhaustive only)
    violated,           // explicit counterexample in witness_center
    no_counterexample,  // search completed without finding a violation (no proof)
    budget_exhausted    // search stopped early on its evaluation budget (no proof)
};

struct LdReport {
    LdVerdict verdict = LdVerdict::no_counterexample;
    LdMode mode = LdMode::exhaustive;
    Rational radius{0, 1};
    std::uint32_t list_bound = 0;
    std::uint32_t absolute_radius = 0;
    std::uint64_t examined = 0;  // centers or candidate sets visited
    std::optional<std::vector<Symbol>> witness_center;
    std::uint32_t witness_list_size = 0;
    std::vector<std::uint32_t> witness_lambda;  // average-radius violations only

    bool decodable() const { return verdict == LdVerdict::decodable; }
};

namespace detail {

inline std::uint32_t absolute_radius(const Rational& rho, std::uint32_t n) {
    if (rho < Rational(0) || rho > Rational(1))
        throw input_error("radius must lie in [0, 1]");
    return static_cast<std::uint32_t>(rational_floor(rho * Rational(n)));
}

/// Count of codewords within absolute distance r of z, capped early at stop.
inline std::uint32_t ball_count(const CodeMatrix& c, std::span<const Symbol> z,
                                std::uint32_t r, std::uint32_t stop) {
    std::uint32_t count = 0;
    for (std::uint32_t j = 0; j < c.size(); ++j) {
        if (hamming_distance(c.column(j), z) <= r) {
            if (++count >= stop) return count;
        }
    }
    return count;
}

/// Odometer step over [0,q)^n; returns false after the last word.
inline bool next_word(std::vector<Symbol>& z, std::uint64_t q) {
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (++z[i] < q) return true;
        z[i] = 0;
    }
    return false;
}

/// Lexicographic step over L-subsets of [0,N); returns false after the last.
inline bool next_combination(std::vector<std::uint32_t>& idx, std::uint32_t N) {
    const std::size_t L = idx.size();
    std::size_t i = L;
    while (i > 0) {
        --i;
        if (idx[i] + 1 <= N - (L - i)) {
            ++idx[i];
            for (std::size_t j = i + 1; j < L; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace detail

/// |B(c, r1) ∩ B(y, r2)| by exhaustive enumeration of [0,q)^n.
inline BigInt ball_intersection_size(std::uint64_t q, std::span<const Symbol> c,
                                     std::span<const Symbol> y, std::uint32_t r1,
                                     std::uint32_t r2, std::uint64_t cap = default_budget) {
    if (c.size() != y.size()) throw input_error("ball_intersection_size: length mismatch");
    const std::uint32_t n = static_cast<std::uint32_t>(c.size());
    if (big_pow(BigInt(q), n) > BigInt(cap))
        throw budget_error("ball_intersection_size: q^n exceeds evaluation budget");
    BigInt count = 0;
    std::vector<Symbol> z(n, 0);
    do {
        if (hamming_distance(z, c) <= r1 && hamming_distance(z, y) <= r2) ++count;
    } while (detail::next_word(z, q));
    return count;
}

/// (rho, L)-list-decodability: every ball of absolute radius floor(rho*n)
/// contains strictly fewer than L codewords.
///
/// Exhaustive mode enumerates all q^n centers (budget: q^n * N evaluations)
/// and returns a proof either way.  Sampled mode draws `cap` centers (half
/// uniform, half perturbed codewords) and can only disprove: it returns
/// `violated` or `no_counterexample`, never `decodable`.
inline LdReport is_list_decodable(const CodeMatrix& c, const Rational& rho, std::uint32_t L,
                                  LdMode mode = LdMode::exhaustive,
                                  std::uint64_t cap = default_budget,
                                  std::uint64_t seed = 0) {
    if (L == 0) throw input_error("is_list_decodable: list bound L must be positive");
    const std::uint32_t n = c.length();
    const std::uint32_t r = detail::absolute_radius(rho, n);

    LdReport rep;
    rep.mode = mode;
    rep.radius = rho;
    rep.list_bound = L;
    rep.absolute_radius = r;

    if (mode == LdMode::exhaustive) {
        if (big_pow(BigInt(c.q()), n) * c.size() > BigInt(cap))
            throw budget_error("is_list_decodable: q^n * N exceeds evaluation budget");
        std::vector<Symbol> z(n, 0);
        do {
            ++rep.examined;
            std::uint32_t count = detail::ball_count(c, z, r, L);
            if (count >= L) {
                rep.verdict = LdVerdict::violated;
                rep.witness_center = z;
                rep.witness_list_size = detail::ball_count(c, z, r, c.size() + 1);
                return rep;
            }
        } while (detail::next_word(z, c.q()));
        rep.verdict = LdVerdict::decodable;
        return rep;
    }

    Rng rng(seed);
    std::vector<Symbol> z(n);
    for (std::uint64_t s = 0; s < cap; ++s) {
        ++rep.examined;
        if (s % 2 == 0) {
            for (std::uint32_t i = 0; i < n; ++i) z[i] = rng.below(c.q());
        } else {
            // Perturb a random codeword on a random radius-sized support.
            auto col = c.column(static_cast<std::uint32_t>(rng.below(c.size())));
            std::copy(col.begin(), col.end(), z.begin());
            for (std::uint32_t pos : rng.subset(n, std::min(r, n))) {
                Symbol repl = rng.below(c.q() - 1);
                z[pos] = repl >= z[pos] ? repl + 1 : repl;
            }
        }
        std::uint32_t count = detail::ball_count(c, z, r, L);
        if (count >= L) {
            rep.verdict = LdVerdict::violated;
            rep.witness_center = z;
            rep.witness_list_size = detail::ball_count(c, z, r, c.size() + 1);
            return rep;
        }
    }
    rep.verdict = LdVerdict::no_counterexample;
    return rep;
}

/// Convenience oracle: max over all centers z of |B(z, r_abs) ∩ C| together
/// with an argmax center.  Budget: q^n * N evaluations.
inline std::pair<std::uint32_t, std::vector<Symbol>> exhaustive_max_ball_count(
    const CodeMatrix& c, std::uint32_t r_abs, std::uint64_t cap = default_budget) {
    const std::uint32_t n = c.length();
    if (big_pow(BigInt(c.q()), n) * c.size() > BigInt(cap))
        throw budget_error("exhaustive_max_ball_count: q^n * N exceeds evaluation budget");
    std::uint32_t best = 0;
    std::vector<Symbol> best_z(n, 0), z(n, 0);
    do {
        std::uint32_t count = detail::ball_count(c, z, r_abs, c.size() + 1);
        if (count > best) {
            best = count;
            best_z = z;
        }
    } while (detail::next_word(z, c.q()));
    return {best, best_z};
}

/// (rho, L)-average-radius list-decodability: for every L-subset Lambda of
/// columns, max over z of the summed agreement (= sum of row pluralities)
/// is at most (1-rho)*n*L, compared exactly in rational arithmetic.
///
/// Exhaustive mode enumerates all C(N, L) subsets (budget: C(N,L)*L
/// evaluations); when L > N the property is vacuous and reported decodable.
/// Sampled ("heuristic") mode runs greedy growth plus steepest-ascent swaps
/// from several seeded restarts and can only disprove; it reports
/// budget_exhausted when stopped by the evaluation budget before converging.
inline LdReport is_avg_radius_list_decodable(const CodeMatrix& c, const Rational& rho,
                                             std::uint32_t L, LdMode mode = LdMode::exhaustive,
                                             std::uint64_t cap = default_budget,
                                             std::uint64_t seed = 0) {
    if (L == 0) throw input_error("is_avg_radius_list_decodable: L must be positive");
    if (rho < Rational(0) || rho > Rational(1))
        throw input_error("radius must lie in [0, 1]");
    const std::uint32_t n = c.length();
    const std::uint32_t N = c.size();

    LdReport rep;
    rep.mode = mode;
    rep.radius = rho;
    rep.list_bound = L;
    rep.absolute_radius = detail::absolute_radius(rho, n);

    // Exact threshold: sum <= (1-rho)*n*L  <=>  sum*den <= (den-num)*n*L.
    const std::int64_t num = rho.numerator(), den = rho.denominator();
    const auto violates = [&](std::uint64_t sum) {
        return static_cast<std::int64_t>(sum) * den >
               (den - num) * static_cast<std::int64_t>(n) * static_cast<std::int64_t>(L);
    };

    if (mode == LdMode::exhaustive) {
        if (L > N) {  // no L-subsets exist; the property holds vacuously
            rep.verdict = LdVerdict::decodable;
            return rep;
        }
        if (binomial(N, L) * L > BigInt(cap))
            throw budget_error("is_avg_radius_list_decodable: C(N,L)*L exceeds budget");
        std::vector<std::uint32_t> idx(L);
        for (std::uint32_t i = 0; i < L; ++i) idx[i] = i;
        do {
            ++rep.examined;
            std::uint64_t sum = max_agreement_sum(c, idx);
            if (violates(sum)) {
                rep.verdict = LdVerdict::violated;
                rep.witness_lambda = idx;
                rep.witness_center = plurality_center(c, idx);
                rep.witness_list_size = L;
                return rep;
            }
        } while (detail::next_combination(idx, N));
        rep.verdict = LdVerdict::decodable;
        return rep;
    }

    // Heuristic search for a violating Lambda.
    if (L > N) {
        rep.verdict = LdVerdict::no_counterexample;
        return rep;
    }
    std::uint64_t evals = 0;
    bool out_of_budget = false;
    const auto eval = [&](std::span<const std::uint32_t> lambda) -> std::optional<std::uint64_t> {
        if (evals >= cap) {
            out_of_budget = true;
            return std::nullopt;
        }
        ++evals;
        ++rep.examined;
        return max_agreement_sum(c, lambda);
    };

    const unsigned restarts = 4;
    for (unsigned rs = 0; rs < restarts && !out_of_budget; ++rs) {
        Rng rng(derive_seed(seed, "avg-heuristic-restart", rs));
        std::vector<std::uint32_t> lambda;
        std::vector<bool> used(N, false);
        if (rs == 0) {
            // Greedy growth from scratch.
            for (std::uint32_t step = 0; step < L && !out_of_budget; ++step) {
                std::uint64_t best = 0;
                std::uint32_t best_j = N;
                for (std::uint32_t j = 0; j < N; ++j) {
                    if (used[j]) continue;
                    lambda.push_back(j);
                    auto v = eval(lambda);
                    lambda.pop_back();
                    if (!v) break;
                    if (best_j == N || *v > best) {
                        best = *v;
                        best_j = j;
                    }
                }
                if (best_j == N) break;
                lambda.push_back(best_j);
                used[best_j] = true;
            }
        } else {
            for (std::uint32_t j : rng.subset(N, L)) {
                lambda.push_back(j);
                used[j] = true;
            }
        }
        if (lambda.size() != L) break;

        auto current = eval(lambda);
        if (!current) break;
        if (violates(*current)) {
            rep.verdict = LdVerdict::violated;
            rep.witness_lambda = lambda;
            rep.witness_center = plurality_center(c, lambda);
            rep.witness_list_size = L;
            return rep;
        }
        // Steepest-ascent single swaps until no improvement.
        bool improved = true;
        while (improved && !out_of_budget) {
            improved = false;
            std::uint64_t best = *current;
            std::uint32_t best_pos = L, best_j = N;
            for (std::uint32_t pos = 0; pos < L && !out_of_budget; ++pos) {
                std::uint32_t old = lambda[pos];
                for (std::uint32_t j = 0; j < N; ++j) {
                    if (used[j]) continue;
                    lambda[pos] = j;
                    auto v = eval(lambda);
                    if (!v) break;
                    if (*v > best) {
                        best = *v;
                        best_pos = pos;
                        best_j = j;
                    }
                }
                lambda[pos] = old;
            }
            if (best_pos != L) {
                used[lambda[best_pos]] = false;
                used[best_j] = true;
                lambda[best_pos] = best_j;
                current = best;
                improved = true;
                if (violates(*current)) {
                    rep.verdict = LdVerdict::violated;
                    rep.witness_lambda = lambda;
                    rep.witness_center = plurality_center(c, lambda);
                    rep.witness_list_size = L;
                    return rep;
                }
            }
        }
    }
    rep.verdict = out_of_budget ? LdVerdict::budget_exhausted : LdVerdict::no_counterexample;
    return rep;
}

}  // namespace listop
