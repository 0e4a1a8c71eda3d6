// Code-as-matrix model: an n x N matrix over [0, q) whose columns are the
// codewords.  Duplicate columns are permitted (multiset semantics); rate-type
// quantities therefore distinguish N from distinct_count().
#pragma once

#include "listop/common.hpp"

#include <algorithm>
#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

namespace listop {

/// Alphabet descriptor.  Either a prime field F_q or the set of k-tuples over
/// a prime base field (packed into single symbols base-q, big-endian).
struct Alphabet {
    enum class Kind { prime_field, prime_power_tuples };

    std::uint64_t q = 2;   // total alphabet size
    Kind kind = Kind::prime_field;
    std::uint64_t base = 2;  // prime base field
    std::uint32_t k = 1;     // tuple length; q == base^k

    static Alphabet prime(std::uint64_t q) {
        if (!is_prime(q)) throw input_error("alphabet: q=" + std::to_string(q) + " is not prime");
        return Alphabet{q, Kind::prime_field, q, 1};
    }
    static Alphabet tuples(std::uint64_t base, std::uint32_t k) {
        if (!is_prime(base))
            throw input_error("alphabet: base=" + std::to_string(base) + " is not prime");
        if (k == 0) throw input_error("alphabet: tuple length k must be positive");
        return Alphabet{checked_pow(base, k), Kind::prime_power_tuples, base, k};
    }
};

class CodeMatrix {
public:
    CodeMatrix() = default;

    CodeMatrix(std::uint64_t q, std::uint32_t n, std::uint32_t N)
        : q_(q), n_(n), N_(N), data_(static_cast<std::size_t>(n) * N, 0) {
        if (q < 2) throw input_error("code: alphabet size q must be at least 2");
        if (n == 0) throw input_error("code: length n must be positive");
        if (N == 0) throw input_error("code: at least one codeword required");
    }

    static CodeMatrix from_codewords(std::uint64_t q,
                                     const std::vector<std::vector<Symbol>>& words) {
        if (words.empty()) throw input_error("code: at least one codeword required");
        CodeMatrix c(q, static_cast<std::uint32_t>(words.front().size()),
                     static_cast<std::uint32_t>(words.size()));
        for (std::uint32_t j = 0; j < c.N_; ++j) {
            if (words[j].size() != c.n_)
                throw input_error("code: codeword length mismatch at index " + std::to_string(j));
            for (std::uint32_t i = 0; i < c.n_; ++i) c.set(i, j, words[j][i]);
        }
        return c;
    }

    std::uint64_t q() const { return q_; }
    std::uint32_t length() const { return n_; }  // n: rows
    std::uint32_t size() const { return N_; }    // N: columns / codewords

    Symbol at(std::uint32_t row, std::uint32_t col) const {
        return data_[static_cast<std::size_t>(col) * n_ + row];
    }
    void set(std::uint32_t row, std::uint32_t col, Symbol v) {
        if (v >= q_)
            throw input_error("code: symbol " + std::to_string(v) + " out of range for q=" +
                              std::to_string(q_));
        data_[static_cast<std::size_t>(col) * n_ + row] = v;
    }
    /// Unchecked write for bulk builders that validate separately.
    void set_raw(std::uint32_t row, std::uint32_t col, Symbol v) {
        data_[static_cast<std::size_t>(col) * n_ + row] = v;
    }

    std::span<const Symbol> column(std::uint32_t col) const {
        return {data_.data() + static_cast<std::size_t>(col) * n_, n_};
    }

    /// Number of distinct column values (multiset support size).
    std::size_t distinct_count() const {
        struct SpanHash {
            std::size_t operator()(std::span<const Symbol> s) const {
                std::uint64_t h = 0xCBF29CE484222325ull;
                for (Symbol v : s) {
                    h ^= v;
                    h *= 0x100000001B3ull;
                }
                return static_cast<std::size_t>(h);
            }
        };
        struct SpanEq {
            bool operator()(std::span<const Symbol> a, std::span<const Symbol> b) const {
                return std::ranges::equal(a, b);
            }
        };
        std::unordered_set<std::span<const Symbol>, SpanHash, SpanEq> seen;
        seen.reserve(N_);
        for (std::uint32_t j = 0; j < N_; ++j) seen.insert(column(j));
        return seen.size();
    }

    bool operator==(const CodeMatrix& o) const {
        return q_ == o.q_ && n_ == o.n_ && N_ == o.N_ && data_ == o.data_;
    }

private:
    std::uint64_t q_ = 2;
    std::uint32_t n_ = 1;
    std::uint32_t N_ = 1;
    std::vector<Symbol> data_;  // column-major: codeword j is contiguous
};

inline std::uint32_t hamming_distance(std::span<const Symbol> a, std::span<const Symbol> b) {
    if (a.size() != b.size()) throw input_error("hamming_distance: length mismatch");
    std::uint32_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]);
    return d;
}

inline std::uint32_t agreement(std::span<const Symbol> a, std::span<const Symbol> b) {
    return static_cast<std::uint32_t>(a.size()) - hamming_distance(a, b);
}

/// Relative minimum distance, taken over pairs of *distinct column values*
/// so that multiset duplicates do not force it to zero.  Requires at least
/// two distinct codewords.
inline Rational code_min_distance(const CodeMatrix& c) {
    const std::uint32_t n = c.length(), N = c.size();
    std::uint32_t best = n + 1;
    for (std::uint32_t i = 0; i < N && best > 1; ++i)
        for (std::uint32_t j = i + 1; j < N; ++j) {
            std::uint32_t d = hamming_distance(c.column(i), c.column(j));
            if (d != 0 && d < best) {
                best = d;
                if (best == 1) break;
            }
        }
    if (best == n + 1)
        throw input_error("code_min_distance: fewer than two distinct codewords");
    return Rational(best, n);
}

namespace detail {
/// Largest multiplicity among {vals}; vals is clobbered (sorted).
inline std::uint32_t max_multiplicity(std::vector<Symbol>& vals) {
    std::sort(vals.begin(), vals.end());
    std::uint32_t best = 0, run = 0;
    Symbol prev = 0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (i == 0 || vals[i] != prev) {
            prev = vals[i];
            run = 1;
        } else {
            ++run;
        }
        best = std::max(best, run);
    }
    return best;
}
}  // namespace detail

/// Per-row plurality counts over the sub-multiset of columns `lambda`:
/// entry j = max over symbols of the number of lambda-columns agreeing at row j.
inline std::vector<std::uint32_t> plurality_vector(const CodeMatrix& c,
                                                   std::span<const std::uint32_t> lambda) {
    if (lambda.empty()) throw input_error("plurality_vector: empty list");
    for (auto idx : lambda)
        if (idx >= c.size()) throw input_error("plurality_vector: column index out of range");
    std::vector<std::uint32_t> pl(c.length());
    std::vector<Symbol> vals(lambda.size());
    for (std::uint32_t row = 0; row < c.length(); ++row) {
        for (std::size_t i = 0; i < lambda.size(); ++i) vals[i] = c.at(row, lambda[i]);
        pl[row] = detail::max_multiplicity(vals);
    }
    return pl;
}

/// Sum of per-row pluralities; by the plurality identity this equals
/// max over centers z of the total agreement of the lambda-columns with z.
inline std::uint64_t max_agreement_sum(const CodeMatrix& c,
                                       std::span<const std::uint32_t> lambda) {
    std::uint64_t s = 0;
    for (std::uint32_t p : plurality_vector(c, lambda)) s += p;
    return s;
}

/// A center achieving max_agreement_sum: per row, the (smallest) plurality
/// symbol of the lambda-columns.
inline std::vector<Symbol> plurality_center(const CodeMatrix& c,
                                            std::span<const std::uint32_t> lambda) {
    if (lambda.empty()) throw input_error("plurality_center: empty list");
    std::vector<Symbol> z(c.length());
    std::vector<Symbol> vals(lambda.size());
    for (std::uint32_t row = 0; row < c.length(); ++row) {
        for (std::size_t i = 0; i < lambda.size(); ++i) vals[i] = c.at(row, lambda[i]);
        std::sort(vals.begin(), vals.end());
        std::uint32_t best = 0, run = 0;
        Symbol prev = 0, arg = vals[0];
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (i == 0 || vals[i] != prev) {
                prev = vals[i];
                run = 1;
            } else {
                ++run;
            }
            if (run > best) {
                best = run;
                arg = prev;
            }
        }
        z[row] = arg;
    }
    return z;
}

}  // namespace listop
