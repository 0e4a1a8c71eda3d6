#pragma once
// Concatenation of an explicit outer code with a Hadamard inner code, plus
// the three-step randomized list decoder: per-position inner list decoding,
// a uniform pick from each inner list, and a brute-force outer decode of the
// picked word.

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "listop/code_matrix.hpp"
#include "listop/common.hpp"
#include "listop/oracles.hpp"
#include "listop/rng.hpp"

namespace listop {

/// Outer code over an alphabet embedded into inner messages of `inner_k`
/// bits; each outer symbol is transmitted as its Hadamard encoding.
struct ConcatCode {
    CodeMatrix outer;
    std::uint32_t inner_k = 1;

    std::uint32_t inner_length() const { return std::uint32_t{1} << inner_k; }
    std::uint64_t encoded_length() const {
        return static_cast<std::uint64_t>(outer.length()) * inner_length();
    }
};

namespace detail {

inline Symbol hadamard_bit(std::uint32_t message, std::uint32_t position) {
    return static_cast<Symbol>(std::popcount(message & position) & 1u);
}

}  // namespace detail

inline ConcatCode make_concat_code(CodeMatrix outer, std::uint32_t inner_k) {
    if (inner_k == 0 || inner_k > 20)
        throw input_error("make_concat_code: inner dimension must be in [1, 20]");
    if (outer.q() > (std::uint64_t{1} << inner_k))
        throw input_error("make_concat_code: inner messages cannot cover " +
                          std::to_string(outer.q()) + " outer symbols with " +
                          std::to_string(inner_k) + " bits");
    return ConcatCode{std::move(outer), inner_k};
}

/// Binary transmission of outer codeword `index`: each outer symbol replaced
/// by its `2^inner_k`-bit Hadamard encoding.
inline std::vector<Symbol> concat_encode(const ConcatCode& code, std::uint32_t index) {
    if (index >= code.outer.size())
        throw input_error("concat_encode: codeword index " + std::to_string(index) +
                          " out of range for " + std::to_string(code.outer.size()) +
                          " codewords");
    const std::uint32_t block = code.inner_length();
    std::vector<Symbol> y;
    y.reserve(code.encoded_length());
    for (std::uint32_t i = 0; i < code.outer.length(); ++i) {
        const auto m = static_cast<std::uint32_t>(code.outer.at(i, index));
        for (std::uint32_t x = 0; x < block; ++x)
            y.push_back(detail::hadamard_bit(m, x));
    }
    return y;
}

/// All inner messages whose Hadamard encodings lie within the given relative
/// radius of `y`; exhaustive over the 2^k messages, ascending.
inline std::vector<std::uint32_t> hadamard_list_decode(std::span<const Symbol> y,
                                                       const Rational& radius) {
    if (y.empty() || (y.size() & (y.size() - 1)) != 0)
        throw input_error("hadamard_list_decode: word length must be a power of two");
    if (radius < 0 || radius > 1)
        throw input_error("hadamard_list_decode: radius must be in [0, 1]");
    const auto block = static_cast<std::uint32_t>(y.size());
    for (Symbol s : y)
        if (s > 1) throw input_error("hadamard_list_decode: word must be binary");
    const auto r = static_cast<std::uint32_t>(rational_floor(radius * Rational(block)));
    std::vector<std::uint32_t> list;
    for (std::uint32_t m = 0; m < block; ++m) {
        std::uint32_t dist = 0;
        for (std::uint32_t x = 0; x < block && dist <= r; ++x)
            if (detail::hadamard_bit(m, x) != y[x]) ++dist;
        if (dist <= r) list.push_back(m);
    }
    return list;
}

/// Step two of the decoder: per outer position, list decode the inner block
/// at relative radius (1 - eps)/2 and pick a uniform element (a uniform
/// inner message when the list is empty).  Picks use position-derived seeds.
inline std::vector<Symbol> concat_inner_pass(const ConcatCode& code,
                                             std::span<const Symbol> y,
                                             const Rational& eps, std::uint64_t seed) {
    if (eps <= 0 || eps > 1)
        throw input_error("concat_inner_pass: eps must be in (0, 1]");
    if (y.size() != code.encoded_length())
        throw input_error("concat_inner_pass: received word has length " +
                          std::to_string(y.size()) + ", expected " +
                          std::to_string(code.encoded_length()));
    const std::uint32_t block = code.inner_length();
    const Rational radius = (Rational(1) - eps) / Rational(2);
    std::vector<Symbol> picked(code.outer.length());
    for (std::uint32_t i = 0; i < code.outer.length(); ++i) {
        const auto list = hadamard_list_decode(y.subspan(std::size_t{i} * block, block),
                                               radius);
        Rng rng(derive_seed(seed, "inner-pick", i));
        picked[i] = list.empty() ? static_cast<Symbol>(rng.below(block))
                                 : static_cast<Symbol>(list[rng.below(list.size())]);
    }
    return picked;
}

/// Full decoder: inner pass, then a brute-force scan of the outer code for
/// codewords within `outer_radius` of the picked word.  Returns ascending
/// outer codeword indices.
inline std::vector<std::uint32_t> concat_list_decode(const ConcatCode& code,
                                                     std::span<const Symbol> y,
                                                     const Rational& eps,
                                                     std::uint64_t seed,
                                                     const Rational& outer_radius) {
    if (outer_radius < 0 || outer_radius > 1)
        throw input_error("concat_list_decode: outer radius must be in [0, 1]");
    const std::vector<Symbol> picked = concat_inner_pass(code, y, eps, seed);
    const auto r = static_cast<std::uint32_t>(
        rational_floor(outer_radius * Rational(code.outer.length())));
    std::vector<std::uint32_t> out;
    for (std::uint32_t j = 0; j < code.outer.size(); ++j) {
        std::uint32_t dist = 0;
        auto col = code.outer.column(j);
        for (std::uint32_t i = 0; i < code.outer.length() && dist <= r; ++i)
            if (col[i] != picked[i]) ++dist;
        if (dist <= r) out.push_back(j);
    }
    return out;
}

}  // namespace listop
