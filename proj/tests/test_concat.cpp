// Hadamard-inner concatenation and its three-step randomized list decoder.
#include <catch2/catch_amalgamated.hpp>

#include "listop/concat.hpp"
#include "listop/constructions.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

using namespace listop;

namespace {

// Independent inner-bit oracle: explicit dot product of the bit expansions.
Symbol inner_bit(std::uint32_t message, std::uint32_t position) {
    unsigned acc = 0;
    for (unsigned b = 0; b < 20; ++b) acc += ((message >> b) & 1u) & ((position >> b) & 1u);
    return static_cast<Symbol>(acc & 1u);
}

std::vector<Symbol> inner_encoding(std::uint32_t message, std::uint32_t k) {
    std::vector<Symbol> w(std::size_t{1} << k);
    for (std::uint32_t x = 0; x < w.size(); ++x) w[x] = inner_bit(message, x);
    return w;
}

std::uint32_t dist(std::span<const Symbol> a, std::span<const Symbol> b) {
    std::uint32_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) ++d;
    return d;
}

}  // namespace

TEST_CASE("concatenated encoding") {
    auto code = make_concat_code(reed_solomon(5, 2, {0, 1, 2, 3, 4}), 3);

    SECTION("shape and the all-zero codeword") {
        REQUIRE(code.encoded_length() == 5 * 8);
        auto y = concat_encode(code, 0);  // constant-zero polynomial
        REQUIRE(y.size() == 40);
        REQUIRE(std::count(y.begin(), y.end(), Symbol{0}) == 40);
    }
    SECTION("each outer symbol becomes its inner encoding") {
        auto y = concat_encode(code, 5);  // p(x) = x evaluates to 0,1,2,3,4
        for (std::uint32_t i = 0; i < 5; ++i) {
            auto expect = inner_encoding(i, 3);
            for (std::uint32_t x = 0; x < 8; ++x) REQUIRE(y[i * 8 + x] == expect[x]);
        }
    }
    SECTION("a single-position outer code transmits one inner row") {
        auto one = make_concat_code(
            CodeMatrix::from_codewords(8, {std::vector<Symbol>{6}}), 3);
        REQUIRE(concat_encode(one, 0) == inner_encoding(6, 3));
    }
    SECTION("validation") {
        REQUIRE_THROWS_AS(concat_encode(code, 25), input_error);
        REQUIRE_THROWS_AS(make_concat_code(reed_solomon(5, 1, {0, 1, 2}), 2),
                          input_error);
        REQUIRE_THROWS_AS(make_concat_code(reed_solomon(5, 1, {0, 1, 2}), 0),
                          input_error);
    }
}

TEST_CASE("inner list decoding") {
    SECTION("radius zero recovers exactly the transmitted message") {
        for (std::uint32_t k = 1; k <= 4; ++k)
            for (std::uint32_t m = 0; m < (1u << k); ++m) {
                auto y = inner_encoding(m, k);
                REQUIRE(hadamard_list_decode(y, Rational(0)) ==
                        std::vector<std::uint32_t>{m});
            }
    }
    SECTION("the all-zero word at radius one quarter") {
        std::vector<Symbol> y(4, 0);
        REQUIRE(hadamard_list_decode(y, Rational(1, 4)) ==
                std::vector<std::uint32_t>{0});
    }
    SECTION("list sizes satisfy the Johnson guarantee, exhaustively") {
        // radius 1/2 - eps/2 keeps lists at or below 8/eps^2.
        for (std::uint32_t k = 2; k <= 4; ++k) {
            const std::uint32_t block = 1u << k;
            for (std::uint32_t word = 0; word < (1u << block); ++word) {
                std::vector<Symbol> y(block);
                for (std::uint32_t x = 0; x < block; ++x)
                    y[x] = static_cast<Symbol>((word >> x) & 1u);
                REQUIRE(hadamard_list_decode(y, Rational(1, 4)).size() <= 32);  // eps 1/2
                REQUIRE(hadamard_list_decode(y, Rational(0)).size() <= 8);      // eps 1
            }
        }
    }
    SECTION("list sizes satisfy the Johnson guarantee on sampled long words") {
        for (std::uint32_t k : {5u, 6u}) {
            const std::uint32_t block = 1u << k;
            Rng rng(derive_seed(4040, "johnson-words", k));
            for (int trial = 0; trial < 200; ++trial) {
                std::vector<Symbol> y(block);
                for (auto& s : y) s = static_cast<Symbol>(rng.below(2));
                REQUIRE(hadamard_list_decode(y, Rational(1, 4)).size() <= 32);
                REQUIRE(hadamard_list_decode(y, Rational(3, 8)).size() <= 128);  // eps 1/4
            }
        }
    }
    SECTION("validation") {
        std::vector<Symbol> y{0, 1, 0};
        REQUIRE_THROWS_AS(hadamard_list_decode(y, Rational(0)), input_error);
        std::vector<Symbol> bad{0, 2, 0, 1};
        REQUIRE_THROWS_AS(hadamard_list_decode(bad, Rational(0)), input_error);
        std::vector<Symbol> ok(4, 0);
        REQUIRE_THROWS_AS(hadamard_list_decode(ok, Rational(3, 2)), input_error);
    }
}

TEST_CASE("concatenated list decoding") {
    auto code = make_concat_code(reed_solomon(5, 2, {0, 1, 2, 3, 4}), 3);

    SECTION("noiseless transmission decodes to exactly the sent codeword") {
        for (std::uint32_t j : {0u, 7u, 24u}) {
            auto y = concat_encode(code, j);
            // eps = 1 makes the inner radius zero: every inner list is the
            // transmitted symbol alone, so the outer scan sees the codeword.
            auto list = concat_list_decode(code, y, Rational(1), 99, Rational(0));
            REQUIRE(list == std::vector<std::uint32_t>{j});
        }
    }
    SECTION("identical seeds give identical lists") {
        auto y = concat_encode(code, 13);
        for (std::uint32_t i = 0; i < 16; ++i) y[i] ^= 1;  // corrupt two blocks
        auto a = concat_list_decode(code, y, Rational(1, 4), 31337, Rational(1, 2));
        auto b = concat_list_decode(code, y, Rational(1, 4), 31337, Rational(1, 2));
        REQUIRE(a == b);
        REQUIRE(std::is_sorted(a.begin(), a.end()));
    }
    SECTION("survives an adversarial clean-substitution corruption") {
        // One of five blocks is replaced by the encoding of a different
        // symbol (a fifth of the word, within the 1/2 - eps budget for
        // eps = 1/4).  The remaining blocks keep their singleton lists, so
        // the transmitted codeword stays within outer radius 1/4.
        const std::uint32_t j = 17;
        auto y = concat_encode(code, j);
        const auto wrong = inner_encoding(
            (static_cast<std::uint32_t>(code.outer.at(0, j)) + 1) % 8, 3);
        std::copy(wrong.begin(), wrong.end(), y.begin());
        int hits = 0;
        for (int trial = 0; trial < 500; ++trial) {
            auto list = concat_list_decode(code, y, Rational(1, 4),
                                           derive_seed(5, "adversarial", trial),
                                           Rational(1, 4));
            if (std::find(list.begin(), list.end(), j) != list.end()) ++hits;
        }
        REQUIRE(hits >= 250);
    }
    SECTION("an undecodable block falls back to a uniform pick") {
        // The word 11110000 sits at distance 4 from all eight inner
        // codewords, so at inner radius 3/8 its list is empty.
        std::vector<Symbol> far{1, 1, 1, 1, 0, 0, 0, 0};
        for (std::uint32_t m = 0; m < 8; ++m)
            REQUIRE(dist(far, inner_encoding(m, 3)) >= 4);
        const std::uint32_t j = 11;
        auto y = concat_encode(code, j);
        std::copy(far.begin(), far.end(), y.begin() + 16);  // position 2
        bool saw_wrong_pick = false;
        for (int trial = 0; trial < 100; ++trial) {
            const std::uint64_t seed = derive_seed(6, "fallback", trial);
            auto picked = concat_inner_pass(code, y, Rational(1, 4), seed);
            for (std::uint32_t i = 0; i < 5; ++i)
                if (i != 2) REQUIRE(picked[i] == code.outer.at(i, j));
            if (picked[2] != code.outer.at(2, j)) saw_wrong_pick = true;
            auto list = concat_list_decode(code, y, Rational(1, 4), seed, Rational(1, 4));
            REQUIRE(std::find(list.begin(), list.end(), j) != list.end());
        }
        REQUIRE(saw_wrong_pick);  // the fallback really is random
    }
    SECTION("validation") {
        auto y = concat_encode(code, 0);
        y.pop_back();
        REQUIRE_THROWS_AS(concat_list_decode(code, y, Rational(1), 1, Rational(0)),
                          input_error);
        y.push_back(0);
        REQUIRE_THROWS_AS(concat_list_decode(code, y, Rational(0), 1, Rational(0)),
                          input_error);
        REQUIRE_THROWS_AS(concat_list_decode(code, y, Rational(1), 1, Rational(2)),
                          input_error);
    }
}

TEST_CASE("picked words agree with the transmitted outer codeword") {
    auto code = make_concat_code(reed_solomon(5, 2, {0, 1, 2, 3, 4}), 3);
    const std::uint32_t j = 19;

    // Against a corruption budget of max(0, 1/2 - eps) the picked word must
    // agree with the outer codeword on at least an eps^3/8 fraction of
    // positions in at least half the trials.
    SECTION("at eps 1/2 and 1 the budget is empty") {
        for (auto eps : {Rational(1, 2), Rational(1)}) {
            auto y = concat_encode(code, j);
            int good = 0;
            for (int trial = 0; trial < 40; ++trial) {
                auto picked = concat_inner_pass(code, y, eps,
                                                derive_seed(7, "propagation", trial));
                std::uint32_t agree = 0;
                for (std::uint32_t i = 0; i < 5; ++i)
                    if (picked[i] == code.outer.at(i, j)) ++agree;
                const Rational frac(agree, 5);
                if (frac >= eps * eps * eps / Rational(8)) ++good;
            }
            REQUIRE(good >= 20);
        }
    }
    SECTION("a genuinely corrupting budget at eps 1/4") {
        auto y = concat_encode(code, j);
        // Corrupt a quarter of the word: substitute one block cleanly and
        // scramble half of another.
        const auto wrong = inner_encoding(
            (static_cast<std::uint32_t>(code.outer.at(4, j)) + 3) % 8, 3);
        std::copy(wrong.begin(), wrong.end(), y.begin() + 32);
        for (std::uint32_t x = 0; x < 2; ++x) y[8 + x] ^= 1;
        int good = 0;
        for (int trial = 0; trial < 200; ++trial) {
            auto picked = concat_inner_pass(code, y, Rational(1, 4),
                                            derive_seed(8, "propagation", trial));
            std::uint32_t agree = 0;
            for (std::uint32_t i = 0; i < 5; ++i)
                if (picked[i] == code.outer.at(i, j)) ++agree;
            if (Rational(agree, 5) >= Rational(1, 512)) ++good;  // (1/4)^3 / 8
        }
        REQUIRE(good >= 100);
    }
}
