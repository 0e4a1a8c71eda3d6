// Shared scalar types, exception types and exact integer helpers used across
// the library.  Radii and probabilities are kept as exact rationals wherever a
// test or bound compares them against integer counts.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace listop {

using Symbol = std::uint64_t;                       // alphabet element in [0, q)
using Rational = boost::rational<std::int64_t>;     // radii, rates, small exact params
using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Invalid argument / malformed input (CLI exit code 2).
class input_error : public std::invalid_argument {
public:
    explicit input_error(const std::string& what) : std::invalid_argument(what) {}
};

/// An exhaustive enumeration would exceed the caller-supplied budget
/// (CLI exit code 3).  Exceeding a budget is always an error, never a
/// silent fallback to sampling.
class budget_error : public std::runtime_error {
public:
    explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

/// A randomized construction failed validation after the retry cap.
class construction_error : public std::runtime_error {
public:
    explicit construction_error(const std::string& what) : std::runtime_error(what) {}
};

/// Default enumeration budget: number of evaluations an exhaustive check may
/// spend before it must fail with budget_error.  The CLI allows overriding it
/// through the LISTOP_BUDGET environment variable.
inline constexpr std::uint64_t default_budget = std::uint64_t{1} << 24;

inline bool is_prime(std::uint64_t q) {
    if (q < 2) return false;
    for (std::uint64_t d = 2; d * d <= q; ++d)
        if (q % d == 0) return false;
    return true;
}

inline BigInt binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt r = 1;
    for (std::uint64_t i = 0; i < k; ++i) {
        r *= BigInt(n - i);
        r /= BigInt(i + 1);
    }
    return r;
}

inline BigInt big_pow(BigInt base, std::uint64_t e) {
    BigInt r = 1;
    while (e) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

/// q^t as a machine symbol value; throws when the product alphabet would not
/// fit the Symbol type.
inline std::uint64_t checked_pow(std::uint64_t q, std::uint64_t t) {
    BigInt r = big_pow(BigInt(q), t);
    if (r > BigInt(std::numeric_limits<std::uint64_t>::max()))
        throw input_error("alphabet size q^t exceeds the symbol range (q=" +
                          std::to_string(q) + ", t=" + std::to_string(t) + ")");
    return r.convert_to<std::uint64_t>();
}

/// floor(x) for a nonnegative rational.
inline std::int64_t rational_floor(const Rational& x) {
    if (x < 0) throw input_error("rational_floor: negative value");
    return x.numerator() / x.denominator();
}

/// ceil(a / b) for positive integers.
inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
    return (a + b - 1) / b;
}

/// floor of the k-th root of a nonnegative big integer.
inline BigInt integer_kth_root(const BigInt& v, std::uint64_t k) {
    if (v < 0) throw input_error("integer_kth_root: negative value");
    if (k == 0) throw input_error("integer_kth_root: k must be positive");
    if (v <= 1 || k == 1) return v;
    BigInt lo = 0, hi = 1;
    while (big_pow(hi, k) <= v) hi <<= 1;
    while (lo + 1 < hi) {
        BigInt mid = (lo + hi) / 2;
        if (big_pow(mid, k) <= v) lo = mid;
        else hi = mid;
    }
    return lo;
}

inline double to_double(const Rational& x) {
    return static_cast<double>(x.numerator()) / static_cast<double>(x.denominator());
}

inline double to_double(const BigRational& x) {
    return x.convert_to<double>();
}

/// "num/den" (or plain integer) rendering, used by JSON/CSV serializations
/// that must stay exact.
inline std::string rational_to_string(const Rational& x) {
    if (x.denominator() == 1) return std::to_string(x.numerator());
    return std::to_string(x.numerator()) + "/" + std::to_string(x.denominator());
}

inline Rational rational_from_string(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(std::stoll(s), 1);
        std::int64_t num = std::stoll(s.substr(0, slash));
        std::int64_t den = std::stoll(s.substr(slash + 1));
        if (den == 0) throw input_error("rational: zero denominator: " + s);
        return Rational(num, den);
    } catch (const std::invalid_argument&) {
        throw input_error("malformed rational: " + s);
    } catch (const std::out_of_range&) {
        throw input_error("rational out of range: " + s);
    }
}

}  // namespace listop
