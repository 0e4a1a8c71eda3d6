#pragma once
// Flat-file code format: a header line `q=<q> n=<n> N=<N>` followed by N
// lines, each holding one codeword as n space-separated base-10 symbols.
// LF line endings; loading is strict and reports the offending line number.

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "listop/code_matrix.hpp"
#include "listop/common.hpp"

namespace listop {

namespace detail {

inline std::uint64_t parse_code_integer(const std::string& token,
                                        const std::string& where) {
    std::size_t pos = 0;
    std::uint64_t value = 0;
    try {
        value = std::stoull(token, &pos);
    } catch (const std::exception&) {
        throw input_error(where + ": malformed integer '" + token + "'");
    }
    if (pos != token.size() || token.empty() || token[0] == '-' || token[0] == '+')
        throw input_error(where + ": malformed integer '" + token + "'");
    return value;
}

inline std::uint64_t parse_header_field(const std::string& token, const char* key,
                                        const std::string& where) {
    const std::string prefix = std::string(key) + "=";
    if (token.rfind(prefix, 0) != 0)
        throw input_error(where + ": expected '" + prefix + "<value>', found '" +
                          token + "'");
    return parse_code_integer(token.substr(prefix.size()), where);
}

}  // namespace detail

inline CodeMatrix load_code(std::istream& in, const std::string& name = "<stream>") {
    std::string line;
    if (!std::getline(in, line))
        throw input_error(name + ":1: missing header line");
    std::istringstream header(line);
    std::string tq, tn, tN, extra;
    if (!(header >> tq >> tn >> tN))
        throw input_error(name + ":1: header must be 'q=<q> n=<n> N=<N>'");
    if (header >> extra)
        throw input_error(name + ":1: trailing content after header: '" + extra + "'");
    const std::uint64_t q = detail::parse_header_field(tq, "q", name + ":1");
    const std::uint64_t n = detail::parse_header_field(tn, "n", name + ":1");
    const std::uint64_t N = detail::parse_header_field(tN, "N", name + ":1");
    if (q < 2) throw input_error(name + ":1: alphabet size q must be at least 2");
    if (n == 0) throw input_error(name + ":1: block length n must be positive");
    if (N == 0) throw input_error(name + ":1: a code must contain at least one codeword");
    if (n > 0xFFFFFFFFull || N > 0xFFFFFFFFull)
        throw input_error(name + ":1: dimensions exceed supported range");

    CodeMatrix c(q, static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(N));
    for (std::uint64_t j = 0; j < N; ++j) {
        const std::string where = name + ":" + std::to_string(j + 2);
        if (!std::getline(in, line))
            throw input_error(where + ": unexpected end of file (expected " +
                              std::to_string(N) + " codewords)");
        std::istringstream row(line);
        std::string token;
        for (std::uint64_t i = 0; i < n; ++i) {
            if (!(row >> token))
                throw input_error(where + ": codeword has fewer than " +
                                  std::to_string(n) + " symbols");
            const std::uint64_t s = detail::parse_code_integer(token, where);
            if (s >= q)
                throw input_error(where + ": symbol " + std::to_string(s) +
                                  " out of range for q=" + std::to_string(q));
            c.set(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                  static_cast<Symbol>(s));
        }
        if (row >> token)
            throw input_error(where + ": codeword has more than " + std::to_string(n) +
                              " symbols");
    }
    if (std::getline(in, line))
        throw input_error(name + ":" + std::to_string(N + 2) +
                          ": trailing content after the last codeword");
    return c;
}

inline CodeMatrix load_code_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open code file: " + path);
    return load_code(in, path);
}

inline void save_code(std::ostream& out, const CodeMatrix& c) {
    out << "q=" << c.q() << " n=" << c.length() << " N=" << c.size() << "\n";
    for (std::uint32_t j = 0; j < c.size(); ++j) {
        auto col = c.column(j);
        for (std::uint32_t i = 0; i < c.length(); ++i) {
            if (i) out << ' ';
            out << static_cast<std::uint64_t>(col[i]);
        }
        out << "\n";
    }
}

inline void save_code_file(const std::string& path, const CodeMatrix& c) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot open code file for writing: " + path);
    save_code(out, c);
    out.flush();
    if (!out) throw input_error("failed while writing code file: " + path);
}

}  // namespace listop
