// Closed-form bound evaluators: q-ary entropy and capacity, the three
// average-radius Johnson bounds, a Chernoff tail bound, the list-size
// radius-transfer bound, and the max-to-average parameter map.
//
// All evaluators are double precision; formula-domain violations raise
// input_error instead of clamping.  Asymptotic o(1)/O(r) terms are dropped
// and flagged, never silently absorbed.
#pragma once

#include "listop/common.hpp"

#include <cmath>
#include <utility>

namespace listop {

/// q-ary entropy H_q(x) = x log_q(q-1) - x log_q x - (1-x) log_q(1-x),
/// with 0*log 0 = 0.  H_q(1-1/q) = 1.
inline double entropy_q(std::uint64_t q, double x) {
    if (q < 2) throw input_error("entropy_q: q must be at least 2");
    if (x < 0.0 || x > 1.0) throw input_error("entropy_q: x must lie in [0,1]");
    const double lq = std::log(static_cast<double>(q));
    double h = x * std::log(static_cast<double>(q - 1)) / lq;
    if (x > 0.0) h -= x * std::log(x) / lq;
    if (x < 1.0) h -= (1.0 - x) * std::log(1.0 - x) / lq;
    return h;
}

struct CapacityRate {
    double exact;      // 1 - H_q(1 - 1/q - eps)
    double expansion;  // min{eps, q*eps^2 / (2 ln q)}, cubic term dropped
};

/// List-decoding capacity rate at radius 1 - 1/q - eps, exact and the
/// small-eps expansion (natural logs; the dropped O_q(eps^3) term makes the
/// expansion a factor ~q/(q-1) low at small q).
inline CapacityRate capacity_rate(std::uint64_t q, double eps) {
    if (q < 2) throw input_error("capacity_rate: q must be at least 2");
    const double max_eps = 1.0 - 1.0 / static_cast<double>(q);
    if (eps <= 0.0 || eps > max_eps)
        throw input_error("capacity_rate: eps must lie in (0, 1-1/q]");
    double exact = 1.0 - entropy_q(q, max_eps - eps);
    double quad = static_cast<double>(q) * eps * eps / (2.0 * std::log(static_cast<double>(q)));
    return {exact, std::min(eps, quad)};
}

enum class JohnsonVariant { binary, q_eps, q_sqrt };

/// Right-hand sides of the three average-radius Johnson bounds.  `sum_d` is
/// the sum of *relative* distances over ordered distinct pairs of the list,
/// so it lies in [0, L(L-1)].
inline double johnson_rhs(JohnsonVariant variant, double n, std::uint32_t L, std::uint64_t q,
                          double sum_d, double eps = 0.0) {
    if (L == 0) throw input_error("johnson_rhs: L must be positive");
    const double Ld = static_cast<double>(L);
    if (sum_d < 0.0 || sum_d > Ld * (Ld - 1.0))
        throw input_error("johnson_rhs: sum of pairwise distances outside [0, L(L-1)]");
    switch (variant) {
        case JohnsonVariant::binary: {
            double radicand = Ld * Ld - 2.0 * sum_d;
            if (radicand < 0.0)
                throw input_error("johnson_rhs: negative radicand in binary variant");
            return (n / 2.0) * (Ld + std::sqrt(radicand));
        }
        case JohnsonVariant::q_eps: {
            if (eps <= 0.0 || eps >= 1.0)
                throw input_error("johnson_rhs: q-eps variant needs eps in (0,1)");
            if (q < 2) throw input_error("johnson_rhs: q must be at least 2");
            const double qd = static_cast<double>(q);
            return n * Ld / qd + (n * Ld / (2.0 * eps)) * (1.0 + eps * eps) * (1.0 - 1.0 / qd) -
                   (n / (2.0 * Ld * eps)) * sum_d;
        }
        case JohnsonVariant::q_sqrt: {
            double radicand = n * n + 4.0 * n * n * Ld * (Ld - 1.0) - 4.0 * n * n * sum_d;
            if (radicand < 0.0)
                throw input_error("johnson_rhs: negative radicand in q-sqrt variant");
            return 0.5 * (n + std::sqrt(radicand));
        }
    }
    throw input_error("johnson_rhs: unknown variant");
}

/// Chernoff bound (pm/t)^(t-pm) on Pr[sum of m Bernoulli(p) > t], t > pm.
inline double chernoff_bound(double p, std::uint32_t m, double t) {
    if (p <= 0.0 || p >= 1.0) throw input_error("chernoff_bound: p must lie in (0,1)");
    const double pm = p * static_cast<double>(m);
    if (t <= pm) throw input_error("chernoff_bound: t must exceed p*m");
    return std::pow(pm / t, t - pm);
}

struct TransferBound {
    double value;
    bool o1_dropped = true;  // the asymptotic o(1) exponent term is omitted
};

/// List-size transfer bound L' <= L * q^{n(H_q(rho')-H_q(rho))} * 2^n for
/// enlarging the decoding radius from rho to rho' < 1 - 1/q.
inline TransferBound eb_transfer_bound(std::uint32_t L, std::uint64_t q, std::uint32_t n,
                                       double rho, double rho_prime) {
    if (rho < 0.0 || rho > rho_prime || rho_prime >= 1.0 - 1.0 / static_cast<double>(q))
        throw input_error("eb_transfer_bound: need 0 <= rho <= rho' < 1 - 1/q");
    double expo = static_cast<double>(n) * (entropy_q(q, rho_prime) - entropy_q(q, rho));
    double value = static_cast<double>(L) * std::pow(static_cast<double>(q), expo) *
                   std::pow(2.0, static_cast<double>(n));
    return {value, true};
}

/// Max-to-average parameter map: (rho, L)-list-decodable implies
/// (rho - gamma, ceil(L/gamma))-average-radius list-decodable.
inline std::pair<Rational, std::uint32_t> max_to_avg_params(const Rational& rho, std::uint32_t L,
                                                            const Rational& gamma) {
    if (gamma <= Rational(0) || gamma >= rho)
        throw input_error("max_to_avg_params: need 0 < gamma < rho");
    Rational Lq = Rational(L) / gamma;
    std::int64_t Lp = Lq.numerator() / Lq.denominator();
    if (Rational(Lp) < Lq) ++Lp;  // ceiling
    return {rho - gamma, static_cast<std::uint32_t>(Lp)};
}

}  // namespace listop
