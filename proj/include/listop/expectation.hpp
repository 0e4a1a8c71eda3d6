#pragma once
// Monte-Carlo estimators for the expected plurality mass of a randomly
// transformed code: the fixed-list expectation, its maximum over candidate
// lists (exact enumeration or greedy ascent), the reversed per-draw maximum,
// the closed-form bound template those estimates are compared against, and
// the paired with/without-replacement comparison.
//
// All estimators derive per-trial seeds from the same label so that runs with
// a shared master seed see identical transformation draws (common random
// numbers).  Reductions are compensated sums taken in trial order, so results
// are bit-stable regardless of threading in callers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "listop/code_matrix.hpp"
#include "listop/common.hpp"
#include "listop/oracles.hpp"
#include "listop/row_ops.hpp"

namespace listop {

enum class LambdaMode { fixed, exact, heuristic };

inline const char* lambda_mode_name(LambdaMode m) {
    switch (m) {
        case LambdaMode::fixed: return "fixed-lambda";
        case LambdaMode::exact: return "max-lambda-exact";
        case LambdaMode::heuristic: return "max-lambda-heuristic";
    }
    throw input_error("lambda_mode_name: unknown mode");
}

struct EstimateSummary {
    double mean = 0.0;
    double std_dev = 0.0;  // sample standard deviation of per-trial values
    std::uint32_t trials = 0;
    std::uint64_t seed = 0;
    LambdaMode mode = LambdaMode::fixed;

    double std_error() const {
        return trials > 0 ? std_dev / std::sqrt(static_cast<double>(trials)) : 0.0;
    }
};

namespace detail {

constexpr const char* trial_label = "expectation-trial";

/// Compensated (Kahan) sum taken in index order.
class KahanSum {
  public:
    void add(double x) {
        const double y = x - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline EstimateSummary summarize(const std::vector<double>& values,
                                 std::uint64_t seed, LambdaMode mode) {
    KahanSum s;
    for (double v : values) s.add(v);
    const double mean = s.value() / static_cast<double>(values.size());
    KahanSum sq;
    for (double v : values) sq.add((v - mean) * (v - mean));
    EstimateSummary out;
    out.mean = mean;
    out.std_dev = values.size() > 1
                      ? std::sqrt(sq.value() / static_cast<double>(values.size() - 1))
                      : 0.0;
    out.trials = static_cast<std::uint32_t>(values.size());
    out.seed = seed;
    out.mode = mode;
    return out;
}

inline void validate_lambda(const std::vector<std::uint32_t>& lambda,
                            std::uint32_t n_cols) {
    if (lambda.empty()) throw input_error("estimate: empty candidate list");
    for (std::uint32_t idx : lambda)
        if (idx >= n_cols)
            throw input_error("estimate: list index " + std::to_string(idx) +
                              " out of range for " + std::to_string(n_cols) +
                              " columns");
}

inline void check_subset_budget(std::uint32_t n_cols, std::uint32_t l,
                                std::uint64_t cap, const char* who) {
    if (l == 0 || l > n_cols)
        throw input_error(std::string(who) + ": list size must be in [1, N0]");
    if (binomial(n_cols, l) > BigInt(cap))
        throw budget_error(std::string(who) + ": C(" + std::to_string(n_cols) +
                           "," + std::to_string(l) + ") candidate lists exceed cap " +
                           std::to_string(cap));
}

}  // namespace detail

/// Monte-Carlo mean, over draws of the row operation described by `params`,
/// of the maximum total agreement between any center and the transformed
/// columns indexed by `lambda`.  The inner maximum over centers is computed
/// exactly through per-row pluralities; no center enumeration takes place.
inline EstimateSummary estimate_E_fixed(const CodeMatrix& c0,
                                        const RowOpParams& params,
                                        const std::vector<std::uint32_t>& lambda,
                                        std::uint32_t trials, std::uint64_t seed) {
    if (trials == 0) throw input_error("estimate_E_fixed: trials must be positive");
    detail::validate_lambda(lambda, c0.size());
    std::vector<double> values;
    values.reserve(trials);
    for (std::uint32_t t = 0; t < trials; ++t) {
        const auto f = draw_row_operation(params, derive_seed(seed, detail::trial_label, t));
        const CodeMatrix image = apply_row_op(c0, f);
        values.push_back(static_cast<double>(max_agreement_sum(image, lambda)));
    }
    return detail::summarize(values, seed, LambdaMode::fixed);
}

/// Maximum of estimate_E_fixed over candidate lists of size `l`.  With
/// LambdaMode::exact all C(N0, l) lists are scored (budget-capped); with
/// LambdaMode::heuristic a greedy swap ascent is used.  Candidates share the
/// transformation draws, so the comparison between lists is paired.
inline EstimateSummary estimate_E(const CodeMatrix& c0, const RowOpParams& params,
                                  std::uint32_t l, std::uint32_t trials,
                                  std::uint64_t seed,
                                  LambdaMode mode = LambdaMode::exact,
                                  std::uint64_t cap = 100000) {
    if (trials == 0) throw input_error("estimate_E: trials must be positive");
    if (l == 0 || l > c0.size())
        throw input_error("estimate_E: list size must be in [1, N0]");

    std::vector<std::uint32_t> best;
    if (mode == LambdaMode::exact) {
        detail::check_subset_budget(c0.size(), l, cap, "estimate_E");
        // One pass over trials, scoring every candidate list on the same
        // draw; the argmax is re-summarized afterwards by replaying seeds.
        std::vector<detail::KahanSum> sums;
        {
            std::vector<std::uint32_t> idx(l);
            for (std::uint32_t i = 0; i < l; ++i) idx[i] = i;
            do {
                sums.emplace_back();
            } while (detail::next_combination(idx, c0.size()));
        }
        for (std::uint32_t t = 0; t < trials; ++t) {
            const auto f =
                draw_row_operation(params, derive_seed(seed, detail::trial_label, t));
            const CodeMatrix image = apply_row_op(c0, f);
            std::vector<std::uint32_t> idx(l);
            for (std::uint32_t i = 0; i < l; ++i) idx[i] = i;
            std::size_t k = 0;
            do {
                sums[k++].add(static_cast<double>(max_agreement_sum(image, idx)));
            } while (detail::next_combination(idx, c0.size()));
        }
        std::size_t arg = 0;
        for (std::size_t k = 1; k < sums.size(); ++k)
            if (sums[k].value() > sums[arg].value()) arg = k;
        std::vector<std::uint32_t> idx(l);
        for (std::uint32_t i = 0; i < l; ++i) idx[i] = i;
        for (std::size_t k = 0; k != arg; ++k) detail::next_combination(idx, c0.size());
        best = idx;
    } else if (mode == LambdaMode::heuristic) {
        // Cache the transformed codes once; greedy ascent then re-scores
        // candidate lists against the same draws.
        std::vector<CodeMatrix> images;
        images.reserve(trials);
        for (std::uint32_t t = 0; t < trials; ++t) {
            const auto f =
                draw_row_operation(params, derive_seed(seed, detail::trial_label, t));
            images.push_back(apply_row_op(c0, f));
        }
        auto score = [&](const std::vector<std::uint32_t>& idx) {
            detail::KahanSum s;
            for (const auto& image : images)
                s.add(static_cast<double>(max_agreement_sum(image, idx)));
            return s.value();
        };
        best.resize(l);
        for (std::uint32_t i = 0; i < l; ++i) best[i] = i;
        std::vector<bool> used(c0.size(), false);
        for (std::uint32_t i : best) used[i] = true;
        double cur = score(best);
        bool improved = true;
        while (improved) {
            improved = false;
            for (std::uint32_t pos = 0; pos < l; ++pos) {
                for (std::uint32_t j = 0; j < c0.size(); ++j) {
                    if (used[j]) continue;
                    const std::uint32_t old = best[pos];
                    best[pos] = j;
                    const double cand = score(best);
                    if (cand > cur) {
                        cur = cand;
                        used[old] = false;
                        used[j] = true;
                        improved = true;
                    } else {
                        best[pos] = old;
                    }
                }
            }
        }
        std::sort(best.begin(), best.end());
    } else {
        throw input_error("estimate_E: mode must select a maximization strategy");
    }

    EstimateSummary out = estimate_E_fixed(c0, params, best, trials, seed);
    out.mode = mode;
    return out;
}

/// Monte-Carlo mean of the per-draw maximum, over every size-`l` candidate
/// list, of the plurality mass.  Exceeding `cap` candidate lists per trial is
/// a budget error.
inline EstimateSummary estimate_reversed(const CodeMatrix& c0,
                                         const RowOpParams& params, std::uint32_t l,
                                         std::uint32_t trials, std::uint64_t seed,
                                         std::uint64_t cap = 100000) {
    if (trials == 0) throw input_error("estimate_reversed: trials must be positive");
    detail::check_subset_budget(c0.size(), l, cap, "estimate_reversed");
    std::vector<double> values;
    values.reserve(trials);
    for (std::uint32_t t = 0; t < trials; ++t) {
        const auto f = draw_row_operation(params, derive_seed(seed, detail::trial_label, t));
        const CodeMatrix image = apply_row_op(c0, f);
        std::uint64_t top = 0;
        std::vector<std::uint32_t> idx(l);
        for (std::uint32_t i = 0; i < l; ++i) idx[i] = i;
        do {
            top = std::max(top, max_agreement_sum(image, idx));
        } while (detail::next_combination(idx, c0.size()));
        values.push_back(static_cast<double>(top));
    }
    return detail::summarize(values, seed, LambdaMode::exact);
}

struct MainBoundParams {
    std::uint32_t list_size = 2;   // L
    std::uint32_t code_size = 2;   // N
    std::uint32_t length = 1;      // n
    double constant = 1.0;         // fitted absolute constant C
    bool alphabet_binary = false;
};

namespace detail {

inline void validate_bound_params(const MainBoundParams& p) {
    if (p.list_size < 2) throw input_error("main_bound: list size must be at least 2");
    if (p.code_size < p.list_size)
        throw input_error("main_bound: code size must be at least the list size");
    if (p.length == 0) throw input_error("main_bound: length must be positive");
    if (!(p.constant >= 0)) throw input_error("main_bound: constant must be nonnegative");
}

inline double bound_scale(const MainBoundParams& p) {
    const double ln_n_cols = std::log(static_cast<double>(p.code_size));
    if (p.alphabet_binary)
        return static_cast<double>(p.list_size) *
               std::sqrt(static_cast<double>(p.length) * ln_n_cols);
    const double ln_l = std::log(static_cast<double>(p.list_size));
    return static_cast<double>(p.list_size) * ln_n_cols * std::pow(ln_l, 5);
}

}  // namespace detail

/// Bound template for the reversed expectation: E + Y + sqrt(E * Y) with
/// Y = C * L * ln(N) * ln^5(L), or E + C * L * sqrt(n ln N) over a binary
/// alphabet.
inline double main_bound(double e_value, const MainBoundParams& p) {
    detail::validate_bound_params(p);
    if (!(e_value >= 0)) throw input_error("main_bound: expectation must be nonnegative");
    const double scaled = p.constant * detail::bound_scale(p);
    if (p.alphabet_binary) return e_value + scaled;
    return e_value + scaled + std::sqrt(e_value * scaled);
}

/// Smallest constant C for which `reversed_mean <= main_bound(e_mean, ...)`
/// holds; zero when the reversed estimate is already below the expectation.
inline double fit_main_constant(double reversed_mean, double e_mean,
                                MainBoundParams p) {
    p.constant = 0.0;
    detail::validate_bound_params(p);
    if (!(e_mean >= 0)) throw input_error("fit_main_constant: expectation must be nonnegative");
    const double gap = reversed_mean - e_mean;
    if (gap <= 0) return 0.0;
    const double scale = detail::bound_scale(p);
    if (p.alphabet_binary) return gap / scale;
    // Solve Y + sqrt(E Y) = gap for Y = s^2: s^2 + sqrt(E) s - gap = 0.
    const double s = (-std::sqrt(e_mean) + std::sqrt(e_mean + 4.0 * gap)) / 2.0;
    return (s * s) / scale;
}

struct DominanceResult {
    double mean_with = 0.0;
    double mean_without = 0.0;
    double delta = 0.0;    // mean_with - mean_without
    double z_score = 0.0;  // delta over the paired standard error
    std::uint32_t trials = 0;
    std::uint64_t seed = 0;
};

/// Paired comparison of the per-draw maximum plurality mass under the
/// with-replacement sampler and its without-replacement counterpart
/// (coordinate sampling vs puncturing, aggregation vs folding).  Both arms
/// of each trial share a seed.
inline DominanceResult replacement_dominance_test(const CodeMatrix& c0,
                                                  const RowOpParams& params,
                                                  std::uint32_t l, std::uint32_t trials,
                                                  std::uint64_t seed,
                                                  std::uint64_t cap = 100000) {
    if (trials == 0)
        throw input_error("replacement_dominance_test: trials must be positive");
    detail::check_subset_budget(c0.size(), l, cap, "replacement_dominance_test");

    RowOpParams with = params;
    RowOpParams without = params;
    switch (params.kind) {
        case RowOpKind::sampling:
        case RowOpKind::puncturing:
            with.kind = RowOpKind::sampling;
            without.kind = RowOpKind::puncturing;
            with.t = without.t = 1;
            break;
        case RowOpKind::aggregate_t:
        case RowOpKind::fold_t: {
            if (params.t == 0 || params.n0 % params.t != 0)
                throw input_error(
                    "replacement_dominance_test: arity must divide the source length");
            const std::uint32_t folded = params.n0 / params.t;
            if (params.n != 0 && params.n != folded)
                throw input_error(
                    "replacement_dominance_test: output length must match n0/t");
            with.kind = RowOpKind::aggregate_t;
            without.kind = RowOpKind::fold_t;
            with.n = without.n = folded;
            break;
        }
        default:
            throw input_error(
                "replacement_dominance_test: only sampling/puncturing and "
                "aggregation/folding form replacement pairs");
    }

    auto reversed_value = [&](const RowOpParams& p, std::uint64_t s) {
        const CodeMatrix image = apply_row_op(c0, draw_row_operation(p, s));
        std::uint64_t top = 0;
        std::vector<std::uint32_t> idx(l);
        for (std::uint32_t i = 0; i < l; ++i) idx[i] = i;
        do {
            top = std::max(top, max_agreement_sum(image, idx));
        } while (detail::next_combination(idx, c0.size()));
        return static_cast<double>(top);
    };

    std::vector<double> vw, vo;
    vw.reserve(trials);
    vo.reserve(trials);
    for (std::uint32_t t = 0; t < trials; ++t) {
        const std::uint64_t s = derive_seed(seed, detail::trial_label, t);
        vw.push_back(reversed_value(with, s));
        vo.push_back(reversed_value(without, s));
    }

    DominanceResult r;
    r.trials = trials;
    r.seed = seed;
    r.mean_with = detail::summarize(vw, seed, LambdaMode::exact).mean;
    r.mean_without = detail::summarize(vo, seed, LambdaMode::exact).mean;
    r.delta = r.mean_with - r.mean_without;
    std::vector<double> diff(trials);
    for (std::uint32_t t = 0; t < trials; ++t) diff[t] = vw[t] - vo[t];
    const auto d = detail::summarize(diff, seed, LambdaMode::exact);
    const double se = d.std_error();
    if (se > 0)
        r.z_score = r.delta / se;
    else
        r.z_score = r.delta == 0 ? 0.0
                                 : std::copysign(std::numeric_limits<double>::infinity(),
                                                 r.delta);
    return r;
}

}  // namespace listop
