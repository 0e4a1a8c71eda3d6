#pragma once
// Experiment harness behind the command-line tool: JSON scenario configs
// (strict keys, preset parameter formulas), deterministic trial seeding,
// optional trial-level threading with order-insensitive reduction, and CSV
// emission with the resolved configuration echoed into the header.
//
// Output structure is byte-stable: comments and rows depend only on the
// resolved config, the master seed, and the enumeration budget — never on
// wall-clock time or worker count.

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "listop/bounds.hpp"
#include "listop/code_io.hpp"
#include "listop/col_ops.hpp"
#include "listop/concat.hpp"
#include "listop/constructions.hpp"
#include "listop/expectation.hpp"
#include "listop/oracles.hpp"
#include "listop/row_ops.hpp"
#include "listop/serialization.hpp"

namespace listop {

struct RunContext {
    std::uint64_t budget = default_budget;
    std::uint32_t threads = 1;
};

struct ExperimentConfig {
    std::string scenario;
    json base_code;  // null, {"file": path}, or {"generator": {...}}
    json params;     // scenario-specific object
    std::uint64_t master_seed = 0;
    std::string output;
};

inline const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{
        "xor-ld",      "fold-ld",       "aggregate-ld",
        "subcode-ld",  "cluster-lb",    "concat-decode",
        "johnson-audit", "replacement-test", "estimate-E"};
    return names;
}

namespace detail {

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_big_rational(const BigRational& v) {
    return fmt_double(v.convert_to<double>());
}

inline double rational_to_double(const Rational& x) {
    return static_cast<double>(x.numerator()) / static_cast<double>(x.denominator());
}

inline std::int64_t rational_ceil(const Rational& x) {
    if (x < 0) throw input_error("rational_ceil: negative value");
    return ceil_div(x.numerator(), x.denominator());
}

inline const char* ld_verdict_name(LdVerdict v) {
    switch (v) {
        case LdVerdict::decodable: return "decodable";
        case LdVerdict::violated: return "violated";
        case LdVerdict::no_counterexample: return "no_counterexample";
        case LdVerdict::budget_exhausted: return "budget_exhausted";
    }
    throw input_error("unknown list-decodability verdict");
}

class CsvBuilder {
  public:
    void comment(const std::string& s) { text_ += "# " + s + "\n"; }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) text_ += ',';
            text_ += cells[i];
        }
        text_ += '\n';
    }
    const std::string& text() const { return text_; }

  private:
    std::string text_;
};

/// Runs `body(t)` for t in [0, trials), optionally across worker threads.
/// Bodies must write only to per-trial slots; the first exception wins and
/// is rethrown on the calling thread.
template <class F>
void parallel_trials(std::uint32_t trials, std::uint32_t threads, F&& body) {
    if (threads <= 1 || trials <= 1) {
        for (std::uint32_t t = 0; t < trials; ++t) body(t);
        return;
    }
    std::atomic<std::uint32_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr err;
    auto worker = [&] {
        for (;;) {
            const std::uint32_t t = next.fetch_add(1);
            if (t >= trials) return;
            try {
                body(t);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const std::uint32_t workers = std::min(threads, trials);
    pool.reserve(workers);
    for (std::uint32_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

template <class T>
T param_or(const json& params, const char* key, T fallback, const std::string& ctx) {
    if (!params.contains(key)) return fallback;
    return get_field<T>(params, key, ctx);
}

inline Rational rational_param(const json& params, const char* key,
                               const std::string& ctx) {
    const json& v = params.contains(key)
                        ? params.at(key)
                        : throw input_error(ctx + ": missing field '" + key + "'");
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>(), 1);
    if (v.is_string()) return rational_from_string(v.get<std::string>());
    throw input_error(ctx + ": field '" + key +
                      "' must be an integer or a rational string like \"1/4\"");
}

inline Rational rational_param_or(const json& params, const char* key,
                                  const Rational& fallback, const std::string& ctx) {
    if (!params.contains(key)) return fallback;
    return rational_param(params, key, ctx);
}

inline Replacement replacement_param_or(const json& params, const char* key,
                                        Replacement fallback, const std::string& ctx) {
    if (!params.contains(key)) return fallback;
    const auto s = get_field<std::string>(params, key, ctx);
    if (s == "with") return Replacement::with_replacement;
    if (s == "without") return Replacement::without_replacement;
    throw input_error(ctx + ": field '" + key + "' must be \"with\" or \"without\"");
}

}  // namespace detail

/// Materializes the configured base code: an explicit file or a named
/// generator with its own parameters.
inline CodeMatrix make_base_code(const json& spec, std::uint64_t default_seed) {
    const std::string ctx = "base_code";
    if (!spec.is_object())
        throw input_error(ctx + ": expected {\"file\": path} or {\"generator\": {...}}");
    detail::reject_unknown_keys(spec, {"file", "generator"}, ctx);
    if (spec.contains("file") == spec.contains("generator"))
        throw input_error(ctx + ": exactly one of 'file' and 'generator' is required");
    if (spec.contains("file"))
        return load_code_file(detail::get_field<std::string>(spec, "file", ctx));

    const json& g = spec.at("generator");
    const std::string gctx = "base_code.generator";
    if (!g.is_object()) throw input_error(gctx + ": expected an object");
    const auto kind = detail::get_field<std::string>(g, "kind", gctx);
    const auto seed = detail::param_or<std::uint64_t>(g, "seed", default_seed, gctx);
    if (kind == "random") {
        detail::reject_unknown_keys(g, {"kind", "q", "n", "N", "seed"}, gctx);
        return random_code(detail::get_field<std::uint64_t>(g, "q", gctx),
                           detail::get_field<std::uint32_t>(g, "n", gctx),
                           detail::get_field<std::uint32_t>(g, "N", gctx), seed);
    }
    if (kind == "random-linear") {
        detail::reject_unknown_keys(g, {"kind", "q", "n", "k", "seed"}, gctx);
        return random_linear_code(detail::get_field<std::uint64_t>(g, "q", gctx),
                                  detail::get_field<std::uint32_t>(g, "n", gctx),
                                  detail::get_field<std::uint32_t>(g, "k", gctx), seed);
    }
    if (kind == "reed-solomon") {
        detail::reject_unknown_keys(g, {"kind", "q", "k", "n"}, gctx);
        const auto q = detail::get_field<std::uint64_t>(g, "q", gctx);
        const auto n = detail::get_field<std::uint32_t>(g, "n", gctx);
        if (n > q)
            throw input_error(gctx + ": evaluation points n cannot exceed q");
        std::vector<Symbol> points(n);
        for (std::uint32_t i = 0; i < n; ++i) points[i] = i;
        return reed_solomon(q, detail::get_field<std::uint32_t>(g, "k", gctx), points);
    }
    if (kind == "hadamard") {
        detail::reject_unknown_keys(g, {"kind", "k"}, gctx);
        return hadamard(detail::get_field<std::uint32_t>(g, "k", gctx));
    }
    throw input_error(gctx + ": unknown kind '" + kind +
                      "' (expected random, random-linear, reed-solomon, or hadamard)");
}

inline ExperimentConfig parse_experiment_config(const json& j) {
    const std::string ctx = "config";
    if (!j.is_object()) throw input_error(ctx + ": expected a JSON object");
    detail::reject_unknown_keys(
        j, {"scenario", "base_code", "params", "master_seed", "output"}, ctx);
    ExperimentConfig c;
    if (j.contains("scenario"))
        c.scenario = detail::get_field<std::string>(j, "scenario", ctx);
    c.base_code = j.contains("base_code") ? j.at("base_code") : json();
    c.params = j.contains("params") ? j.at("params") : json::object();
    if (!c.params.is_object()) throw input_error(ctx + ": 'params' must be an object");
    c.master_seed = detail::param_or<std::uint64_t>(j, "master_seed", 0, ctx);
    if (j.contains("output"))
        c.output = detail::get_field<std::string>(j, "output", ctx);
    return c;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw input_error("config file " + path + ": " + e.what());
    }
    return parse_experiment_config(j);
}

namespace detail {

// ---------------------------------------------------------------------------
// Scenario runners.  Each validates its params strictly, echoes derived
// quantities as comments, and emits one CSV row per trial/instance.
// ---------------------------------------------------------------------------

inline void run_row_op_ld(const ExperimentConfig& cfg, const RunContext& ctx,
                          CsvBuilder& csv) {
    const std::string pctx = "params (" + cfg.scenario + ")";
    reject_unknown_keys(cfg.params,
                        {"eps", "L", "n", "t", "trials", "rho", "ld_mode", "ld_samples",
                         "hash_base"},
                        pctx);
    const CodeMatrix c0 = make_base_code(cfg.base_code,
                                         derive_seed(cfg.master_seed, "base-code", 0));
    RowOpKind kind = RowOpKind::xor_t;
    if (cfg.scenario == "xor-ld") kind = RowOpKind::xor_t;
    else if (cfg.scenario == "aggregate-ld") kind = RowOpKind::aggregate_t;
    else if (cfg.scenario == "fold-ld") kind = RowOpKind::fold_t;

    const Rational eps = rational_param_or(cfg.params, "eps", Rational(1, 4), pctx);
    if (eps <= 0 || eps >= 1)
        throw input_error(pctx + ": field 'eps' must lie strictly between 0 and 1");
    const auto trials = param_or<std::uint32_t>(cfg.params, "trials", 100, pctx);
    if (trials == 0) throw input_error(pctx + ": field 'trials' must be positive");
    const auto L = param_or<std::uint32_t>(cfg.params, "L", 16, pctx);

    const Rational delta0 = code_min_distance(c0);
    std::uint32_t t;
    if (cfg.params.contains("t")) {
        t = get_field<std::uint32_t>(cfg.params, "t", pctx);
    } else {
        // Preset arity: t = ceil(4 ln(1/eps) / delta0).
        const double d0 = rational_to_double(delta0);
        t = static_cast<std::uint32_t>(
            std::ceil(4.0 * std::log(1.0 / rational_to_double(eps)) / d0));
        if (t == 0) t = 1;
        if (kind == RowOpKind::fold_t)  // round up to a divisor of n0
            while (c0.length() % t != 0) ++t;
    }
    if (t == 0 || t > c0.length())
        throw input_error(pctx + ": field 't' must lie in [1, n0=" +
                          std::to_string(c0.length()) + "], got " + std::to_string(t));
    if (kind == RowOpKind::fold_t && c0.length() % t != 0)
        throw input_error(pctx + ": field 't' must divide n0=" +
                          std::to_string(c0.length()) + " for folding, got " +
                          std::to_string(t));

    std::uint32_t n;
    if (kind == RowOpKind::fold_t) {
        n = c0.length() / t;
        if (cfg.params.contains("n") &&
            get_field<std::uint32_t>(cfg.params, "n", pctx) != n)
            throw input_error(pctx + ": field 'n' must equal n0/t for folding");
    } else {
        if (!cfg.params.contains("n"))
            throw input_error(pctx + ": missing field 'n' (output length)");
        n = get_field<std::uint32_t>(cfg.params, "n", pctx);
    }

    const auto bound = injectivity_failure_bound(c0, kind, t, n,
                                                 BigRational(eps.numerator(),
                                                             eps.denominator()));
    const auto ld_mode = param_or<std::string>(cfg.params, "ld_mode", "none", pctx);
    if (ld_mode != "none" && ld_mode != "exhaustive" && ld_mode != "sampled")
        throw input_error(pctx + ": field 'ld_mode' must be none, exhaustive, or sampled");
    std::optional<Rational> rho;
    if (cfg.params.contains("rho")) rho = rational_param(cfg.params, "rho", pctx);
    if (ld_mode != "none" && !rho)
        throw input_error(pctx + ": field 'rho' is required when ld_mode is set");
    std::uint64_t ld_cap = ctx.budget;
    if (cfg.params.contains("ld_samples")) {
        if (ld_mode != "sampled")
            throw input_error(pctx + ": field 'ld_samples' only applies to ld_mode=sampled");
        ld_cap = get_field<std::uint64_t>(cfg.params, "ld_samples", pctx);
    }

    csv.comment("delta0=" + rational_to_string(delta0));
    csv.comment("t=" + std::to_string(t));
    csv.comment("union_bound=" + fmt_big_rational(bound.exact_union_bound));
    if (bound.closed_form_bound)
        csv.comment("closed_form_bound=" + fmt_big_rational(*bound.closed_form_bound));
    csv.row({"trial", "seed", "t", "n0", "n", "N", "distinct", "injective",
             "union_bound", "ld_verdict", "ld_witness"});

    RowOpParams rp;
    rp.kind = kind;
    rp.n0 = c0.length();
    rp.n = n;
    rp.t = t;
    rp.q = c0.q();
    const std::uint64_t source_distinct = c0.distinct_count();
    std::vector<std::vector<std::string>> rows(trials);
    parallel_trials(trials, ctx.threads, [&](std::uint32_t trial) {
        const std::uint64_t seed = derive_seed(cfg.master_seed, cfg.scenario, trial);
        const CodeMatrix image = apply_row_op(c0, draw_row_operation(rp, seed));
        const std::uint64_t distinct = image.distinct_count();
        std::string verdict, witness;
        if (ld_mode != "none") {
            const auto rep = is_list_decodable(
                image, *rho, L,
                ld_mode == "exhaustive" ? LdMode::exhaustive : LdMode::sampled,
                ld_cap, derive_seed(seed, "ld-centers", 0));
            verdict = ld_verdict_name(rep.verdict);
            witness = std::to_string(rep.witness_list_size);
        }
        rows[trial] = {std::to_string(trial),
                       std::to_string(seed),
                       std::to_string(t),
                       std::to_string(c0.length()),
                       std::to_string(n),
                       std::to_string(image.size()),
                       std::to_string(distinct),
                       distinct == source_distinct ? "1" : "0",
                       fmt_big_rational(bound.exact_union_bound),
                       verdict,
                       witness};
    });
    for (const auto& r : rows) csv.row(r);
}

inline void run_subcode_ld(const ExperimentConfig& cfg, const RunContext& ctx,
                           CsvBuilder& csv) {
    const std::string pctx = "params (subcode-ld)";
    reject_unknown_keys(cfg.params, {"eps", "rho", "L", "trials", "replacement", "p"},
                        pctx);
    const CodeMatrix c0 = make_base_code(cfg.base_code,
                                         derive_seed(cfg.master_seed, "base-code", 0));
    const Rational eps = rational_param_or(cfg.params, "eps", Rational(1, 4), pctx);
    const Rational rho = rational_param_or(cfg.params, "rho", Rational(1, 12), pctx);
    const auto trials = param_or<std::uint32_t>(cfg.params, "trials", 200, pctx);
    if (trials == 0) throw input_error(pctx + ": field 'trials' must be positive");
    const Replacement rep = replacement_param_or(cfg.params, "replacement",
                                                 Replacement::with_replacement, pctx);

    const std::uint32_t radius = detail::absolute_radius(rho, c0.length());
    const auto [max_ball, center] = exhaustive_max_ball_count(c0, radius, ctx.budget);
    const std::uint32_t l0 = max_ball + 1;
    const auto L = cfg.params.contains("L")
                       ? get_field<std::uint32_t>(cfg.params, "L", pctx)
                       : static_cast<std::uint32_t>(rational_ceil(Rational(3) / eps));
    const Rational p = cfg.params.contains("p")
                           ? rational_param(cfg.params, "p", pctx)
                           : retention_rate(c0.q(), eps, c0.length(), l0);
    const Rational distinct_threshold = p * Rational(c0.size()) / Rational(2);

    csv.comment("L0=" + std::to_string(l0));
    csv.comment("L=" + std::to_string(L));
    csv.comment("p=" + rational_to_string(p));
    csv.row({"trial", "seed", "p", "N0", "L0", "L", "N", "distinct", "distinct_ok",
             "ld_verdict", "ld_witness"});

    std::vector<std::vector<std::string>> rows(trials);
    parallel_trials(trials, ctx.threads, [&](std::uint32_t trial) {
        const std::uint64_t seed = derive_seed(cfg.master_seed, "subcode-ld", trial);
        auto [sub, draw] = draw_subcode(c0, SubcodeSize::retention(p), rep, seed);
        const auto report = is_list_decodable(sub, rho, L, LdMode::exhaustive,
                                              ctx.budget);
        const std::uint64_t distinct = sub.distinct_count();
        rows[trial] = {std::to_string(trial),
                       std::to_string(seed),
                       rational_to_string(p),
                       std::to_string(c0.size()),
                       std::to_string(l0),
                       std::to_string(L),
                       std::to_string(sub.size()),
                       std::to_string(distinct),
                       Rational(static_cast<std::int64_t>(distinct)) >=
                               distinct_threshold
                           ? "1"
                           : "0",
                       ld_verdict_name(report.verdict),
                       std::to_string(report.witness_list_size)};
    });
    for (const auto& r : rows) csv.row(r);
}

inline void run_cluster_lb(const ExperimentConfig& cfg, const RunContext& ctx,
                           CsvBuilder& csv) {
    const std::string pctx = "params (cluster-lb)";
    reject_unknown_keys(cfg.params,
                        {"q", "rho", "n", "alpha", "trials", "retry_cap", "check_avg"},
                        pctx);
    if (!cfg.base_code.is_null())
        throw input_error("cluster-lb builds its own code; remove 'base_code'");
    const auto q = param_or<std::uint64_t>(cfg.params, "q", 2, pctx);
    const Rational rho = rational_param_or(cfg.params, "rho", Rational(1, 4), pctx);
    const auto n = param_or<std::uint32_t>(cfg.params, "n", 64, pctx);
    const auto trials = param_or<std::uint32_t>(cfg.params, "trials", 200, pctx);
    if (trials == 0) throw input_error(pctx + ": field 'trials' must be positive");
    const auto retry_cap = param_or<std::uint32_t>(cfg.params, "retry_cap", 64, pctx);

    const ClusterCode cc =
        build_cluster_code(rho, n, q, derive_seed(cfg.master_seed, "cluster-build", 0),
                           retry_cap);
    const Rational capture_rate = cc.params.r / Rational(3);  // default capture scale
    const Rational alpha = rational_param_or(cfg.params, "alpha", capture_rate, pctx);
    if (alpha <= 0) throw input_error(pctx + ": field 'alpha' must be positive");
    const auto planted = static_cast<std::uint32_t>(
        std::min<std::int64_t>(cc.params.cluster_size,
                               rational_ceil(capture_rate / alpha)));
    const double p = std::pow(static_cast<double>(q),
                              -rational_to_double(alpha) * static_cast<double>(n)) /
                     static_cast<double>(n);
    const auto retained = static_cast<std::uint32_t>(
        std::max(1.0, std::floor(p * static_cast<double>(cc.c0.size()) + 0.5)));

    csv.comment("beta=" + rational_to_string(cc.params.beta));
    csv.comment("log_scale=" + std::to_string(cc.params.log_scale));
    csv.comment("r=" + rational_to_string(cc.params.r));
    csv.comment("cluster_size=" + std::to_string(cc.params.cluster_size));
    csv.comment("centers=" + std::to_string(cc.centers.size()));
    csv.comment("N0=" + std::to_string(cc.c0.size()));
    csv.comment("retries=" + std::to_string(cc.params.retries));
    csv.comment(std::string("centers_precondition_held=") +
                (cc.params.centers_precondition_held ? "1" : "0"));
    csv.comment("alpha=" + rational_to_string(alpha));
    csv.comment("p=" + fmt_double(p));
    csv.comment("retained=" + std::to_string(retained));
    csv.comment("planted=" + std::to_string(planted));

    if (param_or<bool>(cfg.params, "check_avg", true, pctx)) {
        const auto L = std::min<std::uint32_t>(n, cc.c0.size());
        const auto rep = is_avg_radius_list_decodable(cc.c0, rho, L, LdMode::exhaustive,
                                                      ctx.budget);
        csv.comment(std::string("avg_radius_decodable=") +
                    (rep.decodable() ? "1" : "0"));
    }

    csv.row({"trial", "seed", "retained", "captured", "cluster", "certified_list"});
    std::vector<std::vector<std::string>> rows(trials);
    parallel_trials(trials, ctx.threads, [&](std::uint32_t trial) {
        const std::uint64_t seed = derive_seed(cfg.master_seed, "cluster-lb", trial);
        auto [sub, draw] = draw_subcode(cc.c0, SubcodeSize::exact(retained),
                                        Replacement::with_replacement, seed);
        std::optional<std::uint32_t> captured;
        for (std::uint32_t idx : draw.retained)
            if (idx % cc.params.cluster_size < planted) {
                captured = cc.cluster_of[idx];
                break;
            }
        std::uint32_t certified = 0;
        if (captured) {
            for (std::uint32_t j = 0; j < sub.size(); ++j)
                if (hamming_distance(sub.column(j), cc.centers.column(*captured)) <= 1)
                    ++certified;
        }
        rows[trial] = {std::to_string(trial), std::to_string(seed),
                       std::to_string(retained), captured ? "1" : "0",
                       captured ? std::to_string(*captured) : "",
                       std::to_string(certified)};
    });
    for (const auto& r : rows) csv.row(r);
}

inline void run_concat_decode(const ExperimentConfig& cfg, const RunContext& ctx,
                              CsvBuilder& csv) {
    const std::string pctx = "params (concat-decode)";
    reject_unknown_keys(cfg.params,
                        {"eps", "q_out", "inner_k", "n_out", "N_out", "outer_radius",
                         "corrupt_blocks", "index", "trials"},
                        pctx);
    const Rational eps = rational_param_or(cfg.params, "eps", Rational(1, 2), pctx);
    if (eps <= 0 || eps > 1)
        throw input_error(pctx + ": field 'eps' must lie in (0, 1]");
    // Preset outer alphabet: ceil(8 / eps^3).
    const Rational preset_q = Rational(8) / (eps * eps * eps);
    const auto q_out = param_or<std::uint64_t>(
        cfg.params, "q_out", static_cast<std::uint64_t>(rational_ceil(preset_q)), pctx);
    std::uint32_t inner_k = 1;
    while ((std::uint64_t{1} << inner_k) < q_out) ++inner_k;
    inner_k = param_or<std::uint32_t>(cfg.params, "inner_k", inner_k, pctx);

    CodeMatrix outer =
        cfg.base_code.is_null()
            ? random_code(q_out, param_or<std::uint32_t>(cfg.params, "n_out", 8, pctx),
                          param_or<std::uint32_t>(cfg.params, "N_out", 32, pctx),
                          derive_seed(cfg.master_seed, "outer-code", 0))
            : make_base_code(cfg.base_code,
                             derive_seed(cfg.master_seed, "outer-code", 0));
    const auto code = make_concat_code(std::move(outer), inner_k);
    const std::uint32_t n_out = code.outer.length();

    const Rational outer_radius =
        rational_param_or(cfg.params, "outer_radius", Rational(1, 4), pctx);
    const Rational budget = Rational(1, 2) - eps;
    const auto default_corrupt = static_cast<std::uint32_t>(
        budget > 0 ? rational_floor(budget * Rational(n_out)) : 0);
    const auto corrupt_blocks =
        param_or<std::uint32_t>(cfg.params, "corrupt_blocks", default_corrupt, pctx);
    if (corrupt_blocks > n_out)
        throw input_error(pctx + ": field 'corrupt_blocks' exceeds the outer length");
    const auto index = param_or<std::uint32_t>(cfg.params, "index", 0, pctx);
    const auto trials = param_or<std::uint32_t>(cfg.params, "trials", 500, pctx);
    if (trials == 0) throw input_error(pctx + ": field 'trials' must be positive");

    // Adversarial mask: the first corrupt_blocks blocks are replaced by the
    // clean encoding of a different outer symbol.
    std::vector<Symbol> y = concat_encode(code, index);
    const std::uint32_t block = code.inner_length();
    for (std::uint32_t i = 0; i < corrupt_blocks; ++i) {
        const auto s = static_cast<std::uint64_t>(code.outer.at(i, index));
        const auto wrong = static_cast<std::uint32_t>(
            (s + 1 + (i % (code.outer.q() - 1))) % code.outer.q());
        for (std::uint32_t x = 0; x < block; ++x)
            y[std::size_t{i} * block + x] = hadamard_bit(wrong, x);
    }

    csv.comment("q_out=" + std::to_string(code.outer.q()));
    csv.comment("inner_k=" + std::to_string(inner_k));
    csv.comment("n_out=" + std::to_string(n_out));
    csv.comment("corrupt_blocks=" + std::to_string(corrupt_blocks));
    csv.row({"trial", "seed", "recovered", "list_size", "picked_agreement"});

    std::vector<std::vector<std::string>> rows(trials);
    parallel_trials(trials, ctx.threads, [&](std::uint32_t trial) {
        const std::uint64_t seed = derive_seed(cfg.master_seed, "concat-decode", trial);
        const auto list = concat_list_decode(code, y, eps, seed, outer_radius);
        const auto picked = concat_inner_pass(code, y, eps, seed);
        std::uint32_t agree = 0;
        for (std::uint32_t i = 0; i < n_out; ++i)
            if (picked[i] == code.outer.at(i, index)) ++agree;
        const bool recovered =
            std::find(list.begin(), list.end(), index) != list.end();
        rows[trial] = {std::to_string(trial), std::to_string(seed),
                       recovered ? "1" : "0", std::to_string(list.size()),
                       fmt_double(static_cast<double>(agree) /
                                  static_cast<double>(n_out))};
    });
    for (const auto& r : rows) csv.row(r);
}

inline void run_johnson_audit(const ExperimentConfig& cfg, const RunContext& ctx,
                              CsvBuilder& csv) {
    const std::string pctx = "params (johnson-audit)";
    reject_unknown_keys(cfg.params, {"instances", "L", "q_max", "n_max", "N_max", "eps"},
                        pctx);
    if (!cfg.base_code.is_null())
        throw input_error("johnson-audit samples its own instances; remove 'base_code'");
    const auto instances = param_or<std::uint32_t>(cfg.params, "instances", 500, pctx);
    if (instances == 0) throw input_error(pctx + ": field 'instances' must be positive");
    const auto L = param_or<std::uint32_t>(cfg.params, "L", 3, pctx);
    if (L < 2) throw input_error(pctx + ": field 'L' must be at least 2");
    const auto q_max = param_or<std::uint64_t>(cfg.params, "q_max", 3, pctx);
    const auto n_max = param_or<std::uint32_t>(cfg.params, "n_max", 8, pctx);
    const auto N_max = param_or<std::uint32_t>(cfg.params, "N_max", 8, pctx);
    if (N_max < L) throw input_error(pctx + ": field 'N_max' must be at least L");
    const Rational eps = rational_param_or(cfg.params, "eps", Rational(1, 2), pctx);
    const double eps_d = rational_to_double(eps);

    csv.row({"instance", "seed", "q", "n", "N", "L", "lists", "violations",
             "min_margin"});
    std::vector<std::vector<std::string>> rows(instances);
    parallel_trials(instances, ctx.threads, [&](std::uint32_t inst) {
        const std::uint64_t seed = derive_seed(cfg.master_seed, "johnson-audit", inst);
        Rng rng(seed);
        const std::uint64_t q = 2 + rng.below(q_max - 1);
        const auto n = static_cast<std::uint32_t>(2 + rng.below(n_max - 1));
        const auto n_cols = static_cast<std::uint32_t>(L + rng.below(N_max - L + 1));
        const CodeMatrix c = random_code(q, n, n_cols, rng.next());

        std::uint64_t lists = 0, violations = 0;
        double min_margin = std::numeric_limits<double>::infinity();
        std::vector<std::uint32_t> idx(L);
        for (std::uint32_t i = 0; i < L; ++i) idx[i] = i;
        do {
            ++lists;
            const double lhs = static_cast<double>(max_agreement_sum(c, idx));
            double sum_d = 0;  // over ordered distinct pairs, relative
            for (std::uint32_t a = 0; a < L; ++a)
                for (std::uint32_t b = 0; b < L; ++b)
                    if (a != b)
                        sum_d += static_cast<double>(hamming_distance(
                                     c.column(idx[a]), c.column(idx[b]))) /
                                 static_cast<double>(n);
            std::vector<double> rhs;
            if (q == 2) {
                const double Ld = static_cast<double>(L);
                if (Ld * Ld - 2.0 * sum_d >= 0.0)
                    rhs.push_back(johnson_rhs(JohnsonVariant::binary,
                                              static_cast<double>(n), L, q, sum_d));
            }
            rhs.push_back(johnson_rhs(JohnsonVariant::q_eps, static_cast<double>(n), L,
                                      q, sum_d, eps_d));
            rhs.push_back(johnson_rhs(JohnsonVariant::q_sqrt, static_cast<double>(n),
                                      L, q, sum_d));
            for (double r : rhs) {
                if (lhs > r + 1e-9) ++violations;
                min_margin = std::min(min_margin, r - lhs);
            }
        } while (next_combination(idx, n_cols));

        rows[inst] = {std::to_string(inst),   std::to_string(seed),
                      std::to_string(q),      std::to_string(n),
                      std::to_string(n_cols), std::to_string(L),
                      std::to_string(lists),  std::to_string(violations),
                      fmt_double(min_margin)};
    });
    for (const auto& r : rows) csv.row(r);
}

inline void run_replacement_test(const ExperimentConfig& cfg, const RunContext& ctx,
                                 CsvBuilder& csv) {
    const std::string pctx = "params (replacement-test)";
    reject_unknown_keys(cfg.params, {"configs", "trials", "L"}, pctx);
    if (!cfg.base_code.is_null())
        throw input_error(
            "replacement-test samples its own configurations; remove 'base_code'");
    const auto configs = param_or<std::uint32_t>(cfg.params, "configs", 30, pctx);
    if (configs == 0) throw input_error(pctx + ": field 'configs' must be positive");
    const auto trials = param_or<std::uint32_t>(cfg.params, "trials", 150, pctx);
    const auto L = param_or<std::uint32_t>(cfg.params, "L", 2, pctx);

    csv.row({"config", "seed", "kind", "q", "n0", "N", "L", "n", "t", "mean_with",
             "mean_without", "delta", "z_score"});
    std::vector<std::vector<std::string>> rows(configs);
    parallel_trials(configs, ctx.threads, [&](std::uint32_t c) {
        const std::uint64_t seed = derive_seed(cfg.master_seed, "replacement-test", c);
        Rng rng(seed);
        const std::uint64_t q = 2 + rng.below(2);
        const auto n0 = static_cast<std::uint32_t>(4 + 2 * rng.below(3));
        const auto n_cols = static_cast<std::uint32_t>(std::max<std::uint64_t>(
            L, 4 + rng.below(4)));
        const CodeMatrix c0 = random_code(q, n0, n_cols, rng.next());
        RowOpParams p;
        p.n0 = n0;
        p.q = q;
        if (c % 2 == 0) {
            p.kind = RowOpKind::sampling;
            p.n = static_cast<std::uint32_t>(1 + rng.below(n0));
        } else {
            p.kind = RowOpKind::aggregate_t;
            p.t = (c % 4 == 1) ? 2 : n0 / 2;
            p.n = n0 / p.t;
        }
        const auto r = replacement_dominance_test(c0, p, L, trials, rng.next());
        rows[c] = {std::to_string(c),
                   std::to_string(seed),
                   row_op_kind_name(p.kind),
                   std::to_string(q),
                   std::to_string(n0),
                   std::to_string(n_cols),
                   std::to_string(L),
                   std::to_string(p.n),
                   std::to_string(p.t),
                   fmt_double(r.mean_with),
                   fmt_double(r.mean_without),
                   fmt_double(r.delta),
                   fmt_double(r.z_score)};
    });
    for (const auto& r : rows) csv.row(r);
}

inline void run_estimate_e(const ExperimentConfig& cfg, const RunContext& ctx,
                           CsvBuilder& csv) {
    const std::string pctx = "params (estimate-E)";
    reject_unknown_keys(cfg.params,
                        {"kind", "n", "t", "hash_base", "L", "trials", "mode", "lambda",
                         "cap"},
                        pctx);
    const CodeMatrix c0 = make_base_code(cfg.base_code,
                                         derive_seed(cfg.master_seed, "base-code", 0));
    RowOpParams p;
    p.kind = row_op_kind_from_name(get_field<std::string>(cfg.params, "kind", pctx));
    p.n0 = c0.length();
    p.q = c0.q();
    p.t = param_or<std::uint32_t>(cfg.params, "t", 1, pctx);
    p.hash_base = param_or<std::uint64_t>(cfg.params, "hash_base", 2, pctx);
    p.n = get_field<std::uint32_t>(cfg.params, "n", pctx);
    const auto trials = param_or<std::uint32_t>(cfg.params, "trials", 200, pctx);
    const auto cap = param_or<std::uint64_t>(cfg.params, "cap", 100000, pctx);
    const auto mode = param_or<std::string>(cfg.params, "mode", "exact", pctx);

    EstimateSummary est;
    std::uint32_t L = 0;
    if (mode == "fixed") {
        if (!cfg.params.contains("lambda"))
            throw input_error(pctx + ": field 'lambda' is required when mode=fixed");
        const auto lambda =
            get_field<std::vector<std::uint32_t>>(cfg.params, "lambda", pctx);
        L = static_cast<std::uint32_t>(lambda.size());
        est = estimate_E_fixed(c0, p, lambda, trials, cfg.master_seed);
    } else if (mode == "exact" || mode == "heuristic") {
        L = param_or<std::uint32_t>(cfg.params, "L", 2, pctx);
        est = estimate_E(c0, p, L, trials, cfg.master_seed,
                         mode == "exact" ? LambdaMode::exact : LambdaMode::heuristic,
                         cap);
    } else {
        throw input_error(pctx + ": field 'mode' must be fixed, exact, or heuristic");
    }

    // The reversed estimate and the constant fit need the full list
    // enumeration; emit them only when it fits the candidate cap.
    std::string bound_cell, fit_cell;
    if (L >= 2 && c0.size() >= L && binomial(c0.size(), L) <= BigInt(cap)) {
        const auto rev = estimate_reversed(c0, p, L, trials, cfg.master_seed, cap);
        std::uint64_t image_q = c0.q();
        if (p.kind == RowOpKind::aggregate_t || p.kind == RowOpKind::fold_t)
            image_q = checked_pow(c0.q(), p.t);
        else if (p.kind == RowOpKind::hash_reduce)
            image_q = p.hash_base;
        MainBoundParams bp{L, c0.size(), p.n, 0.0, image_q == 2};
        const double c_fit = fit_main_constant(rev.mean, est.mean, bp);
        bp.constant = c_fit;
        bound_cell = fmt_double(main_bound(est.mean, bp));
        fit_cell = fmt_double(c_fit);
    }

    csv.row({"scenario_id", "kind", "n0", "n", "N", "L", "t", "trials", "seed", "mean",
             "std_dev", "bound", "fitted_C"});
    csv.row({"estimate-E", row_op_kind_name(p.kind), std::to_string(p.n0),
             std::to_string(p.n), std::to_string(c0.size()), std::to_string(L),
             std::to_string(p.t), std::to_string(est.trials),
             std::to_string(est.seed), fmt_double(est.mean), fmt_double(est.std_dev),
             bound_cell, fit_cell});
}

}  // namespace detail

/// Runs the configured scenario and writes its CSV atomically (temp file +
/// rename); nothing is left behind on failure.
inline void run_experiment(const ExperimentConfig& cfg, const RunContext& ctx) {
    if (cfg.output.empty())
        throw input_error("no output path: set 'output' in the config or pass --out");
    bool known = false;
    for (const auto& s : scenario_names()) known = known || s == cfg.scenario;
    if (!known) throw input_error("unknown scenario: '" + cfg.scenario + "'");

    detail::CsvBuilder csv;
    json resolved;
    resolved["scenario"] = cfg.scenario;
    if (!cfg.base_code.is_null()) resolved["base_code"] = cfg.base_code;
    resolved["params"] = cfg.params;
    resolved["master_seed"] = cfg.master_seed;
    resolved["output"] = cfg.output;
    csv.comment("config=" + resolved.dump());
    csv.comment("budget=" + std::to_string(ctx.budget));

    if (cfg.scenario == "xor-ld" || cfg.scenario == "aggregate-ld" ||
        cfg.scenario == "fold-ld")
        detail::run_row_op_ld(cfg, ctx, csv);
    else if (cfg.scenario == "subcode-ld")
        detail::run_subcode_ld(cfg, ctx, csv);
    else if (cfg.scenario == "cluster-lb")
        detail::run_cluster_lb(cfg, ctx, csv);
    else if (cfg.scenario == "concat-decode")
        detail::run_concat_decode(cfg, ctx, csv);
    else if (cfg.scenario == "johnson-audit")
        detail::run_johnson_audit(cfg, ctx, csv);
    else if (cfg.scenario == "replacement-test")
        detail::run_replacement_test(cfg, ctx, csv);
    else if (cfg.scenario == "estimate-E")
        detail::run_estimate_e(cfg, ctx, csv);

    const std::string tmp = cfg.output + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw input_error("cannot open output file for writing: " + tmp);
        out << csv.text();
        out.flush();
        if (!out) {
            out.close();
            std::filesystem::remove(tmp);
            throw input_error("failed while writing output file: " + tmp);
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, cfg.output, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw input_error("cannot move output into place: " + ec.message());
    }
}

}  // namespace listop
