// JSON serialization for replayable experiment artifacts (drawn row
// operations, subcode draws, cluster-code sidecars).  Parsing is strict:
// unknown keys are rejected and error messages name the offending field.
#pragma once

#include "listop/col_ops.hpp"
#include "listop/constructions.hpp"
#include "listop/row_ops.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace listop {

using json = nlohmann::json;

namespace detail {

inline void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                                const std::string& context) {
    if (!j.is_object()) throw input_error(context + ": expected a JSON object");
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (item.key() == a) {
                ok = true;
                break;
            }
        if (!ok) throw input_error(context + ": unknown field \"" + item.key() + "\"");
    }
}

template <typename T>
T get_field(const json& j, const char* key, const std::string& context) {
    auto it = j.find(key);
    if (it == j.end()) throw input_error(context + ": missing field \"" + key + "\"");
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw input_error(context + ": field \"" + key + "\" has the wrong type");
    }
}

}  // namespace detail

inline json to_json(const RowOpTuple& f) {
    json j;
    j["kind"] = row_op_kind_name(f.source_kind);
    j["seed"] = f.seed;
    j["replacement"] = f.replacement == Replacement::with_replacement ? "with" : "without";
    j["n0"] = f.n0;
    j["t"] = f.t;
    j["q"] = f.q;
    if (f.source_kind == RowOpKind::hash_reduce) {
        j["hash_base"] = f.hash_base;
        j["hash_k"] = f.hash_k;
        json ops = json::array();
        for (const auto& h : f.hash_ops) ops.push_back(json{{"m", h.m}, {"b", h.b}});
        j["hash_ops"] = std::move(ops);
    } else {
        json ops = json::array();
        for (const auto& op : f.ops) {
            if (op.kind == BasicRowOp::Kind::inner_product)
                ops.push_back(json{{"v", op.v}});
            else
                ops.push_back(json{{"S", op.S}});
        }
        j["ops"] = std::move(ops);
    }
    return j;
}

inline RowOpTuple row_op_tuple_from_json(const json& j) {
    const std::string ctx = "row operation";
    detail::reject_unknown_keys(
        j, {"kind", "seed", "replacement", "n0", "t", "q", "hash_base", "hash_k", "ops",
            "hash_ops"},
        ctx);
    RowOpTuple f;
    f.source_kind = row_op_kind_from_name(detail::get_field<std::string>(j, "kind", ctx));
    f.seed = detail::get_field<std::uint64_t>(j, "seed", ctx);
    const auto rep = detail::get_field<std::string>(j, "replacement", ctx);
    if (rep == "with")
        f.replacement = Replacement::with_replacement;
    else if (rep == "without")
        f.replacement = Replacement::without_replacement;
    else
        throw input_error(ctx + ": field \"replacement\" must be \"with\" or \"without\"");
    f.n0 = detail::get_field<std::uint32_t>(j, "n0", ctx);
    f.t = detail::get_field<std::uint32_t>(j, "t", ctx);
    f.q = detail::get_field<std::uint64_t>(j, "q", ctx);

    if (f.source_kind == RowOpKind::hash_reduce) {
        f.hash_base = detail::get_field<std::uint64_t>(j, "hash_base", ctx);
        f.hash_k = detail::get_field<std::uint32_t>(j, "hash_k", ctx);
        const json& ops = j.contains("hash_ops")
                              ? j.at("hash_ops")
                              : throw input_error(ctx + ": missing field \"hash_ops\"");
        if (!ops.is_array()) throw input_error(ctx + ": field \"hash_ops\" must be an array");
        for (const auto& o : ops) {
            detail::reject_unknown_keys(o, {"m", "b"}, ctx + ".hash_ops");
            HashCoordOp h;
            h.m = detail::get_field<std::vector<Symbol>>(o, "m", ctx + ".hash_ops");
            h.b = detail::get_field<Symbol>(o, "b", ctx + ".hash_ops");
            if (h.m.size() != f.hash_k)
                throw input_error(ctx + ".hash_ops: field \"m\" must have length hash_k");
            f.hash_ops.push_back(std::move(h));
        }
        return f;
    }

    const json& ops = j.contains("ops") ? j.at("ops")
                                        : throw input_error(ctx + ": missing field \"ops\"");
    if (!ops.is_array()) throw input_error(ctx + ": field \"ops\" must be an array");
    for (const auto& o : ops) {
        detail::reject_unknown_keys(o, {"v", "S"}, ctx + ".ops");
        BasicRowOp op;
        if (o.contains("v")) {
            op.kind = BasicRowOp::Kind::inner_product;
            op.v = detail::get_field<std::vector<Symbol>>(o, "v", ctx + ".ops");
            if (op.v.size() != f.n0)
                throw input_error(ctx + ".ops: field \"v\" must have length n0");
        } else if (o.contains("S")) {
            op.kind = BasicRowOp::Kind::aggregate;
            op.S = detail::get_field<std::vector<std::uint32_t>>(o, "S", ctx + ".ops");
        } else {
            throw input_error(ctx + ".ops: each entry needs field \"v\" or \"S\"");
        }
        f.ops.push_back(std::move(op));
    }
    return f;
}

inline json to_json(const SubcodeDraw& d) {
    json j;
    j["p"] = rational_to_string(d.p);
    j["N"] = d.N;
    j["replacement"] = d.replacement == Replacement::with_replacement ? "with" : "without";
    j["seed"] = d.seed;
    j["indices"] = d.retained;
    return j;
}

inline SubcodeDraw subcode_draw_from_json(const json& j) {
    const std::string ctx = "subcode draw";
    detail::reject_unknown_keys(j, {"p", "N", "replacement", "seed", "indices"}, ctx);
    SubcodeDraw d;
    d.p = rational_from_string(detail::get_field<std::string>(j, "p", ctx));
    d.N = detail::get_field<std::uint32_t>(j, "N", ctx);
    const auto rep = detail::get_field<std::string>(j, "replacement", ctx);
    if (rep == "with")
        d.replacement = Replacement::with_replacement;
    else if (rep == "without")
        d.replacement = Replacement::without_replacement;
    else
        throw input_error(ctx + ": field \"replacement\" must be \"with\" or \"without\"");
    d.seed = detail::get_field<std::uint64_t>(j, "seed", ctx);
    d.retained = detail::get_field<std::vector<std::uint32_t>>(j, "indices", ctx);
    if (d.retained.size() != d.N)
        throw input_error(ctx + ": field \"indices\" must have length N");
    return d;
}

/// Sidecar describing an assembled cluster code; the center matrix itself
/// lives in a separate code file referenced by path.
inline json cluster_sidecar_to_json(const ClusterCode& cc, const std::string& centers_file) {
    json params;
    params["rho"] = rational_to_string(cc.params.rho);
    params["beta"] = rational_to_string(cc.params.beta);
    params["r"] = rational_to_string(cc.params.r);
    params["log_scale"] = cc.params.log_scale;
    params["cluster_size"] = cc.params.cluster_size;
    params["retries"] = cc.params.retries;
    params["centers_precondition_held"] = cc.params.centers_precondition_held;
    params["seed"] = cc.params.seed;
    json j;
    j["params"] = std::move(params);
    j["centers_file"] = centers_file;
    j["cluster_of"] = cc.cluster_of;
    return j;
}

struct ClusterSidecar {
    ClusterParams params;
    std::string centers_file;
    std::vector<std::uint32_t> cluster_of;
};

inline ClusterSidecar cluster_sidecar_from_json(const json& j) {
    const std::string ctx = "cluster sidecar";
    detail::reject_unknown_keys(j, {"params", "centers_file", "cluster_of"}, ctx);
    const json& pj = j.contains("params")
                         ? j.at("params")
                         : throw input_error(ctx + ": missing field \"params\"");
    detail::reject_unknown_keys(pj,
                                {"rho", "beta", "r", "log_scale", "cluster_size", "retries",
                                 "centers_precondition_held", "seed"},
                                ctx + ".params");
    ClusterSidecar s;
    s.params.rho = rational_from_string(detail::get_field<std::string>(pj, "rho", ctx));
    s.params.beta = rational_from_string(detail::get_field<std::string>(pj, "beta", ctx));
    s.params.r = rational_from_string(detail::get_field<std::string>(pj, "r", ctx));
    s.params.log_scale = detail::get_field<std::uint32_t>(pj, "log_scale", ctx);
    s.params.cluster_size = detail::get_field<std::uint32_t>(pj, "cluster_size", ctx);
    s.params.retries = detail::get_field<std::uint32_t>(pj, "retries", ctx);
    s.params.centers_precondition_held =
        detail::get_field<bool>(pj, "centers_precondition_held", ctx);
    s.params.seed = detail::get_field<std::uint64_t>(pj, "seed", ctx);
    s.centers_file = detail::get_field<std::string>(j, "centers_file", ctx);
    s.cluster_of = detail::get_field<std::vector<std::uint32_t>>(j, "cluster_of", ctx);
    return s;
}

}  // namespace listop
