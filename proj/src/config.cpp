#include "qpf/config.hpp"

#include <fstream>

namespace qpf {

using nlohmann::json;

double config_number(const json& v, const std::string& what) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        MapExpression e(v.get<std::string>(), {});
        if (e.depends_on_x()) throw Error(what + ": constant expression must not use x");
        return e.eval(0.0, 0.0);
    }
    throw Error(what + ": expected a number or a constant expression string");
}

namespace {

std::map<std::string, double> param_map(const json& config) {
    std::map<std::string, double> out;
    if (config.contains("params")) {
        for (auto it = config.at("params").begin(); it != config.at("params").end(); ++it)
            out[it.key()] = config_number(it.value(), "params." + it.key());
    }
    return out;
}

double param(const std::map<std::string, double>& params, const std::string& name) {
    auto it = params.find(name);
    if (it == params.end()) throw Error("missing required parameter '" + name + "'");
    return it->second;
}

}  // namespace

CocycleSpec load_cocycle(const json& config) {
    double omega = config_number(config.at("omega"), "omega");
    std::map<std::string, double> params = param_map(config);
    std::array<MapExpression, 4> entries = {
        MapExpression(config.at("m11").get<std::string>(), params),
        MapExpression(config.at("m12").get<std::string>(), params),
        MapExpression(config.at("m21").get<std::string>(), params),
        MapExpression(config.at("m22").get<std::string>(), params)};
    for (const auto& e : entries)
        if (e.depends_on_x()) throw Error("cocycle entries must not depend on x");
    auto matrix = [entries](double theta) {
        return Matrix2{entries[0].eval(theta, 0.0), entries[1].eval(theta, 0.0),
                       entries[2].eval(theta, 0.0), entries[3].eval(theta, 0.0)};
    };
    std::string label = config.value("label", "cocycle");
    return CocycleSpec(omega, matrix, label);
}

System load_system(const json& config) {
    std::string family = config.at("family").get<std::string>();
    double omega = 0.0;
    if (family != "projective") omega = config_number(config.at("omega"), "omega");
    std::map<std::string, double> params = param_map(config);

    if (family == "rigid") {
        return System{make_rigid(param(params, "rho"), omega), std::nullopt, std::nullopt};
    }
    if (family == "skew") {
        MapExpression a(config.at("expression").get<std::string>(), params);
        return System{make_skew(a, omega), std::nullopt, a};
    }
    if (family == "arnold") {
        return System{make_arnold(param(params, "c"), param(params, "K"),
                                  param(params, "eps"), omega),
                      std::nullopt, std::nullopt};
    }
    if (family == "attracting_graph") {
        return System{make_attracting_graph(param(params, "b"), param(params, "amp"), omega),
                      std::nullopt, std::nullopt};
    }
    if (family == "custom") {
        MapExpression lift(config.at("expression").get<std::string>(), params);
        return System{make_custom(lift, omega), std::nullopt, std::nullopt};
    }
    if (family == "conjugated") {
        System inner = load_system(config.at("inner"));
        auto hp = params;
        hp.insert({{"omega", inner.map.omega()}});
        MapExpression h(config.at("h").get<std::string>(), hp);
        return System{conjugate(inner.map, h), std::nullopt, std::nullopt};
    }
    if (family == "projective") {
        CocycleSpec c = load_cocycle(config.at("cocycle"));
        return System{projectivize(c), c, std::nullopt};
    }
    throw Error("unknown map family '" + family + "'");
}

namespace {

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error("config file " + path + ": " + e.what());
    }
    return j;
}

}  // namespace

System load_system_file(const std::string& path) { return load_system(read_json_file(path)); }

CocycleSpec load_cocycle_file(const std::string& path) {
    json j = read_json_file(path);
    if (j.contains("cocycle")) return load_cocycle(j.at("cocycle"));
    return load_cocycle(j);
}

json to_json(const RotationEstimate& est) {
    return json{{"value", est.value},
                {"spread", est.spread},
                {"n", est.n_iterates},
                {"method", est.method == RotationMethod::Orbit ? "orbit" : "fibre-average"}};
}

json to_json(const RationalRelation& rel) {
    return json{{"l", rel.l}, {"k", rel.k}, {"q", rel.q}, {"residual", rel.residual}};
}

json to_json(const DeviationProfile& prof) {
    return json{{"rho", prof.rho_used},
                {"theta0", prof.theta0},
                {"x0", prof.x0},
                {"n", prof.n_max},
                {"sup_dev", prof.sup_dev},
                {"inf_dev", prof.inf_dev},
                {"growth_exponent", prof.growth_exponent},
                {"bounded_above", prof.bounded_above},
                {"bounded_below", prof.bounded_below}};
}

json to_json(const RegularityVerdict& verdict) {
    json orbits = json::array();
    for (const auto& p : verdict.evidence) orbits.push_back(to_json(p));
    return json{{"verdict", to_string(verdict.verdict)},
                {"C_estimate", verdict.C_estimate},
                {"exponent_threshold", verdict.exponent_threshold},
                {"orbits", orbits}};
}

json to_json(const LyapunovEstimate& est) {
    return json{{"value", est.value}, {"drift", est.drift}, {"n", est.n_iterates}};
}

json to_json(const BoxScanResult& scan) {
    json j{{"grid", scan.grid},
           {"verdict", to_string(scan.verdict)},
           {"budget", scan.budget},
           {"unreached_pairs", scan.unreached_pairs}};
    if (scan.witness_source >= 0) {
        j["witness_source"] = scan.witness_source;
        j["witness_target"] = scan.witness_target;
    }
    return j;
}

json to_json(const StripSearchResult& res) {
    return json{{"q", res.strip.cover_q},
                {"k", res.strip.winding_k},
                {"G", res.strip.grid()},
                {"width", res.strip.width()},
                {"max_half_width", res.max_half_width},
                {"contained", res.contained},
                {"n_forward", res.n_forward},
                {"n_backward", res.n_backward}};
}

json to_json(const PullbackResult& res) {
    return json{{"G", res.strip.grid()},
                {"q", res.strip.cover_q},
                {"k", res.strip.winding_k},
                {"width", res.strip.width()},
                {"converged", res.converged},
                {"final_step", res.final_step}};
}

json to_json(const DefectReport& rep, const StripFamily& family) {
    return json{{"defect", rep.defect},
                {"quantization", rep.quantization},
                {"ordered", true},
                {"order_violation", family.max_order_violation},
                {"max_strip_width", family.max_strip_width},
                {"R", family.R},
                {"G", family.G}};
}

json to_json(const ClassificationReport& rep) {
    json j;
    j["quadrant"] = to_string(rep.quadrant);
    j["rotation"] = to_json(rep.rotation);
    j["relation"] = rep.relation ? to_json(*rep.relation) : json(nullptr);
    j["regularity"] = to_string(rep.regularity);
    j["C_estimate"] = rep.C_estimate;
    j["growth_exponents"] = rep.growth_exponents;
    if (rep.strip) {
        j["strip"] = json{{"width", rep.strip->width},
                          {"max_half_width", rep.strip->max_half_width},
                          {"contained", rep.strip->contained},
                          {"q", rep.strip->cover_q},
                          {"k", rep.strip->winding_k}};
    } else {
        j["strip"] = nullptr;
    }
    j["semiconjugacy_defect"] =
        rep.semiconjugacy_defect ? json(*rep.semiconjugacy_defect) : json(nullptr);
    j["family_order_violation"] =
        rep.family_order_violation ? json(*rep.family_order_violation) : json(nullptr);
    j["lyapunov"] = rep.lyapunov ? to_json(*rep.lyapunov) : json(nullptr);
    j["transitivity"] = rep.transitivity ? json(to_string(*rep.transitivity)) : json(nullptr);
    j["transitive_unreached"] = rep.transitive_unreached;
    j["notes"] = rep.notes;
    return j;
}

json make_document(const std::string& kind, json payload, long long seed) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["kind"] = kind;
    doc["seed"] = seed;
    doc["result"] = std::move(payload);
    return doc;
}

}  // namespace qpf
