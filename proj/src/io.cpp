#include "failsafe/io.hpp"

#include <cmath>

#include "failsafe/error.hpp"
#include "failsafe/fileio.hpp"

namespace failsafe::io {

namespace {

double number(const json& j, const char* key, const std::string& ctx) {
    require(j.contains(key), ctx + ": missing '" + key + "'");
    require(j.at(key).is_number(), ctx + ": '" + key + "' must be a number");
    return j.at(key).get<double>();
}

std::vector<double> numbers(const json& j, const std::string& ctx) {
    require(j.is_array(), ctx + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        require(v.is_number(), ctx + ": expected an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

const json& field(const json& j, const char* key, const std::string& ctx) {
    require(j.is_object(), ctx + ": expected an object");
    require(j.contains(key), ctx + ": missing '" + key + "'");
    return j.at(key);
}

std::string text(const json& j, const char* key, const std::string& ctx) {
    const auto& v = field(j, key, ctx);
    require(v.is_string(), ctx + ": '" + key + "' must be a string");
    return v.get<std::string>();
}

// JSON has no infinities; map them to null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

} // namespace

json parse_json(const std::string& text, const std::string& where) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(where + ": malformed JSON: " + e.what());
    }
}

Generator generator_from_json(const json& j) {
    const auto fam = generator_family_from_string(text(j, "family", "generator"));
    if (fam == GeneratorFamily::Independence) return Generator::independence();
    return Generator(fam, number(j, "theta", "generator"));
}

json to_json(const Generator& g) {
    json j{{"family", std::string(to_string(g.family()))}};
    if (g.family() != GeneratorFamily::Independence) j["theta"] = g.theta();
    return j;
}

Baseline baseline_from_json(const json& j) {
    return Baseline(baseline_family_from_string(text(j, "family", "baseline")),
                    numbers(field(j, "params", "baseline"), "baseline.params"));
}

json to_json(const Baseline& b) {
    return {{"family", std::string(to_string(b.family()))}, {"params", b.params()}};
}

SemiParamModel model_from_json(const json& j) {
    const auto kind = model_kind_from_string(text(j, "kind", "model"));
    FixedParams fixed;
    if (j.contains("fixed")) {
        const auto& f = j.at("fixed");
        require(f.is_object(), "model.fixed: expected an object");
        if (f.contains("alpha")) fixed.alpha = number(f, "alpha", "model.fixed");
        if (f.contains("lambda")) fixed.lambda = number(f, "lambda", "model.fixed");
    }
    return SemiParamModel(kind, baseline_from_json(field(j, "baseline", "model")), fixed);
}

json to_json(const SemiParamModel& m) {
    json j{{"kind", std::string(to_string(m.kind()))}, {"baseline", to_json(m.baseline())}};
    if (m.kind() == ModelKind::MPHRS)
        j["fixed"] = {{"alpha", m.fixed().alpha}, {"lambda", m.fixed().lambda}};
    else if (m.kind() == ModelKind::LS)
        j["fixed"] = {{"lambda", m.fixed().lambda}};
    return j;
}

SystemSpec system_from_json(const json& j) {
    require(j.is_object(), "system: expected an object");
    SystemSpec s{model_from_json(field(j, "model", "system")),
                 numbers(field(j, "theta", "system"), "system.theta"),
                 generator_from_json(field(j, "generator", "system"))};
    if (j.contains("n")) {
        require(j.at("n").is_number_integer(), "system: 'n' must be an integer");
        require(j.at("n").get<long>() == static_cast<long>(s.theta.size()),
                "system: n does not match the length of theta");
    }
    s.validate();
    return s;
}

json to_json(const SystemSpec& s) {
    return {{"n", s.n()},
            {"generator", to_json(s.generator)},
            {"model", to_json(s.model)},
            {"theta", s.theta}};
}

SystemSpec load_system(const std::string& path) {
    return system_from_json(parse_json(read_file(path), path));
}

json to_json(const preorders::OrderReport& r) {
    json rel = json::object();
    for (const auto& x : r.relations)
        rel[std::string(preorders::to_string(x.kind))] = {
            {"a_over_b", x.a_over_b}, {"b_over_a", x.b_over_a}, {"skipped", x.skipped}};
    return {{"a_sorted", r.a_sorted}, {"b_sorted", r.b_sorted}, {"tol", r.tol},
            {"relations", rel}};
}

json to_json(const LogShapeReport& r) {
    return {{"shape", std::string(to_string(r.shape))},
            {"max_second", num(r.max_second)},
            {"min_second", num(r.min_second)},
            {"t_max", r.t_max},
            {"grid_points", r.grid_points}};
}

json to_json(const ShapeVerdict& v) {
    return {{"property", std::string(to_string(v.property))},
            {"holds", v.holds},
            {"worst_violation", num(v.worst_violation)},
            {"at_x", v.at_x},
            {"at_param", v.at_param},
            {"tol", v.tol},
            {"probe", v.probe}};
}

json to_json(const DominanceVerdict& v) {
    json cr = json::array();
    for (auto [lo, hi] : v.crossings) cr.push_back({lo, hi});
    return {{"relation", std::string(to_string(v.relation))},
            {"min_gap", v.min_gap},
            {"max_gap", v.max_gap},
            {"crossings", cr},
            {"chatter", v.chatter},
            {"tol", v.tol},
            {"crossing_tol", v.crossing_tol},
            {"grid", {{"points", v.xs.size()},
                      {"x_min", v.xs.empty() ? 0.0 : v.xs.front()},
                      {"x_max", v.xs.empty() ? 0.0 : v.xs.back()}}}};
}

json to_json(const ConditionReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"holds", c.holds},
                          {"value", num(c.value)},
                          {"evidence", c.evidence}});
    json j{{"theorem", r.theorem},
           {"checks", checks},
           {"overall", r.overall},
           {"inconsistent", r.inconsistent}};
    json out = r.dominance ? to_json(*r.dominance) : json::object();
    out["report"] = j;
    return out;
}

json to_json(const SchurProbe& p) {
    return {{"worst", p.worst}, {"p", p.p}, {"q", p.q}, {"at_x", p.at_x}};
}

json to_json(const fitlab::FitResult& f) {
    return {{"family", std::string(fitlab::to_string(f.family))},
            {"params", f.params},
            {"loglik", f.loglik},
            {"aic", f.aic},
            {"bic", f.bic},
            {"n", f.n},
            {"k", f.k},
            {"converged", f.converged}};
}

json to_json(const fitlab::GofResult& g) {
    return {{"family", std::string(to_string(g.family))},
            {"theta", g.theta},
            {"statistic", g.statistic},
            {"p_value", g.p_value},
            {"boot_n", g.boot_n},
            {"seed", g.seed}};
}

json to_json(const fitlab::SubsetRecommendation& s) {
    json certs = json::array();
    for (const auto& c : s.certificates)
        certs.push_back({{"winner", c.winner},
                         {"loser", c.loser},
                         {"p_larger", c.p_larger},
                         {"grid_relation", std::string(to_string(c.grid_relation))},
                         {"min_gap", c.min_gap},
                         {"theorem1_verified", c.theorem1_verified}});
    json inc = json::array(), ties = json::array();
    for (const auto& [a, b] : s.incomparable) inc.push_back({a, b});
    for (const auto& [a, b] : s.ties) ties.push_back({a, b});
    return {{"maximal", s.maximal},
            {"ranking", s.ranking},
            {"certificates", certs},
            {"incomparable", inc},
            {"ties", ties}};
}

std::string curve_csv(const SurvivalCurve& c) {
    std::string out = "x,survival\n";
    for (std::size_t i = 0; i < c.xs.size(); ++i)
        out += format_double(c.xs[i]) + "," + format_double(c.values[i]) + "\n";
    return out;
}

std::string paired_curve_csv(const SurvivalCurve& cx, const SurvivalCurve& cy) {
    require(cx.xs == cy.xs, "paired curves need identical grids");
    std::string out = "x,survival_x,survival_y,gap\n";
    for (std::size_t i = 0; i < cx.xs.size(); ++i)
        out += format_double(cx.xs[i]) + "," + format_double(cx.values[i]) + "," +
               format_double(cy.values[i]) + "," + format_double(cx.values[i] - cy.values[i]) +
               "\n";
    return out;
}

} // namespace failsafe::io
