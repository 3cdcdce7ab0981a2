#include "smren/io.hpp"

#include <json.hpp>

namespace smren {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
    json doc = json::parse(text);  // throws json::parse_error on malformed input
    if (!doc.is_object() || !doc.contains("probs"))
        throw domain_error("expected an object with a \"probs\" field");
    return doc;
}

}  // namespace

bool json_is_joint(const std::string& text) {
    json doc = parse(text);
    const json& p = doc["probs"];
    return p.is_array() && !p.empty() && p[0].is_array();
}

Dist dist_from_json(const std::string& text) {
    json doc = parse(text);
    std::vector<double> w = doc["probs"].get<std::vector<double>>();
    return make_dist(w);
}

JointDist joint_from_json(const std::string& text) {
    json doc = parse(text);
    std::vector<std::vector<double>> rows =
        doc["probs"].get<std::vector<std::vector<double>>>();
    return make_joint(rows);
}

std::string dist_to_json(const Dist& d) {
    json doc;
    doc["probs"] = d.probs();
    return doc.dump();
}

std::string joint_to_json(const JointDist& j) {
    std::vector<std::vector<double>> rows(j.nx(), std::vector<double>(j.ny()));
    for (std::size_t x = 0; x < j.nx(); ++x)
        for (std::size_t y = 0; y < j.ny(); ++y) rows[x][y] = j.p(x, y);
    json doc;
    doc["probs"] = rows;
    return doc.dump();
}

JointDist bss(double delta) {
    require(delta > 0 && delta < 1, "bss: delta must lie in (0,1)");
    const double a = (1.0 - delta) / 2.0, b = delta / 2.0;
    return make_joint({{a, b}, {b, a}});
}

JointDist bes(double delta) {
    require(delta > 0 && delta < 1, "bes: delta must lie in (0,1)");
    const double a = (1.0 - delta) / 2.0, e = delta / 2.0;
    return make_joint({{a, 0.0, e}, {0.0, a, e}});
}

JointDist bses(double delta_c, double delta_e) {
    require(delta_c > 0 && delta_e > 0 && delta_c + delta_e < 1,
            "bses: need positive crossover/erasure with total below 1");
    const double a = (1.0 - delta_c - delta_e) / 2.0;
    const double c = delta_c / 2.0, e = delta_e / 2.0;
    return make_joint({{a, c, e}, {c, a, e}});
}

Dist bernoulli(double p) {
    require(p > 0 && p < 1, "bernoulli: p must lie in (0,1)");
    return make_dist({1.0 - p, p});
}

}  // namespace smren
