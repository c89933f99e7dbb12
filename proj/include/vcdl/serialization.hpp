#pragma once
// JSON forms of the data model. Doubles are written in shortest round-trip
// form, so every value survives a write/read cycle bit for bit.
//
//   PiecewiseDensity   {"breakpoints":[...],"masses":[...]}
//   IntervalUnion      {"intervals":[[a,b],...]}

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "vcdl/instances.hpp"
#include "vcdl/interval_union.hpp"
#include "vcdl/loss.hpp"
#include "vcdl/piecewise_density.hpp"
#include "vcdl/validity.hpp"

namespace vcdl {

using json = nlohmann::json;

inline json to_json_value(const PiecewiseDensity& d) {
    return json{{"breakpoints", d.breakpoints()}, {"masses", d.masses()}};
}

inline PiecewiseDensity density_from_json(const json& j) {
    if (!j.is_object() || !j.contains("breakpoints") || !j.contains("masses"))
        throw std::invalid_argument("density JSON needs \"breakpoints\" and \"masses\"");
    return PiecewiseDensity(j.at("breakpoints").get<std::vector<double>>(), j.at("masses").get<std::vector<double>>());
}

inline json to_json_value(const IntervalUnion& u) {
    json arr = json::array();
    for (const auto& iv : u.intervals()) arr.push_back(json::array({iv.lo, iv.hi}));
    return json{{"intervals", arr}};
}

inline IntervalUnion intervals_from_json(const json& j) {
    if (!j.is_object() || !j.contains("intervals")) throw std::invalid_argument("region JSON needs \"intervals\"");
    std::vector<Interval> pieces;
    for (const auto& p : j.at("intervals")) {
        if (!p.is_array() || p.size() != 2) throw std::invalid_argument("each interval must be [lo, hi]");
        pieces.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return IntervalUnion(std::move(pieces));
}

inline json to_json_value(const LossSpec& l) {
    switch (l.kind()) {
        case LossSpec::Kind::Log:
            return json{{"kind", "log"}};
        case LossSpec::Kind::CappedLog:
            return json{{"kind", "capped_log"}, {"M", l.cap()}};
        case LossSpec::Kind::Table: {
            json knots = json::array();
            for (const auto& [z, v] : l.knots()) knots.push_back(json::array({z, v}));
            return json{{"kind", "table"}, {"knots", knots}};
        }
    }
    return {};
}

inline LossSpec loss_from_json(const json& j) {
    const auto kind = j.value("kind", std::string("log"));
    if (kind == "log") return LossSpec::log();
    if (kind == "capped_log") {
        if (!j.contains("M")) throw std::invalid_argument("capped_log loss needs \"M\"");
        return LossSpec::capped_log(j.at("M").get<double>());
    }
    if (kind == "hinge") return LossSpec::linear_hinge();
    if (kind == "table") {
        std::vector<std::pair<double, double>> knots;
        for (const auto& k : j.at("knots")) knots.emplace_back(k.at(0).get<double>(), k.at(1).get<double>());
        return LossSpec::table(std::move(knots));
    }
    throw std::invalid_argument("unknown loss kind \"" + kind + "\"");
}

inline json to_json_value(const ProblemInstance& inst) {
    json Q = json::array();
    for (const auto& q : inst.Q) Q.push_back(to_json_value(q));
    json j{{"generator", inst.generator},
           {"P", to_json_value(inst.P)},
           {"Q", Q},
           {"valid_region", to_json_value(inst.valid_region)},
           {"c", inst.c},
           {"gamma", inst.gamma},
           {"alpha", inst.alpha},
           {"beta", inst.beta},
           {"q_star_index", inst.q_star_index},
           {"realizable", inst.realizable}};
    if (inst.validity_class) j["max_intervals"] = inst.validity_class->k;
    if (inst.d_ref) j["d_ref"] = to_json_value(*inst.d_ref);
    return j;
}

inline ProblemInstance instance_from_json(const json& j) {
    std::vector<PiecewiseDensity> Q;
    for (const auto& q : j.at("Q")) Q.push_back(density_from_json(q));
    ProblemInstance inst{j.value("generator", std::string("inline")), density_from_json(j.at("P")), std::move(Q),
                         intervals_from_json(j.at("valid_region")), std::nullopt, std::nullopt};
    if (j.contains("max_intervals")) inst.validity_class = IntervalUnionClass(j.at("max_intervals").get<std::size_t>());
    if (j.contains("d_ref")) inst.d_ref = density_from_json(j.at("d_ref"));
    inst.c = j.value("c", 0.0);
    inst.gamma = j.value("gamma", 0.0);
    inst.alpha = j.value("alpha", 0.0);
    inst.beta = j.value("beta", kInf);
    inst.q_star_index = j.value("q_star_index", std::size_t{0});
    inst.realizable = j.value("realizable", false);
    return inst;
}

inline json to_json_value(const std::vector<LabeledPoint>& pts) {
    json arr = json::array();
    for (const auto& p : pts) arr.push_back(json{{"x", p.x}, {"label", p.label}});
    return arr;
}

inline std::vector<LabeledPoint> labeled_points_from_json(const json& j) {
    std::vector<LabeledPoint> out;
    for (const auto& p : j) out.push_back({p.at("x").get<double>(), p.at("label").get<bool>()});
    return out;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace vcdl
