#pragma once

// JSON configuration form of the radial laws and quantiser families:
//   {"variant": "...", "params": {...}, "d": int}

#include <string>

#include <json.hpp>

#include "sphq/radial.hpp"

namespace sphq {

inline void to_json(nlohmann::json& j, const RadialLaw& law) {
    switch (law.variant) {
    case RadialVariant::point_mass:
        j = {{"variant", "point_mass"}, {"params", {{"a", law.param}}}, {"d", law.dim}};
        break;
    case RadialVariant::ball_power:
        j = {{"variant", "ball_power"}, {"params", {{"b", law.param}}}, {"d", law.dim}};
        break;
    case RadialVariant::scaled_chi:
        j = {{"variant", "scaled_chi"}, {"params", {{"sigma", law.param}}}, {"d", law.dim}};
        break;
    }
}

inline void from_json(const nlohmann::json& j, RadialLaw& law) {
    const std::string v = j.at("variant").get<std::string>();
    const int d = j.at("d").get<int>();
    const auto& p = j.at("params");
    if (v == "point_mass")
        law = RadialLaw::point_mass(p.at("a").get<double>(), d);
    else if (v == "ball_power")
        law = RadialLaw::ball_power(p.at("b").get<double>(), d);
    else if (v == "scaled_chi")
        law = RadialLaw::scaled_chi(p.at("sigma").get<double>(), d);
    else
        throw std::domain_error("RadialLaw: unknown variant '" + v + "'");
}

inline void to_json(nlohmann::json& j, const QuantiserFamily& q) {
    switch (q.variant) {
    case QuantiserVariant::sphere_uniform:
        j = {{"variant", "sphere"}, {"params", {{"a", q.param}}}, {"d", q.dim}};
        break;
    case QuantiserVariant::ball_uniform:
        j = {{"variant", "ball"}, {"params", {{"b", q.param}}}, {"d", q.dim}};
        break;
    case QuantiserVariant::normal_scaled:
        j = {{"variant", "normal"}, {"params", {{"sigma", q.param}}}, {"d", q.dim}};
        break;
    case QuantiserVariant::sphere_with_atom:
        j = {{"variant", "sphere_with_atom"},
             {"params", {{"alpha", q.atom_weight}, {"a", q.param}}},
             {"d", q.dim}};
        break;
    }
}

inline void from_json(const nlohmann::json& j, QuantiserFamily& q) {
    const std::string v = j.at("variant").get<std::string>();
    const int d = j.at("d").get<int>();
    const auto& p = j.at("params");
    if (v == "sphere")
        q = QuantiserFamily::sphere(p.at("a").get<double>(), d);
    else if (v == "ball")
        q = QuantiserFamily::ball(p.at("b").get<double>(), d);
    else if (v == "normal")
        q = QuantiserFamily::normal(p.at("sigma").get<double>(), d);
    else if (v == "sphere_with_atom")
        q = QuantiserFamily::sphere_with_atom(p.at("alpha").get<double>(),
                                              p.at("a").get<double>(), d);
    else
        throw std::domain_error("QuantiserFamily: unknown variant '" + v + "'");
}

} // namespace sphq
