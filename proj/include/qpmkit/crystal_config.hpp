#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "qpmkit/dispersion.hpp"
#include "qpmkit/errors.hpp"

// Crystal profile (de)serialization:
//
//   { "name": "...",
//     "axes": { "y": { "sellmeier": {"A":..,"B":..,"C":..,"D":..},
//                      "thermo_optic": { "n1": [a0,a1,a2,a3], "n2": [a0,a1,a2,a3] } },
//               "z": { ... } },
//     "t_ref_c": 25.0,
//     "validity_um": [0.40, 1.10] }

namespace qpmkit {

inline constexpr std::string_view kBuiltinProfile = "ktp-default";

namespace detail {

inline AxisDispersion axis_from_json(const nlohmann::json& j) {
    AxisDispersion axis;
    const auto& s = j.at("sellmeier");
    axis.sellmeier = {s.at("A").get<double>(), s.at("B").get<double>(), s.at("C").get<double>(),
                      s.at("D").get<double>()};
    const auto& t = j.at("thermo_optic");
    axis.thermo_optic.first = t.at("n1").get<std::array<double, 4>>();
    axis.thermo_optic.second = t.at("n2").get<std::array<double, 4>>();
    return axis;
}

inline nlohmann::json axis_to_json(const AxisDispersion& axis) {
    const auto& s = axis.sellmeier;
    return {{"sellmeier", {{"A", s.a}, {"B", s.b}, {"C", s.c}, {"D", s.d}}},
            {"thermo_optic", {{"n1", axis.thermo_optic.first}, {"n2", axis.thermo_optic.second}}}};
}

}  // namespace detail

// Checks the model invariants: no Sellmeier pole inside the window and
// indices inside (1.5, 2.2) across it. Throws ModelError.
inline void validate(const DispersionModel& model) {
    const auto& w = model.validity;
    if (!(w.min_um > 0.0) || !(w.max_um > w.min_um)) {
        throw ModelError("invalid validity window in model '" + model.name + "'");
    }
    constexpr int kSamples = 64;
    for (Axis axis : {Axis::Y, Axis::Z}) {
        const auto& s = model.axis(axis).sellmeier;
        if (1.0 - s.c / (w.min_um * w.min_um) <= 0.0) {
            throw ModelError("Sellmeier pole inside validity window (axis " +
                             std::string(to_string(axis)) + ")");
        }
        for (int i = 0; i <= kSamples; ++i) {
            const double lambda = w.min_um + (w.max_um - w.min_um) * i / kSamples;
            const double n = sellmeier_index(model, axis, lambda);
            if (!(n > 1.5 && n < 2.2)) {
                throw ModelError("index " + std::to_string(n) + " outside (1.5, 2.2) on axis " +
                                 std::string(to_string(axis)));
            }
        }
    }
}

inline DispersionModel dispersion_from_json(const nlohmann::json& j) {
    DispersionModel model;
    try {
        model.name = j.value("name", std::string("custom"));
        model.y = detail::axis_from_json(j.at("axes").at("y"));
        model.z = detail::axis_from_json(j.at("axes").at("z"));
        model.t_ref_c = j.at("t_ref_c").get<double>();
        const auto window = j.at("validity_um").get<std::array<double, 2>>();
        model.validity = {window[0], window[1]};
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(std::string("malformed crystal profile: ") + e.what());
    }
    validate(model);
    return model;
}

inline nlohmann::json dispersion_to_json(const DispersionModel& model) {
    return {{"name", model.name},
            {"axes", {{"y", detail::axis_to_json(model.y)}, {"z", detail::axis_to_json(model.z)}}},
            {"t_ref_c", model.t_ref_c},
            {"validity_um", {model.validity.min_um, model.validity.max_um}}};
}

// Resolves a built-in profile name or a path to a JSON profile.
inline DispersionModel load_crystal(const std::string& name_or_path) {
    if (name_or_path.empty() || name_or_path == kBuiltinProfile) {
        return ktp_default();
    }
    std::ifstream in{std::filesystem::path(name_or_path)};
    if (!in) {
        throw ModelError("cannot open crystal profile '" + name_or_path + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ModelError("crystal profile '" + name_or_path + "' is not valid JSON: " + e.what());
    }
    return dispersion_from_json(j);
}

}  // namespace qpmkit
