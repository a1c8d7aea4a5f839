#pragma once

// JSON run configuration. Keys: equation, frame, s, r, q, b, epsilon, L, n,
// cfl, t_end, output_every, initial{type, ...}, seed. Unknown keys are
// rejected so typos fail loudly.

#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "fracpme/barenblatt.hpp"
#include "fracpme/solver.hpp"

namespace fracpme {

inline Equation parse_equation(const std::string& name) {
    if (name == "pure") return Equation::pure;
    if (name == "absorption") return Equation::absorption;
    if (name == "convection") return Equation::convection;
    if (name == "convection_integrated") return Equation::convection_integrated;
    throw validation_error("config: unknown equation '" + name + "'");
}

inline Frame parse_frame(const std::string& name) {
    if (name == "similarity") return Frame::similarity;
    if (name == "physical") return Frame::physical;
    throw validation_error("config: unknown frame '" + name + "'");
}

inline InitialCondition parse_initial(const nlohmann::json& j) {
    InitialCondition ic;
    if (!j.is_object() || !j.contains("type"))
        throw validation_error("config: initial must be an object with a 'type'");
    const std::string type = j.at("type").get<std::string>();
    static const std::set<std::string> allowed = {
        "type", "mass", "half_width", "sigma", "center", "amplitude", "bump_width"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw validation_error("config: unknown initial key '" + it.key() + "'");
    if (type == "box") ic.type = InitialCondition::Type::box;
    else if (type == "gaussian") ic.type = InitialCondition::Type::gaussian;
    else if (type == "perturbed_barenblatt")
        ic.type = InitialCondition::Type::perturbed_barenblatt;
    else throw validation_error("config: unknown initial type '" + type + "'");
    ic.mass = j.value("mass", ic.mass);
    ic.half_width = j.value("half_width", ic.half_width);
    ic.sigma = j.value("sigma", ic.sigma);
    ic.center = j.value("center", ic.center);
    ic.amplitude = j.value("amplitude", ic.amplitude);
    ic.bump_width = j.value("bump_width", ic.bump_width);
    return ic;
}

inline SolverConfig parse_config(const nlohmann::json& j) {
    if (!j.is_object()) throw validation_error("config: expected a JSON object");
    static const std::set<std::string> allowed = {
        "equation", "frame", "s", "r", "q", "b", "epsilon", "L", "n",
        "cfl", "t_end", "output_every", "initial", "seed"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw validation_error("config: unknown key '" + it.key() + "'");
    SolverConfig cfg;
    if (j.contains("equation")) cfg.equation = parse_equation(j.at("equation"));
    if (j.contains("frame")) cfg.frame = parse_frame(j.at("frame"));
    cfg.s = j.value("s", cfg.s);
    cfg.r = j.value("r", cfg.r);
    cfg.q = j.value("q", cfg.q);
    cfg.b = j.value("b", cfg.b);
    cfg.epsilon = j.value("epsilon", cfg.epsilon);
    cfg.n = j.value("n", cfg.n);
    cfg.cfl = j.value("cfl", cfg.cfl);
    cfg.t_end = j.value("t_end", cfg.t_end);
    cfg.output_every = j.value("output_every", cfg.output_every);
    if (j.contains("initial")) cfg.initial = parse_initial(j.at("initial"));
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("L")) {
        cfg.L = j.at("L").get<double>();
    } else {
        // default domain: four Barenblatt radii of the initial mass
        require_s_range(cfg.s);
        if (!(cfg.initial.mass > 0.0))
            throw validation_error("config: initial mass must be > 0");
        cfg.L = 4.0 * radius_from_mass(cfg.initial.mass, cfg.s);
    }
    cfg.validate();
    return cfg;
}

inline SolverConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error("config: malformed JSON in '" + path + "': " + e.what());
    }
    return parse_config(j);
}

}  // namespace fracpme
