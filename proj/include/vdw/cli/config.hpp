#pragma once

// Run configuration: one JSON document describing the atom, named materials,
// the geometry (or several labelled geometries) and per-command settings.
// Unknown keys are rejected.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <initializer_list>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vdw/asymptotics.hpp"
#include "vdw/materials.hpp"
#include "vdw/quadrature.hpp"
#include "vdw/stack.hpp"

namespace vdw::cli {

using nlohmann::json;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class GeometryType { halfspace, plate, thin, two_plates, multilayer, mirror };

inline std::string to_string(GeometryType g)
{
    switch (g) {
    case GeometryType::halfspace: return "halfspace";
    case GeometryType::plate: return "plate";
    case GeometryType::thin: return "thin";
    case GeometryType::two_plates: return "two-plates";
    case GeometryType::multilayer: return "multilayer";
    case GeometryType::mirror: return "mirror";
    }
    return "?";
}

struct Series {
    std::string label;
    GeometryType type = GeometryType::halfspace;
    std::string material_name;
    MaterialModel material;
    double thickness = 0.0;  // plate, thin
    double separation = 0.0; // two-plates
    MirrorKind mirror = MirrorKind::conducting;
    std::optional<LayerStack> stack;
};

struct ScanSettings {
    std::vector<double> z;
};

struct BorderSettings {
    std::vector<PlateKind> plates{PlateKind::thick, PlateKind::thin};
    std::vector<double> eps0;
};

struct WallSettings {
    WallSearchOptions search;
};

struct CheckSettings {
    std::vector<double> z{1.0};
};

struct CoeffsSettings {
    std::optional<double> thickness;
};

struct OutputSettings {
    std::string directory = ".";
    std::string basename = "vdw";
    std::string format = "csv";
};

struct RunConfig {
    std::string command;
    double reference_frequency = 1.0;
    AtomModel atom;
    std::map<std::string, MaterialModel> materials;
    std::vector<Series> series;
    ScanSettings scan;
    BorderSettings border;
    WallSettings wall;
    CheckSettings check;
    CoeffsSettings coeffs;
    QuadratureSpec quadrature;
    OutputSettings output;
    unsigned threads = 0; // 0: hardware concurrency
    /// The document the run was built from, with command-line overrides
    /// applied; written back as the sidecar.
    json document;
};

namespace detail {

inline void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where)
{
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

inline double number(const json& j, const std::string& where)
{
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(where + ": must be finite");
    return v;
}

inline double positive(const json& j, const std::string& where)
{
    const double v = number(j, where);
    if (!(v > 0.0)) throw ConfigError(where + ": must be positive");
    return v;
}

inline double non_negative(const json& j, const std::string& where)
{
    const double v = number(j, where);
    if (!(v >= 0.0)) throw ConfigError(where + ": must be non-negative");
    return v;
}

inline std::string string(const json& j, const std::string& where)
{
    if (!j.is_string()) throw ConfigError(where + ": expected a string");
    return j.get<std::string>();
}

inline Resonance resonance(const json& j, double wref, const std::string& where)
{
    check_keys(j, {"plasma", "transverse", "damping"}, where);
    if (!j.contains("plasma") || !j.contains("transverse"))
        throw ConfigError(where + ": 'plasma' and 'transverse' are required");
    Resonance r;
    r.plasma_frequency = non_negative(j["plasma"], where + ".plasma") / wref;
    r.transverse_frequency = positive(j["transverse"], where + ".transverse") / wref;
    r.damping = j.contains("damping") ? non_negative(j["damping"], where + ".damping") / wref : 0.0;
    return r;
}

inline MaterialModel material(const json& j, double wref, const std::string& where)
{
    check_keys(j, {"electric", "magnetic", "perfect"}, where);
    if (j.contains("perfect")) {
        if (j.contains("electric") || j.contains("magnetic"))
            throw ConfigError(where + ": 'perfect' excludes resonance lists");
        const std::string k = string(j["perfect"], where + ".perfect");
        if (k == "conducting") return MaterialModel::perfect(MirrorKind::conducting);
        if (k == "permeable") return MaterialModel::perfect(MirrorKind::permeable);
        throw ConfigError(where + ".perfect: expected 'conducting' or 'permeable'");
    }
    auto list = [&](const char* key) {
        std::vector<Resonance> out;
        if (!j.contains(key)) return out;
        if (!j[key].is_array()) throw ConfigError(where + "." + key + ": expected an array");
        for (std::size_t i = 0; i < j[key].size(); ++i)
            out.push_back(resonance(j[key][i], wref, where + "." + key + "[" + std::to_string(i) + "]"));
        return out;
    };
    return MaterialModel(list("electric"), list("magnetic"));
}

inline MirrorKind mirror_kind(const json& j, const std::string& where)
{
    const std::string k = string(j, where);
    if (k == "conducting") return MirrorKind::conducting;
    if (k == "permeable") return MirrorKind::permeable;
    throw ConfigError(where + ": expected 'conducting' or 'permeable'");
}

inline std::vector<double> grid(const json& j, double default_lo, double default_hi, int default_points,
                                const std::string& default_spacing, const std::string& where)
{
    // either an explicit list or {min, max, points, spacing}
    if (j.is_array()) {
        std::vector<double> v;
        for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
        if (v.empty()) throw ConfigError(where + ": empty list");
        return v;
    }
    check_keys(j, {"min", "max", "points", "spacing"}, where);
    const double lo = j.contains("min") ? number(j["min"], where + ".min") : default_lo;
    const double hi = j.contains("max") ? number(j["max"], where + ".max") : default_hi;
    int n = default_points;
    if (j.contains("points")) {
        if (!j["points"].is_number_integer() || j["points"].get<int>() < 1)
            throw ConfigError(where + ".points: expected a positive integer");
        n = j["points"].get<int>();
    }
    const std::string spacing = j.contains("spacing") ? string(j["spacing"], where + ".spacing") : default_spacing;
    if (spacing != "log" && spacing != "linear") throw ConfigError(where + ".spacing: expected 'log' or 'linear'");
    if (!(hi >= lo)) throw ConfigError(where + ": max must not be below min");
    if (spacing == "log" && !(lo > 0.0)) throw ConfigError(where + ": log spacing needs min > 0");
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
        v[i] = spacing == "log" ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo);
    }
    return v;
}

} // namespace detail

inline const MaterialModel& find_material(const RunConfig& c, const std::string& name, const std::string& where)
{
    static const MaterialModel vacuum = MaterialModel::vacuum();
    if (name == "vacuum") return vacuum;
    const auto it = c.materials.find(name);
    if (it == c.materials.end()) throw ConfigError(where + ": unknown material '" + name + "'");
    return it->second;
}

inline Series parse_series(const json& j, const RunConfig& c, const std::string& where)
{
    using namespace detail;
    if (!j.is_object() || !j.contains("type")) throw ConfigError(where + ": 'type' is required");
    Series s;
    const std::string type = string(j["type"], where + ".type");
    s.label = j.contains("label") ? string(j["label"], where + ".label") : type;
    auto need = [&](const char* key) -> const json& {
        if (!j.contains(key)) throw ConfigError(where + ": '" + key + "' is required for type " + type);
        return j[key];
    };
    auto mat = [&]() {
        s.material_name = string(need("material"), where + ".material");
        s.material = find_material(c, s.material_name, where + ".material");
    };
    if (type == "halfspace") {
        check_keys(j, {"type", "label", "material"}, where);
        s.type = GeometryType::halfspace;
        mat();
    } else if (type == "plate" || type == "thin") {
        check_keys(j, {"type", "label", "material", "thickness"}, where);
        s.type = type == "plate" ? GeometryType::plate : GeometryType::thin;
        mat();
        s.thickness = positive(need("thickness"), where + ".thickness");
        if (s.type == GeometryType::thin && s.material.is_mirror())
            throw ConfigError(where + ": a thin plate cannot be a perfect mirror");
    } else if (type == "two-plates") {
        check_keys(j, {"type", "label", "material", "separation"}, where);
        s.type = GeometryType::two_plates;
        mat();
        s.separation = positive(need("separation"), where + ".separation");
    } else if (type == "mirror") {
        check_keys(j, {"type", "label", "kind"}, where);
        s.type = GeometryType::mirror;
        s.mirror = mirror_kind(need("kind"), where + ".kind");
        s.material = MaterialModel::perfect(s.mirror);
        s.material_name = s.mirror == MirrorKind::conducting ? "conducting" : "permeable";
    } else if (type == "multilayer") {
        check_keys(j, {"type", "label", "layers", "atom_layer"}, where);
        s.type = GeometryType::multilayer;
        const json& layers = need("layers");
        if (!layers.is_array()) throw ConfigError(where + ".layers: expected an array");
        std::vector<Layer> ls;
        for (std::size_t i = 0; i < layers.size(); ++i) {
            const std::string w = where + ".layers[" + std::to_string(i) + "]";
            check_keys(layers[i], {"material", "thickness"}, w);
            if (!layers[i].contains("material") || !layers[i].contains("thickness"))
                throw ConfigError(w + ": 'material' and 'thickness' are required");
            Layer l;
            l.material = find_material(c, string(layers[i]["material"], w + ".material"), w + ".material");
            const json& t = layers[i]["thickness"];
            if (t.is_string()) {
                if (t.get<std::string>() != "inf") throw ConfigError(w + ".thickness: expected a number or \"inf\"");
                l.thickness = semi_infinite;
            } else {
                l.thickness = positive(t, w + ".thickness");
            }
            ls.push_back(l);
        }
        const json& jl = need("atom_layer");
        if (!jl.is_number_integer() || jl.get<long>() < 0)
            throw ConfigError(where + ".atom_layer: expected a non-negative integer");
        try {
            s.stack.emplace(std::move(ls), jl.get<std::size_t>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(where + ": " + e.what());
        }
    } else {
        throw ConfigError(where + ".type: unknown geometry '" + type + "'");
    }
    return s;
}

/// Largest admissible atom position for a series (inf when unbounded).
inline double z_upper_bound(const Series& s)
{
    if (s.type == GeometryType::two_plates) return s.separation;
    if (s.type == GeometryType::multilayer && s.stack->atom_in_interior()) return s.stack->atom_layer_thickness();
    return semi_infinite;
}

inline RunConfig parse_config(json doc)
{
    using namespace detail;
    RunConfig c;
    check_keys(doc, {"command", "units", "atom", "materials", "geometry", "scan", "border", "wall", "check",
                     "coeffs", "quadrature", "output", "threads", "provenance"},
               "config");
    if (doc.contains("command")) c.command = string(doc["command"], "command");

    // atom first: its lowest transition is the default reference frequency
    if (!doc.contains("atom")) throw ConfigError("config: 'atom' is required");
    const json& ja = doc["atom"];
    check_keys(ja, {"transitions"}, "atom");
    if (!ja.contains("transitions") || !ja["transitions"].is_array() || ja["transitions"].empty())
        throw ConfigError("atom.transitions: expected a non-empty array");
    std::vector<Transition> ts;
    for (std::size_t i = 0; i < ja["transitions"].size(); ++i) {
        const std::string w = "atom.transitions[" + std::to_string(i) + "]";
        const json& t = ja["transitions"][i];
        check_keys(t, {"frequency", "dipole_sq"}, w);
        if (!t.contains("frequency") || !t.contains("dipole_sq"))
            throw ConfigError(w + ": 'frequency' and 'dipole_sq' are required");
        ts.push_back({positive(t["frequency"], w + ".frequency"), non_negative(t["dipole_sq"], w + ".dipole_sq")});
    }
    c.reference_frequency = ts.front().frequency;
    if (doc.contains("units")) {
        check_keys(doc["units"], {"reference_frequency"}, "units");
        if (doc["units"].contains("reference_frequency"))
            c.reference_frequency = positive(doc["units"]["reference_frequency"], "units.reference_frequency");
    }
    for (auto& t : ts) t.frequency /= c.reference_frequency;
    c.atom = AtomModel(ts);

    if (doc.contains("materials")) {
        if (!doc["materials"].is_object()) throw ConfigError("materials: expected an object");
        for (const auto& [name, jm] : doc["materials"].items()) {
            if (name == "vacuum") throw ConfigError("materials: 'vacuum' is reserved");
            try {
                c.materials.emplace(name, material(jm, c.reference_frequency, "materials." + name));
            } catch (const InvalidModel& e) {
                throw ConfigError("materials." + name + ": " + e.what());
            }
        }
    }

    if (doc.contains("geometry")) {
        const json& g = doc["geometry"];
        if (g.is_array()) {
            for (std::size_t i = 0; i < g.size(); ++i)
                c.series.push_back(parse_series(g[i], c, "geometry[" + std::to_string(i) + "]"));
        } else {
            c.series.push_back(parse_series(g, c, "geometry"));
        }
        for (std::size_t i = 0; i < c.series.size(); ++i)
            for (std::size_t k = 0; k < i; ++k)
                if (c.series[i].label == c.series[k].label)
                    throw ConfigError("geometry: duplicate series label '" + c.series[i].label + "'");
    }

    if (doc.contains("scan")) {
        check_keys(doc["scan"], {"z"}, "scan");
        if (doc["scan"].contains("z")) c.scan.z = grid(doc["scan"]["z"], 1e-3, 1e2, 200, "log", "scan.z");
    }
    if (doc.contains("border")) {
        const json& b = doc["border"];
        check_keys(b, {"plate", "eps0"}, "border");
        if (b.contains("plate")) {
            const std::string p = string(b["plate"], "border.plate");
            if (p == "thick") c.border.plates = {PlateKind::thick};
            else if (p == "thin") c.border.plates = {PlateKind::thin};
            else if (p == "both") c.border.plates = {PlateKind::thick, PlateKind::thin};
            else throw ConfigError("border.plate: expected 'thick', 'thin' or 'both'");
        }
        if (b.contains("eps0")) c.border.eps0 = grid(b["eps0"], 1.0, 100.0, 50, "log", "border.eps0");
        for (double e : c.border.eps0)
            if (!(e >= 1.0)) throw ConfigError("border.eps0: values must be >= 1");
    }
    if (c.border.eps0.empty()) c.border.eps0 = grid(json::object(), 1.0, 100.0, 50, "log", "border.eps0");
    if (doc.contains("wall")) {
        const json& w = doc["wall"];
        check_keys(w, {"z_min", "z_max", "points"}, "wall");
        if (w.contains("z_min")) c.wall.search.z_lo = positive(w["z_min"], "wall.z_min");
        if (w.contains("z_max")) c.wall.search.z_hi = positive(w["z_max"], "wall.z_max");
        if (w.contains("points")) {
            if (!w["points"].is_number_integer() || w["points"].get<int>() < 3)
                throw ConfigError("wall.points: expected an integer >= 3");
            c.wall.search.points = w["points"].get<int>();
        }
        if (!(c.wall.search.z_hi > c.wall.search.z_lo)) throw ConfigError("wall: z_max must exceed z_min");
    }
    if (doc.contains("check")) {
        check_keys(doc["check"], {"z"}, "check");
        if (doc["check"].contains("z")) c.check.z = grid(doc["check"]["z"], 1.0, 1.0, 1, "linear", "check.z");
        for (double z : c.check.z)
            if (!(z > 0.0)) throw ConfigError("check.z: values must be positive");
    }
    if (doc.contains("coeffs")) {
        check_keys(doc["coeffs"], {"thickness"}, "coeffs");
        if (doc["coeffs"].contains("thickness")) c.coeffs.thickness = positive(doc["coeffs"]["thickness"], "coeffs.thickness");
    }
    if (doc.contains("quadrature")) {
        const json& q = doc["quadrature"];
        check_keys(q, {"rel_tol", "inner_rel_tol", "abs_tol", "max_subdivisions", "mode"}, "quadrature");
        if (q.contains("rel_tol")) c.quadrature.rel_tol = positive(q["rel_tol"], "quadrature.rel_tol");
        if (q.contains("inner_rel_tol")) c.quadrature.inner_rel_tol = positive(q["inner_rel_tol"], "quadrature.inner_rel_tol");
        if (q.contains("abs_tol")) c.quadrature.abs_tol = non_negative(q["abs_tol"], "quadrature.abs_tol");
        if (q.contains("max_subdivisions")) {
            if (!q["max_subdivisions"].is_number_integer() || q["max_subdivisions"].get<int>() < 1)
                throw ConfigError("quadrature.max_subdivisions: expected a positive integer");
            c.quadrature.max_subdivisions = q["max_subdivisions"].get<int>();
        }
        if (q.contains("mode")) {
            try {
                c.quadrature.mode = substitution_from_string(string(q["mode"], "quadrature.mode"));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("quadrature.mode: ") + e.what());
            }
        }
    }
    if (doc.contains("output")) {
        const json& o = doc["output"];
        check_keys(o, {"directory", "basename", "format"}, "output");
        if (o.contains("directory")) c.output.directory = string(o["directory"], "output.directory");
        if (o.contains("basename")) c.output.basename = string(o["basename"], "output.basename");
        if (o.contains("format")) c.output.format = string(o["format"], "output.format");
        if (c.output.format != "csv" && c.output.format != "json")
            throw ConfigError("output.format: expected 'csv' or 'json'");
        if (c.output.basename.empty() || c.output.basename.find('/') != std::string::npos)
            throw ConfigError("output.basename: must be a plain file name");
    }
    if (doc.contains("threads")) {
        if (!doc["threads"].is_number_integer() || doc["threads"].get<long>() < 0)
            throw ConfigError("threads: expected a non-negative integer");
        c.threads = doc["threads"].get<unsigned>();
    }

    // default z grids per geometry, and range checks
    if (c.scan.z.empty() && !c.series.empty()) {
        double hi = semi_infinite;
        for (const auto& s : c.series) hi = std::min(hi, z_upper_bound(s));
        c.scan.z = std::isinf(hi) ? detail::grid(json::object(), 1e-3, 1e2, 200, "log", "scan.z")
                                  : detail::grid(json::object(), 0.01 * hi, 0.99 * hi, 200, "linear", "scan.z");
    }
    for (const auto& s : c.series) {
        const double hi = z_upper_bound(s);
        for (double z : c.scan.z)
            if (!(z > 0.0) || !(z < hi))
                throw ConfigError("scan.z: position " + std::to_string(z) + " lies outside the atom layer of '" +
                                  s.label + "'");
    }
    c.document = std::move(doc);
    return c;
}

inline json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
}

} // namespace vdw::cli
