#pragma once

// Subcommands of the vdwpot tool. Each command fills one or more tables and
// writes them as CSV (one file per table) or as a single JSON document, plus
// a JSON sidecar that is itself a valid config for re-running the command.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "vdw/asymptotics.hpp"
#include "vdw/cli/config.hpp"
#include "vdw/cli/sweep.hpp"
#include "vdw/perturbation.hpp"
#include "vdw/potential.hpp"

namespace vdw::cli {

inline constexpr const char* kToolName = "vdwpot";
inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_numerical = 3 };

using Cell = std::variant<double, std::string, bool>;

struct Table {
    std::string name; ///< empty for the single table of a command
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct CommandOutput {
    std::vector<Table> tables;
    bool numerical_failure = false;
};

inline std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_cell(const Cell& c)
{
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
    const std::string& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

inline json json_cell(const Cell& c)
{
    if (const auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? json(*d) : json(nullptr);
    if (const auto* b = std::get_if<bool>(&c)) return *b;
    return std::get<std::string>(c);
}

inline void write_csv(const Table& t, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
        out << "\n";
    }
}

inline json table_json(const Table& t)
{
    json rows = json::array();
    for (const auto& row : t.rows) {
        json r = json::object();
        for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = json_cell(row[i]);
        rows.push_back(std::move(r));
    }
    return json{{"name", t.name}, {"columns", t.columns}, {"rows", std::move(rows)}};
}

inline json effective_quadrature(const QuadratureSpec& q)
{
    return json{{"rel_tol", q.rel_tol},
                {"inner_rel_tol", q.inner_rel_tol},
                {"abs_tol", q.abs_tol},
                {"max_subdivisions", q.max_subdivisions},
                {"mode", std::string(to_string(q.mode))}};
}

inline std::string file_stem(const RunConfig& c, const Table& t, std::size_t ntables)
{
    if (ntables == 1 || t.name.empty()) return c.output.basename;
    std::string n;
    for (char ch : t.name) n += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '.') ? ch : '_';
    return c.output.basename + "_" + n;
}

/// Writes the tables and the sidecar; returns the written paths.
inline std::vector<std::string> write_outputs(const RunConfig& c, const CommandOutput& out)
{
    namespace fs = std::filesystem;
    const fs::path dir(c.output.directory);
    fs::create_directories(dir);
    std::vector<std::string> files;
    if (c.output.format == "csv") {
        for (const auto& t : out.tables) {
            const fs::path p = dir / (file_stem(c, t, out.tables.size()) + ".csv");
            write_csv(t, p);
            files.push_back(p.filename().string());
        }
    } else {
        json doc{{"command", c.command}, {"tables", json::array()}};
        for (const auto& t : out.tables) doc["tables"].push_back(table_json(t));
        const fs::path p = dir / (c.output.basename + ".result.json");
        std::ofstream f(p, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
        f << doc.dump(2) << "\n";
        files.push_back(p.filename().string());
    }

    json side = c.document;
    side["command"] = c.command;
    side["provenance"] = json{{"tool", kToolName},
                              {"version", kToolVersion},
                              {"outputs", files},
                              {"reference_frequency", c.reference_frequency},
                              {"quadrature", effective_quadrature(c.quadrature)},
                              {"units", "hbar = c = eps0 = 1; frequencies / reference_frequency, "
                                        "lengths in c / reference_frequency, energies in hbar reference_frequency"}};
    const fs::path sp = dir / (c.output.basename + ".run.json");
    std::ofstream f(sp, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + sp.string() + "'");
    f << side.dump(2) << "\n";
    files.push_back(sp.filename().string());
    return files;
}

/// U(z) for one geometry series.
inline PotentialResult evaluate_series(const Series& s, const AtomModel& atom, double z, const QuadratureSpec& q)
{
    switch (s.type) {
    case GeometryType::halfspace: return potential_halfspace(atom, s.material, z, q);
    case GeometryType::plate: return potential_plate(atom, s.material, s.thickness, z, q);
    case GeometryType::thin: return potential_thin_linearized(atom, s.material, s.thickness, z, q);
    case GeometryType::two_plates: return potential_two_plates(atom, s.material, s.separation, z, q);
    case GeometryType::mirror: return potential_mirror(atom, z, s.mirror, q);
    case GeometryType::multilayer: return potential_multilayer(*s.stack, atom, z, q);
    }
    throw std::logic_error("unknown geometry");
}

inline void require_series(const RunConfig& c)
{
    if (c.series.empty()) throw ConfigError("command '" + c.command + "' needs a 'geometry'");
}

inline CommandOutput cmd_scan(const RunConfig& c)
{
    require_series(c);
    CommandOutput out;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& s : c.series) {
        Table t;
        t.name = s.label;
        t.columns = {"z_A", "U", "err", "U_left", "U_right", "U_single_sum", "status"};
        const auto results = parallel_map<std::vector<Cell>>(c.scan.z.size(), c.threads, [&](std::size_t i) {
            const double z = c.scan.z[i];
            try {
                const auto r = evaluate_series(s, c.atom, z, c.quadrature);
                return std::vector<Cell>{z, r.U, r.error, r.U_left, r.U_right, r.U_nomr,
                                         std::string(r.converged ? "ok" : "not-converged")};
            } catch (const std::exception& e) {
                return std::vector<Cell>{z, nan, nan, nan, nan, nan, std::string("error: ") + e.what()};
            }
        });
        for (const auto& row : results)
            if (std::get<std::string>(row.back()) != "ok") out.numerical_failure = true;
        t.rows = results;
        out.tables.push_back(std::move(t));
    }
    return out;
}

inline CommandOutput cmd_coeffs(const RunConfig& c)
{
    require_series(c);
    CommandOutput out;
    Table t;
    t.columns = {"series", "coefficient", "value", "error", "regime"};
    auto add = [&](const Series& s, const char* name, const Coefficient& k) {
        t.rows.push_back({s.label, std::string(name), k.value, k.error, std::string(to_string(k.regime))});
    };
    for (const auto& s : c.series) {
        if (s.type == GeometryType::multilayer) {
            t.rows.push_back({s.label, std::string("all"), 0.0, 0.0, std::string(to_string(Regime::not_applicable))});
            continue;
        }
        const MaterialModel m = s.type == GeometryType::mirror ? MaterialModel::perfect(s.mirror) : s.material;
        if (s.type != GeometryType::thin) {
            const auto k = coeff_thick(c.atom, m, c.quadrature);
            add(s, "C4", k.C4);
            add(s, "C3", k.C3);
            add(s, "C1", k.C1);
            if (!m.is_mirror() && !m.is_vacuum()) {
                const auto st = static_summary(m);
                const auto lim = coeff_thick_limits(st.eps0, st.mu0, c.atom.alpha(0.0));
                add(s, "C4_weak", {lim.weak, 0.0, Regime::weak_limit});
                add(s, "C4_strong", {lim.strong, 0.0, Regime::strong_limit});
            }
        }
        std::optional<double> d = c.coeffs.thickness;
        if (s.type == GeometryType::plate || s.type == GeometryType::thin) d = d.value_or(s.thickness);
        if (d && !m.is_mirror()) {
            const auto k = coeff_thin(c.atom, m, *d, c.quadrature);
            add(s, "D5", k.D5);
            add(s, "D4", k.D4);
            add(s, "D2", k.D2);
        }
    }
    out.tables.push_back(std::move(t));
    return out;
}

inline CommandOutput cmd_border(const RunConfig& c)
{
    CommandOutput out;
    Table t;
    t.columns = {"plate", "eps0", "mu0", "mu0_over_eps0", "mu0_weak", "mu0_strong", "regime", "status"};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const PlateKind k : c.border.plates) {
        const auto pts = parallel_map<BorderPoint>(c.border.eps0.size(), c.threads, [&](std::size_t i) {
            return border_curve(k, {c.border.eps0[i]}, c.quadrature).front();
        });
        for (const auto& p : pts) {
            const double mu = p.mu0.value_or(nan);
            t.rows.push_back({std::string(to_string(k)), p.eps0, mu, mu / p.eps0, border_weak_mu(p.eps0),
                              border_strong_mu(k, p.eps0), std::string(to_string(p.regime)),
                              std::string(p.mu0 ? "ok" : "no-root")});
        }
    }
    out.tables.push_back(std::move(t));
    return out;
}

inline CommandOutput cmd_wall(const RunConfig& c)
{
    require_series(c);
    CommandOutput out;
    Table t;
    t.columns = {"series", "method", "exists", "z_max", "U_max", "error", "note"};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto join = [](const std::vector<std::string>& w) {
        std::string s;
        for (const auto& x : w) s += (s.empty() ? "" : "; ") + x;
        return s;
    };
    for (const auto& s : c.series) {
        std::optional<PlateKind> kind;
        if (s.type == GeometryType::halfspace) kind = PlateKind::thick;
        if (s.type == GeometryType::thin) kind = PlateKind::thin;
        if (kind && !s.material.is_mirror() && !s.material.is_vacuum()) {
            try {
                const auto w = wall_estimate(*kind, c.atom, s.material, s.thickness > 0 ? s.thickness : 1.0,
                                             c.quadrature);
                t.rows.push_back({s.label, std::string(to_string(WallMethod::generic)), w.exists, w.z_max, w.U_max,
                                  0.0, join(w.warnings)});
                if (w.z_max_closed)
                    t.rows.push_back({s.label, std::string(to_string(WallMethod::two_level_closed_form)), w.exists,
                                      *w.z_max_closed, *w.U_max_closed, 0.0,
                                      w.U_max_bound ? "thin height scale " + format_double(*w.U_max_bound)
                                                    : std::string()});
            } catch (const NoWallScale& e) {
                t.rows.push_back({s.label, std::string(to_string(WallMethod::generic)), false, nan, nan, nan,
                                  std::string(e.what())});
            }
        }
        try {
            std::vector<double> zs(c.wall.search.points);
            const double lo = std::log(c.wall.search.z_lo), hi = std::log(c.wall.search.z_hi);
            for (int i = 0; i < c.wall.search.points; ++i)
                zs[i] = std::exp(lo + (hi - lo) * i / (c.wall.search.points - 1));
            // the scan is parallel; the refinement calls back sequentially
            const auto scan = parallel_map<PotentialResult>(zs.size(), c.threads, [&](std::size_t i) {
                return evaluate_series(s, c.atom, zs[i], c.quadrature);
            });
            std::size_t calls = 0;
            const auto w = wall_locate_numeric(
                [&](double z) {
                    if (calls < scan.size()) return scan[calls++];
                    return evaluate_series(s, c.atom, z, c.quadrature);
                },
                c.wall.search);
            t.rows.push_back({s.label, std::string(to_string(WallMethod::numeric)), w.exists, w.z_max, w.U_max,
                              w.error, w.exists ? join(w.warnings) : std::string("no wall") +
                                                                         (w.warnings.empty() ? "" : "; " + join(w.warnings))});
        } catch (const std::exception& e) {
            out.numerical_failure = true;
            t.rows.push_back({s.label, std::string(to_string(WallMethod::numeric)), false, nan, nan, nan,
                              std::string("error: ") + e.what()});
        }
    }
    out.tables.push_back(std::move(t));
    return out;
}

inline CommandOutput cmd_check(const RunConfig& c)
{
    require_series(c);
    CommandOutput out;
    Table t;
    t.columns = {"series", "z_A", "order", "lhs", "rhs", "residual", "lhs_error", "rhs_error", "status"};
    for (const auto& s : c.series) {
        if (s.type == GeometryType::mirror || s.type == GeometryType::multilayer || s.material.is_mirror()) {
            t.rows.push_back({s.label, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, std::string("not-applicable")});
            continue;
        }
        const auto reps = parallel_map<AdditivityReport>(c.check.z.size(), c.threads, [&](std::size_t i) {
            return additivity_check(c.atom, s.material, c.check.z[i], c.quadrature);
        });
        for (std::size_t i = 0; i < reps.size(); ++i) {
            int order = 1;
            for (const IdentitySides* side : {&reps[i].first, &reps[i].second}) {
                if (!side->converged) out.numerical_failure = true;
                t.rows.push_back({s.label, c.check.z[i], static_cast<double>(order++), side->lhs, side->rhs,
                                  side->residual, side->lhs_error, side->rhs_error,
                                  std::string(side->converged ? "ok" : "not-converged")});
            }
        }
    }
    out.tables.push_back(std::move(t));
    return out;
}

inline CommandOutput run_command(const RunConfig& c)
{
    if (c.command == "scan") return cmd_scan(c);
    if (c.command == "coeffs") return cmd_coeffs(c);
    if (c.command == "border") return cmd_border(c);
    if (c.command == "wall") return cmd_wall(c);
    if (c.command == "check") return cmd_check(c);
    throw ConfigError("unknown command '" + c.command + "'");
}

struct Overrides {
    std::optional<std::string> out_dir;
    std::optional<double> rel_tol;
    std::optional<std::string> quad_mode;
    std::optional<unsigned> threads;
    std::optional<std::string> format;
};

/// Loads a config file, applies command-line overrides and runs `command`.
/// Returns the process exit code; diagnostics go to `err`.
inline int run(const std::string& command, const std::string& config_path, const Overrides& ov, std::ostream& err)
{
    RunConfig c;
    try {
        json doc = read_json_file(config_path);
        if (!doc.is_object()) throw ConfigError("config: top level must be an object");
        doc["command"] = command;
        if (ov.out_dir) doc["output"]["directory"] = *ov.out_dir;
        if (ov.rel_tol) doc["quadrature"]["rel_tol"] = *ov.rel_tol;
        if (ov.quad_mode) doc["quadrature"]["mode"] = *ov.quad_mode;
        if (ov.threads) doc["threads"] = *ov.threads;
        if (ov.format) doc["output"]["format"] = *ov.format;
        c = parse_config(std::move(doc));
        c.quadrature.validate();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    }

    CommandOutput out;
    try {
        out = run_command(c);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    }
    try {
        write_outputs(c, out);
    } catch (const std::exception& e) {
        err << "output error: " << e.what() << "\n";
        return exit_config;
    }
    if (out.numerical_failure) {
        err << "warning: some rows did not converge or failed; see the status column\n";
        return exit_numerical;
    }
    return exit_ok;
}

} // namespace vdw::cli
