#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vdw/cli/commands.hpp"

namespace {

struct Options {
    std::string config;
    std::string out;
    double rel_tol = 0.0;
    std::string quad_mode;
    unsigned threads = 0;
    std::string format;
};

void add_common(CLI::App& sub, Options& o)
{
    sub.add_option("-c,--config", o.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub.add_option("-o,--out", o.out, "output directory (overrides output.directory)");
    sub.add_option("--rel-tol", o.rel_tol, "relative quadrature tolerance")->check(CLI::PositiveNumber);
    sub.add_option("--quad-mode", o.quad_mode, "integration variables")
        ->check(CLI::IsMember({"auto", "direct", "retarded", "nonretarded"}));
    sub.add_option("-j,--threads", o.threads, "worker threads (0: all cores)");
    sub.add_option("--format", o.format, "table format")->check(CLI::IsMember({"csv", "json"}));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Van der Waals potential of an atom near magnetodielectric plates and multilayers"};
    app.set_version_flag("--version", std::string(vdw::cli::kToolVersion));
    app.require_subcommand(1);

    Options o;
    const std::pair<const char*, const char*> commands[] = {
        {"scan", "potential U(z) for every geometry series"},
        {"coeffs", "asymptotic coefficients of each series"},
        {"border", "attractive/repulsive border mu(0) versus eps(0)"},
        {"wall", "position and height of the potential wall"},
        {"check", "thick-plate expansion against stacked thin plates"},
    };
    for (const auto& [name, help] : commands) add_common(*app.add_subcommand(name, help), o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return vdw::cli::exit_config;
    }

    vdw::cli::Overrides ov;
    if (!o.out.empty()) ov.out_dir = o.out;
    if (o.rel_tol > 0.0) ov.rel_tol = o.rel_tol;
    if (!o.quad_mode.empty()) ov.quad_mode = o.quad_mode;
    if (app.get_subcommands().front()->count("--threads")) ov.threads = o.threads;
    if (!o.format.empty()) ov.format = o.format;

    return vdw::cli::run(app.get_subcommands().front()->get_name(), o.config, ov, std::cerr);
}
