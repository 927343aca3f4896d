// bregcr: sweeps, figure presets, Bregman ball exports and self-checks.
//
// Exit status: 0 success, 1 a verify check failed, 2 bad config or arguments
// (including dimension mismatches), 3 a quantity failed numerically.

#include "bregcr/errors.hpp"
#include "bregcr/sweep.hpp"
#include "bregcr/verify.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace bregcr;

constexpr int exit_verify_failed = 1;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

std::optional<std::uint64_t> seed_from_env() {
    const char* s = std::getenv("BREGCR_SEED");
    if (!s || !*s) return std::nullopt;
    std::uint64_t v = 0;
    const char* end = s + std::char_traits<char>::length(s);
    const auto [p, ec] = std::from_chars(s, end, v);
    if (ec != std::errc() || p != end) throw ConfigError(std::string("BREGCR_SEED: not an unsigned integer: ") + s);
    return v;
}

OutputFormat parse_format(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw ConfigError("--format: expected csv or json, got '" + s + "'");
}

// "-" is standard output.
void with_output(const std::string& path, const std::function<void(std::ostream&)>& write) {
    if (path == "-") {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open '" + path + "' for writing");
    write(f);
    if (!f.flush()) throw ConfigError("failed writing '" + path + "'");
}

void run_config(const RunConfig& c) {
    const SweepResult r = run_sweep(c);
    for (const std::string& note : r.notes) std::cerr << "note: " << note << '\n';
    with_output(c.output_path, [&](std::ostream& out) {
        if (c.format == OutputFormat::json) write_json(out, c, r);
        else write_csv(out, c, r);
    });
}

std::pair<double, double> parse_center(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw ConfigError("--center: expected x,y, got '" + s + "'");
    try {
        std::size_t used1 = 0, used2 = 0;
        const std::string a = s.substr(0, comma), b = s.substr(comma + 1);
        const double x = std::stod(a, &used1), y = std::stod(b, &used2);
        if (used1 != a.size() || used2 != b.size()) throw std::invalid_argument(s);
        return {x, y};
    } catch (const std::logic_error&) {
        throw ConfigError("--center: expected x,y, got '" + s + "'");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cramer-Rao type lower bounds for Bregman risks in Poisson and binomial models"};
    app.require_subcommand(1);

    std::string config_path, out_path, format_name;

    auto* sweep = app.add_subcommand("sweep", "Run a sweep described by a JSON config");
    sweep->add_option("--config", config_path, "JSON config file")->required();
    sweep->add_option("--out", out_path, "Output path, overrides output.path ('-' for stdout)");
    sweep->add_option("--format", format_name, "csv or json, overrides output.format");

    std::string suite_name = "all";
    auto* verify = app.add_subcommand("verify", "Check the library against independent oracles");
    verify->add_option("--suite", suite_name, "divergence, priors, channels, bounds or all");

    std::string gen_name, center = "2,2";
    double radius = 1.0;
    int resolution = 360;
    auto* balls = app.add_subcommand("balls", "Export Bregman ball boundaries in the plane");
    balls->add_option("--gen", gen_name, "Two-dimensional generator, e.g. gen-i-div or squared")->required();
    balls->add_option("--center", center, "Ball center x,y");
    balls->add_option("--radius", radius, "Divergence radius");
    balls->add_option("--resolution", resolution, "Points per curve");
    balls->add_option("--out", out_path, "Output path ('-' for stdout)");

    std::string preset_name;
    auto* preset = app.add_subcommand("preset", "Regenerate a figure's data");
    preset->add_option("name", preset_name, "fig2, fig4, fig6, fig7 or fig8")->required();
    preset->add_option("--out", out_path, "Output path ('-' for stdout)");
    preset->add_option("--format", format_name, "csv or json (sweep presets)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }

    try {
        if (*verify) return run_verify(parse_verify_suite(suite_name), std::cout) ? 0 : exit_verify_failed;

        if (*balls) {
            if (resolution < 4) throw ConfigError("--resolution must be at least 4");
            if (!(radius > 0.0)) throw ConfigError("--radius must be positive");
            const auto [cx, cy] = parse_center(center);
            with_output(out_path.empty() ? "-" : out_path,
                        [&](std::ostream& out) { write_balls_csv(out, gen_name, cx, cy, radius, resolution); });
            return 0;
        }

        const auto seed = seed_from_env();
        RunConfig cfg;
        if (*preset) {
            if (preset_name == "fig2") {
                with_output(out_path.empty() ? "-" : out_path,
                            [](std::ostream& out) { write_balls_csv(out, "gen-i-div", 2.0, 2.0, 1.0, 360); });
                return 0;
            }
            cfg = preset_config(preset_name, seed);
        } else {
            cfg = load_config(config_path, seed);
        }
        if (!out_path.empty()) cfg.output_path = out_path;
        if (!format_name.empty()) cfg.format = parse_format(format_name);
        run_config(cfg);
        return 0;
    } catch (const SweepError& e) {
        std::cerr << "error: numerical failure in " << e.what() << '\n';
        return exit_numerical;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const UnsupportedError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_numerical;
    }
}
