#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "geb/errors.hpp"
#include "geb/harness.hpp"
#include "geb/scenario.hpp"

namespace {

struct Common
{
    std::string scenario;
    std::string presetName;
    std::string out;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, Common& c)
{
    sub->add_option("--scenario", c.scenario, "scenario file (key = value, [section] headers)");
    sub->add_option("--preset", c.presetName, "start from a named preset instead of a file");
    sub->add_option("--out", c.out, "output directory (default: $GEB_OUT_DIR or ./out)");
    sub->add_option("--override", c.overrides, "key=value, repeatable; applied after the scenario")
        ->allow_extra_args(false);
}

geb::ScenarioText load(const Common& c)
{
    if (!c.scenario.empty() && !c.presetName.empty())
        throw geb::ValidationError({"--scenario and --preset are exclusive"});
    geb::ScenarioText text;
    if (!c.scenario.empty()) {
        std::ifstream is(c.scenario);
        if (!is)
            throw geb::IoError("cannot open scenario file " + c.scenario);
        text = geb::parse_scenario(is);
    } else if (!c.presetName.empty()) {
        text = geb::preset(c.presetName);
    } else {
        text = geb::preset("straight-toy");
    }
    std::vector<std::string> problems;
    for (const auto& o : c.overrides) {
        try {
            geb::apply_override(text, o);
        } catch (const geb::ValidationError& e) {
            problems.insert(problems.end(), e.problems().begin(), e.problems().end());
        }
    }
    if (!problems.empty())
        throw geb::ValidationError(problems);
    return text;
}

std::filesystem::path out_dir(const Common& c)
{
    if (!c.out.empty())
        return c.out;
    if (const char* env = std::getenv("GEB_OUT_DIR"); env && *env)
        return env;
    return "out";
}

std::vector<double> parse_values(const std::string& csv)
{
    std::vector<double> values;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used])))
            ++used;
        if (item.empty() || used != item.size())
            throw geb::ValidationError({"bad sweep value '" + item + "'"});
        values.push_back(v);
    }
    if (values.empty())
        throw geb::ValidationError({"--values is empty"});
    return values;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"boundary-feedback stabilization of precurved beams"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "gebctl 1.0");

    Common common;
    auto* certify = app.add_subcommand("certify", "build and verify the Lyapunov certificate");
    auto* simulate = app.add_subcommand("simulate", "integrate the closed-loop system");
    auto* reconstruct = app.add_subcommand("reconstruct", "simulate, then recover position and rotation");
    auto* dump = app.add_subcommand("dump-matrices", "write every derived constant matrix");
    auto* sweep = app.add_subcommand("sweep", "independent runs over one parameter");
    auto* presets = app.add_subcommand("presets", "list preset names");
    for (auto* s : {certify, simulate, reconstruct, dump, sweep})
        add_common(s, common);

    std::string axis;
    std::string values;
    int workers = 1;
    sweep->add_option("--axis", axis, "mu1 | mu2 | amplitude | N")->required();
    sweep->add_option("--values", values, "comma-separated values")->required();
    sweep->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? geb::exit_ok : geb::exit_usage;
    }

    try {
        if (presets->parsed()) {
            for (const auto& n : geb::preset_names())
                std::cout << n << '\n';
            return geb::exit_ok;
        }
        const geb::ScenarioText text = load(common);
        const auto out = out_dir(common);
        if (certify->parsed())
            return geb::run_certify(text, out, std::cout);
        if (simulate->parsed())
            return geb::run_simulate(text, out, std::cout);
        if (reconstruct->parsed())
            return geb::run_reconstruct(text, out, std::cout);
        if (dump->parsed())
            return geb::run_dump_matrices(text, out, std::cout);
        return geb::run_sweep(text, geb::sweep_axis_from_string(axis), parse_values(values), workers, out,
                              std::cout);
    } catch (...) {
        return geb::exit_code_for_current_exception(std::cerr);
    }
}
