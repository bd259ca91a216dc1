#include "faraday/cli.hpp"

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "faraday/error.hpp"
#include "faraday/scenario.hpp"
#include "faraday/version.hpp"

namespace faraday {

namespace {

struct Overrides {
    std::optional<double> window_mult;
    std::optional<int> tau_steps;
    std::optional<unsigned> threads;
    std::optional<std::string> out_dir;

    void apply(ScenarioConfig& config) const
    {
        if (window_mult)
            config.window_mult = *window_mult;
        if (tau_steps)
            config.taus.count = *tau_steps;
        if (threads)
            config.threads = *threads;
        if (out_dir)
            config.output_dir = *out_dir;
    }
};

void report(std::ostream& out, const RunOutput& result)
{
    for (const auto& file : result.files)
        out << "wrote " << file.string() << '\n';
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Photon-atom entanglement from Faraday rotation: Schmidt analysis and cavity input-output"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    Overrides overrides;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option_function<double>("--window-mult", [&](double v) { overrides.window_mult = v; },
                                         "Field window half-width in units of sigma_F");
        cmd->add_option_function<int>("--tau-steps", [&](int v) { overrides.tau_steps = v; },
                                      "Number of tau grid points");
        cmd->add_option_function<unsigned>("--threads", [&](unsigned v) { overrides.threads = v; },
                                           "Worker threads for tau sweeps (0 = all cores)");
    };

    std::string config_path;
    std::string scenario_name;

    auto* sweep = app.add_subcommand("sweep", "Numeric vs analytic sweep from a config file");
    sweep->add_option("--config", config_path, "Config file (key=value)")->required();
    sweep->add_option_function<std::string>("--out", [&](const std::string& v) { overrides.out_dir = v; },
                                            "Output directory (overrides output.dir)");
    add_common(sweep);

    auto* scenario = app.add_subcommand("scenario", "Run a built-in scenario");
    scenario->add_option("name", scenario_name, "fig2a, fig2b, fig2c, fig3a or fig3b")->required();
    scenario->add_option_function<std::string>("--out", [&](const std::string& v) { overrides.out_dir = v; },
                                               "Output directory")
        ->required();
    add_common(scenario);

    auto* cavity = app.add_subcommand("cavity", "Leaky-cavity Schmidt number report");
    cavity->add_option("--config", config_path, "Config file (key=value)")->required();
    cavity->add_option_function<std::string>("--out", [&](const std::string& v) { overrides.out_dir = v; },
                                             "Output directory (overrides output.dir)");
    add_common(cavity);

    auto* list = app.add_subcommand("list", "List built-in scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitSuccess : kExitConfigError;
    }

    try {
        if (list->parsed()) {
            for (const auto& name : builtin_scenario_names())
                out << name << '\n';
            return kExitSuccess;
        }

        ScenarioConfig config;
        if (scenario->parsed()) {
            auto builtin = builtin_scenario(scenario_name);
            if (!builtin) {
                err << "error: unknown scenario '" << scenario_name << "' (try `list`)\n";
                return kExitConfigError;
            }
            config = *builtin;
        } else {
            config = load_config(config_path);
        }
        overrides.apply(config);
        config.validate();

        const RunOutput result = cavity->parsed() ? run_cavity_report(config, err) : run_scenario(config, err);
        report(out, result);
        return kExitSuccess;
    } catch (const InvalidInput& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumericalFailure;
    } catch (const IoFailure& e) {
        err << "i/o failure: " << e.what() << '\n';
        return kExitIoFailure;
    }
}

} // namespace faraday
