#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flowembed/commands.hpp"

namespace {

struct CliArgs {
    std::string config_path;
    std::string output_path;
    std::vector<std::string> overrides;
};

int run(const std::string& command, const CliArgs& args) {
    using namespace flowembed;

    std::string text;
    {
        std::ifstream in(args.config_path);
        if (!in) {
            std::cerr << "error: cannot open config file: " << args.config_path << "\n";
            return cmd::kExitConfig;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }

    ExperimentConfig cfg{};
    try {
        cfg = load_config(text, args.overrides);
        if (!args.output_path.empty()) cfg.run.output = args.output_path;
        validate_for_command(cfg, command);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return cmd::kExitConfig;
    }

    cmd::CommandResult result;
    try {
        if (command == "certify") result = cmd::certify(cfg);
        else if (command == "mu-check") result = cmd::mu_check(cfg);
        else if (command == "field-export") result = cmd::field_export(cfg);
        else result = cmd::slope(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cmd::kExitRuntime;
    }

    const std::string csv_text = result.table.to_string();
    if (cfg.run.output.empty()) {
        std::cout << csv_text;
    } else {
        std::ofstream out(cfg.run.output);
        if (!out) {
            std::cerr << "error: cannot write output file: " << cfg.run.output << "\n";
            return cmd::kExitRuntime;
        }
        out << csv_text;
    }
    return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flowembed: interpolating vector fields for near-identity maps, with "
                 "embedding-error certification"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"certify", "Measure embedding errors per order m and check them against bounds"},
        {"mu-check", "Richardson order check of the mu-family agreement"},
        {"field-export", "Sample the interpolating field on the real grid"},
        {"slope", "Error-vs-epsilon slope over an Euler-step h sweep"},
    };

    std::map<std::string, CliArgs> args;
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        CliArgs& a = args[name];
        sub->add_option("--config", a.config_path, "JSON experiment configuration")
            ->required();
        sub->add_option("--output", a.output_path, "CSV output path (default: stdout)");
        sub->add_option("--override", a.overrides,
                        "Dot-path config override, e.g. map.h=0.01 (repeatable)");
    }

    CLI11_PARSE(app, argc, argv);

    const std::string name = app.get_subcommands().front()->get_name();
    return run(name, args[name]);
}
