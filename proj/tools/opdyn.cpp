// opdyn: run, validate and list scenario files.

#include <iostream>

#include "CLI11.hpp"
#include "opdyn/errors.hpp"
#include "opdyn/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Disjoint-dynamics experiments for elementary operators on operator ideals"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = "run";
    opdyn::Overrides overrides;

    auto* run = app.add_subcommand("run", "Run a scenario and write report.csv and summary.txt");
    run->add_option("scenario", scenario_path, "Scenario file, or builtin:<name>")->required();
    run->add_option("--out", out_dir, "Output directory")->capture_default_str();
    run->add_option("--tol", overrides.tol, "Override the decay threshold");
    run->add_option("--kmax", overrides.k_max, "Override k_max");
    run->add_option("--horizon", overrides.horizon, "Override the exponent horizon");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Report schema and consistency diagnostics");
    validate->add_option("scenario", validate_path, "Scenario file, or builtin:<name>")->required();

    auto* list = app.add_subcommand("list-builtin", "List the built-in scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : opdyn::kExitSchema;
    }

    if (*run) {
        opdyn::Scenario s;
        try {
            s = opdyn::load_scenario(scenario_path);
        } catch (const opdyn::Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return opdyn::kExitSchema;
        }
        opdyn::apply_overrides(s, overrides);
        const auto result = opdyn::run_scenario(s, out_dir);
        std::cout << result.summary;
        return result.exit_code;
    }
    if (*validate) {
        const auto diags = opdyn::validate_scenario(validate_path);
        for (const auto& d : diags) std::cout << d << "\n";
        return diags.size() == 1 && diags.front() == "ok" ? 0 : opdyn::kExitSchema;
    }
    if (*list) {
        for (const auto& b : opdyn::builtin_scenarios()) std::cout << b.name << "\t" << b.description << "\n";
    }
    return 0;
}
