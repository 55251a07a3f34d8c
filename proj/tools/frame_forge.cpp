#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "frameforge/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"frame-forge: spline-type spaces, frame surgery, and quilted frames"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "run an experiment config");
    run->add_option("config", config_path, "JSON experiment config")->required();

    auto* selftest = app.add_subcommand("selftest", "run the invariant battery");
    auto* schema = app.add_subcommand("schema", "print the config schema");

    CLI11_PARSE(app, argc, argv);

    frameforge::ExperimentOutcome outcome;
    if (run->parsed()) {
        outcome = frameforge::run_experiment(config_path);
    } else if (selftest->parsed()) {
        outcome = frameforge::run_selftest();
    } else if (schema->parsed()) {
        std::fputs(frameforge::config_schema().c_str(), stdout);
        return 0;
    }

    if (!outcome.message.empty())
        std::fprintf(outcome.exit_code == 0 ? stdout : stderr, "%s\n",
                     outcome.message.c_str());
    for (const auto& f : outcome.files_written)
        std::fprintf(stdout, "wrote %s\n", f.c_str());
    return outcome.exit_code;
}
