// ergolab: batch runner for circle-rotation average experiments.
//   ergolab run <config.json>        execute an experiment
//   ergolab validate <config.json>   schema-check a config, print issues
//   ergolab list-experiments         show the experiment names

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lab/cli.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ergolab::LabError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"circle-rotation averages: norms, level sets, witnesses, constructions"};
    app.require_subcommand(1);

    std::string run_path, validate_path;
    auto* run_cmd = app.add_subcommand("run", "execute an experiment from a JSON config");
    run_cmd->add_option("config", run_path, "path to the config file")->required();
    auto* validate_cmd = app.add_subcommand("validate", "validate a config without running");
    validate_cmd->add_option("config", validate_path, "path to the config file")->required();
    auto* list_cmd = app.add_subcommand("list-experiments", "print the known experiments");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list_cmd->parsed()) {
            for (const auto& name : ergolab::known_experiments()) std::cout << name << '\n';
            return 0;
        }
        const std::string path = run_cmd->parsed() ? run_path : validate_path;
        const auto parsed = ergolab::validate_config(read_file(path));
        if (const auto* issues = std::get_if<std::vector<ergolab::ValidationIssue>>(&parsed)) {
            for (const auto& issue : *issues)
                std::cerr << issue.key << ": " << issue.message << '\n';
            return 2;
        }
        const auto& config = std::get<ergolab::RunConfig>(parsed);
        if (validate_cmd->parsed()) {
            std::cout << "ok: experiment " << config.experiment << '\n';
            return 0;
        }
        return ergolab::run_experiment(config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
