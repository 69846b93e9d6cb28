#include "qboost/harness/cli.hpp"

#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qboost/errors.hpp"
#include "qboost/harness/config.hpp"
#include "qboost/harness/dataset.hpp"
#include "qboost/harness/experiments.hpp"
#include "qboost/harness/report.hpp"

namespace qboost::harness {

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    bool quiet = false;
};

CLI::App* add_subcommand(CLI::App& app, const std::string& name, const std::string& about,
                         Flags& flags) {
    auto* sub = app.add_subcommand(name, about);
    sub->add_option("--config", flags.config, "experiment config file")->required();
    sub->add_option("--seed", flags.seed, "override the config seed");
    sub->add_option("--out", flags.out, "output directory (overrides config output)");
    sub->add_flag("--quiet", flags.quiet, "no progress output");
    return sub;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Probabilistic and quantum AdaBoost experiments", "qboost"};
    Flags flags;
    add_subcommand(app, "run", "run the mode named in the config", flags);
    auto* compare = add_subcommand(app, "compare", "classical vs quantum at matched precision", flags);
    auto* hoeffding = add_subcommand(app, "hoeffding", "Monte Carlo check of the sampling bound", flags);
    auto* povm = add_subcommand(app, "povm-demo", "boosting POVM weak learners on qubits", flags);
    auto* validate = add_subcommand(app, "validate-config", "parse and range-check a config", flags);
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitConfig;
    }

    ExperimentConfig config;
    try {
        config = load_config(flags.config);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    if (flags.seed) config.seed = *flags.seed;
    if (flags.out) config.output = *flags.out;
    if (compare->parsed()) config.mode = Mode::compare;
    if (hoeffding->parsed()) config.mode = Mode::hoeffding;
    if (povm->parsed()) config.mode = Mode::povm_demo;

    err << "seed=" << config.seed << '\n';
    if (validate->parsed()) {
        if (!flags.quiet) out << "config ok: mode=" << to_string(config.mode) << '\n';
        return kExitOk;
    }

    try {
        const Report report = run_experiment(config);
        write_report(config.output, report, config);
        if (!flags.quiet) {
            out << "wrote " << (std::filesystem::path(config.output) / "report.csv").string() << '\n';
        }
        if (report.partial) {
            err << "error: resource cap exceeded; report is partial\n";
            return kExitCap;
        }
        return kExitOk;
    } catch (const GenerationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const CapExceededError& e) {
        err << "error: " << e.what() << '\n';
        return kExitCap;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace qboost::harness
