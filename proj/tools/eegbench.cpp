#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eegbench/cli.hpp"

int main(int argc, char** argv) {
    using namespace eegbench;

    CLI::App app{"EEG feature-selection and classifier benchmark"};
    app.require_subcommand(1);

    CliOptions opts;
    std::vector<std::string> stages;
    std::optional<int> jobs;
    std::optional<std::uint64_t> seed;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config, "run configuration (JSON)")->required();
        sub->add_option("--jobs", jobs, "worker threads (default: logical cores)");
        sub->add_option("--seed", seed, "global seed, overrides the config");
        sub->add_flag("--strict", opts.strict, "exit 1 when any cell fails");
        sub->add_flag("--paper-faithful", opts.paper_faithful, "score wrapper subsets on the test split");
    };

    auto* run = app.add_subcommand("run", "extract, select, train and report");
    add_common(run);
    run->add_option("--stage", stages, "only run these stages (extract, select, train, report)");
    auto* extract = app.add_subcommand("extract", "ingest, preprocess and cache features");
    add_common(extract);
    auto* select = app.add_subcommand("select", "wrapper feature selection from cached features");
    add_common(select);
    auto* train = app.add_subcommand("train", "fit and score final models from stored selections");
    add_common(train);
    auto* report = app.add_subcommand("report", "merge stored results into report files");
    add_common(report);

    std::filesystem::path spec_path, out_path;
    std::uint64_t synth_seed = 0;
    auto* synth = app.add_subcommand("synth", "generate a synthetic recording");
    synth->add_option("--spec", spec_path, "synthetic spec (JSON)")->required();
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--out", out_path, "output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    opts.jobs = jobs;
    opts.seed = seed;
    opts.stages = {stages.begin(), stages.end()};

    if (*run) return cmd_run(opts, std::cerr);
    if (*extract) return cmd_extract(opts, std::cerr);
    if (*select) return cmd_select(opts, std::cerr);
    if (*train) return cmd_train(opts, std::cerr);
    if (*report) return cmd_report(opts, std::cerr);
    return cmd_synth(spec_path, synth_seed, out_path, std::cerr);
}
