// Command-line front end: `estimate` runs a weighted separability-probability
// estimation over a seeded random ensemble; `selftest` runs the fast
// invariant suite.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "qesprob/engine.hpp"
#include "qesprob/report.hpp"
#include "qesprob/selftest.hpp"

namespace {

unsigned threads_from_env() {
    if (const char* env = std::getenv("QESPROB_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) {
            return static_cast<unsigned>(v);
        }
    }
    return 0;  // engine default: available parallelism
}

int run_estimate_command(const qesprob::RunConfig& cfg) {
    try {
        const qesprob::RunResult result = qesprob::run_estimate(cfg);
        qesprob::emit_outputs(cfg, result);
        std::cout << qesprob::summary_json(cfg, result.summary).dump(2) << "\n";
        return 0;
    } catch (const qesprob::InvalidConfig& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const qesprob::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

int run_selftest_command() {
    const auto checks = qesprob::run_selftest();
    std::size_t width = 0;
    for (const auto& c : checks) {
        width = std::max(width, c.name.size());
    }
    bool all_pass = true;
    std::string failing;
    for (const auto& c : checks) {
        std::printf("%-*s  %s  %s\n", static_cast<int>(width), c.name.c_str(),
                    c.pass ? "PASS" : "FAIL", c.detail.c_str());
        if (!c.pass) {
            all_pass = false;
            failing += failing.empty() ? c.name : ", " + c.name;
        }
    }
    if (!all_pass) {
        std::printf("FAILED: %s\n", failing.c_str());
        return 1;
    }
    std::printf("all %zu checks passed\n", checks.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Separability-probability estimation over random two-qubit ensembles"};
    app.require_subcommand(1);

    qesprob::RunConfig cfg;
    cfg.threads = threads_from_env();

    const std::map<std::string, qesprob::MeasureKind> ensemble_names{
        {"hs", qesprob::MeasureKind::hilbert_schmidt},
        {"bures", qesprob::MeasureKind::bures}};
    const std::map<std::string, qesprob::FieldTag> field_names{
        {"complex", qesprob::FieldTag::complex_field},
        {"real", qesprob::FieldTag::real_field}};
    const std::map<std::string, qesprob::WeightScheme> weight_names{
        {"none", qesprob::WeightScheme::none},
        {"qes-raw", qesprob::WeightScheme::qes_raw},
        {"cross", qesprob::WeightScheme::cross},
        {"qes-eig", qesprob::WeightScheme::qes_eig},
        {"qes-unitary", qesprob::WeightScheme::qes_unitary}};
    const std::map<std::string, qesprob::OutputFormat> format_names{
        {"json", qesprob::OutputFormat::json},
        {"csv", qesprob::OutputFormat::csv},
        {"both", qesprob::OutputFormat::both}};

    CLI::App* estimate = app.add_subcommand("estimate", "Run a separability estimation");
    estimate->add_option("--ensemble", cfg.ensemble.kind, "Sampling ensemble")
        ->transform(CLI::CheckedTransformer(ensemble_names, CLI::ignore_case))
        ->default_str("hs");
    estimate->add_option("--field", cfg.ensemble.field, "Number field of the ensemble")
        ->transform(CLI::CheckedTransformer(field_names, CLI::ignore_case))
        ->default_str("complex");
    estimate->add_option("--weight", cfg.weight, "Per-sample weight scheme")
        ->transform(CLI::CheckedTransformer(weight_names, CLI::ignore_case))
        ->default_str("none");
    estimate->add_option("--samples", cfg.samples, "Total number of samples")->required();
    estimate->add_option("--batch-size", cfg.batch_size, "Samples per batch/chunk")
        ->capture_default_str();
    estimate->add_option("--seed", cfg.master_seed, "Master seed")->capture_default_str();
    estimate->add_option("--threads", cfg.threads,
                         "Worker threads (default: QESPROB_THREADS or hardware)");
    double cap = 0.0;
    CLI::Option* cap_opt =
        estimate->add_option("--weight-cap", cap, "Clamp finite weights to this value");
    estimate->add_option("--out", cfg.output_path,
                         "Output path stem; writes <stem>.json / <stem>.csv");
    estimate->add_option("--format", cfg.format, "Which output files to write")
        ->transform(CLI::CheckedTransformer(format_names, CLI::ignore_case))
        ->default_str("json");

    CLI::App* selftest = app.add_subcommand("selftest", "Run the invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (selftest->parsed()) {
        return run_selftest_command();
    }
    if (cap_opt->count() > 0) {
        cfg.weight_cap = cap;
    }
    return run_estimate_command(cfg);
}
