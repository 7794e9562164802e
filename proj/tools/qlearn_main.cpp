#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qlearn/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitBadInput = 2;

int cmd_run(const std::string& config_path) {
    const qlearn::ExperimentConfig config = qlearn::load_experiment_config(config_path);
    const qlearn::ExperimentGrid grid = qlearn::run_experiment(config);
    qlearn::write_experiment_outputs(grid, config);
    qlearn::write_grid_text(std::cout, grid);
    std::size_t failed_cells = 0;
    for (const qlearn::GridCell& cell : grid.cells)
        if (!cell.ok) ++failed_cells;
    if (failed_cells > 0)
        std::cout << "# " << failed_cells << " of " << grid.cells.size()
                  << " cells carry error markers\n";
    return kExitOk;
}

int cmd_validate() {
    const qlearn::ValidationReport report = qlearn::run_validation_suite(&std::cout);
    std::cout << (report.all_pass() ? "all checks passed\n" : "CHECK VIOLATIONS FOUND\n");
    return report.all_pass() ? kExitOk : kExitViolation;
}

struct DeltaArgs {
    std::string kind;
    std::size_t dimension = 1;
    std::uint32_t points = 2;
    double lo = -1.0, hi = 1.0;
    unsigned exponent_bits = 3, mantissa_bits = 1;
    std::string table_path;
    double halo = 1.0;
    std::uint64_t samples = qlearn::LookupLattice::kDefaultDeltaSamples;
};

int cmd_delta(const DeltaArgs& args) {
    std::unique_ptr<qlearn::QuantizationScheme> scheme;
    if (args.kind == "regular") {
        scheme = std::make_unique<qlearn::RegularLattice>(args.dimension, args.points, args.lo, args.hi);
    } else if (args.kind == "logarithmic") {
        scheme = std::make_unique<qlearn::LogarithmicLattice>(args.dimension, args.exponent_bits,
                                                              args.mantissa_bits);
    } else {
        scheme = std::make_unique<qlearn::LookupLattice>(qlearn::load_atom_table_csv(args.table_path),
                                                         args.halo, args.samples);
    }
    const qlearn::DeltaReport report = qlearn::compute_delta(*scheme);
    std::printf("delta=%.17g %s", report.value, report.exact ? "exact" : "estimate");
    if (!report.exact)
        std::printf(" samples=%llu", static_cast<unsigned long long>(report.samples));
    std::printf("\n");
    return kExitOk;
}

int cmd_incidence(std::size_t dimension, const std::vector<std::uint32_t>& grid_sizes,
                  std::size_t normals, std::uint64_t seed) {
    const qlearn::IncidenceScaling scaling =
        qlearn::incidence_scaling(dimension, grid_sizes, normals, seed);
    std::printf("%8s %12s %18s\n", "n/dim", "atoms", "mean cells hit");
    for (const qlearn::IncidencePoint& p : scaling.points)
        std::printf("%8u %12llu %18.2f\n", p.points_per_dim,
                    static_cast<unsigned long long>(p.atom_count), p.mean_incident_cells);
    std::printf("log-log slope %.4f (theory %.4f)\n", scaling.slope,
                1.0 - 1.0 / static_cast<double>(dimension));
    return kExitOk;
}

int cmd_margin(const std::string& path, const std::string& format, const std::string& method,
               std::uint64_t budget, std::uint64_t seed) {
    const qlearn::LabeledDataset dataset = format == "csv" ? qlearn::load_dense_csv_file(path)
                                                           : qlearn::load_sparse_file(path);
    const qlearn::MarginEstimate estimate =
        method == "direction_search"
            ? qlearn::estimate_margin_direction_search(dataset, budget, seed)
            : qlearn::estimate_margin(dataset, budget);
    if (estimate.separable)
        std::printf("margin=%.12g method=%s budget=%llu\n", estimate.gamma_hat, method.c_str(),
                    static_cast<unsigned long long>(estimate.steps_used));
    else
        std::printf("non-separable (best certificate %.12g)\n", estimate.gamma_hat);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantized learning: lattices, Perceptron/Frank-Wolfe, experiment sweeps"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "run an experiment grid from an INI config");
    run->add_option("config", config_path, "config file")->required();

    auto* validate =
        app.add_subcommand("validate", "run the built-in lemma/theorem validation suite");

    DeltaArgs delta_args;
    auto* delta = app.add_subcommand("delta", "report the error parameter of a scheme");
    delta->add_option("--kind", delta_args.kind, "regular | logarithmic | lookup")
        ->required()
        ->check(CLI::IsMember({"regular", "logarithmic", "lookup"}));
    delta->add_option("--dim", delta_args.dimension, "dimension d");
    delta->add_option("--points", delta_args.points, "points per dimension (regular)");
    delta->add_option("--lo", delta_args.lo, "range low end (regular)");
    delta->add_option("--hi", delta_args.hi, "range high end (regular)");
    delta->add_option("--exponent-bits", delta_args.exponent_bits, "exponent bits (logarithmic)");
    delta->add_option("--mantissa-bits", delta_args.mantissa_bits, "mantissa bits (logarithmic)");
    delta->add_option("--table", delta_args.table_path, "atom table CSV (lookup)");
    delta->add_option("--halo", delta_args.halo, "domain halo around the table (lookup)");
    delta->add_option("--samples", delta_args.samples, "Monte Carlo samples (lookup)");

    std::size_t incidence_dim = 2;
    std::vector<std::uint32_t> incidence_sizes;
    std::size_t incidence_normals = 24;
    std::uint64_t incidence_seed = 1;
    auto* incidence =
        app.add_subcommand("incidence", "count separator-incident quantization cells");
    incidence->add_option("d", incidence_dim, "dimension")->required();
    incidence->add_option("n", incidence_sizes, "grid sizes per dimension")->required();
    incidence->add_option("--normals", incidence_normals, "random separators per size");
    incidence->add_option("--seed", incidence_seed, "separator seed");

    std::string margin_path, margin_format = "sparse", margin_method = "frank_wolfe";
    std::uint64_t margin_budget = 100000, margin_seed = 0;
    auto* margin = app.add_subcommand("margin", "estimate the margin of a dataset");
    margin->add_option("dataset", margin_path, "dataset file")->required();
    margin->add_option("--format", margin_format, "sparse | csv")
        ->check(CLI::IsMember({"sparse", "csv"}));
    margin->add_option("--method", margin_method, "frank_wolfe | direction_search")
        ->check(CLI::IsMember({"frank_wolfe", "direction_search"}));
    margin->add_option("--budget", margin_budget, "steps / directions");
    margin->add_option("--seed", margin_seed, "direction search seed");

    try {
        app.parse(argc, argv);
        if (run->parsed()) return cmd_run(config_path);
        if (validate->parsed()) return cmd_validate();
        if (delta->parsed()) {
            if (delta_args.kind == "lookup" && delta_args.table_path.empty())
                throw std::invalid_argument("delta --kind lookup requires --table");
            return cmd_delta(delta_args);
        }
        if (incidence->parsed())
            return cmd_incidence(incidence_dim, incidence_sizes, incidence_normals, incidence_seed);
        if (margin->parsed())
            return cmd_margin(margin_path, margin_format, margin_method, margin_budget, margin_seed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
    return kExitBadInput;
}
