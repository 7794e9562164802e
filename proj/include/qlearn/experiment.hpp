#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qlearn/analysis.hpp"
#include "qlearn/data.hpp"

namespace qlearn {

struct DatasetSourceConfig {
    enum class Kind { sparse_file, csv_file, synthetic };
    Kind kind = Kind::synthetic;
    std::string path;
    std::optional<std::size_t> dimension_override;
    std::size_t train_count = 0;  // remainder is the test side
    std::uint64_t split_seed = 0;
    SyntheticSpec synthetic;
};

struct LearnerConfig {
    enum class Kind { perceptron, frank_wolfe };
    Kind kind = Kind::perceptron;
    PerceptronConfig perceptron;
    FrankWolfeConfig frank_wolfe;
    std::vector<std::uint64_t> seeds{0};  // one full grid per seed
};

struct SchemeGridConfig {
    enum class Kind { regular, logarithmic, lookup, cluster };
    Kind kind = Kind::regular;
    // regular: ranges x points per dimension
    std::vector<std::pair<double, double>> ranges;
    std::vector<std::uint32_t> points_per_dim;
    // logarithmic: exponent bits x total bit budget (1 sign + e + t = budget)
    std::vector<unsigned> exponent_bits;
    std::vector<unsigned> bit_budgets;
    // lookup: a fixed atom table
    std::string table_path;
    // cluster: per-class k values
    std::vector<std::uint32_t> cluster_k;
    std::uint64_t cluster_seed = 0;
    double halo = 1.0;
    std::uint64_t lookup_delta_samples = LookupLattice::kDefaultDeltaSamples;
};

struct ExperimentConfig {
    DatasetSourceConfig dataset;
    NormalizationSpec normalization;
    LearnerConfig learner;
    SchemeGridConfig grid;
    std::string output_dir = "out";
    std::string csv_name = "grid.csv";
    std::string text_name = "grid.txt";
};

ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config(const std::string& path);

struct GridCell {
    std::string row_label;
    std::string col_label;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;  // per-cell failure marker; the run continues
    double accuracy_pct = 0.0;
    std::uint64_t train_mistakes = 0;
    double delta = 0.0;
    bool delta_exact = true;
    bool sink = false;  // final weights are a sink atom for the training set
};

struct ExperimentGrid {
    std::string dataset_name;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::vector<std::uint64_t> seeds;
    std::vector<GridCell> cells;  // seed-major, then row-major

    const GridCell& cell(std::size_t seed_index, std::size_t row, std::size_t col) const;
};

ExperimentGrid run_experiment(const ExperimentConfig& config);

void write_grid_csv(std::ostream& out, const ExperimentGrid& grid);
void write_grid_text(std::ostream& out, const ExperimentGrid& grid);
// Writes csv + text into output_dir (honoring the QLEARN_OUTPUT_DIR override).
void write_experiment_outputs(const ExperimentGrid& grid, const ExperimentConfig& config);

// Built-in synthetic instances backing the validation suite, the acceptance
// criteria and the property tests.
struct TheoremInstance {
    std::shared_ptr<RegularLattice> scheme;
    LabeledDataset dataset;  // raw, pre-quantization
    double planted_margin = 0.0;
};

TheoremInstance mistake_bound_instance(std::uint64_t index);
TheoremInstance equivalence_instance(std::uint64_t index);
TheoremInstance fw_corollary_instance(std::uint64_t index, double epsilon);

struct ValidationItem {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationItem> items;
    bool all_pass() const;
};

// Desk-scale sweep of the Lemma-1 scaling regression and the Theorem 1/2/3
// checks; logs one line per item when a stream is given.
ValidationReport run_validation_suite(std::ostream* log = nullptr);

}  // namespace qlearn
