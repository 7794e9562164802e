#include "qlearn/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace qlearn {

// ---------------------------------------------------------------------------
// Flat INI-style config: [section] headers, key = value lines, # or ;
// comments on their own line. Lists are comma separated; ranges are lo:hi.

namespace {

class IniFile {
public:
    explicit IniFile(std::istream& in) {
        std::string line, section;
        std::size_t line_number = 0;
        while (std::getline(in, line)) {
            ++line_number;
            const auto first = line.find_first_not_of(" \t\r\n");
            if (first == std::string::npos) continue;
            const auto last = line.find_last_not_of(" \t\r\n");
            std::string content = line.substr(first, last - first + 1);
            if (content[0] == '#' || content[0] == ';') continue;
            if (content.front() == '[') {
                if (content.back() != ']' || content.size() < 3)
                    throw ParseError("malformed section header '" + content + "'", line_number);
                section = content.substr(1, content.size() - 2);
                continue;
            }
            const auto eq = content.find('=');
            if (eq == std::string::npos)
                throw ParseError("expected key = value, got '" + content + "'", line_number);
            auto strip = [](std::string s) {
                const auto b = s.find_first_not_of(" \t");
                if (b == std::string::npos) return std::string();
                const auto e = s.find_last_not_of(" \t");
                return s.substr(b, e - b + 1);
            };
            const std::string key = strip(content.substr(0, eq));
            const std::string value = strip(content.substr(eq + 1));
            if (key.empty()) throw ParseError("empty key", line_number);
            if (section.empty()) throw ParseError("key '" + key + "' outside any section", line_number);
            values_[section + "." + key] = value;
        }
    }

    bool has(const std::string& section, const std::string& key) const {
        return values_.count(section + "." + key) > 0;
    }

    std::string get(const std::string& section, const std::string& key) const {
        const auto it = values_.find(section + "." + key);
        if (it == values_.end())
            throw std::invalid_argument("config: missing required key [" + section + "] " + key);
        return it->second;
    }

    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const {
        return has(section, key) ? get(section, key) : fallback;
    }

    double get_double(const std::string& section, const std::string& key) const {
        return to_double(get(section, key), section, key);
    }

    double get_double_or(const std::string& section, const std::string& key, double fallback) const {
        return has(section, key) ? get_double(section, key) : fallback;
    }

    std::uint64_t get_u64(const std::string& section, const std::string& key) const {
        const double v = get_double(section, key);
        if (v < 0 || v != std::floor(v))
            throw std::invalid_argument("config: [" + section + "] " + key +
                                        " must be a non-negative integer");
        return static_cast<std::uint64_t>(v);
    }

    std::uint64_t get_u64_or(const std::string& section, const std::string& key,
                             std::uint64_t fallback) const {
        return has(section, key) ? get_u64(section, key) : fallback;
    }

    std::vector<std::string> get_list(const std::string& section, const std::string& key) const {
        std::vector<std::string> items;
        std::istringstream stream(get(section, key));
        std::string item;
        while (std::getline(stream, item, ',')) {
            const auto b = item.find_first_not_of(" \t");
            if (b == std::string::npos) continue;
            const auto e = item.find_last_not_of(" \t");
            items.push_back(item.substr(b, e - b + 1));
        }
        if (items.empty())
            throw std::invalid_argument("config: [" + section + "] " + key + " is an empty list");
        return items;
    }

    static double to_double(const std::string& text, const std::string& section,
                            const std::string& key) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(text, &pos);
            if (pos != text.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument("config: [" + section + "] " + key +
                                        " is not a number: '" + text + "'");
        }
    }

private:
    std::map<std::string, std::string> values_;
};

std::string format_double(double v, const char* fmt = "%.17g") {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, fmt, v);
    return buffer;
}

std::string format_range(double lo, double hi) {
    return "[" + format_double(lo, "%g") + "," + format_double(hi, "%g") + "]";
}

}  // namespace

ExperimentConfig parse_experiment_config(std::istream& in) {
    const IniFile ini(in);
    ExperimentConfig config;

    // [dataset]
    const std::string dataset_kind = ini.get("dataset", "kind");
    if (dataset_kind == "sparse_file") {
        config.dataset.kind = DatasetSourceConfig::Kind::sparse_file;
        config.dataset.path = ini.get("dataset", "path");
        if (ini.has("dataset", "dimension"))
            config.dataset.dimension_override = ini.get_u64("dataset", "dimension");
    } else if (dataset_kind == "csv_file") {
        config.dataset.kind = DatasetSourceConfig::Kind::csv_file;
        config.dataset.path = ini.get("dataset", "path");
    } else if (dataset_kind == "synthetic") {
        config.dataset.kind = DatasetSourceConfig::Kind::synthetic;
        SyntheticSpec& spec = config.dataset.synthetic;
        spec.dimension = ini.get_u64("dataset", "dimension");
        spec.count = ini.get_u64("dataset", "count");
        spec.margin = ini.get_double("dataset", "margin");
        spec.min_magnitude = ini.get_double_or("dataset", "min_magnitude", 0.0);
        spec.max_magnitude = ini.get_double("dataset", "max_magnitude");
        spec.seed = ini.get_u64_or("dataset", "seed", 0);
        spec.positive_fraction = ini.get_double_or("dataset", "positive_fraction", 0.5);
    } else {
        throw std::invalid_argument("config: unknown dataset kind '" + dataset_kind + "'");
    }
    config.dataset.train_count = ini.get_u64("dataset", "train_count");
    config.dataset.split_seed = ini.get_u64_or("dataset", "split_seed", 0);

    // [normalize]
    const std::string mode = ini.get_or("normalize", "mode", "none");
    if (mode == "none") {
        config.normalization.mode = NormalizationMode::none;
    } else if (mode == "unit_max_norm") {
        config.normalization.mode = NormalizationMode::unit_max_norm;
    } else if (mode == "scale_to_box") {
        config.normalization.mode = NormalizationMode::scale_to_box;
        config.normalization.box_lo = ini.get_double_or("normalize", "lo", -1.0);
        config.normalization.box_hi = ini.get_double_or("normalize", "hi", 1.0);
    } else {
        throw std::invalid_argument("config: unknown normalize mode '" + mode + "'");
    }

    // [learner]
    const std::string learner_kind = ini.get_or("learner", "kind", "perceptron");
    if (learner_kind == "perceptron") {
        config.learner.kind = LearnerConfig::Kind::perceptron;
    } else if (learner_kind == "frank_wolfe") {
        config.learner.kind = LearnerConfig::Kind::frank_wolfe;
    } else {
        throw std::invalid_argument("config: unknown learner kind '" + learner_kind + "'");
    }
    config.learner.perceptron.epochs =
        static_cast<std::uint32_t>(ini.get_u64_or("learner", "epochs", 3));
    config.learner.perceptron.learning_rate = ini.get_double_or("learner", "learning_rate", 1.0);
    const std::string rule = ini.get_or("learner", "mistake_rule", "lenient");
    if (rule == "lenient") {
        config.learner.perceptron.mistake_rule = MistakeRule::lenient;
    } else if (rule == "strict") {
        config.learner.perceptron.mistake_rule = MistakeRule::strict;
    } else {
        throw std::invalid_argument("config: unknown mistake_rule '" + rule + "'");
    }
    config.learner.frank_wolfe.max_steps = ini.get_u64_or("learner", "max_steps", 1000);
    config.learner.frank_wolfe.epsilon = ini.get_double_or("learner", "epsilon", 0.1);
    if (ini.has("learner", "seeds")) {
        config.learner.seeds.clear();
        for (const std::string& s : ini.get_list("learner", "seeds"))
            config.learner.seeds.push_back(
                static_cast<std::uint64_t>(IniFile::to_double(s, "learner", "seeds")));
    }

    // [grid]
    const std::string grid_kind = ini.get("grid", "kind");
    if (grid_kind == "regular") {
        config.grid.kind = SchemeGridConfig::Kind::regular;
        for (const std::string& r : ini.get_list("grid", "ranges")) {
            const auto colon = r.find(':');
            if (colon == std::string::npos)
                throw std::invalid_argument("config: range '" + r + "' must be lo:hi");
            config.grid.ranges.emplace_back(IniFile::to_double(r.substr(0, colon), "grid", "ranges"),
                                            IniFile::to_double(r.substr(colon + 1), "grid", "ranges"));
        }
        for (const std::string& p : ini.get_list("grid", "points_per_dim"))
            config.grid.points_per_dim.push_back(
                static_cast<std::uint32_t>(IniFile::to_double(p, "grid", "points_per_dim")));
    } else if (grid_kind == "logarithmic") {
        config.grid.kind = SchemeGridConfig::Kind::logarithmic;
        for (const std::string& e : ini.get_list("grid", "exponent_bits"))
            config.grid.exponent_bits.push_back(
                static_cast<unsigned>(IniFile::to_double(e, "grid", "exponent_bits")));
        for (const std::string& b : ini.get_list("grid", "bit_budgets"))
            config.grid.bit_budgets.push_back(
                static_cast<unsigned>(IniFile::to_double(b, "grid", "bit_budgets")));
    } else if (grid_kind == "lookup") {
        config.grid.kind = SchemeGridConfig::Kind::lookup;
        config.grid.table_path = ini.get("grid", "table");
        config.grid.halo = ini.get_double_or("grid", "halo", 1.0);
    } else if (grid_kind == "cluster") {
        config.grid.kind = SchemeGridConfig::Kind::cluster;
        for (const std::string& k : ini.get_list("grid", "cluster_k"))
            config.grid.cluster_k.push_back(
                static_cast<std::uint32_t>(IniFile::to_double(k, "grid", "cluster_k")));
        config.grid.cluster_seed = ini.get_u64_or("grid", "cluster_seed", 0);
        config.grid.halo = ini.get_double_or("grid", "halo", 1.0);
    } else {
        throw std::invalid_argument("config: unknown grid kind '" + grid_kind + "'");
    }

    // [output]
    config.output_dir = ini.get_or("output", "dir", "out");
    config.csv_name = ini.get_or("output", "csv", "grid.csv");
    config.text_name = ini.get_or("output", "text", "grid.txt");
    return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    return parse_experiment_config(in);
}

// ---------------------------------------------------------------------------
// Grid execution

const GridCell& ExperimentGrid::cell(std::size_t seed_index, std::size_t row, std::size_t col) const {
    return cells.at((seed_index * row_labels.size() + row) * col_labels.size() + col);
}

namespace {

struct GridAxes {
    std::vector<std::string> rows;
    std::vector<std::string> cols;
};

GridAxes grid_axes(const SchemeGridConfig& grid) {
    GridAxes axes;
    switch (grid.kind) {
        case SchemeGridConfig::Kind::regular:
            for (const auto& [lo, hi] : grid.ranges) axes.rows.push_back(format_range(lo, hi));
            for (std::uint32_t p : grid.points_per_dim) axes.cols.push_back(std::to_string(p));
            break;
        case SchemeGridConfig::Kind::logarithmic:
            for (unsigned e : grid.exponent_bits) axes.rows.push_back(std::to_string(e));
            for (unsigned b : grid.bit_budgets) axes.cols.push_back(std::to_string(b));
            break;
        case SchemeGridConfig::Kind::lookup: {
            axes.rows.push_back("table");
            std::string name = grid.table_path;
            const auto slash = name.find_last_of('/');
            if (slash != std::string::npos) name = name.substr(slash + 1);
            axes.cols.push_back(name);
            break;
        }
        case SchemeGridConfig::Kind::cluster:
            for (std::uint32_t k : grid.cluster_k) axes.rows.push_back("k=" + std::to_string(k));
            axes.cols.push_back("cluster");
            break;
    }
    if (axes.rows.empty() || axes.cols.empty())
        throw std::invalid_argument("config: scheme grid is empty");
    return axes;
}

std::unique_ptr<QuantizationScheme> build_cell_scheme(const SchemeGridConfig& grid,
                                                      const LabeledDataset& train,
                                                      const std::vector<Vec>* lookup_table,
                                                      std::size_t row, std::size_t col) {
    const std::size_t d = train.dimension();
    switch (grid.kind) {
        case SchemeGridConfig::Kind::regular: {
            const auto [lo, hi] = grid.ranges[row];
            return std::make_unique<RegularLattice>(d, grid.points_per_dim[col], lo, hi);
        }
        case SchemeGridConfig::Kind::logarithmic: {
            const unsigned e = grid.exponent_bits[row];
            const unsigned budget = grid.bit_budgets[col];
            if (budget < 1 + e + 1)
                throw std::invalid_argument("bit budget " + std::to_string(budget) +
                                            " too small for sign + " + std::to_string(e) +
                                            " exponent bits + mantissa");
            return std::make_unique<LogarithmicLattice>(d, e, budget - 1 - e);
        }
        case SchemeGridConfig::Kind::lookup:
            return std::make_unique<LookupLattice>(*lookup_table, grid.halo,
                                                   grid.lookup_delta_samples);
        case SchemeGridConfig::Kind::cluster: {
            ClusterLatticeOptions options;
            options.k_per_class = grid.cluster_k[row];
            options.seed = grid.cluster_seed;
            options.halo = grid.halo;
            options.delta_samples = grid.lookup_delta_samples;
            return std::make_unique<LookupLattice>(build_cluster_lattice(train, options));
        }
    }
    throw std::logic_error("unreachable grid kind");
}

double test_accuracy(const Vec& weights, const LabeledDataset& test) {
    std::size_t correct = 0;
    for (const Example& e : test.examples())
        if (predict(weights, e.x) == e.y) ++correct;
    return 100.0 * static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace

ExperimentGrid run_experiment(const ExperimentConfig& config) {
    LabeledDataset full = [&] {
        switch (config.dataset.kind) {
            case DatasetSourceConfig::Kind::sparse_file:
                return load_sparse_file(config.dataset.path, config.dataset.dimension_override);
            case DatasetSourceConfig::Kind::csv_file:
                return load_dense_csv_file(config.dataset.path);
            case DatasetSourceConfig::Kind::synthetic:
                return generate_synthetic(config.dataset.synthetic);
        }
        throw std::logic_error("unreachable dataset kind");
    }();
    const SplitDataset split = seeded_split(full, config.dataset.train_count, config.dataset.split_seed);

    // normalization factors come from the training side only
    const NormalizedDataset normalized_train = normalize(split.train, config.normalization);
    const LabeledDataset train = normalized_train.dataset;
    const LabeledDataset test = normalized_train.record.apply(split.test);

    std::optional<std::vector<Vec>> lookup_table;
    if (config.grid.kind == SchemeGridConfig::Kind::lookup)
        lookup_table = load_atom_table_csv(config.grid.table_path);

    const GridAxes axes = grid_axes(config.grid);
    ExperimentGrid grid;
    grid.dataset_name = full.name();
    grid.train_size = train.size();
    grid.test_size = test.size();
    grid.row_labels = axes.rows;
    grid.col_labels = axes.cols;
    grid.seeds = config.learner.seeds;
    if (grid.seeds.empty()) throw std::invalid_argument("config: learner seeds must be non-empty");

    for (std::uint64_t seed : grid.seeds) {
        for (std::size_t row = 0; row < axes.rows.size(); ++row) {
            for (std::size_t col = 0; col < axes.cols.size(); ++col) {
                GridCell cell;
                cell.row_label = axes.rows[row];
                cell.col_label = axes.cols[col];
                cell.seed = seed;
                try {
                    const auto scheme = build_cell_scheme(
                        config.grid, train, lookup_table ? &*lookup_table : nullptr, row, col);
                    const DeltaReport delta = scheme->delta_report();
                    const LabeledDataset train_q = quantize_dataset(*scheme, train);
                    const LabeledDataset test_q = quantize_dataset(*scheme, test);

                    TrainedModel model;
                    if (config.learner.kind == LearnerConfig::Kind::perceptron) {
                        PerceptronConfig learner = config.learner.perceptron;
                        learner.shuffle_seed = seed;
                        model = quantized_perceptron(*scheme, train_q, learner);
                        cell.train_mistakes = model.mistake_count;
                    } else {
                        model = quantized_frank_wolfe(*scheme, train_q, config.learner.frank_wolfe);
                        cell.train_mistakes = model.update_count;
                    }

                    cell.accuracy_pct = test_accuracy(model.weights, test_q);
                    cell.delta = delta.value;
                    cell.delta_exact = delta.exact;
                    cell.sink = model.weight_atom && is_sink(*scheme, train_q, *model.weight_atom);
                    cell.ok = true;
                } catch (const std::exception& e) {
                    cell.ok = false;
                    cell.error = e.what();
                }
                grid.cells.push_back(std::move(cell));
            }
        }
    }
    return grid;
}

void write_grid_csv(std::ostream& out, const ExperimentGrid& grid) {
    out << "seed,row,col,accuracy,train_mistakes,delta,delta_exact,sink,error\n";
    for (const GridCell& cell : grid.cells) {
        std::string error = cell.error;
        std::replace(error.begin(), error.end(), ',', ';');
        std::replace(error.begin(), error.end(), '\n', ' ');
        out << cell.seed << ',' << cell.row_label << ',' << cell.col_label << ',';
        if (cell.ok) {
            out << format_double(cell.accuracy_pct, "%.4f") << ',' << cell.train_mistakes << ','
                << format_double(cell.delta) << ',' << (cell.delta_exact ? 1 : 0) << ','
                << (cell.sink ? 1 : 0) << ',';
        } else {
            out << ",,,,,";
        }
        out << error << '\n';
    }
}

void write_grid_text(std::ostream& out, const ExperimentGrid& grid) {
    out << "# dataset: " << grid.dataset_name << "  train=" << grid.train_size
        << " test=" << grid.test_size << "\n";
    std::size_t row_width = 8;
    for (const std::string& r : grid.row_labels) row_width = std::max(row_width, r.size() + 2);
    for (std::size_t s = 0; s < grid.seeds.size(); ++s) {
        out << "## seed " << grid.seeds[s] << "\n";
        out << std::string(row_width, ' ');
        char buffer[64];
        for (const std::string& c : grid.col_labels) {
            std::snprintf(buffer, sizeof buffer, "%9s", c.c_str());
            out << buffer;
        }
        out << "\n";
        for (std::size_t row = 0; row < grid.row_labels.size(); ++row) {
            out << grid.row_labels[row]
                << std::string(row_width - grid.row_labels[row].size(), ' ');
            for (std::size_t col = 0; col < grid.col_labels.size(); ++col) {
                const GridCell& cell = grid.cell(s, row, col);
                if (cell.ok) {
                    std::snprintf(buffer, sizeof buffer, "%8.2f%c", cell.accuracy_pct,
                                  cell.sink ? '*' : ' ');
                } else {
                    std::snprintf(buffer, sizeof buffer, "%8s ", "--");
                }
                out << buffer;
            }
            out << "\n";
        }
    }
    out << "# accuracy %% per cell; * marks a final weight that is a sink atom; -- marks a\n";
    out << "# configuration that could not be built\n";
}

void write_experiment_outputs(const ExperimentGrid& grid, const ExperimentConfig& config) {
    std::string dir = config.output_dir;
    if (const char* env = std::getenv("QLEARN_OUTPUT_DIR")) dir = env;
    std::filesystem::create_directories(dir);
    {
        std::ofstream csv(dir + "/" + config.csv_name);
        if (!csv) throw std::runtime_error("cannot write " + dir + "/" + config.csv_name);
        write_grid_csv(csv, grid);
    }
    {
        std::ofstream text(dir + "/" + config.text_name);
        if (!text) throw std::runtime_error("cannot write " + dir + "/" + config.text_name);
        write_grid_text(text, grid);
    }
}

// ---------------------------------------------------------------------------
// Built-in theorem instances

TheoremInstance mistake_bound_instance(std::uint64_t index) {
    std::mt19937_64 rng(0xA11CE5EEDull + index);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t d = 2 + index % 2;
    const double max_magnitude = 0.8 / std::sqrt(static_cast<double>(d));
    const double gamma = 0.1 + 0.25 * unit(rng);
    const double delta_target = (0.1 + 0.4 * unit(rng)) * gamma;

    SyntheticSpec spec;
    spec.dimension = d;
    spec.count = 40 + index % 30;
    spec.margin = gamma;
    spec.min_magnitude = 0.0;
    spec.max_magnitude = max_magnitude;
    spec.seed = rng();
    spec.verify_margin = false;  // anchors pin the margin; checked in data tests
    LabeledDataset dataset = generate_synthetic(spec);

    // odd point count over a symmetric range: exact zero atom, and the domain
    // holds the mistake-bound ball with room for the margin certificate slack
    const double step = 2.0 * delta_target / std::sqrt(static_cast<double>(d));
    const double reach = 2.0 / (gamma - delta_target) + 1.0;
    const auto half = static_cast<std::uint32_t>(std::ceil(reach / step));
    const double hi = static_cast<double>(half) * step;
    auto scheme = std::make_shared<RegularLattice>(d, 2 * half + 1, -hi, hi);
    return TheoremInstance{std::move(scheme), std::move(dataset), gamma};
}

TheoremInstance equivalence_instance(std::uint64_t index) {
    std::mt19937_64 rng(0xEC0C0DEull + index);
    const std::size_t d = 1 + index % 5;
    const std::size_t count = 20 + (index * 37) % 481;
    std::uniform_int_distribution<int> coord(-5, 5);
    std::uniform_int_distribution<int> coin(0, 1);
    std::vector<Example> examples;
    examples.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Vec x(d);
        for (double& c : x) c = static_cast<double>(coord(rng));
        examples.push_back(Example{std::move(x), coin(rng) ? Label::positive : Label::negative});
    }
    LabeledDataset dataset("equivalence-" + std::to_string(index), d, std::move(examples));

    // integer grid wide enough that 3 epochs of updates can never leave it
    const auto reach = static_cast<std::uint32_t>(3 * count * 5 + 10);
    auto scheme = std::make_shared<RegularLattice>(d, 2 * reach + 1, -static_cast<double>(reach),
                                                   static_cast<double>(reach));
    return TheoremInstance{std::move(scheme), std::move(dataset), 0.0};
}

TheoremInstance fw_corollary_instance(std::uint64_t index, double epsilon) {
    std::mt19937_64 rng(0xF3A57EEDull + index);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t d = 2;
    const double gamma = 0.2 + 0.3 * unit(rng);
    // well inside the corollary's delta <= eps^2 gamma precondition
    const double delta_target = epsilon * epsilon * gamma / 100.0;

    SyntheticSpec spec;
    spec.dimension = d;
    spec.count = 30 + index % 30;
    spec.margin = gamma;
    spec.min_magnitude = 0.0;
    spec.max_magnitude = 0.65;
    spec.seed = rng();
    spec.verify_margin = false;
    LabeledDataset dataset = generate_synthetic(spec);

    const double step = 2.0 * delta_target / std::sqrt(static_cast<double>(d));
    const auto half = static_cast<std::uint32_t>(std::ceil(1.3 / step));
    const double hi = static_cast<double>(half) * step;
    auto scheme = std::make_shared<RegularLattice>(d, 2 * half + 1, -hi, hi);
    return TheoremInstance{std::move(scheme), std::move(dataset), gamma};
}

// ---------------------------------------------------------------------------
// Validation suite

bool ValidationReport::all_pass() const {
    return std::all_of(items.begin(), items.end(), [](const ValidationItem& i) { return i.pass; });
}

namespace {

void log_item(std::ostream* log, const ValidationItem& item) {
    if (!log) return;
    *log << (item.pass ? "PASS" : "FAIL") << "  " << item.name;
    if (!item.detail.empty()) *log << "  (" << item.detail << ")";
    *log << "\n";
}

}  // namespace

ValidationReport run_validation_suite(std::ostream* log) {
    ValidationReport report;
    char detail[160];

    {
        const IncidenceScaling scaling = incidence_scaling(2, {8, 16, 32, 64}, 24, 1);
        std::snprintf(detail, sizeof detail, "slope %.3f, expected 0.5 within [0.4, 0.6]",
                      scaling.slope);
        report.items.push_back(ValidationItem{"lemma1 incidence scaling d=2",
                                              scaling.slope >= 0.4 && scaling.slope <= 0.6, detail});
        log_item(log, report.items.back());
    }
    {
        const IncidenceScaling scaling = incidence_scaling(3, {8, 16, 32, 64}, 12, 2);
        std::snprintf(detail, sizeof detail, "slope %.3f, expected 2/3 within [0.57, 0.77]",
                      scaling.slope);
        report.items.push_back(ValidationItem{"lemma1 incidence scaling d=3",
                                              scaling.slope >= 0.57 && scaling.slope <= 0.77, detail});
        log_item(log, report.items.back());
    }
    {
        bool all = true;
        std::string failure;
        for (std::uint64_t i = 0; i < 20 && all; ++i) {
            const TheoremInstance instance = mistake_bound_instance(i);
            const MistakeBoundReport r = check_mistake_bound(*instance.scheme, instance.dataset, 3);
            if (!r.holds) {
                all = false;
                std::snprintf(detail, sizeof detail,
                              "instance %llu: %llu mistakes vs bound %.1f, separated=%d",
                              static_cast<unsigned long long>(i),
                              static_cast<unsigned long long>(r.max_mistakes), r.bound,
                              r.all_separated ? 1 : 0);
                failure = detail;
            }
        }
        report.items.push_back(ValidationItem{
            "theorem1 mistake bound (20 instances x 3 shuffles)", all,
            all ? "mistakes <= 1/(gamma-delta)^2 and all runs separate" : failure});
        log_item(log, report.items.back());
    }
    {
        // delta >= gamma must be reported as inapplicable, not as a failure
        const TheoremInstance instance = mistake_bound_instance(0);
        const RegularLattice coarse(instance.dataset.dimension(), 3, -2.0, 2.0);
        bool inapplicable = false;
        try {
            check_mistake_bound(coarse, instance.dataset, 1);
        } catch (const TheoremPreconditionError&) {
            inapplicable = true;
        }
        report.items.push_back(ValidationItem{"theorem1 precondition gate (delta >= gamma)",
                                              inapplicable,
                                              "coarse lattice rejected as inapplicable"});
        log_item(log, report.items.back());
    }
    {
        bool all = true;
        std::string failure;
        for (std::uint64_t i = 0; i < 20 && all; ++i) {
            const TheoremInstance instance = equivalence_instance(i);
            PerceptronConfig config;
            config.shuffle_seed = i;
            const EquivalenceReport r =
                check_perceptron_equivalence(*instance.scheme, instance.dataset, config);
            if (!r.identical) {
                all = false;
                failure = "instance " + std::to_string(i) + ": " + r.detail;
            }
        }
        report.items.push_back(ValidationItem{"theorem2 lattice equivalence (20 instances)", all,
                                              all ? "quantized == full-precision traces" : failure});
        log_item(log, report.items.back());
    }
    {
        bool all = true;
        std::string failure;
        for (std::uint64_t i = 0; i < 6 && all; ++i) {
            const TheoremInstance instance = fw_corollary_instance(i, 0.1);
            const FwMarginReport r = check_fw_margin(*instance.scheme, instance.dataset, 0.1);
            if (!r.holds || !r.corollary1_holds || !*r.corollary1_holds) {
                all = false;
                std::snprintf(detail, sizeof detail,
                              "instance %llu: margin %.4f vs rhs %.4f (gamma %.4f)",
                              static_cast<unsigned long long>(i), r.achieved_margin, r.bound_rhs,
                              r.gamma_hat);
                failure = detail;
            }
        }
        report.items.push_back(ValidationItem{"theorem3 + corollary1 margin (6 instances)", all,
                                              all ? "margin > gamma - eps" : failure});
        log_item(log, report.items.back());
    }
    {
        // a huge-range lattice around tiny data: corners absorb training
        const RegularLattice lattice(2, 5, -100.0, 100.0);
        std::vector<Example> examples{{Vec{1.0, 0.5}, Label::positive},
                                      {Vec{-1.0, -0.5}, Label::negative}};
        const LabeledDataset tiny("sink-check", 2, std::move(examples));
        const SinkReport sinks = detect_sinks(lattice, tiny);
        report.items.push_back(ValidationItem{
            "sink detection on an oversized lattice", !sinks.sinks.empty(),
            std::to_string(sinks.sinks.size()) + " sink atoms among " +
                std::to_string(sinks.candidates_examined) + " candidates"});
        log_item(log, report.items.back());
    }
    return report;
}

}  // namespace qlearn
