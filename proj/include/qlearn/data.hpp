#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qlearn/lattices.hpp"
#include "qlearn/types.hpp"

namespace qlearn {

// "<label> <i1>:<v1> <i2>:<v2> ..." per line; labels +1/1 map to positive,
// -1/0 to negative; indices are 1-based and strictly increasing. The
// dimension is the largest index seen unless an override is given.
LabeledDataset parse_sparse(std::istream& in, const std::string& name,
                            std::optional<std::size_t> dimension_override = std::nullopt);
LabeledDataset load_sparse_file(const std::string& path,
                                std::optional<std::size_t> dimension_override = std::nullopt);
// Inverse of parse_sparse: zeros are skipped, values keep full precision.
void serialize_sparse(std::ostream& out, const LabeledDataset& dataset);

// Dense CSV, optional header, last column is the label.
LabeledDataset parse_dense_csv(std::istream& in, const std::string& name);
LabeledDataset load_dense_csv_file(const std::string& path);

// One atom per row, d columns.
std::vector<Vec> parse_atom_table_csv(std::istream& in);
std::vector<Vec> load_atom_table_csv(const std::string& path);

struct SyntheticSpec {
    std::size_t dimension = 2;
    std::size_t count = 100;
    double margin = 0.1;            // planted margin, in raw feature units
    double min_magnitude = 0.0;     // per-coordinate magnitude bounds
    double max_magnitude = 1.0;
    std::uint64_t seed = 0;
    double positive_fraction = 0.5;
    std::optional<Vec> normal;      // planted separator; random unit when unset
    bool verify_margin = true;      // post-hoc margin check via Frank-Wolfe
};

// Plants a random unit separator w*, samples points with y<w*, x> >= gamma
// and pins one point per side exactly onto the margin, so the dataset's true
// margin equals the planted value. Deterministic per seed.
LabeledDataset generate_synthetic(const SyntheticSpec& spec);

enum class NormalizationMode { none, scale_to_box, unit_max_norm };

struct NormalizationSpec {
    NormalizationMode mode = NormalizationMode::none;
    double box_lo = -1.0;  // scale_to_box target interval
    double box_hi = 1.0;
};

// Per-dimension affine maps x' = scale * x + offset actually applied;
// invert() restores originals to within 1e-12 relative error.
struct NormalizationRecord {
    NormalizationMode mode = NormalizationMode::none;
    Vec scales;
    Vec offsets;

    Vec apply(const Vec& x) const;
    Vec invert(const Vec& x) const;
    // Maps every example; labels and name are preserved.
    LabeledDataset apply(const LabeledDataset& dataset) const;
};

struct NormalizedDataset {
    LabeledDataset dataset;
    NormalizationRecord record;
};

NormalizedDataset normalize(const LabeledDataset& dataset, const NormalizationSpec& spec);

struct SplitDataset {
    LabeledDataset train;
    LabeledDataset test;
};

// Seeded shuffle then split; train_count examples go to the training side.
SplitDataset seeded_split(const LabeledDataset& dataset, std::size_t train_count, std::uint64_t seed);

struct KMeansResult {
    std::vector<Vec> centers;
    std::vector<std::uint32_t> assignments;
    std::vector<double> objective_history;  // within-cluster sum of squares per iteration
    std::uint32_t iterations = 0;
};

// Seeded k-means++ initialization, Lloyd iterations until assignments are
// stable or max_iterations; empty clusters restart at the farthest point.
KMeansResult kmeans(const std::vector<Vec>& points, std::uint32_t k, std::uint64_t seed,
                    std::uint32_t max_iterations = 100);

struct ClusterLatticeOptions {
    std::uint32_t k_per_class = 1;
    std::uint64_t seed = 0;
    double halo = 1.0;
    std::uint64_t delta_samples = LookupLattice::kDefaultDeltaSamples;
};

// Clusters each class separately and uses the union of centers as atoms.
// k larger than a class is clamped to the class size; the clamp is reported
// through `warnings` when given.
LookupLattice build_cluster_lattice(const LabeledDataset& dataset, const ClusterLatticeOptions& options,
                                    std::vector<std::string>* warnings = nullptr);

}  // namespace qlearn
