#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qlearn/lattices.hpp"
#include "qlearn/learners.hpp"

namespace qlearn {

struct IncidenceReport {
    std::size_t dimension = 0;
    std::uint64_t atom_count = 0;
    Vec normal;
    std::uint64_t incident_cells = 0;
    double predicted_scaling = 0.0;  // m^(1 - 1/d)
};

// Exact count of Voronoi cells of the grid whose closed box intersects the
// hyperplane through the origin with the given normal. The lattice domain
// must be a cube centered at the origin.
IncidenceReport count_separator_incidence(const RegularLattice& lattice, const Vec& normal);

struct IncidencePoint {
    std::uint32_t points_per_dim = 0;
    std::uint64_t atom_count = 0;
    double mean_incident_cells = 0.0;
};

struct IncidenceScaling {
    std::vector<IncidencePoint> points;
    double slope = 0.0;  // log(mean count) regressed on log(m)
};

// Sweeps grid resolutions with one shared set of seeded random separators and
// fits the log-log scaling exponent (theory: 1 - 1/d).
IncidenceScaling incidence_scaling(std::size_t dimension, const std::vector<std::uint32_t>& grid_sizes,
                                   std::size_t normals_per_size, std::uint64_t seed);

enum class MarginMethod { frank_wolfe, direction_search };

struct MarginEstimate {
    double gamma_hat = 0.0;
    MarginMethod method = MarginMethod::frank_wolfe;
    std::uint64_t steps_used = 0;
    bool separable = false;  // gamma_hat > 0
};

// Lower-bound margin certificate from full-precision Frank-Wolfe.
MarginEstimate estimate_margin(const LabeledDataset& dataset, std::uint64_t budget);

// Brute-force oracle: best margin over seeded random unit directions with
// local refinement. Intended for cross-checks at low dimension.
MarginEstimate estimate_margin_direction_search(const LabeledDataset& dataset, std::uint64_t directions,
                                                std::uint64_t seed);

struct MistakeBoundReport {
    double gamma_hat = 0.0;
    double delta = 0.0;
    double bound = 0.0;  // 1/(gamma - delta)^2
    std::uint32_t runs = 0;
    std::uint64_t max_mistakes = 0;
    bool all_separated = false;
    bool holds = false;
};

// Trains over seeded shuffles until separation and asserts the mistake bound
// on every run. Throws TheoremPreconditionError when the theorem does not
// apply (delta >= gamma, norms above 1, domain too small, no zero atom).
MistakeBoundReport check_mistake_bound(const QuantizationScheme& scheme, const LabeledDataset& dataset,
                                       std::uint32_t runs, std::uint64_t margin_budget = 100'000);

struct FwMarginReport {
    double gamma_hat = 0.0;
    double delta = 0.0;
    double epsilon = 0.0;
    std::uint64_t steps = 0;
    double bound_rhs = 0.0;  // gamma - sqrt(24 delta / gamma) - epsilon
    double achieved_margin = 0.0;
    bool holds = false;
    bool vacuous = false;  // bound_rhs <= 0: any positive margin satisfies it
    std::optional<bool> corollary1_holds;  // engaged when delta <= eps^2 gamma
    std::optional<bool> corollary2_holds;  // engaged when delta <= eps^2 gamma^3
};

FwMarginReport check_fw_margin(const QuantizationScheme& scheme, const LabeledDataset& dataset,
                               double epsilon, std::uint64_t margin_budget = 100'000);

struct SinkOptions {
    std::optional<std::vector<Atom>> candidates;  // default: all atoms or corners
    std::uint32_t absorption_runs = 0;            // seeded runs to measure absorption
    PerceptronConfig run_config;
    std::uint64_t enumeration_limit = 1'000'000;
};

struct SinkReport {
    std::vector<Atom> sinks;
    std::uint64_t candidates_examined = 0;
    std::optional<double> absorbed_fraction;
    std::string scheme_descriptor;
};

// An atom is a sink when every single-example update snaps back to it:
// q(r(a) + y r(x)) == a for all (x, y) in the dataset.
SinkReport detect_sinks(const QuantizationScheme& scheme, const LabeledDataset& dataset,
                        const SinkOptions& options = {});
bool is_sink(const QuantizationScheme& scheme, const LabeledDataset& dataset, const Atom& atom);

struct EquivalenceReport {
    bool identical = false;
    std::uint64_t quantized_mistakes = 0;
    std::uint64_t exact_mistakes = 0;
    std::string detail;
};

// Lattice-equivalence check: on an integer-style grid the quantized and
// full-precision Perceptron must produce bitwise-identical traces.
EquivalenceReport check_perceptron_equivalence(const QuantizationScheme& scheme,
                                               const LabeledDataset& dataset,
                                               const PerceptronConfig& config);

}  // namespace qlearn
