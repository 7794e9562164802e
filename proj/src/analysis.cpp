#include "qlearn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace qlearn {

// ---------------------------------------------------------------------------
// Lemma-style incidence counting

IncidenceReport count_separator_incidence(const RegularLattice& lattice, const Vec& normal) {
    if (normal.size() != lattice.dimension())
        throw std::invalid_argument("incidence: normal dimension mismatch");
    if (std::all_of(normal.begin(), normal.end(), [](double c) { return c == 0.0; }))
        throw std::invalid_argument("incidence: zero normal");
    if (lattice.lo() != -lattice.hi())
        throw std::invalid_argument("incidence: lattice domain must be a cube centered at the origin");

    const std::size_t d = lattice.dimension();
    const std::uint32_t n = lattice.points_per_dim();

    // Voronoi cell boundaries per dimension: midpoints, outer cells clipped to M.
    std::vector<double> bounds(n + 1);
    bounds[0] = lattice.lo();
    bounds[n] = lattice.hi();
    for (std::uint32_t i = 1; i < n; ++i)
        bounds[i] = 0.5 * (lattice.scalar_at(i - 1) + lattice.scalar_at(i));

    // Per dimension k and cell index i, the min/max of normal_k * x over the cell.
    std::vector<std::vector<double>> cell_min(d, std::vector<double>(n));
    std::vector<std::vector<double>> cell_max(d, std::vector<double>(n));
    for (std::size_t k = 0; k < d; ++k) {
        for (std::uint32_t i = 0; i < n; ++i) {
            const double a = normal[k] * bounds[i];
            const double b = normal[k] * bounds[i + 1];
            cell_min[k][i] = std::min(a, b);
            cell_max[k][i] = std::max(a, b);
        }
    }

    // Suffix extremes allow pruning whole subtrees that cannot straddle zero.
    std::vector<double> suffix_min(d + 1, 0.0), suffix_max(d + 1, 0.0);
    for (std::size_t k = d; k-- > 0;) {
        suffix_min[k] = suffix_min[k + 1] + *std::min_element(cell_min[k].begin(), cell_min[k].end());
        suffix_max[k] = suffix_max[k + 1] + *std::max_element(cell_max[k].begin(), cell_max[k].end());
    }

    std::uint64_t count = 0;
    auto recurse = [&](auto&& self, std::size_t k, double prefix_min, double prefix_max) -> void {
        if (prefix_min + suffix_min[k] > 0.0 || prefix_max + suffix_max[k] < 0.0) return;
        if (k == d) {
            ++count;
            return;
        }
        for (std::uint32_t i = 0; i < n; ++i)
            self(self, k + 1, prefix_min + cell_min[k][i], prefix_max + cell_max[k][i]);
    };
    recurse(recurse, 0, 0.0, 0.0);

    const auto m = lattice.atom_count();
    if (!m) throw std::invalid_argument("incidence: atom count exceeds 64 bits");
    return IncidenceReport{d, *m, normal, count,
                           std::pow(static_cast<double>(*m), 1.0 - 1.0 / static_cast<double>(d))};
}

namespace {

Vec random_unit(std::size_t dimension, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec v(dimension);
    double n = 0.0;
    do {
        for (double& c : v) c = gauss(rng);
        n = norm(v);
    } while (n < 1e-6);
    return scale(v, 1.0 / n);
}

}  // namespace

IncidenceScaling incidence_scaling(std::size_t dimension, const std::vector<std::uint32_t>& grid_sizes,
                                   std::size_t normals_per_size, std::uint64_t seed) {
    if (grid_sizes.size() < 2) throw std::invalid_argument("incidence scaling: need >= 2 grid sizes");
    if (normals_per_size < 1) throw std::invalid_argument("incidence scaling: need >= 1 normal");

    // One shared separator family keeps the direction-dependent constant fixed
    // across resolutions, isolating the scaling exponent.
    std::mt19937_64 rng(seed);
    std::vector<Vec> normals;
    normals.reserve(normals_per_size);
    for (std::size_t i = 0; i < normals_per_size; ++i) normals.push_back(random_unit(dimension, rng));

    IncidenceScaling result;
    for (std::uint32_t n : grid_sizes) {
        const RegularLattice lattice(dimension, n, -0.5, 0.5);
        double total = 0.0;
        std::uint64_t m = 0;
        for (const Vec& normal : normals) {
            const IncidenceReport report = count_separator_incidence(lattice, normal);
            total += static_cast<double>(report.incident_cells);
            m = report.atom_count;
        }
        result.points.push_back(IncidencePoint{n, m, total / static_cast<double>(normals_per_size)});
    }

    double sx = 0.0, sy = 0.0;
    for (const IncidencePoint& p : result.points) {
        sx += std::log(static_cast<double>(p.atom_count));
        sy += std::log(p.mean_incident_cells);
    }
    const double mean_x = sx / static_cast<double>(result.points.size());
    const double mean_y = sy / static_cast<double>(result.points.size());
    double cov = 0.0, var = 0.0;
    for (const IncidencePoint& p : result.points) {
        const double dx = std::log(static_cast<double>(p.atom_count)) - mean_x;
        const double dy = std::log(p.mean_incident_cells) - mean_y;
        cov += dx * dy;
        var += dx * dx;
    }
    result.slope = cov / var;
    return result;
}

// ---------------------------------------------------------------------------
// Margin estimation

MarginEstimate estimate_margin(const LabeledDataset& dataset, std::uint64_t budget) {
    if (!dataset.has_both_labels())
        throw std::invalid_argument("estimate_margin: both labels must be present");
    FrankWolfeConfig config;
    config.max_steps = std::max<std::uint64_t>(budget, 1);
    config.epsilon = 1e-9;
    MarginEstimate estimate;
    estimate.method = MarginMethod::frank_wolfe;
    estimate.steps_used = config.max_steps;
    try {
        const TrainedModel model = full_precision_frank_wolfe(dataset, config);
        estimate.gamma_hat = model.best_margin;
    } catch (const DegenerateWeightsError&) {
        // the zero vector entered the convex hull: certified non-separable
        estimate.gamma_hat = 0.0;
    }
    estimate.separable = estimate.gamma_hat > 0.0;
    return estimate;
}

MarginEstimate estimate_margin_direction_search(const LabeledDataset& dataset, std::uint64_t directions,
                                                std::uint64_t seed) {
    if (!dataset.has_both_labels())
        throw std::invalid_argument("estimate_margin: both labels must be present");
    if (directions < 1) throw std::invalid_argument("estimate_margin: need >= 1 direction");
    std::mt19937_64 rng(seed);
    auto dataset_margin = [&](const Vec& w) {
        double worst = std::numeric_limits<double>::infinity();
        for (const Example& e : dataset.examples())
            worst = std::min(worst, label_sign(e.y) * dot(w, e.x));
        return worst;
    };

    Vec best_dir = random_unit(dataset.dimension(), rng);
    double best = dataset_margin(best_dir);
    for (std::uint64_t i = 1; i < directions; ++i) {
        const Vec w = random_unit(dataset.dimension(), rng);
        const double m = dataset_margin(w);
        if (m > best) {
            best = m;
            best_dir = w;
        }
    }
    // local refinement sharpens the best direction
    std::normal_distribution<double> gauss(0.0, 1.0);
    double sigma = 0.1;
    for (int round = 0; round < 12; ++round, sigma *= 0.5) {
        for (int trial = 0; trial < 200; ++trial) {
            Vec w = best_dir;
            for (double& c : w) c += sigma * gauss(rng);
            const double n = norm(w);
            if (n == 0.0) continue;
            w = scale(w, 1.0 / n);
            const double m = dataset_margin(w);
            if (m > best) {
                best = m;
                best_dir = w;
            }
        }
    }
    MarginEstimate estimate;
    estimate.gamma_hat = best;
    estimate.method = MarginMethod::direction_search;
    estimate.steps_used = directions;
    estimate.separable = best > 0.0;
    return estimate;
}

// ---------------------------------------------------------------------------
// Theorem checks

MistakeBoundReport check_mistake_bound(const QuantizationScheme& scheme, const LabeledDataset& dataset,
                                       std::uint32_t runs, std::uint64_t margin_budget) {
    if (runs < 1) throw std::invalid_argument("check_mistake_bound: runs must be >= 1");
    const LabeledDataset quantized = quantize_dataset(scheme, dataset);

    const double delta = scheme.delta();
    const MarginEstimate margin = estimate_margin(quantized, margin_budget);
    if (!margin.separable)
        throw TheoremPreconditionError("mistake bound: dataset not certified separable");
    const double gamma = margin.gamma_hat;
    if (delta >= gamma)
        throw TheoremPreconditionError("mistake bound: delta " + std::to_string(delta) +
                                       " >= gamma " + std::to_string(gamma));
    if (quantized.max_example_norm() > 1.0)
        throw TheoremPreconditionError("mistake bound: an example has norm > 1");
    const double radius = 1.0 / (gamma - delta);
    if (!scheme.domain().contains_origin_ball(radius))
        throw TheoremPreconditionError("mistake bound: domain lacks the radius-" +
                                       std::to_string(radius) + " ball");
    if (!scheme.zero_atom())
        throw TheoremPreconditionError("mistake bound: scheme has no exact zero atom for w_0");

    MistakeBoundReport report;
    report.gamma_hat = gamma;
    report.delta = delta;
    report.bound = 1.0 / ((gamma - delta) * (gamma - delta));
    report.runs = runs;
    report.all_separated = true;

    const auto epoch_cap = static_cast<std::uint32_t>(
        std::min<double>(std::ceil(report.bound) + 2.0, 100'000.0));
    for (std::uint32_t run = 0; run < runs; ++run) {
        PerceptronConfig config;
        config.epochs = epoch_cap;
        config.shuffle_seed = run;
        const TrainedModel model = quantized_perceptron(scheme, quantized, config);
        report.max_mistakes = std::max(report.max_mistakes, model.mistake_count);
        if (!model.converged) report.all_separated = false;
    }
    report.holds = report.all_separated && static_cast<double>(report.max_mistakes) <= report.bound;
    return report;
}

FwMarginReport check_fw_margin(const QuantizationScheme& scheme, const LabeledDataset& dataset,
                               double epsilon, std::uint64_t margin_budget) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("check_fw_margin: epsilon must be > 0");
    const LabeledDataset quantized = quantize_dataset(scheme, dataset);

    const double delta = scheme.delta();
    const MarginEstimate margin = estimate_margin(quantized, margin_budget);
    if (!margin.separable)
        throw std::invalid_argument("check_fw_margin: dataset not certified separable");
    const double gamma = margin.gamma_hat;
    if (quantized.max_example_norm() > 1.0)
        throw TheoremPreconditionError("fw margin: an example has norm > 1");
    if (!(delta > 0.0))
        throw TheoremPreconditionError("fw margin: scheme reports delta == 0");

    FwMarginReport report;
    report.gamma_hat = gamma;
    report.delta = delta;
    report.epsilon = epsilon;
    report.steps = suggested_fw_steps(gamma, delta, epsilon);
    if (report.steps > 10'000'000)
        throw std::invalid_argument("check_fw_margin: suggested step budget is impractical (" +
                                    std::to_string(report.steps) + ")");

    FrankWolfeConfig config;
    config.max_steps = report.steps;
    config.epsilon = epsilon;
    const TrainedModel model = quantized_frank_wolfe(scheme, quantized, config);
    report.achieved_margin = normalized_margin(model.weights, quantized);
    report.bound_rhs = gamma - std::sqrt(24.0 * delta / gamma) - epsilon;
    report.vacuous = report.bound_rhs <= 0.0;
    report.holds = report.achieved_margin > report.bound_rhs;
    if (delta <= epsilon * epsilon * gamma)
        report.corollary1_holds = report.achieved_margin > gamma - epsilon;
    if (delta <= epsilon * epsilon * gamma * gamma * gamma)
        report.corollary2_holds = report.achieved_margin > (1.0 - epsilon) * gamma;
    return report;
}

// ---------------------------------------------------------------------------
// Sink atoms

bool is_sink(const QuantizationScheme& scheme, const LabeledDataset& dataset, const Atom& atom) {
    for (const Example& e : dataset.examples()) {
        const Atom next = scheme.quantize(axpy(atom.restoration, label_sign(e.y), e.x));
        if (next != atom) return false;
    }
    return true;
}

namespace {

std::vector<Atom> corner_atoms(const QuantizationScheme& scheme) {
    const auto radix = scheme.code_radix();
    if (radix.size() > 20)
        throw std::invalid_argument("detect_sinks: too many corners to enumerate; supply candidates");
    std::vector<Atom> corners;
    const std::size_t combos = std::size_t{1} << radix.size();
    corners.reserve(combos);
    for (std::size_t mask = 0; mask < combos; ++mask) {
        Code code(radix.size());
        for (std::size_t slot = 0; slot < radix.size(); ++slot)
            code[slot] = (mask >> slot) & 1 ? radix[slot] - 1 : 0;
        Atom a{code, {}};
        a.restoration = scheme.restore(a);
        corners.push_back(std::move(a));
    }
    return corners;
}

}  // namespace

SinkReport detect_sinks(const QuantizationScheme& scheme, const LabeledDataset& dataset,
                        const SinkOptions& options) {
    if (scheme.dimension() != dataset.dimension())
        throw std::invalid_argument("detect_sinks: dimension mismatch");

    std::vector<Atom> candidates;
    if (options.candidates) {
        candidates = *options.candidates;
    } else {
        const auto m = scheme.atom_count();
        if (m && *m <= options.enumeration_limit) {
            candidates.reserve(*m);
            for (std::uint64_t id = 0; id < *m; ++id) candidates.push_back(scheme.atom_at(id));
        } else {
            candidates = corner_atoms(scheme);
        }
    }

    SinkReport report;
    std::vector<TrainedModel> runs;
    for (std::uint32_t run = 0; run < options.absorption_runs; ++run) {
        PerceptronConfig config = options.run_config;
        config.shuffle_seed = options.run_config.shuffle_seed + run;
        runs.push_back(quantized_perceptron(scheme, dataset, config));
        // final weights of sample runs join the candidate pool
        candidates.push_back(*runs.back().weight_atom);
    }

    std::sort(candidates.begin(), candidates.end(),
              [](const Atom& a, const Atom& b) { return a.code < b.code; });
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    report.candidates_examined = candidates.size();
    for (const Atom& a : candidates)
        if (is_sink(scheme, dataset, a)) report.sinks.push_back(a);

    if (options.absorption_runs > 0) {
        std::size_t absorbed = 0;
        for (const TrainedModel& model : runs)
            if (is_sink(scheme, dataset, *model.weight_atom)) ++absorbed;
        report.absorbed_fraction =
            static_cast<double>(absorbed) / static_cast<double>(options.absorption_runs);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Lattice equivalence

EquivalenceReport check_perceptron_equivalence(const QuantizationScheme& scheme,
                                               const LabeledDataset& dataset,
                                               const PerceptronConfig& config) {
    const TrainedModel quantized = quantized_perceptron(scheme, dataset, config);
    const TrainedModel exact = full_precision_perceptron(dataset, config);
    EquivalenceReport report;
    report.quantized_mistakes = quantized.mistake_count;
    report.exact_mistakes = exact.mistake_count;
    report.identical = traces_identical(quantized, exact);
    if (!report.identical) {
        if (quantized.trace.size() != exact.trace.size()) {
            report.detail = "mistake counts diverge: " + std::to_string(quantized.mistake_count) +
                            " vs " + std::to_string(exact.mistake_count);
        } else {
            for (std::size_t i = 0; i < quantized.trace.size(); ++i) {
                if (quantized.trace[i].step != exact.trace[i].step ||
                    quantized.trace[i].weight_norm != exact.trace[i].weight_norm) {
                    report.detail = "first divergence at update " + std::to_string(i);
                    break;
                }
            }
            if (report.detail.empty()) report.detail = "final weights differ";
        }
    }
    return report;
}

}  // namespace qlearn
