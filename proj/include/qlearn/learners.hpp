#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "qlearn/scheme.hpp"

namespace qlearn {

// strict flags a mistake on y<w,x> < 0; lenient also updates on exact zero.
// A zero-initialized run never updates under the strict rule, so lenient is
// the default.
enum class MistakeRule { strict, lenient };

struct PerceptronConfig {
    std::uint32_t epochs = 3;
    double learning_rate = 1.0;
    std::uint64_t shuffle_seed = 0;
    MistakeRule mistake_rule = MistakeRule::lenient;
};

struct FrankWolfeConfig {
    std::uint64_t max_steps = 1000;
    double epsilon = 0.1;
    std::optional<double> stop_when_gap_below;
};

// One row per event. Perceptron records a row per update with step = global
// example-visit index and margin_gap = the violated normalized score;
// Frank-Wolfe records a row per iteration with margin_gap = g_t.
// update_error is ||r(w_{t+1}) - (ideal unquantized update)||.
struct TraceRecord {
    std::uint64_t step = 0;
    std::uint64_t mistakes = 0;
    double weight_norm = 0.0;
    double margin_gap = 0.0;
    double update_error = 0.0;
};

struct TrainedModel {
    std::optional<Atom> weight_atom;  // engaged for the quantized learners
    Vec weights;                      // r(weight_atom) or the raw weights
    std::vector<TraceRecord> trace;
    bool converged = false;
    std::uint64_t mistake_count = 0;
    std::uint64_t update_count = 0;
    // Frank-Wolfe diagnostics: the best normalized margin seen across the
    // trajectory and the weights achieving it (margin certificates are what
    // estimate_margin reports).
    double best_margin = 0.0;
    Vec best_margin_weights;
    std::optional<Atom> best_margin_atom;
};

// sign(<w, x>) with ties predicting +1.
Label predict(const Vec& weights, const Vec& x);
double training_accuracy(const TrainedModel& model, const LabeledDataset& dataset);

// Perceptron over the atoms: on a mistake, w <- q(r(w) + lr * y * r(x)).
// Quantization is applied exactly once per mistake; examples are assumed to
// be representable already (quantize the dataset first if they are not).
// Weights start at q(0), the zero atom whenever the scheme has one.
TrainedModel quantized_perceptron(const QuantizationScheme& scheme, const LabeledDataset& dataset,
                                  const PerceptronConfig& config);

// Identical loop without quantization; the equivalence oracle.
TrainedModel full_precision_perceptron(const LabeledDataset& dataset, const PerceptronConfig& config);

// Frank-Wolfe over the atoms. Starts from the minimal-norm positive example,
// picks the worst-margin example each step, line-searches alpha exactly and
// applies w <- q( r[q(alpha y x)] + r[q((1-alpha) r(w))] ).
TrainedModel quantized_frank_wolfe(const QuantizationScheme& scheme, const LabeledDataset& dataset,
                                   const FrankWolfeConfig& config);

TrainedModel full_precision_frank_wolfe(const LabeledDataset& dataset, const FrankWolfeConfig& config);

// Step budget suggested by the convergence bound with unit constants:
// ceil(log(1/eps)/sqrt(gamma*delta) + 1/(eps*gamma)). Requires delta > 0.
std::uint64_t suggested_fw_steps(double gamma, double delta, double epsilon);

// Exact minimizer of ||a*alpha + (1-alpha)*b|| over alpha in [0,1].
double line_search_alpha(const Vec& a, const Vec& b);

// min_j y_j <x_j, w/||w||>; throws DegenerateWeightsError when w == 0.
double normalized_margin(const Vec& weights, const LabeledDataset& dataset);

// step,mistakes,norm,margin_gap (one row per trace record).
void write_trace_csv(std::ostream& out, const TrainedModel& model);

// Same visit sequence, same mistake steps, bitwise-equal weight norms and
// final weights. The Perceptron lattice-equivalence checks compare with this.
bool traces_identical(const TrainedModel& a, const TrainedModel& b);

}  // namespace qlearn
