#include "qlearn/learners.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

namespace qlearn {

Label predict(const Vec& weights, const Vec& x) {
    return dot(weights, x) >= 0.0 ? Label::positive : Label::negative;
}

double training_accuracy(const TrainedModel& model, const LabeledDataset& dataset) {
    std::size_t correct = 0;
    for (const Example& e : dataset.examples())
        if (predict(model.weights, e.x) == e.y) ++correct;
    return 100.0 * static_cast<double>(correct) / static_cast<double>(dataset.size());
}

namespace {

bool is_mistake(double score, MistakeRule rule) {
    return rule == MistakeRule::strict ? score < 0.0 : score <= 0.0;
}

void validate_perceptron_config(const PerceptronConfig& config) {
    if (config.epochs < 1) throw std::invalid_argument("perceptron: epochs must be >= 1");
    if (!(config.learning_rate > 0.0)) throw std::invalid_argument("perceptron: learning rate must be > 0");
}

// One loop for both Perceptron variants so traversal, shuffling and mistake
// decisions are shared verbatim; only the update step differs.
template <typename Policy>
TrainedModel run_perceptron(Policy& policy, const LabeledDataset& dataset, const PerceptronConfig& config) {
    validate_perceptron_config(config);
    TrainedModel model;
    std::mt19937_64 rng(config.shuffle_seed);
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::uint64_t visit = 0;
    for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        std::uint64_t epoch_mistakes = 0;
        for (std::size_t idx : order) {
            const Example& e = dataset[idx];
            const Vec& w = policy.weights();
            const double score = label_sign(e.y) * dot(w, e.x);
            if (is_mistake(score, config.mistake_rule)) {
                const double norm_before = norm(w);
                const double update_error = policy.update(config.learning_rate, e.y, e.x);
                ++model.mistake_count;
                ++epoch_mistakes;
                model.trace.push_back(TraceRecord{visit, model.mistake_count, norm(policy.weights()),
                                                  norm_before > 0.0 ? score / norm_before : 0.0,
                                                  update_error});
            }
            ++visit;
        }
        // a mistake-free epoch means every later pass is mistake-free too
        if (epoch_mistakes == 0) break;
    }

    model.update_count = model.mistake_count;
    policy.finish(model);
    std::size_t correct = 0;
    for (const Example& e : dataset.examples())
        if (predict(model.weights, e.x) == e.y) ++correct;
    model.converged = correct == dataset.size();
    return model;
}

struct QuantizedPerceptronPolicy {
    const QuantizationScheme& scheme;
    Atom w;

    const Vec& weights() const { return w.restoration; }

    double update(double lr, Label y, const Vec& x) {
        const Vec target = axpy(w.restoration, lr * label_sign(y), x);
        w = scheme.quantize(target);
        return std::sqrt(squared_distance(w.restoration, target));
    }

    void finish(TrainedModel& model) const {
        model.weight_atom = w;
        model.weights = w.restoration;
    }
};

struct ExactPerceptronPolicy {
    Vec w;

    const Vec& weights() const { return w; }

    double update(double lr, Label y, const Vec& x) {
        w = axpy(w, lr * label_sign(y), x);
        return 0.0;
    }

    void finish(TrainedModel& model) const { model.weights = w; }
};

std::size_t minimal_norm_positive(const LabeledDataset& dataset) {
    std::size_t best = dataset.size();
    double best_norm = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (dataset[i].y != Label::positive) continue;
        const double n = norm(dataset[i].x);
        if (n < best_norm) {
            best_norm = n;
            best = i;
        }
    }
    if (best == dataset.size())
        throw std::invalid_argument("frank-wolfe: dataset has no positive example");
    return best;
}

void validate_fw_config(const FrankWolfeConfig& config) {
    if (config.max_steps < 1) throw std::invalid_argument("frank-wolfe: max_steps must be >= 1");
    if (!(config.epsilon > 0.0)) throw std::invalid_argument("frank-wolfe: epsilon must be > 0");
}

template <typename Policy>
TrainedModel run_frank_wolfe(Policy& policy, const LabeledDataset& dataset, const FrankWolfeConfig& config) {
    validate_fw_config(config);
    TrainedModel model;
    model.best_margin = -std::numeric_limits<double>::infinity();

    for (std::uint64_t t = 0; t < config.max_steps; ++t) {
        const Vec& w = policy.weights();
        const double w_norm = norm(w);
        if (w_norm == 0.0)
            throw DegenerateWeightsError("frank-wolfe: weights vanished at step " + std::to_string(t));

        // worst-margin example; ties keep the smallest index
        std::size_t worst = 0;
        double worst_score = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < dataset.size(); ++j) {
            const double s = label_sign(dataset[j].y) * dot(w, dataset[j].x);
            if (s < worst_score) {
                worst_score = s;
                worst = j;
            }
        }
        const double margin = worst_score / w_norm;
        const double gap = w_norm - margin;
        if (margin > model.best_margin) {
            model.best_margin = margin;
            policy.record_best(model);
        }
        if (config.stop_when_gap_below && gap <= *config.stop_when_gap_below) {
            model.converged = true;
            break;
        }

        const Example& e = dataset[worst];
        const Vec a = scale(e.x, label_sign(e.y));
        const double alpha = line_search_alpha(a, w);
        const double update_error = policy.update(alpha, a);
        ++model.update_count;
        model.trace.push_back(
            TraceRecord{t, model.update_count, norm(policy.weights()), gap, update_error});
    }

    policy.finish(model);
    if (!model.converged) {
        // converged means the final gap reached the configured slack
        const double final_norm = norm(model.weights);
        if (final_norm > 0.0) {
            double worst_score = std::numeric_limits<double>::infinity();
            for (const Example& e : dataset.examples())
                worst_score = std::min(worst_score, label_sign(e.y) * dot(model.weights, e.x));
            const double margin = worst_score / final_norm;
            if (margin > model.best_margin) {
                model.best_margin = margin;
                policy.record_best(model);
            }
            model.converged = final_norm - margin <= config.epsilon;
        }
    }
    return model;
}

struct QuantizedFrankWolfePolicy {
    const QuantizationScheme& scheme;
    Atom w;

    const Vec& weights() const { return w.restoration; }

    double update(double alpha, const Vec& a) {
        // two inner quantizations, one outer, exactly as the update is defined
        const Atom scaled_example = scheme.quantize(scale(a, alpha));
        const Atom scaled_weights = scheme.quantize(scale(w.restoration, 1.0 - alpha));
        const Vec ideal = axpy(scale(w.restoration, 1.0 - alpha), alpha, a);
        w = scheme.quantize(add(scaled_example.restoration, scaled_weights.restoration));
        return std::sqrt(squared_distance(w.restoration, ideal));
    }

    void record_best(TrainedModel& model) const {
        model.best_margin_weights = w.restoration;
        model.best_margin_atom = w;
    }

    void finish(TrainedModel& model) const {
        model.weight_atom = w;
        model.weights = w.restoration;
    }
};

struct ExactFrankWolfePolicy {
    Vec w;

    const Vec& weights() const { return w; }

    double update(double alpha, const Vec& a) {
        w = axpy(scale(w, 1.0 - alpha), alpha, a);
        return 0.0;
    }

    void record_best(TrainedModel& model) const { model.best_margin_weights = w; }

    void finish(TrainedModel& model) const { model.weights = w; }
};

void require_matching_dimension(const QuantizationScheme& scheme, const LabeledDataset& dataset) {
    if (scheme.dimension() != dataset.dimension())
        throw std::invalid_argument("scheme dimension " + std::to_string(scheme.dimension()) +
                                    " != dataset dimension " + std::to_string(dataset.dimension()));
}

}  // namespace

TrainedModel quantized_perceptron(const QuantizationScheme& scheme, const LabeledDataset& dataset,
                                  const PerceptronConfig& config) {
    require_matching_dimension(scheme, dataset);
    QuantizedPerceptronPolicy policy{scheme, scheme.quantize(Vec(scheme.dimension(), 0.0))};
    return run_perceptron(policy, dataset, config);
}

TrainedModel full_precision_perceptron(const LabeledDataset& dataset, const PerceptronConfig& config) {
    ExactPerceptronPolicy policy{Vec(dataset.dimension(), 0.0)};
    return run_perceptron(policy, dataset, config);
}

TrainedModel quantized_frank_wolfe(const QuantizationScheme& scheme, const LabeledDataset& dataset,
                                   const FrankWolfeConfig& config) {
    require_matching_dimension(scheme, dataset);
    const std::size_t seed_index = minimal_norm_positive(dataset);
    QuantizedFrankWolfePolicy policy{scheme, scheme.quantize(dataset[seed_index].x)};
    return run_frank_wolfe(policy, dataset, config);
}

TrainedModel full_precision_frank_wolfe(const LabeledDataset& dataset, const FrankWolfeConfig& config) {
    const std::size_t seed_index = minimal_norm_positive(dataset);
    ExactFrankWolfePolicy policy{dataset[seed_index].x};
    return run_frank_wolfe(policy, dataset, config);
}

std::uint64_t suggested_fw_steps(double gamma, double delta, double epsilon) {
    if (!(gamma > 0.0) || !(delta > 0.0) || !(epsilon > 0.0))
        throw std::invalid_argument("suggested_fw_steps: gamma, delta, epsilon must be > 0");
    const double steps = std::log(1.0 / epsilon) / std::sqrt(gamma * delta) + 1.0 / (epsilon * gamma);
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(steps)));
}

double line_search_alpha(const Vec& a, const Vec& b) {
    const double denom = squared_distance(a, b);
    if (denom == 0.0) return 0.0;  // any alpha lands on the same point
    double alpha = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) alpha += b[k] * (b[k] - a[k]);
    return std::clamp(alpha / denom, 0.0, 1.0);
}

double normalized_margin(const Vec& weights, const LabeledDataset& dataset) {
    const double n = norm(weights);
    if (n == 0.0) throw DegenerateWeightsError("normalized_margin: zero weights");
    double worst = std::numeric_limits<double>::infinity();
    for (const Example& e : dataset.examples())
        worst = std::min(worst, label_sign(e.y) * dot(weights, e.x));
    return worst / n;
}

void write_trace_csv(std::ostream& out, const TrainedModel& model) {
    out << "step,mistakes,norm,margin_gap\n";
    char row[128];
    for (const TraceRecord& r : model.trace) {
        std::snprintf(row, sizeof row, "%llu,%llu,%.17g,%.17g\n",
                      static_cast<unsigned long long>(r.step),
                      static_cast<unsigned long long>(r.mistakes), r.weight_norm, r.margin_gap);
        out << row;
    }
}

bool traces_identical(const TrainedModel& a, const TrainedModel& b) {
    if (a.mistake_count != b.mistake_count || a.trace.size() != b.trace.size()) return false;
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        if (a.trace[i].step != b.trace[i].step || a.trace[i].mistakes != b.trace[i].mistakes ||
            a.trace[i].weight_norm != b.trace[i].weight_norm)
            return false;
    }
    return a.weights == b.weights;
}

}  // namespace qlearn
