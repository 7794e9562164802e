#include "qlearn/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "qlearn/learners.hpp"

namespace qlearn {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream stream(s);
    while (std::getline(stream, field, sep)) out.push_back(field);
    return out;
}

double parse_number(const std::string& token, std::size_t line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(token, &pos);
        if (pos != token.size()) throw ParseError("trailing characters in number '" + token + "'", line);
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("cannot parse number '" + token + "'", line);
    }
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    return in;
}

}  // namespace

LabeledDataset parse_sparse(std::istream& in, const std::string& name,
                            std::optional<std::size_t> dimension_override) {
    struct SparseRow {
        Label y;
        std::vector<std::pair<std::size_t, double>> entries;  // 0-based
    };
    std::vector<SparseRow> rows;
    std::size_t max_index = 0;  // 1-based max seen
    std::size_t line_number = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_number;
        line = trim(line);
        if (line.empty()) continue;
        std::istringstream tokens(line);
        std::string token;
        tokens >> token;
        SparseRow row;
        try {
            row.y = label_from_value(parse_number(token, line_number));
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), line_number);
        }
        std::size_t previous_index = 0;
        while (tokens >> token) {
            const auto colon = token.find(':');
            if (colon == std::string::npos || colon == 0 || colon + 1 == token.size())
                throw ParseError("expected index:value, got '" + token + "'", line_number);
            const double raw_index = parse_number(token.substr(0, colon), line_number);
            if (raw_index < 1 || raw_index != std::floor(raw_index))
                throw ParseError("feature index must be a positive integer, got '" +
                                     token.substr(0, colon) + "'",
                                 line_number);
            const auto index = static_cast<std::size_t>(raw_index);
            if (index <= previous_index)
                throw ParseError("feature indices must be strictly increasing", line_number);
            const double value = parse_number(token.substr(colon + 1), line_number);
            if (!std::isfinite(value)) throw ParseError("non-finite feature value", line_number);
            row.entries.emplace_back(index - 1, value);
            previous_index = index;
        }
        max_index = std::max(max_index, previous_index);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("no examples found", line_number);
    const std::size_t dimension = dimension_override.value_or(std::max<std::size_t>(max_index, 1));
    if (max_index > dimension)
        throw ParseError("feature index " + std::to_string(max_index) +
                             " exceeds declared dimension " + std::to_string(dimension),
                         line_number);
    std::vector<Example> examples;
    examples.reserve(rows.size());
    for (SparseRow& row : rows) {
        Vec x(dimension, 0.0);
        for (const auto& [idx, value] : row.entries) x[idx] = value;
        examples.push_back(Example{std::move(x), row.y});
    }
    return LabeledDataset(name, dimension, std::move(examples));
}

LabeledDataset load_sparse_file(const std::string& path, std::optional<std::size_t> dimension_override) {
    auto in = open_or_throw(path);
    std::string name = path;
    const auto slash = name.find_last_of('/');
    if (slash != std::string::npos) name = name.substr(slash + 1);
    return parse_sparse(in, name, dimension_override);
}

void serialize_sparse(std::ostream& out, const LabeledDataset& dataset) {
    char buffer[64];
    for (const Example& e : dataset.examples()) {
        out << (e.y == Label::positive ? "+1" : "-1");
        for (std::size_t k = 0; k < e.x.size(); ++k) {
            if (e.x[k] == 0.0) continue;
            std::snprintf(buffer, sizeof buffer, " %zu:%.17g", k + 1, e.x[k]);
            out << buffer;
        }
        out << '\n';
    }
}

namespace {

// Returns std::nullopt when some field is not numeric (a header row).
std::optional<Vec> try_parse_numeric_row(const std::vector<std::string>& fields) {
    Vec values;
    values.reserve(fields.size());
    for (const std::string& f : fields) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(trim(f), &pos);
            if (pos != trim(f).size()) return std::nullopt;
            values.push_back(v);
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
    return values;
}

std::vector<Vec> parse_csv_rows(std::istream& in, std::size_t min_columns, const char* what) {
    std::vector<Vec> rows;
    std::string line;
    std::size_t line_number = 0;
    bool first_content_line = true;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const std::string content = trim(line);
        if (content.empty()) continue;
        const auto fields = split(content, ',');
        auto parsed = try_parse_numeric_row(fields);
        if (!parsed) {
            if (first_content_line) {  // header row
                first_content_line = false;
                continue;
            }
            throw ParseError(std::string("non-numeric field in ") + what, line_number);
        }
        if (parsed->size() < min_columns)
            throw ParseError(std::string(what) + " needs at least " + std::to_string(min_columns) +
                                 " columns",
                             line_number);
        if (width == 0) width = parsed->size();
        if (parsed->size() != width)
            throw ParseError("inconsistent column count (" + std::to_string(parsed->size()) + " vs " +
                                 std::to_string(width) + ")",
                             line_number);
        for (double v : *parsed)
            if (!std::isfinite(v)) throw ParseError("non-finite value", line_number);
        rows.push_back(std::move(*parsed));
        first_content_line = false;
    }
    if (rows.empty()) throw ParseError(std::string("no rows found in ") + what, line_number);
    return rows;
}

}  // namespace

LabeledDataset parse_dense_csv(std::istream& in, const std::string& name) {
    auto rows = parse_csv_rows(in, 2, "dense CSV");
    const std::size_t dimension = rows.front().size() - 1;
    std::vector<Example> examples;
    examples.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        Vec& row = rows[i];
        Label y;
        try {
            y = label_from_value(row.back());
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), i + 1);
        }
        row.pop_back();
        examples.push_back(Example{std::move(row), y});
    }
    return LabeledDataset(name, dimension, std::move(examples));
}

LabeledDataset load_dense_csv_file(const std::string& path) {
    auto in = open_or_throw(path);
    return parse_dense_csv(in, path);
}

std::vector<Vec> parse_atom_table_csv(std::istream& in) {
    return parse_csv_rows(in, 1, "atom table CSV");
}

std::vector<Vec> load_atom_table_csv(const std::string& path) {
    auto in = open_or_throw(path);
    return parse_atom_table_csv(in);
}

// ---------------------------------------------------------------------------
// Synthetic generation

namespace {

Vec random_unit_vector(std::size_t dimension, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec v(dimension);
    double n = 0.0;
    do {
        for (double& c : v) c = gauss(rng);
        n = norm(v);
    } while (n < 1e-6);
    return scale(v, 1.0 / n);
}

void verify_planted_margin(const LabeledDataset& dataset, double gamma) {
    // The true margin equals gamma by construction; Frank-Wolfe certifies it
    // from below. Doubles the budget until the certificate is tight enough.
    const double target = gamma * (1.0 - 1e-3);
    double best = -std::numeric_limits<double>::infinity();
    for (std::uint64_t budget = 4096; budget <= (1ull << 22); budget *= 4) {
        FrankWolfeConfig config;
        config.max_steps = budget;
        config.epsilon = gamma * 1e-4;
        const TrainedModel model = full_precision_frank_wolfe(dataset, config);
        best = model.best_margin;
        if (best >= target) return;
    }
    throw std::logic_error("generate_synthetic: margin verification failed (certified " +
                           std::to_string(best) + " < planted " + std::to_string(gamma) + ")");
}

}  // namespace

LabeledDataset generate_synthetic(const SyntheticSpec& spec) {
    if (spec.dimension < 1) throw std::invalid_argument("synthetic: dimension must be >= 1");
    if (spec.count < 2) throw std::invalid_argument("synthetic: need at least 2 examples");
    if (!(spec.margin > 0.0)) throw std::invalid_argument("synthetic: margin must be > 0");
    if (!(spec.max_magnitude > spec.min_magnitude) || spec.min_magnitude < 0.0)
        throw std::invalid_argument("synthetic: need 0 <= min_magnitude < max_magnitude");
    if (!(spec.margin <= 0.9 * spec.max_magnitude))
        throw std::invalid_argument("synthetic: margin too large for the magnitude bounds");
    if (spec.positive_fraction < 0.0 || spec.positive_fraction > 1.0)
        throw std::invalid_argument("synthetic: positive_fraction must be in [0, 1]");

    std::mt19937_64 rng(spec.seed);
    const Vec separator = spec.normal ? [&] {
        if (spec.normal->size() != spec.dimension)
            throw std::invalid_argument("synthetic: planted normal has the wrong dimension");
        const double n = norm(*spec.normal);
        if (n == 0.0) throw std::invalid_argument("synthetic: planted normal must be nonzero");
        return scale(*spec.normal, 1.0 / n);
    }() : random_unit_vector(spec.dimension, rng);

    std::size_t positives = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(spec.positive_fraction * static_cast<double>(spec.count))),
        1, spec.count - 1);

    // Two anchor points straddling the separator at distance exactly gamma pin
    // the dataset margin to the planted value.
    std::uniform_real_distribution<double> magnitude(spec.min_magnitude, spec.max_magnitude);
    std::uniform_int_distribution<int> coin(0, 1);
    auto sample_point = [&] {
        Vec x(spec.dimension);
        for (double& c : x) c = coin(rng) ? magnitude(rng) : -magnitude(rng);
        return x;
    };

    Vec base = sample_point();
    {
        const double along = dot(base, separator);
        base = axpy(base, -along, separator);  // project onto the separator plane
        for (std::size_t k = 0; k < base.size(); ++k) {
            const double room = spec.max_magnitude - spec.margin;
            if (std::abs(base[k]) > room) base = scale(base, room / std::abs(base[k]));
        }
    }
    const Vec offset = scale(separator, spec.margin);
    std::vector<Example> examples;
    examples.push_back(Example{add(base, offset), Label::positive});
    examples.push_back(Example{axpy(base, -1.0, offset), Label::negative});

    std::size_t need_positive = positives - 1;
    std::size_t need_negative = spec.count - positives - 1;
    std::uint64_t attempts = 0;
    const std::uint64_t max_attempts = 10'000ull * spec.count + 1'000'000ull;
    while (need_positive + need_negative > 0) {
        if (++attempts > max_attempts)
            throw std::invalid_argument("synthetic: infeasible spec, rejection sampling stalled");
        Vec x = sample_point();
        const double s = dot(separator, x);
        if (s >= spec.margin && need_positive > 0) {
            examples.push_back(Example{std::move(x), Label::positive});
            --need_positive;
        } else if (-s >= spec.margin && need_negative > 0) {
            examples.push_back(Example{std::move(x), Label::negative});
            --need_negative;
        }
    }

    for (const Example& e : examples) {
        const double s = label_sign(e.y) * dot(separator, e.x);
        if (s < spec.margin * (1.0 - 1e-12))
            throw std::logic_error("generate_synthetic: emitted point violates the planted margin");
    }

    LabeledDataset dataset("synthetic-" + std::to_string(spec.seed), spec.dimension, std::move(examples));
    if (spec.verify_margin) verify_planted_margin(dataset, spec.margin);
    return dataset;
}

// ---------------------------------------------------------------------------
// Normalization

Vec NormalizationRecord::apply(const Vec& x) const {
    Vec out(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = scales[k] * x[k] + offsets[k];
    return out;
}

Vec NormalizationRecord::invert(const Vec& x) const {
    Vec out(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = (x[k] - offsets[k]) / scales[k];
    return out;
}

LabeledDataset NormalizationRecord::apply(const LabeledDataset& dataset) const {
    std::vector<Example> examples;
    examples.reserve(dataset.size());
    for (const Example& e : dataset.examples()) examples.push_back(Example{apply(e.x), e.y});
    return LabeledDataset(dataset.name(), dataset.dimension(), std::move(examples));
}

NormalizedDataset normalize(const LabeledDataset& dataset, const NormalizationSpec& spec) {
    const std::size_t d = dataset.dimension();
    NormalizationRecord record;
    record.mode = spec.mode;
    record.scales.assign(d, 1.0);
    record.offsets.assign(d, 0.0);

    switch (spec.mode) {
        case NormalizationMode::none:
            break;
        case NormalizationMode::unit_max_norm: {
            const double max_norm = dataset.max_example_norm();
            if (max_norm == 0.0)
                throw std::invalid_argument("normalize: all-zero dataset under unit_max_norm");
            record.scales.assign(d, 1.0 / max_norm);
            break;
        }
        case NormalizationMode::scale_to_box: {
            if (!(spec.box_lo < spec.box_hi))
                throw std::invalid_argument("normalize: box requires lo < hi");
            Vec lo(d, std::numeric_limits<double>::infinity());
            Vec hi(d, -std::numeric_limits<double>::infinity());
            for (const Example& e : dataset.examples()) {
                for (std::size_t k = 0; k < d; ++k) {
                    lo[k] = std::min(lo[k], e.x[k]);
                    hi[k] = std::max(hi[k], e.x[k]);
                }
            }
            for (std::size_t k = 0; k < d; ++k) {
                if (hi[k] > lo[k]) {
                    record.scales[k] = (spec.box_hi - spec.box_lo) / (hi[k] - lo[k]);
                    record.offsets[k] = spec.box_lo - lo[k] * record.scales[k];
                } else {
                    // constant feature: shift to the box midpoint
                    record.scales[k] = 1.0;
                    record.offsets[k] = 0.5 * (spec.box_lo + spec.box_hi) - lo[k];
                }
            }
            break;
        }
    }

    std::vector<Example> examples;
    examples.reserve(dataset.size());
    for (const Example& e : dataset.examples()) examples.push_back(Example{record.apply(e.x), e.y});
    return NormalizedDataset{LabeledDataset(dataset.name(), d, std::move(examples)), std::move(record)};
}

SplitDataset seeded_split(const LabeledDataset& dataset, std::size_t train_count, std::uint64_t seed) {
    if (train_count == 0 || train_count >= dataset.size())
        throw std::invalid_argument("split: train_count must be in [1, size)");
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Example> train, test;
    train.reserve(train_count);
    test.reserve(dataset.size() - train_count);
    for (std::size_t i = 0; i < order.size(); ++i)
        (i < train_count ? train : test).push_back(dataset[order[i]]);
    return SplitDataset{LabeledDataset(dataset.name() + "/train", dataset.dimension(), std::move(train)),
                        LabeledDataset(dataset.name() + "/test", dataset.dimension(), std::move(test))};
}

// ---------------------------------------------------------------------------
// k-means and the cluster lattice

namespace {

std::uint32_t nearest_center(const Vec& point, const std::vector<Vec>& centers) {
    std::uint32_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.size(); ++c) {
        const double d2 = squared_distance(point, centers[c]);
        if (d2 < best_dist) {
            best_dist = d2;
            best = static_cast<std::uint32_t>(c);
        }
    }
    return best;
}

std::vector<Vec> kmeans_plus_plus_init(const std::vector<Vec>& points, std::uint32_t k,
                                       std::mt19937_64& rng) {
    std::vector<Vec> centers;
    centers.reserve(k);
    std::uniform_int_distribution<std::size_t> first(0, points.size() - 1);
    centers.push_back(points[first(rng)]);
    std::vector<double> dist2(points.size());
    while (centers.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const Vec& c : centers) best = std::min(best, squared_distance(points[i], c));
            dist2[i] = best;
            total += best;
        }
        if (total == 0.0) {  // all remaining mass sits on existing centers
            centers.push_back(points[first(rng)]);
            continue;
        }
        std::uniform_real_distribution<double> pick(0.0, total);
        double r = pick(rng);
        std::size_t chosen = points.size() - 1;
        for (std::size_t i = 0; i < points.size(); ++i) {
            r -= dist2[i];
            if (r <= 0.0) {
                chosen = i;
                break;
            }
        }
        centers.push_back(points[chosen]);
    }
    return centers;
}

}  // namespace

KMeansResult kmeans(const std::vector<Vec>& points, std::uint32_t k, std::uint64_t seed,
                    std::uint32_t max_iterations) {
    if (points.empty()) throw std::invalid_argument("kmeans: no points");
    if (k < 1 || k > points.size())
        throw std::invalid_argument("kmeans: k must be in [1, number of points]");
    const std::size_t d = points.front().size();
    for (const Vec& p : points)
        if (p.size() != d) throw std::invalid_argument("kmeans: points have mixed dimensions");

    std::mt19937_64 rng(seed);
    KMeansResult result;
    result.centers = kmeans_plus_plus_init(points, k, rng);
    result.assignments.assign(points.size(), 0);

    for (std::uint32_t iter = 0; iter < max_iterations; ++iter) {
        bool changed = iter == 0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const std::uint32_t c = nearest_center(points[i], result.centers);
            if (c != result.assignments[i]) {
                result.assignments[i] = c;
                changed = true;
            }
        }

        std::vector<std::size_t> sizes(k, 0);
        for (std::uint32_t a : result.assignments) ++sizes[a];
        for (std::uint32_t c = 0; c < k; ++c) {
            if (sizes[c] > 0) continue;
            // empty cluster: restart it at the point farthest from its center
            std::size_t farthest = 0;
            double worst = -1.0;
            for (std::size_t i = 0; i < points.size(); ++i) {
                if (sizes[result.assignments[i]] <= 1) continue;
                const double d2 = squared_distance(points[i], result.centers[result.assignments[i]]);
                if (d2 > worst) {
                    worst = d2;
                    farthest = i;
                }
            }
            --sizes[result.assignments[farthest]];
            result.assignments[farthest] = c;
            ++sizes[c];
            changed = true;
        }

        std::vector<Vec> means(k, Vec(d, 0.0));
        for (std::size_t i = 0; i < points.size(); ++i)
            for (std::size_t dim = 0; dim < d; ++dim) means[result.assignments[i]][dim] += points[i][dim];
        for (std::uint32_t c = 0; c < k; ++c)
            for (std::size_t dim = 0; dim < d; ++dim) means[c][dim] /= static_cast<double>(sizes[c]);
        result.centers = std::move(means);

        double objective = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i)
            objective += squared_distance(points[i], result.centers[result.assignments[i]]);
        result.objective_history.push_back(objective);
        result.iterations = iter + 1;
        if (!changed) break;
    }
    return result;
}

LookupLattice build_cluster_lattice(const LabeledDataset& dataset, const ClusterLatticeOptions& options,
                                    std::vector<std::string>* warnings) {
    if (options.k_per_class < 1) throw std::invalid_argument("cluster lattice: k_per_class must be >= 1");
    if (!dataset.has_both_labels())
        throw std::invalid_argument("cluster lattice: both classes must be present");

    std::vector<Vec> positive, negative;
    for (const Example& e : dataset.examples())
        (e.y == Label::positive ? positive : negative).push_back(e.x);

    std::mt19937_64 seeder(options.seed);
    std::vector<Vec> atoms;
    for (const auto* side : {&positive, &negative}) {
        const auto k = static_cast<std::uint32_t>(
            std::min<std::size_t>(options.k_per_class, side->size()));
        if (k < options.k_per_class && warnings)
            warnings->push_back("k_per_class clamped from " + std::to_string(options.k_per_class) +
                                " to " + std::to_string(k) + " (class has " +
                                std::to_string(side->size()) + " examples)");
        const KMeansResult clustering = kmeans(*side, k, seeder());
        atoms.insert(atoms.end(), clustering.centers.begin(), clustering.centers.end());
    }

    // distinctness is a table invariant; nudge exact duplicates apart
    for (int round = 0; round < 8; ++round) {
        std::sort(atoms.begin(), atoms.end());
        bool perturbed = false;
        for (std::size_t i = 1; i < atoms.size(); ++i) {
            while (atoms[i] == atoms[i - 1]) {
                double& c = atoms[i][0];
                const double bumped = c + 1e-9;
                c = bumped > c ? bumped : std::nextafter(c, std::numeric_limits<double>::infinity());
                perturbed = true;
            }
        }
        if (!perturbed) break;
        if (warnings) warnings->push_back("duplicate cluster center perturbed by 1e-9");
    }

    return LookupLattice(std::move(atoms), options.halo, options.delta_samples);
}

}  // namespace qlearn
