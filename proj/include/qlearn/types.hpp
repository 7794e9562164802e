#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlearn {

// 64-bit floating point stands in for the reals throughout.
using Vec = std::vector<double>;

// Thrown when a text input (sparse dataset, CSV, config) is malformed.
// Carries the 1-based line number of the offending line.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Raised by theorem checkers when a precondition of the theorem itself is
// violated (e.g. delta >= gamma). Distinct from a check failure: the theorem
// simply does not apply to the instance.
class TheoremPreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when the restored weight vector becomes exactly zero during
// Frank-Wolfe (the margin direction is undefined).
class DegenerateWeightsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Label : std::int8_t { negative = -1, positive = +1 };

inline double label_sign(Label y) noexcept { return y == Label::positive ? 1.0 : -1.0; }

// Maps {+1, 1} -> positive and {-1, 0} -> negative; anything else is rejected.
Label label_from_value(double v);

struct Example {
    Vec x;
    Label y;
};

bool is_finite(const Vec& v) noexcept;

double dot(const Vec& a, const Vec& b);
double norm(const Vec& v);
double squared_distance(const Vec& a, const Vec& b);
Vec add(const Vec& a, const Vec& b);
Vec scale(const Vec& v, double s);
// a + s * b, the shape every learner update takes.
Vec axpy(const Vec& a, double s, const Vec& b);

// Axis-aligned closed box [lo_k, hi_k]^d with lo_k < hi_k in every dimension.
class DomainBox {
public:
    DomainBox(Vec lo, Vec hi);
    static DomainBox cube(std::size_t dimension, double lo, double hi);

    std::size_t dimension() const noexcept { return lo_.size(); }
    double lo(std::size_t k) const { return lo_[k]; }
    double hi(std::size_t k) const { return hi_[k]; }
    const Vec& lo() const noexcept { return lo_; }
    const Vec& hi() const noexcept { return hi_; }

    bool contains(const Vec& x) const;
    Vec clamp(Vec x) const;
    // True when the closed origin-centered ball of the given radius fits in the box.
    bool contains_origin_ball(double radius) const;

private:
    Vec lo_;
    Vec hi_;
};

// Immutable labeled dataset with uniform dimension, non-empty, all finite.
class LabeledDataset {
public:
    LabeledDataset(std::string name, std::size_t dimension, std::vector<Example> examples);

    const std::string& name() const noexcept { return name_; }
    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t size() const noexcept { return examples_.size(); }
    const std::vector<Example>& examples() const noexcept { return examples_; }
    const Example& operator[](std::size_t i) const { return examples_[i]; }

    std::size_t count(Label y) const noexcept;
    bool has_both_labels() const noexcept { return count(Label::positive) > 0 && count(Label::negative) > 0; }
    double max_example_norm() const;
    // Theorem 1/3 precondition: every example satisfies ||r(x)|| <= bound.
    bool norms_at_most(double bound) const { return max_example_norm() <= bound; }

private:
    std::string name_;
    std::size_t dimension_;
    std::vector<Example> examples_;
};

}  // namespace qlearn
