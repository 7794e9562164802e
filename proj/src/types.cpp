#include "qlearn/types.hpp"

#include <algorithm>
#include <cmath>

namespace qlearn {

Label label_from_value(double v) {
    if (v == 1.0) return Label::positive;
    if (v == -1.0 || v == 0.0) return Label::negative;
    throw std::invalid_argument("label must be one of {+1, 1, -1, 0}, got " + std::to_string(v));
}

bool is_finite(const Vec& v) noexcept {
    return std::all_of(v.begin(), v.end(), [](double c) { return std::isfinite(c); });
}

namespace {

void require_same_dimension(const Vec& a, const Vec& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("vector dimension mismatch: " + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()));
}

}  // namespace

double dot(const Vec& a, const Vec& b) {
    require_same_dimension(a, b);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

double norm(const Vec& v) { return std::sqrt(dot(v, v)); }

double squared_distance(const Vec& a, const Vec& b) {
    require_same_dimension(a, b);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

Vec add(const Vec& a, const Vec& b) {
    require_same_dimension(a, b);
    Vec out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] + b[k];
    return out;
}

Vec scale(const Vec& v, double s) {
    Vec out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = v[k] * s;
    return out;
}

Vec axpy(const Vec& a, double s, const Vec& b) {
    require_same_dimension(a, b);
    Vec out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] + s * b[k];
    return out;
}

DomainBox::DomainBox(Vec lo, Vec hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.empty() || lo_.size() != hi_.size())
        throw std::invalid_argument("domain box needs matching non-empty bounds");
    for (std::size_t k = 0; k < lo_.size(); ++k) {
        if (!std::isfinite(lo_[k]) || !std::isfinite(hi_[k]) || !(lo_[k] < hi_[k]))
            throw std::invalid_argument("domain box requires finite lo < hi in every dimension");
    }
}

DomainBox DomainBox::cube(std::size_t dimension, double lo, double hi) {
    return DomainBox(Vec(dimension, lo), Vec(dimension, hi));
}

bool DomainBox::contains(const Vec& x) const {
    if (x.size() != lo_.size()) return false;
    for (std::size_t k = 0; k < x.size(); ++k)
        if (x[k] < lo_[k] || x[k] > hi_[k]) return false;
    return true;
}

Vec DomainBox::clamp(Vec x) const {
    if (x.size() != lo_.size()) throw std::invalid_argument("clamp: dimension mismatch");
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = std::clamp(x[k], lo_[k], hi_[k]);
    return x;
}

bool DomainBox::contains_origin_ball(double radius) const {
    for (std::size_t k = 0; k < lo_.size(); ++k)
        if (lo_[k] > -radius || hi_[k] < radius) return false;
    return true;
}

LabeledDataset::LabeledDataset(std::string name, std::size_t dimension, std::vector<Example> examples)
    : name_(std::move(name)), dimension_(dimension), examples_(std::move(examples)) {
    if (dimension_ == 0) throw std::invalid_argument("dataset dimension must be >= 1");
    if (examples_.empty()) throw std::invalid_argument("dataset must be non-empty");
    for (const Example& e : examples_) {
        if (e.x.size() != dimension_)
            throw std::invalid_argument("dataset '" + name_ + "': example dimension " +
                                        std::to_string(e.x.size()) + " != " + std::to_string(dimension_));
        if (!is_finite(e.x))
            throw std::invalid_argument("dataset '" + name_ + "': non-finite feature value");
    }
}

std::size_t LabeledDataset::count(Label y) const noexcept {
    std::size_t c = 0;
    for (const Example& e : examples_)
        if (e.y == y) ++c;
    return c;
}

double LabeledDataset::max_example_norm() const {
    double m = 0.0;
    for (const Example& e : examples_) m = std::max(m, norm(e.x));
    return m;
}

}  // namespace qlearn
