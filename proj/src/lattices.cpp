#include "qlearn/lattices.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace qlearn {

// ---------------------------------------------------------------------------
// RegularLattice

RegularLattice::RegularLattice(std::size_t dimension, std::uint32_t points_per_dim, double lo, double hi)
    : QuantizationScheme(DomainBox::cube(dimension, lo, hi)),
      points_(points_per_dim),
      lo_(lo),
      hi_(hi),
      step_((hi - lo) / (points_per_dim - 1)),
      mid_(0.5 * (lo + hi)),
      center_(0.5 * (points_per_dim - 1)) {
    if (points_per_dim < 2) throw std::invalid_argument("regular lattice needs >= 2 points per dimension");
    // lo < hi already enforced by the domain box
}

double RegularLattice::scalar_at(std::uint32_t i) const {
    if (i >= points_) throw std::invalid_argument("regular lattice index out of range");
    if (i == 0) return lo_;
    if (i == points_ - 1) return hi_;
    // Centered form keeps symmetric ranges exactly symmetric and puts an
    // exact zero at the middle index when the count is odd.
    return mid_ + (static_cast<double>(i) - center_) * step_;
}

std::uint32_t RegularLattice::nearest_index(double x) const {
    const double u = (x - mid_) / step_ + center_;
    const auto base = static_cast<std::int64_t>(std::floor(u));
    std::uint32_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::int64_t i = base - 1; i <= base + 2; ++i) {
        if (i < 0 || i >= static_cast<std::int64_t>(points_)) continue;
        const auto idx = static_cast<std::uint32_t>(i);
        const double d = std::abs(x - scalar_at(idx));
        if (d < best_dist) {  // strict: ties keep the smaller index
            best_dist = d;
            best = idx;
        }
    }
    return best;
}

Atom RegularLattice::quantize_in_domain(const Vec& x) const {
    Code code(dimension());
    Vec restoration(dimension());
    for (std::size_t k = 0; k < dimension(); ++k) {
        code[k] = nearest_index(x[k]);
        restoration[k] = scalar_at(code[k]);
    }
    return Atom{std::move(code), std::move(restoration)};
}

Vec RegularLattice::restore_code(const Code& code) const {
    Vec out(dimension());
    for (std::size_t k = 0; k < dimension(); ++k) out[k] = scalar_at(code[k]);
    return out;
}

DeltaReport RegularLattice::delta_report() const {
    return DeltaReport{0.5 * step_ * std::sqrt(static_cast<double>(dimension())), true, 0};
}

std::vector<std::uint32_t> RegularLattice::code_radix() const {
    return std::vector<std::uint32_t>(dimension(), points_);
}

// ---------------------------------------------------------------------------
// LogarithmicLattice

namespace {

std::vector<double> logarithmic_values(unsigned exponent_bits, unsigned mantissa_bits, int bias) {
    const std::uint64_t exponents = std::uint64_t{1} << exponent_bits;
    const std::uint64_t mantissas = std::uint64_t{1} << mantissa_bits;
    std::vector<double> values;
    values.reserve(2 * exponents * mantissas + 1);
    values.push_back(0.0);
    const double mantissa_unit = std::ldexp(1.0, -static_cast<int>(mantissa_bits));
    for (std::uint64_t e = 0; e < exponents; ++e) {
        for (std::uint64_t f = 0; f < mantissas; ++f) {
            const double magnitude =
                std::ldexp(1.0 + static_cast<double>(f) * mantissa_unit, static_cast<int>(e) - bias);
            values.push_back(magnitude);
            values.push_back(-magnitude);
        }
    }
    std::sort(values.begin(), values.end());
    return values;
}

}  // namespace

LogarithmicLattice::LogarithmicLattice(std::size_t dimension, unsigned exponent_bits, unsigned mantissa_bits)
    : QuantizationScheme([&] {
          if (exponent_bits < 1 || exponent_bits > 10)
              throw std::invalid_argument("logarithmic lattice: exponent bits must be in [1, 10]");
          if (mantissa_bits > 20)
              throw std::invalid_argument("logarithmic lattice: mantissa bits must be in [0, 20]");
          const int bias = (1 << (exponent_bits - 1)) - 1;
          const double vmax =
              std::ldexp(2.0 - std::ldexp(1.0, -static_cast<int>(mantissa_bits)),
                         (1 << exponent_bits) - 1 - bias);
          return DomainBox::cube(dimension, -vmax, vmax);
      }()),
      exponent_bits_(exponent_bits),
      mantissa_bits_(mantissa_bits),
      bias_((1 << (exponent_bits - 1)) - 1),
      values_(logarithmic_values(exponent_bits, mantissa_bits, bias_)) {
    max_half_gap_ = 0.0;
    for (std::size_t i = 0; i + 1 < values_.size(); ++i)
        max_half_gap_ = std::max(max_half_gap_, 0.5 * (values_[i + 1] - values_[i]));
}

double LogarithmicLattice::vmin() const {
    return std::ldexp(1.0, -bias_);
}

std::uint32_t LogarithmicLattice::nearest_index(double x) const {
    const auto it = std::lower_bound(values_.begin(), values_.end(), x);
    std::size_t hi_idx = static_cast<std::size_t>(it - values_.begin());
    if (hi_idx == values_.size()) return static_cast<std::uint32_t>(values_.size() - 1);
    if (hi_idx == 0) return 0;
    const double below = x - values_[hi_idx - 1];
    const double above = values_[hi_idx] - x;
    // ties go to the smaller index (the more negative scalar)
    return static_cast<std::uint32_t>(above < below ? hi_idx : hi_idx - 1);
}

Atom LogarithmicLattice::quantize_in_domain(const Vec& x) const {
    Code code(dimension());
    Vec restoration(dimension());
    for (std::size_t k = 0; k < dimension(); ++k) {
        code[k] = nearest_index(x[k]);
        restoration[k] = values_[code[k]];
    }
    return Atom{std::move(code), std::move(restoration)};
}

Vec LogarithmicLattice::restore_code(const Code& code) const {
    Vec out(dimension());
    for (std::size_t k = 0; k < dimension(); ++k) out[k] = values_[code[k]];
    return out;
}

DeltaReport LogarithmicLattice::delta_report() const {
    return DeltaReport{max_half_gap_ * std::sqrt(static_cast<double>(dimension())), true, 0};
}

std::vector<std::uint32_t> LogarithmicLattice::code_radix() const {
    return std::vector<std::uint32_t>(dimension(), static_cast<std::uint32_t>(values_.size()));
}

// ---------------------------------------------------------------------------
// LookupLattice

DomainBox LookupLattice::bounding_box(const std::vector<Vec>& table, double halo) {
    if (table.empty()) throw std::invalid_argument("lookup lattice: table must be non-empty");
    const std::size_t d = table.front().size();
    Vec lo = table.front(), hi = table.front();
    for (const Vec& row : table) {
        if (row.size() != d) throw std::invalid_argument("lookup lattice: rows have mixed dimensions");
        if (!is_finite(row)) throw std::invalid_argument("lookup lattice: non-finite table entry");
        for (std::size_t k = 0; k < d; ++k) {
            lo[k] = std::min(lo[k], row[k]);
            hi[k] = std::max(hi[k], row[k]);
        }
    }
    if (halo < 0.0) throw std::invalid_argument("lookup lattice: halo must be >= 0");
    for (std::size_t k = 0; k < d; ++k) {
        lo[k] -= halo;
        hi[k] += halo;
        if (!(lo[k] < hi[k]))
            throw std::invalid_argument(
                "lookup lattice: degenerate domain in dimension " + std::to_string(k) +
                "; widen the halo");
    }
    return DomainBox(std::move(lo), std::move(hi));
}

LookupLattice::LookupLattice(std::vector<Vec> table, double halo, std::uint64_t delta_samples)
    : QuantizationScheme(bounding_box(table, halo)), table_(std::move(table)), halo_(halo) {
    std::sort(table_.begin(), table_.end());
    if (std::adjacent_find(table_.begin(), table_.end()) != table_.end())
        throw std::invalid_argument("lookup lattice: duplicate table entries");
    if (table_.size() > std::numeric_limits<std::uint32_t>::max())
        throw std::invalid_argument("lookup lattice: table too large");

    // Largest empty sphere radius is estimated, not solved exactly.
    delta_samples = std::max<std::uint64_t>(delta_samples, 100'000);
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    const std::size_t d = dimension();
    std::vector<std::uniform_real_distribution<double>> coord;
    coord.reserve(d);
    for (std::size_t k = 0; k < d; ++k)
        coord.emplace_back(domain().lo(k), domain().hi(k));
    double worst = 0.0;
    Vec x(d);
    for (std::uint64_t s = 0; s < delta_samples; ++s) {
        for (std::size_t k = 0; k < d; ++k) x[k] = coord[k](rng);
        worst = std::max(worst, squared_distance(x, table_[nearest_row(x)]));
    }
    delta_ = DeltaReport{std::sqrt(worst), false, delta_samples};
}

std::uint32_t LookupLattice::nearest_row(const Vec& x) const {
    std::uint32_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t row = 0; row < table_.size(); ++row) {
        const double d2 = squared_distance(x, table_[row]);
        if (d2 < best_dist) {  // strict: ties keep the smaller row id
            best_dist = d2;
            best = static_cast<std::uint32_t>(row);
        }
    }
    return best;
}

Atom LookupLattice::quantize_in_domain(const Vec& x) const {
    const std::uint32_t row = nearest_row(x);
    return Atom{Code{row}, table_[row]};
}

Vec LookupLattice::restore_code(const Code& code) const {
    return table_[code.front()];
}

DeltaReport LookupLattice::delta_report() const { return delta_; }

std::vector<std::uint32_t> LookupLattice::code_radix() const {
    return {static_cast<std::uint32_t>(table_.size())};
}

DeltaReport compute_delta(const QuantizationScheme& scheme) { return scheme.delta_report(); }

}  // namespace qlearn
