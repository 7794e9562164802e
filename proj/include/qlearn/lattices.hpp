#pragma once

#include <cstdint>
#include <vector>

#include "qlearn/scheme.hpp"

namespace qlearn {

// Evenly spaced grid per dimension over [lo, hi], endpoints inclusive.
// Models fixed point: range and density are the two parameters.
class RegularLattice final : public QuantizationScheme {
public:
    RegularLattice(std::size_t dimension, std::uint32_t points_per_dim, double lo, double hi);

    std::uint32_t points_per_dim() const noexcept { return points_; }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    double step() const noexcept { return step_; }

    // Grid coordinate of per-dimension index i. Endpoints are exact; for
    // symmetric ranges the set is exactly symmetric and odd point counts
    // contain an exact zero.
    double scalar_at(std::uint32_t i) const;

    DeltaReport delta_report() const override;  // (step/2) * sqrt(d), exact
    std::vector<std::uint32_t> code_radix() const override;

protected:
    Atom quantize_in_domain(const Vec& x) const override;
    Vec restore_code(const Code& code) const override;

private:
    std::uint32_t nearest_index(double x) const;

    std::uint32_t points_;
    double lo_, hi_, step_, mid_, center_;
};

// Sign/exponent/mantissa value set without denormals, infinities or NaNs,
// plus one reserved zero. Models floating point with arbitrary widths.
class LogarithmicLattice final : public QuantizationScheme {
public:
    LogarithmicLattice(std::size_t dimension, unsigned exponent_bits, unsigned mantissa_bits);

    unsigned exponent_bits() const noexcept { return exponent_bits_; }
    unsigned mantissa_bits() const noexcept { return mantissa_bits_; }
    int bias() const noexcept { return bias_; }
    double vmax() const noexcept { return values_.back(); }
    double vmin() const;  // smallest positive magnitude

    // All representable scalars of one dimension, sorted ascending.
    const std::vector<double>& scalar_values() const noexcept { return values_; }

    DeltaReport delta_report() const override;  // max half-gap * sqrt(d), exact
    std::vector<std::uint32_t> code_radix() const override;

protected:
    Atom quantize_in_domain(const Vec& x) const override;
    Vec restore_code(const Code& code) const override;

private:
    std::uint32_t nearest_index(double x) const;

    unsigned exponent_bits_, mantissa_bits_;
    int bias_;
    std::vector<double> values_;
    double max_half_gap_;
};

// Arbitrary finite atom table with exact nearest-neighbor quantization.
// The domain is the table's bounding box widened by a halo on every side.
class LookupLattice final : public QuantizationScheme {
public:
    // Sorts the table lexicographically so row order never affects atom ids.
    LookupLattice(std::vector<Vec> table, double halo,
                  std::uint64_t delta_samples = kDefaultDeltaSamples);

    static constexpr std::uint64_t kDefaultDeltaSamples = 1'000'000;

    std::size_t table_size() const noexcept { return table_.size(); }
    const std::vector<Vec>& table() const noexcept { return table_; }
    double halo() const noexcept { return halo_; }

    DeltaReport delta_report() const override;  // Monte Carlo estimate
    std::vector<std::uint32_t> code_radix() const override;

protected:
    Atom quantize_in_domain(const Vec& x) const override;
    Vec restore_code(const Code& code) const override;

private:
    static DomainBox bounding_box(const std::vector<Vec>& table, double halo);
    std::uint32_t nearest_row(const Vec& x) const;

    std::vector<Vec> table_;
    double halo_;
    DeltaReport delta_;
};

// The error parameter of Eq-style max_{x in M} ||x - r(q(x))||: closed form
// for the grid lattices, a flagged Monte Carlo estimate for lookup tables.
DeltaReport compute_delta(const QuantizationScheme& scheme);

}  // namespace qlearn
