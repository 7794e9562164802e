#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qlearn/types.hpp"

namespace qlearn {

// Per-dimension digit identifying an atom inside its scheme (lookup tables use
// a single digit: the row index). Codes order atoms lexicographically by
// restoration coordinates, so the mixed-radix rank of a code is the atom id.
using Code = std::vector<std::uint32_t>;

struct Atom {
    Code code;
    Vec restoration;  // cached r(a); exact, never recomputed lossily
};

inline bool operator==(const Atom& a, const Atom& b) noexcept { return a.code == b.code; }
inline bool operator!=(const Atom& a, const Atom& b) noexcept { return !(a == b); }

struct DeltaReport {
    double value = 0.0;
    bool exact = true;        // false when Monte Carlo estimated
    std::uint64_t samples = 0;  // sample count backing an estimate
};

// The (A, q, r) triple plus its domain box M and error parameter delta.
// Immutable after construction; quantize/restore are pure.
class QuantizationScheme {
public:
    virtual ~QuantizationScheme() = default;

    std::size_t dimension() const noexcept { return domain_.dimension(); }
    const DomainBox& domain() const noexcept { return domain_; }

    double delta() const { return delta_report().value; }
    virtual DeltaReport delta_report() const = 0;

    // Nearest atom to x after clamping x into M (saturating overflow).
    // Equidistant atoms resolve to the smallest atom id.
    Atom quantize(const Vec& x) const;

    // Exact representable point of the atom; validates the code.
    Vec restore(const Atom& a) const;

    // ||x - r(q(x))||; <= delta for x in M.
    double round_trip_error(const Vec& x) const;

    // Number of code values per digit slot; the product over slots is m.
    virtual std::vector<std::uint32_t> code_radix() const = 0;

    // m = |A| when it fits in 64 bits, nullopt otherwise (e.g. 256^112).
    std::optional<std::uint64_t> atom_count() const;

    // Mixed-radix decode of an atom id; requires atom_count() and id < m.
    Atom atom_at(std::uint64_t id) const;
    std::uint64_t atom_id(const Atom& a) const;

    // The atom restoring exactly to the zero vector, when the scheme has one.
    std::optional<Atom> zero_atom() const;

protected:
    explicit QuantizationScheme(DomainBox domain) : domain_(std::move(domain)) {}

    // x is already validated and clamped into M.
    virtual Atom quantize_in_domain(const Vec& x) const = 0;
    virtual Vec restore_code(const Code& code) const = 0;

private:
    void validate_code(const Code& code) const;

    DomainBox domain_;
};

// Replaces every example by r(q(x)) so the result satisfies X subset of A.
LabeledDataset quantize_dataset(const QuantizationScheme& scheme, const LabeledDataset& dataset);

}  // namespace qlearn
