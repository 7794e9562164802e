#include "qlearn/scheme.hpp"

#include <cmath>
#include <limits>

namespace qlearn {

Atom QuantizationScheme::quantize(const Vec& x) const {
    if (x.size() != dimension())
        throw std::invalid_argument("quantize: input dimension " + std::to_string(x.size()) +
                                    " != scheme dimension " + std::to_string(dimension()));
    if (!is_finite(x)) throw std::invalid_argument("quantize: non-finite component");
    return quantize_in_domain(domain_.clamp(x));
}

Vec QuantizationScheme::restore(const Atom& a) const {
    validate_code(a.code);
    return restore_code(a.code);
}

double QuantizationScheme::round_trip_error(const Vec& x) const {
    return std::sqrt(squared_distance(x, quantize(x).restoration));
}

std::optional<std::uint64_t> QuantizationScheme::atom_count() const {
    std::uint64_t m = 1;
    for (std::uint32_t radix : code_radix()) {
        if (radix == 0) return std::nullopt;
        if (m > std::numeric_limits<std::uint64_t>::max() / radix) return std::nullopt;
        m *= radix;
    }
    return m;
}

Atom QuantizationScheme::atom_at(std::uint64_t id) const {
    const auto m = atom_count();
    if (!m) throw std::invalid_argument("atom_at: atom count exceeds 64 bits");
    if (id >= *m) throw std::invalid_argument("atom_at: id " + std::to_string(id) + " out of range");
    const auto radix = code_radix();
    Code code(radix.size());
    for (std::size_t slot = radix.size(); slot-- > 0;) {
        code[slot] = static_cast<std::uint32_t>(id % radix[slot]);
        id /= radix[slot];
    }
    return Atom{code, restore_code(code)};
}

std::uint64_t QuantizationScheme::atom_id(const Atom& a) const {
    validate_code(a.code);
    if (!atom_count()) throw std::invalid_argument("atom_id: atom count exceeds 64 bits");
    const auto radix = code_radix();
    std::uint64_t id = 0;
    for (std::size_t slot = 0; slot < radix.size(); ++slot) id = id * radix[slot] + a.code[slot];
    return id;
}

std::optional<Atom> QuantizationScheme::zero_atom() const {
    Atom a = quantize_in_domain(domain_.clamp(Vec(dimension(), 0.0)));
    for (double c : a.restoration)
        if (c != 0.0) return std::nullopt;
    return a;
}

void QuantizationScheme::validate_code(const Code& code) const {
    const auto radix = code_radix();
    if (code.size() != radix.size())
        throw std::invalid_argument("atom code has " + std::to_string(code.size()) +
                                    " digits, scheme expects " + std::to_string(radix.size()));
    for (std::size_t slot = 0; slot < code.size(); ++slot)
        if (code[slot] >= radix[slot])
            throw std::invalid_argument("atom code digit " + std::to_string(code[slot]) +
                                        " out of range [0, " + std::to_string(radix[slot]) + ")");
}

LabeledDataset quantize_dataset(const QuantizationScheme& scheme, const LabeledDataset& dataset) {
    if (dataset.dimension() != scheme.dimension())
        throw std::invalid_argument("quantize_dataset: dataset dimension != scheme dimension");
    std::vector<Example> quantized;
    quantized.reserve(dataset.size());
    for (const Example& e : dataset.examples())
        quantized.push_back(Example{scheme.quantize(e.x).restoration, e.y});
    return LabeledDataset(dataset.name(), dataset.dimension(), std::move(quantized));
}

}  // namespace qlearn
