#include <doctest.h>

#include <cmath>
#include <random>

#include "qlearn/lattices.hpp"
#include "test_support.hpp"

using namespace qlearn;

TEST_CASE("label mapping accepts the four ingestion values") {
    CHECK(label_from_value(1.0) == Label::positive);
    CHECK(label_from_value(-1.0) == Label::negative);
    CHECK(label_from_value(0.0) == Label::negative);
    CHECK_THROWS_AS(label_from_value(2.0), std::invalid_argument);
}

TEST_CASE("domain box validation and clamping") {
    CHECK_THROWS_AS(DomainBox::cube(2, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(DomainBox::cube(2, 2.0, -2.0), std::invalid_argument);
    CHECK_THROWS_AS(DomainBox(Vec{0.0}, Vec{1.0, 2.0}), std::invalid_argument);

    const DomainBox box = DomainBox::cube(2, -1.0, 1.0);
    CHECK(box.contains(Vec{0.5, -1.0}));
    CHECK_FALSE(box.contains(Vec{1.5, 0.0}));
    CHECK(box.clamp(Vec{5.0, -7.0}) == Vec{1.0, -1.0});
    CHECK(box.contains_origin_ball(1.0));
    CHECK_FALSE(box.contains_origin_ball(1.0001));
}

TEST_CASE("dataset invariants are enforced at construction") {
    CHECK_THROWS_AS(LabeledDataset("empty", 2, {}), std::invalid_argument);
    CHECK_THROWS_AS(LabeledDataset("mixed", 2, {{Vec{1.0}, Label::positive}}), std::invalid_argument);
    CHECK_THROWS_AS(
        LabeledDataset("nan", 1, {{Vec{std::nan("")}, Label::positive}}), std::invalid_argument);

    const LabeledDataset data("ok", 2,
                              {{Vec{0.0, 0.5}, Label::positive}, {Vec{0.0, -0.5}, Label::negative}});
    CHECK(data.max_example_norm() == 0.5);
    CHECK(data.norms_at_most(1.0));
    CHECK(data.has_both_labels());
    CHECK(data.count(Label::positive) == 1);
}

TEST_CASE("quantize picks the nearest atom and saturates outside the domain") {
    const RegularLattice lattice(1, 4, -1.0, 1.0);  // atoms -1, -1/3, 1/3, 1
    CHECK(lattice.quantize(Vec{0.3}).restoration[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(lattice.quantize(Vec{5.0}).restoration[0] == 1.0);  // clamp then quantize
    CHECK(lattice.quantize(Vec{-5.0}).restoration[0] == -1.0);

    CHECK_THROWS_AS(lattice.quantize(Vec{0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(lattice.quantize(Vec{std::nan("")}), std::invalid_argument);
    CHECK_THROWS_AS(lattice.quantize(Vec{INFINITY}), std::invalid_argument);
}

TEST_CASE("quantization ties break to the smallest atom id") {
    const RegularLattice lattice(1, 4, -1.0, 1.0);
    // 0 is equidistant from -1/3 and 1/3
    CHECK(lattice.quantize(Vec{0.0}).code[0] == 1);
    CHECK(lattice.quantize(Vec{0.0}).restoration[0] == doctest::Approx(-1.0 / 3.0));
}

TEST_CASE("restore returns exact representable points and validates codes") {
    const RegularLattice lattice(1, 4, -1.0, 1.0);
    CHECK(lattice.atom_at(0).restoration[0] == -1.0);
    CHECK(lattice.atom_at(3).restoration[0] == 1.0);
    CHECK_THROWS_AS(lattice.atom_at(4), std::invalid_argument);
    CHECK_THROWS_AS(lattice.restore(Atom{Code{7}, {}}), std::invalid_argument);
    CHECK_THROWS_AS(lattice.restore(Atom{Code{0, 0}, {}}), std::invalid_argument);

    const LookupLattice lookup({Vec{0.0, 0.0}, Vec{1.0, 2.0}}, 0.5);
    CHECK(lookup.restore(Atom{Code{1}, {}}) == Vec{1.0, 2.0});
}

TEST_CASE("round trip error matches the hand-computed cell geometry") {
    const RegularLattice line(1, 4, -1.0, 1.0);
    CHECK(line.round_trip_error(line.atom_at(2).restoration) == 0.0);
    CHECK(line.round_trip_error(Vec{0.0}) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    const RegularLattice plane(2, 4, -1.0, 1.0);
    CHECK(plane.round_trip_error(Vec{0.0, 0.0}) ==
          doctest::Approx(std::sqrt(2.0) / 3.0).epsilon(1e-14));
}

TEST_CASE("idempotence: quantizing a restoration returns the same atom") {
    std::mt19937_64 rng(11);
    SUBCASE("every atom of small schemes") {
        const RegularLattice grid(2, 5, -1.0, 1.0);
        const LogarithmicLattice log_lattice(2, 2, 1);
        const LookupLattice lookup({Vec{0.0, 0.0}, Vec{1.0, 2.0}, Vec{-0.5, 0.25}}, 1.0);
        for (const QuantizationScheme* scheme :
             {static_cast<const QuantizationScheme*>(&grid),
              static_cast<const QuantizationScheme*>(&log_lattice),
              static_cast<const QuantizationScheme*>(&lookup)}) {
            const auto m = scheme->atom_count();
            REQUIRE(m);
            for (std::uint64_t id = 0; id < *m; ++id) {
                const Atom a = scheme->atom_at(id);
                CHECK(scheme->quantize(a.restoration) == a);
            }
        }
    }
    SUBCASE("random atoms of a large scheme") {
        const RegularLattice grid(3, 1001, -2.0, 2.0);
        std::uniform_int_distribution<std::uint64_t> pick(0, *grid.atom_count() - 1);
        for (int i = 0; i < 2000; ++i) {
            const Atom a = grid.atom_at(pick(rng));
            CHECK(grid.quantize(a.restoration) == a);
        }
    }
}

TEST_CASE("nearest-neighbor optimality against exhaustive comparison") {
    std::mt19937_64 rng(17);
    const RegularLattice grid(2, 10, -1.0, 1.0);
    const LogarithmicLattice log_lattice(2, 2, 1);
    std::vector<Vec> table;
    for (int i = 0; i < 40; ++i) table.push_back(testing::random_point_in_cube(3, -1.0, 1.0, rng));
    const LookupLattice lookup(std::move(table), 0.5);

    for (const QuantizationScheme* scheme :
         {static_cast<const QuantizationScheme*>(&grid),
          static_cast<const QuantizationScheme*>(&log_lattice),
          static_cast<const QuantizationScheme*>(&lookup)}) {
        const auto m = scheme->atom_count();
        REQUIRE(m);
        REQUIRE(*m <= 10'000);
        std::vector<Atom> atoms;
        for (std::uint64_t id = 0; id < *m; ++id) atoms.push_back(scheme->atom_at(id));
        for (int i = 0; i < 300; ++i) {
            const Vec x = testing::random_point_in(scheme->domain(), rng);
            const double chosen = squared_distance(x, scheme->quantize(x).restoration);
            for (const Atom& a : atoms) CHECK(chosen <= squared_distance(x, a.restoration));
        }
    }
}

TEST_CASE("round trip error stays within delta over heavy probing") {
    std::mt19937_64 rng(23);
    SUBCASE("exact deltas") {
        const RegularLattice grid(2, 7, -1.0, 1.0);
        const LogarithmicLattice log_lattice(1, 3, 1);
        for (const QuantizationScheme* scheme : {static_cast<const QuantizationScheme*>(&grid),
                                                 static_cast<const QuantizationScheme*>(&log_lattice)}) {
            const double delta = scheme->delta();
            double worst = 0.0;
            for (int i = 0; i < 100'000; ++i)
                worst = std::max(
                    worst, scheme->round_trip_error(testing::random_point_in(scheme->domain(), rng)));
            CHECK(worst <= delta * (1.0 + 1e-12));
        }
    }
    SUBCASE("estimated lookup delta carries sampling slack") {
        std::vector<Vec> table;
        for (int i = 0; i < 6; ++i) table.push_back(testing::random_point_in_cube(2, -1.0, 1.0, rng));
        const LookupLattice lookup(std::move(table), 0.5);
        REQUIRE_FALSE(lookup.delta_report().exact);
        const double delta = lookup.delta();
        double worst = 0.0;
        for (int i = 0; i < 100'000; ++i)
            worst =
                std::max(worst, lookup.round_trip_error(testing::random_point_in(lookup.domain(), rng)));
        // the reported delta is a Monte Carlo estimate of the max; allow its
        // documented sampling error
        CHECK(worst <= delta * 1.02);
    }
}

TEST_CASE("quantize is a pure function of its input") {
    const RegularLattice a(2, 9, -1.0, 1.0);
    const RegularLattice b(2, 9, -1.0, 1.0);
    std::mt19937_64 rng(29);
    for (int i = 0; i < 200; ++i) {
        const Vec x = testing::random_point_in_cube(2, -2.0, 2.0, rng);
        const Atom first = a.quantize(x);
        CHECK(first == a.quantize(x));
        CHECK(first == b.quantize(x));
    }
}

TEST_CASE("saturation: quantize(x) equals quantize(clamp(x))") {
    std::mt19937_64 rng(31);
    const RegularLattice grid(2, 8, -1.0, 1.0);
    const LogarithmicLattice log_lattice(2, 3, 1);
    for (const QuantizationScheme* scheme : {static_cast<const QuantizationScheme*>(&grid),
                                             static_cast<const QuantizationScheme*>(&log_lattice)}) {
        for (int i = 0; i < 500; ++i) {
            const Vec x = testing::random_point_in_cube(2, -100.0, 100.0, rng);
            CHECK(scheme->quantize(x) == scheme->quantize(scheme->domain().clamp(x)));
        }
    }
}

TEST_CASE("atom ids order atoms lexicographically by restoration") {
    const RegularLattice grid(2, 3, -1.0, 1.0);
    const auto m = grid.atom_count();
    REQUIRE(m);
    for (std::uint64_t id = 0; id + 1 < *m; ++id) {
        const Vec a = grid.atom_at(id).restoration;
        const Vec b = grid.atom_at(id + 1).restoration;
        CHECK(a < b);  // lexicographic
        CHECK(grid.atom_id(grid.atom_at(id)) == id);
    }
}

TEST_CASE("atom count reports overflow as absent") {
    const RegularLattice huge(112, 256, -1.0, 1.0);  // 256^112 atoms
    CHECK_FALSE(huge.atom_count());
    CHECK_THROWS_AS(huge.atom_at(0), std::invalid_argument);
    // the scheme itself still quantizes fine
    const Atom a = huge.quantize(Vec(112, 0.4));
    CHECK(huge.quantize(a.restoration) == a);
}

TEST_CASE("zero atom exists exactly when zero is representable") {
    CHECK(RegularLattice(2, 5, -1.0, 1.0).zero_atom());
    CHECK(RegularLattice(2, 7, -1.0, 1.0).zero_atom());  // centered form keeps 0 exact
    CHECK_FALSE(RegularLattice(2, 4, -1.0, 1.0).zero_atom());
    CHECK(LogarithmicLattice(3, 3, 1).zero_atom());
    const auto zero = LogarithmicLattice(3, 3, 1).zero_atom();
    CHECK(zero->restoration == Vec(3, 0.0));
}

TEST_CASE("quantize_dataset maps every example onto the atom set") {
    const RegularLattice grid(2, 4, -1.0, 1.0);
    const LabeledDataset data("raw", 2,
                              {{Vec{0.3, 0.9}, Label::positive}, {Vec{-2.0, 0.0}, Label::negative}});
    const LabeledDataset quantized = quantize_dataset(grid, data);
    for (const Example& e : quantized.examples()) CHECK(grid.round_trip_error(e.x) == 0.0);
    CHECK(quantized[1].x[0] == -1.0);  // saturated
}
