#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "qlearn/analysis.hpp"
#include "qlearn/data.hpp"
#include "test_support.hpp"

using namespace qlearn;

TEST_CASE("sparse parsing of the basic line forms") {
    std::istringstream in("+1 3:1 7:1\n-1 1:0.5 2:-0.25\n");
    const LabeledDataset data = parse_sparse(in, "demo");
    CHECK(data.dimension() == 7);
    CHECK(data.size() == 2);
    CHECK(data[0].y == Label::positive);
    CHECK(data[0].x[2] == 1.0);
    CHECK(data[0].x[6] == 1.0);
    CHECK(data[0].x[0] == 0.0);
    CHECK(data[1].y == Label::negative);
    CHECK(data[1].x[0] == 0.5);
    CHECK(data[1].x[1] == -0.25);
}

TEST_CASE("sparse parsing maps 0/1 labels onto the sign convention") {
    std::istringstream in("1 1:2\n0 1:-2\n");
    const LabeledDataset data = parse_sparse(in, "binary");
    CHECK(data[0].y == Label::positive);
    CHECK(data[1].y == Label::negative);
}

TEST_CASE("sparse parsing honors a declared dimension override") {
    std::istringstream in("+1 2:1\n");
    const LabeledDataset data = parse_sparse(in, "wide", 10);
    CHECK(data.dimension() == 10);

    std::istringstream too_small("+1 5:1\n");
    CHECK_THROWS_AS(parse_sparse(too_small, "narrow", 3), ParseError);
}

TEST_CASE("sparse parsing rejects malformed input with line numbers") {
    auto expect_error_on_line = [](const std::string& text, std::size_t line) {
        std::istringstream in(text);
        try {
            parse_sparse(in, "bad");
            FAIL("expected ParseError for: " << text);
        } catch (const ParseError& e) {
            CHECK(e.line() == line);
        }
    };
    expect_error_on_line("+1 3:1 2:1\n", 1);         // non-monotone indices
    expect_error_on_line("+1 1:1\n-1 0:1\n", 2);     // index below 1
    expect_error_on_line("+1 a:1\n", 1);             // unparseable index
    expect_error_on_line("+1 1:zzz\n", 1);           // unparseable value
    expect_error_on_line("5 1:1\n", 1);              // invalid label
    expect_error_on_line("+1 1:inf\n", 1);           // non-finite value
    expect_error_on_line("", 0);                     // empty file
    expect_error_on_line("+1 1\n", 1);               // missing colon
}

TEST_CASE("serialize then parse is the identity on in-memory datasets") {
    std::mt19937_64 rng(41);
    std::vector<Example> examples;
    std::uniform_real_distribution<double> value(-5.0, 5.0);
    std::uniform_int_distribution<int> keep(0, 2);
    for (int i = 0; i < 50; ++i) {
        Vec x(8, 0.0);
        for (double& c : x)
            if (keep(rng) == 0) c = value(rng);
        examples.push_back(Example{std::move(x), keep(rng) ? Label::positive : Label::negative});
    }
    // at least one entirely regular row with an awkward value
    examples.push_back(Example{Vec{0.1, 0.0, -1e-17, 3.0, 0.0, 0.0, 0.0, 1868.0}, Label::negative});
    const LabeledDataset data("roundtrip", 8, std::move(examples));

    std::ostringstream out;
    serialize_sparse(out, data);
    std::istringstream in(out.str());
    const LabeledDataset parsed = parse_sparse(in, "roundtrip", 8);
    REQUIRE(parsed.size() == data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        CHECK(parsed[i].y == data[i].y);
        CHECK(parsed[i].x == data[i].x);  // bitwise through %.17g
    }
}

TEST_CASE("dense CSV parsing with and without a header") {
    std::istringstream with_header("f1,f2,label\n0.5,-1.5,1\n-0.25,2.0,-1\n");
    const LabeledDataset a = parse_dense_csv(with_header, "csv");
    CHECK(a.dimension() == 2);
    CHECK(a.size() == 2);
    CHECK(a[0].x == Vec{0.5, -1.5});
    CHECK(a[1].y == Label::negative);

    std::istringstream without_header("0.5,-1.5,1\n");
    CHECK(parse_dense_csv(without_header, "csv").size() == 1);

    std::istringstream ragged("1,2,1\n1,2,3,1\n");
    CHECK_THROWS_AS(parse_dense_csv(ragged, "csv"), ParseError);
    std::istringstream mid_garbage("1,2,1\n1,x,1\n");
    CHECK_THROWS_AS(parse_dense_csv(mid_garbage, "csv"), ParseError);
}

TEST_CASE("atom table CSV loads rows of uniform width") {
    std::istringstream in("0.0,0.0\n1.0,2.0\n");
    const std::vector<Vec> table = parse_atom_table_csv(in);
    REQUIRE(table.size() == 2);
    CHECK(table[1] == Vec{1.0, 2.0});
}

TEST_CASE("synthetic generation is deterministic and margin-exact") {
    SyntheticSpec spec;
    spec.dimension = 2;
    spec.count = 200;
    spec.margin = 0.2;
    spec.max_magnitude = 0.6;
    spec.seed = 7;

    const LabeledDataset a = generate_synthetic(spec);
    const LabeledDataset b = generate_synthetic(spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x == b[i].x);
        CHECK(a[i].y == b[i].y);
    }

    const MarginEstimate estimate = estimate_margin(a, 200'000);
    CHECK(estimate.gamma_hat >= 0.2 * (1.0 - 1e-3));
    CHECK(estimate.gamma_hat <= 0.2 + 1e-6);
}

TEST_CASE("synthetic generation respects the planted normal and label quota") {
    SyntheticSpec spec;
    spec.dimension = 3;
    spec.count = 120;
    spec.margin = 0.15;
    spec.max_magnitude = 0.5;
    spec.seed = 3;
    spec.positive_fraction = 0.25;
    spec.normal = Vec{0.0, 0.0, 2.0};  // normalized internally
    const LabeledDataset data = generate_synthetic(spec);
    CHECK(data.count(Label::positive) == 30);
    for (const Example& e : data.examples())
        CHECK(label_sign(e.y) * e.x[2] >= 0.15 * (1.0 - 1e-12));
}

TEST_CASE("synthetic generation rejects infeasible specs") {
    SyntheticSpec spec;
    spec.margin = 0.0;
    CHECK_THROWS_AS(generate_synthetic(spec), std::invalid_argument);
    spec.margin = 0.95;
    spec.max_magnitude = 1.0;  // margin > 0.9 * max magnitude
    CHECK_THROWS_AS(generate_synthetic(spec), std::invalid_argument);
    spec.margin = 0.1;
    spec.min_magnitude = 0.5;
    spec.max_magnitude = 0.4;
    CHECK_THROWS_AS(generate_synthetic(spec), std::invalid_argument);
}

TEST_CASE("normalize: unit max norm scales every example by the same factor") {
    SyntheticSpec spec;
    spec.dimension = 2;
    spec.count = 60;
    spec.margin = 0.3;
    spec.max_magnitude = 3.0;
    spec.seed = 11;
    const LabeledDataset raw = generate_synthetic(spec);
    const double raw_margin = estimate_margin(raw, 100'000).gamma_hat;

    const NormalizedDataset normalized = normalize(raw, {NormalizationMode::unit_max_norm});
    CHECK(normalized.dataset.max_example_norm() <= 1.0 + 1e-12);
    CHECK(normalized.dataset.max_example_norm() >= 1.0 - 1e-12);

    // margin scales by the inverse of the max-norm factor
    const double factor = normalized.record.scales[0];
    const double scaled_margin = estimate_margin(normalized.dataset, 100'000).gamma_hat;
    CHECK(scaled_margin == doctest::Approx(raw_margin * factor).epsilon(1e-3));
}

TEST_CASE("normalize: scale_to_box maps feature ranges onto the box") {
    // cod-rna-like magnitudes spanning 0.08 to 1868
    std::vector<Example> examples;
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> wide(0.08, 1868.0);
    for (int i = 0; i < 40; ++i) {
        examples.push_back(
            Example{Vec{wide(rng), wide(rng) * 0.001}, i % 2 ? Label::positive : Label::negative});
    }
    const LabeledDataset raw("cod-rna-like", 2, std::move(examples));
    const NormalizedDataset normalized =
        normalize(raw, {NormalizationMode::scale_to_box, -1.0, 1.0});

    for (std::size_t k = 0; k < 2; ++k) {
        double lo = 1e300, hi = -1e300;
        for (const Example& e : normalized.dataset.examples()) {
            lo = std::min(lo, e.x[k]);
            hi = std::max(hi, e.x[k]);
        }
        CHECK(lo == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(hi == doctest::Approx(1.0).epsilon(1e-12));
    }

    // round trip back to the originals
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const Vec back = normalized.record.invert(normalized.dataset[i].x);
        for (std::size_t k = 0; k < 2; ++k)
            CHECK(back[k] == doctest::Approx(raw[i].x[k]).epsilon(1e-12));
    }
}

TEST_CASE("normalize: identity mode and degenerate inputs") {
    const LabeledDataset data("plain", 1, {{Vec{0.5}, Label::positive}});
    const NormalizedDataset none = normalize(data, {NormalizationMode::none});
    CHECK(none.dataset[0].x == Vec{0.5});
    CHECK(none.record.scales == Vec{1.0});
    CHECK(none.record.offsets == Vec{0.0});

    const LabeledDataset zeros("zeros", 1, {{Vec{0.0}, Label::positive}});
    CHECK_THROWS_AS(normalize(zeros, {NormalizationMode::unit_max_norm}), std::invalid_argument);

    // a constant feature shifts to the box midpoint and still inverts
    const LabeledDataset constant("const", 1,
                                  {{Vec{3.0}, Label::positive}, {Vec{3.0}, Label::negative}});
    const NormalizedDataset boxed = normalize(constant, {NormalizationMode::scale_to_box, -1.0, 1.0});
    CHECK(boxed.dataset[0].x[0] == 0.0);
    CHECK(boxed.record.invert(boxed.dataset[0].x)[0] == 3.0);
}

TEST_CASE("seeded split is a deterministic partition") {
    SyntheticSpec spec;
    spec.dimension = 2;
    spec.count = 200;
    spec.margin = 0.2;
    spec.max_magnitude = 6.9;
    spec.min_magnitude = 0.9;
    spec.seed = 1;
    const LabeledDataset data = generate_synthetic(spec);
    const SplitDataset split = seeded_split(data, 160, 13);
    CHECK(split.train.size() == 160);  // synth01-shaped 160/40
    CHECK(split.test.size() == 40);

    const SplitDataset again = seeded_split(data, 160, 13);
    for (std::size_t i = 0; i < 160; ++i) CHECK(split.train[i].x == again.train[i].x);

    // union of both sides equals the original multiset
    std::vector<Vec> all;
    for (const Example& e : split.train.examples()) all.push_back(e.x);
    for (const Example& e : split.test.examples()) all.push_back(e.x);
    std::vector<Vec> original;
    for (const Example& e : data.examples()) original.push_back(e.x);
    std::sort(all.begin(), all.end());
    std::sort(original.begin(), original.end());
    CHECK(all == original);

    CHECK_THROWS_AS(seeded_split(data, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(seeded_split(data, 200, 1), std::invalid_argument);
}

TEST_CASE("k-means objective never increases") {
    std::mt19937_64 rng(43);
    std::vector<Vec> points;
    for (int blob = 0; blob < 3; ++blob) {
        std::normal_distribution<double> gauss(blob * 4.0, 0.7);
        for (int i = 0; i < 50; ++i) points.push_back(Vec{gauss(rng), gauss(rng)});
    }
    const KMeansResult result = kmeans(points, 3, 17);
    REQUIRE(result.objective_history.size() >= 1);
    for (std::size_t i = 1; i < result.objective_history.size(); ++i)
        CHECK(result.objective_history[i] <= result.objective_history[i - 1] * (1.0 + 1e-12));
}

TEST_CASE("k-means with k=1 returns the centroid") {
    const std::vector<Vec> points{Vec{0.0, 0.0}, Vec{2.0, 0.0}, Vec{1.0, 3.0}};
    const KMeansResult result = kmeans(points, 1, 0);
    REQUIRE(result.centers.size() == 1);
    CHECK(result.centers[0][0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(result.centers[0][1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("k-means argument validation and determinism") {
    const std::vector<Vec> points{Vec{0.0}, Vec{1.0}};
    CHECK_THROWS_AS(kmeans(points, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(kmeans(points, 3, 0), std::invalid_argument);
    CHECK_THROWS_AS(kmeans({}, 1, 0), std::invalid_argument);

    std::mt19937_64 rng(47);
    std::vector<Vec> cloud;
    for (int i = 0; i < 60; ++i) cloud.push_back(testing::random_point_in_cube(2, -1.0, 1.0, rng));
    const KMeansResult a = kmeans(cloud, 4, 99);
    const KMeansResult b = kmeans(cloud, 4, 99);
    CHECK(a.centers == b.centers);
    CHECK(a.assignments == b.assignments);
}

TEST_CASE("cluster lattice uses per-class centers as atoms") {
    SyntheticSpec spec;  // synth02-shaped: 2 features, margin, 80 examples
    spec.dimension = 2;
    spec.count = 80;
    spec.margin = 0.3;
    spec.min_magnitude = 0.01;
    spec.max_magnitude = 2.7;
    spec.seed = 2;
    const LabeledDataset data = generate_synthetic(spec);

    SUBCASE("k=1 atoms are the two class means") {
        ClusterLatticeOptions options;
        options.k_per_class = 1;
        const LookupLattice lattice = build_cluster_lattice(data, options);
        CHECK(lattice.table_size() == 2);

        Vec positive_mean(2, 0.0), negative_mean(2, 0.0);
        double np = 0.0, nn = 0.0;
        for (const Example& e : data.examples()) {
            Vec& target = e.y == Label::positive ? positive_mean : negative_mean;
            (e.y == Label::positive ? np : nn) += 1.0;
            for (std::size_t k = 0; k < 2; ++k) target[k] += e.x[k];
        }
        for (std::size_t k = 0; k < 2; ++k) {
            positive_mean[k] /= np;
            negative_mean[k] /= nn;
        }
        const auto& table = lattice.table();
        const bool matches_either =
            (norm(axpy(table[0], -1.0, positive_mean)) < 1e-9 &&
             norm(axpy(table[1], -1.0, negative_mean)) < 1e-9) ||
            (norm(axpy(table[0], -1.0, negative_mean)) < 1e-9 &&
             norm(axpy(table[1], -1.0, positive_mean)) < 1e-9);
        CHECK(matches_either);
    }
    SUBCASE("k in {1,3,9} produces 2, 6, 18 atoms") {
        for (const auto& [k, atoms] : {std::pair<std::uint32_t, std::size_t>{1, 2}, {3, 6}, {9, 18}}) {
            ClusterLatticeOptions options;
            options.k_per_class = k;
            CHECK(build_cluster_lattice(data, options).table_size() == atoms);
        }
    }
    SUBCASE("k above the class size clamps with a warning") {
        std::vector<Example> few{{Vec{0.0, 1.0}, Label::positive},
                                 {Vec{0.1, 1.1}, Label::positive},
                                 {Vec{0.0, -1.0}, Label::negative}};
        const LabeledDataset tiny("tiny", 2, std::move(few));
        ClusterLatticeOptions options;
        options.k_per_class = 5;
        std::vector<std::string> warnings;
        const LookupLattice lattice = build_cluster_lattice(tiny, options, &warnings);
        CHECK(lattice.table_size() == 3);  // 2 positives + 1 negative
        CHECK(warnings.size() == 2);
    }
    SUBCASE("a single-class dataset is rejected") {
        const LabeledDataset one("one", 2, {{Vec{0.0, 1.0}, Label::positive}});
        CHECK_THROWS_AS(build_cluster_lattice(one, ClusterLatticeOptions{}), std::invalid_argument);
    }
}
