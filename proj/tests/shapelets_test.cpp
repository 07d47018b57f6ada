#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "mimic/rng.hpp"
#include "mimic/shapelets.hpp"
#include "support/reference_impls.hpp"

using namespace mimic;
using namespace mimic::testing;

namespace {

ImportanceMap map_from_rows(const std::vector<std::vector<double>>& rows,
                            const std::string& label = "a") {
    ImportanceMap map;
    map.dims = rows.size();
    map.length = rows[0].size();
    map.label = label;
    for (const auto& row : rows) {
        map.values.insert(map.values.end(), row.begin(), row.end());
    }
    return map;
}

std::vector<std::vector<double>> all_vectors(std::size_t max_len,
                                             const std::vector<double>& alphabet) {
    std::vector<std::vector<double>> out;
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::size_t count = 1;
        for (std::size_t i = 0; i < len; ++i) count *= alphabet.size();
        for (std::size_t code = 0; code < count; ++code) {
            std::vector<double> v(len);
            std::size_t c = code;
            for (std::size_t i = 0; i < len; ++i) {
                v[i] = alphabet[c % alphabet.size()];
                c /= alphabet.size();
            }
            out.push_back(std::move(v));
        }
    }
    return out;
}

}  // namespace

TEST_CASE("dtw_distance on pinned examples") {
    const std::vector<double> v123{1.0, 2.0, 3.0};
    CHECK(dtw_distance(v123, v123) == 0.0);

    const std::vector<double> a{1.0, 2.0}, b{1.0, 2.0, 2.0};
    CHECK(dtw_distance(a, b) == 0.0);
    CHECK(dtw_all_paths(a, b) == 0.0);

    const std::vector<double> c{1.0, 3.0}, d{2.0};
    CHECK(dtw_distance(c, d) == 2.0);
    CHECK(dtw_all_paths(c, d) == 2.0);
}

TEST_CASE("dtw_distance equals both reference oracles exhaustively (lengths <= 4)") {
    const auto vectors = all_vectors(4, {0.0, 0.5, 1.0});
    for (const auto& a : vectors) {
        for (const auto& b : vectors) {
            const double got = dtw_distance(a, b);
            CHECK(got == dtw_all_paths(a, b));
            CHECK(got == dtw_reference(a, b));
        }
    }
}

TEST_CASE("dtw_distance symmetry, identity, non-negativity on random pairs") {
    Rng rng(2024);
    for (int round = 0; round < 1000; ++round) {
        std::vector<double> a(1 + rng.below(12)), b(1 + rng.below(12));
        for (auto& x : a) x = rng.uniform();
        for (auto& x : b) x = rng.uniform();
        const double ab = dtw_distance(a, b);
        CHECK(ab >= 0.0);
        CHECK(ab == dtw_distance(b, a));
        CHECK(dtw_distance(a, a) == 0.0);
    }
}

TEST_CASE("dtw band constraints") {
    const std::vector<double> a{0.0, 0.5, 1.0, 0.5, 0.0}, b{0.0, 1.0};
    CHECK_THROWS_WITH_AS(dtw_distance(a, b, DtwBand{1}), doctest::Contains("band"),
                         std::invalid_argument);
    CHECK(dtw_distance(a, b, DtwBand{3}) >= dtw_distance(a, b));
    CHECK(dtw_distance(a, b, DtwBand{5}) == dtw_distance(a, b));

    CHECK_THROWS_AS(dtw_distance(std::vector<double>{}, b), std::invalid_argument);
}

TEST_CASE("multivariate dtw sums channel costs along one path") {
    const auto a = MultivariateSeries::from_rows({{1.0, 2.0}, {0.0, 0.0}});
    const auto b = MultivariateSeries::from_rows({{1.0, 2.0}, {0.0, 0.0}});
    CHECK(dtw_distance_multivariate(a, b) == 0.0);

    const auto c = MultivariateSeries::from_rows({{1.0}, {1.0}});
    const auto d = MultivariateSeries::from_rows({{2.0}, {3.0}});
    CHECK(dtw_distance_multivariate(c, d) == doctest::Approx(1.0 + 4.0));
}

TEST_CASE("binarize follows the per-dimension quantile rule") {
    SUBCASE("all-zero map stays zero for any quantile") {
        const auto map = map_from_rows({{0.0, 0.0, 0.0}});
        for (double q : {0.0, 0.3, 0.9}) {
            const auto bits = binarize(map, q);
            for (auto b : bits.bits) CHECK(b == 0);
        }
    }
    SUBCASE("q = 0 reproduces the zero/non-zero rule when zeros exist") {
        const auto bits = binarize(map_from_rows({{0.0, 0.2, 0.7}}), 0.0);
        CHECK(bits(0, 0) == 0);
        CHECK(bits(0, 1) == 1);
        CHECK(bits(0, 2) == 1);
        CHECK(bits.thresholds[0] == 0.0);
    }
    SUBCASE("midpoint interpolation at q = 0.5") {
        const auto map = map_from_rows({{0.1, 0.2, 0.3, 0.4}});
        const auto bits = binarize(map, 0.5);
        CHECK(bits.thresholds[0] == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(bits.thresholds[0] ==
              doctest::Approx(quantile_reference({0.1, 0.2, 0.3, 0.4}, 0.5)).epsilon(1e-15));
        CHECK(bits(0, 0) == 0);
        CHECK(bits(0, 1) == 0);
        CHECK(bits(0, 2) == 1);
        CHECK(bits(0, 3) == 1);
    }
    SUBCASE("rows are thresholded independently") {
        const auto map = map_from_rows({{0.0, 0.9}, {0.4, 0.5}});
        const auto bits = binarize(map, 0.0);
        CHECK(bits(0, 0) == 0);
        CHECK(bits(0, 1) == 1);
        CHECK(bits(1, 0) == 0);  // row minimum never survives strict >
        CHECK(bits(1, 1) == 1);
    }
    SUBCASE("raising q only removes bits") {
        Rng rng(88);
        std::vector<std::vector<double>> rows(2, std::vector<double>(16));
        for (auto& row : rows) {
            for (auto& x : row) x = rng.below(4) == 0 ? 0.0 : rng.uniform();
        }
        const auto map = map_from_rows(rows);
        std::vector<std::uint8_t> prev;
        for (double q : {0.0, 0.2, 0.4, 0.6, 0.8}) {
            const auto bits = binarize(map, q);
            if (!prev.empty()) {
                for (std::size_t k = 0; k < prev.size(); ++k) {
                    if (bits.bits[k]) CHECK(prev[k] == 1);
                }
            }
            prev = bits.bits;
        }
    }
    SUBCASE("quantile domain") {
        CHECK_THROWS_AS(binarize(map_from_rows({{0.1}}), 1.0), std::invalid_argument);
        CHECK_THROWS_AS(binarize(map_from_rows({{0.1}}), -0.1), std::invalid_argument);
    }
}

TEST_CASE("constrain_and_segment extracts maximal runs") {
    const auto series = MultivariateSeries::from_rows({{0.1, 0.2, 0.3, 0.4, 0.5}});
    BinaryMap map;
    map.dims = 1;
    map.length = 5;

    SUBCASE("pinned run layout") {
        map.bits = {0, 1, 1, 0, 1};
        const auto segs = constrain_and_segment(series, map, 1, 7);
        REQUIRE(segs.size() == 2);
        CHECK(segs[0].start == 1);
        CHECK(segs[0].values == std::vector<double>{0.2, 0.3});
        CHECK(segs[1].start == 4);
        CHECK(segs[1].values == std::vector<double>{0.5});
        CHECK(segs[0].instance == 7);
    }
    SUBCASE("runs below the minimum are dropped") {
        map.bits = {1, 1, 0, 1, 1};
        CHECK(constrain_and_segment(series, map, 3).empty());
    }
    SUBCASE("all-ones map keeps whole rows") {
        const auto wide = MultivariateSeries::from_rows(
            {{0.1, 0.2, 0.3}, {0.4, 0.5, 0.6}});
        BinaryMap ones;
        ones.dims = 2;
        ones.length = 3;
        ones.bits = {1, 1, 1, 1, 1, 1};
        const auto segs = constrain_and_segment(wide, ones, 1);
        REQUIRE(segs.size() == 2);
        CHECK(segs[0].values.size() == 3);
        CHECK(segs[1].dimension == 1);
    }
    SUBCASE("partition law: runs plus gaps tile the axis") {
        Rng rng(4);
        for (int round = 0; round < 200; ++round) {
            BinaryMap random_map;
            random_map.dims = 1;
            random_map.length = 12;
            random_map.bits.resize(12);
            for (auto& b : random_map.bits) b = rng.below(2) ? 1 : 0;
            const auto row_series = MultivariateSeries(1, 12, 0.5);
            const auto segs = constrain_and_segment(row_series, random_map, 1);
            std::vector<std::uint8_t> rebuilt(12, 0);
            for (const auto& s : segs) {
                for (std::size_t t = s.start; t < s.start + s.values.size(); ++t) {
                    CHECK(rebuilt[t] == 0);
                    rebuilt[t] = 1;
                }
            }
            CHECK(rebuilt == random_map.bits);
        }
    }
}

namespace {

// Instances whose values inside the map's active window are fully scripted.
LabeledDataset scripted_dataset(const std::vector<std::vector<double>>& windows,
                                const std::vector<std::string>& labels, std::size_t length,
                                std::size_t window_start) {
    std::vector<MultivariateSeries> instances;
    Rng rng(555);
    for (const auto& window : windows) {
        MultivariateSeries s(1, length, 0.0);
        for (std::size_t t = 0; t < length; ++t) s(0, t) = 0.2 + 0.01 * rng.uniform();
        for (std::size_t j = 0; j < window.size(); ++j) s(0, window_start + j) = window[j];
        instances.push_back(std::move(s));
    }
    return {"scripted", std::move(instances), labels};
}

BinaryMap window_map(const std::string& label, std::size_t length, std::size_t start,
                     std::size_t width) {
    BinaryMap map;
    map.dims = 1;
    map.length = length;
    map.label = label;
    map.bits.assign(length, 0);
    for (std::size_t t = start; t < start + width; ++t) map.bits[t] = 1;
    return map;
}

}  // namespace

TEST_CASE("extraction recovers a shared subsequence with full support") {
    const std::vector<double> motif{0.9, 0.5, 0.9, 0.3, 0.8};
    const auto train = scripted_dataset({motif, motif, motif, {0.4, 0.4, 0.4, 0.4, 0.4}},
                                        {"A", "A", "A", "B"}, 16, 4);
    ExtractionParams params;
    params.shapelets_per_label = 3;
    params.min_length = 3;
    params.max_length = 8;

    const auto shapes = extract_mimicshapes(
        train, {window_map("A", 16, 4, 5), window_map("B", 16, 4, 5)}, params);
    const auto group = shapes.for_label("A");
    REQUIRE(group.size() == 1);  // identical segments collapse to one medoid
    CHECK(group[0]->values == motif);
    CHECK(group[0]->support == 3);
    CHECK(group[0]->dimension == 0);
    CHECK(group[0]->start == 4);
}

TEST_CASE("k = 1 medoid comes from the heavier cluster") {
    const std::vector<double> common{0.9, 0.5, 0.9};
    const std::vector<double> rare{0.1, 0.1, 0.1};
    const auto train =
        scripted_dataset({common, common, common, rare, {0.5, 0.5, 0.5}},
                         {"A", "A", "A", "A", "B"}, 10, 2);
    ExtractionParams params;
    params.shapelets_per_label = 1;
    params.min_length = 2;
    params.max_length = 6;

    const auto shapes = extract_mimicshapes(
        train, {window_map("A", 10, 2, 3), window_map("B", 10, 2, 3)}, params);
    const auto group = shapes.for_label("A");
    REQUIRE(group.size() == 1);
    CHECK(group[0]->values == common);
    CHECK(group[0]->support == 4);  // whole pool assigned to the single medoid
}

TEST_CASE("a label with an all-zero map yields no shapes and a warning") {
    const auto train = scripted_dataset({{0.9, 0.5}, {0.4, 0.4}}, {"A", "B"}, 8, 3);
    BinaryMap empty_map;
    empty_map.dims = 1;
    empty_map.length = 8;
    empty_map.label = "B";
    empty_map.bits.assign(8, 0);

    ExtractionParams params;
    params.min_length = 2;
    params.max_length = 4;
    const auto shapes =
        extract_mimicshapes(train, {window_map("A", 8, 3, 2), empty_map}, params);
    CHECK(shapes.for_label("B").empty());
    REQUIRE(shapes.warnings.size() == 1);
    CHECK(shapes.warnings[0].find("B") != std::string::npos);
}

TEST_CASE("over-long segments are truncated around their center") {
    std::vector<double> window(10);
    for (std::size_t i = 0; i < window.size(); ++i) window[i] = 0.05 * static_cast<double>(i + 1);
    ExtractionParams params;
    params.min_length = 2;
    params.max_length = 6;
    // Second label map so extraction has full coverage; give B no active bits.
    BinaryMap none;
    none.dims = 1;
    none.length = 14;
    none.label = "B";
    none.bits.assign(14, 0);

    const auto train2 = scripted_dataset({window, window, {0.3, 0.3}}, {"A", "A", "B"}, 14, 2);
    const auto shapes =
        extract_mimicshapes(train2, {window_map("A", 14, 2, 10), none}, params);
    const auto group = shapes.for_label("A");
    REQUIRE(!group.empty());
    CHECK(group[0]->values.size() == 6);
    // Centered truncation of a 10-step segment keeps offsets 2..8.
    CHECK(group[0]->values[0] == doctest::Approx(window[2]));
    CHECK(group[0]->start == 4);
}

TEST_CASE("extraction is deterministic") {
    const std::vector<double> m1{0.9, 0.5, 0.9}, m2{0.2, 0.8, 0.2};
    const auto train = scripted_dataset({m1, m2, m1, m2}, {"A", "A", "B", "B"}, 12, 5);
    ExtractionParams params;
    params.min_length = 2;
    params.max_length = 5;
    const auto maps = std::vector<BinaryMap>{window_map("A", 12, 5, 3), window_map("B", 12, 5, 3)};

    std::ostringstream first, second;
    write_shapes(extract_mimicshapes(train, maps, params), first);
    write_shapes(extract_mimicshapes(train, maps, params), second);
    CHECK(first.str() == second.str());
}

TEST_CASE("classify prefers the label whose shapelet the series contains") {
    MimicShapeSet shapes;
    shapes.label_set = {"A", "B"};
    shapes.shapes.push_back({"A", 0, {0.9, 0.2, 0.9, 0.2}, 3, 0, 0});
    shapes.shapes.push_back({"B", 0, {0.5, 0.5, 0.5, 0.5}, 3, 0, 0});

    MultivariateSeries series(1, 12, 0.1);
    for (std::size_t j = 0; j < 4; ++j) series(0, 4 + j) = shapes.shapes[0].values[j];

    const auto result = classify(series, shapes);
    CHECK(result.label == "A");
    REQUIRE(result.scores.size() == 2);
    CHECK(result.scores[0].first == "A");
    CHECK(result.scores[0].second == 0.0);  // exact window match
    CHECK(result.scores[1].second > 0.0);

    // The decision is the argmin of the reported scores, so scaling every
    // score by a positive constant cannot move it.
    for (double scale : {0.25, 1.0, 40.0}) {
        std::string best;
        double best_score = std::numeric_limits<double>::infinity();
        for (const auto& [label, score] : result.scores) {
            if (score * scale < best_score) {
                best_score = score * scale;
                best = label;
            }
        }
        CHECK(best == result.label);
    }
}

TEST_CASE("classify needs at least two labeled groups") {
    MimicShapeSet shapes;
    shapes.label_set = {"A"};
    shapes.shapes.push_back({"A", 0, {0.5, 0.5}, 1, 0, 0});
    CHECK_THROWS_AS(classify(MultivariateSeries(1, 8, 0.5), shapes), std::invalid_argument);

    // Labels without shapelets are skipped in the score list.
    shapes.label_set = {"A", "B", "C"};
    shapes.shapes.push_back({"B", 0, {0.9, 0.1}, 1, 0, 0});
    const auto result = classify(MultivariateSeries(1, 8, 0.5), shapes);
    CHECK(result.scores.size() == 2);
    for (const auto& [label, score] : result.scores) CHECK(label != "C");
}

TEST_CASE("classify requires a normalized query") {
    MimicShapeSet shapes;
    shapes.label_set = {"A", "B"};
    shapes.shapes.push_back({"A", 0, {0.5}, 1, 0, 0});
    shapes.shapes.push_back({"B", 0, {0.9}, 1, 0, 0});
    CHECK_THROWS_AS(classify(MultivariateSeries(1, 4, 1.5), shapes), std::invalid_argument);
}

TEST_CASE("shape files round trip and reject malformed input") {
    MimicShapeSet shapes;
    shapes.label_set = {"x", "y"};
    shapes.shapes.push_back({"x", 1, {0.25, 0.5, 0.75}, 4, 2, 9});
    shapes.shapes.push_back({"y", 0, {1.0}, 2, 0, 3});

    const auto path =
        (std::filesystem::temp_directory_path() / "mimic_shapes_roundtrip.txt").string();
    save_shapes(shapes, path);

    std::ifstream in(path);
    std::string first_line;
    std::getline(in, first_line);
    CHECK(first_line == "# mimic-shapes 1");
    std::getline(in, first_line);
    CHECK(first_line == "x 1 4 9 3");

    const auto loaded = load_shapes(path);
    REQUIRE(loaded.shapes.size() == 2);
    CHECK(loaded.shapes[0].values == shapes.shapes[0].values);
    CHECK(loaded.shapes[0].support == 4);
    CHECK(loaded.shapes[0].start == 9);
    CHECK(loaded.label_set == shapes.label_set);

    const auto bad_path = (std::filesystem::temp_directory_path() / "mimic_shapes_bad.txt").string();
    std::ofstream bad(bad_path);
    bad << "# mimic-shapes 1\nx 1 4 9 3\n0.25 0.5\n";
    bad.close();
    CHECK_THROWS_WITH_AS(load_shapes(bad_path), doctest::Contains(":3:"), std::runtime_error);
}
