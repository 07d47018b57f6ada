#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mimic/rng.hpp"
#include "mimic/tsdata.hpp"

using namespace mimic;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

}  // namespace

TEST_CASE("normalize maps rows into (0,1] with the stated arithmetic") {
    SUBCASE("constant row collapses to all ones") {
        const auto s = MultivariateSeries::from_rows({{5.0, 5.0, 5.0}});
        const auto n = normalize(s);
        for (std::size_t t = 0; t < 3; ++t) CHECK(n(0, t) == 1.0);
    }
    SUBCASE("hand-evaluated row") {
        const auto n = normalize(MultivariateSeries::from_rows({{1.0, 2.0, 3.0}}));
        CHECK(n(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
        CHECK(n(0, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
        CHECK(n(0, 2) == 1.0);
    }
    SUBCASE("negative inputs map into (0,1]") {
        const auto n = normalize(MultivariateSeries::from_rows({{-2.0, 0.0}}));
        CHECK(n(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
        CHECK(n(0, 1) == 1.0);
    }
    SUBCASE("rows are scaled independently") {
        const auto n = normalize(MultivariateSeries::from_rows({{0.0, 10.0}, {100.0, 100.0}}));
        CHECK(n(0, 0) == doctest::Approx(1.0 / 11.0));
        CHECK(n(0, 1) == 1.0);
        CHECK(n(1, 0) == 1.0);
    }
}

TEST_CASE("normalize rejects non-finite input naming the coordinate") {
    auto s = MultivariateSeries::from_rows({{1.0, 2.0}, {3.0, 4.0}});
    s(1, 1) = std::nan("");
    CHECK_THROWS_WITH_AS(normalize(s), doctest::Contains("(dim 1, t 1)"), std::invalid_argument);
}

TEST_CASE("normalize properties over 1000 random rows") {
    Rng rng(42);
    for (int round = 0; round < 1000; ++round) {
        const std::size_t len = 2 + rng.below(63);
        std::vector<double> row(len);
        for (auto& x : row) x = (2.0 * rng.uniform() - 1.0) * 1e6;
        const auto n = normalize(MultivariateSeries::from_rows({row}));

        std::size_t argmax = 0, argmin = 0;
        for (std::size_t t = 1; t < len; ++t) {
            if (row[t] > row[argmax]) argmax = t;
            if (row[t] < row[argmin]) argmin = t;
        }
        double out_max = 0.0;
        std::size_t out_argmax = 0, out_argmin = 0;
        for (std::size_t t = 0; t < len; ++t) {
            const double x = n(0, t);
            CHECK(x > 0.0);
            CHECK(x <= 1.0);
            if (x > n(0, out_argmax)) out_argmax = t;
            if (x < n(0, out_argmin)) out_argmin = t;
            out_max = std::max(out_max, x);
        }
        CHECK(out_max == 1.0);
        CHECK(out_argmax == argmax);
        CHECK(out_argmin == argmin);

        // Re-normalizing stays inside the range (no fixpoint claim).
        const auto again = normalize(n);
        for (std::size_t t = 0; t < len; ++t) {
            CHECK(again(0, t) > 0.0);
            CHECK(again(0, t) <= 1.0);
        }
    }
}

TEST_CASE("load_dataset parses the v1 format") {
    const auto path = temp_path("mimic_basic.ts");
    write_file(path,
               "# mimic-ts 1\n"
               "2 4 3\n"
               "up\n1 2 3 4\n5 6 7 8\n"
               "down\n4 3 2 1\n8 7 6 5\n"
               "up\n1 1 2 2\n3 3 4 4\n");
    const auto ds = load_dataset(path);
    CHECK(ds.dims() == 2);
    CHECK(ds.length() == 4);
    CHECK(ds.size() == 3);
    CHECK(ds.label_set() == std::vector<std::string>{"down", "up"});
    CHECK(ds.instances()[1](0, 0) == 4.0);
    CHECK(ds.meta().class_count == 2);
}

TEST_CASE("load_dataset reports malformed inputs with line numbers") {
    SUBCASE("ragged record") {
        const auto path = temp_path("mimic_ragged.ts");
        write_file(path,
                   "# mimic-ts 1\n"
                   "1 4 2\n"
                   "a\n1 2 3 4\n"
                   "b\n1 2 3 4 5\n");
        CHECK_THROWS_WITH_AS(load_dataset(path), doctest::Contains("instance 2"),
                             std::runtime_error);
        CHECK_THROWS_WITH_AS(load_dataset(path), doctest::Contains(":6:"), std::runtime_error);
    }
    SUBCASE("no instances") {
        const auto path = temp_path("mimic_empty.ts");
        write_file(path, "# mimic-ts 1\n2 4 0\n");
        CHECK_THROWS_WITH_AS(load_dataset(path), doctest::Contains("no instances"),
                             std::runtime_error);
    }
    SUBCASE("bad magic") {
        const auto path = temp_path("mimic_magic.ts");
        write_file(path, "# other 9\n1 1 1\nx\n1\n");
        CHECK_THROWS_WITH_AS(load_dataset(path), doctest::Contains("magic"), std::runtime_error);
    }
    SUBCASE("label with spaces") {
        const auto path = temp_path("mimic_label.ts");
        write_file(path, "# mimic-ts 1\n1 1 1\na b\n1\n");
        CHECK_THROWS_WITH_AS(load_dataset(path), doctest::Contains("label"), std::runtime_error);
    }
    SUBCASE("bad numeric token") {
        const auto path = temp_path("mimic_num.ts");
        write_file(path, "# mimic-ts 1\n1 2 1\na\n1 zzz\n");
        CHECK_THROWS_WITH_AS(load_dataset(path), doctest::Contains("zzz"), std::runtime_error);
    }
}

TEST_CASE("save_dataset round trips exactly") {
    Rng rng(7);
    std::vector<MultivariateSeries> instances;
    std::vector<std::string> labels;
    for (int i = 0; i < 5; ++i) {
        MultivariateSeries s(3, 6);
        for (std::size_t v = 0; v < 3; ++v) {
            for (std::size_t t = 0; t < 6; ++t) s(v, t) = (2.0 * rng.uniform() - 1.0) * 1e3;
        }
        instances.push_back(std::move(s));
        labels.push_back(i % 2 == 0 ? "even" : "odd");
    }
    const LabeledDataset ds("roundtrip", instances, labels);

    const auto path = temp_path("mimic_roundtrip.ts");
    save_dataset(ds, path);
    const auto loaded = load_dataset(path);
    REQUIRE(loaded.size() == ds.size());
    CHECK(loaded.labels() == ds.labels());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(loaded.instances()[i] == ds.instances()[i]);
    }
}

TEST_CASE("save_dataset minimal dataset body is three lines after the magic") {
    const LabeledDataset ds("tiny", {MultivariateSeries::from_rows({{0.25}})}, {"only"});
    const auto path = temp_path("mimic_tiny.ts");
    save_dataset(ds, path);
    std::ifstream in(path);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "# mimic-ts 1");
    CHECK(lines[1] == "1 1 1");
    CHECK(lines[2] == "only");
    CHECK(lines[3] == "0.25");
}

TEST_CASE("save_dataset rejects labels containing the separator") {
    const LabeledDataset ds("bad", {MultivariateSeries::from_rows({{1.0}})}, {"a b"});
    CHECK_THROWS_AS(save_dataset(ds, temp_path("mimic_bad_label.ts")), std::invalid_argument);
}

TEST_CASE("dataset invariants are enforced at construction") {
    CHECK_THROWS_AS(LabeledDataset("x", {}, {}), std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        LabeledDataset("x",
                       {MultivariateSeries::from_rows({{1.0, 2.0}}),
                        MultivariateSeries::from_rows({{1.0, 2.0, 3.0}})},
                       {"a", "b"}),
        doctest::Contains("instance 2"), std::invalid_argument);
}
