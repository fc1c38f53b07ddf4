#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "n2n/dataset.hpp"
#include "n2n/errors.hpp"
#include "n2n/network.hpp"
#include "n2n/rng.hpp"
#include "n2n/trainer.hpp"
#include "oracles.hpp"

using n2n::Dataset;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "n2n_dataset_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

}  // namespace

TEST_CASE("gen_blobs shapes, split and determinism") {
    const Dataset ds = n2n::gen_blobs(4, 100, 200, 0.35, 7);
    CHECK(ds.feature_dim == 100);
    CHECK(ds.classes == 4);
    CHECK(ds.train_x.rows == 640);
    CHECK(ds.test_x.rows == 160);
    CHECK(ds.train_y.size() == 640);
    CHECK(ds.test_y.size() == 160);
    for (std::size_t y : ds.train_y) CHECK(y < 4);
    for (std::size_t y : ds.test_y) CHECK(y < 4);

    const Dataset again = n2n::gen_blobs(4, 100, 200, 0.35, 7);
    CHECK(ds.train_x.data == again.train_x.data);
    CHECK(ds.test_y == again.test_y);
    const Dataset other = n2n::gen_blobs(4, 100, 200, 0.35, 8);
    CHECK(ds.train_x.data != other.train_x.data);
}

TEST_CASE("gen_blobs rejects degenerate parameters") {
    CHECK_THROWS_AS(n2n::gen_blobs(1, 5, 10, 0.1, 1), n2n::ConfigError);
    CHECK_THROWS_AS(n2n::gen_blobs(3, 0, 10, 0.1, 1), n2n::ConfigError);
    CHECK_THROWS_AS(n2n::gen_blobs(3, 5, 0, 0.1, 1), n2n::ConfigError);
    CHECK_THROWS_AS(n2n::gen_blobs(3, 5, 10, -0.1, 1), n2n::ConfigError);
    // Too small for a test split.
    CHECK_THROWS_AS(n2n::gen_blobs(2, 5, 2, 0.1, 1), n2n::ConfigError);
}

TEST_CASE("vanishing spread makes blobs trivially separable") {
    const Dataset ds = n2n::gen_blobs(3, 5, 30, 1e-9, 4);
    n2n::NetworkSpec spec;
    spec.layer_dims = {5, 8, 3};
    spec.seed = 2;
    n2n::Network net = n2n::build_network(spec);
    n2n::HyperParams hp;
    hp.epochs = 20;
    const n2n::History hist = n2n::train(net, ds, hp, 3);
    CHECK(hist.records.back().test_acc == 1.0);
    CHECK(n2n::evaluate(net, ds.train_x, ds.train_y) == 1.0);
}

TEST_CASE("dense baseline learns the calibration blobs") {
    const Dataset ds = n2n::gen_blobs(4, 100, 200, 0.35, 7);
    n2n::NetworkSpec spec;
    spec.layer_dims = {100, 64, 32, 16, 4};
    spec.seed = 11;
    n2n::Network net = n2n::build_network(spec);
    const n2n::HyperParams hp;  // paper defaults, 100 epochs
    const n2n::History hist = n2n::train(net, ds, hp, 12);
    CHECK(hist.records.back().test_acc >= 0.90);
}

TEST_CASE("load_csv standardizes with train statistics only") {
    n2n::Rng rng(5);
    const std::size_t rows = 40, cols = 3;
    std::vector<std::vector<double>> raw(rows, std::vector<double>(cols));
    std::string csv;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            raw[r][c] = rng.normal(2.0 * static_cast<double>(c) - 1.0, 1.5);
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g,", raw[r][c]);
            csv += buf;
        }
        csv += (r % 2 == 0) ? "0\n" : "1\n";
    }
    const auto path = temp_file("standardize.csv");
    write_file(path, csv);

    const Dataset ds = n2n::load_csv(path.string(), 2);
    const std::size_t train_rows = rows - rows / 5;
    REQUIRE(ds.train_x.rows == train_rows);
    REQUIRE(ds.test_x.rows == rows - train_rows);

    for (std::size_t c = 0; c < cols; ++c) {
        std::vector<double> col;
        for (std::size_t r = 0; r < train_rows; ++r) col.push_back(raw[r][c]);
        const auto [mean, stdev] = oracle::mean_std(col);
        for (std::size_t r = 0; r < train_rows; ++r) {
            CHECK(ds.train_x(r, c) == doctest::Approx((raw[r][c] - mean) / stdev).epsilon(1e-12));
        }
        for (std::size_t r = 0; r < ds.test_x.rows; ++r) {
            CHECK(ds.test_x(r, c) ==
                  doctest::Approx((raw[train_rows + r][c] - mean) / stdev).epsilon(1e-12));
        }
    }
}

TEST_CASE("load_csv zeroes constant columns") {
    const auto path = temp_file("constant.csv");
    write_file(path, "5.0,1.0,0\n5.0,2.0,1\n5.0,3.0,0\n5.0,4.0,1\n5.0,5.0,0\n");
    const Dataset ds = n2n::load_csv(path.string(), 2);
    for (std::size_t r = 0; r < ds.train_x.rows; ++r) CHECK(ds.train_x(r, 0) == 0.0);
    for (std::size_t r = 0; r < ds.test_x.rows; ++r) CHECK(ds.test_x(r, 0) == 0.0);
}

TEST_CASE("load_csv accepts an optional header") {
    const std::string body = "1.0,2.0,0\n3.0,4.0,1\n5.0,6.0,0\n7.0,8.0,1\n9.0,10.0,0\n";
    const auto bare = temp_file("noheader.csv");
    const auto headed = temp_file("header.csv");
    write_file(bare, body);
    write_file(headed, "f0,f1,label\n" + body);
    const Dataset a = n2n::load_csv(bare.string(), 2);
    const Dataset b = n2n::load_csv(headed.string(), 2);
    CHECK(a.train_x.data == b.train_x.data);
    CHECK(a.train_y == b.train_y);
    CHECK(a.test_x.data == b.test_x.data);
}

TEST_CASE("load_csv reports the offending row") {
    const auto ragged = temp_file("ragged.csv");
    write_file(ragged, "1,2,3,0\n4,5,6,1\n7,8,0\n9,10,11,1\n12,13,14,0\n");
    try {
        n2n::load_csv(ragged.string(), 2);
        FAIL("expected ConfigError");
    } catch (const n2n::ConfigError& e) {
        CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }

    const auto bad_cell = temp_file("badcell.csv");
    write_file(bad_cell, "1,2,0\n3,abc,1\n5,6,0\n7,8,1\n9,10,0\n");
    try {
        n2n::load_csv(bad_cell.string(), 2);
        FAIL("expected ConfigError");
    } catch (const n2n::ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row 2") != std::string::npos);
        CHECK(msg.find("abc") != std::string::npos);
    }

    const auto bad_label = temp_file("badlabel.csv");
    write_file(bad_label, "1,2,0\n3,4,5\n5,6,0\n7,8,1\n9,10,0\n");
    CHECK_THROWS_AS(n2n::load_csv(bad_label.string(), 2), n2n::ConfigError);

    const auto frac_label = temp_file("fraclabel.csv");
    write_file(frac_label, "1,2,0\n3,4,0.5\n5,6,0\n7,8,1\n9,10,0\n");
    CHECK_THROWS_AS(n2n::load_csv(frac_label.string(), 2), n2n::ConfigError);

    CHECK_THROWS_AS(n2n::load_csv(temp_file("missing.csv").string(), 2), n2n::ConfigError);
}

TEST_CASE("save_csv then load_csv reproduces the split and stabilizes") {
    const Dataset ds = n2n::gen_blobs(3, 4, 25, 0.5, 9);
    const auto f1 = temp_file("roundtrip1.csv");
    const auto f2 = temp_file("roundtrip2.csv");
    n2n::save_csv(ds, f1.string());
    const Dataset d1 = n2n::load_csv(f1.string(), 3);
    CHECK(d1.train_x.rows == ds.train_x.rows);
    CHECK(d1.test_x.rows == ds.test_x.rows);
    CHECK(d1.train_y == ds.train_y);
    CHECK(d1.test_y == ds.test_y);

    // Standardized data re-standardizes to itself: double-loading is stable.
    n2n::save_csv(d1, f2.string());
    const Dataset d2 = n2n::load_csv(f2.string(), 3);
    REQUIRE(d2.train_x.data.size() == d1.train_x.data.size());
    for (std::size_t i = 0; i < d1.train_x.data.size(); ++i) {
        CHECK(d2.train_x.data[i] == doctest::Approx(d1.train_x.data[i]).epsilon(1e-9));
    }
    CHECK(d2.train_y == d1.train_y);
}
