#include "n2n/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "n2n/errors.hpp"
#include "n2n/rng.hpp"

namespace n2n {

namespace {

std::vector<std::string> split_cells(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool parse_double(const std::string& cell, double& out) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    if (end == begin) return false;
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    return *end == '\0';
}

struct Row {
    std::vector<double> features;
    std::size_t label;
};

}  // namespace

Dataset gen_blobs(std::size_t classes, std::size_t dim, std::size_t per_class, double spread,
                  std::uint64_t seed) {
    if (classes < 2) {
        throw ConfigError("gen_blobs needs at least 2 classes, got " + std::to_string(classes));
    }
    if (dim == 0 || per_class == 0) {
        throw ConfigError("gen_blobs dimensions must be positive (dim=" + std::to_string(dim) +
                          ", per_class=" + std::to_string(per_class) + ")");
    }
    if (spread < 0.0) {
        throw ConfigError("gen_blobs spread must be non-negative, got " + std::to_string(spread));
    }
    const std::size_t n = classes * per_class;
    const std::size_t test_count = n / 5;
    if (test_count == 0) {
        throw ConfigError("gen_blobs dataset of " + std::to_string(n) +
                          " samples is too small for an 80/20 split");
    }

    Rng rng(seed);
    std::vector<std::vector<double>> means(classes, std::vector<double>(dim));
    for (auto& mean : means) {
        for (double& m : mean) m = rng.uniform(-1.0, 1.0);
    }

    Matrix all_x(n, dim);
    std::vector<std::size_t> all_y(n);
    for (std::size_t c = 0; c < classes; ++c) {
        for (std::size_t i = 0; i < per_class; ++i) {
            const std::size_t row = c * per_class + i;
            all_y[row] = c;
            for (std::size_t j = 0; j < dim; ++j) {
                all_x(row, j) = rng.normal(means[c][j], spread);
            }
        }
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);

    Dataset ds;
    ds.feature_dim = dim;
    ds.classes = classes;
    const std::size_t train_count = n - test_count;
    ds.train_x = Matrix(train_count, dim);
    ds.train_y.resize(train_count);
    ds.test_x = Matrix(test_count, dim);
    ds.test_y.resize(test_count);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t src = order[i];
        Matrix& dst_x = i < train_count ? ds.train_x : ds.test_x;
        std::vector<std::size_t>& dst_y = i < train_count ? ds.train_y : ds.test_y;
        const std::size_t dst_row = i < train_count ? i : i - train_count;
        for (std::size_t j = 0; j < dim; ++j) dst_x(dst_row, j) = all_x(src, j);
        dst_y[dst_row] = all_y[src];
    }
    return ds;
}

Dataset load_csv(const std::string& path, std::size_t classes) {
    if (classes < 2) {
        throw ConfigError("load_csv needs at least 2 classes, got " + std::to_string(classes));
    }
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open dataset file: " + path);

    std::vector<Row> rows;
    std::size_t feature_dim = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_cells(line);
        if (cells.size() < 2) {
            throw ConfigError("row " + std::to_string(lineno) +
                              ": expected features...,label but found " +
                              std::to_string(cells.size()) + " cell(s)");
        }
        double probe = 0.0;
        if (rows.empty() && lineno == 1 && !parse_double(cells[0], probe)) {
            continue;  // header row
        }
        Row row;
        row.features.resize(cells.size() - 1);
        for (std::size_t j = 0; j + 1 < cells.size(); ++j) {
            if (!parse_double(cells[j], row.features[j])) {
                throw ConfigError("row " + std::to_string(lineno) + ": non-numeric cell '" +
                                  cells[j] + "'");
            }
        }
        double label_value = 0.0;
        if (!parse_double(cells.back(), label_value)) {
            throw ConfigError("row " + std::to_string(lineno) + ": non-numeric label '" +
                              cells.back() + "'");
        }
        if (label_value < 0.0 || label_value != std::floor(label_value)) {
            throw ConfigError("row " + std::to_string(lineno) + ": label must be a non-negative "
                              "integer, got '" + cells.back() + "'");
        }
        row.label = static_cast<std::size_t>(label_value);
        if (row.label >= classes) {
            throw ConfigError("row " + std::to_string(lineno) + ": label " +
                              std::to_string(row.label) + " >= classes " +
                              std::to_string(classes));
        }
        if (feature_dim == 0) {
            feature_dim = row.features.size();
        } else if (row.features.size() != feature_dim) {
            throw ConfigError("row " + std::to_string(lineno) + ": expected " +
                              std::to_string(feature_dim + 1) + " cells, got " +
                              std::to_string(row.features.size() + 1));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError("dataset file has no data rows: " + path);

    const std::size_t n = rows.size();
    const std::size_t test_count = n / 5;
    const std::size_t train_count = n - test_count;

    // Two-pass per-feature standardization on the train split.
    std::vector<double> mean(feature_dim, 0.0), stddev(feature_dim, 0.0);
    for (std::size_t i = 0; i < train_count; ++i) {
        for (std::size_t j = 0; j < feature_dim; ++j) mean[j] += rows[i].features[j];
    }
    for (std::size_t j = 0; j < feature_dim; ++j) mean[j] /= static_cast<double>(train_count);
    for (std::size_t i = 0; i < train_count; ++i) {
        for (std::size_t j = 0; j < feature_dim; ++j) {
            const double d = rows[i].features[j] - mean[j];
            stddev[j] += d * d;
        }
    }
    for (std::size_t j = 0; j < feature_dim; ++j) {
        stddev[j] = std::sqrt(stddev[j] / static_cast<double>(train_count));
    }

    Dataset ds;
    ds.feature_dim = feature_dim;
    ds.classes = classes;
    ds.train_x = Matrix(train_count, feature_dim);
    ds.train_y.resize(train_count);
    ds.test_x = Matrix(test_count, feature_dim);
    ds.test_y.resize(test_count);
    for (std::size_t i = 0; i < n; ++i) {
        Matrix& x = i < train_count ? ds.train_x : ds.test_x;
        std::vector<std::size_t>& y = i < train_count ? ds.train_y : ds.test_y;
        const std::size_t r = i < train_count ? i : i - train_count;
        for (std::size_t j = 0; j < feature_dim; ++j) {
            x(r, j) = stddev[j] < 1e-12 ? 0.0 : (rows[i].features[j] - mean[j]) / stddev[j];
        }
        y[r] = rows[i].label;
    }
    return ds;
}

void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write dataset file: " + path);
    for (std::size_t j = 0; j < ds.feature_dim; ++j) out << 'f' << j << ',';
    out << "label\n";
    char buf[64];
    const auto write_rows = [&](const Matrix& x, const std::vector<std::size_t>& y) {
        for (std::size_t i = 0; i < x.rows; ++i) {
            for (std::size_t j = 0; j < x.cols; ++j) {
                std::snprintf(buf, sizeof(buf), "%.17g", x(i, j));
                out << buf << ',';
            }
            out << y[i] << '\n';
        }
    };
    write_rows(ds.train_x, ds.train_y);
    write_rows(ds.test_x, ds.test_y);
    if (!out) throw ConfigError("failed while writing dataset file: " + path);
}

}  // namespace n2n
