#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace n2n {

// Dense row-major matrix of 64-bit reals.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    Matrix(std::size_t r, std::size_t c, std::vector<double> d);

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::size_t size() const { return rows * cols; }

    static Matrix identity(std::size_t n);
};

// Binary gate with the same shape as the matrix it masks.
struct Mask {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> bits;

    Mask() = default;
    Mask(std::size_t r, std::size_t c, std::uint8_t fill = 1)
        : rows(r), cols(c), bits(r * c, fill) {}

    std::uint8_t& operator()(std::size_t r, std::size_t c) { return bits[r * cols + c]; }
    std::uint8_t operator()(std::size_t r, std::size_t c) const { return bits[r * cols + c]; }

    std::size_t size() const { return rows * cols; }
    std::size_t nnz() const;
    double density() const { return size() == 0 ? 0.0 : static_cast<double>(nnz()) / size(); }
};

Matrix matmul(const Matrix& a, const Matrix& b);

// Elementwise w * m; gated-off entries come out exactly 0.0.
Matrix masked_apply(const Matrix& w, const Mask& m);

// y = (W (.) M) x, without materializing the masked matrix.
std::vector<double> masked_matvec(const Matrix& w, const Mask& m, const std::vector<double>& x);

// y = (W (.) M)^T x.
std::vector<double> masked_matvec_t(const Matrix& w, const Mask& m, const std::vector<double>& x);

std::vector<double> relu(const std::vector<double>& x);

// Subgradient at 0 is taken as 0.
std::vector<double> relu_grad(const std::vector<double>& x);

// Stable -log softmax(logits)[label] and its gradient wrt logits.
std::pair<double, std::vector<double>> softmax_xent(const std::vector<double>& logits,
                                                    std::size_t label);

}  // namespace n2n
