#include "n2n/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "n2n/errors.hpp"

namespace n2n {

namespace {

std::string shape_str(std::size_t r, std::size_t c) {
    return "(" + std::to_string(r) + "x" + std::to_string(c) + ")";
}

}  // namespace

Matrix::Matrix(std::size_t r, std::size_t c, std::vector<double> d)
    : rows(r), cols(c), data(std::move(d)) {
    if (data.size() != rows * cols) {
        throw DimensionError("matrix data length " + std::to_string(data.size()) +
                             " does not match shape " + shape_str(rows, cols));
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

std::size_t Mask::nnz() const {
    return static_cast<std::size_t>(
        std::count(bits.begin(), bits.end(), static_cast<std::uint8_t>(1)));
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) {
        throw DimensionError("matmul shape mismatch: " + shape_str(a.rows, a.cols) + " x " +
                             shape_str(b.rows, b.cols));
    }
    Matrix out(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ai = &a.data[i * a.cols];
        double* oi = &out.data[i * b.cols];
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = &b.data[k * b.cols];
            for (std::size_t j = 0; j < b.cols; ++j) oi[j] += aik * bk[j];
        }
    }
    return out;
}

Matrix masked_apply(const Matrix& w, const Mask& m) {
    if (w.rows != m.rows || w.cols != m.cols) {
        throw DimensionError("masked_apply shape mismatch: " + shape_str(w.rows, w.cols) +
                             " vs " + shape_str(m.rows, m.cols));
    }
    Matrix out(w.rows, w.cols);
    for (std::size_t i = 0; i < w.data.size(); ++i) {
        out.data[i] = m.bits[i] ? w.data[i] : 0.0;
    }
    return out;
}

std::vector<double> masked_matvec(const Matrix& w, const Mask& m, const std::vector<double>& x) {
    if (w.rows != m.rows || w.cols != m.cols || x.size() != w.cols) {
        throw DimensionError("masked_matvec shape mismatch: " + shape_str(w.rows, w.cols) +
                             " vs mask " + shape_str(m.rows, m.cols) + " vs input length " +
                             std::to_string(x.size()));
    }
    std::vector<double> y(w.rows, 0.0);
    for (std::size_t r = 0; r < w.rows; ++r) {
        const double* wr = &w.data[r * w.cols];
        const std::uint8_t* mr = &m.bits[r * w.cols];
        double acc = 0.0;
        for (std::size_t c = 0; c < w.cols; ++c) {
            if (mr[c]) acc += wr[c] * x[c];
        }
        y[r] = acc;
    }
    return y;
}

std::vector<double> masked_matvec_t(const Matrix& w, const Mask& m, const std::vector<double>& x) {
    if (w.rows != m.rows || w.cols != m.cols || x.size() != w.rows) {
        throw DimensionError("masked_matvec_t shape mismatch: " + shape_str(w.rows, w.cols) +
                             " vs mask " + shape_str(m.rows, m.cols) + " vs input length " +
                             std::to_string(x.size()));
    }
    std::vector<double> y(w.cols, 0.0);
    for (std::size_t r = 0; r < w.rows; ++r) {
        const double xr = x[r];
        if (xr == 0.0) continue;
        const double* wr = &w.data[r * w.cols];
        const std::uint8_t* mr = &m.bits[r * w.cols];
        for (std::size_t c = 0; c < w.cols; ++c) {
            if (mr[c]) y[c] += wr[c] * xr;
        }
    }
    return y;
}

std::vector<double> relu(const std::vector<double>& x) {
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
    return y;
}

std::vector<double> relu_grad(const std::vector<double>& x) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = x[i] > 0.0 ? 1.0 : 0.0;
    return g;
}

std::pair<double, std::vector<double>> softmax_xent(const std::vector<double>& logits,
                                                    std::size_t label) {
    if (label >= logits.size()) {
        throw DimensionError("softmax_xent label " + std::to_string(label) +
                             " out of range for " + std::to_string(logits.size()) + " logits");
    }
    const double zmax = *std::max_element(logits.begin(), logits.end());
    double denom = 0.0;
    for (const double z : logits) denom += std::exp(z - zmax);
    std::vector<double> grad(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        grad[i] = std::exp(logits[i] - zmax) / denom;
    }
    const double loss = -(logits[label] - zmax - std::log(denom));
    grad[label] -= 1.0;
    return {loss, grad};
}

}  // namespace n2n
