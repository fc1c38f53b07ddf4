#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "n2n/network.hpp"

namespace n2n {

// Dense symmetric n x n matrix. Constructed symmetric (mirror entries are
// assigned together), never symmetrized after the fact.
struct SymMatrix {
    std::size_t n = 0;
    std::vector<double> data;

    SymMatrix() = default;
    explicit SymMatrix(std::size_t size) : n(size), data(size * size, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return data[i * n + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * n + j]; }

    void set_sym(std::size_t i, std::size_t j, double v) {
        data[i * n + j] = v;
        data[j * n + i] = v;
    }

    static SymMatrix identity(std::size_t size);
    double frobenius() const;
};

struct Spectrum {
    std::vector<double> eigenvalues;  // ascending
    Matrix u;                         // column k pairs with eigenvalues[k]
};

struct HeatSignature {
    std::vector<double> s;
    double t = 0.0;
    std::vector<std::uint8_t> sources;
};

struct ScreePoint {
    double t = 0.0;
    double alpha = 0.0;
};

struct ScreeCurve {
    std::size_t k = 0;
    std::vector<ScreePoint> points;
    bool degenerate = false;  // set when the curve decreased beyond 1e-12
};

// Undirected graph over all neurons, indexed layer by layer (inputs first).
// Every unmasked sequential or skip weight contributes one edge; edge weight
// is |w| in weighted mode, 1 otherwise.
SymMatrix to_adjacency(const Network& net, bool weighted);

// L = D - W. Rejects negative entries or a nonzero diagonal.
SymMatrix graph_laplacian(const SymMatrix& w);

// Cyclic Jacobi eigendecomposition, run until the off-diagonal Frobenius norm
// drops below 1e-12 * ||A||_F; throws ConvergenceError after 100 sweeps.
// Eigenvalues ascending, eigenvector columns permuted to match.
Spectrum eig_sym(const SymMatrix& a);

// H(t) = U exp(-Lambda t) U^T, assembled symmetrically.
SymMatrix heat_matrix(const Spectrum& spec, double t);

// S = H(t) * sources. `t` is recorded for comparability checks.
HeatSignature heat_signature(const SymMatrix& h, const std::vector<std::uint8_t>& sources,
                             double t);

// F = ||S_ref - S_prune||_2; signatures must share n and t.
double signature_distance(const HeatSignature& ref, const HeatSignature& prune);

// alpha(K, t) = sum_{k=2}^{K+1} e^{-t lambda_k} / sum_{k=2}^{n} e^{-t lambda_k}
// (1-based eigenvalue indexing; lambda_1 excluded). Evaluated with exponents
// shifted by lambda_2 so large t cannot underflow the denominator.
double alpha(const Spectrum& spec, std::size_t k, double t);

ScreeCurve scree_curve(const Spectrum& spec, std::size_t k, const std::vector<double>& t_grid);

// Smallest grid t with alpha >= threshold; +infinity when never reached.
double saturation_time(const ScreeCurve& curve, double threshold);

// round(percent * (n-1)), clamped to [1, n-1].
std::size_t k_from_percent(double percent, std::size_t n);

// Text form: header "n <count>", then one "u v weight" line per upper-triangle
// edge, 0-indexed.
void export_adjacency(const SymMatrix& w, const std::string& path);
SymMatrix import_adjacency(const std::string& path);

// CSV columns t,alpha at 9 significant digits.
void write_scree_csv(const ScreeCurve& curve, const std::string& path);

}  // namespace n2n
