#include "n2n/connectivity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "n2n/errors.hpp"

namespace n2n {

namespace {

double offdiag_frobenius(const SymMatrix& a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.n; ++i) {
        for (std::size_t j = 0; j < a.n; ++j) {
            if (i != j) sum += a.at(i, j) * a.at(i, j);
        }
    }
    return std::sqrt(sum);
}

std::vector<std::size_t> layer_offsets(const Network& net) {
    std::vector<std::size_t> offsets(net.layer_dims.size() + 1, 0);
    for (std::size_t i = 0; i < net.layer_dims.size(); ++i) {
        offsets[i + 1] = offsets[i] + net.layer_dims[i];
    }
    return offsets;
}

}  // namespace

SymMatrix SymMatrix::identity(std::size_t size) {
    SymMatrix m(size);
    for (std::size_t i = 0; i < size; ++i) m.at(i, i) = 1.0;
    return m;
}

double SymMatrix::frobenius() const {
    double sum = 0.0;
    for (const double v : data) sum += v * v;
    return std::sqrt(sum);
}

SymMatrix to_adjacency(const Network& net, bool weighted) {
    const std::vector<std::size_t> offsets = layer_offsets(net);
    SymMatrix adj(offsets.back());
    const auto add_edges = [&](const Matrix& w, const Mask& m, std::size_t from_layer,
                               std::size_t to_layer) {
        const std::size_t src0 = offsets[from_layer];
        const std::size_t dst0 = offsets[to_layer];
        for (std::size_t r = 0; r < w.rows; ++r) {
            for (std::size_t c = 0; c < w.cols; ++c) {
                if (!m(r, c)) continue;
                adj.set_sym(src0 + c, dst0 + r, weighted ? std::fabs(w(r, c)) : 1.0);
            }
        }
    };
    for (std::size_t l = 0; l < net.seq_weights.size(); ++l) {
        add_edges(net.seq_weights[l], net.seq_masks[l], l, l + 1);
    }
    for (const SkipConn& s : net.skips) {
        add_edges(s.weight, s.mask, s.from_layer, s.to_layer);
    }
    return adj;
}

SymMatrix graph_laplacian(const SymMatrix& w) {
    for (std::size_t i = 0; i < w.n; ++i) {
        if (w.at(i, i) != 0.0) {
            throw ConfigError("adjacency has nonzero diagonal at node " + std::to_string(i));
        }
        for (std::size_t j = 0; j < w.n; ++j) {
            if (w.at(i, j) < 0.0) {
                throw ConfigError("adjacency entry (" + std::to_string(i) + "," +
                                  std::to_string(j) + ") is negative");
            }
        }
    }
    SymMatrix lap(w.n);
    for (std::size_t i = 0; i < w.n; ++i) {
        double degree = 0.0;
        for (std::size_t j = 0; j < w.n; ++j) degree += w.at(i, j);
        for (std::size_t j = 0; j < w.n; ++j) lap.at(i, j) = -w.at(i, j);
        lap.at(i, i) = degree;
    }
    return lap;
}

Spectrum eig_sym(const SymMatrix& a) {
    const std::size_t n = a.n;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (a.at(i, j) != a.at(j, i)) {
                throw DimensionError("eig_sym input is not symmetric at (" + std::to_string(i) +
                                     "," + std::to_string(j) + ")");
            }
        }
    }

    SymMatrix work = a;
    Matrix u = Matrix::identity(n);
    const double fro = a.frobenius();
    const double target = 1e-12 * fro;
    constexpr std::size_t kMaxSweeps = 100;

    bool converged = fro == 0.0 || offdiag_frobenius(work) <= target;
    for (std::size_t sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = work.at(p, q);
                if (apq == 0.0) continue;
                const double tau = (work.at(q, q) - work.at(p, p)) / (2.0 * apq);
                const double t = tau >= 0.0 ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                            : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                const double app = work.at(p, p);
                const double aqq = work.at(q, q);
                work.at(p, p) = app - t * apq;
                work.at(q, q) = aqq + t * apq;
                work.at(p, q) = 0.0;
                work.at(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = work.at(k, p);
                    const double akq = work.at(k, q);
                    work.at(k, p) = c * akp - s * akq;
                    work.at(p, k) = work.at(k, p);
                    work.at(k, q) = s * akp + c * akq;
                    work.at(q, k) = work.at(k, q);
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double ukp = u(k, p);
                    const double ukq = u(k, q);
                    u(k, p) = c * ukp - s * ukq;
                    u(k, q) = s * ukp + c * ukq;
                }
            }
        }
        converged = offdiag_frobenius(work) <= target;
    }
    if (!converged) {
        throw ConvergenceError("Jacobi eigensolver failed to converge in " +
                               std::to_string(kMaxSweeps) + " sweeps; off-diagonal residual " +
                               std::to_string(offdiag_frobenius(work)) + " vs target " +
                               std::to_string(target));
    }

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::stable_sort(perm.begin(), perm.end(), [&](std::size_t lhs, std::size_t rhs) {
        return work.at(lhs, lhs) < work.at(rhs, rhs);
    });

    Spectrum spec;
    spec.eigenvalues.resize(n);
    spec.u = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        spec.eigenvalues[k] = work.at(perm[k], perm[k]);
        for (std::size_t r = 0; r < n; ++r) spec.u(r, k) = u(r, perm[k]);
    }
    return spec;
}

SymMatrix heat_matrix(const Spectrum& spec, double t) {
    if (t < 0.0) throw ConfigError("heat_matrix requires t >= 0, got " + std::to_string(t));
    const std::size_t n = spec.eigenvalues.size();
    if (spec.u.rows != n || spec.u.cols != n) {
        throw DimensionError("spectrum U is " + std::to_string(spec.u.rows) + "x" +
                             std::to_string(spec.u.cols) + " for " + std::to_string(n) +
                             " eigenvalues");
    }
    std::vector<double> decay(n);
    for (std::size_t k = 0; k < n; ++k) decay[k] = std::exp(-spec.eigenvalues[k] * t);

    // V = U * diag(decay); H = V U^T assembled on the upper triangle and
    // mirrored, so H is symmetric to the last bit.
    Matrix v(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t k = 0; k < n; ++k) v(r, k) = spec.u(r, k) * decay[k];
    }
    SymMatrix h(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double sum = 0.0;
            for (std::size_t k = 0; k < n; ++k) sum += v(i, k) * spec.u(j, k);
            h.set_sym(i, j, sum);
        }
    }
    return h;
}

HeatSignature heat_signature(const SymMatrix& h, const std::vector<std::uint8_t>& sources,
                             double t) {
    if (sources.size() != h.n) {
        throw DimensionError("heat_signature: " + std::to_string(sources.size()) +
                             " sources vs " + std::to_string(h.n) + " nodes");
    }
    HeatSignature sig;
    sig.t = t;
    sig.sources = sources;
    sig.s.assign(h.n, 0.0);
    for (std::size_t i = 0; i < h.n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < h.n; ++j) {
            if (sources[j]) sum += h.at(i, j);
        }
        sig.s[i] = sum;
    }
    return sig;
}

double signature_distance(const HeatSignature& ref, const HeatSignature& prune) {
    if (ref.s.size() != prune.s.size()) {
        throw IncomparableError("signatures cover " + std::to_string(ref.s.size()) + " and " +
                                std::to_string(prune.s.size()) + " nodes");
    }
    if (ref.t != prune.t) {
        throw IncomparableError("signatures taken at different diffusion times " +
                                std::to_string(ref.t) + " and " + std::to_string(prune.t));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < ref.s.size(); ++i) {
        const double d = ref.s[i] - prune.s[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

double alpha(const Spectrum& spec, std::size_t k, double t) {
    const std::size_t n = spec.eigenvalues.size();
    if (n < 2 || k < 1 || k > n - 1) {
        throw ConfigError("alpha requires 1 <= K <= n-1, got K=" + std::to_string(k) +
                          " with n=" + std::to_string(n));
    }
    if (t < 0.0) throw ConfigError("alpha requires t >= 0, got " + std::to_string(t));
    const double shift = spec.eigenvalues[1];
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double term = std::exp(-t * (spec.eigenvalues[i] - shift));
        if (i <= k) num += term;
        den += term;
    }
    return num / den;
}

ScreeCurve scree_curve(const Spectrum& spec, std::size_t k, const std::vector<double>& t_grid) {
    if (t_grid.empty()) throw ConfigError("scree_curve requires a non-empty time grid");
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (t_grid[i] <= t_grid[i - 1]) {
            throw ConfigError("scree_curve grid must be strictly ascending at index " +
                              std::to_string(i));
        }
    }
    ScreeCurve curve;
    curve.k = k;
    curve.points.reserve(t_grid.size());
    for (const double t : t_grid) {
        curve.points.push_back({t, alpha(spec, k, t)});
    }
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        if (curve.points[i].alpha < curve.points[i - 1].alpha - 1e-12) {
            curve.degenerate = true;
            break;
        }
    }
    return curve;
}

double saturation_time(const ScreeCurve& curve, double threshold) {
    if (curve.points.empty()) throw ConfigError("saturation_time requires a non-empty curve");
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw ConfigError("saturation threshold must lie in (0, 1], got " +
                          std::to_string(threshold));
    }
    for (const ScreePoint& p : curve.points) {
        if (p.alpha >= threshold) return p.t;
    }
    return std::numeric_limits<double>::infinity();
}

std::size_t k_from_percent(double percent, std::size_t n) {
    if (n < 2) throw ConfigError("k_from_percent requires at least 2 nodes");
    if (!(percent > 0.0 && percent <= 1.0)) {
        throw ConfigError("eigenvalue percentage must lie in (0, 1], got " +
                          std::to_string(percent));
    }
    const auto k = static_cast<std::size_t>(std::llround(percent * static_cast<double>(n - 1)));
    return std::min(std::max<std::size_t>(k, 1), n - 1);
}

void export_adjacency(const SymMatrix& w, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write adjacency file: " + path);
    out << "n " << w.n << "\n";
    char buf[96];
    for (std::size_t i = 0; i < w.n; ++i) {
        for (std::size_t j = i + 1; j < w.n; ++j) {
            if (w.at(i, j) == 0.0) continue;
            std::snprintf(buf, sizeof(buf), "%zu %zu %.17g\n", i, j, w.at(i, j));
            out << buf;
        }
    }
    if (!out) throw ConfigError("failed while writing adjacency file: " + path);
}

SymMatrix import_adjacency(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open adjacency file: " + path);
    std::string line;
    std::size_t lineno = 0;
    std::size_t n = 0;
    bool have_header = false;
    SymMatrix adj;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        if (!have_header) {
            std::string tag;
            if (!(ss >> tag >> n) || tag != "n") {
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": expected header 'n <count>'");
            }
            adj = SymMatrix(n);
            have_header = true;
            continue;
        }
        std::size_t u = 0, v = 0;
        double weight = 0.0;
        if (!(ss >> u >> v >> weight)) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'u v weight'");
        }
        if (u >= n || v >= n) {
            throw ConfigError("line " + std::to_string(lineno) + ": node index out of range");
        }
        if (u == v) {
            throw ConfigError("line " + std::to_string(lineno) + ": self-loop not allowed");
        }
        adj.set_sym(u, v, weight);
    }
    if (!have_header) throw ConfigError("adjacency file has no header: " + path);
    return adj;
}

void write_scree_csv(const ScreeCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write scree file: " + path);
    out << "t,alpha\n";
    char buf[96];
    for (const ScreePoint& p : curve.points) {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g\n", p.t, p.alpha);
        out << buf;
    }
    if (!out) throw ConfigError("failed while writing scree file: " + path);
}

}  // namespace n2n
