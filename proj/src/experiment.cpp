#include "n2n/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <utility>

#include "n2n/checkpoint.hpp"
#include "n2n/errors.hpp"
#include "n2n/pruning.hpp"
#include "n2n/rng.hpp"
#include "n2n/skipgen.hpp"

namespace n2n {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(); }

double finite_or_inf(const json& j) { return j.is_null() ? kInf : j.get<double>(); }

std::string format_density(double d) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", d);
    return buf;
}

std::string cell_label(Method m, double density) {
    return method_to_string(m) + "-d" + format_density(density);
}

void check_known_keys(const json& doc, std::initializer_list<const char*> known,
                      const std::string& where) {
    if (!doc.is_object()) throw ConfigError(where + " must be a JSON object");
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const bool ok = std::any_of(known.begin(), known.end(),
                                    [&](const char* k) { return it.key() == k; });
        if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

std::vector<Sample> snip_batch(const Dataset& data) {
    const std::size_t n = std::min<std::size_t>(128, data.train_x.rows);
    std::vector<Sample> batch;
    batch.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x(data.train_x.cols);
        for (std::size_t j = 0; j < x.size(); ++j) x[j] = data.train_x(i, j);
        batch.emplace_back(std::move(x), data.train_y[i]);
    }
    return batch;
}

Network build_and_prune(const ExperimentConfig& cfg, Method method, double density_target,
                        std::uint64_t seed, const Dataset& data) {
    NetworkSpec nspec;
    nspec.layer_dims = cfg.layer_dims;
    nspec.skip_span = cfg.span;
    nspec.seed = stage_seed(seed, kStageNet);
    nspec.validate();
    Network net = build_network(nspec);
    if (method == Method::Baseline) return net;

    const std::uint64_t prune_seed = stage_seed(seed, kStagePrune);
    SkipBudget budget;
    budget.total_density = density_target;
    budget.split_ratio = cfg.split_ratio;
    budget.span = cfg.span;

    switch (method) {
        case Method::RP: {
            apply_mask_set(net, random_prune(net, density_target, prune_seed));
            return net;
        }
        case Method::CSP: {
            apply_mask_set(net, csp_prune(net, snip_batch(data), density_target));
            return net;
        }
        case Method::N2NSkipRP: {
            const MaskSet masks = random_prune(net, density_target, prune_seed);
            return insert_n2nskip(net, masks, budget, stage_seed(seed, kStageSkip));
        }
        case Method::N2NSkipCSP: {
            const SaliencyMap saliency = snip_saliency(net, snip_batch(data));
            const MaskSet masks = csp_prune_from_saliency(net, saliency, density_target);
            return insert_n2nskip(net, masks, budget, stage_seed(seed, kStageSkip), &saliency);
        }
        default:
            throw ConfigError("unhandled method");
    }
}

struct RunAnalysis {
    Spectrum spectrum;
    ScreeCurve scree;
    double saturation = 0.0;
    HeatSignature signature;
};

RunAnalysis analyze_network(const Network& net, const AnalysisConfig& ac) {
    const SymMatrix adj = to_adjacency(net, ac.weighted);
    Spectrum spec = eig_sym(graph_laplacian(adj));
    const std::size_t k = k_from_percent(ac.k_percent, spec.eigenvalues.size());

    RunAnalysis out;
    out.scree = scree_curve(spec, k, ac.grid());
    out.saturation = saturation_time(out.scree, ac.threshold);
    const SymMatrix h = heat_matrix(spec, ac.t);
    std::vector<std::uint8_t> sources(adj.n, 0);
    for (std::size_t i = 0; i < net.layer_dims.front(); ++i) sources[i] = 1;
    out.signature = heat_signature(h, sources, ac.t);
    out.spectrum = std::move(spec);
    return out;
}

struct EvalStats {
    double train_loss = 0.0;
    double train_acc = 0.0;
    double test_acc = 0.0;
};

EvalStats eval_stats(const Network& net, const Dataset& data) {
    EvalStats stats;
    stats.train_acc = evaluate(net, data.train_x, data.train_y);
    stats.test_acc = evaluate(net, data.test_x, data.test_y);
    std::vector<double> x(data.train_x.cols);
    double loss = 0.0;
    for (std::size_t i = 0; i < data.train_x.rows; ++i) {
        for (std::size_t j = 0; j < x.size(); ++j) x[j] = data.train_x(i, j);
        loss += softmax_xent(forward(net, x).a.back(), data.train_y[i]).first;
    }
    stats.train_loss = data.train_x.rows == 0 ? 0.0 : loss / static_cast<double>(data.train_x.rows);
    return stats;
}

json run_result_to_json(const RunResult& r) {
    json doc;
    doc["method"] = method_to_string(r.method);
    doc["density_target"] = r.density;
    doc["seed"] = r.seed;
    doc["density_achieved"] = r.density_achieved;
    doc["test_accuracy"] = r.test_accuracy;
    doc["train_accuracy"] = r.train_accuracy;
    doc["train_loss"] = r.train_loss;
    doc["f_distance"] = r.f_distance;
    doc["saturation_time"] = finite_or_null(r.saturation_time);
    doc["ref_saturation_time"] = finite_or_null(r.ref_saturation_time);
    doc["dir"] = r.dir;
    return doc;
}

RunResult run_result_from_json(const json& doc) {
    RunResult r;
    r.method = method_from_string(doc.at("method").get<std::string>());
    r.density = doc.at("density_target").get<double>();
    r.seed = doc.at("seed").get<std::uint64_t>();
    r.density_achieved = doc.at("density_achieved").get<double>();
    r.test_accuracy = doc.at("test_accuracy").get<double>();
    r.train_accuracy = doc.at("train_accuracy").get<double>();
    r.train_loss = doc.at("train_loss").get<double>();
    r.f_distance = doc.at("f_distance").get<double>();
    r.saturation_time = finite_or_inf(doc.at("saturation_time"));
    r.ref_saturation_time = finite_or_inf(doc.at("ref_saturation_time"));
    r.dir = doc.value("dir", std::string());
    return r;
}

void write_json_file(const json& doc, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << doc.dump(2) << "\n";
    if (!out) throw ConfigError("failed while writing " + path.string());
}

RunResult run_single(const ExperimentConfig& cfg, Method method, double density_eff,
                     std::uint64_t seed, const Dataset& data, ReferenceCache& cache,
                     const fs::path& exp_root) {
    const ReferenceEntry& ref = cache.at(seed);

    Network net;
    History hist;
    RunAnalysis an;
    if (method == Method::Baseline) {
        net = ref.net;
        hist = ref.history;
        an.spectrum = ref.spectrum;
        an.scree = ref.scree;
        an.saturation = ref.saturation;
        an.signature = ref.signature;
    } else {
        net = build_and_prune(cfg, method, density_eff, seed, data);
        hist = train(net, data, cfg.hp, stage_seed(seed, kStageTrain));
        an = analyze_network(net, cfg.analysis);
    }

    RunResult r;
    r.method = method;
    r.density = density_eff;
    r.seed = seed;
    r.density_achieved = density(net);
    const EvalStats stats = eval_stats(net, data);
    r.test_accuracy = stats.test_acc;
    r.train_accuracy = stats.train_acc;
    r.train_loss = stats.train_loss;
    r.f_distance = signature_distance(ref.signature, an.signature);
    r.saturation_time = an.saturation;
    r.ref_saturation_time = ref.saturation;
    r.dir = cell_label(method, density_eff) + "-s" + std::to_string(seed);

    const fs::path run_dir = exp_root / r.dir;
    fs::create_directories(run_dir);
    save_checkpoint(net, (run_dir / "checkpoint.json").string());
    write_history_csv(hist, (run_dir / "history.csv").string());
    write_scree_csv(an.scree, (run_dir / "scree.csv").string());

    json metrics = run_result_to_json(r);
    metrics.erase("dir");
    metrics["epochs"] = cfg.hp.epochs;
    metrics["analysis"] = {{"t", cfg.analysis.t},
                           {"k_percent", cfg.analysis.k_percent},
                           {"threshold", cfg.analysis.threshold},
                           {"weighted", cfg.analysis.weighted}};
    write_json_file(metrics, run_dir / "metrics.json");
    return r;
}

}  // namespace

Method method_from_string(const std::string& s) {
    if (s == "baseline") return Method::Baseline;
    if (s == "rp") return Method::RP;
    if (s == "csp") return Method::CSP;
    if (s == "n2nskip-rp") return Method::N2NSkipRP;
    if (s == "n2nskip-csp") return Method::N2NSkipCSP;
    throw ConfigError("unknown method '" + s +
                      "' (expected baseline|rp|csp|n2nskip-rp|n2nskip-csp)");
}

std::string method_to_string(Method m) {
    switch (m) {
        case Method::Baseline: return "baseline";
        case Method::RP: return "rp";
        case Method::CSP: return "csp";
        case Method::N2NSkipRP: return "n2nskip-rp";
        case Method::N2NSkipCSP: return "n2nskip-csp";
    }
    throw ConfigError("unhandled method value");
}

bool method_uses_density(Method m) { return m != Method::Baseline; }

bool method_uses_skips(Method m) {
    return m == Method::N2NSkipRP || m == Method::N2NSkipCSP;
}

std::vector<double> AnalysisConfig::grid() const {
    if (!t_grid.empty()) return t_grid;
    std::vector<double> grid;
    grid.reserve(41);
    for (int i = 0; i <= 40; ++i) {
        grid.push_back(std::pow(10.0, -2.0 + static_cast<double>(i) * 0.125));
    }
    return grid;
}

Dataset make_dataset(const DatasetConfig& cfg) {
    if (cfg.type == "blobs") {
        return gen_blobs(cfg.classes, cfg.dim, cfg.per_class, cfg.spread, cfg.seed);
    }
    if (cfg.type == "csv") {
        if (cfg.path.empty()) throw ConfigError("dataset type 'csv' requires a path");
        return load_csv(cfg.path, cfg.classes);
    }
    throw ConfigError("unknown dataset type '" + cfg.type + "' (expected blobs|csv)");
}

void ExperimentConfig::validate() const {
    if (name.empty() || name.find('/') != std::string::npos ||
        name.find('\\') != std::string::npos) {
        throw ConfigError("experiment name must be a non-empty path-safe string");
    }
    NetworkSpec nspec;
    nspec.layer_dims = layer_dims;
    nspec.skip_span = span;
    nspec.validate();
    if (seeds.empty()) throw ConfigError("seeds list is empty");
    std::vector<std::uint64_t> sorted = seeds;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ConfigError("seeds list contains duplicates");
    }
    hp.validate();
    if (method_uses_density(method) && !(density > 0.0 && density <= 1.0)) {
        throw ConfigError("density must lie in (0, 1], got " + std::to_string(density));
    }
    if (dataset.type == "blobs") {
        if (dataset.dim != layer_dims.front()) {
            throw ConfigError("dataset dim " + std::to_string(dataset.dim) +
                              " does not match network inputs " +
                              std::to_string(layer_dims.front()));
        }
        if (dataset.classes != layer_dims.back()) {
            throw ConfigError("dataset classes " + std::to_string(dataset.classes) +
                              " does not match network outputs " +
                              std::to_string(layer_dims.back()));
        }
    }
    if (analysis.t < 0.0) throw ConfigError("analysis.t must be non-negative");
    if (!(analysis.k_percent > 0.0 && analysis.k_percent <= 1.0)) {
        throw ConfigError("analysis.k_percent must lie in (0, 1]");
    }
    if (!(analysis.threshold > 0.0 && analysis.threshold <= 1.0)) {
        throw ConfigError("analysis.threshold must lie in (0, 1]");
    }
    for (std::size_t i = 0; i < analysis.t_grid.size(); ++i) {
        if (analysis.t_grid[i] < 0.0 ||
            (i > 0 && analysis.t_grid[i] <= analysis.t_grid[i - 1])) {
            throw ConfigError("analysis.t_grid must be non-negative and strictly ascending");
        }
    }
}

ExperimentConfig config_from_json(const json& doc) {
    ExperimentConfig cfg;
    try {
        check_known_keys(doc,
                         {"name", "network", "method", "density", "split_ratio", "seeds",
                          "hyperparams", "dataset", "analysis"},
                         "config");
        cfg.name = doc.value("name", cfg.name);
        if (doc.contains("network")) {
            const json& net = doc.at("network");
            check_known_keys(net, {"layer_dims", "k"}, "config.network");
            cfg.layer_dims = net.value("layer_dims", cfg.layer_dims);
            cfg.span = net.value("k", cfg.span);
        }
        if (doc.contains("method")) {
            cfg.method = method_from_string(doc.at("method").get<std::string>());
        }
        cfg.density = doc.value("density", cfg.density);
        cfg.split_ratio = doc.value("split_ratio", cfg.split_ratio);
        cfg.seeds = doc.value("seeds", cfg.seeds);
        if (doc.contains("hyperparams")) {
            const json& hp = doc.at("hyperparams");
            check_known_keys(hp,
                             {"lr0", "momentum", "decay_factor", "decay_every", "weight_decay",
                              "batch_size", "epochs"},
                             "config.hyperparams");
            cfg.hp.lr0 = hp.value("lr0", cfg.hp.lr0);
            cfg.hp.momentum = hp.value("momentum", cfg.hp.momentum);
            cfg.hp.decay_factor = hp.value("decay_factor", cfg.hp.decay_factor);
            cfg.hp.decay_every = hp.value("decay_every", cfg.hp.decay_every);
            cfg.hp.weight_decay = hp.value("weight_decay", cfg.hp.weight_decay);
            cfg.hp.batch_size = hp.value("batch_size", cfg.hp.batch_size);
            cfg.hp.epochs = hp.value("epochs", cfg.hp.epochs);
        }
        if (doc.contains("dataset")) {
            const json& ds = doc.at("dataset");
            check_known_keys(ds, {"type", "classes", "dim", "per_class", "spread", "seed", "path"},
                             "config.dataset");
            cfg.dataset.type = ds.value("type", cfg.dataset.type);
            cfg.dataset.classes = ds.value("classes", cfg.dataset.classes);
            cfg.dataset.dim = ds.value("dim", cfg.dataset.dim);
            cfg.dataset.per_class = ds.value("per_class", cfg.dataset.per_class);
            cfg.dataset.spread = ds.value("spread", cfg.dataset.spread);
            cfg.dataset.seed = ds.value("seed", cfg.dataset.seed);
            cfg.dataset.path = ds.value("path", cfg.dataset.path);
        }
        if (doc.contains("analysis")) {
            const json& an = doc.at("analysis");
            check_known_keys(an, {"t", "k_percent", "threshold", "weighted", "t_grid"},
                             "config.analysis");
            cfg.analysis.t = an.value("t", cfg.analysis.t);
            cfg.analysis.k_percent = an.value("k_percent", cfg.analysis.k_percent);
            cfg.analysis.threshold = an.value("threshold", cfg.analysis.threshold);
            cfg.analysis.weighted = an.value("weighted", cfg.analysis.weighted);
            cfg.analysis.t_grid = an.value("t_grid", cfg.analysis.t_grid);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
    json doc;
    doc["name"] = cfg.name;
    doc["network"] = {{"layer_dims", cfg.layer_dims}, {"k", cfg.span}};
    doc["method"] = method_to_string(cfg.method);
    doc["density"] = cfg.density;
    doc["split_ratio"] = cfg.split_ratio;
    doc["seeds"] = cfg.seeds;
    doc["hyperparams"] = {{"lr0", cfg.hp.lr0},
                          {"momentum", cfg.hp.momentum},
                          {"decay_factor", cfg.hp.decay_factor},
                          {"decay_every", cfg.hp.decay_every},
                          {"weight_decay", cfg.hp.weight_decay},
                          {"batch_size", cfg.hp.batch_size},
                          {"epochs", cfg.hp.epochs}};
    doc["dataset"] = {{"type", cfg.dataset.type},     {"classes", cfg.dataset.classes},
                      {"dim", cfg.dataset.dim},       {"per_class", cfg.dataset.per_class},
                      {"spread", cfg.dataset.spread}, {"seed", cfg.dataset.seed},
                      {"path", cfg.dataset.path}};
    doc["analysis"] = {{"t", cfg.analysis.t},
                       {"k_percent", cfg.analysis.k_percent},
                       {"threshold", cfg.analysis.threshold},
                       {"weighted", cfg.analysis.weighted},
                       {"t_grid", cfg.analysis.t_grid}};
    return doc;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
    return config_from_json(doc);
}

const ReferenceEntry& ReferenceCache::at(std::uint64_t seed) {
    auto it = entries_.find(seed);
    if (it != entries_.end()) return it->second;

    ReferenceEntry entry;
    NetworkSpec nspec;
    nspec.layer_dims = cfg_.layer_dims;
    nspec.skip_span = cfg_.span;
    nspec.seed = stage_seed(seed, kStageNet);
    entry.net = build_network(nspec);
    entry.history = train(entry.net, data_, cfg_.hp, stage_seed(seed, kStageTrain));
    RunAnalysis an = analyze_network(entry.net, cfg_.analysis);
    entry.spectrum = std::move(an.spectrum);
    entry.scree = std::move(an.scree);
    entry.saturation = an.saturation;
    entry.signature = std::move(an.signature);
    const EvalStats stats = eval_stats(entry.net, data_);
    entry.test_accuracy = stats.test_acc;
    entry.train_accuracy = stats.train_acc;
    entry.train_loss = stats.train_loss;
    return entries_.emplace(seed, std::move(entry)).first->second;
}

ExperimentReport run_sweep(const ExperimentConfig& base, const std::vector<Method>& methods,
                           const std::vector<double>& densities, const std::string& out_root) {
    base.validate();
    if (methods.empty()) throw ConfigError("sweep needs at least one method");
    for (const Method m : methods) {
        if (method_uses_density(m) && densities.empty()) {
            throw ConfigError("sweep needs at least one density for method " +
                              method_to_string(m));
        }
    }
    const Dataset data = make_dataset(base.dataset);
    const fs::path root = fs::path(out_root) / base.name;
    fs::create_directories(root);
    ReferenceCache cache(base, data);

    ExperimentReport report;
    report.name = base.name;
    report.config = config_to_json(base);
    for (const Method m : methods) {
        const std::vector<double> cell_densities =
            method_uses_density(m) ? densities : std::vector<double>{1.0};
        for (const double d : cell_densities) {
            for (const std::uint64_t seed : base.seeds) {
                report.runs.push_back(run_single(base, m, d, seed, data, cache, root));
            }
        }
    }
    write_json_file(report_to_json(report), root / "manifest.json");
    return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::string& out_root) {
    return run_sweep(cfg, {cfg.method}, {cfg.density}, out_root);
}

json report_to_json(const ExperimentReport& report) {
    json doc;
    doc["name"] = report.name;
    doc["config"] = report.config;
    json runs = json::array();
    for (const RunResult& r : report.runs) runs.push_back(run_result_to_json(r));
    doc["runs"] = std::move(runs);

    json aggregates;
    std::map<std::string, std::vector<const RunResult*>> cells;
    for (const RunResult& r : report.runs) {
        cells[cell_label(r.method, r.density)].push_back(&r);
    }
    for (const auto& [label, cell_runs] : cells) {
        double acc_sum = 0.0, f_sum = 0.0;
        for (const RunResult* r : cell_runs) {
            acc_sum += r->test_accuracy;
            f_sum += r->f_distance;
        }
        const double n = static_cast<double>(cell_runs.size());
        const double mean_acc = acc_sum / n;
        double var = 0.0;
        for (const RunResult* r : cell_runs) {
            const double d = r->test_accuracy - mean_acc;
            var += d * d;
        }
        const double std_acc = cell_runs.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
        aggregates[label] = {{"mean_test_accuracy", mean_acc},
                             {"std_test_accuracy", std_acc},
                             {"mean_f_distance", f_sum / n},
                             {"runs", cell_runs.size()}};
    }
    doc["aggregates"] = std::move(aggregates);
    return doc;
}

ExperimentReport report_from_json(const json& doc) {
    ExperimentReport report;
    try {
        report.name = doc.at("name").get<std::string>();
        report.config = doc.at("config");
        for (const json& r : doc.at("runs")) report.runs.push_back(run_result_from_json(r));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed manifest: ") + e.what());
    }
    return report;
}

ExperimentReport load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open manifest: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("manifest " + path + " is not valid JSON: " + e.what());
    }
    return report_from_json(doc);
}

ExperimentReport extract_cell(const ExperimentReport& report, Method method, double density) {
    ExperimentReport cell;
    cell.name = report.name;
    cell.config = report.config;
    const double eff = method_uses_density(method) ? density : 1.0;
    for (const RunResult& r : report.runs) {
        if (r.method == method && r.density == eff) cell.runs.push_back(r);
    }
    if (cell.runs.empty()) {
        throw ConfigError("manifest has no runs for " + cell_label(method, eff));
    }
    return cell;
}

ComparisonSummary compare(const ExperimentReport& a, const ExperimentReport& b) {
    const auto base_of = [](const ExperimentReport& r) {
        json base;
        if (r.config.contains("dataset")) base["dataset"] = r.config.at("dataset");
        if (r.config.contains("network")) base["network"] = r.config.at("network");
        return base;
    };
    if (base_of(a) != base_of(b)) {
        throw IncomparableError("reports use different datasets or network shapes");
    }
    const auto single_cell = [](const ExperimentReport& r, const char* which) {
        if (r.runs.empty()) throw IncomparableError(std::string(which) + " report has no runs");
        for (const RunResult& run : r.runs) {
            if (run.method != r.runs.front().method || run.density != r.runs.front().density) {
                throw IncomparableError(std::string(which) +
                                        " report spans multiple cells; extract one first");
            }
        }
    };
    single_cell(a, "first");
    single_cell(b, "second");

    std::map<std::uint64_t, const RunResult*> by_seed_b;
    for (const RunResult& r : b.runs) by_seed_b[r.seed] = &r;
    if (by_seed_b.size() != a.runs.size() || b.runs.size() != a.runs.size()) {
        throw IncomparableError("reports cover different seed lists");
    }

    ComparisonSummary summary;
    summary.label_a = cell_label(a.runs.front().method, a.runs.front().density);
    summary.label_b = cell_label(b.runs.front().method, b.runs.front().density);
    double acc_a = 0.0, acc_b = 0.0;
    for (const RunResult& ra : a.runs) {
        const auto it = by_seed_b.find(ra.seed);
        if (it == by_seed_b.end()) {
            throw IncomparableError("seed " + std::to_string(ra.seed) +
                                    " is missing from the second report");
        }
        const RunResult& rb = *it->second;
        SeedDelta d;
        d.seed = ra.seed;
        d.acc_delta = ra.test_accuracy - rb.test_accuracy;
        d.f_delta = ra.f_distance - rb.f_distance;
        const bool both_inf =
            std::isinf(ra.saturation_time) && std::isinf(rb.saturation_time);
        d.sat_delta = both_inf ? 0.0 : ra.saturation_time - rb.saturation_time;
        if (rb.f_distance > 0.0) {
            d.f_ratio = ra.f_distance / rb.f_distance;
        } else {
            d.f_ratio = ra.f_distance == 0.0 ? 1.0 : kInf;
        }
        summary.per_seed.push_back(d);
        if (d.acc_delta > 0.0) ++summary.acc_a_wins;
        if (d.f_delta < 0.0) ++summary.f_a_wins;
        if (both_inf || ra.saturation_time <= rb.saturation_time) ++summary.sat_a_not_worse;
        acc_a += ra.test_accuracy;
        acc_b += rb.test_accuracy;
    }
    const double n = static_cast<double>(a.runs.size());
    summary.mean_acc_a = acc_a / n;
    summary.mean_acc_b = acc_b / n;
    return summary;
}

json comparison_to_json(const ComparisonSummary& summary) {
    json doc;
    doc["a"] = summary.label_a;
    doc["b"] = summary.label_b;
    doc["mean_test_accuracy_a"] = summary.mean_acc_a;
    doc["mean_test_accuracy_b"] = summary.mean_acc_b;
    doc["accuracy_wins_a"] = summary.acc_a_wins;
    doc["f_wins_a"] = summary.f_a_wins;
    doc["saturation_not_worse_a"] = summary.sat_a_not_worse;
    doc["seeds"] = summary.per_seed.size();
    json per_seed = json::array();
    for (const SeedDelta& d : summary.per_seed) {
        per_seed.push_back({{"seed", d.seed},
                            {"acc_delta", d.acc_delta},
                            {"f_delta", d.f_delta},
                            {"sat_delta", finite_or_null(d.sat_delta)},
                            {"f_ratio", finite_or_null(d.f_ratio)}});
    }
    doc["per_seed"] = std::move(per_seed);
    return doc;
}

std::string default_out_root() {
    const char* env = std::getenv("N2NSKIP_OUT");
    return env && *env ? env : "out";
}

std::uint64_t stage_seed(std::uint64_t seed, std::uint64_t tag) {
    return splitmix64(splitmix64(seed) ^ splitmix64(tag));
}

}  // namespace n2n
