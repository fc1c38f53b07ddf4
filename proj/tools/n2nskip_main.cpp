#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "n2n/checkpoint.hpp"
#include "n2n/connectivity.hpp"
#include "n2n/dataset.hpp"
#include "n2n/errors.hpp"
#include "n2n/experiment.hpp"
#include "n2n/skipgen.hpp"

namespace {

using nlohmann::json;

// Config keys that may be overridden from the command line; flag names mirror
// the JSON key paths (e.g. --analysis.t 2.0).
const std::vector<std::string> kOverridableKeys = {
    "name",
    "method",
    "density",
    "split_ratio",
    "seeds",
    "network.layer_dims",
    "network.k",
    "hyperparams.lr0",
    "hyperparams.momentum",
    "hyperparams.decay_factor",
    "hyperparams.decay_every",
    "hyperparams.weight_decay",
    "hyperparams.batch_size",
    "hyperparams.epochs",
    "dataset.type",
    "dataset.classes",
    "dataset.dim",
    "dataset.per_class",
    "dataset.spread",
    "dataset.seed",
    "dataset.path",
    "analysis.t",
    "analysis.k_percent",
    "analysis.threshold",
    "analysis.weighted",
    "analysis.t_grid",
};

struct ConfigArgs {
    std::string config_path;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
};

void add_config_options(CLI::App* sub, ConfigArgs& args) {
    sub->add_option("--config", args.config_path, "experiment config JSON file");
    for (const std::string& key : kOverridableKeys) {
        args.options[key] =
            sub->add_option("--" + key, args.values[key], "override config key " + key);
    }
}

// Raw override values parse as JSON when possible ("0.5", "[1,2]", "true"),
// otherwise they are taken as strings ("rp", "data.csv").
json parse_override(const std::string& raw) {
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) return json(raw);
    return value;
}

void set_path(json& doc, const std::string& key, json value) {
    json* node = &doc;
    std::size_t start = 0;
    for (std::size_t dot = key.find('.'); dot != std::string::npos;
         start = dot + 1, dot = key.find('.', start)) {
        node = &(*node)[key.substr(start, dot - start)];
    }
    (*node)[key.substr(start)] = std::move(value);
}

n2n::ExperimentConfig resolve_config(const ConfigArgs& args) {
    json doc = json::object();
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in) throw n2n::ConfigError("cannot open config: " + args.config_path);
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            throw n2n::ConfigError("config " + args.config_path + " is not valid JSON: " +
                                   e.what());
        }
    }
    for (const std::string& key : kOverridableKeys) {
        const auto it = args.options.find(key);
        if (it != args.options.end() && it->second->count() > 0) {
            set_path(doc, key, parse_override(args.values.at(key)));
        }
    }
    return n2n::config_from_json(doc);
}

void print_report_summary(const n2n::ExperimentReport& report, const std::string& out_root) {
    const json doc = n2n::report_to_json(report);
    std::cout << "experiment " << report.name << " -> " << out_root << "/" << report.name
              << "/manifest.json\n";
    for (const auto& [label, agg] : doc.at("aggregates").items()) {
        std::printf("  %-20s test acc %.4f +/- %.4f   mean F %.6g   (%zu runs)\n", label.c_str(),
                    agg.at("mean_test_accuracy").get<double>(),
                    agg.at("std_test_accuracy").get<double>(),
                    agg.at("mean_f_distance").get<double>(),
                    agg.at("runs").get<std::size_t>());
    }
}

n2n::AnalysisConfig analysis_from_flags(double t, double k_percent, double threshold,
                                        bool unweighted, const std::vector<double>& grid) {
    n2n::AnalysisConfig ac;
    ac.t = t;
    ac.k_percent = k_percent;
    ac.threshold = threshold;
    ac.weighted = !unweighted;
    ac.t_grid = grid;
    return ac;
}

struct CheckpointAnalysis {
    n2n::Spectrum spectrum;
    n2n::ScreeCurve scree;
    double saturation = 0.0;
    n2n::HeatSignature signature;
    std::size_t nodes = 0;
    std::size_t k_count = 0;
};

CheckpointAnalysis analyze_checkpoint(const n2n::Network& net, const n2n::AnalysisConfig& ac) {
    CheckpointAnalysis out;
    const n2n::SymMatrix adj = n2n::to_adjacency(net, ac.weighted);
    out.nodes = adj.n;
    out.spectrum = n2n::eig_sym(n2n::graph_laplacian(adj));
    out.k_count = n2n::k_from_percent(ac.k_percent, adj.n);
    out.scree = n2n::scree_curve(out.spectrum, out.k_count, ac.grid());
    out.saturation = n2n::saturation_time(out.scree, ac.threshold);
    const n2n::SymMatrix h = n2n::heat_matrix(out.spectrum, ac.t);
    std::vector<std::uint8_t> sources(adj.n, 0);
    for (std::size_t i = 0; i < net.layer_dims.front(); ++i) sources[i] = 1;
    out.signature = n2n::heat_signature(h, sources, ac.t);
    return out;
}

json null_if_inf(double v) { return std::isfinite(v) ? json(v) : json(); }

int run(int argc, char** argv) {
    CLI::App app{"n2nskip: prune-at-init MLPs, N2NSkip connections, SGD training, "
                 "and heat-diffusion connectivity analysis"};
    app.require_subcommand(1);

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "generate a Gaussian-blob dataset CSV");
    std::size_t gd_classes = 4, gd_dim = 100, gd_per_class = 200;
    double gd_spread = 0.35;
    std::uint64_t gd_seed = 7;
    std::string gd_output;
    gen->add_option("--classes", gd_classes, "number of classes");
    gen->add_option("--dim", gd_dim, "feature dimension");
    gen->add_option("--per-class", gd_per_class, "samples per class");
    gen->add_option("--spread", gd_spread, "per-class Gaussian std");
    gen->add_option("--seed", gd_seed, "generator seed");
    gen->add_option("--output", gd_output, "output CSV path")->required();

    // train
    auto* train_cmd = app.add_subcommand("train", "run one experiment config");
    ConfigArgs train_args;
    std::string train_out = n2n::default_out_root();
    add_config_options(train_cmd, train_args);
    train_cmd->add_option("--out", train_out, "output root directory");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "run methods x densities x seeds");
    ConfigArgs sweep_args;
    std::string sweep_out = n2n::default_out_root();
    std::vector<std::string> sweep_methods = {"baseline", "rp", "csp", "n2nskip-rp",
                                              "n2nskip-csp"};
    std::vector<double> sweep_densities = {0.10, 0.05, 0.02};
    add_config_options(sweep_cmd, sweep_args);
    sweep_cmd->add_option("--out", sweep_out, "output root directory");
    sweep_cmd->add_option("--methods", sweep_methods, "methods to sweep")->delimiter(',');
    sweep_cmd->add_option("--densities", sweep_densities, "densities to sweep")->delimiter(',');

    // analyze
    auto* analyze_cmd = app.add_subcommand("analyze", "connectivity report for a checkpoint");
    std::string an_checkpoint, an_reference, an_output;
    double an_t = 1.5, an_k_percent = 0.1, an_threshold = 0.97;
    bool an_unweighted = false;
    std::vector<double> an_grid;
    analyze_cmd->add_option("--checkpoint", an_checkpoint, "checkpoint JSON")->required();
    analyze_cmd->add_option("--reference", an_reference,
                            "reference checkpoint for the F distance");
    analyze_cmd->add_option("--t", an_t, "diffusion time");
    analyze_cmd->add_option("--k-percent", an_k_percent, "eigenvalue share for alpha");
    analyze_cmd->add_option("--threshold", an_threshold, "saturation threshold");
    analyze_cmd->add_flag("--unweighted", an_unweighted, "binary adjacency instead of |w|");
    analyze_cmd->add_option("--grid", an_grid, "time grid for the scree curve")->delimiter(',');
    analyze_cmd->add_option("--output", an_output, "write the report JSON here (default stdout)");

    // scree
    auto* scree_cmd = app.add_subcommand("scree", "scree curve CSV for a checkpoint");
    std::string sc_checkpoint, sc_output;
    double sc_k_percent = 0.1;
    bool sc_unweighted = false;
    std::vector<double> sc_grid;
    scree_cmd->add_option("--checkpoint", sc_checkpoint, "checkpoint JSON")->required();
    scree_cmd->add_option("--k-percent", sc_k_percent, "eigenvalue share for alpha");
    scree_cmd->add_flag("--unweighted", sc_unweighted, "binary adjacency instead of |w|");
    scree_cmd->add_option("--grid", sc_grid, "time grid")->delimiter(',');
    scree_cmd->add_option("--output", sc_output, "write the CSV here (default stdout)");

    // compare
    auto* compare_cmd = app.add_subcommand("compare", "paired per-seed comparison of two cells");
    std::string cp_manifest_a, cp_manifest_b, cp_method_a, cp_method_b;
    double cp_density_a = 0.0, cp_density_b = 0.0;
    compare_cmd->add_option("--manifest-a", cp_manifest_a, "manifest JSON")->required();
    compare_cmd->add_option("--manifest-b", cp_manifest_b,
                            "second manifest (defaults to --manifest-a)");
    compare_cmd->add_option("--method-a", cp_method_a, "method of cell A")->required();
    compare_cmd->add_option("--density-a", cp_density_a, "density of cell A")->required();
    compare_cmd->add_option("--method-b", cp_method_b, "method of cell B")->required();
    compare_cmd->add_option("--density-b", cp_density_b, "density of cell B")->required();

    // export-adjacency
    auto* export_cmd = app.add_subcommand("export-adjacency", "checkpoint to edge-list text");
    std::string ex_checkpoint, ex_output;
    bool ex_unweighted = false;
    export_cmd->add_option("--checkpoint", ex_checkpoint, "checkpoint JSON")->required();
    export_cmd->add_flag("--unweighted", ex_unweighted, "binary adjacency instead of |w|");
    export_cmd->add_option("--output", ex_output, "output edge-list path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (*gen) {
        const n2n::Dataset ds =
            n2n::gen_blobs(gd_classes, gd_dim, gd_per_class, gd_spread, gd_seed);
        n2n::save_csv(ds, gd_output);
        std::cout << "wrote " << gd_output << " (" << ds.train_x.rows << " train + "
                  << ds.test_x.rows << " test rows)\n";
        return 0;
    }
    if (*train_cmd) {
        const n2n::ExperimentConfig cfg = resolve_config(train_args);
        const n2n::ExperimentReport report = n2n::run_experiment(cfg, train_out);
        print_report_summary(report, train_out);
        return 0;
    }
    if (*sweep_cmd) {
        const n2n::ExperimentConfig cfg = resolve_config(sweep_args);
        std::vector<n2n::Method> methods;
        for (const std::string& m : sweep_methods) methods.push_back(n2n::method_from_string(m));
        const n2n::ExperimentReport report = n2n::run_sweep(cfg, methods, sweep_densities,
                                                            sweep_out);
        print_report_summary(report, sweep_out);
        return 0;
    }
    if (*analyze_cmd) {
        const n2n::AnalysisConfig ac =
            analysis_from_flags(an_t, an_k_percent, an_threshold, an_unweighted, an_grid);
        const n2n::Network net = n2n::load_checkpoint(an_checkpoint);
        const CheckpointAnalysis result = analyze_checkpoint(net, ac);

        std::size_t components = 0;
        for (const double ev : result.spectrum.eigenvalues) {
            if (ev < 1e-9) ++components;
        }
        json doc;
        doc["checkpoint"] = an_checkpoint;
        doc["nodes"] = result.nodes;
        doc["density"] = n2n::density(net);
        doc["weighted"] = ac.weighted;
        doc["t"] = ac.t;
        doc["k_count"] = result.k_count;
        doc["threshold"] = ac.threshold;
        doc["components"] = components;
        doc["lambda_2"] = result.spectrum.eigenvalues.size() > 1
                              ? json(result.spectrum.eigenvalues[1])
                              : json();
        doc["alpha_at_t"] = n2n::alpha(result.spectrum, result.k_count, ac.t);
        doc["saturation_time"] = null_if_inf(result.saturation);
        if (!an_reference.empty()) {
            const n2n::Network ref = n2n::load_checkpoint(an_reference);
            const CheckpointAnalysis ref_result = analyze_checkpoint(ref, ac);
            doc["reference"] = an_reference;
            doc["f_distance"] = n2n::signature_distance(ref_result.signature, result.signature);
        }
        if (an_output.empty()) {
            std::cout << doc.dump(2) << "\n";
        } else {
            std::ofstream out(an_output);
            if (!out) throw n2n::ConfigError("cannot write " + an_output);
            out << doc.dump(2) << "\n";
        }
        return 0;
    }
    if (*scree_cmd) {
        n2n::AnalysisConfig ac;
        ac.k_percent = sc_k_percent;
        ac.weighted = !sc_unweighted;
        ac.t_grid = sc_grid;
        const n2n::Network net = n2n::load_checkpoint(sc_checkpoint);
        const n2n::SymMatrix adj = n2n::to_adjacency(net, ac.weighted);
        const n2n::Spectrum spec = n2n::eig_sym(n2n::graph_laplacian(adj));
        const std::size_t k = n2n::k_from_percent(ac.k_percent, adj.n);
        const n2n::ScreeCurve curve = n2n::scree_curve(spec, k, ac.grid());
        if (sc_output.empty()) {
            std::printf("t,alpha\n");
            for (const n2n::ScreePoint& p : curve.points) {
                std::printf("%.9g,%.9g\n", p.t, p.alpha);
            }
        } else {
            n2n::write_scree_csv(curve, sc_output);
            std::cout << "wrote " << sc_output << "\n";
        }
        if (curve.degenerate) {
            std::cerr << "warning: scree curve decreased beyond tolerance (degenerate spectrum)\n";
        }
        return 0;
    }
    if (*compare_cmd) {
        const n2n::ExperimentReport report_a = n2n::load_manifest(cp_manifest_a);
        const n2n::ExperimentReport report_b =
            cp_manifest_b.empty() ? report_a : n2n::load_manifest(cp_manifest_b);
        const n2n::ExperimentReport cell_a =
            n2n::extract_cell(report_a, n2n::method_from_string(cp_method_a), cp_density_a);
        const n2n::ExperimentReport cell_b =
            n2n::extract_cell(report_b, n2n::method_from_string(cp_method_b), cp_density_b);
        const n2n::ComparisonSummary summary = n2n::compare(cell_a, cell_b);
        std::cout << n2n::comparison_to_json(summary).dump(2) << "\n";
        return 0;
    }
    if (*export_cmd) {
        const n2n::Network net = n2n::load_checkpoint(ex_checkpoint);
        n2n::export_adjacency(n2n::to_adjacency(net, !ex_unweighted), ex_output);
        std::cout << "wrote " << ex_output << "\n";
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const n2n::InfeasibleDensityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const n2n::ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const n2n::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const n2n::DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const n2n::IncomparableError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
