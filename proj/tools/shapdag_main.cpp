#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "shapdag/assemble.hpp"
#include "shapdag/error.hpp"
#include "shapdag/experiment.hpp"
#include "shapdag/metrics.hpp"
#include "shapdag/parallel.hpp"
#include "shapdag/shap.hpp"
#include "shapdag/synth.hpp"
#include "shapdag/validate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace shapdag;

namespace {

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path.string());
    out << content;
    if (!out) throw InputError("write failed: " + path.string());
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create directory: " + dir.string());
}

struct PipelineFlags {
    PipelineConfig cfg;
    std::string mode = "union";
    std::string config_path;
    bool gamma = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--seed", cfg.seed, "Master random seed");
        cmd->add_option("--regressors", cfg.regressors, "gbt | mlp | both")
            ->check(CLI::IsMember({"gbt", "mlp", "both"}));
        cmd->add_option("--mode", mode, "Combination of the per-regressor graphs")
            ->check(CLI::IsMember({"union", "intersection"}));
        cmd->add_option("--iterations", cfg.bootstrap_iterations, "Bootstrap iterations T");
        cmd->add_option("--miss-probability", cfg.miss_probability,
                        "Coverage miss probability q");
        cmd->add_option("--tau", cfg.tau, "Edge frequency threshold");
        cmd->add_option("--budget", cfg.hpo_budget,
                        "Hyperparameter search budget per target (0 = defaults)");
        cmd->add_option("--alpha", cfg.hsic.alpha, "HSIC significance level");
        cmd->add_option("--permutations", cfg.hsic.permutations, "HSIC permutation count");
        cmd->add_flag("--gamma", gamma, "Use the HSIC gamma approximation");
        cmd->add_option("--eg-samples", cfg.eg_samples, "Expected-gradients sample count");
        cmd->add_option("--background", cfg.background_rows, "Explainer background rows");
        cmd->add_flag("--greedy", cfg.selection.greedy, "Greedy percentile parent selection");
        cmd->add_option("--greedy-percentile", cfg.selection.greedy_percentile,
                        "Percentile for greedy selection");
        cmd->add_option("--jobs", cfg.jobs, "Worker threads");
        cmd->add_option("--config", config_path, "JSON config merged under explicit flags");
    }

    /// Explicit flags win over the config file, which wins over defaults.
    PipelineConfig resolve(const CLI::App* cmd) {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw InputError("cannot open config: " + config_path);
            json j;
            try {
                in >> j;
            } catch (const json::exception& e) {
                throw InputError("config parse error: " + std::string(e.what()));
            }
            auto maybe = [&](const char* flag, const char* key, auto setter) {
                if (cmd->count(flag) == 0 && j.contains(key)) setter(j.at(key));
            };
            maybe("--seed", "seed", [&](const json& v) { cfg.seed = v.get<std::uint64_t>(); });
            maybe("--regressors", "regressors",
                  [&](const json& v) { cfg.regressors = v.get<std::string>(); });
            maybe("--mode", "mode", [&](const json& v) { mode = v.get<std::string>(); });
            maybe("--iterations", "bootstrap_iterations",
                  [&](const json& v) { cfg.bootstrap_iterations = v.get<int>(); });
            maybe("--miss-probability", "miss_probability",
                  [&](const json& v) { cfg.miss_probability = v.get<double>(); });
            maybe("--tau", "tau", [&](const json& v) { cfg.tau = v.get<double>(); });
            maybe("--budget", "hpo_budget",
                  [&](const json& v) { cfg.hpo_budget = v.get<int>(); });
            maybe("--alpha", "hsic_alpha",
                  [&](const json& v) { cfg.hsic.alpha = v.get<double>(); });
            maybe("--permutations", "hsic_permutations",
                  [&](const json& v) { cfg.hsic.permutations = v.get<int>(); });
            maybe("--gamma", "hsic_gamma_approx",
                  [&](const json& v) { gamma = v.get<bool>(); });
            maybe("--eg-samples", "eg_samples",
                  [&](const json& v) { cfg.eg_samples = v.get<int>(); });
            maybe("--background", "background_rows",
                  [&](const json& v) { cfg.background_rows = v.get<int>(); });
            maybe("--greedy", "greedy",
                  [&](const json& v) { cfg.selection.greedy = v.get<bool>(); });
            maybe("--greedy-percentile", "greedy_percentile",
                  [&](const json& v) { cfg.selection.greedy_percentile = v.get<double>(); });
            maybe("--jobs", "jobs", [&](const json& v) { cfg.jobs = v.get<int>(); });
        }
        cfg.mode = parse_combine_mode(mode);
        cfg.hsic.use_gamma_approx = gamma;
        return cfg;
    }
};

int cmd_generate(const std::string& family_name_arg, int variables, int samples,
                 int max_parents, int n_datasets, std::uint64_t seed,
                 const std::string& out_dir) {
    if (variables < 2) throw InputError("--variables must be >= 2");
    if (samples < 2) throw InputError("--samples must be >= 2");
    if (n_datasets < 0) throw InputError("--datasets must be >= 0");
    const MechanismFamily family = parse_family(family_name_arg);
    ensure_dir(out_dir);

    json manifest;
    manifest["schema_version"] = 1;
    manifest["family"] = family_name_arg;
    manifest["variables"] = variables;
    manifest["samples"] = samples;
    manifest["max_parents"] = max_parents;
    manifest["seed"] = seed;
    manifest["files"] = json::array();

    for (int i = 0; i < n_datasets; ++i) {
        const std::uint64_t dataset_seed = derive_seed(seed, 100 + i);
        Rng rng = make_rng(dataset_seed);
        const Dag truth = sample_dag(variables, max_parents, rng);
        const Dataset data = generate_sem(truth, family, samples, rng);

        char suffix[16];
        std::snprintf(suffix, sizeof(suffix), "%03d", i);
        const fs::path data_path = fs::path(out_dir) / ("data_" + std::string(suffix) + ".csv");
        const fs::path truth_path =
            fs::path(out_dir) / ("truth_" + std::string(suffix) + ".txt");
        const fs::path dot_path = fs::path(out_dir) / ("truth_" + std::string(suffix) + ".dot");
        save_csv(data, data_path.string());
        write_text(truth_path, to_edge_list(truth));
        write_text(dot_path, to_dot(truth));
        manifest["files"].push_back({{"data", data_path.filename().string()},
                                     {"truth_edges", truth_path.filename().string()},
                                     {"truth_dot", dot_path.filename().string()},
                                     {"dataset_seed", dataset_seed},
                                     {"truth_edge_count", truth.edges.size()}});
    }
    write_text(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
    std::cout << "wrote " << n_datasets << " dataset(s) to " << out_dir << "\n";
    return 0;
}

int cmd_discover(const std::string& data_path, const PipelineConfig& cfg,
                 const std::string& out_dir, bool dump_shap) {
    const Dataset data = load_csv(data_path);
    ensure_dir(out_dir);
    const DiscoveryReport report = discover(data, cfg);

    write_text(fs::path(out_dir) / "dag.dot", to_dot(report.dag));
    write_text(fs::path(out_dir) / "dag.json", report.dag_json().dump(2) + "\n");
    write_text(fs::path(out_dir) / "dag.txt", to_edge_list(report.dag));
    write_text(fs::path(out_dir) / "report.json", report.report_json().dump(2) + "\n");
    for (const auto& fr : report.families) {
        write_text(fs::path(out_dir) / ("frequencies_" + fr.family + ".csv"),
                   frequencies_to_csv(fr.skeleton, report.dag.nodes));
    }
    if (dump_shap) {
        // Per-target full-data attribution matrices for offline inspection.
        const Dataset std_data = data.standardized ? data : standardize(data);
        for (const auto& fr : report.families) {
            for (std::size_t target = 0; target < std_data.cols(); ++target) {
                Rng rng = make_rng(derive_seed(cfg.seed, 4242 + target));
                auto [rows, names] = feature_matrix(std_data, std_data.columns[target]);
                (void)names;
                ShapMatrix phi;
                if (fr.family == "gbt") {
                    GbtHyperParams hp = cfg.gbt_defaults;
                    Rng train_rng = make_rng(derive_seed(cfg.seed, 17 + 131 * target));
                    const GbtModel model =
                        train_gbt(std_data, std_data.columns[target], hp, train_rng);
                    phi = shap_tree(model, rows, rows, cfg.jobs);
                } else {
                    MlpHyperParams hp = cfg.mlp_defaults;
                    Rng train_rng = make_rng(derive_seed(cfg.seed, 34 + 131 * target));
                    const MlpModel model =
                        train_mlp(std_data, std_data.columns[target], hp, train_rng);
                    phi = shap_gradient(model, rows, rows, cfg.eg_samples, rng, cfg.jobs);
                }
                write_text(fs::path(out_dir) / ("shap_" + fr.family + "_" +
                                                std_data.columns[target] + ".csv"),
                           shap_matrix_to_csv(phi));
            }
        }
    }
    std::cout << "discovered " << report.dag.edges.size() << " edge(s); outputs in "
              << out_dir << "\n";
    return 0;
}

int cmd_evaluate(const std::string& est_path, const std::string& truth_path, bool csv) {
    const Dag est = load_edge_list(est_path);
    const Dag truth = load_edge_list(truth_path);
    // Align node order: evaluation requires identical node sets.
    if (std::set<std::string>(est.nodes.begin(), est.nodes.end()) !=
        std::set<std::string>(truth.nodes.begin(), truth.nodes.end())) {
        throw InputError("estimate and truth are defined over different node sets");
    }
    Dag est_aligned;
    est_aligned.nodes = truth.nodes;
    for (const auto& [from, to] : est.edges) {
        est_aligned.edges.insert({est_aligned.node_index(est.nodes[from]),
                                  est_aligned.node_index(est.nodes[to])});
    }
    const MetricsReport report = full_report(est_aligned, truth);
    if (csv) {
        std::cout << MetricsReport::csv_header() << "\n" << report.to_csv_row() << "\n";
    } else {
        std::cout << report.to_json().dump(2) << "\n";
    }
    return 0;
}

int cmd_validate_shap(int replicates, int samples, std::uint64_t seed, int jobs,
                      const std::string& out_dir) {
    ValidationConfig cfg;
    cfg.replicates = replicates;
    cfg.samples = static_cast<std::size_t>(samples);
    cfg.jobs = jobs;
    const ValidationTable table = run_shap_validation(cfg, seed);
    std::cout << table.to_csv();
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        write_text(fs::path(out_dir) / "validation.csv", table.to_csv());
        write_text(fs::path(out_dir) / "validation.json", table.to_json().dump(2) + "\n");
    }
    return 0;
}

int cmd_benchmark(const std::string& family_name_arg, int variables, int samples,
                  int n_datasets, std::uint64_t seed, const PipelineConfig& pipeline,
                  const std::string& out_dir) {
    SuiteConfig cfg;
    cfg.family = parse_family(family_name_arg);
    cfg.variables = variables;
    cfg.samples = static_cast<std::size_t>(samples);
    cfg.datasets = n_datasets;
    cfg.pipeline = pipeline;
    const SuiteResult result = run_benchmark_suite(cfg, seed);

    std::cout << "strategy medians (f1 / shd):\n";
    for (const std::string s : {"gbt", "mlp", "union", "intersection"}) {
        std::cout << "  " << s << ": " << result.median_f1(s) << " / " << result.median_shd(s)
                  << "\n";
    }
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        write_text(fs::path(out_dir) / "benchmark.csv", result.to_csv());
        write_text(fs::path(out_dir) / "benchmark.json", result.to_json().dump(2) + "\n");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal structure discovery from per-variable regressors and "
                 "Shapley attributions"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Write synthetic datasets with ground truth");
    std::string gen_family = "linear";
    int gen_p = 10, gen_m = 500, gen_n = 10, gen_max_parents = 5;
    std::uint64_t gen_seed = 0;
    std::string gen_out = "out";
    gen->add_option("--family", gen_family, "Mechanism family")
        ->check(CLI::IsMember({"linear", "polynomial", "gp-add", "gp-mix", "sigmoid-mix"}));
    gen->add_option("--variables", gen_p, "Variable count p");
    gen->add_option("--samples", gen_m, "Sample count m");
    gen->add_option("--datasets", gen_n, "Number of datasets");
    gen->add_option("--max-parents", gen_max_parents, "Parent cap per node");
    gen->add_option("--seed", gen_seed, "Master seed");
    gen->add_option("--out", gen_out, "Output directory")->required();

    // discover
    auto* disc = app.add_subcommand("discover", "Reconstruct a DAG from a CSV dataset");
    std::string disc_data, disc_out = "out";
    bool disc_dump_shap = false;
    PipelineFlags disc_flags;
    disc->add_option("--data", disc_data, "Input CSV")->required();
    disc->add_option("--out", disc_out, "Output directory")->required();
    disc->add_flag("--dump-shap", disc_dump_shap, "Also write per-target attribution CSVs");
    disc_flags.attach(disc);

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "Score an estimated DAG against the truth");
    std::string eval_est, eval_truth;
    bool eval_csv = false;
    eval->add_option("--estimate", eval_est, "Estimated DAG edge list")->required();
    eval->add_option("--truth", eval_truth, "Ground-truth DAG edge list")->required();
    eval->add_flag("--csv", eval_csv, "Emit a CSV row instead of JSON");

    // validate-shap
    auto* val = app.add_subcommand("validate-shap",
                                   "Shapley-vs-dependence validation experiment");
    int val_replicates = 50, val_samples = 5000, val_jobs = default_jobs();
    std::uint64_t val_seed = 0;
    std::string val_out;
    val->add_option("--replicates", val_replicates, "Replicates per structure");
    val->add_option("--samples", val_samples, "Samples per dataset");
    val->add_option("--seed", val_seed, "Master seed");
    val->add_option("--jobs", val_jobs, "Worker threads");
    val->add_option("--out", val_out, "Output directory (optional)");

    // benchmark
    auto* bench = app.add_subcommand(
        "benchmark", "Compare single-regressor, union and intersection strategies");
    std::string bench_family = "linear";
    int bench_p = 10, bench_m = 500, bench_n = 10;
    std::uint64_t bench_seed = 0;
    std::string bench_out;
    PipelineFlags bench_flags;
    bench->add_option("--family", bench_family, "Mechanism family")
        ->check(CLI::IsMember({"linear", "polynomial", "gp-add", "gp-mix", "sigmoid-mix"}));
    bench->add_option("--variables", bench_p, "Variable count p");
    bench->add_option("--samples", bench_m, "Sample count m");
    bench->add_option("--datasets", bench_n, "Number of datasets");
    bench->add_option("--bench-seed", bench_seed, "Suite seed");
    bench->add_option("--out", bench_out, "Output directory (optional)");
    bench_flags.attach(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            return cmd_generate(gen_family, gen_p, gen_m, gen_max_parents, gen_n, gen_seed,
                                gen_out);
        }
        if (disc->parsed()) {
            return cmd_discover(disc_data, disc_flags.resolve(disc), disc_out, disc_dump_shap);
        }
        if (eval->parsed()) return cmd_evaluate(eval_est, eval_truth, eval_csv);
        if (val->parsed()) {
            return cmd_validate_shap(val_replicates, val_samples, val_seed, val_jobs, val_out);
        }
        if (bench->parsed()) {
            return cmd_benchmark(bench_family, bench_p, bench_m, bench_n, bench_seed,
                                 bench_flags.resolve(bench), bench_out);
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
