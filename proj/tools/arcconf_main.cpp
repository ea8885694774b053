// arcconf: learn DAG structures over discrete variables with a known
// ordering and estimate how many of the learned arcs are real, via an
// exact Bayesian expected-true-arc computation and a permutation-based
// FDR estimator. See README.md for the file formats.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "arcconf/bayes.hpp"
#include "arcconf/calibration.hpp"
#include "arcconf/calibration_bands.hpp"
#include "arcconf/fdr.hpp"
#include "arcconf/io.hpp"
#include "arcconf/parallel.hpp"
#include "arcconf/search.hpp"
#include "arcconf/synth.hpp"
#include "arcconf/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitNoDiscoveries = 3;
constexpr int kExitNumericError = 4;

std::vector<std::string> make_header(const std::string& config, std::uint64_t seed) {
    return {std::string("arcconf ") + arcconf::kVersion, "config: " + config,
            "seed: " + std::to_string(seed)};
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw arcconf::ValidationError("cannot write '" + path + "'");
    out << content;
}

arcconf::Dataset apply_ordering_override(const arcconf::LoadedDataset& loaded,
                                         const std::string& ordering_inline,
                                         const std::string& ordering_file) {
    std::vector<std::string> names;
    if (!ordering_inline.empty()) {
        std::istringstream in(ordering_inline);
        std::string item;
        while (std::getline(in, item, ',')) {
            if (!item.empty()) names.push_back(item);
        }
    } else if (!ordering_file.empty()) {
        std::ifstream in(ordering_file);
        if (!in) throw arcconf::ValidationError("cannot open ordering file '" + ordering_file + "'");
        std::string item;
        while (in >> item) names.push_back(item);
    } else {
        return loaded.data;
    }
    const auto& data = loaded.data;
    std::vector<int> ordering;
    ordering.reserve(names.size());
    for (const auto& nm : names) {
        int found = -1;
        for (int c = 0; c < data.vars(); ++c)
            if (data.name(c) == nm) {
                found = c;
                break;
            }
        if (found < 0)
            throw arcconf::ValidationError("ordering names unknown column '" + nm + "'");
        ordering.push_back(found);
    }
    std::vector<std::vector<int>> columns;
    columns.reserve(static_cast<std::size_t>(data.vars()));
    for (int c = 0; c < data.vars(); ++c) columns.push_back(data.column(c));
    return arcconf::Dataset(std::move(columns), data.arities(), data.names(), std::move(ordering));
}

arcconf::TruthModel load_truth(const std::string& network, std::uint64_t seed, int workers) {
    if (network == "alarm") return arcconf::alarm_network();
    if (network == "hiv-standin") return arcconf::make_hiv_standin(seed, arcconf::bands::kHivTargetFdr, workers).network;
    return arcconf::load_network_spec(network);
}

// ---- learn ----

int cmd_learn(const std::string& data_path, const std::string& ordering_inline,
              const std::string& ordering_file, const std::string& family_name, double kappa,
              double alpha, int max_parents, const std::string& out_path, int workers) {
    auto loaded = arcconf::read_dataset_csv_file(data_path);
    arcconf::Dataset data = apply_ordering_override(loaded, ordering_inline, ordering_file);

    arcconf::SearchConfig config;
    config.score.family = arcconf::score_family_from_name(family_name);
    config.score.kappa = kappa;
    config.score.ess = alpha;
    if (max_parents >= 0) config.score.max_parents = max_parents;

    arcconf::StructureResult result = arcconf::learn_structure(data, config, workers);

    std::ostringstream cfg;
    cfg << "learn data=" << data_path << " family=" << family_name
        << " kappa=" << arcconf::format_double(kappa) << " alpha=" << arcconf::format_double(alpha);
    if (max_parents >= 0) cfg << " max-parents=" << max_parents;

    std::ostringstream out;
    arcconf::write_model_file(out, result.dag, data.names(), result.scores, result.total_score,
                              make_header(cfg.str(), 0));
    write_text_file(out_path, out.str());

    std::cout << "learned " << result.dag.arc_count() << " arcs over " << data.vars()
              << " variables (total score " << arcconf::format_double(result.total_score)
              << ")\nmodel written to " << out_path << "\n";
    return kExitOk;
}

// ---- fdr ----

int cmd_fdr(const std::string& data_path, const std::string& family_name, double kappa,
            double alpha, int max_parents, int q_permutations, std::uint64_t seed,
            const std::string& out_path, int workers) {
    auto loaded = arcconf::read_dataset_csv_file(data_path);
    const arcconf::Dataset& data = loaded.data;

    arcconf::SearchConfig config;
    config.score.family = arcconf::score_family_from_name(family_name);
    config.score.kappa = kappa;
    config.score.ess = alpha;
    if (max_parents >= 0) config.score.max_parents = max_parents;

    arcconf::FdrResult result = arcconf::estimate_fdr(data, config, q_permutations, seed, workers);
    const arcconf::FdrEstimate& est = result.estimate;

    if (est.no_discoveries()) {
        std::cout << "no discoveries: the search returned an empty model; FDR is undefined\n";
        return kExitNoDiscoveries;
    }

    std::ostringstream text;
    text << "observed arcs: " << est.observed_arcs << "\n";
    text << "null counts:";
    long long null_sum = 0;
    for (int c : est.null_counts) {
        text << ' ' << c;
        null_sum += c;
    }
    text << "\nnull sum: " << null_sum << "\nQ: " << est.q_permutations << "\n";
    text << "fdr raw: " << arcconf::format_double(*est.fdr_raw) << "\n";
    text << "fdr clamped: " << arcconf::format_double(*est.fdr_clamped) << "\n";
    text << "expected ppv: " << arcconf::format_double(*est.expected_ppv) << "\n";
    std::cout << text.str();

    if (!out_path.empty()) {
        std::ostringstream cfg;
        cfg << "fdr data=" << data_path << " family=" << family_name
            << " kappa=" << arcconf::format_double(kappa)
            << " alpha=" << arcconf::format_double(alpha) << " Q=" << q_permutations;
        std::ostringstream out;
        for (const auto& h : make_header(cfg.str(), seed)) out << "# " << h << "\n";
        out << "family,kappa,alpha,n,observed_arcs,null_sum,q_permutations,fdr_raw,fdr_clamped,"
               "expected_ppv,seed\n";
        out << family_name << ',' << arcconf::format_double(kappa) << ','
            << arcconf::format_double(alpha) << ',' << data.rows() << ',' << est.observed_arcs
            << ',' << null_sum << ',' << est.q_permutations << ','
            << arcconf::format_double(*est.fdr_raw) << ','
            << arcconf::format_double(*est.fdr_clamped) << ','
            << arcconf::format_double(*est.expected_ppv) << ',' << seed << "\n";
        write_text_file(out_path, out.str());
    }
    return kExitOk;
}

// ---- bayes ----

int cmd_bayes(const std::string& data_path, const std::string& model_path, double kappa,
              double alpha, int size_limit, bool check_k_plus_one, const std::string& out_path,
              int workers) {
    auto loaded = arcconf::read_dataset_csv_file(data_path);
    const arcconf::Dataset& data = loaded.data;
    arcconf::ModelFile model = arcconf::read_model_file_from(model_path);
    arcconf::Dag dag = arcconf::align_model_to_dataset(model, data);

    arcconf::ScoreConfig config;
    config.family = arcconf::ScoreFamily::BdeuExact;
    config.kappa = kappa;
    config.ess = alpha;

    arcconf::ArcMarginalTable marginals =
        arcconf::compute_arc_marginals(data, config, size_limit, arcconf::kDefaultMaxSubsets,
                                       workers);
    arcconf::BayesEstimate est = arcconf::expected_true_arcs(marginals, dag);

    std::cout << "model arcs: " << est.model_arc_count << "\n";
    std::cout << "expected true arcs: " << arcconf::format_double(est.expected_true_arcs) << "\n";
    if (est.expected_ppv)
        std::cout << "expected ppv: " << arcconf::format_double(*est.expected_ppv) << "\n";
    else
        std::cout << "expected ppv: undefined (empty model)\n";

    if (check_k_plus_one) {
        arcconf::ArcMarginalTable next = arcconf::compute_arc_marginals(
            data, config, size_limit + 1, arcconf::kDefaultMaxSubsets, workers);
        std::cout << "max marginal change at k+1: "
                  << arcconf::format_double(arcconf::max_marginal_change(marginals, next)) << "\n";
    }

    if (!out_path.empty()) {
        std::ostringstream cfg;
        cfg << "bayes data=" << data_path << " model=" << model_path
            << " kappa=" << arcconf::format_double(kappa)
            << " alpha=" << arcconf::format_double(alpha) << " k=" << size_limit;
        std::ostringstream out;
        for (const auto& h : make_header(cfg.str(), 0)) out << "# " << h << "\n";
        out << "parent,child,marginal\n";
        for (const auto& [arc, marginal] : est.per_arc_marginals)
            out << data.name(arc.parent) << ',' << data.name(arc.child) << ','
                << arcconf::format_double(marginal) << "\n";
        write_text_file(out_path, out.str());
    }
    return kExitOk;
}

// ---- simulate ----

int cmd_simulate(const std::string& network, int n, std::uint64_t seed,
                 const std::string& out_path, int workers) {
    arcconf::TruthModel truth = load_truth(network, seed, workers);
    const int rows = n > 0 ? n : (std::holds_alternative<arcconf::NoisyOrNetwork>(truth)
                                      ? arcconf::bands::kHivPatients
                                      : 1000);
    arcconf::Dataset data = arcconf::sample_truth(truth, rows, seed);

    std::ostringstream cfg;
    cfg << "simulate network=" << network << " n=" << rows;
    std::ostringstream out;
    arcconf::write_dataset_csv(out, data, arcconf::index_labels(data),
                               make_header(cfg.str(), seed));
    write_text_file(out_path, out.str());
    std::cout << "wrote " << rows << " rows x " << data.vars() << " columns to " << out_path
              << "\n";
    return kExitOk;
}

// ---- calibrate ----

int cmd_calibrate(const std::string& spec_path, const std::string& out_path, int workers) {
    arcconf::ExperimentSpec spec = arcconf::load_experiment_spec(spec_path);
    arcconf::TruthModel truth = load_truth(spec.network, spec.seed, workers);

    std::vector<arcconf::CalibrationPoint> points;
    if (spec.method == "fdr" || spec.method == "both") {
        arcconf::FdrCalibrationConfig config;
        config.sample_sizes = spec.sizes;
        config.kappas = spec.kappas;
        config.family = arcconf::score_family_from_name(spec.family);
        config.ess = spec.alpha;
        config.replicates = spec.replicates;
        config.q_permutations = spec.q_permutations;
        config.seed = spec.seed;
        config.max_model_arcs = spec.max_model_arcs;
        config.max_parents = spec.max_parents;
        config.workers = workers;
        auto fdr_points = arcconf::run_fdr_calibration(truth, config);
        points.insert(points.end(), fdr_points.begin(), fdr_points.end());
    }
    if (spec.method == "bayes" || spec.method == "both") {
        arcconf::BayesCalibrationConfig config;
        config.sample_sizes = spec.sizes;
        config.kappa = spec.bayes_kappa;
        config.ess = spec.bayes_alpha;
        config.size_limit = spec.size_limit;
        config.thresholds = spec.thresholds;
        config.model_kappas = spec.method == "both" ? spec.kappas : std::vector<double>{};
        config.model_ess = spec.alpha;
        config.replicates = spec.replicates;
        config.seed = spec.seed;
        config.max_model_arcs = spec.max_model_arcs;
        config.max_parents = spec.max_parents;
        config.workers = workers;
        auto bayes_points = arcconf::run_bayes_calibration(truth, config);
        points.insert(points.end(), bayes_points.begin(), bayes_points.end());
    }

    std::ostringstream out;
    for (const auto& h : make_header("calibrate spec=" + spec_path, spec.seed))
        out << "# " << h << "\n";
    out << arcconf::calibration_csv(points);
    write_text_file(out_path, out.str());
    std::cout << "wrote " << points.size() << " calibration points to " << out_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DAG structure learning with arc-confidence estimation"};
    app.require_subcommand(1);
    int workers = arcconf::default_worker_count();
    app.add_option("--workers", workers, "worker threads (results are worker-count invariant)");

    // learn
    auto* learn = app.add_subcommand("learn", "learn a structure from a dataset csv");
    std::string learn_data, learn_ordering, learn_ordering_file, learn_family = "bdeu";
    std::string learn_out = "model.txt";
    double learn_kappa = 0.01, learn_alpha = 4.0;
    int learn_max_parents = -1;
    learn->add_option("--data", learn_data, "dataset csv")->required();
    learn->add_option("--ordering", learn_ordering, "comma-separated variable ordering");
    learn->add_option("--ordering-file", learn_ordering_file, "file with ordering names");
    learn->add_option("--family", learn_family, "bdeu | bic-cpt | bic-noisyor");
    learn->add_option("--kappa", learn_kappa, "structure-prior strength");
    learn->add_option("--alpha", learn_alpha, "BDeu equivalent sample size");
    learn->add_option("--max-parents", learn_max_parents, "parent-set size cap");
    learn->add_option("--out", learn_out, "model file to write");

    // fdr
    auto* fdr = app.add_subcommand("fdr", "estimate the FDR of the learned arcs");
    std::string fdr_data, fdr_family = "bdeu", fdr_out;
    double fdr_kappa = 0.01, fdr_alpha = 4.0;
    int fdr_q = 10, fdr_max_parents = -1;
    std::uint64_t fdr_seed = 0;
    fdr->add_option("--data", fdr_data, "dataset csv")->required();
    fdr->add_option("--family", fdr_family, "bdeu | bic-cpt | bic-noisyor");
    fdr->add_option("--kappa", fdr_kappa, "structure-prior strength");
    fdr->add_option("--alpha", fdr_alpha, "BDeu equivalent sample size");
    fdr->add_option("--max-parents", fdr_max_parents, "parent-set size cap");
    fdr->add_option("-Q,--permutations", fdr_q, "null replicates");
    fdr->add_option("--seed", fdr_seed, "rng seed");
    fdr->add_option("--out", fdr_out, "csv file to write");

    // bayes
    auto* bayes = app.add_subcommand("bayes", "expected true arcs of a given model");
    std::string bayes_data, bayes_model, bayes_out;
    double bayes_kappa = arcconf::kDefaultBayesKappa, bayes_alpha = arcconf::kDefaultBayesEss;
    int bayes_k = arcconf::kDefaultBayesSizeLimit;
    bool bayes_check = false;
    bayes->add_option("--data", bayes_data, "dataset csv")->required();
    bayes->add_option("--model", bayes_model, "model file")->required();
    bayes->add_option("--kappa", bayes_kappa, "estimator structure-prior strength");
    bayes->add_option("--alpha", bayes_alpha, "BDeu equivalent sample size");
    bayes->add_option("-k,--size-limit", bayes_k, "parent-set size limit");
    bayes->add_flag("--check-k-plus-one", bayes_check,
                    "also report the max marginal change at k+1");
    bayes->add_option("--out", bayes_out, "per-arc marginal csv to write");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "sample a dataset from a network");
    std::string sim_network = "alarm", sim_out = "data.csv";
    int sim_n = -1;
    std::uint64_t sim_seed = 0;
    simulate->add_option("--network", sim_network, "alarm | hiv-standin | <spec path>");
    simulate->add_option("-n,--rows", sim_n, "rows to sample");
    simulate->add_option("--seed", sim_seed, "rng seed");
    simulate->add_option("--out", sim_out, "dataset csv to write");

    // calibrate
    auto* calibrate = app.add_subcommand("calibrate", "run a calibration experiment");
    std::string cal_spec, cal_out = "calibration.csv";
    calibrate->add_option("--spec", cal_spec, "experiment spec file")->required();
    calibrate->add_option("--out", cal_out, "calibration csv to write");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (app.got_subcommand(learn))
            return cmd_learn(learn_data, learn_ordering, learn_ordering_file, learn_family,
                             learn_kappa, learn_alpha, learn_max_parents, learn_out, workers);
        if (app.got_subcommand(fdr))
            return cmd_fdr(fdr_data, fdr_family, fdr_kappa, fdr_alpha, fdr_max_parents, fdr_q,
                           fdr_seed, fdr_out, workers);
        if (app.got_subcommand(bayes))
            return cmd_bayes(bayes_data, bayes_model, bayes_kappa, bayes_alpha, bayes_k,
                             bayes_check, bayes_out, workers);
        if (app.got_subcommand(simulate))
            return cmd_simulate(sim_network, sim_n, sim_seed, sim_out, workers);
        if (app.got_subcommand(calibrate)) return cmd_calibrate(cal_spec, cal_out, workers);
    } catch (const arcconf::ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumericError;
    } catch (const arcconf::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumericError;
    } catch (const arcconf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}
