#include "arcconf/calibration.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "arcconf/io.hpp"
#include "arcconf/parallel.hpp"
#include "arcconf/random.hpp"

namespace arcconf {

namespace {

constexpr std::uint64_t kTagData = 0x63616c2d64617461ull;  // replicate data stream
constexpr std::uint64_t kTagFdr = 0x63616c2d66647221ull;   // fdr estimator stream

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t a,
                          std::uint64_t b) {
    RngStream rng({seed, tag, a, b});
    return rng.next_u64();
}

void sort_points(std::vector<CalibrationPoint>& points) {
    std::stable_sort(points.begin(), points.end(), [](const auto& a, const auto& b) {
        if (a.method != b.method) return a.method < b.method;
        if (a.sample_size != b.sample_size) return a.sample_size < b.sample_size;
        if (a.kappa != b.kappa) return a.kappa < b.kappa;
        return a.replicate < b.replicate;
    });
}

}  // namespace

std::optional<double> actual_ppv(const Dag& learned, const Dag& truth) {
    const int arcs = learned.arc_count();
    if (arcs == 0) return std::nullopt;
    return static_cast<double>(arc_overlap(learned, truth)) / static_cast<double>(arcs);
}

Dataset sample_truth(const TruthModel& truth, int n, std::uint64_t seed) {
    return std::visit(
        [&](const auto& net) -> Dataset {
            using T = std::decay_t<decltype(net)>;
            if constexpr (std::is_same_v<T, CptNetwork>) return sample_cpt_network(net, n, seed);
            else return sample_noisyor_network(net, n, seed);
        },
        truth);
}

Dag truth_dag(const TruthModel& truth) {
    return std::visit(
        [](const auto& net) -> Dag {
            using T = std::decay_t<decltype(net)>;
            if constexpr (std::is_same_v<T, CptNetwork>) return net.dag;
            else return net.dag();
        },
        truth);
}

Dataset calibration_dataset(const TruthModel& truth, std::uint64_t seed, int n, int replicate) {
    return sample_truth(truth, n,
                        derive_seed(seed, kTagData, static_cast<std::uint64_t>(n),
                                    static_cast<std::uint64_t>(replicate)));
}

namespace {

SearchConfig search_config_for(const TruthModel& truth, ScoreFamily family, double kappa,
                               double ess, const std::optional<int>& max_parents) {
    SearchConfig config;
    if (const auto* nor = std::get_if<NoisyOrNetwork>(&truth))
        config = bipartite_noisyor_config(nor->hla_count, nor->peptide_count, kappa);
    config.score.family = family;
    config.score.kappa = kappa;
    config.score.ess = ess;
    config.score.max_parents = max_parents;
    return config;
}

}  // namespace

std::vector<CalibrationPoint> run_fdr_calibration(const TruthModel& truth,
                                                  const FdrCalibrationConfig& config) {
    const Dag truth_structure = truth_dag(truth);
    std::vector<CalibrationPoint> points;

    for (int n : config.sample_sizes) {
        for (int rep = 0; rep < config.replicates; ++rep) {
            const std::uint64_t data_seed =
                derive_seed(config.seed, kTagData, static_cast<std::uint64_t>(n),
                            static_cast<std::uint64_t>(rep));
            Dataset data = sample_truth(truth, n, data_seed);
            const std::uint64_t est_seed =
                derive_seed(config.seed, kTagFdr, static_cast<std::uint64_t>(n),
                            static_cast<std::uint64_t>(rep));

            for (double kappa : config.kappas) {
                CalibrationPoint point;
                point.method = "fdr";
                point.family = score_family_name(config.family);
                point.kappa = kappa;
                point.alpha = config.ess;
                point.sample_size = n;
                point.replicate = rep;
                point.seed = config.seed;
                try {
                    SearchConfig search =
                        search_config_for(truth, config.family, kappa, config.ess,
                                          config.max_parents);
                    StructureResult learned = learn_structure(data, search, config.workers);
                    point.model_arcs = learned.dag.arc_count();
                    if (point.model_arcs > config.max_model_arcs) {
                        point.error = "skipped: learned model has " +
                                      std::to_string(point.model_arcs) +
                                      " arcs, over the configured budget of " +
                                      std::to_string(config.max_model_arcs);
                    } else {
                        FdrResult result =
                            estimate_fdr(data, search, config.q_permutations, est_seed,
                                         config.workers);
                        point.expected_ppv = result.estimate.expected_ppv;
                        point.fdr_raw = result.estimate.fdr_raw;
                        point.actual_ppv = actual_ppv(result.model, truth_structure);
                    }
                } catch (const Error& e) {
                    point.error = e.what();
                }
                points.push_back(std::move(point));
            }
        }
    }
    sort_points(points);
    return points;
}

std::vector<CalibrationPoint> run_bayes_calibration(const TruthModel& truth,
                                                    const BayesCalibrationConfig& config) {
    const Dag truth_structure = truth_dag(truth);
    std::vector<CalibrationPoint> points;

    for (int n : config.sample_sizes) {
        for (int rep = 0; rep < config.replicates; ++rep) {
            const std::uint64_t data_seed =
                derive_seed(config.seed, kTagData, static_cast<std::uint64_t>(n),
                            static_cast<std::uint64_t>(rep));
            Dataset data = sample_truth(truth, n, data_seed);

            ScoreConfig estimator;
            estimator.family = ScoreFamily::BdeuExact;
            estimator.kappa = config.kappa;
            estimator.ess = config.ess;

            try {
                ArcMarginalTable marginals = compute_arc_marginals(
                    data, estimator, config.size_limit, kDefaultMaxSubsets, config.workers);

                auto emit = [&](const Dag& model, const BayesEstimate& est, double kappa,
                                double alpha) {
                    CalibrationPoint point;
                    point.method = "bayes";
                    point.family = score_family_name(ScoreFamily::BdeuExact);
                    point.kappa = kappa;
                    point.alpha = alpha;
                    point.sample_size = n;
                    point.replicate = rep;
                    point.seed = config.seed;
                    point.model_arcs = est.model_arc_count;
                    if (est.model_arc_count > config.max_model_arcs) {
                        point.error = "skipped: model has " +
                                      std::to_string(est.model_arc_count) +
                                      " arcs, over the configured budget of " +
                                      std::to_string(config.max_model_arcs);
                    } else {
                        point.expected_ppv = est.expected_ppv;
                        point.actual_ppv = actual_ppv(model, truth_structure);
                    }
                    points.push_back(std::move(point));
                };

                if (!config.thresholds.empty()) {
                    auto nested = nested_models_by_threshold(marginals, config.thresholds);
                    for (const auto& [model, est] : nested)
                        emit(model, est, config.kappa, config.ess);
                }
                for (double model_kappa : config.model_kappas) {
                    SearchConfig search = search_config_for(
                        truth, ScoreFamily::BdeuExact, model_kappa, config.model_ess,
                        config.max_parents);
                    StructureResult learned = learn_structure(data, search, config.workers);
                    BayesEstimate est = expected_true_arcs(marginals, learned.dag);
                    emit(learned.dag, est, model_kappa, config.model_ess);
                }
            } catch (const Error& e) {
                CalibrationPoint point;
                point.method = "bayes";
                point.family = score_family_name(ScoreFamily::BdeuExact);
                point.kappa = config.kappa;
                point.alpha = config.ess;
                point.sample_size = n;
                point.replicate = rep;
                point.seed = config.seed;
                point.error = e.what();
                points.push_back(std::move(point));
            }
        }
    }
    sort_points(points);
    return points;
}

std::pair<double, double> tune_hyperparams_by_prediction(const Dataset& train,
                                                         const Dataset& heldout,
                                                         const HyperGrid& grid,
                                                         PredictionMode mode, int size_limit,
                                                         int workers) {
    if (grid.points.empty()) throw ValidationError("hyperparameter grid is empty");

    std::pair<double, double> best = grid.points.front();
    double best_value = -std::numeric_limits<double>::infinity();
    for (const auto& [kappa, alpha] : grid.points) {
        double value = 0.0;
        if (mode == PredictionMode::ModelSelection) {
            SearchConfig search;
            search.score.family = ScoreFamily::BdeuExact;
            search.score.kappa = kappa;
            search.score.ess = alpha;
            StructureResult learned = learn_structure(train, search, workers);
            value = plugin_log_predictive(train, heldout, learned.dag, alpha);
        } else {
            ScoreConfig config;
            config.family = ScoreFamily::BdeuExact;
            config.kappa = kappa;
            config.ess = alpha;
            value = model_averaged_log_predictive(train, heldout, config, size_limit,
                                                  kDefaultMaxSubsets, workers);
        }
        if (value > best_value) {
            best_value = value;
            best = {kappa, alpha};
        }
    }
    return best;
}

std::string calibration_csv(const std::vector<CalibrationPoint>& points) {
    std::ostringstream out;
    out << "method,family,kappa,alpha,n,replicate,model_arcs,expected_ppv,actual_ppv,fdr_raw,"
           "seed\n";
    for (const auto& p : points) {
        if (p.error) {
            out << "# error method=" << p.method << " kappa=" << format_double(p.kappa)
                << " n=" << p.sample_size << " replicate=" << p.replicate << ": " << *p.error
                << "\n";
            continue;
        }
        out << p.method << ',' << p.family << ',' << format_double(p.kappa) << ','
            << format_double(p.alpha) << ',' << p.sample_size << ',' << p.replicate << ','
            << p.model_arcs << ',';
        if (p.expected_ppv) out << format_double(*p.expected_ppv);
        out << ',';
        if (p.actual_ppv) out << format_double(*p.actual_ppv);
        out << ',';
        if (p.fdr_raw) out << format_double(*p.fdr_raw);
        out << ',' << p.seed << "\n";
    }
    return out.str();
}

}  // namespace arcconf
