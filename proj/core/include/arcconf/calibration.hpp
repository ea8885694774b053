#ifndef ARCCONF_CALIBRATION_HPP
#define ARCCONF_CALIBRATION_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "arcconf/bayes.hpp"
#include "arcconf/dag.hpp"
#include "arcconf/dataset.hpp"
#include "arcconf/fdr.hpp"
#include "arcconf/synth.hpp"

namespace arcconf {

// Fraction of learned arcs present in the generating structure; absent for
// an arcless model.
std::optional<double> actual_ppv(const Dag& learned, const Dag& truth);

// One cell of a calibration experiment: an estimator's expected PPV next to
// the actual PPV measured against the generating structure.
struct CalibrationPoint {
    std::string method;  // "fdr" | "bayes"
    std::string family;
    double kappa = 0.0;
    double alpha = 0.0;
    int sample_size = 0;
    int replicate = 0;
    int model_arcs = 0;
    std::optional<double> expected_ppv;
    std::optional<double> actual_ppv;
    std::optional<double> fdr_raw;
    std::uint64_t seed = 0;
    std::optional<std::string> error;  // set when the cell failed or was skipped
};

// Either generating model; sampling and search restrictions are dispatched
// on the alternative.
using TruthModel = std::variant<CptNetwork, NoisyOrNetwork>;

Dataset sample_truth(const TruthModel& truth, int n, std::uint64_t seed);
Dag truth_dag(const TruthModel& truth);

// The exact dataset a calibration run draws for (n, replicate) under
// `seed`; exposed so follow-up analyses can rerun on the same data.
Dataset calibration_dataset(const TruthModel& truth, std::uint64_t seed, int n, int replicate);

struct FdrCalibrationConfig {
    std::vector<int> sample_sizes;
    std::vector<double> kappas;
    ScoreFamily family = ScoreFamily::BdeuExact;
    double ess = 4.0;
    int replicates = 3;
    int q_permutations = 10;
    std::uint64_t seed = 0;
    int max_model_arcs = 600;  // skip cells with larger learned models
    std::optional<int> max_parents;
    int workers = 1;
};

// For each (replicate, n, kappa): sample data from the truth, run the FDR
// estimator, and record expected vs actual PPV. Failures are recorded in
// the affected cell; the run continues. Points are sorted by
// (method, n, kappa, replicate) regardless of execution order.
std::vector<CalibrationPoint> run_fdr_calibration(const TruthModel& truth,
                                                  const FdrCalibrationConfig& config);

struct BayesCalibrationConfig {
    std::vector<int> sample_sizes;
    double kappa = kDefaultBayesKappa;  // estimator hyperparameters
    double ess = kDefaultBayesEss;
    int size_limit = kDefaultBayesSizeLimit;
    std::vector<double> thresholds;     // nested-model curve (descending)
    std::vector<double> model_kappas;   // greedy-learned models to evaluate
    double model_ess = 4.0;             // BDeu search alpha for those models
    int replicates = 3;
    std::uint64_t seed = 0;
    int max_model_arcs = 600;
    std::optional<int> max_parents;
    int workers = 1;
};

// Per replicate: sample data, compute arc marginals once, then emit one
// point per nested-threshold model and one per greedy-learned model. Data
// seeds depend only on (seed, n, replicate), so fdr and bayes runs with the
// same seed score the same learned models.
std::vector<CalibrationPoint> run_bayes_calibration(const TruthModel& truth,
                                                    const BayesCalibrationConfig& config);

enum class PredictionMode { ModelSelection, ModelAveraging };

struct HyperGrid {
    std::vector<std::pair<double, double>> points;  // (kappa, alpha)
};

// Grid point maximizing held-out log predictive likelihood. Model-selection
// mode scores the held-out set under the single learned structure with
// BDeu posterior-predictive parameters; model-averaging mode uses the
// per-row posterior mixture. First grid point wins ties.
std::pair<double, double> tune_hyperparams_by_prediction(const Dataset& train,
                                                         const Dataset& heldout,
                                                         const HyperGrid& grid,
                                                         PredictionMode mode,
                                                         int size_limit = kDefaultBayesSizeLimit,
                                                         int workers = 1);

// CSV emission: pinned header, one row per point, empty fields for absent
// values, '#'-prefixed error markers adjacent to failed cells.
std::string calibration_csv(const std::vector<CalibrationPoint>& points);

}  // namespace arcconf

#endif  // ARCCONF_CALIBRATION_HPP
