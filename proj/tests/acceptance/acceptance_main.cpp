// Acceptance suite: runs every release criterion at its pinned tolerance
// (see arcconf/calibration_bands.hpp) and prints one pass/fail line per
// criterion. Exit code is the number of failed criteria. Pass criterion
// numbers as arguments to run a subset.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "arcconf/bayes.hpp"
#include "arcconf/calibration.hpp"
#include "arcconf/calibration_bands.hpp"
#include "arcconf/fdr.hpp"
#include "arcconf/io.hpp"
#include "arcconf/noisy_or.hpp"
#include "arcconf/parallel.hpp"
#include "arcconf/search.hpp"
#include "arcconf/synth.hpp"
#include "oracles.hpp"

using namespace arcconf;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSuiteSeed = 20240901;

struct Outcome {
    bool pass = false;
    std::string detail;
};

// ---- 1: closed-form BDeu vs numerical Dirichlet integration ----

Outcome criterion_bdeu_oracle() {
    RngStream rng({kSuiteSeed, 1});
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int n_parents = static_cast<int>(rng.next_below(3));
        const int rows = 1 + static_cast<int>(rng.next_below(6));
        std::vector<int> arities(static_cast<std::size_t>(n_parents) + 1, 2);
        Dataset data = oracle::random_dataset(rng, rows, arities);
        std::vector<int> parents;
        for (int p = 1; p <= n_parents; ++p) parents.push_back(p);
        const double ess = 1.0 + 7.0 * rng.next_unit();

        const double got = bdeu_family_loglik(data, 0, parents, ess);
        const double want = oracle::dirichlet_integral_bdeu(data, 0, parents, ess);
        worst = std::max(worst, std::abs(got - want));
    }
    Outcome out;
    out.pass = worst <= bands::kBdeuOracleAbsErr;
    out.detail = "max |closed-form - quadrature| = " + format_double(worst);
    return out;
}

// ---- 2: factorized expectation vs brute force over all structures ----

Outcome criterion_linearity() {
    RngStream rng({kSuiteSeed, 2});
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int rows = 5 + static_cast<int>(rng.next_below(6));
        Dataset data = oracle::random_dataset(rng, rows, {2, 2, 2, 2});
        const double kappa = 0.05 + 1.95 * rng.next_unit();

        ScoreConfig config;
        config.kappa = kappa;
        config.ess = 4.0;
        auto table = compute_arc_marginals(data, config, 3);
        Dag model = oracle::random_dag(rng, data.ordering());

        const double got = expected_true_arcs(table, model).expected_true_arcs;
        const double want = oracle::expected_true_arcs_bruteforce(data, model, kappa, 4.0);
        worst = std::max(worst, std::abs(got - want));
    }
    Outcome out;
    out.pass = worst <= bands::kLinearityAbsErr;
    out.detail = "max |marginal-sum - full-enumeration| = " + format_double(worst);
    return out;
}

// ---- 3: estimator arithmetic fixtures ----

Outcome criterion_fdr_arithmetic() {
    Outcome out;
    out.pass = true;
    auto expect = [&](bool cond, const std::string& what) {
        if (!cond) {
            out.pass = false;
            out.detail += (out.detail.empty() ? "" : "; ") + what;
        }
    };

    std::vector<int> nulls{1, 0, 0, 1, 0, 0, 0, 0, 0, 0};
    auto smooth = make_fdr_estimate(30, nulls, 10, 0);
    expect(smooth.fdr_raw && std::abs(*smooth.fdr_raw - 0.01) < 1e-15, "0.01 fixture");
    expect(smooth.expected_ppv && std::abs(*smooth.expected_ppv - 0.99) < 1e-15, "ppv 0.99");
    long long sum = 0;
    for (int c : smooth.null_counts) sum += c;
    expect(*smooth.fdr_raw ==
               (1.0 + static_cast<double>(sum)) / smooth.q_permutations / smooth.observed_arcs,
           "identity over preserved integers");

    auto clamp = make_fdr_estimate(5, std::vector<int>(10, 10), 10, 0);
    expect(clamp.fdr_raw && std::abs(*clamp.fdr_raw - 2.02) < 1e-15, "raw 2.02 fixture");
    expect(clamp.fdr_clamped && *clamp.fdr_clamped == 1.0, "clamp to 1");
    expect(clamp.expected_ppv && *clamp.expected_ppv == 0.0, "ppv 0");

    auto none = make_fdr_estimate(0, {}, 10, 0);
    expect(none.no_discoveries() && !none.fdr_raw && !none.expected_ppv,
           "no-discoveries guard");

    if (out.pass) out.detail = "0.01 fixture, clamp fixture, and guard all exact";
    return out;
}

// ---- 4: analytic gradient vs central differences ----

Outcome criterion_gradient() {
    RngStream rng({kSuiteSeed, 4});
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n_parents = 1 + static_cast<int>(rng.next_below(3));
        std::vector<int> arities(static_cast<std::size_t>(n_parents) + 1, 2);
        Dataset data = oracle::random_dataset(rng, 30, arities);
        std::vector<int> parents;
        for (int p = 1; p <= n_parents; ++p) parents.push_back(p);
        std::vector<double> theta(static_cast<std::size_t>(n_parents) + 1);
        for (auto& t : theta) t = 0.05 + 2.0 * rng.next_unit();

        auto grad = noisyor_gradient(theta, data, 0, parents);
        auto fd = oracle::noisyor_fd_gradient(data, 0, parents, theta, bands::kGradientFdStep);
        for (std::size_t i = 0; i < grad.size(); ++i) {
            const double rel = std::abs(grad[i] - fd[i]) / std::max(1.0, std::abs(fd[i]));
            worst = std::max(worst, rel);
        }
    }
    Outcome out;
    out.pass = worst < bands::kGradientRelErr;
    out.detail = "max relative error = " + format_double(worst);
    return out;
}

// ---- 5: ML fit vs dense grid search ----

Outcome criterion_ml_grid() {
    RngStream rng({kSuiteSeed, 5});
    const int parent_counts[10] = {1, 1, 1, 1, 1, 2, 2, 2, 2, 3};
    double worst_shortfall = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const int p = parent_counts[trial];
        const int rows = 200;
        std::vector<std::vector<int>> columns(static_cast<std::size_t>(p) + 1,
                                              std::vector<int>(static_cast<std::size_t>(rows)));
        std::vector<double> links(static_cast<std::size_t>(p));
        for (auto& q : links) q = 0.2 + 0.5 * rng.next_unit();
        const double leak = 0.02 + 0.06 * rng.next_unit();
        for (int r = 0; r < rows; ++r) {
            double survive = 1.0 - leak;
            for (int t = 0; t < p; ++t) {
                const int v = rng.next_unit() < 0.45 ? 1 : 0;
                columns[static_cast<std::size_t>(t) + 1][static_cast<std::size_t>(r)] = v;
                if (v) survive *= 1.0 - links[static_cast<std::size_t>(t)];
            }
            columns[0][static_cast<std::size_t>(r)] = rng.next_unit() < 1.0 - survive;
        }
        std::vector<int> arities(static_cast<std::size_t>(p) + 1, 2);
        std::vector<int> ordering(static_cast<std::size_t>(p) + 1);
        for (int i = 0; i <= p; ++i) ordering[static_cast<std::size_t>(i)] = i;
        Dataset data(std::move(columns), std::move(arities), {}, std::move(ordering));

        std::vector<int> parents;
        for (int t = 1; t <= p; ++t) parents.push_back(t);
        auto fit = fit_noisyor_ml(data, 0, parents);
        auto grid = oracle::noisyor_grid_search(data, 0, parents, bands::kGridResolution);
        worst_shortfall = std::max(worst_shortfall, grid.loglik - fit.loglik);
    }
    Outcome out;
    out.pass = worst_shortfall <= bands::kGridFitSlack;
    out.detail = "max (grid - fitted) objective = " + format_double(worst_shortfall);
    return out;
}

// ---- 6: greedy vs exhaustive parent-set search ----

Outcome criterion_greedy() {
    RngStream rng({kSuiteSeed, 6});
    int matches = 0;
    const int trials = 200;
    bool never_exceeds = true;
    for (int trial = 0; trial < trials; ++trial) {
        const int cands = 1 + static_cast<int>(rng.next_below(4));
        const int rows = 20 + static_cast<int>(rng.next_below(41));
        std::vector<int> arities(static_cast<std::size_t>(cands) + 1, 2);
        for (auto& a : arities)
            if (rng.next_unit() < 0.3) a = 3;
        Dataset data = oracle::random_dataset(rng, rows, arities);
        const int node = cands;

        SearchConfig config;
        config.score.family = trial % 2 ? ScoreFamily::BicCpt : ScoreFamily::BdeuExact;
        config.score.kappa = 0.05 + 1.95 * rng.next_unit();
        config.score.ess = 4.0;

        auto greedy = learn_parent_set(data, node, config);
        auto best = oracle::exhaustive_parent_search(
            data, node, candidate_parents(node, data.ordering()), config.score);
        if (greedy.score.log_score > best.score + 1e-9) never_exceeds = false;
        if (std::abs(greedy.score.log_score - best.score) <= 1e-9) ++matches;
    }
    const double rate = static_cast<double>(matches) / trials;
    Outcome out;
    out.pass = never_exceeds && rate >= bands::kGreedyMatchRate;
    out.detail = "match rate " + format_double(rate) + " (shortfall rate " +
                 format_double(1.0 - rate) + "), exhaustive never exceeded: " +
                 (never_exceeds ? "yes" : "NO");
    return out;
}

// ---- 7: Alarm FDR calibration bands ----

Outcome criterion_alarm_fdr() {
    FdrCalibrationConfig config;
    config.sample_sizes = {bands::kAlarmSampleSize};
    config.kappas.assign(std::begin(bands::kAlarmFdrKappaGrid),
                         std::end(bands::kAlarmFdrKappaGrid));
    config.family = ScoreFamily::BdeuExact;
    config.ess = bands::kAlarmBdeuEss;
    config.replicates = bands::kAlarmReplicates;
    config.q_permutations = bands::kAlarmQ;
    config.seed = kSuiteSeed;
    config.max_model_arcs = bands::kDefaultMaxModelArcs;
    config.workers = default_worker_count();

    auto points = run_fdr_calibration(TruthModel{alarm_network()}, config);

    double worst_high = 0.0;
    int high_points = 0, low_points = 0;
    double low_mean = 0.0;
    for (const auto& p : points) {
        if (p.error || !p.expected_ppv || !p.actual_ppv) continue;
        if (*p.expected_ppv >= bands::kFdrHighPpvThreshold) {
            ++high_points;
            worst_high = std::max(worst_high, std::abs(*p.actual_ppv - *p.expected_ppv));
        }
        if (*p.expected_ppv < bands::kFdrLowPpvThreshold) {
            ++low_points;
            low_mean += *p.actual_ppv - *p.expected_ppv;
        }
    }
    if (low_points > 0) low_mean /= low_points;

    Outcome out;
    const bool high_ok = high_points > 0 && worst_high <= bands::kFdrHighPpvAbsErr;
    const bool low_ok = low_points == 0 || low_mean >= 0.0;
    out.pass = high_ok && low_ok;
    out.detail = "high-ppv points " + std::to_string(high_points) + ", max |actual-expected| " +
                 format_double(worst_high) + "; low-ppv points " + std::to_string(low_points) +
                 ", mean(actual-expected) " + format_double(low_points ? low_mean : 0.0);
    return out;
}

// ---- 8: Alarm Bayesian calibration bands and size-limit robustness ----

Outcome criterion_alarm_bayes() {
    const TruthModel truth{alarm_network()};
    const int workers = default_worker_count();

    BayesCalibrationConfig config;
    config.sample_sizes = {bands::kAlarmSampleSize};
    config.kappa = bands::kBayesKappa;
    config.ess = bands::kBayesEss;
    config.size_limit = bands::kBayesSizeLimit;
    config.thresholds.assign(std::begin(bands::kBayesThresholdGrid),
                             std::end(bands::kBayesThresholdGrid));
    config.replicates = bands::kAlarmReplicates;
    config.seed = kSuiteSeed;
    config.max_model_arcs = bands::kDefaultMaxModelArcs;
    config.workers = workers;

    auto points = run_bayes_calibration(truth, config);
    int used = 0;
    double mean_miss = 0.0;
    for (const auto& p : points) {
        if (p.error || !p.expected_ppv || !p.actual_ppv) continue;
        if (*p.expected_ppv < bands::kBayesPpvThreshold) continue;
        ++used;
        mean_miss += *p.actual_ppv - *p.expected_ppv;
    }
    if (used > 0) mean_miss /= used;

    // Size-limit robustness on the same replicate datasets.
    ScoreConfig estimator;
    estimator.kappa = bands::kBayesKappa;
    estimator.ess = bands::kBayesEss;
    double worst_shift = 0.0;
    for (int rep = 0; rep < config.replicates; ++rep) {
        Dataset data =
            calibration_dataset(truth, kSuiteSeed, bands::kAlarmSampleSize, rep);
        auto at_k = compute_arc_marginals(data, estimator, bands::kBayesSizeLimit,
                                          kDefaultMaxSubsets, workers);
        auto at_k1 = compute_arc_marginals(data, estimator, bands::kBayesSizeLimit + 1,
                                           kDefaultMaxSubsets, workers);
        worst_shift = std::max(worst_shift, max_marginal_change(at_k, at_k1));
    }

    Outcome out;
    const bool band_ok = used > 0 && mean_miss >= bands::kBayesMeanLow &&
                         mean_miss <= bands::kBayesMeanHigh;
    const bool shift_ok = worst_shift <= bands::kBayesSizeShiftMax;
    out.pass = band_ok && shift_ok;
    out.detail = "points " + std::to_string(used) + ", mean(actual-expected) " +
                 format_double(used ? mean_miss : 0.0) + "; max marginal shift at k+1 " +
                 format_double(worst_shift);
    return out;
}

// ---- 9: bipartite noisy-OR stand-in calibration ----

Outcome criterion_hiv_standin() {
    const int workers = default_worker_count();
    HivStandin standin = make_hiv_standin(kSuiteSeed, bands::kHivTargetFdr, workers);

    FdrCalibrationConfig config;
    config.sample_sizes = {bands::kHivPatients};
    config.kappas.assign(std::begin(bands::kHivKappaGrid), std::end(bands::kHivKappaGrid));
    config.family = ScoreFamily::BicNoisyOr;
    config.replicates = bands::kHivReplicates;
    config.q_permutations = bands::kAlarmQ;
    config.seed = kSuiteSeed + 9;
    config.max_model_arcs = bands::kDefaultMaxModelArcs;
    config.workers = workers;

    auto points = run_fdr_calibration(TruthModel{standin.network}, config);

    int qualifying = 0;
    double worst = 0.0;
    for (const auto& p : points) {
        if (p.error || !p.expected_ppv || !p.actual_ppv) continue;
        const double fdr_clamped = 1.0 - *p.expected_ppv;
        if (fdr_clamped > bands::kHivFdrThreshold) continue;
        ++qualifying;
        worst = std::max(worst, std::abs(*p.actual_ppv - *p.expected_ppv));
    }

    Outcome out;
    out.pass = qualifying > 0 && worst <= bands::kHivAbsErr;
    out.detail = "stand-in built at kappa " + format_double(standin.kappa) + " (fdr " +
                 format_double(standin.fdr_at_kappa) + "); low-fdr points " +
                 std::to_string(qualifying) + ", max |actual-(1-fdr)| " + format_double(worst);
    return out;
}

// ---- 10: byte-identical reruns across seeds and worker counts ----

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("arcconf_acceptance_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(ARCCONF_TOOL_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return status < 0 ? -1 : WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

Outcome criterion_determinism() {
    TempDir tmp;
    Outcome out;
    out.pass = true;
    auto expect = [&](bool cond, const std::string& what) {
        if (!cond) {
            out.pass = false;
            out.detail += (out.detail.empty() ? "" : "; ") + what;
        }
    };
    const std::string max_workers = std::to_string(std::max(8, default_worker_count()));
    const auto p = [&](const std::string& name) { return (tmp.path / name).string(); };

    expect(run_cli("simulate --network alarm -n 120 --seed 5 --out " + p("s1.csv")) == 0,
           "simulate run 1");
    expect(run_cli("simulate --network alarm -n 120 --seed 5 --out " + p("s2.csv")) == 0,
           "simulate run 2");
    expect(slurp(p("s1.csv")) == slurp(p("s2.csv")), "simulate outputs identical");

    expect(run_cli("learn --data " + p("s1.csv") + " --kappa 0.01 --alpha 4 --out " +
                   p("m1.txt")) == 0,
           "learn run 1");
    expect(run_cli("--workers " + max_workers + " learn --data " + p("s1.csv") +
                   " --kappa 0.01 --alpha 4 --out " + p("m2.txt")) == 0,
           "learn run 2");
    expect(slurp(p("m1.txt")) == slurp(p("m2.txt")), "learn outputs identical across workers");

    expect(run_cli("--workers 1 fdr --data " + p("s1.csv") +
                   " --kappa 0.1 -Q 4 --seed 9 --out " + p("f1.csv")) == 0,
           "fdr run 1");
    expect(run_cli("--workers " + max_workers + " fdr --data " + p("s1.csv") +
                   " --kappa 0.1 -Q 4 --seed 9 --out " + p("f2.csv")) == 0,
           "fdr run 2");
    expect(slurp(p("f1.csv")) == slurp(p("f2.csv")), "fdr outputs identical across workers");

    expect(run_cli("--workers 1 bayes --data " + p("s1.csv") + " --model " + p("m1.txt") +
                   " -k 2 --out " + p("b1.csv")) == 0,
           "bayes run 1");
    expect(run_cli("--workers " + max_workers + " bayes --data " + p("s1.csv") + " --model " +
                   p("m1.txt") + " -k 2 --out " + p("b2.csv")) == 0,
           "bayes run 2");
    expect(slurp(p("b1.csv")) == slurp(p("b2.csv")), "bayes outputs identical across workers");

    {
        std::ofstream net(p("chain.net"));
        net << "node A 2\nnode B 2\nparents B A\n"
               "cpt A 0 0.5 0.5\ncpt B 0 0.9 0.1\ncpt B 1 0.1 0.9\norder A B\n";
        std::ofstream spec(p("exp.cfg"));
        spec << "method = both\nnetwork = " << p("chain.net")
             << "\nsizes = 100\nkappas = 0.1\nthresholds = 0.9,0.5\nreplicates = 2\nQ = 3\n"
                "seed = 17\n";
    }
    expect(run_cli("--workers 1 calibrate --spec " + p("exp.cfg") + " --out " + p("c1.csv")) == 0,
           "calibrate run 1");
    expect(run_cli("--workers " + max_workers + " calibrate --spec " + p("exp.cfg") + " --out " +
                   p("c2.csv")) == 0,
           "calibrate run 2");
    expect(slurp(p("c1.csv")) == slurp(p("c2.csv")), "calibrate outputs identical across workers");

    if (out.pass) out.detail = "all commands byte-identical across reruns and worker counts";
    return out;
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "bdeu-dirichlet-oracle", criterion_bdeu_oracle},
        {2, "expected-arcs-bruteforce", criterion_linearity},
        {3, "fdr-arithmetic", criterion_fdr_arithmetic},
        {4, "noisyor-gradient", criterion_gradient},
        {5, "noisyor-ml-grid", criterion_ml_grid},
        {6, "greedy-vs-exhaustive", criterion_greedy},
        {7, "alarm-fdr-calibration", criterion_alarm_fdr},
        {8, "alarm-bayes-calibration", criterion_alarm_bayes},
        {9, "hiv-standin-calibration", criterion_hiv_standin},
        {10, "determinism", criterion_determinism},
    };

    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

    int failures = 0, ran = 0;
    for (const auto& criterion : criteria) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), criterion.id) == selected.end())
            continue;
        ++ran;
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criterion.run();
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.detail = std::string("exception: ") + e.what();
        }
        const auto seconds =
            std::chrono::duration_cast<std::chrono::duration<double>>(
                std::chrono::steady_clock::now() - start)
                .count();
        std::ostringstream line;
        line << "[" << (criterion.id < 10 ? " " : "") << criterion.id << "] " << criterion.name
             << ": " << (outcome.pass ? "PASS" : "FAIL") << " (" << outcome.detail << ") ["
             << static_cast<int>(seconds * 1000) << " ms]";
        std::cout << line.str() << std::endl;
        if (!outcome.pass) ++failures;
    }
    std::cout << "acceptance: " << (ran - failures) << "/" << ran << " criteria passed"
              << std::endl;
    return failures;
}
