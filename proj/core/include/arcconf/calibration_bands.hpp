#ifndef ARCCONF_CALIBRATION_BANDS_HPP
#define ARCCONF_CALIBRATION_BANDS_HPP

// Every tolerance, grid, and acceptance band used by the calibration
// experiments and the acceptance suite lives here, so the numbers can be
// audited in one place. The figures these bands encode publish no tables;
// each band states the direction and magnitude the experiments are held to.

namespace arcconf::bands {

// ---- Alarm FDR calibration (frequentist estimator) ----
inline constexpr int kAlarmReplicates = 3;
inline constexpr int kAlarmSampleSize = 1000;
inline constexpr int kAlarmSmallSampleSize = 100;
inline constexpr double kAlarmBdeuEss = 4.0;
inline constexpr int kAlarmQ = 10;
inline constexpr double kAlarmFdrKappaGrid[] = {1e-4, 1e-3, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0};

// High-PPV region: estimates must track truth within this absolute error.
inline constexpr double kFdrHighPpvThreshold = 0.8;
inline constexpr double kFdrHighPpvAbsErr = 0.15;
// Low-PPV region: the estimator must err on the conservative side on
// average (actual >= expected).
inline constexpr double kFdrLowPpvThreshold = 0.5;

// ---- Alarm Bayesian calibration ----
inline constexpr double kBayesKappa = 0.1;
inline constexpr double kBayesEss = 4.0;
inline constexpr int kBayesSizeLimit = 5;
inline constexpr double kBayesThresholdGrid[] = {0.99, 0.95, 0.9, 0.8, 0.7,
                                                 0.6,  0.5,  0.4, 0.3, 0.2, 0.1};
// Mean signed miss over points with expected PPV >= threshold: slightly
// over-confident is expected, so the band is asymmetric around zero.
inline constexpr double kBayesPpvThreshold = 0.5;
inline constexpr double kBayesMeanLow = -0.25;
inline constexpr double kBayesMeanHigh = 0.05;
// Re-running with size limit + 1 may move no marginal by more than this.
inline constexpr double kBayesSizeShiftMax = 0.02;

// ---- Bipartite noisy-OR stand-in calibration ----
inline constexpr int kHivHlaCount = 70;
inline constexpr int kHivPeptideCount = 140;
inline constexpr int kHivPatients = 102;
inline constexpr int kHivReplicates = 3;
inline constexpr double kHivTargetFdr = 0.3;
inline constexpr double kHivKappaGrid[] = {0.01, 0.1, 1.0, 10.0, 100.0, 1000.0, 10000.0};
// Accuracy band at the low-FDR end.
inline constexpr double kHivFdrThreshold = 0.2;
inline constexpr double kHivAbsErr = 0.10;

// ---- Oracle tolerances ----
inline constexpr double kBdeuOracleAbsErr = 1e-8;
inline constexpr double kLinearityAbsErr = 1e-10;
inline constexpr double kGradientRelErr = 1e-5;
inline constexpr double kGradientFdStep = 1e-5;
inline constexpr double kGridResolution = 0.01;
// Slack below the best grid point allowed for the fitted objective (covers
// the fit tolerance, nothing else).
inline constexpr double kGridFitSlack = 1e-6;
inline constexpr double kGreedyMatchRate = 0.80;

// Skip calibration points whose learned model exceeds this arc budget
// (very low expected-PPV regions are disproportionately expensive).
inline constexpr int kDefaultMaxModelArcs = 600;

}  // namespace arcconf::bands

#endif  // ARCCONF_CALIBRATION_BANDS_HPP
