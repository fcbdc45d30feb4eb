#pragma once

#include <cstddef>
#include <span>

namespace pnml {

/// IND samples are the positive class. All three metrics expect OOD scores
/// to be larger than IND scores (the regret direction); use
/// evaluate_detection with LowerIsOod for max-probability style scorers.

struct DetectionReport {
    double auroc = 0.0;
    double tnr_at_tpr95 = 0.0;
    double detection_accuracy = 0.0;
    std::size_t n_ind = 0;
    std::size_t n_ood = 0;
    double threshold_at_tpr95 = 0.0;
};

enum class ScoreOrientation {
    HigherIsOod, ///< regret-like scores
    LowerIsOod,  ///< confidence-like scores (baseline max-probability)
};

/// Mann-Whitney statistic: fraction of (ind, ood) pairs with ood > ind,
/// ties counted 1/2. Equals the trapezoidal ROC area.
double auroc(std::span<const double> ind, std::span<const double> ood);

struct TnrResult {
    double tnr = 0.0;
    double threshold = 0.0;
};

/// Threshold tau is the smallest value with at least tpr_target of the IND
/// scores <= tau (IND classified positive when score <= tau); returns the
/// fraction of OOD scores strictly above tau.
TnrResult tnr_at_tpr(std::span<const double> ind, std::span<const double> ood,
                     double tpr_target = 0.95);

/// Best accuracy over all thresholds: candidates are midpoints between
/// adjacent distinct pooled scores plus the two constant classifiers.
double detection_accuracy(std::span<const double> ind, std::span<const double> ood);

/// All three metrics at once. LowerIsOod negates the scores internally;
/// the reported threshold is mapped back to the original score space
/// (IND is then the side with score >= threshold).
DetectionReport evaluate_detection(std::span<const double> ind,
                                   std::span<const double> ood,
                                   ScoreOrientation orientation = ScoreOrientation::HigherIsOod,
                                   double tpr_target = 0.95);

} // namespace pnml
