#include "pnml/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "pnml/errors.hpp"

namespace pnml {

namespace {

std::vector<double> sorted_copy(std::span<const double> xs, const char* side) {
    if (xs.empty())
        throw InvalidInput(std::string(side) + " score list is empty");
    std::vector<double> out(xs.begin(), xs.end());
    for (const double v : out)
        if (!std::isfinite(v))
            throw InvalidInput(std::string(side) + " scores contain non-finite values");
    std::sort(out.begin(), out.end());
    return out;
}

// #elements <= t and #elements > t in a sorted vector.
std::size_t count_le(const std::vector<double>& xs, double t) {
    return static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), t) - xs.begin());
}

std::size_t count_gt(const std::vector<double>& xs, double t) {
    return xs.size() - count_le(xs, t);
}

} // namespace

double auroc(std::span<const double> ind, std::span<const double> ood) {
    const std::vector<double> in = sorted_copy(ind, "IND");
    const std::vector<double> out = sorted_copy(ood, "OOD");

    double wins = 0.0;
    for (const double o : out) {
        const auto lo = std::lower_bound(in.begin(), in.end(), o);
        const auto hi = std::upper_bound(lo, in.end(), o);
        wins += static_cast<double>(lo - in.begin()) + 0.5 * static_cast<double>(hi - lo);
    }
    return wins / (static_cast<double>(in.size()) * static_cast<double>(out.size()));
}

TnrResult tnr_at_tpr(std::span<const double> ind, std::span<const double> ood,
                     double tpr_target) {
    if (!std::isfinite(tpr_target) || !(tpr_target > 0.0) || tpr_target > 1.0)
        throw InvalidInput("tpr_target must lie in (0, 1]");
    const std::vector<double> in = sorted_copy(ind, "IND");
    const std::vector<double> out = sorted_copy(ood, "OOD");

    // Smallest threshold keeping at least tpr_target of the IND mass below
    // or at it: the k-th order statistic.
    const auto k = static_cast<std::size_t>(
        std::ceil(tpr_target * static_cast<double>(in.size())));
    const double tau = in[k - 1];
    const double tnr = static_cast<double>(count_gt(out, tau)) / static_cast<double>(out.size());
    return TnrResult{tnr, tau};
}

double detection_accuracy(std::span<const double> ind, std::span<const double> ood) {
    const std::vector<double> in = sorted_copy(ind, "IND");
    const std::vector<double> out = sorted_copy(ood, "OOD");
    const double total = static_cast<double>(in.size() + out.size());

    std::vector<double> pooled;
    pooled.reserve(in.size() + out.size());
    std::merge(in.begin(), in.end(), out.begin(), out.end(), std::back_inserter(pooled));
    pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

    const auto accuracy_at = [&](double tau) {
        return (static_cast<double>(count_le(in, tau)) +
                static_cast<double>(count_gt(out, tau))) / total;
    };

    // The two constant classifiers, then every midpoint between adjacent
    // distinct pooled scores.
    double best = std::max(accuracy_at(-std::numeric_limits<double>::infinity()),
                           accuracy_at(std::numeric_limits<double>::infinity()));
    for (std::size_t i = 0; i + 1 < pooled.size(); ++i) {
        const double mid = pooled[i] + 0.5 * (pooled[i + 1] - pooled[i]);
        best = std::max(best, accuracy_at(mid));
    }
    return best;
}

DetectionReport evaluate_detection(std::span<const double> ind,
                                   std::span<const double> ood,
                                   ScoreOrientation orientation,
                                   double tpr_target) {
    std::vector<double> in(ind.begin(), ind.end());
    std::vector<double> out(ood.begin(), ood.end());
    if (orientation == ScoreOrientation::LowerIsOod) {
        for (double& v : in)
            v = -v;
        for (double& v : out)
            v = -v;
    }

    DetectionReport report;
    report.auroc = auroc(in, out);
    const TnrResult tnr = tnr_at_tpr(in, out, tpr_target);
    report.tnr_at_tpr95 = tnr.tnr;
    report.threshold_at_tpr95 =
        orientation == ScoreOrientation::LowerIsOod ? -tnr.threshold : tnr.threshold;
    report.detection_accuracy = detection_accuracy(in, out);
    report.n_ind = in.size();
    report.n_ood = out.size();
    return report;
}

} // namespace pnml
