#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pnml/erm.hpp"

namespace pnml {

/// Score direction: regret grows with distance from the training
/// distribution, so larger scores mean more OOD.
enum class ScoreDirection { HigherIsOod };

/// Where a scored batch came from.
struct Provenance {
    std::vector<std::string> sources; ///< input file identifiers, if any
    std::string stats_fingerprint;    ///< see stats_fingerprint()
};

/// Per-sample scores for one test batch, in input order.
struct ScoredBatch {
    std::vector<RegretScore> scores;
    ScoreDirection direction = ScoreDirection::HigherIsOod;
    Provenance provenance;
};

struct PrepareOptions {
    bool normalize = true; ///< L2-normalize rows before the decomposition
    double rank_tol_factor = kDefaultRankTolFactor;
};

struct ScoreOptions {
    double orth_tol = kDefaultOrthTol;
    unsigned threads = 0; ///< worker threads; 0 = one per hardware thread
};

/// 2-D evaluation lattice: `steps` points per axis, endpoints included.
struct GridSpec {
    double x1_min, x1_max;
    double x2_min, x2_max;
    Eigen::Index steps;
};

/// One regret-map lattice point.
struct MapPoint {
    double x1, x2;
    double p_c2;   ///< ERM probability of the second class
    double regret;
};

/// Returns a copy with every row scaled to unit L2 norm and the normalized
/// flag set. A batch whose flag is already set is returned unchanged.
/// Throws InvalidInput naming the row index if a row is zero.
EmbeddingMatrix l2_normalize(const EmbeddingMatrix& batch);

/// Training-side precompute: optional L2 normalization followed by
/// decompose + build_stats.
PnmlStats prepare(const EmbeddingMatrix& train_embeddings,
                  const PrepareOptions& options = {});

/// Scores a test batch given its ERM probability vectors. Samples may be
/// processed concurrently; results are always in input order.
ScoredBatch score_batch(const PnmlStats& stats, const EmbeddingMatrix& test_embeddings,
                        const std::vector<ProbVector>& erm_probs,
                        const ScoreOptions& options = {});

/// The max-probability confidence score (lower means more OOD).
double baseline_score(const ProbVector& p);

/// Eigenvalues sorted descending with 1-based index, ready for log-scale
/// plotting.
std::vector<std::pair<Eigen::Index, double>> spectrum_report(const PnmlStats& stats);

/// Evaluates predict + regret on every lattice point of a 2-feature model.
/// Rows are emitted with x1 as the slow axis and x2 as the fast axis.
std::vector<MapPoint> regret_map(const LinearModel& model, const PnmlStats& stats,
                                 const GridSpec& grid);

/// Short stable identifier of a stats object (FNV-1a over the spectrum,
/// rank, sample count and the normalized flag).
std::string stats_fingerprint(const PnmlStats& stats);

} // namespace pnml
