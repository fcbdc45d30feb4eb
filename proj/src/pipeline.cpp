#include "pnml/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "pnml/errors.hpp"

namespace pnml {

namespace {

void fnv1a(std::uint64_t& hash, const void* bytes, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    for (std::size_t i = 0; i < n; ++i) {
        hash ^= p[i];
        hash *= 0x100000001b3ULL;
    }
}

RegretScore score_one(const PnmlStats& stats, const Eigen::VectorXd& x,
                      const ProbVector& p, double orth_tol) {
    const double xtg = x_top_g(x, stats, orth_tol);
    Eigen::VectorXd terms = genie_terms(p, xtg);
    const double normalizer = terms.sum();
    if (!(normalizer > 0.0))
        throw NumericalFailure("pNML normalizer vanished during batch scoring");
    return RegretScore{xtg, std::max(0.0, std::log(normalizer)),
                       ProbVector(terms / normalizer), baseline_score(p),
                       std::move(terms)};
}

} // namespace

EmbeddingMatrix l2_normalize(const EmbeddingMatrix& batch) {
    if (batch.normalized())
        return batch;
    Eigen::MatrixXd scaled = batch.data();
    for (Eigen::Index i = 0; i < scaled.rows(); ++i) {
        const double norm = scaled.row(i).norm();
        if (!(norm > 0.0))
            throw InvalidInput("row " + std::to_string(i) + " has zero norm");
        scaled.row(i) /= norm;
    }
    return EmbeddingMatrix(std::move(scaled), true);
}

PnmlStats prepare(const EmbeddingMatrix& train_embeddings, const PrepareOptions& options) {
    const EmbeddingMatrix work =
        options.normalize ? l2_normalize(train_embeddings) : train_embeddings;
    const EigenBasis basis = decompose(work, options.rank_tol_factor);
    return build_stats(basis, work.rows(), work.normalized());
}

ScoredBatch score_batch(const PnmlStats& stats, const EmbeddingMatrix& test_embeddings,
                        const std::vector<ProbVector>& erm_probs,
                        const ScoreOptions& options) {
    if (test_embeddings.cols() != stats.dim())
        throw InvalidInput("test width does not match the stats dimension");
    const auto n = test_embeddings.rows();
    if (static_cast<std::size_t>(n) != erm_probs.size())
        throw InvalidInput("test rows and probability vectors differ in count");
    for (const ProbVector& p : erm_probs)
        if (p.size() != erm_probs.front().size())
            throw InvalidInput("probability vectors differ in class count");

    const EmbeddingMatrix work = l2_normalize(test_embeddings);

    unsigned workers = options.threads;
    if (workers == 0) {
        workers = std::thread::hardware_concurrency();
        if (workers == 0)
            workers = 1;
    }
    workers = std::min<unsigned>(workers, static_cast<unsigned>(n));

    std::vector<std::optional<RegretScore>> slots(static_cast<std::size_t>(n));
    if (workers <= 1) {
        for (Eigen::Index i = 0; i < n; ++i)
            slots[static_cast<std::size_t>(i)] = score_one(
                stats, work.data().row(i).transpose(), erm_probs[static_cast<std::size_t>(i)],
                options.orth_tol);
    } else {
        std::atomic<Eigen::Index> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto run = [&] {
            try {
                for (;;) {
                    const Eigen::Index i = next.fetch_add(1);
                    if (i >= n)
                        return;
                    slots[static_cast<std::size_t>(i)] = score_one(
                        stats, work.data().row(i).transpose(),
                        erm_probs[static_cast<std::size_t>(i)], options.orth_tol);
                }
            } catch (...) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next.store(n);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t)
            pool.emplace_back(run);
        for (std::thread& t : pool)
            t.join();
        if (failure)
            std::rethrow_exception(failure);
    }

    ScoredBatch batch;
    batch.scores.reserve(static_cast<std::size_t>(n));
    for (auto& slot : slots)
        batch.scores.push_back(std::move(*slot));
    batch.direction = ScoreDirection::HigherIsOod;
    batch.provenance.stats_fingerprint = stats_fingerprint(stats);
    return batch;
}

double baseline_score(const ProbVector& p) {
    return p.max();
}

std::vector<std::pair<Eigen::Index, double>> spectrum_report(const PnmlStats& stats) {
    std::vector<std::pair<Eigen::Index, double>> report;
    report.reserve(static_cast<std::size_t>(stats.basis.eigvals.size()));
    for (Eigen::Index i = 0; i < stats.basis.eigvals.size(); ++i)
        report.emplace_back(i + 1, stats.basis.eigvals[i]);
    return report;
}

std::vector<MapPoint> regret_map(const LinearModel& model, const PnmlStats& stats,
                                 const GridSpec& grid) {
    if (stats.dim() != 2 || model.n_features() != 2)
        throw InvalidInput("regret map requires exactly two features");
    if (grid.steps < 2)
        throw InvalidInput("grid needs at least two steps per axis");
    if (!std::isfinite(grid.x1_min) || !std::isfinite(grid.x1_max) ||
        !std::isfinite(grid.x2_min) || !std::isfinite(grid.x2_max) ||
        grid.x1_min > grid.x1_max || grid.x2_min > grid.x2_max)
        throw InvalidInput("grid bounds must be finite with min <= max");

    const double d1 = (grid.x1_max - grid.x1_min) / static_cast<double>(grid.steps - 1);
    const double d2 = (grid.x2_max - grid.x2_min) / static_cast<double>(grid.steps - 1);

    std::vector<MapPoint> points;
    points.reserve(static_cast<std::size_t>(grid.steps * grid.steps));
    Eigen::VectorXd x(2);
    for (Eigen::Index i = 0; i < grid.steps; ++i) {
        x[0] = grid.x1_min + static_cast<double>(i) * d1;
        for (Eigen::Index j = 0; j < grid.steps; ++j) {
            x[1] = grid.x2_min + static_cast<double>(j) * d2;
            const ProbVector p = predict(model, x);
            const double xtg = x_top_g(x, stats);
            points.push_back(MapPoint{x[0], x[1], p[1], regret(p, xtg)});
        }
    }
    return points;
}

std::string stats_fingerprint(const PnmlStats& stats) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (Eigen::Index i = 0; i < stats.basis.eigvals.size(); ++i) {
        const double v = stats.basis.eigvals[i];
        fnv1a(hash, &v, sizeof v);
    }
    const auto rank = static_cast<std::int64_t>(stats.basis.rank);
    const auto n_train = static_cast<std::int64_t>(stats.n_train);
    fnv1a(hash, &rank, sizeof rank);
    fnv1a(hash, &n_train, sizeof n_train);
    const unsigned char normalized = stats.normalized_inputs ? 1 : 0;
    fnv1a(hash, &normalized, sizeof normalized);

    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return std::string(buf, 16);
}

} // namespace pnml
