#pragma once

#include <algorithm>
#include <filesystem>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace testutil {

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index n, Eigen::Index m,
                                     double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    Eigen::MatrixXd x(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            x(i, j) = gauss(rng);
    return x;
}

// Rank-k matrix: random n x k coefficients times a k x m basis.
inline Eigen::MatrixXd random_rank_k(std::mt19937_64& rng, Eigen::Index n, Eigen::Index m,
                                     Eigen::Index k) {
    return random_matrix(rng, n, k) * random_matrix(rng, k, m);
}

inline Eigen::VectorXd random_unit(std::mt19937_64& rng, Eigen::Index m) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd v(m);
    do {
        for (Eigen::Index i = 0; i < m; ++i)
            v[i] = gauss(rng);
    } while (v.norm() < 1e-6);
    return v / v.norm();
}

// Uniform simplex point via normalized exponentials.
inline Eigen::VectorXd random_simplex(std::mt19937_64& rng, Eigen::Index c) {
    std::exponential_distribution<double> expo(1.0);
    Eigen::VectorXd p(c);
    for (Eigen::Index i = 0; i < c; ++i)
        p[i] = expo(rng);
    return p / p.sum();
}

// Scores with deliberate ties when quantize is set.
inline std::vector<double> random_scores(std::mt19937_64& rng, std::size_t n, bool quantize) {
    std::vector<double> out(n);
    if (quantize) {
        std::uniform_int_distribution<int> grid(0, 16);
        for (double& v : out)
            v = static_cast<double>(grid(rng)) / 8.0;
    } else {
        std::uniform_real_distribution<double> uni(-2.0, 2.0);
        for (double& v : out)
            v = uni(rng);
    }
    return out;
}

// O(n^2) pair count, ties worth one half.
inline double auroc_brute(const std::vector<double>& ind, const std::vector<double>& ood) {
    double wins = 0.0;
    for (const double o : ood)
        for (const double i : ind) {
            if (o > i)
                wins += 1.0;
            else if (o == i)
                wins += 0.5;
        }
    return wins / (static_cast<double>(ind.size()) * static_cast<double>(ood.size()));
}

// Exhaustive threshold sweep: smallest ind value keeping at least `target`
// of the IND mass at or below it.
struct BruteTnr {
    double tnr;
    double threshold;
};

inline BruteTnr tnr_brute(std::vector<double> ind, const std::vector<double>& ood,
                          double target) {
    std::sort(ind.begin(), ind.end());
    double tau = ind.back();
    for (const double candidate : ind) {
        std::size_t at_or_below = 0;
        for (const double v : ind)
            if (v <= candidate)
                ++at_or_below;
        if (static_cast<double>(at_or_below) >=
            target * static_cast<double>(ind.size())) {
            tau = candidate;
            break;
        }
    }
    std::size_t above = 0;
    for (const double v : ood)
        if (v > tau)
            ++above;
    return BruteTnr{static_cast<double>(above) / static_cast<double>(ood.size()), tau};
}

// Full enumeration over pooled values, midpoints and the two constant
// classifiers.
inline double acc_brute(const std::vector<double>& ind, const std::vector<double>& ood) {
    std::vector<double> candidates;
    for (const double v : ind)
        candidates.push_back(v);
    for (const double v : ood)
        candidates.push_back(v);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    std::vector<double> taus = {-1e300, 1e300};
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        taus.push_back(candidates[i]);
        if (i + 1 < candidates.size())
            taus.push_back(candidates[i] + 0.5 * (candidates[i + 1] - candidates[i]));
    }
    double best = 0.0;
    for (const double tau : taus) {
        std::size_t correct = 0;
        for (const double v : ind)
            if (v <= tau)
                ++correct;
        for (const double v : ood)
            if (v > tau)
                ++correct;
        best = std::max(best, static_cast<double>(correct) /
                                  static_cast<double>(ind.size() + ood.size()));
    }
    return best;
}

// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        dir_ = std::filesystem::temp_directory_path() /
               ("pnml_test_" + std::to_string(rd()) + "_" + std::to_string(rd()));
        std::filesystem::create_directories(dir_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(dir_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path path(const std::string& name) const { return dir_ / name; }
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
};

} // namespace testutil
