#include <charconv>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pnml/io.hpp"

namespace {

unsigned threads_from_env() {
    const char* raw = std::getenv("PNML_THREADS");
    if (raw == nullptr || *raw == '\0')
        return 0;
    unsigned value = 0;
    const char* end = raw + std::string_view(raw).size();
    const auto [stop, ec] = std::from_chars(raw, end, value);
    if (ec != std::errc{} || stop != end || value > 4096)
        throw pnml::InvalidInput("PNML_THREADS must be an integer in [0, 4096]");
    return value;
}

pnml::GridSpec parse_grid(const std::string& arg) {
    std::vector<std::string> parts;
    std::string::size_type start = 0;
    for (;;) {
        const auto comma = arg.find(',', start);
        parts.push_back(arg.substr(start, comma - start));
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    if (parts.size() != 5)
        throw pnml::InvalidInput("--grid needs x1min,x1max,x2min,x2max,steps");

    const auto number = [](const std::string& s, double& out) {
        const auto [stop, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (ec != std::errc{} || stop != s.data() + s.size())
            throw pnml::InvalidInput("bad grid component '" + s + "'");
    };
    pnml::GridSpec grid{};
    number(parts[0], grid.x1_min);
    number(parts[1], grid.x1_max);
    number(parts[2], grid.x2_min);
    number(parts[3], grid.x2_max);
    long steps = 0;
    const auto [stop, ec] = std::from_chars(parts[4].data(), parts[4].data() + parts[4].size(), steps);
    if (ec != std::errc{} || stop != parts[4].data() + parts[4].size() || steps < 2)
        throw pnml::InvalidInput("grid steps must be an integer >= 2");
    grid.steps = steps;
    return grid;
}

std::vector<pnml::ProbVector> softmax_rows(const pnml::EmbeddingMatrix& logits) {
    std::vector<pnml::ProbVector> probs;
    probs.reserve(static_cast<std::size_t>(logits.rows()));
    for (Eigen::Index i = 0; i < logits.rows(); ++i)
        probs.push_back(pnml::softmax(logits.data().row(i).transpose()));
    return probs;
}

void run_fit_stats(const std::string& train_path, const std::string& out_path,
                   bool no_normalize, double rank_tol) {
    const pnml::EmbeddingMatrix train = pnml::io::load_matrix(train_path);
    pnml::PrepareOptions options;
    options.normalize = !no_normalize;
    options.rank_tol_factor = rank_tol;
    const pnml::PnmlStats stats = pnml::prepare(train, options);
    pnml::io::save_stats(out_path, stats);
    pnml::Provenance provenance;
    provenance.sources = {train_path};
    provenance.stats_fingerprint = pnml::stats_fingerprint(stats);
    pnml::io::write_provenance_sidecar(out_path, provenance);
}

void run_score(const std::string& stats_path, const std::string& embeddings_path,
               const std::string& logits_path, const std::string& out_path) {
    const pnml::PnmlStats stats = pnml::io::load_stats(stats_path);
    const pnml::EmbeddingMatrix embeddings = pnml::io::load_matrix(embeddings_path);
    const pnml::EmbeddingMatrix logits = pnml::io::load_matrix(logits_path);
    if (logits.rows() != embeddings.rows())
        throw pnml::InvalidInput("logit rows (" + std::to_string(logits.rows()) +
                                 ") do not match embedding rows (" +
                                 std::to_string(embeddings.rows()) + ")");
    if (embeddings.cols() != stats.dim())
        throw pnml::InvalidInput("embedding width (" + std::to_string(embeddings.cols()) +
                                 ") does not match stats dimension (" +
                                 std::to_string(stats.dim()) + ")");

    pnml::ScoreOptions options;
    options.threads = threads_from_env();
    pnml::ScoredBatch batch = pnml::score_batch(stats, embeddings, softmax_rows(logits), options);
    batch.provenance.sources = {stats_path, embeddings_path, logits_path};
    pnml::io::write_score_csv(out_path, batch);
    pnml::io::write_provenance_sidecar(out_path, batch.provenance);
}

void run_eval(const std::string& ind_path, const std::string& ood_path,
              const std::string& column, const std::string& out_path) {
    std::vector<std::string> columns;
    if (column == "all")
        columns = {"regret", "baseline"};
    else
        columns = {column};

    std::vector<std::pair<std::string, pnml::DetectionReport>> reports;
    for (const std::string& name : columns) {
        const std::vector<double> ind = pnml::io::read_csv_column(ind_path, name);
        const std::vector<double> ood = pnml::io::read_csv_column(ood_path, name);
        const auto orientation = name == "baseline" ? pnml::ScoreOrientation::LowerIsOod
                                                    : pnml::ScoreOrientation::HigherIsOod;
        reports.emplace_back(name, pnml::evaluate_detection(ind, ood, orientation));
    }
    pnml::io::write_report_json(out_path, reports);
}

void run_map(const std::string& train_path, const std::string& labels_path,
             const std::string& grid_arg, const std::string& out_path, double eps,
             bool normalize, double rank_tol) {
    const pnml::EmbeddingMatrix train = pnml::io::load_matrix(train_path);
    const pnml::LabelMatrix labels = pnml::io::load_labels(labels_path);
    if (labels.rows() != train.rows())
        throw pnml::InvalidInput("label rows (" + std::to_string(labels.rows()) +
                                 ") do not match training rows (" +
                                 std::to_string(train.rows()) + ")");

    pnml::PrepareOptions options;
    options.normalize = normalize;
    options.rank_tol_factor = rank_tol;
    const pnml::PnmlStats stats = pnml::prepare(train, options);
    const pnml::EmbeddingMatrix work = normalize ? pnml::l2_normalize(train) : train;
    const pnml::LinearModel model =
        pnml::fit(work, pnml::one_hot_targets(labels, eps), stats);

    const std::vector<pnml::MapPoint> points =
        pnml::regret_map(model, stats, parse_grid(grid_arg));
    pnml::io::write_map_csv(out_path, points);

    pnml::Provenance provenance;
    provenance.sources = {train_path, labels_path};
    provenance.stats_fingerprint = pnml::stats_fingerprint(stats);
    pnml::io::write_provenance_sidecar(out_path, provenance);
}

void run_curve(const std::vector<double>& p1_list, double xtg_max, long steps,
               const std::string& out_path) {
    if (steps < 2)
        throw pnml::InvalidInput("--steps must be >= 2");
    if (!(xtg_max > 0.0))
        throw pnml::InvalidInput("--xtg-max must be positive");

    std::vector<double> grid(static_cast<std::size_t>(steps));
    for (long i = 0; i < steps; ++i)
        grid[static_cast<std::size_t>(i)] =
            xtg_max * static_cast<double>(i) / static_cast<double>(steps - 1);

    std::vector<std::pair<double, std::vector<std::pair<double, double>>>> curves;
    curves.reserve(p1_list.size());
    for (const double p1 : p1_list)
        curves.emplace_back(p1, pnml::response_curve(p1, grid));
    pnml::io::write_curve_csv(out_path, curves);
}

void run_spectrum(const std::string& stats_path, const std::string& out_path) {
    const pnml::PnmlStats stats = pnml::io::load_stats(stats_path);
    pnml::io::write_spectrum_csv(out_path, pnml::spectrum_report(stats));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Analytic pNML regret scoring for OOD detection over precomputed embeddings"};
    app.require_subcommand(1);

    std::string train_path, labels_path, stats_path, embeddings_path, logits_path;
    std::string ind_path, ood_path, column = "regret", grid_arg, out_path;
    bool no_normalize = false;
    bool map_normalize = false;
    double rank_tol = pnml::kDefaultRankTolFactor;
    double eps = pnml::kDefaultTargetEps;
    double xtg_max = 6.0;
    long steps = 600;
    std::vector<double> p1_list = {0.55, 0.85, 0.95, 0.99};

    CLI::App* fit = app.add_subcommand(
        "fit-stats", "Precompute training statistics from an embedding file");
    fit->add_option("--train", train_path, "training embeddings (text or binary)")->required();
    fit->add_option("--out", out_path, "output stats file")->required();
    fit->add_flag("--no-normalize", no_normalize, "skip L2 normalization of training rows");
    fit->add_option("--rank-tol", rank_tol, "relative eigenvalue cutoff factor");
    fit->callback([&] { run_fit_stats(train_path, out_path, no_normalize, rank_tol); });

    CLI::App* score = app.add_subcommand(
        "score", "Score a test batch: per-sample x^T g, regret, baseline");
    score->add_option("--stats", stats_path, "stats file from fit-stats")->required();
    score->add_option("--embeddings", embeddings_path, "test embeddings")->required();
    score->add_option("--logits", logits_path, "test logits (pre-softmax)")->required();
    score->add_option("--out", out_path, "output CSV")->required();
    score->callback([&] { run_score(stats_path, embeddings_path, logits_path, out_path); });

    CLI::App* eval = app.add_subcommand(
        "eval", "Detection metrics from IND and OOD score tables");
    eval->add_option("--ind-scores", ind_path, "CSV with IND scores")->required();
    eval->add_option("--ood-scores", ood_path, "CSV with OOD scores")->required();
    eval->add_option("--column", column, "score column: regret, baseline or all")
        ->check(CLI::IsMember({"regret", "baseline", "all"}));
    eval->add_option("--out", out_path, "output report JSON")->required();
    eval->callback([&] { run_eval(ind_path, ood_path, column, out_path); });

    CLI::App* map = app.add_subcommand(
        "map", "Regret map of a fitted 2-feature classifier over a lattice");
    map->add_option("--train", train_path, "training features, two columns")->required();
    map->add_option("--labels", labels_path, "class indices or one-hot rows")->required();
    map->add_option("--grid", grid_arg, "x1min,x1max,x2min,x2max,steps")->required();
    map->add_option("--out", out_path, "output CSV")->required();
    map->add_option("--eps", eps, "one-hot target mass off the hot class");
    map->add_flag("--normalize", map_normalize, "L2-normalize rows first");
    map->add_option("--rank-tol", rank_tol, "relative eigenvalue cutoff factor");
    map->callback([&] {
        run_map(train_path, labels_path, grid_arg, out_path, eps, map_normalize, rank_tol);
    });

    CLI::App* curve = app.add_subcommand(
        "curve", "Two-class regret response curves over an x^T g grid");
    curve->add_option("--p1", p1_list, "first-class probabilities in (0,1)");
    curve->add_option("--xtg-max", xtg_max, "grid endpoint");
    curve->add_option("--steps", steps, "grid size including endpoints");
    curve->add_option("--out", out_path, "output CSV")->required();
    curve->callback([&] { run_curve(p1_list, xtg_max, steps, out_path); });

    CLI::App* spectrum = app.add_subcommand(
        "spectrum", "Training eigenvalue spectrum as CSV");
    spectrum->add_option("--stats", stats_path, "stats file from fit-stats")->required();
    spectrum->add_option("--out", out_path, "output CSV")->required();
    spectrum->callback([&] { run_spectrum(stats_path, out_path); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
