#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pnml/metrics.hpp"
#include "pnml/pipeline.hpp"

namespace pnml::io {

/// Matrix container formats. Text: comma-separated values, one sample per
/// line, optional single leading header line starting with '#'. Binary:
/// magic "PNML", version byte 0x01, two little-endian uint64 counts (N, M),
/// then N*M little-endian IEEE-754 float32 values, row-major.
EmbeddingMatrix load_matrix(const std::filesystem::path& path);
void save_matrix_binary(const std::filesystem::path& path, const EmbeddingMatrix& m);
void save_matrix_text(const std::filesystem::path& path, const EmbeddingMatrix& m,
                      std::string_view header = {});

/// Stats container: magic "PNST", version byte 0x01, flags byte (bit 0 =
/// built from normalized rows), two reserved bytes, uint64 M / n_train /
/// rank, then M float64 eigenvalues and M*M float64 eigenvector entries
/// (row-major), all little-endian. quad_kernel and row_proj are rebuilt
/// from the basis on load.
PnmlStats load_stats(const std::filesystem::path& path);
void save_stats(const std::filesystem::path& path, const PnmlStats& stats);

/// Labels: a width-1 matrix holds class indices (n_classes = max + 1); a
/// wider matrix holds one-hot rows.
LabelMatrix load_labels(const std::filesystem::path& path);

/// Per-sample score table: header "index,xtg,regret,baseline,pnml_max",
/// one row per sample, 0-based index.
void write_score_csv(const std::filesystem::path& path, const ScoredBatch& batch);

/// Reads one named column from a CSV with a header line. Throws ParseError
/// naming the column if it is missing.
std::vector<double> read_csv_column(const std::filesystem::path& path,
                                    const std::string& column);

/// Detection report as JSON. One entry: a flat object with keys auroc,
/// tnr_at_tpr95, detection_accuracy, n_ind, n_ood, threshold_at_tpr95.
/// Several entries: one sub-object per method name.
void write_report_json(const std::filesystem::path& path,
                       const std::vector<std::pair<std::string, DetectionReport>>& reports);

void write_map_csv(const std::filesystem::path& path, const std::vector<MapPoint>& points);
void write_spectrum_csv(const std::filesystem::path& path,
                        const std::vector<std::pair<Eigen::Index, double>>& spectrum);
/// Rows p1,xtg,normalized_regret for each (p1, curve) pair.
void write_curve_csv(const std::filesystem::path& path,
                     const std::vector<std::pair<double, std::vector<std::pair<double, double>>>>& curves);

/// Shortest representation that round-trips, capped at 12 significant
/// digits.
std::string format_double(double v);

/// Writes to a temporary file in the target directory, then renames. An
/// error never leaves a partial file at `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Provenance sidecar (<data file>.provenance.json): source identifiers and
/// stats fingerprint. Kept out of the data files so those stay
/// byte-reproducible.
void write_provenance_sidecar(const std::filesystem::path& data_path,
                              const Provenance& provenance);

} // namespace pnml::io
