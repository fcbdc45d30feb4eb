#include "pnml/io.hpp"

#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "pnml/errors.hpp"

namespace pnml::io {

namespace {

constexpr char kMatrixMagic[4] = {'P', 'N', 'M', 'L'};
constexpr char kStatsMagic[4] = {'P', 'N', 'S', 'T'};
constexpr unsigned char kFormatVersion = 0x01;
constexpr unsigned char kFlagNormalized = 0x01;

std::string read_whole_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad())
        throw ParseError("cannot read " + path.string());
    return std::move(buf).str();
}

// Little-endian scalar access into a byte buffer.
template <class T>
T read_le(const std::string& bytes, std::size_t offset) {
    static_assert(std::is_trivially_copyable_v<T>);
    T out;
    if constexpr (std::endian::native == std::endian::little) {
        std::memcpy(&out, bytes.data() + offset, sizeof out);
    } else {
        unsigned char rev[sizeof(T)];
        for (std::size_t i = 0; i < sizeof(T); ++i)
            rev[i] = static_cast<unsigned char>(bytes[offset + sizeof(T) - 1 - i]);
        std::memcpy(&out, rev, sizeof out);
    }
    return out;
}

template <class T>
void append_le(std::string& bytes, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof value);
    if constexpr (std::endian::native == std::endian::little) {
        bytes.append(reinterpret_cast<const char*>(raw), sizeof raw);
    } else {
        for (std::size_t i = 0; i < sizeof(T); ++i)
            bytes.push_back(static_cast<char>(raw[sizeof(T) - 1 - i]));
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view field, const std::filesystem::path& path,
                    std::size_t line_no) {
    field = trim(field);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || end != field.data() + field.size() || !std::isfinite(v))
        throw ParseError(path.string() + ":" + std::to_string(line_no) +
                         ": not a finite number: '" + std::string(field) + "'");
    return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    for (;;) {
        const std::size_t comma = line.find(',');
        if (comma == std::string_view::npos) {
            fields.push_back(line);
            return fields;
        }
        fields.push_back(line.substr(0, comma));
        line.remove_prefix(comma + 1);
    }
}

// Splits file content into lines, dropping one trailing empty line.
std::vector<std::string_view> split_lines(const std::string& content) {
    std::vector<std::string_view> lines;
    std::string_view rest = content;
    while (!rest.empty()) {
        const std::size_t nl = rest.find('\n');
        if (nl == std::string_view::npos) {
            lines.push_back(rest);
            break;
        }
        lines.push_back(rest.substr(0, nl));
        rest.remove_prefix(nl + 1);
    }
    return lines;
}

EmbeddingMatrix parse_matrix_text(const std::string& content,
                                  const std::filesystem::path& path) {
    const std::vector<std::string_view> lines = split_lines(content);
    std::vector<double> values;
    std::size_t rows = 0;
    std::size_t cols = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string_view line = trim(lines[i]);
        if (line.empty()) {
            if (i + 1 == lines.size())
                break;
            throw ParseError(path.string() + ":" + std::to_string(i + 1) + ": empty line");
        }
        if (line.front() == '#') {
            if (i != 0)
                throw ParseError(path.string() + ":" + std::to_string(i + 1) +
                                 ": header allowed only on the first line");
            continue;
        }
        const std::vector<std::string_view> fields = split_fields(line);
        if (cols == 0)
            cols = fields.size();
        else if (fields.size() != cols)
            throw ParseError(path.string() + ":" + std::to_string(i + 1) + ": expected " +
                             std::to_string(cols) + " fields, got " +
                             std::to_string(fields.size()));
        for (const std::string_view f : fields)
            values.push_back(parse_double(f, path, i + 1));
        ++rows;
    }
    if (rows == 0)
        throw ParseError(path.string() + ": no data rows");
    return EmbeddingMatrix::from_row_major(static_cast<Eigen::Index>(rows),
                                           static_cast<Eigen::Index>(cols), values);
}

EmbeddingMatrix parse_matrix_binary(const std::string& content,
                                    const std::filesystem::path& path) {
    constexpr std::size_t header = 4 + 1 + 8 + 8;
    if (content.size() < header)
        throw ParseError(path.string() + ": truncated at byte " +
                         std::to_string(content.size()) + ", header needs " +
                         std::to_string(header));
    if (static_cast<unsigned char>(content[4]) != kFormatVersion)
        throw ParseError(path.string() + ": unsupported format version at byte 4");
    const auto n = read_le<std::uint64_t>(content, 5);
    const auto m = read_le<std::uint64_t>(content, 13);
    if (n == 0 || m == 0)
        throw ParseError(path.string() + ": zero dimension in header");
    if (n > (1ULL << 31) || m > (1ULL << 31) || n * m > (1ULL << 34))
        throw ParseError(path.string() + ": implausible dimensions in header");
    const std::size_t expected = header + 4 * static_cast<std::size_t>(n * m);
    if (content.size() != expected)
        throw ParseError(path.string() + ": payload is " +
                         std::to_string(content.size() - header) + " bytes at byte " +
                         std::to_string(header) + ", expected " +
                         std::to_string(expected - header));

    std::vector<double> values(static_cast<std::size_t>(n * m));
    for (std::size_t i = 0; i < values.size(); ++i) {
        const float f = read_le<float>(content, header + 4 * i);
        if (!std::isfinite(f))
            throw ParseError(path.string() + ": non-finite value at byte " +
                             std::to_string(header + 4 * i));
        values[i] = static_cast<double>(f);
    }
    return EmbeddingMatrix::from_row_major(static_cast<Eigen::Index>(n),
                                           static_cast<Eigen::Index>(m), values);
}

} // namespace

EmbeddingMatrix load_matrix(const std::filesystem::path& path) {
    const std::string content = read_whole_file(path);
    if (content.size() >= 4 && std::memcmp(content.data(), kMatrixMagic, 4) == 0)
        return parse_matrix_binary(content, path);
    return parse_matrix_text(content, path);
}

void save_matrix_binary(const std::filesystem::path& path, const EmbeddingMatrix& m) {
    std::string bytes;
    bytes.reserve(21 + 4 * static_cast<std::size_t>(m.rows() * m.cols()));
    bytes.append(kMatrixMagic, 4);
    bytes.push_back(static_cast<char>(kFormatVersion));
    append_le(bytes, static_cast<std::uint64_t>(m.rows()));
    append_le(bytes, static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            append_le(bytes, static_cast<float>(m.data()(i, j)));
    write_file_atomic(path, bytes);
}

void save_matrix_text(const std::filesystem::path& path, const EmbeddingMatrix& m,
                      std::string_view header) {
    std::string out;
    if (!header.empty()) {
        if (header.front() != '#')
            out += "# ";
        out += header;
        out += '\n';
    }
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j)
                out += ',';
            out += format_double(m.data()(i, j));
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

PnmlStats load_stats(const std::filesystem::path& path) {
    const std::string content = read_whole_file(path);
    constexpr std::size_t header = 4 + 1 + 1 + 2 + 8 + 8 + 8;
    if (content.size() < header || std::memcmp(content.data(), kStatsMagic, 4) != 0)
        throw ParseError(path.string() + ": not a stats file (bad magic at byte 0)");
    if (static_cast<unsigned char>(content[4]) != kFormatVersion)
        throw ParseError(path.string() + ": unsupported format version at byte 4");
    const auto flags = static_cast<unsigned char>(content[5]);
    if (flags & ~kFlagNormalized)
        throw ParseError(path.string() + ": unknown flag bits at byte 5");
    const auto m = read_le<std::uint64_t>(content, 8);
    const auto n_train = read_le<std::uint64_t>(content, 16);
    const auto rank = read_le<std::uint64_t>(content, 24);
    if (m == 0 || m > (1ULL << 20))
        throw ParseError(path.string() + ": implausible dimension in header");
    const std::size_t expected = header + 8 * static_cast<std::size_t>(m + m * m);
    if (content.size() != expected)
        throw ParseError(path.string() + ": expected " + std::to_string(expected) +
                         " bytes, got " + std::to_string(content.size()));

    EigenBasis basis;
    basis.eigvals.resize(static_cast<Eigen::Index>(m));
    for (std::uint64_t i = 0; i < m; ++i)
        basis.eigvals[static_cast<Eigen::Index>(i)] =
            read_le<double>(content, header + 8 * static_cast<std::size_t>(i));
    const std::size_t vec_base = header + 8 * static_cast<std::size_t>(m);
    basis.eigvecs.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::uint64_t r = 0; r < m; ++r)
        for (std::uint64_t c = 0; c < m; ++c)
            basis.eigvecs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                read_le<double>(content, vec_base + 8 * static_cast<std::size_t>(r * m + c));
    basis.rank = static_cast<Eigen::Index>(rank);

    if (!basis.eigvals.allFinite() || !basis.eigvecs.allFinite())
        throw ParseError(path.string() + ": non-finite basis entries");
    return build_stats(basis, static_cast<Eigen::Index>(n_train),
                       (flags & kFlagNormalized) != 0);
}

void save_stats(const std::filesystem::path& path, const PnmlStats& stats) {
    const Eigen::Index m = stats.dim();
    std::string bytes;
    bytes.reserve(32 + 8 * static_cast<std::size_t>(m + m * m));
    bytes.append(kStatsMagic, 4);
    bytes.push_back(static_cast<char>(kFormatVersion));
    bytes.push_back(static_cast<char>(stats.normalized_inputs ? kFlagNormalized : 0));
    bytes.push_back(0);
    bytes.push_back(0);
    append_le(bytes, static_cast<std::uint64_t>(m));
    append_le(bytes, static_cast<std::uint64_t>(stats.n_train));
    append_le(bytes, static_cast<std::uint64_t>(stats.basis.rank));
    for (Eigen::Index i = 0; i < m; ++i)
        append_le(bytes, stats.basis.eigvals[i]);
    for (Eigen::Index r = 0; r < m; ++r)
        for (Eigen::Index c = 0; c < m; ++c)
            append_le(bytes, stats.basis.eigvecs(r, c));
    write_file_atomic(path, bytes);
}

LabelMatrix load_labels(const std::filesystem::path& path) {
    const EmbeddingMatrix raw = load_matrix(path);
    std::vector<Eigen::Index> classes(static_cast<std::size_t>(raw.rows()));

    if (raw.cols() == 1) {
        double max_label = 0.0;
        for (Eigen::Index i = 0; i < raw.rows(); ++i) {
            const double v = raw.data()(i, 0);
            const double rounded = std::round(v);
            if (std::abs(v - rounded) > 1e-9 || rounded < 0.0)
                throw ParseError(path.string() + ": row " + std::to_string(i) +
                                 " is not a class index");
            classes[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(rounded);
            max_label = std::max(max_label, rounded);
        }
        return LabelMatrix(std::move(classes), static_cast<Eigen::Index>(max_label) + 1);
    }

    for (Eigen::Index i = 0; i < raw.rows(); ++i) {
        Eigen::Index hot = -1;
        for (Eigen::Index j = 0; j < raw.cols(); ++j) {
            const double v = raw.data()(i, j);
            if (std::abs(v - 1.0) <= 1e-9) {
                if (hot >= 0)
                    throw ParseError(path.string() + ": row " + std::to_string(i) +
                                     " has several hot entries");
                hot = j;
            } else if (std::abs(v) > 1e-9) {
                throw ParseError(path.string() + ": row " + std::to_string(i) +
                                 " is not one-hot");
            }
        }
        if (hot < 0)
            throw ParseError(path.string() + ": row " + std::to_string(i) +
                             " has no hot entry");
        classes[static_cast<std::size_t>(i)] = hot;
    }
    return LabelMatrix(std::move(classes), raw.cols());
}

void write_score_csv(const std::filesystem::path& path, const ScoredBatch& batch) {
    std::string out = "index,xtg,regret,baseline,pnml_max\n";
    for (std::size_t i = 0; i < batch.scores.size(); ++i) {
        const RegretScore& s = batch.scores[i];
        out += std::to_string(i);
        out += ',';
        out += format_double(s.xtg);
        out += ',';
        out += format_double(s.regret);
        out += ',';
        out += format_double(s.baseline);
        out += ',';
        out += format_double(s.pnml_posterior.max());
        out += '\n';
    }
    write_file_atomic(path, out);
}

std::vector<double> read_csv_column(const std::filesystem::path& path,
                                    const std::string& column) {
    const std::string content = read_whole_file(path);
    const std::vector<std::string_view> lines = split_lines(content);
    if (lines.empty())
        throw ParseError(path.string() + ": empty file");

    std::string_view header = trim(lines[0]);
    if (!header.empty() && header.front() == '#')
        header = trim(header.substr(1));
    const std::vector<std::string_view> names = split_fields(header);
    std::size_t col = names.size();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (trim(names[i]) == column)
            col = i;
    if (col == names.size())
        throw ParseError(path.string() + ": column '" + column + "' not found");

    std::vector<double> values;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string_view line = trim(lines[i]);
        if (line.empty()) {
            if (i + 1 == lines.size())
                break;
            throw ParseError(path.string() + ":" + std::to_string(i + 1) + ": empty line");
        }
        const std::vector<std::string_view> fields = split_fields(line);
        if (fields.size() != names.size())
            throw ParseError(path.string() + ":" + std::to_string(i + 1) + ": expected " +
                             std::to_string(names.size()) + " fields, got " +
                             std::to_string(fields.size()));
        values.push_back(parse_double(fields[col], path, i + 1));
    }
    if (values.empty())
        throw ParseError(path.string() + ": no data rows");
    return values;
}

void write_report_json(const std::filesystem::path& path,
                       const std::vector<std::pair<std::string, DetectionReport>>& reports) {
    if (reports.empty())
        throw InvalidInput("no reports to write");
    const auto to_json = [](const DetectionReport& r) {
        nlohmann::ordered_json j;
        j["auroc"] = r.auroc;
        j["tnr_at_tpr95"] = r.tnr_at_tpr95;
        j["detection_accuracy"] = r.detection_accuracy;
        j["n_ind"] = r.n_ind;
        j["n_ood"] = r.n_ood;
        j["threshold_at_tpr95"] = r.threshold_at_tpr95;
        return j;
    };

    nlohmann::ordered_json doc;
    if (reports.size() == 1) {
        doc = to_json(reports.front().second);
    } else {
        for (const auto& [name, report] : reports)
            doc[name] = to_json(report);
    }
    write_file_atomic(path, doc.dump(2) + "\n");
}

void write_map_csv(const std::filesystem::path& path, const std::vector<MapPoint>& points) {
    std::string out = "x1,x2,p_c2,regret\n";
    for (const MapPoint& p : points) {
        out += format_double(p.x1);
        out += ',';
        out += format_double(p.x2);
        out += ',';
        out += format_double(p.p_c2);
        out += ',';
        out += format_double(p.regret);
        out += '\n';
    }
    write_file_atomic(path, out);
}

void write_spectrum_csv(const std::filesystem::path& path,
                        const std::vector<std::pair<Eigen::Index, double>>& spectrum) {
    std::string out = "index,eigenvalue\n";
    for (const auto& [index, eigenvalue] : spectrum) {
        out += std::to_string(index);
        out += ',';
        out += format_double(eigenvalue);
        out += '\n';
    }
    write_file_atomic(path, out);
}

void write_curve_csv(const std::filesystem::path& path,
                     const std::vector<std::pair<double, std::vector<std::pair<double, double>>>>& curves) {
    std::string out = "p1,xtg,normalized_regret\n";
    for (const auto& [p1, curve] : curves) {
        for (const auto& [xtg, normalized_regret] : curve) {
            out += format_double(p1);
            out += ',';
            out += format_double(xtg);
            out += ',';
            out += format_double(normalized_regret);
            out += '\n';
        }
    }
    write_file_atomic(path, out);
}

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{})
        throw NumericalFailure("cannot format value");

    std::size_t significant = 0;
    bool leading = true;
    for (const char* p = buf; p != end; ++p) {
        if (*p == 'e' || *p == 'E')
            break;
        if (*p < '0' || *p > '9')
            continue;
        if (leading && *p == '0')
            continue;
        leading = false;
        ++significant;
    }
    if (significant <= 12)
        return std::string(buf, end);

    auto [end12, ec12] = std::to_chars(buf, buf + sizeof buf, v,
                                       std::chars_format::general, 12);
    if (ec12 != std::errc{})
        throw NumericalFailure("cannot format value");
    return std::string(buf, end12);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path dir = path.parent_path();
    if (dir.empty())
        dir = ".";

    std::random_device rd;
    const auto tag = static_cast<unsigned long>(rd()) ^
                     static_cast<unsigned long>(
                         std::chrono::steady_clock::now().time_since_epoch().count());
    const std::filesystem::path tmp =
        dir / (path.filename().string() + ".tmp" + std::to_string(tag));

    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw ParseError("cannot create " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw ParseError("cannot write " + tmp.string());
        }
    }

    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::error_code ec2;
        std::filesystem::remove(tmp, ec2);
        throw ParseError("cannot move " + tmp.string() + " to " + path.string() + ": " +
                         ec.message());
    }
}

void write_provenance_sidecar(const std::filesystem::path& data_path,
                              const Provenance& provenance) {
    nlohmann::ordered_json doc;
    doc["sources"] = provenance.sources;
    doc["stats_fingerprint"] = provenance.stats_fingerprint;
    std::filesystem::path sidecar = data_path;
    sidecar += ".provenance.json";
    write_file_atomic(sidecar, doc.dump(2) + "\n");
}

} // namespace pnml::io
