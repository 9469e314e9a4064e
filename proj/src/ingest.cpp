#include "feedback_kmeans/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace fbk {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cell += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else {
            cell += ch;
        }
    }
    cells.push_back(std::move(cell));
    return cells;
}

std::string csv_escape(const std::string& text) {
    if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
    std::string out = "\"";
    for (char ch : text) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

bool read_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

template <typename T>
bool parse_number(const std::string& text, T& value) {
    const auto* begin = text.data();
    const auto* end = text.data() + text.size();
    while (begin < end && *begin == ' ') ++begin;
    while (end > begin && *(end - 1) == ' ') --end;
    if (begin < end && *begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    return ec == std::errc() && ptr == end && begin != end;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "' for reading");
    return in;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw Error("write to '" + path.string() + "' failed");
}

}  // namespace

std::string format_double(double value) {
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc()) throw Error("cannot format double");
    return std::string(buffer, ptr);
}

CsvReadResult read_csv(std::istream& in, const CsvReadOptions& options) {
    CsvReadResult result;
    std::string line;
    if (!read_line(in, line) || line.empty()) throw Error("empty file: no header row");
    const auto header = split_csv_line(line);

    std::map<std::string, std::size_t> column;
    for (std::size_t c = 0; c < header.size(); ++c) column.emplace(header[c], c);

    std::vector<std::size_t> feature_col;
    for (auto name : kFlightFeatures) {
        auto it = column.find(std::string(name));
        if (it == column.end()) throw Error("missing required column '" + std::string(name) + "'");
        feature_col.push_back(it->second);
    }
    auto optional_col = [&](const char* name) -> std::optional<std::size_t> {
        if (!options.has_hidden_columns) return std::nullopt;
        auto it = column.find(name);
        return it == column.end() ? std::nullopt : std::optional<std::size_t>(it->second);
    };
    const auto bookings_col = optional_col("bookings");
    const auto segment_col = optional_col("hidden_segment");
    const auto origin_col = optional_col("origin");
    const auto destination_col = optional_col("destination");

    static const std::vector<std::string> kKnownExtras = {"bookings", "hidden_segment", "origin", "destination"};
    for (const auto& name : header) {
        const bool feature = std::find(kFlightFeatures.begin(), kFlightFeatures.end(), name) != kFlightFeatures.end();
        const bool known = std::find(kKnownExtras.begin(), kKnownExtras.end(), name) != kKnownExtras.end();
        if (!feature && !known) result.warnings.push_back("ignoring unknown column '" + name + "'");
    }

    std::vector<double> values;
    std::vector<std::int64_t> bookings;
    std::vector<int> segments;
    std::vector<std::string> origins;
    std::vector<std::string> destinations;
    std::size_t line_no = 1;
    std::size_t rows = 0;
    while (read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        const auto where = "line " + std::to_string(line_no) + ": ";
        if (cells.size() != header.size()) {
            throw Error(where + "expected " + std::to_string(header.size()) + " cells, found " +
                        std::to_string(cells.size()));
        }
        for (std::size_t f = 0; f < feature_col.size(); ++f) {
            double v = 0.0;
            const auto& text = cells[feature_col[f]];
            if (!parse_number(text, v)) {
                throw Error(where + "column '" + std::string(kFlightFeatures[f]) + "' is not numeric: '" + text + "'");
            }
            values.push_back(v);
        }
        if (bookings_col) {
            std::int64_t b = 0;
            if (!parse_number(cells[*bookings_col], b) || b < 0) {
                throw Error(where + "bookings must be a non-negative integer: '" + cells[*bookings_col] + "'");
            }
            bookings.push_back(b);
        }
        if (segment_col) {
            int s = 0;
            if (!parse_number(cells[*segment_col], s)) {
                throw Error(where + "hidden_segment must be an integer: '" + cells[*segment_col] + "'");
            }
            segments.push_back(s);
        }
        if (origin_col) origins.push_back(cells[*origin_col]);
        if (destination_col) destinations.push_back(cells[*destination_col]);
        ++rows;
    }
    if (rows == 0) throw Error("empty file: header but no data rows");

    Matrix points = Eigen::Map<const Matrix>(values.data(), static_cast<Index>(rows), static_cast<Index>(feature_col.size()));
    result.dataset = make_dataset(std::move(points));
    if (bookings_col) result.dataset.bookings = std::move(bookings);
    if (segment_col) result.dataset.hidden_segment = std::move(segments);
    if (origin_col) result.dataset.origin = std::move(origins);
    if (destination_col) result.dataset.destination = std::move(destinations);
    check_dataset(result.dataset);
    if (options.standardize) {
        Standardization t;
        result.dataset = standardize(result.dataset, &t);
        result.transform = std::move(t);
    }
    return result;
}

CsvReadResult read_csv(const std::filesystem::path& path, const CsvReadOptions& options) {
    auto in = open_in(path);
    try {
        return read_csv(in, options);
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

void write_dataset_csv(const Dataset& dataset, std::ostream& out) {
    check_dataset(dataset);
    std::vector<std::string> header(dataset.feature_names.begin(), dataset.feature_names.end());
    if (dataset.bookings) header.emplace_back("bookings");
    if (dataset.hidden_segment) header.emplace_back("hidden_segment");
    if (dataset.origin) header.emplace_back("origin");
    if (dataset.destination) header.emplace_back("destination");
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << csv_escape(header[c]);
    out << '\n';
    for (Index p = 0; p < dataset.size(); ++p) {
        const auto row = static_cast<std::size_t>(p);
        for (Index j = 0; j < dataset.dim(); ++j) out << (j ? "," : "") << format_double(dataset.points(p, j));
        if (dataset.bookings) out << ',' << (*dataset.bookings)[row];
        if (dataset.hidden_segment) out << ',' << (*dataset.hidden_segment)[row];
        if (dataset.origin) out << ',' << csv_escape((*dataset.origin)[row]);
        if (dataset.destination) out << ',' << csv_escape((*dataset.destination)[row]);
        out << '\n';
    }
}

void write_dataset_csv(const Dataset& dataset, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_dataset_csv(dataset, out);
    finish_write(out, path);
}

namespace {

std::string optional_text(const std::optional<double>& value) { return value ? format_double(*value) : std::string(); }

nlohmann::json optional_json(const std::optional<double>& value) {
    return value ? nlohmann::json(*value) : nlohmann::json(nullptr);
}

nlohmann::json record_json(const ImpactRecord& r) {
    return {{"method", r.method},
            {"k", r.k},
            {"seed", r.seed},
            {"driving_feedback", r.driving_feedback},
            {"initial_eval", r.initial_eval},
            {"best_eval", r.best_eval},
            {"impact", r.impact},
            {"custom_initial", optional_json(r.custom_initial)},
            {"custom_reference", optional_json(r.custom_reference)},
            {"custom_impact", optional_json(r.custom_impact)},
            {"final_k", r.final_k},
            {"stalled", r.stalled},
            {"error", r.error}};
}

std::optional<double> optional_from_json(const nlohmann::json& json, const char* key) {
    if (!json.contains(key) || json.at(key).is_null()) return std::nullopt;
    return json.at(key).get<double>();
}

ImpactRecord record_from_json(const nlohmann::json& json) {
    ImpactRecord r;
    r.method = json.at("method").get<std::string>();
    r.k = json.at("k").get<int>();
    r.seed = json.at("seed").get<std::uint64_t>();
    r.driving_feedback = json.at("driving_feedback").get<std::string>();
    r.initial_eval = json.at("initial_eval").get<double>();
    r.best_eval = json.at("best_eval").get<double>();
    r.impact = json.at("impact").get<double>();
    r.custom_initial = optional_from_json(json, "custom_initial");
    r.custom_reference = optional_from_json(json, "custom_reference");
    r.custom_impact = optional_from_json(json, "custom_impact");
    r.final_k = json.at("final_k").get<int>();
    r.stalled = json.at("stalled").get<bool>();
    r.error = json.value("error", "");
    return r;
}

std::optional<double> optional_from_text(const std::string& text, const std::string& where) {
    if (text.empty()) return std::nullopt;
    double v = 0.0;
    if (!parse_number(text, v)) throw Error(where + "not numeric: '" + text + "'");
    return v;
}

}  // namespace

void write_report(const ExperimentReport& report, std::ostream& out, ReportFormat format) {
    if (format == ReportFormat::Json) {
        nlohmann::json records = nlohmann::json::array();
        for (const auto& r : report.records) records.push_back(record_json(r));
        nlohmann::json fluctuation = nlohmann::json::object();
        for (const auto& [k, v] : report.fluctuation_by_k) fluctuation[std::to_string(k)] = v;
        out << nlohmann::json{{"records", records}, {"expected_relative_change_by_k", fluctuation}}.dump(2) << '\n';
        return;
    }
    for (std::size_t c = 0; c < kReportColumns.size(); ++c) out << (c ? "," : "") << kReportColumns[c];
    out << '\n';
    for (const auto& r : report.records) {
        out << csv_escape(r.method) << ',' << r.k << ',' << r.seed << ',' << csv_escape(r.driving_feedback) << ','
            << format_double(r.initial_eval) << ',' << format_double(r.best_eval) << ',' << format_double(r.impact)
            << ',' << optional_text(r.custom_initial) << ',' << optional_text(r.custom_reference) << ','
            << optional_text(r.custom_impact) << ',' << r.final_k << ',' << (r.stalled ? "true" : "false") << ','
            << csv_escape(r.error) << '\n';
    }
}

void write_report(const ExperimentReport& report, const std::filesystem::path& path, ReportFormat format) {
    auto out = open_out(path);
    write_report(report, out, format);
    finish_write(out, path);
}

ExperimentReport read_report(std::istream& in, ReportFormat format) {
    ExperimentReport report;
    if (format == ReportFormat::Json) {
        try {
            const auto json = nlohmann::json::parse(in);
            for (const auto& r : json.at("records")) report.records.push_back(record_from_json(r));
            if (json.contains("expected_relative_change_by_k")) {
                for (const auto& [k, v] : json.at("expected_relative_change_by_k").items()) {
                    report.fluctuation_by_k[std::stoi(k)] = v.get<double>();
                }
            }
        } catch (const nlohmann::json::exception& e) {
            throw Error(std::string("malformed report json: ") + e.what());
        }
        return report;
    }

    std::string line;
    if (!read_line(in, line)) throw Error("empty report file");
    if (split_csv_line(line) != kReportColumns) throw Error("report header does not match the expected columns");
    std::size_t line_no = 1;
    while (read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        const auto where = "report line " + std::to_string(line_no) + ": ";
        if (cells.size() != kReportColumns.size()) throw Error(where + "wrong number of cells");
        ImpactRecord r;
        r.method = cells[0];
        if (!parse_number(cells[1], r.k) || !parse_number(cells[2], r.seed) || !parse_number(cells[4], r.initial_eval) ||
            !parse_number(cells[5], r.best_eval) || !parse_number(cells[6], r.impact) ||
            !parse_number(cells[10], r.final_k)) {
            throw Error(where + "malformed numeric cell");
        }
        r.driving_feedback = cells[3];
        r.custom_initial = optional_from_text(cells[7], where);
        r.custom_reference = optional_from_text(cells[8], where);
        r.custom_impact = optional_from_text(cells[9], where);
        if (cells[11] != "true" && cells[11] != "false") throw Error(where + "stalled must be true or false");
        r.stalled = cells[11] == "true";
        r.error = cells[12];
        report.records.push_back(std::move(r));
    }
    return report;
}

ExperimentReport read_report(const std::filesystem::path& path, ReportFormat format) {
    auto in = open_in(path);
    return read_report(in, format);
}

}  // namespace fbk
