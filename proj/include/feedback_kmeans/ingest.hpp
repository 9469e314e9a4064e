#ifndef FEEDBACK_KMEANS_INGEST_HPP
#define FEEDBACK_KMEANS_INGEST_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "feedback_kmeans/core.hpp"
#include "feedback_kmeans/harness.hpp"
#include "feedback_kmeans/synth.hpp"

namespace fbk {

struct CsvReadOptions {
    bool has_hidden_columns = true;  // read bookings/hidden_segment/origin/destination when present
    bool standardize = true;
};

struct CsvReadResult {
    Dataset dataset;
    std::optional<Standardization> transform;
    std::vector<std::string> warnings;
};

/// Reads the 8-feature flight-search schema. Unknown columns are ignored
/// with a warning; malformed rows raise errors that name the line.
CsvReadResult read_csv(std::istream& in, const CsvReadOptions& options = {});
CsvReadResult read_csv(const std::filesystem::path& path, const CsvReadOptions& options = {});

/// Header: the feature names, then bookings,hidden_segment,origin,destination
/// for whichever of them the dataset carries.
void write_dataset_csv(const Dataset& dataset, std::ostream& out);
void write_dataset_csv(const Dataset& dataset, const std::filesystem::path& path);

enum class ReportFormat { Csv, Json };

inline const std::vector<std::string> kReportColumns = {
    "method",         "k",             "seed",           "driving_feedback",
    "initial_eval",   "best_eval",     "impact",         "custom_initial",
    "custom_reference", "custom_impact", "final_k",      "stalled",
    "error"};

void write_report(const ExperimentReport& report, std::ostream& out, ReportFormat format);
void write_report(const ExperimentReport& report, const std::filesystem::path& path, ReportFormat format);

ExperimentReport read_report(std::istream& in, ReportFormat format);
ExperimentReport read_report(const std::filesystem::path& path, ReportFormat format);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace fbk

#endif  // FEEDBACK_KMEANS_INGEST_HPP
