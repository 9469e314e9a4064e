#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "feedback_kmeans/ingest.hpp"
#include "test_support.hpp"

using namespace fbk;

namespace {

const std::string kHeader = "distance,advance_purchase,stay_duration,n_passengers,n_children,geography,dep_dow,ret_dow";

CsvReadResult read_text(const std::string& text, CsvReadOptions options = {false, false}) {
    std::istringstream in(text);
    return read_csv(in, options);
}

ImpactRecord sample_record(int k, bool with_custom) {
    ImpactRecord r;
    r.method = with_custom ? "sme:rss" : "sm:custom";
    r.k = k;
    r.seed = 0xfedcba9876543210ULL + static_cast<std::uint64_t>(k);
    r.driving_feedback = with_custom ? "rss" : "custom";
    r.initial_eval = 0.1 * k + 1.0 / 3.0;
    r.best_eval = std::nextafter(r.initial_eval, 0.0);
    r.impact = 1e-17 * k;
    if (with_custom) {
        r.custom_initial = 0.123456789012345678;
        r.custom_reference = -2.5e-8;
        r.custom_impact = std::numeric_limits<double>::denorm_min();
    }
    r.final_k = k + 1;
    r.stalled = k % 2 == 0;
    if (k == 5) r.error = "cell failed, \"quoted\"";
    return r;
}

ExperimentReport sample_report() {
    ExperimentReport report;
    for (int k = 2; k <= 5; ++k) report.records.push_back(sample_record(k, k % 2 == 1));
    report.fluctuation_by_k = {{2, 0.01}, {3, 1.0 / 7.0}};
    return report;
}

void check_same(const ImpactRecord& a, const ImpactRecord& b) {
    CHECK(a.method == b.method);
    CHECK(a.k == b.k);
    CHECK(a.seed == b.seed);
    CHECK(a.driving_feedback == b.driving_feedback);
    CHECK(a.initial_eval == b.initial_eval);
    CHECK(a.best_eval == b.best_eval);
    CHECK(a.impact == b.impact);
    CHECK(a.custom_initial == b.custom_initial);
    CHECK(a.custom_reference == b.custom_reference);
    CHECK(a.custom_impact == b.custom_impact);
    CHECK(a.final_k == b.final_k);
    CHECK(a.stalled == b.stalled);
    CHECK(a.error == b.error);
}

std::string written(const ExperimentReport& report, ReportFormat format) {
    std::ostringstream out;
    write_report(report, out, format);
    return out.str();
}

ExperimentReport reread(const ExperimentReport& report, ReportFormat format) {
    std::istringstream in(written(report, format));
    return read_report(in, format);
}

}  // namespace

TEST_CASE("generated datasets round-trip through csv") {
    const auto dataset = generate(planted_segments_config(500, 6));
    std::ostringstream out;
    write_dataset_csv(dataset, out);
    const auto back = read_text(out.str(), {true, false});
    CHECK(back.warnings.empty());
    CHECK(back.dataset.points == dataset.points);
    CHECK(*back.dataset.bookings == *dataset.bookings);
    CHECK(*back.dataset.hidden_segment == *dataset.hidden_segment);
    CHECK(*back.dataset.origin == *dataset.origin);
    CHECK(*back.dataset.destination == *dataset.destination);
    CHECK(back.dataset.feature_names == dataset.feature_names);
}

TEST_CASE("csv files are read through a path too") {
    const auto dir = testing::scratch_dir("ingest_path");
    const auto dataset = generate(planted_segments_config(50, 1));
    write_dataset_csv(dataset, dir / "d.csv");
    const auto back = read_csv(dir / "d.csv", {true, false});
    CHECK(back.dataset.points == dataset.points);
    CHECK_THROWS_WITH_AS(read_csv(dir / "missing.csv"), doctest::Contains("missing.csv"), Error);
}

TEST_CASE("standardization at load time") {
    const auto dataset = generate(planted_segments_config(400, 2));
    std::ostringstream out;
    write_dataset_csv(dataset, out);
    const auto z = read_text(out.str(), {true, true});
    REQUIRE(z.transform);
    CHECK(std::abs(z.dataset.points.col(0).mean()) <= 1e-9);
    CHECK((unstandardize(z.dataset, *z.transform).points - dataset.points).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK_FALSE(read_text(out.str(), {true, false}).transform);
}

TEST_CASE("a missing feature column is named") {
    const std::string header = "distance,advance_purchase,n_passengers,n_children,geography,dep_dow,ret_dow\n";
    CHECK_THROWS_WITH_AS(read_text(header + "1,2,3,4,5,6,7\n"), doctest::Contains("stay_duration"), Error);
}

TEST_CASE("features only load, and the oracle then asks for labels") {
    const auto result = read_text(kHeader + "\n1,2,3,1,0,1,2,3\n4,5,6,2,1,0,5,6\n");
    CHECK(result.dataset.size() == 2);
    CHECK_FALSE(result.dataset.bookings);
    OracleProfile p;
    p.m = 1;
    p.segment_weights[0] = Vector::Ones(1);
    const CustomizabilityFeedback provider(p);
    const Clustering c{{0, 0}, Matrix::Zero(1, 8), 1};
    CHECK_THROWS_WITH_AS(evaluate_clustering(result.dataset, c, provider, 0),
                         doctest::Contains("oracle requires generator-labeled data"), Error);
}

TEST_CASE("label columns are skipped when not wanted") {
    const auto text = kHeader + ",bookings,hidden_segment\n1,2,3,1,0,1,2,3,7,1\n";
    CHECK(read_text(text, {true, false}).dataset.bookings);
    CHECK_FALSE(read_text(text, {false, false}).dataset.bookings);
}

TEST_CASE("unknown columns produce a warning") {
    const auto result = read_text(kHeader + ",colour\n1,2,3,1,0,1,2,3,red\n");
    REQUIRE(result.warnings.size() == 1);
    CHECK(result.warnings[0].find("colour") != std::string::npos);
    CHECK(result.dataset.dim() == 8);
}

TEST_CASE("malformed files") {
    CHECK_THROWS_WITH_AS(read_text(""), doctest::Contains("empty"), Error);
    CHECK_THROWS_WITH_AS(read_text(kHeader + "\n"), doctest::Contains("empty"), Error);
    CHECK_THROWS_WITH_AS(read_text(kHeader + "\n1,2,3,1,0,1,2,3\n1,2,3\n"), doctest::Contains("line 3"), Error);
    CHECK_THROWS_WITH_AS(read_text(kHeader + "\n1,2,3,1,0,1,2,3\n1,2,x,1,0,1,2,3\n"),
                         doctest::Contains("line 3"), Error);
    CHECK_THROWS_WITH_AS(read_text(kHeader + "\n1,2,x,1,0,1,2,3\n"), doctest::Contains("stay_duration"), Error);
    CHECK_THROWS_AS(read_text(kHeader + ",bookings\n1,2,3,1,0,1,2,3,-4\n", {true, false}), Error);
}

TEST_CASE("empty report files hold only the header") {
    const ExperimentReport empty;
    const auto csv = written(empty, ReportFormat::Csv);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1);
    CHECK(csv.rfind("method,k,seed,driving_feedback,initial_eval,best_eval,impact,custom_initial,custom_reference,"
                    "custom_impact,final_k,stalled",
                    0) == 0);
    CHECK(reread(empty, ReportFormat::Csv).records.empty());
    CHECK(reread(empty, ReportFormat::Json).records.empty());
}

TEST_CASE("reports round-trip in both formats") {
    const auto report = sample_report();
    for (auto format : {ReportFormat::Csv, ReportFormat::Json}) {
        const auto back = reread(report, format);
        REQUIRE(back.records.size() == report.records.size());
        for (std::size_t i = 0; i < back.records.size(); ++i) check_same(back.records[i], report.records[i]);
    }
    CHECK(reread(report, ReportFormat::Json).fluctuation_by_k == report.fluctuation_by_k);
}

TEST_CASE("csv and json emissions agree field by field") {
    const auto report = sample_report();
    const auto csv = reread(report, ReportFormat::Csv);
    const auto json = reread(report, ReportFormat::Json);
    REQUIRE(csv.records.size() == json.records.size());
    for (std::size_t i = 0; i < csv.records.size(); ++i) check_same(csv.records[i], json.records[i]);
}

TEST_CASE("json report keys are sorted") {
    const auto text = written(sample_report(), ReportFormat::Json);
    CHECK(text.find("\"best_eval\"") < text.find("\"custom_impact\""));
    CHECK(text.find("\"custom_impact\"") < text.find("\"method\""));
    CHECK(text.find("\"expected_relative_change_by_k\"") < text.find("\"records\""));
}

TEST_CASE("report files on disk") {
    const auto dir = testing::scratch_dir("ingest_report");
    const auto report = sample_report();
    write_report(report, dir / "r.csv", ReportFormat::Csv);
    CHECK(read_report(dir / "r.csv", ReportFormat::Csv).records.size() == 4);
    CHECK_THROWS_WITH_AS(write_report(report, dir / "no" / "such" / "r.csv", ReportFormat::Csv),
                         doctest::Contains("r.csv"), Error);
}

TEST_CASE("malformed reports") {
    std::istringstream bad_header("method,k\n");
    CHECK_THROWS_AS(read_report(bad_header, ReportFormat::Csv), Error);
    std::istringstream bad_json("{\"records\": [{\"method\": 1}]}");
    CHECK_THROWS_AS(read_report(bad_json, ReportFormat::Json), Error);
}

TEST_CASE("format_double is shortest round-trip") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
    Rng rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<double>(uniform_below(rng, 40)) - 20);
        CHECK(std::stod(format_double(v)) == v);
    }
}
