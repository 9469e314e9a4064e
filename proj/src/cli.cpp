#include "feedback_kmeans/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "feedback_kmeans/engines.hpp"
#include "feedback_kmeans/harness.hpp"
#include "feedback_kmeans/ingest.hpp"
#include "feedback_kmeans/synth.hpp"

namespace fbk {

namespace {

namespace fs = std::filesystem;

/// Thrown for bad flag combinations discovered after parsing; maps to exit 2.
class UsageError : public Error {
public:
    using Error::Error;
};

nlohmann::json load_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw Error("write to '" + path.string() + "' failed");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

Dataset load_dataset(const std::string& path, bool raw, std::ostream& err) {
    CsvReadOptions options;
    options.standardize = !raw;
    auto result = read_csv(fs::path(path), options);
    for (const auto& w : result.warnings) err << "warning: " << w << '\n';
    return std::move(result.dataset);
}

// Config-file value unless the flag was given on the command line.
template <typename T>
void layer(const nlohmann::json& config, const char* key, const CLI::Option* flag, T& value) {
    if (flag->count() > 0 || !config.contains(key)) return;
    try {
        value = config.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("config key '") + key + "': " + e.what());
    }
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
    std::string config;
    std::string out;
    int n_points = 20000;
    std::uint64_t seed = 0;
    CLI::Option* n_points_flag = nullptr;
    CLI::Option* seed_flag = nullptr;
};

int cmd_generate(const GenerateArgs& args, std::ostream& out) {
    GeneratorConfig config;
    if (!args.config.empty()) {
        config = generator_from_json(load_json(args.config));
        if (args.n_points_flag->count() > 0) config.n_points = args.n_points;
        if (args.seed_flag->count() > 0) config.seed = args.seed;
    } else {
        config = planted_segments_config(args.n_points, args.seed);
    }
    const auto dataset = generate(config);
    const auto profile = oracle_profile(config);

    const fs::path dir(args.out);
    fs::create_directories(dir);
    write_dataset_csv(dataset, dir / "dataset.csv");
    write_text(dir / "oracle.json", profile_to_json(profile).dump(2) + "\n");
    write_text(dir / "generator.json", generator_to_json(config).dump(2) + "\n");

    std::map<int, std::size_t> per_segment;
    for (auto s : *dataset.hidden_segment) ++per_segment[s];
    const auto& bookings = *dataset.bookings;
    double total = 0.0;
    for (auto b : bookings) total += static_cast<double>(b);
    out << "points: " << dataset.size() << '\n' << "segments:";
    for (const auto& [s, count] : per_segment) out << ' ' << s << '=' << count;
    out << '\n'
        << "bookings: min=" << *std::min_element(bookings.begin(), bookings.end())
        << " max=" << *std::max_element(bookings.begin(), bookings.end()) << " mean=" << std::fixed
        << std::setprecision(3) << total / static_cast<double>(bookings.size()) << '\n'
        << "wrote " << (dir / "dataset.csv").string() << ", " << (dir / "oracle.json").string() << '\n';
    return 0;
}

// ---------------------------------------------------------------------------

struct RunArgs {
    std::string config;
    std::string data;
    std::string oracle;
    std::string method = "sme";
    std::string feedback = "rss";
    int k = 4;
    int iterations = 0;
    std::uint64_t seed = 0;
    double target = 0.0;
    std::string out = "trace.jsonl";
    bool raw = false;
    std::map<std::string, CLI::Option*> flags;
};

int cmd_run(RunArgs args, std::ostream& out, std::ostream& err) {
    bool has_target = args.flags["--target"]->count() > 0;
    if (!args.config.empty()) {
        const auto config = load_json(args.config);
        layer(config, "data", args.flags["--data"], args.data);
        layer(config, "oracle", args.flags["--oracle"], args.oracle);
        layer(config, "method", args.flags["--method"], args.method);
        layer(config, "feedback", args.flags["--feedback"], args.feedback);
        layer(config, "k", args.flags["--k"], args.k);
        layer(config, "iterations", args.flags["--iterations"], args.iterations);
        layer(config, "seed", args.flags["--seed"], args.seed);
        layer(config, "out", args.flags["--out"], args.out);
        layer(config, "raw", args.flags["--raw"], args.raw);
        if (!has_target && config.contains("target")) {
            args.target = config.at("target").get<double>();
            has_target = true;
        }
    }
    if (args.data.empty()) throw UsageError("--data is required");
    const auto method = method_from_string(args.method);
    const auto kind = feedback_kind_from_string(args.feedback);
    std::optional<OracleProfile> profile;
    if (kind == FeedbackKind::Customizability) {
        if (args.oracle.empty()) throw Error("--feedback custom requires --oracle PATH");
        profile = profile_from_json(load_json(args.oracle));
    }

    const auto dataset = load_dataset(args.data, args.raw, err);
    EngineConfig config;
    config.method = method;
    config.iterations = args.iterations > 0 ? args.iterations : default_iterations(method);
    config.seed = args.seed;
    if (has_target) config.target_evaluation = args.target;
    config.feedback = make_provider(args.feedback, profile ? &*profile : nullptr);

    const auto trace = run_engine(dataset, args.k, config);
    {
        std::ofstream file(args.out, std::ios::binary);
        if (!file) throw Error("cannot open '" + args.out + "' for writing");
        write_trace_jsonl(trace, file);
        if (!file) throw Error("write to '" + args.out + "' failed");
    }

    const double initial = trace.steps.front().feedback.aggregate;
    out << std::setprecision(10);
    out << "method: " << args.method << '(' << args.feedback << ") k=" << args.k << " seed=" << args.seed << '\n'
        << "evaluations: " << trace.evaluation_count() << "  actions: " << trace.action_count() << '\n'
        << "initial evaluation: " << initial << '\n'
        << "best evaluation: " << trace.best_evaluation << " (step " << trace.best_step_index << ", k=" << trace.best.k
        << ")\n"
        << "impact: " << impact(initial, trace.best_evaluation, trace.sense) << '\n'
        << "final k: " << trace.steps.back().k << '\n'
        << "stop: " << trace.stop_reason << '\n'
        << "wrote " << args.out << '\n';
    return 0;
}

// ---------------------------------------------------------------------------

struct ExperimentArgs {
    std::string config;
    std::string data;
    std::string oracle;
    std::string methods = "sme:rss,sme:custom,sm:rss,sm:custom";
    std::string k_values = "2,3,4,5,6,7";
    int repeats = 3;
    int fluctuation_calls = 10;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out;
    bool raw = false;
    std::map<std::string, CLI::Option*> flags;
};

int cmd_experiment(ExperimentArgs args, std::ostream& out, std::ostream& err) {
    if (!args.config.empty()) {
        const auto config = load_json(args.config);
        layer(config, "data", args.flags["--data"], args.data);
        layer(config, "oracle", args.flags["--oracle"], args.oracle);
        layer(config, "methods", args.flags["--methods"], args.methods);
        layer(config, "k_values", args.flags["--k-values"], args.k_values);
        layer(config, "repeats", args.flags["--repeats"], args.repeats);
        layer(config, "fluctuation_calls", args.flags["--fluctuation-calls"], args.fluctuation_calls);
        layer(config, "seed", args.flags["--seed"], args.seed);
        layer(config, "threads", args.flags["--threads"], args.threads);
        layer(config, "out", args.flags["--out"], args.out);
        layer(config, "raw", args.flags["--raw"], args.raw);
    }
    if (args.data.empty()) throw UsageError("--data is required");
    if (args.oracle.empty()) throw UsageError("--oracle is required: every cell is also scored by customizability");
    if (args.out.empty()) throw UsageError("--out is required");

    ExperimentConfig config;
    config.methods.clear();
    for (const auto& key : split_list(args.methods)) config.methods.push_back(method_spec_from_string(key));
    config.k_values.clear();
    for (const auto& k : split_list(args.k_values)) {
        try {
            config.k_values.push_back(std::stoi(k));
        } catch (const std::exception&) {
            throw UsageError("--k-values entry '" + k + "' is not an integer");
        }
    }
    config.repeats_per_cell = args.repeats;
    config.fluctuation_calls = args.fluctuation_calls;
    config.seed = args.seed;
    config.threads = args.threads;

    const auto profile = profile_from_json(load_json(args.oracle));
    const auto dataset = load_dataset(args.data, args.raw, err);
    const auto report = run_experiment(dataset, config, profile);
    const auto summary = summarize(report);

    const fs::path dir(args.out);
    fs::create_directories(dir);
    write_report(report, dir / "report.csv", ReportFormat::Csv);
    write_report(report, dir / "report.json", ReportFormat::Json);
    write_text(dir / "summary.json", summary_to_json(summary).dump(2) + "\n");

    out << format_summary(summary);
    std::size_t failed = 0;
    for (const auto& r : report.records) {
        if (r.failed()) {
            ++failed;
            err << "cell " << r.method << " k=" << r.k << " seed=" << r.seed << " failed: " << r.error << '\n';
        }
    }
    out << "\nwrote " << (dir / "report.csv").string() << ", " << (dir / "report.json").string() << ", "
        << (dir / "summary.json").string() << '\n';
    return failed == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct ValidateArgs {
    std::string data;
    std::string trace;
    bool raw = false;
    int min_k = kMinClusters;
};

int cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& err) {
    const auto dataset = load_dataset(args.data, args.raw, err);
    std::ifstream in(args.trace);
    if (!in) throw Error("cannot open '" + args.trace + "'");
    const auto records = read_trace_jsonl(in);
    const auto violations = check_trace(dataset, records, args.min_k);
    for (const auto& v : violations) out << "violation: " << v << '\n';
    out << records.size() << " steps checked, " << violations.size() << " violations\n";
    return violations.empty() ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Feedback-driven split/merge clustering of flight searches", "feedback-kmeans"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Write a synthetic dataset and its oracle profile");
    generate->add_option("--config", gen.config, "Generator config JSON")->check(CLI::ExistingFile);
    generate->add_option("--out", gen.out, "Output directory")->required();
    gen.n_points_flag = generate->add_option("--n-points", gen.n_points, "Number of searches");
    gen.seed_flag = generate->add_option("--seed", gen.seed, "Generator seed");

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run one SME or S/M engine call and write its trace");
    run_cmd->add_option("--config", run.config, "Run config JSON (flags override it)")->check(CLI::ExistingFile);
    run.flags["--data"] = run_cmd->add_option("--data", run.data, "Dataset CSV");
    run.flags["--oracle"] = run_cmd->add_option("--oracle", run.oracle, "Oracle profile JSON");
    run.flags["--method"] = run_cmd->add_option("--method", run.method, "sme | sm");
    run.flags["--feedback"] = run_cmd->add_option("--feedback", run.feedback, "rss | custom");
    run.flags["--k"] = run_cmd->add_option("--k", run.k, "Initial number of clusters");
    run.flags["--iterations"] = run_cmd->add_option("--iterations", run.iterations, "Iterations (default 6 sme, 12 sm)");
    run.flags["--seed"] = run_cmd->add_option("--seed", run.seed, "Engine seed");
    run.flags["--target"] = run_cmd->add_option("--target", run.target, "Stop once this evaluation is reached");
    run.flags["--out"] = run_cmd->add_option("--out", run.out, "Trace output (JSON lines)");
    run.flags["--raw"] = run_cmd->add_flag("--raw", run.raw, "Cluster on raw, unstandardized features");

    ExperimentArgs exp;
    auto* exp_cmd = app.add_subcommand("experiment", "Run the method x k x repeat protocol and write reports");
    exp_cmd->add_option("--config", exp.config, "Experiment config JSON (flags override it)")->check(CLI::ExistingFile);
    exp.flags["--data"] = exp_cmd->add_option("--data", exp.data, "Dataset CSV");
    exp.flags["--oracle"] = exp_cmd->add_option("--oracle", exp.oracle, "Oracle profile JSON");
    exp.flags["--methods"] = exp_cmd->add_option("--methods", exp.methods, "Comma list, e.g. sme:rss,sm:custom");
    exp.flags["--k-values"] = exp_cmd->add_option("--k-values", exp.k_values, "Comma list of initial k");
    exp.flags["--repeats"] = exp_cmd->add_option("--repeats", exp.repeats, "Seeds per (method, k) cell");
    exp.flags["--fluctuation-calls"] =
        exp_cmd->add_option("--fluctuation-calls", exp.fluctuation_calls, "Calls for the expected relative change");
    exp.flags["--seed"] = exp_cmd->add_option("--seed", exp.seed, "Experiment seed");
    exp.flags["--threads"] = exp_cmd->add_option("--threads", exp.threads, "Worker threads (0: FEEDBACK_KMEANS_THREADS or all cores)");
    exp.flags["--out"] = exp_cmd->add_option("--out", exp.out, "Output directory");
    exp.flags["--raw"] = exp_cmd->add_flag("--raw", exp.raw, "Cluster on raw, unstandardized features");

    ValidateArgs val;
    auto* val_cmd = app.add_subcommand("validate", "Check a trace against its dataset and the engine invariants");
    val_cmd->add_option("--data", val.data, "Dataset CSV")->required();
    val_cmd->add_option("--trace", val.trace, "Trace JSON lines")->required();
    val_cmd->add_option("--min-k", val.min_k, "Minimum cluster count used by the run");
    val_cmd->add_flag("--raw", val.raw, "The run clustered raw features");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*generate) return cmd_generate(gen, out);
        if (*run_cmd) return cmd_run(run, out, err);
        if (*exp_cmd) return cmd_experiment(exp, out, err);
        if (*val_cmd) return cmd_validate(val, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace fbk
