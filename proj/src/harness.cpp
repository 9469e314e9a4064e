#include "feedback_kmeans/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include "feedback_kmeans/kmeans.hpp"
#include "feedback_kmeans/random.hpp"

namespace fbk {

std::string MethodSpec::key() const {
    return std::string(to_string(method)) + ":" + std::string(to_string(feedback));
}

std::string MethodSpec::label() const {
    return std::string(method == Method::Sme ? "SME" : "S/M") + (feedback == FeedbackKind::Rss ? "(RSS)" : "(Custom)");
}

MethodSpec method_spec_from_string(std::string_view key) {
    const auto colon = key.find(':');
    if (colon == std::string_view::npos) throw Error("method '" + std::string(key) + "' must look like sme:rss");
    return MethodSpec{method_from_string(key.substr(0, colon)), feedback_kind_from_string(key.substr(colon + 1))};
}

std::vector<MethodSpec> all_methods() {
    return {{Method::Sme, FeedbackKind::Rss},
            {Method::Sme, FeedbackKind::Customizability},
            {Method::Sm, FeedbackKind::Rss},
            {Method::Sm, FeedbackKind::Customizability}};
}

double impact(double initial, double best, Sense sense) {
    if (!(std::abs(initial) >= kDegenerateReference)) throw Error("degenerate initial evaluation for impact");
    return sense == Sense::HigherIsBetter ? (best - initial) / std::abs(initial) : (initial - best) / std::abs(initial);
}

double expected_relative_change(const Dataset& dataset, const Clustering& clustering, const FeedbackProvider& provider,
                                int calls, std::uint64_t seed, FluctuationPairing pairing) {
    if (provider.deterministic()) throw Error("expected_relative_change needs a non-deterministic provider");
    if (calls < 2) throw Error("expected_relative_change needs at least two calls");
    std::vector<double> values;
    for (int c = 0; c < calls; ++c) {
        values.push_back(
            evaluate_clustering(dataset, clustering, provider, derive_seed(seed, {static_cast<std::uint64_t>(c)})).aggregate);
    }
    double sum = 0.0;
    std::size_t pairs = 0;
    const std::size_t references = pairing == FluctuationPairing::ToFirstCall ? 1 : values.size() - 1;
    for (std::size_t i = 0; i < references; ++i) {
        for (std::size_t j = i + 1; j < values.size(); ++j) {
            sum += std::abs(relative_change(values[i], values[j]));
            ++pairs;
        }
    }
    return sum / static_cast<double>(pairs);
}

std::vector<std::string> experiment_violations(const ExperimentConfig& config) {
    std::vector<std::string> out;
    if (config.methods.empty()) out.emplace_back("no methods requested");
    if (config.k_values.empty()) out.emplace_back("k_values is empty");
    for (int k : config.k_values) {
        if (k < 2) out.push_back("k=" + std::to_string(k) + " is below 2");
    }
    if (config.sme_iterations < 1 || config.sm_iterations < 1) out.emplace_back("iterations must be positive");
    if (config.repeats_per_cell < 1) out.emplace_back("repeats_per_cell must be positive");
    if (config.fluctuation_calls < 2) out.emplace_back("fluctuation_calls must be at least 2");
    return out;
}

std::uint64_t cell_seed(std::uint64_t experiment_seed, int k, int repeat) {
    return derive_seed(experiment_seed, {static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(repeat)});
}

namespace {

int thread_count(int requested) {
    int threads = requested;
    if (threads <= 0) {
        if (const char* env = std::getenv("FEEDBACK_KMEANS_THREADS")) threads = std::atoi(env);
    }
    if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return threads;
}

template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (auto i = next++; i < count; i = next++) fn(i);
    };
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
}

struct Cell {
    MethodSpec method;
    int k;
    int repeat;
};

ImpactRecord run_cell(const Dataset& dataset, const ExperimentConfig& config, const Cell& cell,
                      const std::shared_ptr<const FeedbackProvider>& rss,
                      const std::shared_ptr<const FeedbackProvider>& custom) {
    ImpactRecord rec;
    rec.method = cell.method.key();
    rec.k = cell.k;
    rec.seed = cell_seed(config.seed, cell.k, cell.repeat);
    rec.driving_feedback = std::string(to_string(cell.method.feedback));
    try {
        EngineConfig engine;
        engine.method = cell.method.method;
        engine.iterations = cell.method.method == Method::Sme ? config.sme_iterations : config.sm_iterations;
        engine.seed = rec.seed;
        engine.feedback = cell.method.feedback == FeedbackKind::Rss ? rss : custom;
        const auto trace = run_engine(dataset, cell.k, engine);

        rec.initial_eval = trace.steps.front().feedback.aggregate;
        rec.best_eval = trace.best_evaluation;
        rec.impact = impact(rec.initial_eval, rec.best_eval, trace.sense);
        rec.final_k = trace.best.k;
        rec.stalled = trace.stalled;
        if (cell.method.feedback == FeedbackKind::Customizability) {
            rec.custom_initial = rec.initial_eval;
            rec.custom_reference = rec.best_eval;
            rec.custom_impact = rec.impact;
        } else {
            // Same stream as the customizability-driven runs' step 0.
            const auto initial = trace.clustering_at(0);
            rec.custom_initial = evaluate_clustering(dataset, initial, *custom, feedback_stream(rec.seed, 0)).aggregate;
            rec.custom_reference =
                evaluate_clustering(dataset, trace.best, *custom, derive_seed(rec.seed, {0x5e})).aggregate;
            rec.custom_impact = impact(*rec.custom_initial, *rec.custom_reference, Sense::HigherIsBetter);
        }
    } catch (const std::exception& e) {
        rec.error = e.what();
        if (rec.error.empty()) rec.error = "unknown failure";
    }
    return rec;
}

double mean(const std::vector<double>& values) {
    return values.empty() ? 0.0 : std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace

ExperimentReport run_experiment(const Dataset& dataset, const ExperimentConfig& config,
                                const OracleProfile& oracle_profile) {
    if (auto violations = experiment_violations(config); !violations.empty()) {
        throw Error("invalid experiment config: " + violations.front());
    }
    check_dataset(dataset);
    const std::shared_ptr<const FeedbackProvider> rss = std::make_shared<RssFeedback>();
    const std::shared_ptr<const FeedbackProvider> custom = std::make_shared<CustomizabilityFeedback>(oracle_profile);

    std::vector<Cell> cells;
    for (const auto& method : config.methods) {
        for (int k : config.k_values) {
            for (int r = 0; r < config.repeats_per_cell; ++r) cells.push_back({method, k, r});
        }
    }
    ExperimentReport report;
    report.records.resize(cells.size());
    std::vector<std::optional<double>> fluctuation(config.k_values.size());

    const int threads = thread_count(config.threads);
    parallel_for(cells.size() + config.k_values.size(), threads, [&](std::size_t i) {
        if (i < cells.size()) {
            report.records[i] = run_cell(dataset, config, cells[i], rss, custom);
            return;
        }
        const auto slot = i - cells.size();
        const int k = config.k_values[slot];
        const auto seed = cell_seed(config.seed, k, 0);
        try {
            KMeansConfig km;
            km.k = k;
            km.seed = init_seed(seed);
            const auto initial = lloyd(dataset, km);
            fluctuation[slot] =
                expected_relative_change(dataset, initial, *custom, config.fluctuation_calls, derive_seed(seed, {0xf1}));
        } catch (const std::exception&) {
            // Reported as missing; the matching cells carry the error.
        }
    });
    for (std::size_t s = 0; s < config.k_values.size(); ++s) {
        if (fluctuation[s]) report.fluctuation_by_k[config.k_values[s]] = *fluctuation[s];
    }
    return report;
}

ExperimentSummary summarize(const ExperimentReport& report) {
    ExperimentSummary summary;
    summary.fluctuation_by_k = report.fluctuation_by_k;

    std::vector<std::string> order;
    for (const auto& r : report.records) {
        if (std::find(order.begin(), order.end(), r.method) == order.end()) order.push_back(r.method);
    }
    std::map<int, std::vector<double>> initial_custom;
    std::map<int, std::vector<std::uint64_t>> seen_seeds;
    for (const auto& method : order) {
        MethodSummary ms;
        ms.method = method;
        std::map<int, std::vector<double>> impacts;
        std::map<int, std::vector<double>> custom_impacts;
        for (const auto& r : report.records) {
            if (r.method != method) continue;
            ++ms.cells;
            if (r.failed()) {
                ++ms.failed;
                continue;
            }
            impacts[r.k].push_back(r.impact);
            if (r.custom_impact) custom_impacts[r.k].push_back(*r.custom_impact);
            ++ms.final_k_counts[r.final_k];
            auto& seeds = seen_seeds[r.k];
            if (r.custom_initial && std::find(seeds.begin(), seeds.end(), r.seed) == seeds.end()) {
                seeds.push_back(r.seed);
                initial_custom[r.k].push_back(*r.custom_initial);
            }
        }
        std::vector<double> per_k;
        for (const auto& [k, values] : impacts) per_k.push_back(ms.impact_by_k[k] = mean(values));
        ms.mean_impact = mean(per_k);
        per_k.clear();
        for (const auto& [k, values] : custom_impacts) per_k.push_back(ms.custom_impact_by_k[k] = mean(values));
        ms.mean_custom_impact = mean(per_k);
        summary.methods.push_back(std::move(ms));
    }
    for (const auto& [k, values] : initial_custom) summary.initial_custom_by_k[k] = mean(values);
    return summary;
}

nlohmann::json summary_to_json(const ExperimentSummary& summary) {
    auto keyed = [](const auto& map) {
        nlohmann::json out = nlohmann::json::object();
        for (const auto& [k, v] : map) out[std::to_string(k)] = v;
        return out;
    };
    nlohmann::json methods = nlohmann::json::array();
    for (const auto& m : summary.methods) {
        methods.push_back({{"method", m.method},
                           {"mean_impact", m.mean_impact},
                           {"mean_custom_impact", m.mean_custom_impact},
                           {"impact_by_k", keyed(m.impact_by_k)},
                           {"custom_impact_by_k", keyed(m.custom_impact_by_k)},
                           {"final_k_counts", keyed(m.final_k_counts)},
                           {"cells", m.cells},
                           {"failed", m.failed}});
    }
    return {{"methods", methods},
            {"initial_custom_by_k", keyed(summary.initial_custom_by_k)},
            {"expected_relative_change_by_k", keyed(summary.fluctuation_by_k)}};
}

std::string format_summary(const ExperimentSummary& summary) {
    auto label = [](const std::string& key) {
        try {
            return method_spec_from_string(key).label();
        } catch (const Error&) {
            return key;
        }
    };
    std::ostringstream out;
    out << std::fixed << std::setprecision(4);
    out << std::left << std::setw(14) << "method" << std::right << std::setw(12) << "impact" << std::setw(14)
        << "custom_impact" << std::setw(8) << "cells" << std::setw(8) << "failed" << '\n';
    for (const auto& m : summary.methods) {
        out << std::left << std::setw(14) << label(m.method) << std::right << std::setw(12) << m.mean_impact << std::setw(14)
            << m.mean_custom_impact << std::setw(8) << m.cells << std::setw(8) << m.failed << '\n';
    }
    out << "\nper-k impact (driving feedback)\n" << std::left << std::setw(14) << "method" << std::right;
    std::vector<int> ks;
    for (const auto& m : summary.methods) {
        for (const auto& [k, v] : m.impact_by_k) {
            if (std::find(ks.begin(), ks.end(), k) == ks.end()) ks.push_back(k);
        }
    }
    std::sort(ks.begin(), ks.end());
    for (int k : ks) out << std::setw(10) << ("k=" + std::to_string(k));
    out << '\n';
    for (const auto& m : summary.methods) {
        out << std::left << std::setw(14) << label(m.method) << std::right;
        for (int k : ks) {
            auto it = m.impact_by_k.find(k);
            if (it == m.impact_by_k.end()) out << std::setw(10) << "-";
            else out << std::setw(10) << it->second;
        }
        out << '\n';
    }
    out << "\ninitial customizability by k\n";
    for (const auto& [k, v] : summary.initial_custom_by_k) out << "  k=" << k << "  " << v << '\n';
    if (!summary.fluctuation_by_k.empty()) {
        out << "\nexpected relative change by k\n";
        for (const auto& [k, v] : summary.fluctuation_by_k) out << "  k=" << k << "  " << v << '\n';
    }
    return out.str();
}

}  // namespace fbk
