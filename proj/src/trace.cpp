#include "feedback_kmeans/trace.hpp"

#include <istream>
#include <ostream>
#include <string>

namespace fbk {

std::string to_string(const Action& action) {
    switch (action.kind) {
        case ActionKind::Init:
            return "init";
        case ActionKind::Split:
            return "split(" + std::to_string(action.first) + ")";
        case ActionKind::Merge:
            return "merge(" + std::to_string(action.first) + "," + std::to_string(action.second) + ")";
    }
    return "?";
}

std::string to_string(const std::vector<Action>& actions) {
    std::string out;
    for (const auto& a : actions) {
        if (!out.empty()) out += '+';
        out += to_string(a);
    }
    return out;
}

ClusteringDelta diff_clustering(const Clustering& before, const Clustering& after) {
    if (before.assignment.size() != after.assignment.size()) throw Error("diff_clustering: point count changed");
    ClusteringDelta delta{{}, after.centroids, after.k};
    for (std::size_t p = 0; p < after.assignment.size(); ++p) {
        if (before.assignment[p] != after.assignment[p]) delta.moved.emplace_back(static_cast<Index>(p), after.assignment[p]);
    }
    return delta;
}

Clustering apply_delta(Clustering base, const ClusteringDelta& delta) {
    for (const auto& [p, id] : delta.moved) base.assignment.at(static_cast<std::size_t>(p)) = id;
    base.centroids = delta.centroids;
    base.k = delta.k;
    return base;
}

std::size_t RunTrace::action_count() const {
    std::size_t count = 0;
    for (const auto& step : steps) {
        for (const auto& action : step.actions) count += action.kind == ActionKind::Init ? 0 : 1;
    }
    return count;
}

Clustering RunTrace::clustering_at(std::size_t step) const {
    if (step >= steps.size()) throw Error("clustering_at: step " + std::to_string(step) + " out of range");
    if (step == best_step_index) return best;
    std::size_t base = step;
    while (!steps[base].snapshot) {
        if (base == 0) throw Error("clustering_at: trace has no base snapshot");
        --base;
    }
    Clustering out = *steps[base].snapshot;
    for (std::size_t s = base + 1; s <= step; ++s) out = apply_delta(std::move(out), steps[s].delta);
    return out;
}

void RunTrace::record(std::vector<Action> actions, const Clustering& clustering, FeedbackReport report,
                      std::size_t snapshot_cap) {
    TraceStep step;
    step.actions = std::move(actions);
    step.k = clustering.k;
    if (!steps.empty()) step.delta = diff_clustering(clustering_at(steps.size() - 1), clustering);
    // Step 0 is always kept so every later step can be rebuilt.
    if (steps.empty() || steps.size() < snapshot_cap) step.snapshot = clustering;
    const double value = report.aggregate;
    step.feedback = std::move(report);
    steps.push_back(std::move(step));

    if (steps.size() == 1) {
        sense = steps.front().feedback.sense;
        best_step_index = 0;
        best_evaluation = value;
        best = clustering;
    } else if (is_better(value, best_evaluation, sense)) {
        best_step_index = steps.size() - 1;
        best_evaluation = value;
        best = clustering;
    }
}

std::pair<Clustering, double> best_clustering(const RunTrace& trace) {
    if (trace.steps.empty()) throw Error("best_clustering: empty trace");
    return {trace.best, trace.best_evaluation};
}

namespace {

nlohmann::json action_json(const Action& action) {
    switch (action.kind) {
        case ActionKind::Init:
            return {{"type", "init"}};
        case ActionKind::Split:
            return {{"type", "split"}, {"cluster", action.first}};
        case ActionKind::Merge:
            return {{"type", "merge"}, {"clusters", {action.first, action.second}}};
    }
    return {};
}

Action action_from_json(const nlohmann::json& json) {
    const auto type = json.at("type").get<std::string>();
    if (type == "init") return Action::init();
    if (type == "split") return Action::split(json.at("cluster").get<int>());
    if (type == "merge") {
        const auto& ids = json.at("clusters");
        return Action::merge(ids.at(0).get<int>(), ids.at(1).get<int>());
    }
    throw Error("unknown trace action '" + type + "'");
}

}  // namespace

void write_trace_jsonl(const RunTrace& trace, std::ostream& out) {
    // Walk forward through deltas instead of calling clustering_at per step.
    Clustering current;
    for (std::size_t s = 0; s < trace.steps.size(); ++s) {
        const auto& step = trace.steps[s];
        current = step.snapshot ? *step.snapshot : apply_delta(std::move(current), step.delta);

        nlohmann::json actions = nlohmann::json::array();
        for (const auto& a : step.actions) actions.push_back(action_json(a));
        nlohmann::json centroids = nlohmann::json::array();
        for (Index c = 0; c < current.centroids.rows(); ++c) {
            std::vector<double> row(current.centroids.cols());
            for (Index j = 0; j < current.centroids.cols(); ++j) row[static_cast<std::size_t>(j)] = current.centroids(c, j);
            centroids.push_back(std::move(row));
        }
        nlohmann::json record{{"step", s},
                              {"action", to_string(step.actions)},
                              {"actions", std::move(actions)},
                              {"k", step.k},
                              {"per_cluster_feedback", step.feedback.per_cluster},
                              {"cluster_sizes", step.feedback.sizes},
                              {"aggregate", step.feedback.aggregate},
                              {"is_best", s == trace.best_step_index},
                              {"sense", to_string(trace.sense)},
                              {"method", trace.method},
                              {"feedback", trace.feedback},
                              {"seed", trace.seed},
                              {"stalled", trace.stalled && s + 1 == trace.steps.size()},
                              {"assignment", current.assignment},
                              {"centroids", std::move(centroids)}};
        out << record.dump() << '\n';
    }
}

std::vector<TraceRecord> read_trace_jsonl(std::istream& in) {
    std::vector<TraceRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto json = nlohmann::json::parse(line);
            TraceRecord r;
            r.step = json.at("step").get<std::size_t>();
            for (const auto& a : json.at("actions")) r.actions.push_back(action_from_json(a));
            r.k = json.at("k").get<int>();
            r.per_cluster = json.at("per_cluster_feedback").get<std::vector<double>>();
            r.sizes = json.at("cluster_sizes").get<std::vector<std::size_t>>();
            r.aggregate = json.at("aggregate").get<double>();
            r.is_best = json.at("is_best").get<bool>();
            r.sense = sense_from_string(json.at("sense").get<std::string>());
            r.method = json.value("method", "");
            r.feedback = json.value("feedback", "");
            r.stalled = json.value("stalled", false);
            r.clustering.assignment = json.at("assignment").get<Assignment>();
            const auto rows = json.at("centroids").get<std::vector<std::vector<double>>>();
            r.clustering.k = r.k;
            const auto cols = rows.empty() ? Index{0} : static_cast<Index>(rows.front().size());
            r.clustering.centroids.resize(static_cast<Index>(rows.size()), cols);
            for (std::size_t c = 0; c < rows.size(); ++c) {
                if (static_cast<Index>(rows[c].size()) != cols) throw Error("ragged centroid rows");
                for (Index j = 0; j < cols; ++j) r.clustering.centroids(static_cast<Index>(c), j) = rows[c][static_cast<std::size_t>(j)];
            }
            records.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw Error("trace line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

}  // namespace fbk
