#include "xlogo/harness.hpp"

#include "xlogo/dsl.hpp"
#include "xlogo/extract.hpp"

#include <atomic>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace xlogo {

using nlohmann::json;

namespace {

TaskResult evaluate_one(const Record& record, const Prediction* prediction) {
    TaskResult r;
    r.task_id = record.task.id;
    if (!prediction) return r;
    r.has_prediction = true;
    if (auto code = extract_code(prediction->raw_output)) r.outcome = run(record.task, *code);
    r.label = classify_failure(record.task, prediction->raw_output);
    return r;
}

const Program& solution(const Record& record, std::optional<Program>& storage) {
    if (!record.code) throw DataError("task '" + record.task.id + "' has no solution code for this breakdown");
    auto parsed = parse_program(*record.code);
    if (!parsed) throw DataError("task '" + record.task.id + "': solution code does not parse: " + parsed.error().message());
    storage = parsed.program();
    return *storage;
}

std::string constraint_category(const std::vector<CodeConstraint>& cs) {
    if (cs.empty()) return "None";
    if (cs.size() > 1) return "Hybrid";
    switch (cs.front().kind) {
    case ConstraintKind::at_most: return "AtMost";
    case ConstraintKind::exactly: return "Exactly";
    case ConstraintKind::start_by: return "StartBy";
    }
    return "None";
}

std::string task_type_label(TaskType t) {
    switch (t) {
    case TaskType::find: return "Find";
    case TaskType::draw: return "Draw";
    case TaskType::math: return "Math";
    case TaskType::logic: return "Logic";
    }
    return {};
}

std::string length_label(int n) {
    if (n >= 1 && n <= 5) return "Short (1-5)";
    if (n >= 6 && n <= 10) return "Medium (6-10)";
    if (n >= 11 && n <= 17) return "Long (11-17)";
    return "Other";
}

std::string grid_label(int size) {
    if (size <= 3) return "Size <= 3";
    if (size >= 7) return "Size >= 7";
    return "Size = " + std::to_string(size);
}

}  // namespace

MetricsReport evaluate_predictions(const std::vector<Record>& dataset, const std::vector<Prediction>& predictions,
                                   unsigned threads) {
    std::unordered_map<std::string, std::size_t> task_index;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (!task_index.emplace(dataset[i].task.id, i).second) {
            throw DataError("duplicate task id '" + dataset[i].task.id + "' in dataset");
        }
    }
    std::vector<const Prediction*> by_task(dataset.size(), nullptr);
    for (const auto& p : predictions) {
        auto it = task_index.find(p.task_id);
        if (it == task_index.end()) throw DataError("prediction for unknown task id '" + p.task_id + "'");
        if (by_task[it->second]) throw DataError("duplicate prediction for task id '" + p.task_id + "'");
        by_task[it->second] = &p;
    }

    MetricsReport report;
    report.n = dataset.size();
    report.per_task.resize(dataset.size());
    const unsigned workers = std::max(1u, threads ? threads : std::thread::hardware_concurrency());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < dataset.size(); i = next++) report.per_task[i] = evaluate_one(dataset[i], by_task[i]);
    };
    if (workers == 1 || dataset.size() < 64) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    std::size_t format = 0, no_crash = 0, success = 0;
    for (const auto& r : report.per_task) {
        format += r.outcome.format_ok;
        no_crash += r.outcome.no_crash;
        success += r.outcome.success;
    }
    if (report.n > 0) {
        const auto n = static_cast<double>(report.n);
        report.format_rate = static_cast<double>(format) / n;
        report.no_crash_rate = static_cast<double>(no_crash) / n;
        report.success_rate = static_cast<double>(success) / n;
    }
    return report;
}

json report_to_json(const MetricsReport& report) {
    json per_task = json::array();
    for (const auto& r : report.per_task) {
        json entry = {{"id", r.task_id},
                      {"format", r.outcome.format_ok},
                      {"no_crash", r.outcome.no_crash},
                      {"success", r.outcome.success},
                      {"failure_label", to_string(r.label)}};
        if (!r.has_prediction) entry["missing"] = true;
        per_task.push_back(std::move(entry));
    }
    return {{"n", report.n},
            {"format_rate", report.format_rate},
            {"no_crash_rate", report.no_crash_rate},
            {"success_rate", report.success_rate},
            {"per_task", std::move(per_task)}};
}

std::vector<std::string> breakdown_labels(std::string_view dimension) {
    if (dimension == "task_type") return {"Find", "Draw", "Math", "Logic"};
    if (dimension == "code_constraints") return {"None", "AtMost", "Exactly", "StartBy", "Hybrid"};
    if (dimension == "code_concepts") {
        std::vector<std::string> out;
        for (ConceptClass c : {ConceptClass::BasicActions, ConceptClass::Loops, ConceptClass::Variables,
                               ConceptClass::LoopsAndVariables}) {
            out.emplace_back(display_name(c));
        }
        return out;
    }
    if (dimension == "code_length") return {"Short (1-5)", "Medium (6-10)", "Long (11-17)"};
    if (dimension == "grid_size") return {"Size <= 3", "Size = 4", "Size = 5", "Size = 6", "Size >= 7"};
    throw UsageError("unknown breakdown dimension '" + std::string(dimension) +
                     "' (expected task_type, code_constraints, code_concepts, code_length or grid_size)");
}

std::string breakdown_label(const Record& record, std::string_view dimension) {
    std::optional<Program> storage;
    if (dimension == "task_type") return task_type_label(record.task.task_type);
    if (dimension == "code_constraints") return constraint_category(record.task.constraints);
    if (dimension == "code_concepts") return std::string(display_name(classify_concepts(solution(record, storage))));
    if (dimension == "code_length") return length_label(count_commands(solution(record, storage)));
    if (dimension == "grid_size") return grid_label(grid_size(record.task.grid));
    breakdown_labels(dimension);  // throws for unknown dimensions
    return {};
}

BreakdownTable breakdown(const std::vector<Record>& dataset, const MetricsReport& report, std::string_view dimension) {
    if (report.per_task.size() != dataset.size()) throw DataError("report does not match dataset size");
    BreakdownTable table;
    table.dimension = std::string(dimension);
    for (const auto& label : breakdown_labels(dimension)) table.groups.push_back({label, 0, 0});
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (report.per_task[i].task_id != dataset[i].task.id) throw DataError("report does not match dataset order");
        const std::string label = breakdown_label(dataset[i], dimension);
        auto it = std::find_if(table.groups.begin(), table.groups.end(), [&](const BreakdownGroup& g) { return g.label == label; });
        if (it == table.groups.end()) {
            table.groups.push_back({label, 0, 0});
            it = table.groups.end() - 1;
        }
        ++it->n;
        it->successes += report.per_task[i].outcome.success;
    }
    return table;
}

json breakdown_to_json(const BreakdownTable& table) {
    json groups = json::array();
    for (const auto& g : table.groups) {
        groups.push_back({{"label", g.label}, {"n", g.n}, {"successes", g.successes}, {"success_rate", g.success_rate()}});
    }
    return {{"dimension", table.dimension}, {"groups", std::move(groups)}};
}

std::string format_breakdown(const BreakdownTable& table) {
    std::size_t width = table.dimension.size();
    for (const auto& g : table.groups) width = std::max(width, g.label.size());
    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(width)) << table.dimension << "  " << std::right << std::setw(6) << "n"
        << "  " << std::setw(8) << "success" << "\n";
    std::size_t total = 0;
    for (const auto& g : table.groups) {
        out << std::left << std::setw(static_cast<int>(width)) << g.label << "  " << std::right << std::setw(6) << g.n << "  "
            << std::setw(7) << std::fixed << std::setprecision(2) << 100.0 * g.success_rate() << "%\n";
        total += g.n;
    }
    out << std::left << std::setw(static_cast<int>(width)) << "Total" << "  " << std::right << std::setw(6) << total << "\n";
    return out.str();
}

}  // namespace xlogo
