#pragma once

// Dataset I/O, prompt rendering, metric computation and per-dimension
// breakdowns over model predictions.

#include "xlogo/emulator.hpp"
#include "xlogo/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xlogo {

// One JSONL line: a task, optionally with its solution code. Unknown
// top-level fields are kept in `extra` and written back on save.
struct Record {
    Task task;
    std::optional<std::string> code;
    nlohmann::json extra = nlohmann::json::object();

    TaskCodePair pair() const;
};

struct Dataset {
    std::vector<Record> records;
    std::vector<std::string> warnings;
};

nlohmann::json task_to_json(const Task& task);
nlohmann::json record_to_json(const Record& record);

// Throws DataError describing the first schema problem. Unknown fields are
// reported through `warnings`.
Record record_from_json(const nlohmann::json& j, std::vector<std::string>* warnings = nullptr);

// Parses JSONL text (or a single JSON object spanning several lines).
// Records failing validate_task are rejected with the offending line number.
Dataset parse_dataset(std::string_view text);
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const std::vector<Record>& records, const std::filesystem::path& path);
std::string dump_dataset(const std::vector<Record>& records);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

enum class PromptStyle : std::uint8_t { NL, ASCII };

std::optional<PromptStyle> parse_prompt_style(std::string_view s);

std::string render_prompt(const Task& task, PromptStyle style);

// The goal line shown to models, e.g. "Find the strawberry with just 6 commands."
std::string describe_goal(const Task& task);

std::string render_ascii_grid(const GridWorld& world);

struct Prediction {
    std::string task_id;
    std::string raw_output;
};

std::vector<Prediction> parse_predictions(std::string_view jsonl);
std::vector<Prediction> load_predictions(const std::filesystem::path& path);
void save_predictions(const std::vector<Prediction>& predictions, const std::filesystem::path& path);

struct TaskResult {
    std::string task_id;
    bool has_prediction = false;
    Outcome outcome;
    FailureLabel label = FailureLabel::Format;
};

struct MetricsReport {
    std::size_t n = 0;
    double format_rate = 0.0;
    double no_crash_rate = 0.0;
    double success_rate = 0.0;
    std::vector<TaskResult> per_task;  // dataset order
};

// Tasks without a prediction count as failing all three metrics. Throws
// DataError on duplicate or unknown prediction ids.
MetricsReport evaluate_predictions(const std::vector<Record>& dataset, const std::vector<Prediction>& predictions,
                                   unsigned threads = 0);

nlohmann::json report_to_json(const MetricsReport& report);

struct BreakdownGroup {
    std::string label;
    std::size_t n = 0;
    std::size_t successes = 0;

    double success_rate() const { return n ? static_cast<double>(successes) / static_cast<double>(n) : 0.0; }
};

struct BreakdownTable {
    std::string dimension;
    std::vector<BreakdownGroup> groups;
};

inline constexpr std::string_view kBreakdownDimensions[] = {"task_type", "code_constraints", "code_concepts",
                                                           "code_length", "grid_size"};

// Group label of one record along a dimension. Throws UsageError for an
// unknown dimension and DataError when a code-based dimension lacks code.
std::string breakdown_label(const Record& record, std::string_view dimension);

// Canonical group labels in display order.
std::vector<std::string> breakdown_labels(std::string_view dimension);

BreakdownTable breakdown(const std::vector<Record>& dataset, const MetricsReport& report, std::string_view dimension);

nlohmann::json breakdown_to_json(const BreakdownTable& table);
std::string format_breakdown(const BreakdownTable& table);

}  // namespace xlogo
