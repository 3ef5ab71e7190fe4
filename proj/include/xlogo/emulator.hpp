#pragma once

// Deterministic execution of DSL programs on grid worlds and the
// Format / No-Crash / Success verdict built on top of it.

#include "xlogo/dsl.hpp"
#include "xlogo/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xlogo {

enum class CrashReason : std::uint8_t { WallHit, ForbiddenCell, OutOfBounds, StepLimit };

std::string_view to_string(CrashReason r);

struct CrashInfo {
    CrashReason reason = CrashReason::OutOfBounds;
    std::size_t at_command_index = 0;  // into the flattened command sequence

    bool operator==(const CrashInfo&) const = default;
};

struct DrawEvent {
    Edge edge;
    Color color = Color::black;

    bool operator==(const DrawEvent&) const = default;
};

struct Trace {
    std::vector<Pose> poses;               // start pose, then one per executed command
    std::map<std::size_t, int> collected;  // world item index -> count collected
    std::vector<DrawEvent> drawn;          // in execution order
    std::optional<CrashInfo> crash;

    const Pose& final_pose() const { return poses.back(); }
    int total_collected() const;
};

// Programs whose unrolled length exceeds this stop with CrashReason::StepLimit.
inline constexpr std::uint64_t kMaxExecutedCommands = 1'000'000;

// The world is expected to validate. Pen colour starts black.
Trace execute(const Program& program, const GridWorld& world);

// Final colour per edge, white (erased/invisible) segments dropped.
std::vector<Segment> visible_segments(const Trace& trace);

// Callers gate on trace.crash being empty.
bool evaluate_goal(const Trace& trace, const Goal& goal, const GridWorld& world);

struct Outcome {
    bool format_ok = false;
    bool no_crash = false;
    bool success = false;
    std::optional<FormatError> format_error;
    std::optional<ConstraintReport> constraint_report;
    std::optional<CrashInfo> crash;
    std::optional<bool> goal_achieved;
};

Outcome run(const Task& task, std::string_view code);
Outcome run(const Task& task, const Program& program);

enum class FailureLabel : std::uint8_t { Success, Repetition, Format, GridConstraints, CodeConstraints, GoalNotAchieved };

std::string_view to_string(FailureLabel l);

inline constexpr int kRepetitionBlockLength = 4;
inline constexpr int kRepetitionCount = 3;

// True when `statements` contains kRepetitionCount consecutive copies of some
// block of at least kRepetitionBlockLength entries.
bool has_repetition(const std::vector<std::string>& statements);

FailureLabel classify_failure(const Task& task, std::string_view raw_output);

}  // namespace xlogo
