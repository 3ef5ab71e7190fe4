#include "xlogo/emulator.hpp"

#include "xlogo/extract.hpp"

#include <algorithm>
#include <set>

namespace xlogo {

std::string_view to_string(CrashReason r) {
    switch (r) {
    case CrashReason::WallHit: return "WallHit";
    case CrashReason::ForbiddenCell: return "ForbiddenCell";
    case CrashReason::OutOfBounds: return "OutOfBounds";
    case CrashReason::StepLimit: return "StepLimit";
    }
    return {};
}

std::string_view to_string(FailureLabel l) {
    switch (l) {
    case FailureLabel::Success: return "Success";
    case FailureLabel::Repetition: return "Repetition";
    case FailureLabel::Format: return "Format";
    case FailureLabel::GridConstraints: return "GridConstraints";
    case FailureLabel::CodeConstraints: return "CodeConstraints";
    case FailureLabel::GoalNotAchieved: return "GoalNotAchieved";
    }
    return {};
}

int Trace::total_collected() const {
    int n = 0;
    for (const auto& [idx, count] : collected) n += count;
    return n;
}

namespace {

class Machine {
public:
    explicit Machine(const GridWorld& world) : world_(world) {
        walls_.insert(world.walls.begin(), world.walls.end());
        forbidden_.insert(world.forbidden.begin(), world.forbidden.end());
        for (std::size_t i = 0; i < world.items.size(); ++i) items_by_cell_.emplace(world.items[i].position, i);
        trace_.poses.push_back(world.turtle);
        enter(world.turtle.position);
    }

    // Returns false once the turtle has crashed.
    bool exec(const std::vector<Statement>& body) {
        for (const auto& s : body) {
            if (s.is_action()) {
                if (!apply(s.action())) return false;
            } else {
                for (int k = 0; k < s.loop().times; ++k) {
                    if (!exec(s.loop().body)) return false;
                }
            }
        }
        return true;
    }

    Trace take() { return std::move(trace_); }

    void crash_now(CrashReason reason) { trace_.crash = CrashInfo{reason, index_}; }

private:
    bool apply(const Command& c) {
        Pose pose = trace_.poses.back();
        switch (c.op) {
        case Command::Op::left: pose.direction = turn_left(pose.direction); break;
        case Command::Op::right: pose.direction = turn_right(pose.direction); break;
        case Command::Op::setpc: pen_ = c.color; break;
        case Command::Op::forward:
        case Command::Op::backward: {
            const Position from = pose.position;
            const Position to = step(from, pose.direction, c.op == Command::Op::forward ? 1 : -1);
            if (!world_.in_bounds(to)) {
                crash_now(CrashReason::OutOfBounds);
                return false;
            }
            if (walls_.count(Edge::between(from, to))) {
                crash_now(CrashReason::WallHit);
                return false;
            }
            if (forbidden_.count(to)) {
                crash_now(CrashReason::ForbiddenCell);
                return false;
            }
            pose.position = to;
            trace_.drawn.push_back({Edge::between(from, to), pen_});
            enter(to);
            break;
        }
        }
        trace_.poses.push_back(pose);
        ++index_;
        return true;
    }

    void enter(Position p) {
        if (!visited_.insert(p).second) return;
        auto [lo, hi] = items_by_cell_.equal_range(p);
        for (auto it = lo; it != hi; ++it) trace_.collected[it->second] += world_.items[it->second].count;
    }

    const GridWorld& world_;
    std::set<Edge> walls_;
    std::set<Position> forbidden_;
    std::multimap<Position, std::size_t> items_by_cell_;
    std::set<Position> visited_;
    Color pen_ = Color::black;
    std::size_t index_ = 0;
    Trace trace_;
};

std::vector<std::string> top_level_statements(const Program& p) {
    std::vector<std::string> out;
    for (const auto& s : p.body) out.push_back(print_program(Program{{s}}));
    return out;
}

std::vector<std::string> nonblank_lines(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view l = text.substr(start, end - start);
        while (!l.empty() && (l.front() == ' ' || l.front() == '\t')) l.remove_prefix(1);
        while (!l.empty() && (l.back() == ' ' || l.back() == '\t' || l.back() == '\r')) l.remove_suffix(1);
        if (!l.empty()) out.emplace_back(l);
        start = end + 1;
    }
    return out;
}

}  // namespace

Trace execute(const Program& program, const GridWorld& world) {
    Machine m(world);
    if (unrolled_length(program) > kMaxExecutedCommands) {
        m.crash_now(CrashReason::StepLimit);
        return m.take();
    }
    m.exec(program.body);
    return m.take();
}

std::vector<Segment> visible_segments(const Trace& trace) {
    std::map<Edge, Color> last;
    for (const auto& e : trace.drawn) last[e.edge] = e.color;
    std::vector<Segment> out;
    for (const auto& [edge, color] : last) {
        if (color != Color::white) out.push_back({edge, color});
    }
    return out;
}

bool evaluate_goal(const Trace& trace, const Goal& goal, const GridWorld& world) {
    if (!goal.avoid_colors.empty()) {
        for (const auto& pose : trace.poses) {
            auto it = world.cell_colors.find(pose.position);
            if (it != world.cell_colors.end() && goal.avoid_colors.count(it->second)) return false;
        }
    }
    switch (goal.kind) {
    case GoalKind::find: {
        const Position end = trace.final_pose().position;
        return std::any_of(world.items.begin(), world.items.end(),
                           [&](const Item& i) { return i.position == end && goal.matches(i); });
    }
    case GoalKind::collect_all:
        for (std::size_t i = 0; i < world.items.size(); ++i) {
            if (goal.matches(world.items[i]) && !trace.collected.count(i)) return false;
        }
        return true;
    case GoalKind::collect_exactly: {
        int total = 0;
        for (const auto& [idx, count] : trace.collected) {
            if (goal.matches(world.items[idx])) total += count;
        }
        return goal.target_count && total == *goal.target_count;
    }
    case GoalKind::draw: {
        std::vector<Segment> target;
        for (const auto& s : world.target_segments) target.push_back({Edge::between(s.edge.a, s.edge.b), s.color});
        std::sort(target.begin(), target.end());
        return visible_segments(trace) == target;
    }
    }
    return false;
}

Outcome run(const Task& task, const Program& program) {
    Outcome out;
    out.format_ok = true;
    out.constraint_report = check_constraints(program, task.constraints);
    Trace trace = execute(program, task.grid);
    out.crash = trace.crash;
    out.no_crash = !trace.crash;
    if (out.no_crash) {
        out.goal_achieved = evaluate_goal(trace, task.goal, task.grid);
        out.success = *out.goal_achieved && out.constraint_report->passed();
    }
    return out;
}

Outcome run(const Task& task, std::string_view code) {
    auto parsed = parse_program(code);
    if (!parsed) {
        Outcome out;
        out.format_error = parsed.error();
        return out;
    }
    return run(task, parsed.program());
}

bool has_repetition(const std::vector<std::string>& statements) {
    const std::size_t n = statements.size();
    const std::size_t min_k = kRepetitionBlockLength;
    for (std::size_t k = min_k; k * kRepetitionCount <= n; ++k) {
        // A block at s repeats kRepetitionCount times iff statements[i] ==
        // statements[i + k] for every i in [s, s + (count - 1) * k).
        const std::size_t need = (kRepetitionCount - 1) * k;
        std::size_t run = 0;
        for (std::size_t i = 0; i + k < n; ++i) {
            run = statements[i] == statements[i + k] ? run + 1 : 0;
            if (run >= need) return true;
        }
    }
    return false;
}

FailureLabel classify_failure(const Task& task, std::string_view raw_output) {
    const auto code = extract_code(raw_output);
    if (!code) {
        return has_repetition(nonblank_lines(raw_output)) ? FailureLabel::Repetition : FailureLabel::Format;
    }
    auto parsed = parse_program(*code);
    if (!parsed) {
        return has_repetition(nonblank_lines(*code)) ? FailureLabel::Repetition : FailureLabel::Format;
    }
    const Outcome outcome = run(task, parsed.program());
    if (outcome.success) return FailureLabel::Success;
    if (has_repetition(top_level_statements(parsed.program()))) return FailureLabel::Repetition;
    if (!outcome.no_crash) return FailureLabel::GridConstraints;
    if (outcome.goal_achieved.value_or(false)) return FailureLabel::CodeConstraints;
    return FailureLabel::GoalNotAchieved;
}

}  // namespace xlogo
