#pragma once

// Domain types shared by every xlogo module: grid worlds, goals, code
// constraints and tasks. All of them are plain values.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace xlogo {

// Error classes map one-to-one onto the CLI / C API status codes.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ExternalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Direction : std::uint8_t { N, E, S, W };

constexpr Direction turn_left(Direction d) {
    switch (d) {
    case Direction::N: return Direction::W;
    case Direction::W: return Direction::S;
    case Direction::S: return Direction::E;
    case Direction::E: return Direction::N;
    }
    return d;
}

constexpr Direction turn_right(Direction d) {
    switch (d) {
    case Direction::N: return Direction::E;
    case Direction::E: return Direction::S;
    case Direction::S: return Direction::W;
    case Direction::W: return Direction::N;
    }
    return d;
}

// Row 0 is the top row, so north decreases the row index.
constexpr int row_delta(Direction d) { return d == Direction::N ? -1 : d == Direction::S ? 1 : 0; }
constexpr int col_delta(Direction d) { return d == Direction::E ? 1 : d == Direction::W ? -1 : 0; }

std::string_view to_string(Direction d);
std::optional<Direction> parse_direction(std::string_view s);

struct Position {
    int row = 0;
    int col = 0;

    auto operator<=>(const Position&) const = default;
};

constexpr bool adjacent(Position a, Position b) {
    const int dr = a.row > b.row ? a.row - b.row : b.row - a.row;
    const int dc = a.col > b.col ? a.col - b.col : b.col - a.col;
    return dr + dc == 1;
}

constexpr Position step(Position p, Direction d, int sign = 1) {
    return {p.row + sign * row_delta(d), p.col + sign * col_delta(d)};
}

struct Pose {
    Position position;
    Direction direction = Direction::N;

    auto operator<=>(const Pose&) const = default;
};

enum class Color : std::uint8_t { red, blue, green, white, black, yellow };

inline constexpr Color kAllColors[] = {Color::red,   Color::blue,  Color::green,
                                       Color::white, Color::black, Color::yellow};

std::string_view to_string(Color c);
std::optional<Color> parse_color(std::string_view s);

struct Item {
    Position position;
    std::string kind;
    std::optional<std::string> shape;
    std::optional<Color> color;
    int count = 1;

    auto operator<=>(const Item&) const = default;
};

inline constexpr std::string_view kShapeNames[] = {"triangle", "rectangle", "circle", "cross"};

// Unordered pair of orthogonally adjacent cells, stored smaller-first.
struct Edge {
    Position a;
    Position b;

    static Edge between(Position p, Position q) { return p < q ? Edge{p, q} : Edge{q, p}; }

    auto operator<=>(const Edge&) const = default;
};

struct Segment {
    Edge edge;
    Color color = Color::black;

    auto operator<=>(const Segment&) const = default;
};

struct GridWorld {
    int rows = 1;
    int cols = 1;
    Pose turtle;
    std::vector<Item> items;
    std::map<Position, Color> cell_colors;
    std::vector<Edge> walls;
    std::vector<Position> forbidden;
    std::vector<Segment> target_segments;

    bool in_bounds(Position p) const { return p.row >= 0 && p.col >= 0 && p.row < rows && p.col < cols; }

    bool operator==(const GridWorld&) const = default;
};

int grid_size(const GridWorld& world);

enum class GoalKind : std::uint8_t { find, collect_all, collect_exactly, draw };

std::string_view to_string(GoalKind k);
std::optional<GoalKind> parse_goal_kind(std::string_view s);

struct Goal {
    GoalKind kind = GoalKind::find;
    std::optional<std::string> target_kind;
    std::optional<Color> target_color;
    std::optional<int> target_count;
    std::set<Color> avoid_colors;

    // True when an item satisfies the kind/color filter of this goal.
    bool matches(const Item& item) const;

    bool operator==(const Goal&) const = default;
};

// One DSL action. `color` is meaningful only for setpc.
struct Command {
    enum class Op : std::uint8_t { forward, backward, left, right, setpc };

    Op op = Op::forward;
    Color color = Color::black;

    static Command forward() { return {Op::forward, Color::black}; }
    static Command backward() { return {Op::backward, Color::black}; }
    static Command left() { return {Op::left, Color::black}; }
    static Command right() { return {Op::right, Color::black}; }
    static Command setpc(Color c) { return {Op::setpc, c}; }

    bool operator==(const Command& o) const { return op == o.op && (op != Op::setpc || color == o.color); }
};

enum class ConstraintKind : std::uint8_t { at_most, exactly, start_by };

std::string_view to_string(ConstraintKind k);
std::optional<ConstraintKind> parse_constraint_kind(std::string_view s);

struct CodeConstraint {
    ConstraintKind kind = ConstraintKind::at_most;
    std::optional<int> n;
    std::vector<Command> prefix;

    static CodeConstraint at_most(int n) { return {ConstraintKind::at_most, n, {}}; }
    static CodeConstraint exactly(int n) { return {ConstraintKind::exactly, n, {}}; }
    static CodeConstraint start_by(std::vector<Command> p) { return {ConstraintKind::start_by, std::nullopt, std::move(p)}; }

    bool operator==(const CodeConstraint&) const = default;
};

enum class TaskType : std::uint8_t { find, draw, math, logic };

std::string_view to_string(TaskType t);
std::optional<TaskType> parse_task_type(std::string_view s);

struct Task {
    std::string id;
    TaskType task_type = TaskType::find;
    Goal goal;
    std::vector<CodeConstraint> constraints;
    GridWorld grid;

    bool operator==(const Task&) const = default;
};

struct TaskCodePair {
    Task task;
    std::string code;

    bool operator==(const TaskCodePair&) const = default;
};

// Empty means well-formed.
using ValidationReport = std::vector<std::string>;

ValidationReport validate_task(const Task& task);

// SHA-256 over a canonical rendering of the task content and the code's
// canonical print. Ids and container order do not contribute.
// Throws DataError when the code does not parse.
std::string canonical_hash(const TaskCodePair& pair);

}  // namespace xlogo
