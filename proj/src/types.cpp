#include "xlogo/types.hpp"

#include "xlogo/dsl.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <memory>
#include <sstream>
#include <tuple>

namespace xlogo {

std::string_view to_string(Direction d) {
    switch (d) {
    case Direction::N: return "N";
    case Direction::E: return "E";
    case Direction::S: return "S";
    case Direction::W: return "W";
    }
    return {};
}

std::optional<Direction> parse_direction(std::string_view s) {
    if (s == "N") return Direction::N;
    if (s == "E") return Direction::E;
    if (s == "S") return Direction::S;
    if (s == "W") return Direction::W;
    return std::nullopt;
}

std::string_view to_string(Color c) {
    switch (c) {
    case Color::red: return "red";
    case Color::blue: return "blue";
    case Color::green: return "green";
    case Color::white: return "white";
    case Color::black: return "black";
    case Color::yellow: return "yellow";
    }
    return {};
}

std::optional<Color> parse_color(std::string_view s) {
    for (Color c : kAllColors) {
        if (to_string(c) == s) return c;
    }
    return std::nullopt;
}

std::string_view to_string(GoalKind k) {
    switch (k) {
    case GoalKind::find: return "find";
    case GoalKind::collect_all: return "collect_all";
    case GoalKind::collect_exactly: return "collect_exactly";
    case GoalKind::draw: return "draw";
    }
    return {};
}

std::optional<GoalKind> parse_goal_kind(std::string_view s) {
    for (GoalKind k : {GoalKind::find, GoalKind::collect_all, GoalKind::collect_exactly, GoalKind::draw}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

std::string_view to_string(ConstraintKind k) {
    switch (k) {
    case ConstraintKind::at_most: return "at_most";
    case ConstraintKind::exactly: return "exactly";
    case ConstraintKind::start_by: return "start_by";
    }
    return {};
}

std::optional<ConstraintKind> parse_constraint_kind(std::string_view s) {
    for (ConstraintKind k : {ConstraintKind::at_most, ConstraintKind::exactly, ConstraintKind::start_by}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

std::string_view to_string(TaskType t) {
    switch (t) {
    case TaskType::find: return "find";
    case TaskType::draw: return "draw";
    case TaskType::math: return "math";
    case TaskType::logic: return "logic";
    }
    return {};
}

std::optional<TaskType> parse_task_type(std::string_view s) {
    for (TaskType t : {TaskType::find, TaskType::draw, TaskType::math, TaskType::logic}) {
        if (to_string(t) == s) return t;
    }
    return std::nullopt;
}

int grid_size(const GridWorld& world) { return std::max(world.rows, world.cols); }

bool Goal::matches(const Item& item) const {
    if (target_kind && item.kind != *target_kind) return false;
    if (target_color && item.color != target_color) return false;
    return true;
}

namespace {

std::string cell(Position p) {
    std::ostringstream os;
    os << '(' << p.row << ',' << p.col << ')';
    return os.str();
}

template <typename T>
bool has_duplicates(std::vector<T> v) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) != v.end();
}

void validate_grid(const GridWorld& g, ValidationReport& out) {
    if (g.rows < 1 || g.cols < 1) {
        out.push_back("grid dimensions must be at least 1x1");
        return;
    }
    if (!g.in_bounds(g.turtle.position)) out.push_back("turtle out of bounds");
    if (std::find(g.forbidden.begin(), g.forbidden.end(), g.turtle.position) != g.forbidden.end()) {
        out.push_back("turtle on forbidden cell");
    }

    std::vector<std::tuple<Position, std::string, std::optional<std::string>, std::optional<Color>>> item_keys;
    for (const auto& item : g.items) {
        if (!g.in_bounds(item.position)) out.push_back("item out of bounds at " + cell(item.position));
        if (item.count < 1) out.push_back("item count must be >= 1 at " + cell(item.position));
        if (item.kind.empty()) out.push_back("item kind is empty at " + cell(item.position));
        if (item.shape && item.kind != "shape") out.push_back("shape given for non-shape item at " + cell(item.position));
        if (item.shape && std::find(std::begin(kShapeNames), std::end(kShapeNames), *item.shape) == std::end(kShapeNames)) {
            out.push_back("unknown shape '" + *item.shape + "'");
        }
        item_keys.emplace_back(item.position, item.kind, item.shape, item.color);
    }
    if (has_duplicates(item_keys)) out.push_back("duplicate item entry");

    for (const auto& [p, c] : g.cell_colors) {
        if (!g.in_bounds(p)) out.push_back("colored cell out of bounds at " + cell(p));
    }
    for (const auto& w : g.walls) {
        if (!g.in_bounds(w.a) || !g.in_bounds(w.b) || !adjacent(w.a, w.b)) {
            out.push_back("wall must join adjacent in-bounds cells: " + cell(w.a) + "-" + cell(w.b));
        }
    }
    std::vector<Edge> walls;
    for (const auto& w : g.walls) walls.push_back(Edge::between(w.a, w.b));
    if (has_duplicates(walls)) out.push_back("duplicate wall");

    for (const auto& p : g.forbidden) {
        if (!g.in_bounds(p)) out.push_back("forbidden cell out of bounds at " + cell(p));
    }
    if (has_duplicates(g.forbidden)) out.push_back("duplicate forbidden cell");

    std::vector<Edge> segs;
    for (const auto& s : g.target_segments) {
        if (!g.in_bounds(s.edge.a) || !g.in_bounds(s.edge.b) || !adjacent(s.edge.a, s.edge.b)) {
            out.push_back("target segment must join adjacent in-bounds cells");
        }
        if (s.color == Color::white) out.push_back("target segment cannot be white");
        segs.push_back(Edge::between(s.edge.a, s.edge.b));
    }
    if (has_duplicates(segs)) out.push_back("duplicate target segment");
}

void validate_goal(const Task& t, ValidationReport& out) {
    const Goal& goal = t.goal;
    const auto& items = t.grid.items;
    if (goal.kind != GoalKind::draw && !goal.target_kind) out.push_back("goal target kind missing");
    switch (goal.kind) {
    case GoalKind::find:
        if (goal.target_kind && std::none_of(items.begin(), items.end(), [&](const Item& i) { return goal.matches(i); })) {
            out.push_back("goal target absent");
        }
        break;
    case GoalKind::collect_all: break;
    case GoalKind::collect_exactly: {
        if (!goal.target_count || *goal.target_count < 1) {
            out.push_back("collect_exactly requires target_count >= 1");
            break;
        }
        int available = 0;
        for (const auto& i : items) {
            if (goal.matches(i)) available += i.count;
        }
        if (available < *goal.target_count) out.push_back("goal target count exceeds available items");
        break;
    }
    case GoalKind::draw:
        if (t.grid.target_segments.empty()) out.push_back("draw goal requires target segments");
        break;
    }
}

void validate_constraints(const Task& t, ValidationReport& out) {
    for (const auto& c : t.constraints) {
        if (c.kind == ConstraintKind::start_by) {
            if (c.prefix.empty()) out.push_back("start_by constraint requires a non-empty prefix");
            if (c.n) out.push_back("start_by constraint carries a count");
        } else {
            if (!c.n || *c.n < 1) out.push_back(std::string(to_string(c.kind)) + " constraint requires n >= 1");
            if (!c.prefix.empty()) out.push_back(std::string(to_string(c.kind)) + " constraint carries a prefix");
        }
    }
}

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
    }

    void update(std::string_view data) { EVP_DigestUpdate(ctx_.get(), data.data(), data.size()); }

    std::string hex() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_.get(), digest.data(), &len);
        static constexpr char kHex[] = "0123456789abcdef";
        std::string out;
        for (unsigned int i = 0; i < len; ++i) {
            out += kHex[digest[i] >> 4];
            out += kHex[digest[i] & 0xf];
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, void (*)(EVP_MD_CTX*)> ctx_;
};

std::string canonical_text(const TaskCodePair& pair) {
    const Task& t = pair.task;
    const GridWorld& g = t.grid;
    std::ostringstream os;
    os << "type=" << to_string(t.task_type) << '\n';
    os << "goal=" << to_string(t.goal.kind) << '|' << t.goal.target_kind.value_or("-") << '|'
       << (t.goal.target_color ? to_string(*t.goal.target_color) : "-") << '|'
       << (t.goal.target_count ? std::to_string(*t.goal.target_count) : "-") << '|';
    for (Color c : t.goal.avoid_colors) os << to_string(c) << ',';
    os << '\n';
    // Constraint order is semantically irrelevant (conjunction).
    std::vector<std::string> constraints;
    for (const auto& c : t.constraints) {
        std::string s(to_string(c.kind));
        if (c.n) s += ":" + std::to_string(*c.n);
        for (const auto& cmd : c.prefix) s += ":" + print_command(cmd);
        constraints.push_back(std::move(s));
    }
    std::sort(constraints.begin(), constraints.end());
    for (const auto& c : constraints) os << "constraint=" << c << '\n';

    os << "grid=" << g.rows << 'x' << g.cols << '\n';
    os << "turtle=" << cell(g.turtle.position) << to_string(g.turtle.direction) << '\n';
    auto items = g.items;
    std::sort(items.begin(), items.end());
    for (const auto& i : items) {
        os << "item=" << cell(i.position) << i.kind << '|' << i.shape.value_or("-") << '|'
           << (i.color ? to_string(*i.color) : "-") << '|' << i.count << '\n';
    }
    for (const auto& [p, c] : g.cell_colors) os << "color=" << cell(p) << to_string(c) << '\n';
    std::vector<Edge> walls;
    for (const auto& w : g.walls) walls.push_back(Edge::between(w.a, w.b));
    std::sort(walls.begin(), walls.end());
    for (const auto& w : walls) os << "wall=" << cell(w.a) << cell(w.b) << '\n';
    auto forbidden = g.forbidden;
    std::sort(forbidden.begin(), forbidden.end());
    for (const auto& p : forbidden) os << "forbidden=" << cell(p) << '\n';
    std::vector<Segment> segs;
    for (const auto& s : g.target_segments) segs.push_back({Edge::between(s.edge.a, s.edge.b), s.color});
    std::sort(segs.begin(), segs.end());
    for (const auto& s : segs) os << "segment=" << cell(s.edge.a) << cell(s.edge.b) << to_string(s.color) << '\n';

    os << "code=\n" << print_program(parse_program_or_throw(pair.code)) << '\n';
    return os.str();
}

}  // namespace

ValidationReport validate_task(const Task& task) {
    ValidationReport out;
    if (task.id.empty()) out.push_back("task id is empty");
    validate_grid(task.grid, out);
    validate_goal(task, out);
    validate_constraints(task, out);
    return out;
}

std::string canonical_hash(const TaskCodePair& pair) {
    Sha256 sha;
    sha.update(canonical_text(pair));
    return sha.hex();
}

}  // namespace xlogo
