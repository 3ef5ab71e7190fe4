#pragma once

// Shared fixtures, generators and reference oracles for the test binaries.
// The oracles are written from the rules alone and avoid the library's
// emulator, printer and counting code.

#include "xlogo/harness.hpp"
#include "xlogo/synth.hpp"

#include <algorithm>
#include <array>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace xt {

using namespace xlogo;

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(XLOGO_FIXTURE_DIR) / name; }

inline const std::vector<Record>& figure2() {
    static const std::vector<Record> records = load_dataset(fixture("figure2.jsonl")).records;
    return records;
}

inline const Record& figure2(const std::string& id) {
    for (const auto& r : figure2()) {
        if (r.task.id == id) return r;
    }
    throw std::runtime_error("no fixture " + id);
}

inline const std::vector<Record>& basic85() {
    static const std::vector<Record> records = load_dataset(fixture("basic85.jsonl")).records;
    return records;
}

// Task 87 solution written out statement by statement.
inline Program task87_program() {
    return Program{{action(Command::forward()), action(Command::right()), repeat(3, {action(Command::forward())}),
                    action(Command::right()), action(Command::forward())}};
}

// ---- random programs ----

inline Command random_command(Rng& rng, bool with_pen = true) {
    const auto k = uniform_below(rng, with_pen ? 5 : 4);
    switch (k) {
    case 0: return Command::forward();
    case 1: return Command::backward();
    case 2: return Command::left();
    case 3: return Command::right();
    default: return Command::setpc(kAllColors[uniform_below(rng, 6)]);
    }
}

inline std::vector<Statement> random_body(Rng& rng, int depth, int max_len, bool with_pen) {
    std::vector<Statement> out;
    const int n = uniform_int(rng, 1, max_len);
    for (int i = 0; i < n; ++i) {
        if (depth > 0 && bernoulli(rng, 0.2)) {
            out.push_back(repeat(uniform_int(rng, kMinRepeat, kMaxRepeat), random_body(rng, depth - 1, 3, with_pen)));
        } else {
            out.push_back(action(random_command(rng, with_pen)));
        }
    }
    return out;
}

inline Program random_program(Rng& rng, int max_depth = 2, int max_len = 8, bool with_pen = true) {
    if (bernoulli(rng, 0.02)) return Program{};
    return Program{random_body(rng, max_depth, max_len, with_pen)};
}

// ---- random worlds ----

inline GridWorld random_world(Rng& rng, int max_dim = 6) {
    GridWorld w;
    w.rows = uniform_int(rng, 1, max_dim);
    w.cols = uniform_int(rng, 1, max_dim);
    w.turtle.position = {uniform_int(rng, 0, w.rows - 1), uniform_int(rng, 0, w.cols - 1)};
    w.turtle.direction = static_cast<Direction>(uniform_below(rng, 4));
    for (int r = 0; r < w.rows; ++r) {
        for (int c = 0; c < w.cols; ++c) {
            const Position p{r, c};
            if (bernoulli(rng, 0.15)) {
                const Position q{r, c + 1};
                if (w.in_bounds(q)) w.walls.push_back(Edge::between(p, q));
            }
            if (bernoulli(rng, 0.15)) {
                const Position q{r + 1, c};
                if (w.in_bounds(q)) w.walls.push_back(Edge::between(p, q));
            }
            if (p != w.turtle.position && bernoulli(rng, 0.1)) {
                w.forbidden.push_back(p);
                continue;
            }
            if (bernoulli(rng, 0.2)) w.cell_colors[p] = kAllColors[uniform_below(rng, 6)];
            if (bernoulli(rng, 0.3)) w.items.push_back({p, "strawberry", std::nullopt, std::nullopt, uniform_int(rng, 1, 4)});
        }
    }
    return w;
}

// ---- reference interpreter ----

inline void oracle_unroll(const std::vector<Statement>& body, std::vector<Command>& out) {
    for (const auto& s : body) {
        if (const auto* c = std::get_if<Command>(&s.node)) {
            out.push_back(*c);
        } else {
            const auto& r = std::get<Repeat>(s.node);
            for (int k = 0; k < r.times; ++k) oracle_unroll(r.body, out);
        }
    }
}

inline std::vector<Command> oracle_flatten(const Program& p) {
    std::vector<Command> out;
    oracle_unroll(p.body, out);
    return out;
}

inline int oracle_count(const std::vector<Statement>& body) {
    int n = 0;
    for (const auto& s : body) n += s.is_action() ? 1 : 1 + oracle_count(s.loop().body);
    return n;
}

struct OracleRun {
    int row = 0, col = 0, heading = 0;  // heading: 0 N, 1 E, 2 S, 3 W
    bool crashed = false;
    std::size_t crash_index = 0;
    std::string crash_reason;
    std::vector<std::pair<int, int>> visited;                 // every position held, start included
    std::map<std::pair<std::pair<int, int>, std::pair<int, int>>, Color> paint;  // final pen colour per edge
    int collected = 0;
    std::map<std::size_t, int> collected_by_item;
};

inline OracleRun oracle_execute(const std::vector<Command>& cmds, const GridWorld& w) {
    static constexpr int dr[] = {-1, 0, 1, 0};
    static constexpr int dc[] = {0, 1, 0, -1};
    OracleRun o;
    o.row = w.turtle.position.row;
    o.col = w.turtle.position.col;
    o.heading = static_cast<int>(w.turtle.direction);
    Color pen = Color::black;
    std::set<std::pair<int, int>> entered;
    auto enter = [&](int r, int c) {
        o.visited.push_back({r, c});
        if (!entered.insert({r, c}).second) return;
        for (std::size_t i = 0; i < w.items.size(); ++i) {
            if (w.items[i].position.row == r && w.items[i].position.col == c) {
                o.collected += w.items[i].count;
                o.collected_by_item[i] += w.items[i].count;
            }
        }
    };
    enter(o.row, o.col);
    for (std::size_t i = 0; i < cmds.size(); ++i) {
        const Command& c = cmds[i];
        if (c.op == Command::Op::left) {
            o.heading = (o.heading + 3) % 4;
            o.visited.push_back({o.row, o.col});
        } else if (c.op == Command::Op::right) {
            o.heading = (o.heading + 1) % 4;
            o.visited.push_back({o.row, o.col});
        } else if (c.op == Command::Op::setpc) {
            pen = c.color;
            o.visited.push_back({o.row, o.col});
        } else {
            const int sign = c.op == Command::Op::forward ? 1 : -1;
            const int nr = o.row + sign * dr[o.heading], nc = o.col + sign * dc[o.heading];
            std::string why;
            if (nr < 0 || nc < 0 || nr >= w.rows || nc >= w.cols) {
                why = "OutOfBounds";
            } else {
                for (const auto& e : w.walls) {
                    const bool ab = e.a.row == o.row && e.a.col == o.col && e.b.row == nr && e.b.col == nc;
                    const bool ba = e.b.row == o.row && e.b.col == o.col && e.a.row == nr && e.a.col == nc;
                    if (ab || ba) why = "WallHit";
                }
                if (why.empty()) {
                    for (const auto& f : w.forbidden) {
                        if (f.row == nr && f.col == nc) why = "ForbiddenCell";
                    }
                }
            }
            if (!why.empty()) {
                o.crashed = true;
                o.crash_index = i;
                o.crash_reason = why;
                return o;
            }
            const std::pair<int, int> from{o.row, o.col}, to{nr, nc};
            o.paint[from < to ? std::pair{from, to} : std::pair{to, from}] = pen;
            o.row = nr;
            o.col = nc;
            enter(nr, nc);
        }
    }
    return o;
}

inline bool oracle_goal(const OracleRun& o, const Task& t) {
    const Goal& g = t.goal;
    const GridWorld& w = t.grid;
    for (const auto& [r, c] : o.visited) {
        auto it = w.cell_colors.find({r, c});
        if (it != w.cell_colors.end() && g.avoid_colors.count(it->second)) return false;
    }
    auto matches = [&](const Item& it) {
        return (!g.target_kind || it.kind == *g.target_kind) && (!g.target_color || it.color == g.target_color);
    };
    switch (g.kind) {
    case GoalKind::find:
        for (const auto& it : w.items) {
            if (it.position.row == o.row && it.position.col == o.col && matches(it)) return true;
        }
        return false;
    case GoalKind::collect_all:
        for (std::size_t i = 0; i < w.items.size(); ++i) {
            if (matches(w.items[i]) && !o.collected_by_item.count(i)) return false;
        }
        return true;
    case GoalKind::collect_exactly: {
        int total = 0;
        for (const auto& [i, n] : o.collected_by_item) {
            if (matches(w.items[i])) total += n;
        }
        return total == g.target_count.value_or(-1);
    }
    case GoalKind::draw: {
        std::set<std::tuple<int, int, int, int, Color>> want, got;
        for (const auto& s : w.target_segments) {
            std::pair<int, int> a{s.edge.a.row, s.edge.a.col}, b{s.edge.b.row, s.edge.b.col};
            if (b < a) std::swap(a, b);
            want.insert({a.first, a.second, b.first, b.second, s.color});
        }
        for (const auto& [edge, color] : o.paint) {
            if (color != Color::white) got.insert({edge.first.first, edge.first.second, edge.second.first, edge.second.second, color});
        }
        return want == got;
    }
    }
    return false;
}

// Constraint check for a loop-free program given as its command list.
inline bool oracle_constraints(const std::vector<Command>& cmds, const std::vector<CodeConstraint>& cs) {
    for (const auto& c : cs) {
        const int n = static_cast<int>(cmds.size());
        if (c.kind == ConstraintKind::at_most && n > *c.n) return false;
        if (c.kind == ConstraintKind::exactly && n != *c.n) return false;
        if (c.kind == ConstraintKind::start_by) {
            if (c.prefix.size() > cmds.size()) return false;
            for (std::size_t i = 0; i < c.prefix.size(); ++i) {
                if (!(c.prefix[i] == cmds[i])) return false;
            }
        }
    }
    return true;
}

inline bool oracle_success(const std::vector<Command>& cmds, const Task& t) {
    const OracleRun o = oracle_execute(cmds, t.grid);
    return !o.crashed && oracle_goal(o, t) && oracle_constraints(cmds, t.constraints);
}

// Surface text written by hand, independent of print_program.
inline std::string oracle_text(const std::vector<Command>& cmds) {
    std::string s = "def Run():\n";
    if (cmds.empty()) return s + "  pass\n";
    for (const auto& c : cmds) {
        switch (c.op) {
        case Command::Op::forward: s += "  move_forward()\n"; break;
        case Command::Op::backward: s += "  move_back()\n"; break;
        case Command::Op::left: s += "  turn_left()\n"; break;
        case Command::Op::right: s += "  turn_right()\n"; break;
        case Command::Op::setpc: s += "  setpc(\"" + std::string(to_string(c.color)) + "\")\n"; break;
        }
    }
    return s;
}

// Every sequence over the four movement actions of length 1..max_len.
inline std::vector<std::vector<Command>> all_action_sequences(int max_len) {
    const std::array<Command, 4> moves = {Command::forward(), Command::backward(), Command::left(), Command::right()};
    std::vector<std::vector<Command>> out, layer{{}};
    for (int len = 1; len <= max_len; ++len) {
        std::vector<std::vector<Command>> next;
        for (const auto& seq : layer) {
            for (const auto& m : moves) {
                auto s = seq;
                s.push_back(m);
                next.push_back(s);
            }
        }
        out.insert(out.end(), next.begin(), next.end());
        layer = std::move(next);
    }
    return out;
}

}  // namespace xt
