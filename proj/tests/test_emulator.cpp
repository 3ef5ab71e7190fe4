#include "support.hpp"

#include <doctest.h>

using namespace xt;

namespace {

GridWorld open_grid(int rows, int cols, Pose turtle) {
    GridWorld w;
    w.rows = rows;
    w.cols = cols;
    w.turtle = turtle;
    return w;
}

bool naive_repetition(const std::vector<std::string>& s) {
    const std::size_t n = s.size();
    for (std::size_t k = 4; 3 * k <= n; ++k) {
        for (std::size_t start = 0; start + 3 * k <= n; ++start) {
            bool same = true;
            for (std::size_t i = 0; i < k && same; ++i) {
                same = s[start + i] == s[start + k + i] && s[start + i] == s[start + 2 * k + i];
            }
            if (same) return true;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("single move on an open grid") {
    const GridWorld w = open_grid(1, 2, {{0, 0}, Direction::E});
    const Trace t = execute(Program{{action(Command::forward())}}, w);
    CHECK_FALSE(t.crash);
    REQUIRE(t.poses.size() == 2);
    CHECK(t.final_pose().position == Position{0, 1});
}

TEST_CASE("crash reasons and indices") {
    SUBCASE("out of bounds") {
        const Trace t = execute(Program{{action(Command::forward())}}, open_grid(1, 2, {{0, 1}, Direction::E}));
        REQUIRE(t.crash);
        CHECK(t.crash->reason == CrashReason::OutOfBounds);
        CHECK(t.crash->at_command_index == 0);
        CHECK(t.poses.size() == 1);
    }
    SUBCASE("wall") {
        GridWorld w = open_grid(3, 3, {{2, 0}, Direction::N});
        w.walls.push_back(Edge::between({1, 1}, {1, 2}));
        const Program p{{action(Command::forward()), action(Command::right()), action(Command::forward()),
                         action(Command::forward())}};
        const Trace t = execute(p, w);
        REQUIRE(t.crash);
        CHECK(t.crash->reason == CrashReason::WallHit);
        CHECK(t.crash->at_command_index == 3);
        CHECK(t.poses.size() == 4);
    }
    SUBCASE("forbidden cell, index counts unrolled commands") {
        GridWorld w = open_grid(1, 5, {{0, 0}, Direction::E});
        w.forbidden.push_back({0, 3});
        const Trace t = execute(Program{{repeat(4, {action(Command::forward())})}}, w);
        REQUIRE(t.crash);
        CHECK(t.crash->reason == CrashReason::ForbiddenCell);
        CHECK(t.crash->at_command_index == 2);
    }
    SUBCASE("step limit") {
        Statement s = action(Command::left());
        for (int i = 0; i < 7; ++i) s = repeat(10, {s});
        const Trace t = execute(Program{{s}}, open_grid(1, 1, {}));
        REQUIRE(t.crash);
        CHECK(t.crash->reason == CrashReason::StepLimit);
    }
}

TEST_CASE("task 28 trace visits both red shapes and no green cell") {
    const Record& r = figure2("task-28");
    const Trace t = execute(parse_program_or_throw(*r.code), r.task.grid);
    REQUIRE_FALSE(t.crash);
    std::set<Position> visited;
    for (const auto& p : t.poses) visited.insert(p.position);
    for (const auto& item : r.task.grid.items) {
        if (item.color == Color::red) CHECK(visited.count(item.position));
    }
    for (const auto& [cell, color] : r.task.grid.cell_colors) {
        if (color == Color::green) CHECK_FALSE(visited.count(cell));
    }
}

TEST_CASE("goal evaluation examples") {
    SUBCASE("task 38 collects exactly ten") {
        const Record& r = figure2("task-38");
        const Trace t = execute(parse_program_or_throw(*r.code), r.task.grid);
        int strawberries = 0;
        for (const auto& [idx, n] : t.collected) {
            if (r.task.grid.items[idx].kind == "strawberry") strawberries += n;
        }
        CHECK(strawberries == 10);
        CHECK(evaluate_goal(t, r.task.goal, r.task.grid));
    }
    SUBCASE("task 73 white moves stay invisible") {
        const Record& r = figure2("task-73");
        const Trace t = execute(parse_program_or_throw(*r.code), r.task.grid);
        CHECK(evaluate_goal(t, r.task.goal, r.task.grid));
        const auto segs = visible_segments(t);
        CHECK(segs.size() == 4);
        for (const auto& s : segs) CHECK(s.color == Color::green);
        std::size_t white = 0;
        for (const auto& e : t.drawn) white += e.color == Color::white;
        CHECK(white == 8);
    }
    SUBCASE("vacuous collect_all") {
        const GridWorld w = open_grid(2, 2, {});
        Goal g;
        g.kind = GoalKind::collect_all;
        g.target_kind = "shape";
        g.target_color = Color::red;
        CHECK(evaluate_goal(execute(Program{}, w), g, w));
    }
    SUBCASE("items at the start cell are collected") {
        GridWorld w = open_grid(1, 2, {{0, 0}, Direction::E});
        w.items.push_back({{0, 0}, "strawberry", std::nullopt, std::nullopt, 2});
        w.items.push_back({{0, 1}, "strawberry", std::nullopt, std::nullopt, 3});
        const Trace t = execute(Program{{action(Command::forward()), action(Command::backward()), action(Command::forward())}}, w);
        CHECK(t.total_collected() == 5);
    }
    SUBCASE("last colour on a segment wins") {
        GridWorld w = open_grid(1, 2, {{0, 0}, Direction::E});
        const Program p{{action(Command::setpc(Color::red)), action(Command::forward()), action(Command::setpc(Color::blue)),
                         action(Command::backward())}};
        const auto segs = visible_segments(execute(p, w));
        REQUIRE(segs.size() == 1);
        CHECK(segs[0].color == Color::blue);
    }
    SUBCASE("avoid colours include the start cell") {
        GridWorld w = open_grid(1, 2, {{0, 0}, Direction::E});
        w.items.push_back({{0, 1}, "strawberry", std::nullopt, std::nullopt, 1});
        w.cell_colors[{0, 0}] = Color::green;
        Goal g;
        g.target_kind = "strawberry";
        g.avoid_colors = {Color::green};
        CHECK_FALSE(evaluate_goal(execute(Program{{action(Command::forward())}}, w), g, w));
    }
}

TEST_CASE("outcomes") {
    for (const auto& r : figure2()) {
        CAPTURE(r.task.id);
        const Outcome o = run(r.task, *r.code);
        CHECK(o.format_ok);
        CHECK(o.no_crash);
        CHECK(o.success);
    }
    const Task& t87 = figure2("task-87").task;
    const Outcome bad = run(t87, "def Run():\n  jump()");
    CHECK_FALSE(bad.format_ok);
    CHECK_FALSE(bad.success);
    REQUIRE(bad.format_error);

    const std::string unrolled = oracle_text(flatten_actions(task87_program()));
    const Outcome seven = run(t87, unrolled);
    CHECK(seven.no_crash);
    CHECK(seven.goal_achieved == std::optional<bool>(true));
    CHECK_FALSE(seven.success);
}

TEST_CASE("failure labels") {
    Task t = figure2("task-87").task;
    std::string forty = "def Run():\n";
    for (int i = 0; i < 40; ++i) forty += "  move_forward()\n";
    CHECK(classify_failure(t, forty) == FailureLabel::Repetition);

    CHECK(classify_failure(t, *figure2("task-87").code) == FailureLabel::Success);
    CHECK(classify_failure(t, "No idea.") == FailureLabel::Format);
    CHECK(classify_failure(t, "def Run():\n  move_forward()") == FailureLabel::GoalNotAchieved);

    Task walled = t;
    walled.grid.walls.push_back(Edge::between({2, 0}, {1, 0}));
    CHECK(classify_failure(walled, "I think the answer is:\n```\ndef Run():\n  move_forward()\n```") ==
          FailureLabel::GridConstraints);

    Task exact = t;
    exact.constraints = {CodeConstraint::exactly(6)};
    auto eight = flatten_actions(task87_program());
    eight.push_back(Command::left());
    CHECK(classify_failure(exact, oracle_text(eight)) == FailureLabel::CodeConstraints);
}

TEST_CASE("repetition matches a naive scan") {
    Rng rng = derive_rng(3, 3);
    const std::vector<std::string> alphabet = {"a", "b", "c"};
    for (int i = 0; i < 3000; ++i) {
        std::vector<std::string> s(uniform_below(rng, 30));
        for (auto& x : s) x = pick(alphabet, rng);
        CAPTURE(i);
        CHECK(has_repetition(s) == naive_repetition(s));
    }
    CHECK(has_repetition({"a", "b", "c", "d", "a", "b", "c", "d", "a", "b", "c", "d"}));
    CHECK_FALSE(has_repetition({"a", "b", "c", "d", "a", "b", "c", "d", "a", "b", "c"}));
}

TEST_CASE("emulator agrees with the reference interpreter") {
    Rng rng = derive_rng(11, 4);
    for (int i = 0; i < 3000; ++i) {
        const GridWorld w = random_world(rng);
        const Program p = random_program(rng, 2, 6);
        const Trace t = execute(p, w);
        const OracleRun o = oracle_execute(oracle_flatten(p), w);
        CAPTURE(i);
        REQUIRE(t.crash.has_value() == o.crashed);
        if (o.crashed) {
            CHECK(t.crash->at_command_index == o.crash_index);
            CHECK(to_string(t.crash->reason) == o.crash_reason);
        }
        CHECK(t.final_pose().position == Position{o.row, o.col});
        CHECK(static_cast<int>(t.final_pose().direction) == o.heading);
        CHECK(t.total_collected() == o.collected);
        std::size_t visible = 0;
        for (const auto& [edge, color] : o.paint) visible += color != Color::white;
        CHECK(visible_segments(t).size() == visible);
    }
}
