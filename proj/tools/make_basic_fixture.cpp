// Generates an 85-task dataset whose task-type, constraint, concept, length
// and grid-size marginals follow the real-world benchmark table:
//   make_basic_fixture OUT.jsonl [SEED]

#include "xlogo/harness.hpp"
#include "xlogo/synth.hpp"

#include <iostream>

using namespace xlogo;

namespace {

template <typename T>
std::vector<T> expand(std::initializer_list<std::pair<T, int>> counts) {
    std::vector<T> out;
    for (const auto& [value, n] : counts) out.insert(out.end(), static_cast<std::size_t>(n), value);
    return out;
}

Command random_move(Rng& rng) {
    switch (uniform_below(rng, 7)) {
    case 0:
    case 1:
    case 2: return Command::forward();
    case 3: return Command::backward();
    case 4:
    case 5: return Command::left();
    default: return Command::right();
    }
}

Command random_pen(Rng& rng) {
    static const std::vector<Color> inks = {Color::red, Color::blue, Color::green, Color::yellow, Color::black};
    return Command::setpc(pick(inks, rng));
}

// A program with exactly `length` written commands in the given concept class.
Program random_program(int length, ConceptClass cls, bool leading_action, Rng& rng) {
    const bool loops = cls == ConceptClass::Loops || cls == ConceptClass::LoopsAndVariables;
    const bool vars = cls == ConceptClass::Variables || cls == ConceptClass::LoopsAndVariables;
    std::vector<Statement> body;
    int budget = length;
    std::optional<Repeat> loop;
    if (loops) {
        const int body_len = uniform_int(rng, 1, std::max(1, std::min(4, budget - 1 - (vars ? 1 : 0) - (leading_action ? 1 : 0))));
        Repeat r{uniform_int(rng, 2, 4), {}};
        for (int i = 0; i < body_len; ++i) r.body.push_back(action(random_move(rng)));
        if (vars && body_len >= 2 && bernoulli(rng, 0.5)) r.body[0] = action(random_pen(rng));
        loop = r;
        budget -= 1 + body_len;
    }
    for (int i = 0; i < budget; ++i) body.push_back(action(random_move(rng)));
    if (vars) {
        const bool pen_in_loop = loop && std::any_of(loop->body.begin(), loop->body.end(), [](const Statement& s) {
            return s.is_action() && s.action().op == Command::Op::setpc;
        });
        if (!pen_in_loop) {
            const int pens = 1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(std::max(1, budget / 3))));
            for (int k = 0; k < pens && k < budget; ++k) body[uniform_below(rng, body.size())] = action(random_pen(rng));
        }
    }
    if (loop) {
        const std::size_t at = leading_action ? 1 + uniform_below(rng, body.size()) : uniform_below(rng, body.size() + 1);
        body.insert(body.begin() + static_cast<std::ptrdiff_t>(std::min(at, body.size())), Statement{*loop});
    }
    return Program{body};
}

Goal goal_for(TaskType type, Rng& rng) {
    Goal g;
    switch (type) {
    case TaskType::find:
        g.kind = GoalKind::find;
        g.target_kind = bernoulli(rng, 0.7) ? "strawberry" : "lemon";
        break;
    case TaskType::draw: g.kind = GoalKind::draw; break;
    case TaskType::math:
        g.kind = GoalKind::collect_exactly;
        g.target_kind = "strawberry";
        g.target_count = uniform_int(rng, 3, 10);
        break;
    case TaskType::logic:
        g.kind = GoalKind::collect_all;
        g.target_kind = "shape";
        g.target_color = Color::red;
        g.avoid_colors = {Color::green};
        break;
    }
    return g;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: make_basic_fixture OUT.jsonl [SEED]\n";
        return 1;
    }
    const std::uint64_t seed = argc > 2 ? std::stoull(argv[2]) : 85;
    Rng rng = derive_rng(seed, 1);

    auto types = expand<TaskType>({{TaskType::find, 33}, {TaskType::draw, 33}, {TaskType::math, 10}, {TaskType::logic, 9}});
    auto constraints = expand<std::string>({{"None", 54}, {"AtMost", 21}, {"Exactly", 6}, {"StartBy", 4}, {"Hybrid", 0}});
    auto concepts = expand<ConceptClass>({{ConceptClass::BasicActions, 47},
                                          {ConceptClass::Loops, 24},
                                          {ConceptClass::Variables, 7},
                                          {ConceptClass::LoopsAndVariables, 7}});
    auto lengths = expand<int>({{0, 41}, {1, 29}, {2, 15}});
    auto sizes = expand<int>({{3, 59}, {4, 15}, {5, 4}, {6, 4}, {7, 3}});
    shuffle(constraints, rng);
    shuffle(concepts, rng);
    shuffle(lengths, rng);
    shuffle(sizes, rng);
    // a pen change only matters when the goal is a drawing
    auto pens = [&](std::size_t i) {
        return concepts[i] == ConceptClass::Variables || concepts[i] == ConceptClass::LoopsAndVariables;
    };
    for (std::size_t i = 0; i < types.size(); ++i) {
        if (types[i] == TaskType::draw || !pens(i)) continue;
        for (std::size_t j = 0; j < types.size(); ++j) {
            if (types[j] == TaskType::draw && !pens(j)) {
                std::swap(concepts[i], concepts[j]);
                break;
            }
        }
    }

    std::vector<Record> records;
    for (std::size_t i = 0; i < types.size(); ++i) {
        const int lo[] = {1, 6, 11};
        const int hi[] = {5, 10, 17};
        const bool start_by = constraints[i] == "StartBy";
        int min_len = 1;
        if (concepts[i] == ConceptClass::Loops) min_len = 2 + (start_by ? 1 : 0);
        if (concepts[i] == ConceptClass::Variables) min_len = 2;
        if (concepts[i] == ConceptClass::LoopsAndVariables) min_len = 3 + (start_by ? 1 : 0);

        SynthParams params;
        const int size = sizes[i];
        params.distractor_density = 0.15;
        const bool tall = bernoulli(rng, 0.5);
        params.min_rows = tall ? size : std::min(2, size);
        params.max_rows = size;
        params.min_cols = tall ? std::min(2, size) : size;
        params.max_cols = size;

        bool done = false;
        for (int attempt = 0; attempt < 200000 && !done; ++attempt) {
            const int length = uniform_int(rng, std::max(lo[lengths[i]], min_len), hi[lengths[i]]);
            const Program code = random_program(length, concepts[i], start_by, rng);
            if (count_commands(code) != length || classify_concepts(code) != concepts[i] || is_degenerate(code)) continue;
            Task task;
            task.task_type = types[i];
            task.goal = goal_for(types[i], rng);
            if (constraints[i] == "AtMost") task.constraints.push_back(CodeConstraint::at_most(length + static_cast<int>(uniform_below(rng, 2))));
            if (constraints[i] == "Exactly") task.constraints.push_back(CodeConstraint::exactly(length));
            if (start_by) {
                std::vector<Command> prefix{code.body[0].action()};
                if (code.body.size() > 1 && code.body[1].is_action() && bernoulli(rng, 0.5)) prefix.push_back(code.body[1].action());
                task.constraints.push_back(CodeConstraint::start_by(prefix));
            }
            auto world = build_world(code, task.goal, params, rng);
            if (!std::holds_alternative<GridWorld>(world)) continue;
            task.grid = std::get<GridWorld>(world);
            if (grid_size(task.grid) != size && !(size == 3 && grid_size(task.grid) <= 3)) continue;
            char id[32];
            std::snprintf(id, sizeof id, "basic-%02zu", i + 1);
            task.id = id;
            if (!validate_task(task).empty() || !run(task, code).success) continue;
            if (is_degenerate(code) || is_redundant(task, print_program(code))) continue;
            records.push_back({task, print_program(code), nlohmann::json::object()});
            done = true;
        }
        if (!done) {
            std::cerr << "could not build task " << i + 1 << "\n";
            return 2;
        }
    }
    save_dataset(records, argv[1]);
    std::cerr << "wrote " << records.size() << " tasks to " << argv[1] << "\n";
    return 0;
}
