#include "xlogo/synth.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <set>
#include <thread>

namespace xlogo {

namespace {

bool is_turn(const Statement& s) {
    return s.is_action() && (s.action().op == Command::Op::left || s.action().op == Command::Op::right);
}

bool is_move(const Command& c) { return c.op == Command::Op::forward || c.op == Command::Op::backward; }

// Adjacent opposite turns or three identical turns in a row are never part
// of a sensible solution.
bool wasteful_turns(const std::vector<Statement>& body) {
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (!body[i].is_action()) {
            if (wasteful_turns(body[i].loop().body)) return true;
            continue;
        }
        if (i + 1 < body.size() && is_turn(body[i]) && is_turn(body[i + 1]) && !(body[i].action() == body[i + 1].action())) {
            return true;
        }
        if (i + 2 < body.size() && is_turn(body[i]) && body[i] == body[i + 1] && body[i] == body[i + 2]) return true;
    }
    return false;
}

void flatten_with_origin(const std::vector<Statement>& body, std::vector<std::pair<Command, const Statement*>>& out) {
    for (const auto& s : body) {
        if (s.is_action()) {
            out.emplace_back(s.action(), &s);
            continue;
        }
        for (int k = 0; k < s.loop().times; ++k) flatten_with_origin(s.loop().body, out);
    }
}

// A written turn or setpc none of whose executions can influence a later
// move: turns with no move after them, pen changes that are overridden or
// never used, or that keep the current colour. Deleting it keeps every
// trace-visible effect, so the code would be redundant in any world.
bool has_dead_statement(const Program& code) {
    if (unrolled_length(code) > 10'000) return false;
    std::vector<std::pair<Command, const Statement*>> flat;
    flatten_with_origin(code.body, flat);
    std::map<const Statement*, bool> useful;
    Color pen = Color::black;
    for (std::size_t i = 0; i < flat.size(); ++i) {
        const auto& [cmd, origin] = flat[i];
        if (is_move(cmd)) continue;
        bool effect = false;
        if (cmd.op == Command::Op::setpc) {
            if (cmd.color != pen) {
                for (std::size_t j = i + 1; j < flat.size(); ++j) {
                    if (is_move(flat[j].first)) {
                        effect = true;
                        break;
                    }
                    if (flat[j].first.op == Command::Op::setpc) break;
                }
            }
            pen = cmd.color;
        } else {
            for (std::size_t j = i + 1; j < flat.size() && !effect; ++j) effect = is_move(flat[j].first);
        }
        useful[origin] = useful[origin] || effect;
    }
    return std::any_of(useful.begin(), useful.end(), [](const auto& kv) { return !kv.second; });
}

}  // namespace

bool is_degenerate(const Program& code) { return wasteful_turns(code.body) || has_dead_statement(code); }

namespace {

struct Combination {
    std::size_t index = 0;
    Program code;
    std::string code_text;
    DerivedSpec spec;
};

struct Candidate {
    TaskCodePair pair;
    std::string hash;
};

struct ComboOutcome {
    std::vector<Candidate> candidates;
    std::size_t attempts = 0;
    std::size_t unsatisfiable = 0;
    std::size_t failed_validation = 0;
    std::size_t rejected_redundant = 0;
};

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(threads, n); ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

void check_params(const SynthParams& p) {
    if (p.count < 1) throw UsageError("synth: count must be >= 1");
    if (p.per_combination_cap < 1) throw UsageError("synth: per-combination cap must be >= 1");
    if (p.min_rows < 1 || p.min_cols < 1 || p.min_rows > p.max_rows || p.min_cols > p.max_cols) {
        throw UsageError("synth: invalid grid dimension ranges");
    }
    if (!(p.distractor_density >= 0.0 && p.distractor_density <= 1.0)) {
        throw UsageError("synth: distractor density must be in [0, 1]");
    }
}

std::vector<Program> reductions(const std::vector<Statement>& body) {
    std::vector<Program> out;
    for (std::size_t i = 0; i < body.size(); ++i) {
        std::vector<Statement> removed = body;
        removed.erase(removed.begin() + static_cast<std::ptrdiff_t>(i));
        out.push_back(Program{removed});
        if (i + 1 < body.size()) {
            // adjacent pairs that cancel out, e.g. move_forward() then move_back()
            std::vector<Statement> pair = body;
            pair.erase(pair.begin() + static_cast<std::ptrdiff_t>(i), pair.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            out.push_back(Program{pair});
        }
        if (body[i].is_action()) continue;

        const Repeat& loop = body[i].loop();
        std::vector<Statement> fewer = body;
        if (loop.times > kMinRepeat) {
            std::get<Repeat>(fewer[i].node).times = loop.times - 1;
        } else {
            fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(i));
            fewer.insert(fewer.begin() + static_cast<std::ptrdiff_t>(i), loop.body.begin(), loop.body.end());
        }
        out.push_back(Program{fewer});

        for (auto& inner : reductions(loop.body)) {
            if (inner.body.empty()) continue;  // a loop body cannot be empty
            std::vector<Statement> edited = body;
            std::get<Repeat>(edited[i].node).body = std::move(inner.body);
            out.push_back(Program{edited});
        }
    }
    return out;
}

// Target of the spatial simplification: the find target, or the matching
// item nearest to the turtle that is not already under it.
std::optional<Position> spatial_target(const Task& t) {
    if (t.goal.kind == GoalKind::draw) return std::nullopt;
    const Position here = t.grid.turtle.position;
    std::optional<Position> best;
    int best_dist = 0;
    for (const auto& item : t.grid.items) {
        if (!t.goal.matches(item)) continue;
        if (t.goal.kind != GoalKind::find && item.position == here) continue;
        const int dist = std::abs(item.position.row - here.row) + std::abs(item.position.col - here.col);
        if (!best || dist < best_dist || (dist == best_dist && item.position < *best)) {
            best = item.position;
            best_dist = dist;
        }
    }
    return best;
}

}  // namespace

std::vector<TaskCodePair> deduplicate(const std::vector<TaskCodePair>& pairs) {
    std::set<std::string> seen;
    std::vector<TaskCodePair> out;
    for (const auto& p : pairs) {
        if (seen.insert(canonical_hash(p)).second) out.push_back(p);
    }
    return out;
}

SynthResult synthesize(const TaskCodePair& reference, const SynthParams& params,
                       const std::set<std::string>& excluded_hashes) {
    check_params(params);
    const Program ref_program = parse_program_or_throw(reference.code);
    if (!run(reference.task, ref_program).success) {
        throw DataError("reference '" + reference.task.id + "' is not solved by its own code");
    }

    SynthResult result;
    SynthStats& stats = result.stats;
    stats.reference_id = reference.task.id;
    stats.difficulty = params.difficulty;
    stats.code_space = enumeration_space_size(ref_program, params.difficulty);

    const std::uint64_t ref_salt = fnv1a(reference.task.id);
    const auto diff_salt = static_cast<std::uint64_t>(params.difficulty);
    // Codes the derived constraints cannot carry are skipped, so the limit
    // grows until enough feasible ones are found. Larger limits extend the
    // same seeded sequence.
    const std::uint64_t code_seed = derive_rng(params.seed, ref_salt, diff_salt)();
    std::vector<Program> codes;
    std::size_t degenerate = 0;
    const auto usable = [&degenerate](const Program& p) {
        if (!is_degenerate(p)) return true;
        ++degenerate;
        return false;
    };
    for (std::size_t limit = params.count;; limit *= 2) {
        degenerate = 0;
        codes = enumerate_codes(ref_program, params.difficulty, limit, code_seed, usable);
        std::size_t feasible = 0;
        for (std::size_t i = 0; i < codes.size() && feasible < params.count; ++i) {
            Rng goal_rng = derive_rng(params.seed, ref_salt, diff_salt, i, 1);
            feasible += derive_constraints_and_goal(reference.task, codes[i], params.difficulty, goal_rng).has_value();
        }
        if (feasible >= params.count || codes.size() < limit || limit >= 64 * params.count) break;
    }
    stats.codes = codes.size();
    stats.degenerate_codes = degenerate;

    std::vector<Combination> combos;
    for (std::size_t i = 0; i < codes.size() && combos.size() < params.count; ++i) {
        Rng goal_rng = derive_rng(params.seed, ref_salt, diff_salt, i, 1);
        auto spec = derive_constraints_and_goal(reference.task, codes[i], params.difficulty, goal_rng);
        if (!spec) {
            ++stats.infeasible_codes;
            continue;
        }
        combos.push_back({i, codes[i], print_program(codes[i]), std::move(*spec)});
    }
    if (combos.empty()) {
        result.warnings.push_back("no feasible code candidates for reference '" + reference.task.id + "'");
        return result;
    }

    const unsigned threads = params.threads ? params.threads : std::max(1u, std::thread::hardware_concurrency());
    const std::size_t pool_target = 2 * params.count;
    const std::size_t attempt_budget = std::max<std::size_t>(20'000, 40 * params.count);
    std::vector<ComboOutcome> outcomes(combos.size());
    std::size_t per_combo = std::clamp<std::size_t>((pool_target + combos.size() - 1) / combos.size(), 1,
                                                    params.per_combination_cap);
    std::set<std::string> unique;

    for (;;) {
        parallel_for(combos.size(), threads, [&](std::size_t c) {
            const Combination& combo = combos[c];
            ComboOutcome& out = outcomes[c];
            for (; out.attempts < per_combo; ++out.attempts) {
                Rng rng = derive_rng(params.seed, ref_salt, diff_salt, combo.index, out.attempts + 2);
                auto built = build_world(combo.code, combo.spec.goal, params, rng);
                if (std::holds_alternative<Unsatisfiable>(built)) {
                    ++out.unsatisfiable;
                    continue;
                }
                Task task{reference.task.id, reference.task.task_type, combo.spec.goal, combo.spec.constraints,
                          std::move(std::get<GridWorld>(built))};
                if (!validate_task(task).empty() || !run(task, combo.code).success) {
                    ++out.failed_validation;
                    continue;
                }
                if (params.reject_redundant && is_redundant(task, combo.code_text)) {
                    ++out.rejected_redundant;
                    continue;
                }
                TaskCodePair pair{std::move(task), combo.code_text};
                std::string hash = canonical_hash(pair);
                out.candidates.push_back({std::move(pair), std::move(hash)});
            }
        });

        std::size_t attempts = 0;
        for (const auto& o : outcomes) {
            attempts += o.attempts;
            for (const auto& cand : o.candidates) {
                if (!excluded_hashes.count(cand.hash)) unique.insert(cand.hash);
            }
        }
        if (unique.size() >= pool_target || per_combo >= params.per_combination_cap || attempts >= attempt_budget) break;
        per_combo = std::min(params.per_combination_cap, per_combo * 2);
    }

    std::vector<Candidate> pool;
    std::set<std::string> seen;
    for (auto& o : outcomes) {
        stats.world_attempts += o.attempts;
        stats.unsatisfiable += o.unsatisfiable;
        stats.failed_validation += o.failed_validation;
        stats.rejected_redundant += o.rejected_redundant;
        for (auto& cand : o.candidates) {
            if (excluded_hashes.count(cand.hash)) {
                ++stats.excluded;
            } else if (!seen.insert(cand.hash).second) {
                ++stats.duplicates;
            } else {
                pool.push_back(std::move(cand));
            }
        }
    }
    std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) { return a.hash < b.hash; });
    stats.pool = pool.size();

    if (pool.size() > params.count) {
        Rng rng = derive_rng(params.seed, ref_salt, diff_salt, 0x73616d706c65ULL);
        shuffle(pool, rng);
        pool.resize(params.count);
        std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) { return a.hash < b.hash; });
    } else if (pool.size() < params.count) {
        result.warnings.push_back("reference '" + reference.task.id + "' (" + std::string(to_string(params.difficulty)) +
                                  "): requested " + std::to_string(params.count) + " pairs, produced " +
                                  std::to_string(pool.size()));
    }

    for (auto& cand : pool) {
        cand.pair.task.id = reference.task.id + "-" + std::string(to_string(params.difficulty)) + "-" + cand.hash.substr(0, 12);
        result.pairs.push_back(std::move(cand.pair));
    }
    stats.kept = result.pairs.size();
    return result;
}

PerturbationSet parse_perturbation_ops(std::string_view s) {
    PerturbationSet set = 0;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t end = s.find(',', start);
        if (end == std::string_view::npos) end = s.size();
        std::string_view tok = s.substr(start, end - start);
        while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
        while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
        if (tok == "A" || tok == "a") set |= static_cast<std::uint8_t>(PerturbationOp::RemoveCodeConstraints);
        else if (tok == "B" || tok == "b") set |= static_cast<std::uint8_t>(PerturbationOp::RemoveGridConstraints);
        else if (tok == "C" || tok == "c") set |= static_cast<std::uint8_t>(PerturbationOp::SimplifySpatial);
        else if (!tok.empty()) throw UsageError("unknown perturbation '" + std::string(tok) + "' (expected A, B or C)");
        start = end + 1;
    }
    return set;
}

Task perturb(const Task& task, PerturbationSet ops, Rng& rng) {
    Task out = task;
    if (contains(ops, PerturbationOp::RemoveCodeConstraints)) out.constraints.clear();
    if (contains(ops, PerturbationOp::RemoveGridConstraints)) {
        out.grid.walls.clear();
        out.grid.forbidden.clear();
    }
    if (!contains(ops, PerturbationOp::SimplifySpatial)) return out;

    const auto target = spatial_target(out);
    if (!target) return out;
    const GridWorld& g = out.grid;
    std::vector<Pose> spots;
    for (Direction d : {Direction::N, Direction::E, Direction::S, Direction::W}) {
        const Position p = step(*target, d);
        if (!g.in_bounds(p)) continue;
        if (std::find(g.forbidden.begin(), g.forbidden.end(), p) != g.forbidden.end()) continue;
        if (std::find(g.walls.begin(), g.walls.end(), Edge::between(p, *target)) != g.walls.end()) continue;
        if (auto it = g.cell_colors.find(p); it != g.cell_colors.end() && out.goal.avoid_colors.count(it->second)) continue;
        const bool holds_target = std::any_of(g.items.begin(), g.items.end(),
                                              [&](const Item& i) { return i.position == p && out.goal.matches(i); });
        if (holds_target) continue;
        // Face the target: it lies in direction opposite to d from p.
        spots.push_back({p, turn_left(turn_left(d))});
    }
    if (spots.empty()) return out;
    out.grid.turtle = pick(spots, rng);
    return out;
}

bool is_redundant(const Task& task, std::string_view code) {
    const Program program = parse_program_or_throw(code);
    if (!run(task, program).success) throw DataError("is_redundant: code does not solve task '" + task.id + "'");
    for (const auto& edited : reductions(program.body)) {
        if (run(task, edited).success) return true;
    }
    return false;
}

}  // namespace xlogo
