#pragma once

// Task-code synthesis from reference pairs: code enumeration under
// length/concept constraints, symbolic construction of grid worlds that the
// code solves, emulator validation, dedup and seeded sampling. Also hosts
// the task perturbation operators and the redundancy check.

#include "xlogo/dsl.hpp"
#include "xlogo/emulator.hpp"
#include "xlogo/random.hpp"
#include "xlogo/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace xlogo {

enum class Difficulty : std::uint8_t { Easy, Medium, Hard };

std::string_view to_string(Difficulty d);
std::optional<Difficulty> parse_difficulty(std::string_view s);

struct SynthParams {
    Difficulty difficulty = Difficulty::Easy;
    std::size_t count = 500;
    std::size_t per_combination_cap = 3000;
    int min_rows = 2;
    int max_rows = 9;
    int min_cols = 2;
    int max_cols = 9;
    double distractor_density = 0.2;
    std::uint64_t seed = 0;
    // Drop pairs that a smaller edit of the code still solves (see is_redundant).
    bool reject_redundant = true;
    // 0 picks std::thread::hardware_concurrency().
    unsigned threads = 0;
};

// Code lengths a difficulty allows relative to the reference length.
std::vector<int> target_lengths(int reference_length, Difficulty d);

// Distinct programs of the difficulty's target lengths sharing the reference's
// concept class (and at most its loop nesting depth), sampled without
// replacement from the backtracking enumeration order with a seeded shuffle.
// Codes failing `keep` do not count toward `limit`; large spaces then get a
// bigger draw budget.
std::vector<Program> enumerate_codes(const Program& reference, Difficulty difficulty, std::size_t limit,
                                     std::uint64_t seed, const std::function<bool(const Program&)>& keep = {});

// Size of the space enumerate_codes samples from (before the concept filter
// for classes that need one). Saturates at UINT64_MAX.
std::uint64_t enumeration_space_size(const Program& reference, Difficulty difficulty);

// Codes with statements that cannot matter in any world: opposite turns
// back to back, three equal turns in a row, turns never followed by a move,
// pen changes that are never used or keep the current colour.
bool is_degenerate(const Program& code);

struct DerivedSpec {
    std::vector<CodeConstraint> constraints;
    Goal goal;
};

// Nothing when the candidate cannot carry the reference's constraints (a
// start_by prefix position holds a loop).
std::optional<DerivedSpec> derive_constraints_and_goal(const Task& reference, const Program& candidate,
                                                       Difficulty difficulty, Rng& rng);

struct Unsatisfiable {
    std::string reason;
};

// Builds a world that `code` solves for `goal`. Returns Unsatisfiable when the
// trajectory cannot be placed inside the allowed dimensions.
std::variant<GridWorld, Unsatisfiable> build_world(const Program& code, const Goal& goal, const SynthParams& params,
                                                   Rng& rng);

struct SynthStats {
    std::string reference_id;
    Difficulty difficulty = Difficulty::Easy;
    std::uint64_t code_space = 0;
    std::size_t codes = 0;
    std::size_t infeasible_codes = 0;
    std::size_t degenerate_codes = 0;
    std::size_t world_attempts = 0;
    std::size_t unsatisfiable = 0;
    std::size_t failed_validation = 0;
    std::size_t rejected_redundant = 0;
    std::size_t duplicates = 0;
    std::size_t excluded = 0;
    std::size_t pool = 0;
    std::size_t kept = 0;
};

struct SynthResult {
    std::vector<TaskCodePair> pairs;
    SynthStats stats;
    std::vector<std::string> warnings;
};

// Every returned pair succeeds under the emulator, has a unique canonical
// hash and none of its hashes is in `excluded_hashes`.
SynthResult synthesize(const TaskCodePair& reference, const SynthParams& params,
                       const std::set<std::string>& excluded_hashes = {});

std::vector<TaskCodePair> deduplicate(const std::vector<TaskCodePair>& pairs);

enum class PerturbationOp : std::uint8_t {
    RemoveCodeConstraints = 1,
    RemoveGridConstraints = 2,
    SimplifySpatial = 4,
};

using PerturbationSet = std::uint8_t;

constexpr PerturbationSet operator|(PerturbationOp a, PerturbationOp b) {
    return static_cast<PerturbationSet>(static_cast<std::uint8_t>(a) | static_cast<std::uint8_t>(b));
}
constexpr PerturbationSet operator|(PerturbationSet a, PerturbationOp b) {
    return static_cast<PerturbationSet>(a | static_cast<std::uint8_t>(b));
}
constexpr bool contains(PerturbationSet set, PerturbationOp op) { return (set & static_cast<std::uint8_t>(op)) != 0; }

// Parses "A,B,C" style lists. Throws UsageError on unknown letters.
PerturbationSet parse_perturbation_ops(std::string_view s);

Task perturb(const Task& task, PerturbationSet ops, Rng& rng);

// True when a smaller edit of `code` still solves `task`: deleting one
// written statement or two adjacent ones, decrementing a loop count, or
// unwrapping a loop of count 2. Throws DataError unless `code` solves `task`.
bool is_redundant(const Task& task, std::string_view code);

struct SplitSizes {
    std::optional<std::size_t> train;  // nothing means "the rest"
    std::size_t val = 0;
    std::size_t eval = 0;
};

template <typename T>
struct Split {
    std::vector<T> train;
    std::vector<T> val;
    std::vector<T> eval;
};

// Seeded uniform split without replacement; each part keeps input order.
template <typename T>
Split<T> split_dataset(const std::vector<T>& items, const SplitSizes& sizes, std::uint64_t seed) {
    const std::size_t n = items.size();
    const std::size_t fixed = sizes.val + sizes.eval;
    if (fixed > n || (sizes.train && *sizes.train > n - fixed)) {
        throw DataError("split sizes exceed population of " + std::to_string(n));
    }
    const std::size_t train = sizes.train.value_or(n - fixed);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng = derive_rng(seed, 0x73706c6974ULL);
    shuffle(order, rng);
    std::vector<int> part(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (i < sizes.val) part[order[i]] = 1;
        else if (i < fixed) part[order[i]] = 2;
        else if (i < fixed + train) part[order[i]] = 0;
    }
    Split<T> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (part[i] == 0) out.train.push_back(items[i]);
        else if (part[i] == 1) out.val.push_back(items[i]);
        else if (part[i] == 2) out.eval.push_back(items[i]);
    }
    return out;
}

}  // namespace xlogo
