#include "xlogo/synth.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace xlogo {

namespace {

using Count = unsigned __int128;

constexpr Count kSaturated = ~Count(0);

Count sat_add(Count a, Count b) { return b > kSaturated - a ? kSaturated : a + b; }
Count sat_mul(Count a, Count b) { return a != 0 && b > kSaturated / a ? kSaturated : a * b; }

// Spaces above this many programs are sampled by drawing random ranks
// instead of materialising a full permutation.
constexpr Count kPermutationLimit = Count(1) << 20;

std::vector<Command> move_alphabet() {
    return {Command::forward(), Command::backward(), Command::left(), Command::right()};
}

std::vector<Command> full_alphabet() {
    auto a = move_alphabet();
    for (Color c : kAllColors) a.push_back(Command::setpc(c));
    return a;
}

// Statement sequences of a given written length and maximum loop depth,
// ordered the way a backtracking search over the grammar visits them:
// actions first (in alphabet order), then loops by ascending count, then by
// ascending body length. count() and unrank() agree on that order.
class CodeSpace {
public:
    CodeSpace(std::vector<Command> alphabet, int max_depth, int max_length)
        : alphabet_(std::move(alphabet)), max_depth_(max_depth), table_(max_depth + 1, std::vector<Count>(max_length + 1, 0)) {
        const Count a = alphabet_.size();
        const Count loop_counts = kMaxRepeat - kMinRepeat + 1;
        for (int d = 0; d <= max_depth; ++d) {
            table_[d][0] = 1;
            for (int len = 1; len <= max_length; ++len) {
                Count total = sat_mul(a, table_[d][len - 1]);
                if (d > 0) {
                    for (int body = 1; body <= len - 1; ++body) {
                        total = sat_add(total, sat_mul(loop_counts, sat_mul(table_[d - 1][body], table_[d][len - 1 - body])));
                    }
                }
                table_[d][len] = total;
            }
        }
    }

    Count count(int length) const { return table_[max_depth_][length]; }

    std::vector<Statement> unrank(Count rank, int length) const { return unrank(rank, length, max_depth_); }

private:
    std::vector<Statement> unrank(Count rank, int length, int depth) const {
        std::vector<Statement> out;
        while (length > 0) {
            const Count rest = table_[depth][length - 1];
            const Count actions = alphabet_.size() * rest;
            if (rank < actions) {
                out.push_back(action(alphabet_[static_cast<std::size_t>(rank / rest)]));
                rank %= rest;
                length -= 1;
                continue;
            }
            rank -= actions;
            bool placed = false;
            for (int times = kMinRepeat; times <= kMaxRepeat && !placed; ++times) {
                for (int body = 1; body <= length - 1; ++body) {
                    const Count tail = table_[depth][length - 1 - body];
                    const Count group = table_[depth - 1][body] * tail;
                    if (rank < group) {
                        out.push_back(repeat(times, unrank(rank / tail, body, depth - 1)));
                        rank %= tail;
                        length -= 1 + body;
                        placed = true;
                        break;
                    }
                    rank -= group;
                }
            }
        }
        return out;
    }

    std::vector<Command> alphabet_;
    int max_depth_;
    std::vector<std::vector<Count>> table_;  // [depth][length]
};

Count uniform_below128(Rng& rng, Count n) {
    if (n <= std::numeric_limits<std::uint64_t>::max()) return uniform_below(rng, static_cast<std::uint64_t>(n));
    const Count limit = kSaturated - kSaturated % n;
    Count x;
    do {
        x = (Count(rng()) << 64) | Count(rng());
    } while (x >= limit);
    return x % n;
}

struct SpaceSpec {
    ConceptClass concept_class;
    std::vector<int> lengths;
    CodeSpace space;

    Count total() const {
        Count t = 0;
        for (int len : lengths) t = sat_add(t, space.count(len));
        return t;
    }

    Program unrank(Count rank) const {
        for (int len : lengths) {
            const Count c = space.count(len);
            if (rank < c) return Program{space.unrank(rank, len)};
            rank -= c;
        }
        return {};
    }
};

SpaceSpec make_space(const Program& reference, Difficulty difficulty) {
    const ConceptClass cls = classify_concepts(reference);
    const bool loops = cls == ConceptClass::Loops || cls == ConceptClass::LoopsAndVariables;
    const bool vars = cls == ConceptClass::Variables || cls == ConceptClass::LoopsAndVariables;
    auto lengths = target_lengths(count_commands(reference), difficulty);
    const int max_len = *std::max_element(lengths.begin(), lengths.end());
    const int depth = loops ? std::max(1, loop_depth(reference)) : 0;
    return SpaceSpec{cls, std::move(lengths), CodeSpace(vars ? full_alphabet() : move_alphabet(), depth, max_len)};
}

std::size_t leading_actions(const Program& p) {
    std::size_t n = 0;
    while (n < p.body.size() && p.body[n].is_action()) ++n;
    return n;
}

std::vector<Command> written_prefix(const Program& p, std::size_t k) {
    std::vector<Command> out;
    for (std::size_t i = 0; i < k; ++i) out.push_back(p.body[i].action());
    return out;
}

bool has_kind(const std::vector<CodeConstraint>& cs, ConstraintKind k) {
    return std::any_of(cs.begin(), cs.end(), [&](const CodeConstraint& c) { return c.kind == k; });
}

}  // namespace

std::string_view to_string(Difficulty d) {
    switch (d) {
    case Difficulty::Easy: return "easy";
    case Difficulty::Medium: return "medium";
    case Difficulty::Hard: return "hard";
    }
    return {};
}

std::optional<Difficulty> parse_difficulty(std::string_view s) {
    if (s == "easy") return Difficulty::Easy;
    if (s == "medium") return Difficulty::Medium;
    if (s == "hard") return Difficulty::Hard;
    return std::nullopt;
}

std::vector<int> target_lengths(int reference_length, Difficulty d) {
    if (d == Difficulty::Easy) return {reference_length};
    return {reference_length + 1, reference_length + 2};
}

std::uint64_t enumeration_space_size(const Program& reference, Difficulty difficulty) {
    const Count t = make_space(reference, difficulty).total();
    return t > std::numeric_limits<std::uint64_t>::max() ? std::numeric_limits<std::uint64_t>::max()
                                                          : static_cast<std::uint64_t>(t);
}

std::vector<Program> enumerate_codes(const Program& reference, Difficulty difficulty, std::size_t limit,
                                     std::uint64_t seed, const std::function<bool(const Program&)>& keep) {
    if (limit == 0) throw UsageError("enumerate_codes: limit must be >= 1");
    const SpaceSpec spec = make_space(reference, difficulty);
    const Count total = spec.total();
    if (total == kSaturated) throw UsageError("reference program too long to enumerate");
    Rng rng(seed);
    std::vector<Program> out;

    auto accept = [&](Program p) {
        if (classify_concepts(p) != spec.concept_class) return false;
        if (keep && !keep(p)) return false;
        out.push_back(std::move(p));
        return true;
    };

    if (total <= kPermutationLimit) {
        std::vector<std::uint32_t> ranks(static_cast<std::size_t>(total));
        for (std::size_t i = 0; i < ranks.size(); ++i) ranks[i] = static_cast<std::uint32_t>(i);
        shuffle(ranks, rng);
        for (std::uint32_t r : ranks) {
            if (out.size() >= limit) break;
            accept(spec.unrank(r));
        }
        return out;
    }

    // Ranks are drawn without replacement. A rejected rank drawn twice is
    // rejected twice, so only accepted ranks are remembered.
    std::set<Count> taken;
    const std::size_t max_attempts =
        keep ? std::clamp<std::size_t>(2000 * limit, kPermutationLimit, 4 * kPermutationLimit) : 50 * limit + 1000;
    for (std::size_t attempt = 0; attempt < max_attempts && out.size() < limit; ++attempt) {
        const Count r = uniform_below128(rng, total);
        if (taken.count(r)) continue;
        if (accept(spec.unrank(r))) taken.insert(r);
    }
    return out;
}

std::optional<DerivedSpec> derive_constraints_and_goal(const Task& reference, const Program& candidate,
                                                       Difficulty difficulty, Rng& rng) {
    DerivedSpec out;
    out.goal = reference.goal;
    const int count = count_commands(candidate);
    const std::size_t leading = leading_actions(candidate);
    for (const auto& c : reference.constraints) {
        switch (c.kind) {
        case ConstraintKind::at_most: out.constraints.push_back(CodeConstraint::at_most(count)); break;
        case ConstraintKind::exactly: out.constraints.push_back(CodeConstraint::exactly(count)); break;
        case ConstraintKind::start_by:
            if (c.prefix.empty() || leading < c.prefix.size()) return std::nullopt;
            out.constraints.push_back(CodeConstraint::start_by(written_prefix(candidate, c.prefix.size())));
            break;
        }
    }
    if (difficulty != Difficulty::Hard) return out;

    // One more constraint, first applicable kind in at_most -> exactly -> start_by.
    if (!has_kind(out.constraints, ConstraintKind::at_most)) {
        out.constraints.push_back(CodeConstraint::at_most(count));
    } else if (!has_kind(out.constraints, ConstraintKind::exactly)) {
        out.constraints.push_back(CodeConstraint::exactly(count));
    } else if (!has_kind(out.constraints, ConstraintKind::start_by) && leading > 0) {
        out.constraints.push_back(CodeConstraint::start_by(written_prefix(candidate, std::min<std::size_t>(2, leading))));
    } else {
        return std::nullopt;
    }

    if (bernoulli(rng, 0.5)) {
        Goal& g = out.goal;
        if (g.kind != GoalKind::draw && g.target_color) {
            std::vector<Color> others;
            for (Color c : kAllColors) {
                if (c != Color::white && c != *g.target_color && !g.avoid_colors.count(c)) others.push_back(c);
            }
            if (!others.empty()) g.target_color = pick(others, rng);
        } else if (g.kind == GoalKind::collect_exactly && g.target_count) {
            const int delta = uniform_int(rng, 1, 3) * (bernoulli(rng, 0.5) ? 1 : -1);
            const int next = *g.target_count + delta;
            g.target_count = next >= 1 ? next : *g.target_count + 1 + uniform_int(rng, 0, 2);
        }
    }
    return out;
}

}  // namespace xlogo
