#include "xlogo/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace xlogo {

namespace {

constexpr std::uint64_t kMaxPlannedSteps = 10'000;

const std::vector<std::string> kItemKinds = {"strawberry", "lemon", "apple", "shape"};

const std::vector<Color> kInkColors = {Color::red, Color::blue, Color::green, Color::black, Color::yellow};

struct Footprint {
    Direction heading;
    int min_row, max_row, min_col, max_col;  // relative to the start cell

    int height() const { return max_row - min_row + 1; }
    int width() const { return max_col - min_col + 1; }
};

// Cells the program sweeps when started at the origin with `heading` on an
// unbounded open grid.
Footprint footprint(const Program& code, Direction heading, std::uint64_t steps) {
    const int half = static_cast<int>(steps) + 1;
    GridWorld open;
    open.rows = open.cols = 2 * half + 1;
    open.turtle = {{half, half}, heading};
    const Trace t = execute(code, open);
    Footprint f{heading, 0, 0, 0, 0};
    for (const auto& p : t.poses) {
        f.min_row = std::min(f.min_row, p.position.row - half);
        f.max_row = std::max(f.max_row, p.position.row - half);
        f.min_col = std::min(f.min_col, p.position.col - half);
        f.max_col = std::max(f.max_col, p.position.col - half);
    }
    return f;
}

Item random_item(const std::string& kind, Rng& rng) {
    Item item;
    item.kind = kind;
    if (kind == "shape") {
        item.shape = std::string(kShapeNames[uniform_below(rng, std::size(kShapeNames))]);
        item.color = pick(kInkColors, rng);
    }
    return item;
}

// An item satisfying the goal filter.
Item matching_item(const Goal& goal, Rng& rng) {
    Item item = random_item(goal.target_kind.value_or("strawberry"), rng);
    if (goal.target_color) item.color = goal.target_color;
    return item;
}

std::optional<Item> non_matching_item(const Goal& goal, Rng& rng) {
    for (int attempt = 0; attempt < 16; ++attempt) {
        Item item = random_item(pick(kItemKinds, rng), rng);
        if (!goal.matches(item)) return item;
    }
    return std::nullopt;
}

bool has_item_key(const GridWorld& w, const Item& item) {
    return std::any_of(w.items.begin(), w.items.end(), [&](const Item& o) {
        return o.position == item.position && o.kind == item.kind && o.shape == item.shape && o.color == item.color;
    });
}

// Splits `total` into `parts` positive integers.
std::vector<int> random_partition(int total, int parts, Rng& rng) {
    std::vector<int> cuts;
    std::vector<int> pool;
    for (int i = 1; i < total; ++i) pool.push_back(i);
    shuffle(pool, rng);
    cuts.assign(pool.begin(), pool.begin() + (parts - 1));
    std::sort(cuts.begin(), cuts.end());
    std::vector<int> out;
    int prev = 0;
    for (int c : cuts) {
        out.push_back(c - prev);
        prev = c;
    }
    out.push_back(total - prev);
    return out;
}

bool solves(const Program& code, const Goal& goal, const GridWorld& world) {
    const Trace t = execute(code, world);
    return !t.crash && evaluate_goal(t, goal, world);
}

}  // namespace

std::variant<GridWorld, Unsatisfiable> build_world(const Program& code, const Goal& goal, const SynthParams& params,
                                                   Rng& rng) {
    const std::uint64_t steps = unrolled_length(code);
    if (steps > kMaxPlannedSteps) return Unsatisfiable{"program unrolls to too many commands"};

    std::vector<Footprint> fitting;
    for (Direction d : {Direction::N, Direction::E, Direction::S, Direction::W}) {
        Footprint f = footprint(code, d, steps);
        if (f.height() <= params.max_rows && f.width() <= params.max_cols) fitting.push_back(f);
    }
    if (fitting.empty()) return Unsatisfiable{"trajectory does not fit the allowed grid dimensions"};

    const Footprint& f = pick(fitting, rng);
    GridWorld world;
    world.rows = uniform_int(rng, std::max(params.min_rows, f.height()), params.max_rows);
    world.cols = uniform_int(rng, std::max(params.min_cols, f.width()), params.max_cols);
    const int top = uniform_int(rng, 0, world.rows - f.height());
    const int left = uniform_int(rng, 0, world.cols - f.width());
    world.turtle = {{top - f.min_row, left - f.min_col}, f.heading};

    const Trace trace = execute(code, world);
    if (trace.crash) return Unsatisfiable{"trajectory crashes in an empty grid"};

    std::set<Position> visited;
    std::vector<Position> visit_order;
    for (const auto& p : trace.poses) {
        if (visited.insert(p.position).second) visit_order.push_back(p.position);
    }
    std::set<Edge> path_edges;
    for (const auto& e : trace.drawn) path_edges.insert(e.edge);
    const Position start = world.turtle.position;
    const Position finish = trace.final_pose().position;

    // Goal content along the trajectory.
    switch (goal.kind) {
    case GoalKind::find: {
        Item item = matching_item(goal, rng);
        item.position = finish;
        world.items.push_back(item);
        break;
    }
    case GoalKind::collect_all:
    case GoalKind::collect_exactly: {
        // The final cell always holds a target so the whole path matters.
        std::vector<Position> cells(visit_order.begin() + 1, visit_order.end());
        if (cells.empty()) cells.push_back(start);
        const Position primary = finish != start ? finish : pick(cells, rng);
        std::vector<Position> chosen{primary};
        std::vector<Position> others;
        for (const auto& p : cells) {
            if (p != primary) others.push_back(p);
        }
        shuffle(others, rng);
        const int target = goal.kind == GoalKind::collect_exactly ? goal.target_count.value_or(1) : 0;
        std::size_t extra = uniform_below(rng, std::min<std::size_t>(others.size(), 3) + 1);
        if (goal.kind == GoalKind::collect_exactly) extra = std::min<std::size_t>(extra, static_cast<std::size_t>(target - 1));
        chosen.insert(chosen.end(), others.begin(), others.begin() + static_cast<std::ptrdiff_t>(extra));
        std::vector<int> counts(chosen.size(), 1);
        if (goal.kind == GoalKind::collect_exactly) counts = random_partition(target, static_cast<int>(chosen.size()), rng);
        for (std::size_t i = 0; i < chosen.size(); ++i) {
            Item item = matching_item(goal, rng);
            item.position = chosen[i];
            item.count = counts[i];
            world.items.push_back(item);
        }
        break;
    }
    case GoalKind::draw:
        world.target_segments = visible_segments(trace);
        if (world.target_segments.empty()) return Unsatisfiable{"program draws no visible segment"};
        break;
    }

    std::vector<Position> free_cells;
    for (int r = 0; r < world.rows; ++r) {
        for (int c = 0; c < world.cols; ++c) {
            if (!visited.count({r, c})) free_cells.push_back({r, c});
        }
    }

    if (!goal.avoid_colors.empty() && !free_cells.empty()) {
        const std::vector<Color> avoid(goal.avoid_colors.begin(), goal.avoid_colors.end());
        auto cells = free_cells;
        shuffle(cells, rng);
        const std::size_t k = 1 + uniform_below(rng, std::min<std::size_t>(cells.size(), 3));
        for (std::size_t i = 0; i < k; ++i) world.cell_colors[cells[i]] = pick(avoid, rng);
    }

    // Distractors off the trajectory; any addition that breaks the solution is undone.
    const auto distractors = static_cast<std::size_t>(std::lround(params.distractor_density * static_cast<double>(free_cells.size())));
    for (std::size_t n = 0; n < distractors && !free_cells.empty(); ++n) {
        GridWorld before = world;
        const Position cell = pick(free_cells, rng);
        switch (uniform_below(rng, goal.kind == GoalKind::draw ? 3 : 4)) {
        case 0: {
            const Direction d = static_cast<Direction>(uniform_below(rng, 4));
            const Position other = step(cell, d);
            const Edge wall = Edge::between(cell, other);
            if (!world.in_bounds(other) || path_edges.count(wall) ||
                std::find(world.walls.begin(), world.walls.end(), wall) != world.walls.end()) {
                continue;
            }
            world.walls.push_back(wall);
            break;
        }
        case 1:
            if (std::find(world.forbidden.begin(), world.forbidden.end(), cell) != world.forbidden.end()) continue;
            world.forbidden.push_back(cell);
            break;
        case 2:
            if (world.cell_colors.count(cell)) continue;
            world.cell_colors[cell] = pick(kInkColors, rng);
            break;
        default: {
            std::optional<Item> item = goal.kind == GoalKind::collect_exactly && bernoulli(rng, 0.5)
                                           ? std::optional<Item>(matching_item(goal, rng))
                                           : non_matching_item(goal, rng);
            if (!item) continue;
            item->position = cell;
            if (goal.kind == GoalKind::collect_exactly && goal.matches(*item)) item->count = uniform_int(rng, 1, 5);
            if (has_item_key(world, *item)) continue;
            world.items.push_back(*item);
            break;
        }
        }
        if (!solves(code, goal, world)) world = std::move(before);
    }

    if (!solves(code, goal, world)) return Unsatisfiable{"constructed world is not solved by the code"};
    return world;
}

}  // namespace xlogo
