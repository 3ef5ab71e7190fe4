#include "xlogo/harness.hpp"

#include "xlogo/dsl.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace xlogo {

namespace {

constexpr std::string_view kPreamble =
    "You are presented with a visual programming task involving a goal, a grid, a turtle, various items (or lines). "
    "You need to write Python code that enables the turtle to accomplish the goal within the grid.\n";

constexpr std::string_view kGridProperties =
    "#### Grid Properties\n"
    "- The grid is made of square cells. A cell is written as (row, column); row 0 is the top row and column 0 is the "
    "leftmost column.\n"
    "- The turtle stands in one cell and faces north, east, south or west. Moving north decreases the row, moving "
    "east increases the column.\n"
    "- The turtle cannot leave the grid, cannot pass through walls between cells and cannot enter forbidden cells.\n"
    "- Some cells are colored. Some cells contain items; an item is collected when the turtle enters its cell.\n"
    "- Every move draws a line along the turtle's path with the current pen color. The pen starts black; white lines "
    "are invisible.\n";

constexpr std::string_view kFunctions =
    "#### Available Python Functions\n"
    "- move_forward(): move one cell in the facing direction.\n"
    "- move_back(): move one cell against the facing direction without turning.\n"
    "- turn_left(): turn 90 degrees to the left without moving.\n"
    "- turn_right(): turn 90 degrees to the right without moving.\n"
    "- setpc(color): set the pen color to one of \"red\", \"blue\", \"green\", \"white\", \"black\", \"yellow\".\n"
    "- for i in range(n): repeat the indented block n times, with 2 <= n <= 10.\n"
    "Write the solution as a function named Run with two-space indentation and no comments. A loop header counts as "
    "one command and its body is counted once. Examples of the code format:\n"
    "def Run():\n"
    "  move_forward()\n"
    "  turn_left()\n"
    "  move_forward()\n"
    "\n"
    "def Run():\n"
    "  setpc(\"red\")\n"
    "  for i in range(4):\n"
    "    move_forward()\n"
    "    turn_right()\n";

constexpr std::string_view kCue = "Now, write a correct Python code that successfully solves the following task.\n";

std::string cell(Position p) { return "(" + std::to_string(p.row) + ", " + std::to_string(p.col) + ")"; }

std::string direction_name(Direction d) {
    switch (d) {
    case Direction::N: return "north";
    case Direction::E: return "east";
    case Direction::S: return "south";
    case Direction::W: return "west";
    }
    return {};
}

std::string plural(const std::string& noun) {
    if (noun.empty()) return noun;
    const char last = noun.back();
    if (last == 'y' && noun.size() > 1 && std::string_view("aeiou").find(noun[noun.size() - 2]) == std::string_view::npos) {
        return noun.substr(0, noun.size() - 1) + "ies";
    }
    if (last == 's' || last == 'x' || noun.ends_with("ch") || noun.ends_with("sh")) return noun + "es";
    return noun + "s";
}

std::string item_noun(const Item& item) {
    std::string base = item.kind == "shape" ? item.shape.value_or("shape") : item.kind;
    if (item.color) base = std::string(to_string(*item.color)) + " " + base;
    return base;
}

std::string target_noun(const Goal& g) {
    std::string base = g.target_kind.value_or("item");
    if (g.target_color) base = std::string(to_string(*g.target_color)) + " " + base;
    return base;
}

std::string join(const std::vector<std::string>& parts, std::string_view last_sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += i + 1 == parts.size() ? std::string(last_sep) : std::string(", ");
        out += parts[i];
    }
    return out;
}

std::vector<Item> sorted_items(const GridWorld& w) {
    std::vector<Item> items = w.items;
    std::sort(items.begin(), items.end());
    return items;
}

std::string describe_constraint(const CodeConstraint& c) {
    switch (c.kind) {
    case ConstraintKind::at_most: return "with just " + std::to_string(c.n.value_or(0)) + " commands";
    case ConstraintKind::exactly: return "with exactly " + std::to_string(c.n.value_or(0)) + " commands";
    case ConstraintKind::start_by: {
        std::vector<std::string> cmds;
        for (const auto& cmd : c.prefix) cmds.push_back(print_command(cmd));
        return "starting with " + join(cmds, " and ");
    }
    }
    return {};
}

std::string describe_lines(const GridWorld& w) {
    std::vector<Segment> segs = w.target_segments;
    std::sort(segs.begin(), segs.end());
    std::ostringstream out;
    for (const auto& s : segs) {
        out << "- a " << to_string(s.color) << " line between " << cell(s.edge.a) << " and " << cell(s.edge.b) << "\n";
    }
    return out.str();
}

std::string describe_items(const GridWorld& w) {
    std::ostringstream out;
    for (const auto& item : sorted_items(w)) {
        if (item.count == 1) out << "- a " << item_noun(item) << " at " << cell(item.position) << "\n";
        else out << "- " << item.count << " " << plural(item_noun(item)) << " at " << cell(item.position) << "\n";
    }
    return out.str();
}

std::string describe_task_nl(const Task& task) {
    const GridWorld& w = task.grid;
    std::ostringstream out;
    out << "The grid has " << w.rows << (w.rows == 1 ? " row" : " rows") << " and " << w.cols
        << (w.cols == 1 ? " column" : " columns") << ".\n";
    out << "The turtle is at " << cell(w.turtle.position) << " facing " << direction_name(w.turtle.direction) << ".\n";
    if (!w.items.empty()) out << "Items:\n" << describe_items(w);
    if (!w.cell_colors.empty()) {
        out << "Colored cells:\n";
        for (const auto& [p, c] : w.cell_colors) out << "- " << cell(p) << " is " << to_string(c) << "\n";
    }
    if (!w.walls.empty()) {
        std::vector<Edge> walls = w.walls;
        std::sort(walls.begin(), walls.end());
        out << "Walls:\n";
        for (const auto& e : walls) out << "- between " << cell(e.a) << " and " << cell(e.b) << "\n";
    }
    if (!w.forbidden.empty()) {
        std::vector<Position> cells = w.forbidden;
        std::sort(cells.begin(), cells.end());
        std::vector<std::string> names;
        for (const auto& p : cells) names.push_back(cell(p));
        out << "Forbidden cells: " << join(names, " and ") << ".\n";
    }
    if (!w.target_segments.empty()) out << "Lines of the picture:\n" << describe_lines(w);
    return out.str();
}

char item_symbol(const Item& item) {
    if (item.kind == "shape") {
        const std::string s = item.shape.value_or("shape");
        return s == "cross" ? 'x' : s.front();
    }
    return item.kind.empty() ? '?' : static_cast<char>(std::tolower(static_cast<unsigned char>(item.kind.front())));
}

char color_symbol(Color c) {
    switch (c) {
    case Color::red: return 'R';
    case Color::blue: return 'B';
    case Color::green: return 'G';
    case Color::white: return 'W';
    case Color::black: return 'K';
    case Color::yellow: return 'Y';
    }
    return '?';
}

char turtle_symbol(Direction d) {
    switch (d) {
    case Direction::N: return '^';
    case Direction::E: return '>';
    case Direction::S: return 'v';
    case Direction::W: return '<';
    }
    return '?';
}

void rtrim(std::string& s) {
    while (!s.empty() && s.back() == ' ') s.pop_back();
}

std::string describe_task_ascii(const Task& task) {
    const GridWorld& w = task.grid;
    std::ostringstream out;
    out << "The grid has " << w.rows << " rows and " << w.cols << " columns. The turtle is at "
        << cell(w.turtle.position) << " facing " << direction_name(w.turtle.direction) << ".\n";
    out << render_ascii_grid(w);

    std::map<char, std::string> item_legend;
    for (const auto& item : w.items) {
        item_legend.emplace(item_symbol(item), item.kind == "shape" ? item.shape.value_or("shape") : item.kind);
    }
    std::set<Color> colors;
    for (const auto& [p, c] : w.cell_colors) colors.insert(c);

    out << "Legend:\n";
    out << "^ > v < turtle facing north, east, south, west\n";
    out << ". empty cell\n";
    out << "# forbidden cell\n";
    out << "| wall between two cells of a row\n";
    out << "- wall between two cells of a column\n";
    for (const auto& [sym, name] : item_legend) out << sym << " " << name << "\n";
    for (Color c : colors) out << color_symbol(c) << " " << to_string(c) << " cell\n";
    if (!w.items.empty()) out << "Items:\n" << describe_items(w);
    if (!w.target_segments.empty()) out << "Lines of the picture:\n" << describe_lines(w);
    return out.str();
}

}  // namespace

std::optional<PromptStyle> parse_prompt_style(std::string_view s) {
    if (s == "nl" || s == "NL") return PromptStyle::NL;
    if (s == "ascii" || s == "ASCII") return PromptStyle::ASCII;
    return std::nullopt;
}

std::string render_ascii_grid(const GridWorld& w) {
    const int label_width = static_cast<int>(std::to_string(std::max(0, w.rows - 1)).size());
    const std::string pad(static_cast<std::size_t>(label_width), ' ');
    std::set<Edge> walls(w.walls.begin(), w.walls.end());
    std::set<Position> forbidden(w.forbidden.begin(), w.forbidden.end());
    std::map<Position, char> item_at;
    for (const auto& item : sorted_items(w)) item_at.emplace(item.position, item_symbol(item));

    std::string out = pad;
    for (int c = 0; c < w.cols; ++c) {
        out += ' ';
        out += static_cast<char>('0' + c % 10);
    }
    out += '\n';
    for (int r = 0; r < w.rows; ++r) {
        std::string row = std::to_string(r);
        row.insert(0, static_cast<std::size_t>(label_width) - row.size(), ' ');
        for (int c = 0; c < w.cols; ++c) {
            const Position p{r, c};
            row += c > 0 && walls.count(Edge::between({r, c - 1}, p)) ? '|' : ' ';
            char sym = '.';
            if (w.turtle.position == p) sym = turtle_symbol(w.turtle.direction);
            else if (forbidden.count(p)) sym = '#';
            else if (auto it = item_at.find(p); it != item_at.end()) sym = it->second;
            else if (auto col = w.cell_colors.find(p); col != w.cell_colors.end()) sym = color_symbol(col->second);
            row += sym;
        }
        out += row + '\n';
        if (r + 1 == w.rows) break;
        std::string between = pad;
        bool any = false;
        for (int c = 0; c < w.cols; ++c) {
            const bool wall = walls.count(Edge::between({r, c}, {r + 1, c})) > 0;
            any = any || wall;
            between += ' ';
            between += wall ? '-' : ' ';
        }
        rtrim(between);
        if (any) out += between + '\n';
    }
    return out;
}

std::string describe_goal(const Task& task) {
    const Goal& g = task.goal;
    std::string s;
    switch (g.kind) {
    case GoalKind::find: s = "Find the " + target_noun(g); break;
    case GoalKind::collect_all: s = "Collect all " + plural(target_noun(g)); break;
    case GoalKind::collect_exactly: {
        const int n = g.target_count.value_or(0);
        s = "Collect exactly " + std::to_string(n) + " " + (n == 1 ? target_noun(g) : plural(target_noun(g)));
        break;
    }
    case GoalKind::draw: {
        std::set<Color> used;
        for (const auto& seg : task.grid.target_segments) used.insert(seg.color);
        std::vector<std::string> names;
        for (Color c : used) names.emplace_back(to_string(c));
        s = "Draw the picture";
        if (names.size() == 1) s += " in " + names.front();
        else if (names.size() > 1) s += " using the colors " + join(names, " and ");
        break;
    }
    }
    if (!g.avoid_colors.empty()) {
        std::vector<std::string> names;
        for (Color c : g.avoid_colors) names.emplace_back(to_string(c));
        s += " without stepping on " + join(names, " or ") + " cells";
    }
    std::vector<std::string> clauses;
    for (const auto& c : task.constraints) clauses.push_back(describe_constraint(c));
    if (!clauses.empty()) s += " " + join(clauses, " and ");
    return s + ".";
}

std::string render_prompt(const Task& task, PromptStyle style) {
    std::string out;
    out += kPreamble;
    out += '\n';
    out += kGridProperties;
    out += '\n';
    out += kFunctions;
    out += '\n';
    out += kCue;
    out += '\n';
    out += "### Task:\n";
    out += style == PromptStyle::NL ? describe_task_nl(task) : describe_task_ascii(task);
    out += '\n';
    out += "### Goal:\n";
    out += describe_goal(task);
    out += "\n\n";
    out += "### Correct code:\n";
    return out;
}

}  // namespace xlogo
