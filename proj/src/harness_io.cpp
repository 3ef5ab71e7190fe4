#include "xlogo/harness.hpp"

#include "xlogo/dsl.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace xlogo {

using nlohmann::json;

namespace {

json position_json(Position p) { return json::array({p.row, p.col}); }

const json& require(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw DataError(where + ": missing field '" + key + "'");
    return *it;
}

int as_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw DataError(where + ": expected an integer");
    return j.get<int>();
}

std::string as_string(const json& j, const std::string& where) {
    if (!j.is_string()) throw DataError(where + ": expected a string");
    return j.get<std::string>();
}

const json& as_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw DataError(where + ": expected an object");
    return j;
}

const json& as_array(const json& j, const std::string& where) {
    if (!j.is_array()) throw DataError(where + ": expected an array");
    return j;
}

Color color_from(const json& j, const std::string& where) {
    auto c = parse_color(as_string(j, where));
    if (!c) throw DataError(where + ": unknown color '" + j.get<std::string>() + "'");
    return *c;
}

Position position_from(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) throw DataError(where + ": expected [row, col]");
    return {as_int(j[0], where), as_int(j[1], where)};
}

Position row_col_from(const json& j, const std::string& where) {
    return {as_int(require(j, "row", where), where + ".row"), as_int(require(j, "col", where), where + ".col")};
}

void warn_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where,
                  std::vector<std::string>* warnings) {
    if (!warnings) return;
    for (const auto& [key, _] : obj.items()) {
        bool found = false;
        for (const char* k : known) found = found || key == k;
        if (!found) warnings->push_back(where + ": unknown field '" + key + "'");
    }
}

Goal goal_from(const json& j, std::vector<std::string>* warnings) {
    const std::string where = "goal";
    as_object(j, where);
    warn_unknown(j, {"kind", "target_kind", "target_color", "target_count", "avoid_colors"}, where, warnings);
    Goal g;
    const std::string kind = as_string(require(j, "kind", where), "goal.kind");
    auto k = parse_goal_kind(kind);
    if (!k) throw DataError("goal.kind: unknown goal kind '" + kind + "'");
    g.kind = *k;
    if (auto it = j.find("target_kind"); it != j.end() && !it->is_null()) g.target_kind = as_string(*it, "goal.target_kind");
    if (auto it = j.find("target_color"); it != j.end() && !it->is_null()) g.target_color = color_from(*it, "goal.target_color");
    if (auto it = j.find("target_count"); it != j.end() && !it->is_null()) g.target_count = as_int(*it, "goal.target_count");
    if (auto it = j.find("avoid_colors"); it != j.end()) {
        for (const auto& c : as_array(*it, "goal.avoid_colors")) g.avoid_colors.insert(color_from(c, "goal.avoid_colors"));
    }
    return g;
}

CodeConstraint constraint_from(const json& j, std::size_t i, std::vector<std::string>* warnings) {
    const std::string where = "constraints[" + std::to_string(i) + "]";
    as_object(j, where);
    warn_unknown(j, {"kind", "n", "prefix"}, where, warnings);
    const std::string kind = as_string(require(j, "kind", where), where + ".kind");
    auto k = parse_constraint_kind(kind);
    if (!k) throw DataError(where + ".kind: unknown constraint kind '" + kind + "'");
    CodeConstraint c;
    c.kind = *k;
    if (c.kind == ConstraintKind::start_by) {
        for (const auto& cmd : as_array(require(j, "prefix", where), where + ".prefix")) {
            const std::string text = as_string(cmd, where + ".prefix");
            auto parsed = parse_command(text);
            if (!parsed) throw DataError(where + ".prefix: unknown command '" + text + "'");
            c.prefix.push_back(*parsed);
        }
    } else {
        c.n = as_int(require(j, "n", where), where + ".n");
    }
    return c;
}

GridWorld grid_from(const json& j, std::vector<std::string>* warnings) {
    as_object(j, "grid");
    warn_unknown(j, {"rows", "cols", "turtle", "items", "cell_colors", "walls", "forbidden", "target_segments"}, "grid",
                 warnings);
    GridWorld g;
    g.rows = as_int(require(j, "rows", "grid"), "grid.rows");
    g.cols = as_int(require(j, "cols", "grid"), "grid.cols");
    const json& turtle = as_object(require(j, "turtle", "grid"), "grid.turtle");
    g.turtle.position = row_col_from(turtle, "grid.turtle");
    const std::string dir = as_string(require(turtle, "dir", "grid.turtle"), "grid.turtle.dir");
    auto d = parse_direction(dir);
    if (!d) throw DataError("grid.turtle.dir: unknown direction '" + dir + "'");
    g.turtle.direction = *d;

    if (auto it = j.find("items"); it != j.end()) {
        for (const auto& item : as_array(*it, "grid.items")) {
            const std::string where = "grid.items";
            as_object(item, where);
            warn_unknown(item, {"row", "col", "kind", "shape", "color", "count"}, where, warnings);
            Item out;
            out.position = row_col_from(item, where);
            out.kind = as_string(require(item, "kind", where), where + ".kind");
            if (auto s = item.find("shape"); s != item.end() && !s->is_null()) out.shape = as_string(*s, where + ".shape");
            if (auto c = item.find("color"); c != item.end() && !c->is_null()) out.color = color_from(*c, where + ".color");
            if (auto n = item.find("count"); n != item.end()) out.count = as_int(*n, where + ".count");
            g.items.push_back(std::move(out));
        }
    }
    if (auto it = j.find("cell_colors"); it != j.end()) {
        for (const auto& cell : as_array(*it, "grid.cell_colors")) {
            as_object(cell, "grid.cell_colors");
            const Position p = row_col_from(cell, "grid.cell_colors");
            if (!g.cell_colors.emplace(p, color_from(require(cell, "color", "grid.cell_colors"), "grid.cell_colors.color")).second) {
                throw DataError("grid.cell_colors: duplicate cell (" + std::to_string(p.row) + ", " + std::to_string(p.col) + ")");
            }
        }
    }
    if (auto it = j.find("walls"); it != j.end()) {
        for (const auto& w : as_array(*it, "grid.walls")) {
            if (!w.is_array() || w.size() != 2) throw DataError("grid.walls: expected [[r, c], [r, c]]");
            const Position a = position_from(w[0], "grid.walls");
            const Position b = position_from(w[1], "grid.walls");
            g.walls.push_back(Edge::between(a, b));
        }
    }
    if (auto it = j.find("forbidden"); it != j.end()) {
        for (const auto& p : as_array(*it, "grid.forbidden")) g.forbidden.push_back(position_from(p, "grid.forbidden"));
    }
    if (auto it = j.find("target_segments"); it != j.end()) {
        for (const auto& s : as_array(*it, "grid.target_segments")) {
            as_object(s, "grid.target_segments");
            const Position a = position_from(require(s, "a", "grid.target_segments"), "grid.target_segments.a");
            const Position b = position_from(require(s, "b", "grid.target_segments"), "grid.target_segments.b");
            g.target_segments.push_back(
                {Edge::between(a, b), color_from(require(s, "color", "grid.target_segments"), "grid.target_segments.color")});
        }
    }
    return g;
}

}  // namespace

TaskCodePair Record::pair() const {
    if (!code) throw DataError("task '" + task.id + "' has no solution code");
    return {task, *code};
}

json task_to_json(const Task& task) {
    json goal = {{"kind", to_string(task.goal.kind)}};
    if (task.goal.target_kind) goal["target_kind"] = *task.goal.target_kind;
    if (task.goal.target_color) goal["target_color"] = to_string(*task.goal.target_color);
    if (task.goal.target_count) goal["target_count"] = *task.goal.target_count;
    goal["avoid_colors"] = json::array();
    for (Color c : task.goal.avoid_colors) goal["avoid_colors"].push_back(to_string(c));

    json constraints = json::array();
    for (const auto& c : task.constraints) {
        json jc = {{"kind", to_string(c.kind)}};
        if (c.kind == ConstraintKind::start_by) {
            jc["prefix"] = json::array();
            for (const auto& cmd : c.prefix) jc["prefix"].push_back(print_command(cmd));
        } else {
            jc["n"] = c.n.value_or(0);
        }
        constraints.push_back(std::move(jc));
    }

    const GridWorld& w = task.grid;
    json grid = {{"rows", w.rows},
                 {"cols", w.cols},
                 {"turtle", {{"row", w.turtle.position.row}, {"col", w.turtle.position.col}, {"dir", to_string(w.turtle.direction)}}}};
    grid["items"] = json::array();
    for (const auto& item : w.items) {
        json ji = {{"row", item.position.row}, {"col", item.position.col}, {"kind", item.kind}, {"count", item.count}};
        if (item.shape) ji["shape"] = *item.shape;
        if (item.color) ji["color"] = to_string(*item.color);
        grid["items"].push_back(std::move(ji));
    }
    grid["cell_colors"] = json::array();
    for (const auto& [p, c] : w.cell_colors) grid["cell_colors"].push_back({{"row", p.row}, {"col", p.col}, {"color", to_string(c)}});
    grid["walls"] = json::array();
    for (const auto& e : w.walls) grid["walls"].push_back(json::array({position_json(e.a), position_json(e.b)}));
    grid["forbidden"] = json::array();
    for (const auto& p : w.forbidden) grid["forbidden"].push_back(position_json(p));
    grid["target_segments"] = json::array();
    for (const auto& s : w.target_segments) {
        grid["target_segments"].push_back({{"a", position_json(s.edge.a)}, {"b", position_json(s.edge.b)}, {"color", to_string(s.color)}});
    }

    return {{"id", task.id},
            {"task_type", to_string(task.task_type)},
            {"goal", std::move(goal)},
            {"constraints", std::move(constraints)},
            {"grid", std::move(grid)}};
}

json record_to_json(const Record& record) {
    json j = record.extra.is_object() ? record.extra : json::object();
    j.update(task_to_json(record.task));
    if (record.code) j["code"] = *record.code;
    return j;
}

Record record_from_json(const json& j, std::vector<std::string>* warnings) {
    as_object(j, "record");
    Record r;
    r.task.id = as_string(require(j, "id", "record"), "id");
    const std::string type = as_string(require(j, "task_type", "record"), "task_type");
    auto t = parse_task_type(type);
    if (!t) throw DataError("task_type: unknown task type '" + type + "'");
    r.task.task_type = *t;
    r.task.goal = goal_from(require(j, "goal", "record"), warnings);
    if (auto it = j.find("constraints"); it != j.end()) {
        std::size_t i = 0;
        for (const auto& c : as_array(*it, "constraints")) r.task.constraints.push_back(constraint_from(c, i++, warnings));
    }
    r.task.grid = grid_from(require(j, "grid", "record"), warnings);
    if (auto it = j.find("code"); it != j.end() && !it->is_null()) r.code = as_string(*it, "code");

    static const std::set<std::string> known = {"id", "task_type", "goal", "constraints", "grid", "code"};
    for (const auto& [key, value] : j.items()) {
        if (known.count(key)) continue;
        r.extra[key] = value;
        if (warnings) warnings->push_back("unknown field '" + key + "' (preserved)");
    }
    return r;
}

namespace {

Record checked_record(const json& j, std::size_t line, std::vector<std::string>& warnings) {
    const std::string where = "line " + std::to_string(line);
    std::vector<std::string> local;
    Record r;
    try {
        r = record_from_json(j, &local);
    } catch (const DataError& e) {
        throw DataError(where + ": " + e.what());
    }
    const ValidationReport report = validate_task(r.task);
    if (!report.empty()) throw DataError(where + ": invalid task '" + r.task.id + "': " + report.front());
    for (auto& w : local) warnings.push_back(where + ": " + w);
    return r;
}

}  // namespace

Dataset parse_dataset(std::string_view text) {
    Dataset out;
    const std::string whole(text);
    std::size_t first = whole.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return out;

    // A single (possibly pretty-printed) object or an array of records.
    json doc = json::parse(whole, nullptr, false);
    if (!doc.is_discarded() && (doc.is_object() || doc.is_array())) {
        const std::size_t line = 1 + static_cast<std::size_t>(std::count(whole.begin(), whole.begin() + static_cast<std::ptrdiff_t>(first), '\n'));
        if (doc.is_object()) {
            out.records.push_back(checked_record(doc, line, out.warnings));
        } else {
            for (const auto& j : doc) out.records.push_back(checked_record(j, line, out.warnings));
        }
        return out;
    }

    std::istringstream in(whole);
    std::string row;
    std::size_t line = 0;
    while (std::getline(in, row)) {
        ++line;
        if (row.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j = json::parse(row, nullptr, false);
        if (j.is_discarded()) throw DataError("line " + std::to_string(line) + ": malformed JSON");
        out.records.push_back(checked_record(j, line, out.warnings));
    }
    return out;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

Dataset load_dataset(const std::filesystem::path& path) {
    try {
        return parse_dataset(read_text_file(path));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

std::string dump_dataset(const std::vector<Record>& records) {
    std::string out;
    for (const auto& r : records) {
        out += record_to_json(r).dump();
        out += '\n';
    }
    return out;
}

void save_dataset(const std::vector<Record>& records, const std::filesystem::path& path) {
    write_text_file(path, dump_dataset(records));
}

std::vector<Prediction> parse_predictions(std::string_view jsonl) {
    std::vector<Prediction> out;
    std::istringstream in{std::string(jsonl)};
    std::string row;
    std::size_t line = 0;
    while (std::getline(in, row)) {
        ++line;
        if (row.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = "predictions line " + std::to_string(line);
        json j = json::parse(row, nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw DataError(where + ": malformed JSON");
        Prediction p;
        p.task_id = as_string(require(j, "id", where), where + ": id");
        if (auto it = j.find("raw_output"); it != j.end() && !it->is_null()) p.raw_output = as_string(*it, where + ": raw_output");
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
    try {
        return parse_predictions(read_text_file(path));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void save_predictions(const std::vector<Prediction>& predictions, const std::filesystem::path& path) {
    std::string out;
    for (const auto& p : predictions) {
        out += json{{"id", p.task_id}, {"raw_output", p.raw_output}}.dump();
        out += '\n';
    }
    write_text_file(path, out);
}

}  // namespace xlogo
