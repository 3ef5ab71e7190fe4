#include "xlogo/dsl.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <sstream>

namespace xlogo {

namespace {

constexpr std::string_view kHeader = "def Run():";
constexpr int kIndentWidth = 2;

struct Line {
    int number = 0;  // 1-based
    int indent = 0;
    std::string_view text;  // without indentation and trailing whitespace
};

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

std::string_view rstrip(std::string_view s) {
    while (!s.empty() && is_blank(s.back())) s.remove_suffix(1);
    return s;
}

class Parser {
public:
    explicit Parser(std::string_view text) { split(text); }

    ParseResult run() {
        if (error_) return *error_;
        if (lines_.empty()) return FormatError{1, 1, "missing `def Run():` header"};
        const Line& header = lines_.front();
        if (header.indent != 0 || header.text != kHeader) {
            return FormatError{header.number, header.indent + 1, "expected `def Run():` header"};
        }
        pos_ = 1;
        if (pos_ == lines_.size()) return FormatError{header.number, 1, "empty `Run` body"};
        if (lines_[pos_].indent != kIndentWidth) {
            return FormatError{lines_[pos_].number, 1, "expected body indented by 2 spaces"};
        }
        Program program;
        if (lines_[pos_].text == "pass") {
            ++pos_;
        } else {
            program.body = block(1);
            if (error_) return *error_;
        }
        if (pos_ != lines_.size()) {
            const Line& l = lines_[pos_];
            return FormatError{l.number, l.indent + 1, l.indent == 0 ? "unexpected code after `Run` body" : "unexpected indentation"};
        }
        return program;
    }

private:
    void split(std::string_view text) {
        int number = 0;
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t end = text.find('\n', start);
            if (end == std::string_view::npos) end = text.size();
            std::string_view raw = text.substr(start, end - start);
            ++number;
            start = end + 1;
            std::string_view body = rstrip(raw);
            if (body.empty()) continue;
            int indent = 0;
            while (static_cast<std::size_t>(indent) < body.size() && body[indent] == ' ') ++indent;
            if (body[indent] == '\t') {
                fail(number, indent + 1, "tab indentation is not allowed");
                return;
            }
            std::string_view content = body.substr(indent);
            if (auto hash = content.find('#'); hash != std::string_view::npos) {
                fail(number, indent + static_cast<int>(hash) + 1, "comments are not allowed");
                return;
            }
            lines_.push_back({number, indent, content});
        }
    }

    void fail(int line, int column, std::string reason) {
        if (!error_) error_ = FormatError{line, column, std::move(reason)};
    }

    // Parses statements at indentation `depth` until a shallower line.
    std::vector<Statement> block(int depth) {
        std::vector<Statement> out;
        const int indent = depth * kIndentWidth;
        while (pos_ < lines_.size() && !error_) {
            const Line& l = lines_[pos_];
            if (l.indent < indent) break;
            if (l.indent > indent) {
                fail(l.number, 1, "unexpected indentation");
                break;
            }
            ++pos_;
            if (auto cmd = parse_command(l.text)) {
                out.push_back(action(*cmd));
                continue;
            }
            if (l.text.starts_with("for ")) {
                auto times = loop_header(l);
                if (!times) break;
                if (pos_ >= lines_.size() || lines_[pos_].indent <= indent) {
                    fail(l.number, l.indent + 1, "empty loop body");
                    break;
                }
                auto body = block(depth + 1);
                if (error_) break;
                out.push_back(repeat(*times, std::move(body)));
                continue;
            }
            if (l.text == "pass") {
                fail(l.number, l.indent + 1, "`pass` is only allowed as the whole `Run` body");
            } else {
                fail(l.number, l.indent + 1, "unknown command");
            }
        }
        return out;
    }

    std::optional<int> loop_header(const Line& l) {
        constexpr std::string_view prefix = "for i in range(";
        constexpr std::string_view suffix = "):";
        std::string_view t = l.text;
        if (!t.starts_with(prefix) || !t.ends_with(suffix) || t.size() <= prefix.size() + suffix.size()) {
            fail(l.number, l.indent + 1, "malformed loop header, expected `for i in range(n):`");
            return std::nullopt;
        }
        std::string_view digits = t.substr(prefix.size(), t.size() - prefix.size() - suffix.size());
        int value = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
        if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
            fail(l.number, l.indent + static_cast<int>(prefix.size()) + 1, "loop count must be an integer literal");
            return std::nullopt;
        }
        if (value < kMinRepeat || value > kMaxRepeat) {
            fail(l.number, l.indent + static_cast<int>(prefix.size()) + 1, "loop count must be between 2 and 10");
            return std::nullopt;
        }
        return value;
    }

    std::vector<Line> lines_;
    std::size_t pos_ = 0;
    std::optional<FormatError> error_;
};

void print_block(std::ostringstream& os, const std::vector<Statement>& body, int depth) {
    const std::string pad(static_cast<std::size_t>(depth * kIndentWidth), ' ');
    for (const auto& s : body) {
        if (s.is_action()) {
            os << '\n' << pad << print_command(s.action());
        } else {
            os << '\n' << pad << "for i in range(" << s.loop().times << "):";
            print_block(os, s.loop().body, depth + 1);
        }
    }
}

void flatten_into(const std::vector<Statement>& body, std::vector<Command>& out) {
    for (const auto& s : body) {
        if (s.is_action()) {
            out.push_back(s.action());
        } else {
            for (int k = 0; k < s.loop().times; ++k) flatten_into(s.loop().body, out);
        }
    }
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    constexpr auto max = std::numeric_limits<std::uint64_t>::max();
    if (a != 0 && b > max / a) return max;
    return a * b;
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
    constexpr auto max = std::numeric_limits<std::uint64_t>::max();
    return b > max - a ? max : a + b;
}

std::uint64_t unrolled(const std::vector<Statement>& body) {
    std::uint64_t n = 0;
    for (const auto& s : body) {
        n = saturating_add(n, s.is_action() ? 1 : saturating_mul(static_cast<std::uint64_t>(s.loop().times), unrolled(s.loop().body)));
    }
    return n;
}

int depth_of(const std::vector<Statement>& body) {
    int d = 0;
    for (const auto& s : body) {
        if (!s.is_action()) d = std::max(d, 1 + depth_of(s.loop().body));
    }
    return d;
}

void scan_concepts(const std::vector<Statement>& body, bool& loops, bool& vars) {
    for (const auto& s : body) {
        if (s.is_action()) {
            vars = vars || s.action().op == Command::Op::setpc;
        } else {
            loops = true;
            scan_concepts(s.loop().body, loops, vars);
        }
    }
}

bool starts_with_prefix(const Program& program, const std::vector<Command>& prefix) {
    if (program.body.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        const Statement& s = program.body[i];
        if (!s.is_action() || !(s.action() == prefix[i])) return false;
    }
    return true;
}

}  // namespace

std::string FormatError::message() const {
    std::ostringstream os;
    os << "line " << line << ", column " << column << ": " << reason;
    return os.str();
}

ParseResult parse_program(std::string_view text) { return Parser(text).run(); }

Program parse_program_or_throw(std::string_view text) {
    auto result = parse_program(text);
    if (!result) throw DataError("code does not parse: " + result.error().message());
    return std::move(result).program();
}

std::optional<Command> parse_command(std::string_view text) {
    if (text == "move_forward()") return Command::forward();
    if (text == "move_back()") return Command::backward();
    if (text == "turn_left()") return Command::left();
    if (text == "turn_right()") return Command::right();
    constexpr std::string_view open = "setpc(";
    if (text.starts_with(open) && text.ends_with(")") && text.size() >= open.size() + 3) {
        std::string_view arg = text.substr(open.size(), text.size() - open.size() - 1);
        const char q = arg.front();
        if ((q == '"' || q == '\'') && arg.size() >= 2 && arg.back() == q) {
            if (auto c = parse_color(arg.substr(1, arg.size() - 2))) return Command::setpc(*c);
        }
    }
    return std::nullopt;
}

std::string print_command(const Command& c) {
    switch (c.op) {
    case Command::Op::forward: return "move_forward()";
    case Command::Op::backward: return "move_back()";
    case Command::Op::left: return "turn_left()";
    case Command::Op::right: return "turn_right()";
    case Command::Op::setpc: return "setpc(\"" + std::string(to_string(c.color)) + "\")";
    }
    return {};
}

std::string print_program(const Program& program) {
    std::ostringstream os;
    os << kHeader;
    if (program.body.empty()) {
        os << "\n  pass";
    } else {
        print_block(os, program.body, 1);
    }
    return os.str();
}

int count_commands(const std::vector<Statement>& statements) {
    int n = 0;
    for (const auto& s : statements) n += s.is_action() ? 1 : 1 + count_commands(s.loop().body);
    return n;
}

int count_commands(const Program& program) { return count_commands(program.body); }

std::uint64_t unrolled_length(const Program& program) { return unrolled(program.body); }

std::vector<Command> flatten_actions(const Program& program) {
    std::vector<Command> out;
    flatten_into(program.body, out);
    return out;
}

int loop_depth(const Program& program) { return depth_of(program.body); }

std::string_view to_string(ConceptClass c) {
    switch (c) {
    case ConceptClass::BasicActions: return "basic_actions";
    case ConceptClass::Loops: return "loops";
    case ConceptClass::Variables: return "variables";
    case ConceptClass::LoopsAndVariables: return "loops_and_variables";
    }
    return {};
}

std::string_view display_name(ConceptClass c) {
    switch (c) {
    case ConceptClass::BasicActions: return "Basic Actions";
    case ConceptClass::Loops: return "Loops";
    case ConceptClass::Variables: return "Variables";
    case ConceptClass::LoopsAndVariables: return "Loops and Variables";
    }
    return {};
}

ConceptClass classify_concepts(const Program& program) {
    bool loops = false;
    bool vars = false;
    scan_concepts(program.body, loops, vars);
    if (loops && vars) return ConceptClass::LoopsAndVariables;
    if (loops) return ConceptClass::Loops;
    if (vars) return ConceptClass::Variables;
    return ConceptClass::BasicActions;
}

bool ConstraintReport::passed() const {
    return std::all_of(results.begin(), results.end(), [](const ConstraintResult& r) { return r.passed; });
}

ConstraintReport check_constraints(const Program& program, const std::vector<CodeConstraint>& constraints) {
    ConstraintReport report;
    const int count = count_commands(program);
    for (const auto& c : constraints) {
        bool ok = false;
        switch (c.kind) {
        case ConstraintKind::at_most: ok = c.n && count <= *c.n; break;
        case ConstraintKind::exactly: ok = c.n && count == *c.n; break;
        case ConstraintKind::start_by: ok = starts_with_prefix(program, c.prefix); break;
        }
        report.results.push_back({c, ok});
    }
    return report;
}

}  // namespace xlogo
