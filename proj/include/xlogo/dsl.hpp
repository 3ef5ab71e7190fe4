#pragma once

// Parser, printer and static analysis for the Python-style turtle DSL:
//
//   def Run():
//     move_forward() | move_back() | turn_left() | turn_right()
//     setpc("<color>")
//     for i in range(<2..10>):
//       <statements, indented two more spaces>
//
// An empty body is written as a single `pass`.

#include "xlogo/types.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace xlogo {

struct Statement;

struct Repeat {
    int times = 2;
    std::vector<Statement> body;

    bool operator==(const Repeat&) const;
};

struct Statement {
    std::variant<Command, Repeat> node;

    bool is_action() const { return std::holds_alternative<Command>(node); }
    const Command& action() const { return std::get<Command>(node); }
    const Repeat& loop() const { return std::get<Repeat>(node); }

    bool operator==(const Statement&) const = default;
};

inline bool Repeat::operator==(const Repeat& o) const { return times == o.times && body == o.body; }

inline Statement action(Command c) { return Statement{c}; }
inline Statement repeat(int times, std::vector<Statement> body) { return Statement{Repeat{times, std::move(body)}}; }

struct Program {
    std::vector<Statement> body;

    bool operator==(const Program&) const = default;
};

inline constexpr int kMinRepeat = 2;
inline constexpr int kMaxRepeat = 10;

struct FormatError {
    int line = 0;    // 1-based
    int column = 0;  // 1-based
    std::string reason;

    std::string message() const;
};

class ParseResult {
public:
    ParseResult(Program p) : value_(std::move(p)) {}
    ParseResult(FormatError e) : value_(std::move(e)) {}

    bool ok() const { return std::holds_alternative<Program>(value_); }
    explicit operator bool() const { return ok(); }

    const Program& program() const& { return std::get<Program>(value_); }
    Program&& program() && { return std::get<Program>(std::move(value_)); }
    const FormatError& error() const { return std::get<FormatError>(value_); }

private:
    std::variant<Program, FormatError> value_;
};

ParseResult parse_program(std::string_view text);

// Like parse_program but throws DataError on malformed text.
Program parse_program_or_throw(std::string_view text);

std::string print_program(const Program& program);
std::string print_command(const Command& c);

// Parses one surface command such as `move_forward()` or `setpc("red")`.
std::optional<Command> parse_command(std::string_view text);

// Written statements: a loop header counts once, its body once, no unrolling.
int count_commands(const Program& program);
int count_commands(const std::vector<Statement>& statements);

// Number of commands flatten_actions would produce; saturates at UINT64_MAX.
std::uint64_t unrolled_length(const Program& program);

std::vector<Command> flatten_actions(const Program& program);

// Deepest loop nesting; 0 for loop-free programs.
int loop_depth(const Program& program);

enum class ConceptClass : std::uint8_t { BasicActions, Loops, Variables, LoopsAndVariables };

std::string_view to_string(ConceptClass c);
std::string_view display_name(ConceptClass c);

ConceptClass classify_concepts(const Program& program);

struct ConstraintResult {
    CodeConstraint constraint;
    bool passed = false;
};

struct ConstraintReport {
    std::vector<ConstraintResult> results;

    bool passed() const;
};

ConstraintReport check_constraints(const Program& program, const std::vector<CodeConstraint>& constraints);

}  // namespace xlogo
