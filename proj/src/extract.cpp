#include "xlogo/extract.hpp"

#include <vector>

namespace xlogo {

namespace {

constexpr std::string_view kHeader = "def Run():";
constexpr std::string_view kFence = "```";

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string join(const std::vector<std::string_view>& lines, std::size_t first, std::size_t last) {
    std::string out;
    for (std::size_t i = first; i < last; ++i) {
        if (i > first) out += '\n';
        out += lines[i];
    }
    return out;
}

std::optional<std::string> last_fenced_block(const std::vector<std::string_view>& lines) {
    std::optional<std::string> found;
    std::size_t i = 0;
    while (i < lines.size()) {
        if (!trim(lines[i]).starts_with(kFence)) {
            ++i;
            continue;
        }
        std::size_t close = i + 1;
        while (close < lines.size() && !trim(lines[close]).starts_with(kFence)) ++close;
        if (close == lines.size()) break;  // unterminated fence
        std::string body = join(lines, i + 1, close);
        if (body.find(kHeader) != std::string::npos) found = std::move(body);
        i = close + 1;
    }
    return found;
}

std::optional<std::string> bare_program(const std::vector<std::string_view>& lines) {
    std::size_t first = 0;
    while (first < lines.size() && lines[first].find(kHeader) == std::string_view::npos) ++first;
    if (first == lines.size()) return std::nullopt;
    std::string_view head = lines[first].substr(lines[first].find(kHeader));
    std::size_t last = first;
    for (std::size_t i = first + 1; i < lines.size(); ++i) {
        const std::string_view l = lines[i];
        const bool blank = trim(l).empty();
        const bool indented = !l.empty() && (l.front() == ' ' || l.front() == '\t');
        if (!blank && !indented) break;
        if (!blank) last = i;
    }
    std::string out(head);
    for (std::size_t i = first + 1; i <= last; ++i) {
        out += '\n';
        out += lines[i];
    }
    return out;
}

}  // namespace

std::optional<std::string> extract_code(std::string_view raw_output) {
    const auto lines = split_lines(raw_output);
    if (auto fenced = last_fenced_block(lines)) return fenced;
    return bare_program(lines);
}

}  // namespace xlogo
