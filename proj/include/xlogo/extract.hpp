#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace xlogo {

// Pulls the program out of a free-form model response:
//   1. the last fenced code block containing `def Run():`;
//   2. otherwise from the first `def Run():` through the last following line
//      that is blank or indented;
//   3. otherwise nothing.
std::optional<std::string> extract_code(std::string_view raw_output);

}  // namespace xlogo
