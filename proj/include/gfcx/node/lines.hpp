#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace gfcx::node {

std::vector<std::string_view> split_bar(std::string_view line);
/// Splits on LF; a trailing LF does not produce an empty last element.
std::vector<std::string_view> split_lines(std::string_view text);
/// Replaces '|' and control bytes so text fits in one line field.
std::string sanitize_field(std::string_view text);

} // namespace gfcx::node
