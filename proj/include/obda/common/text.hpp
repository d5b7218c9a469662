#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace obda::text {

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
bool iequals(std::string_view a, std::string_view b);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool is_identifier(std::string_view s);
/// Shortest decimal that round-trips the double.
std::string format_double(double v);

}  // namespace obda::text
