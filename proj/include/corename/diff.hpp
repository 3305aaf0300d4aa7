#pragma once

#include <string>
#include <string_view>

namespace corename {

/// Line-based unified diff ("--- a/path", "+++ b/path", @@ hunks). Empty when equal.
std::string unified_diff(std::string_view path, std::string_view before, std::string_view after, int context = 3);

}  // namespace corename
