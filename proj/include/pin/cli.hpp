#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pin::cli {

// Exit codes: 0 success / equivalent(-up-to-family), 1 not-equivalent,
// 2 usage or parse error, 3 inconclusive (truncated).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace pin::cli
