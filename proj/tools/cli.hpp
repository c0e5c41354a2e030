#ifndef AGV_TOOLS_CLI_HPP
#define AGV_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace agv::cli {

// Exit codes of `check`: 0 holds, 1 violated, 2 resource or usage error.
// `replay` returns 1 when an error state is reached and 3 when the trace
// cannot be performed.
enum Exit { holds = 0, violated = 1, error = 2, not_performable = 3 };

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace agv::cli

#endif  // AGV_TOOLS_CLI_HPP
