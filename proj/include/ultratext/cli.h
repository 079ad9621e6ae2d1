#pragma once

#include <iosfwd>

namespace ultratext {

// Exit status: 0 success, 2 usage/configuration error or missing input,
// 1 failure while running.
int run_command(int argc, const char* const* argv, std::ostream& out,
                std::ostream& err);

}  // namespace ultratext
