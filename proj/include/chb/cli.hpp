#pragma once

#include <string>
#include <vector>

namespace chb {

/// Exit codes: 0 success, 1 configuration / validation / missing input, 2 runtime failure.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args);

}  // namespace chb
