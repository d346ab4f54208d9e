#pragma once

#include <string>
#include <vector>

namespace cxg {

// Runs one pipeline subcommand. Returns 0 on success, 1 on validation
// errors, 2 on I/O errors. Diagnostics go to stderr; data goes to files.
int dispatch(const std::vector<std::string>& args);

}  // namespace cxg
