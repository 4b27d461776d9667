#pragma once

#include <iostream>

namespace mabuchi {

/// Entry point of mabuchi_lab. Exit codes: 0 success, 1 computation error,
/// 2 configuration error. Prints one summary line to out.
int run_command(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr);

}  // namespace mabuchi
