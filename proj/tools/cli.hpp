#pragma once

#include <iosfwd>

namespace spm {

/// Exit codes: 0 ok, 1 usage, 2 invalid input, 3 verification failed,
/// 4 internal error.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace spm
