#pragma once

#include <iosfwd>

namespace skcone::cli {

/// Entry point behind the skcone executable. Results go to `out`,
/// diagnostics to `err`. Returns 0 when every executed check passes,
/// 1 on check failures and 2 on usage, parse or configuration errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace skcone::cli
