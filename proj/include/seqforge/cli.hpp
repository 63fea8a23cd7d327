#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace seqforge::cli {

enum ExitCode { kOk = 0, kUsage = 1, kDataError = 2, kNoResult = 3 };

// args excludes the program name. Errors are written to err as
// "ERROR:<code>:<message>".
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace seqforge::cli
