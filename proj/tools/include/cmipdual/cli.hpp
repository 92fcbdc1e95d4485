#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cmipdual::cli {

enum ExitCode : int {
    Definitive = 0,
    Inconclusive = 1,  // Unknown verdict, BoxLimited value, missing witness
    InputError = 2,
    NumericalFailure = 3,
};

/// Runs one command. `args` excludes the program name. Machine-readable
/// output sits between "---BEGIN CERT---" and "---END CERT---".
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace cmipdual::cli
