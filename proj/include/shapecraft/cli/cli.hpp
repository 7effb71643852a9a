// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace shapecraft::cli
{

enum ExitCode : int
{
    Success = 0,
    Failure = 1,  // a stage failed or the shape did not compile
    Usage = 2,    // bad arguments, configuration, credentials or input files
};

/// Runs the shapecraft command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace shapecraft::cli
