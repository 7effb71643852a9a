// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace shapecraft::program
{

enum class Severity
{
    Error,
    Warning,
};

struct Diagnostic
{
    int line = 0;
    Severity severity = Severity::Error;
    std::string message;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// `line N: error: message`, the form fed back to the Coder.
std::string render(const Diagnostic& d);

/// One rendered diagnostic per line.
std::string render(const std::vector<Diagnostic>& diagnostics);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

} // namespace shapecraft::program
