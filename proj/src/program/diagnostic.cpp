// SPDX-License-Identifier: Apache-2.0
#include "shapecraft/program/diagnostic.hpp"

#include <algorithm>
#include <fmt/format.h>

namespace shapecraft::program
{

std::string render(const Diagnostic& d)
{
    return fmt::format("line {}: {}: {}", d.line, d.severity == Severity::Error ? "error" : "warning", d.message);
}

std::string render(const std::vector<Diagnostic>& diagnostics)
{
    std::string out;
    for (const auto& d: diagnostics)
    {
        out += render(d);
        out += '\n';
    }
    return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics)
{
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

} // namespace shapecraft::program
