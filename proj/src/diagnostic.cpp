#include "poml/diagnostic.hpp"

#include <algorithm>

namespace poml {

std::string_view to_string(Severity s)
{
    return s == Severity::error ? "error" : "warning";
}

std::size_t count_errors(const Diagnostics& diags)
{
    return static_cast<std::size_t>(std::count_if(diags.begin(), diags.end(), [](const Diagnostic& d) {
        return d.severity == Severity::error;
    }));
}

} // namespace poml
