#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace isoltest::dsl {

struct SourceSpan {
    std::string file = "<input>";
    int line = 1, column = 1;          // 1-based start
    int end_line = 1, end_column = 1;  // inclusive end

    std::string to_string() const {
        return file + ":" + std::to_string(line) + ":" + std::to_string(column);
    }
};

enum class Severity { warning, error };

struct Diagnostic {
    Severity severity = Severity::error;
    std::string message;
    SourceSpan span;

    std::string to_string() const {
        return span.to_string() + ": " +
               (severity == Severity::error ? "error: " : "warning: ") + message;
    }
};

// Thrown for the first error-severity diagnostic; warnings accumulate in
// the parser and never abort.
struct ParseError : std::runtime_error {
    Diagnostic diagnostic;

    explicit ParseError(Diagnostic d) : std::runtime_error(d.to_string()), diagnostic(std::move(d)) {}
};

}  // namespace isoltest::dsl
