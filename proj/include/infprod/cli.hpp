#pragma once

#include <iosfwd>
#include <string>

#include "infprod/matrix.hpp"
#include "infprod/product_engine.hpp"

namespace infprod::cli {

enum ExitCode : int {
    kOk = 0,
    kNotRcp = 1,
    kParseError = 2,
    kRefused = 3,
    kUndecided = 4,
    kInternalError = 5,
};

/// Runs the `infprod` command line. Normal output goes to `out` only once a
/// command has completed; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// %.17g, with negative zero printed as 0.
std::string format_real(double v);

/// Nested-array text, e.g. [[1, 1.75], [0, 0.125]]; complex entries as [re, im].
std::string format_matrix(const ComplexMatrix& m);

inline constexpr const char* kTraceHeader = "n,norm_X,norm_Y,norm_D,bound,norm_gamma";

std::string format_trace_row(const TraceRow& row);

}  // namespace infprod::cli
