#pragma once

#include "curlme/solver.hpp"

#include <string>

namespace curlme {

/// RFC-4180-style CSV with a header row. Columns: step, sweep, rank,
/// delta_norm, residual_norm, gmres_iterations, gmres_restarts,
/// sigma_1..sigma_<sigma_cols>; absent singular values stay empty. Numeric
/// formatting is %.17g so equal runs produce byte-identical files.
std::string trace_csv(const std::vector<TraceRow>& rows, Index sigma_cols);

void write_trace_csv(const std::vector<TraceRow>& rows, Index sigma_cols,
                     const std::string& path);

}  // namespace curlme
