#include "curlme/trace.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace curlme {

std::string trace_csv(const std::vector<TraceRow>& rows, Index sigma_cols) {
  std::string out = "step,sweep,rank,delta_norm,residual_norm,gmres_iterations,gmres_restarts";
  char buf[64];
  for (Index i = 1; i <= sigma_cols; ++i) {
    std::snprintf(buf, sizeof(buf), ",sigma_%lld", static_cast<long long>(i));
    out += buf;
  }
  out += "\n";
  for (const TraceRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%d,", r.step, r.sweep, r.rank);
    out += buf;
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,", r.delta_norm, r.residual_norm);
    out += buf;
    std::snprintf(buf, sizeof(buf), "%d,%d", r.gmres_iterations, r.gmres_restarts);
    out += buf;
    for (Index i = 0; i < sigma_cols; ++i) {
      if (i < r.sigma.size()) {
        std::snprintf(buf, sizeof(buf), ",%.17g", r.sigma(i));
        out += buf;
      } else {
        out += ",";
      }
    }
    out += "\n";
  }
  return out;
}

void write_trace_csv(const std::vector<TraceRow>& rows, Index sigma_cols,
                     const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << trace_csv(rows, sigma_cols);
}

}  // namespace curlme
