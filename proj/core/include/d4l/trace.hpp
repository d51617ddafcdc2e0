#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace d4l {

// One per-iteration metrics record. delta_* and tracking_residual are empty
// on iterations where they are not evaluated (stride) or not defined for the
// algorithm (baselines have no tracking variable).
struct TraceRow {
  std::int64_t iter = 0;
  std::int64_t msg_exchanges = 0;
  double gamma = 0.0;
  double objective = 0.0;
  double consensus_err = 0.0;
  std::optional<double> delta_D;
  std::optional<double> delta_X;
  std::optional<double> delta_max_val;
  std::optional<double> tracking_residual;
  std::int64_t inner_iters_D = 0;
  std::int64_t inner_iters_X = 0;
  double wall_ms = 0.0;
};

std::string trace_header();
std::string trace_row_csv(const TraceRow& row);

using TraceSink = std::function<void(const TraceRow&)>;

// Append-only CSV writer, flushed at least every 100 rows.
class TraceWriter {
 public:
  explicit TraceWriter(const std::string& path);
  ~TraceWriter();

  void write(const TraceRow& row);
  void flush();

  TraceSink sink();

 private:
  std::ofstream out_;
  int rows_since_flush_ = 0;
};

std::vector<TraceRow> load_trace_csv(const std::string& path);

}  // namespace d4l
