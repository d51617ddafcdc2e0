#include "d4l/trace.hpp"

#include <sstream>
#include <stdexcept>

#include "d4l/matrix_io.hpp"

namespace d4l {

std::string trace_header() {
  return "iter,msg_exchanges,gamma,objective,consensus_err,delta_D,delta_X,"
         "delta_max,tracking_residual,inner_iters_D,inner_iters_X,wall_ms";
}

namespace {

void append_opt(std::string& s, const std::optional<double>& v) {
  s += ',';
  if (v) s += format_double(*v);
}

}  // namespace

std::string trace_row_csv(const TraceRow& row) {
  std::string s;
  s += std::to_string(row.iter);
  s += ',';
  s += std::to_string(row.msg_exchanges);
  s += ',';
  s += format_double(row.gamma);
  s += ',';
  s += format_double(row.objective);
  s += ',';
  s += format_double(row.consensus_err);
  append_opt(s, row.delta_D);
  append_opt(s, row.delta_X);
  append_opt(s, row.delta_max_val);
  append_opt(s, row.tracking_residual);
  s += ',';
  s += std::to_string(row.inner_iters_D);
  s += ',';
  s += std::to_string(row.inner_iters_X);
  s += ',';
  s += format_double(row.wall_ms);
  return s;
}

TraceWriter::TraceWriter(const std::string& path) : out_(path) {
  if (!out_) throw std::runtime_error("TraceWriter: cannot open " + path);
  out_ << trace_header() << '\n';
}

TraceWriter::~TraceWriter() {
  if (out_.is_open()) out_.flush();
}

void TraceWriter::write(const TraceRow& row) {
  out_ << trace_row_csv(row) << '\n';
  if (++rows_since_flush_ >= 100) flush();
}

void TraceWriter::flush() {
  out_.flush();
  rows_since_flush_ = 0;
}

TraceSink TraceWriter::sink() {
  return [this](const TraceRow& row) { write(row); };
}

std::vector<TraceRow> load_trace_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_trace_csv: cannot open " + path);
  std::string line;
  if (!std::getline(f, line) || line != trace_header())
    throw std::runtime_error("load_trace_csv: unexpected header in " + path);
  std::vector<TraceRow> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    fields.push_back(cur);
    if (fields.size() != 12)
      throw std::runtime_error("load_trace_csv: malformed row in " + path);
    TraceRow r;
    r.iter = std::stoll(fields[0]);
    r.msg_exchanges = std::stoll(fields[1]);
    r.gamma = std::stod(fields[2]);
    r.objective = std::stod(fields[3]);
    r.consensus_err = std::stod(fields[4]);
    auto opt = [](const std::string& s) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      return std::stod(s);
    };
    r.delta_D = opt(fields[5]);
    r.delta_X = opt(fields[6]);
    r.delta_max_val = opt(fields[7]);
    r.tracking_residual = opt(fields[8]);
    r.inner_iters_D = std::stoll(fields[9]);
    r.inner_iters_X = std::stoll(fields[10]);
    r.wall_ms = std::stod(fields[11]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace d4l
