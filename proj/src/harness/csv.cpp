#include "nag/harness/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nag::harness {

const std::vector<std::string> kTraceColumns = {
    "k",          "f_gap_y",    "f_gap_x", "grad_norm_sq_y", "min_grad_norm_sq",
    "min_f_gap",  "k3_min_grad", "k2_min_gap", "lyap_gc",    "lyap_iv",
    "lyap_unified", "decrease_slack", "env_obj_y", "env_grad",  "cross_term"};

const std::vector<std::string> kOdeColumns = {"t",           "f_gap",      "lyap", "bound_E0_over_t2",
                                              "t3_inf_grad", "t2_inf_gap"};

const std::vector<std::string> kEnvelopeColumns = {"k", "bound", "measured", "satisfied"};

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void io_error(const std::filesystem::path& path, const std::string& what) {
  throw std::runtime_error(path.string() + ": " + what);
}

// Closed form only; the index identity behind it is checked by the verifier.
double gradnorm_envelope(std::size_t k, double r, double s, double d0) {
  const double kk = static_cast<double>(k);
  return 6.0 * r * r * d0 * d0 / (s * s * (kk + 1.0) * (kk + 2.0) * (2.0 * kk + 3.0 * r + 3.0));
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view text) {
  if (text == "nan" || text == "-nan") return kNaN;
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  return v;
}

std::string render_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

void write_text_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) io_error(tmp, "cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) io_error(tmp, "write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    io_error(path, "rename failed: " + ec.message());
  }
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  write_text_atomic(path, render_csv(table));
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error(path, "cannot open for reading");
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) io_error(path, "missing header");
  auto split = [](const std::string& s) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = s.find(',', start);
      fields.push_back(s.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return fields;
  };
  table.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto fields = split(line);
    if (fields.size() != table.header.size()) io_error(path, "line " + std::to_string(lineno) + ": wrong field count");
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) {
      try {
        row.push_back(parse_number(f));
      } catch (const std::invalid_argument& e) {
        io_error(path, "line " + std::to_string(lineno) + ": " + e.what());
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable trace_table(const Trace& trace) {
  CsvTable table;
  table.header = kTraceColumns;
  const std::size_t n = trace.size();
  if (n == 0) return table;

  const bool exact = trace.minimizer.has_value() && trace.d0.has_value();
  LyapunovSeries lyap;
  if (exact) lyap = lyapunov_series(trace);
  const std::vector<TailMetrics> tail = tail_profile(trace);
  const double r = trace.config.r;
  const double s = trace.config.s;

  table.rows.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const TraceRecord& rec = trace[k];
    table.rows.push_back({static_cast<double>(rec.k),
                          rec.gap_y,
                          rec.gap_x,
                          rec.grad_sq_y,
                          rec.min_grad_sq,
                          rec.min_gap,
                          tail[k].k3_min_grad_sq,
                          tail[k].k2_min_gap,
                          exact ? lyap.gradient_correction[k] : kNaN,
                          exact ? lyap.implicit_velocity[k] : kNaN,
                          exact ? lyap.unified[k] : kNaN,
                          exact ? lyap.decrease_slack[k] : kNaN,
                          exact ? envelope_objective(k, r, s, *trace.d0, Sequence::y) : kNaN,
                          exact ? gradnorm_envelope(k, r, s, *trace.d0) : kNaN,
                          rec.cross_term});
  }
  return table;
}

CsvTable ode_table(const ContinuousRateReport& report) {
  CsvTable table;
  table.header = kOdeColumns;
  for (const auto& smp : report.samples)
    table.rows.push_back({smp.t, smp.gap, smp.lyap, smp.bound, smp.t3_inf_grad_sq, smp.t2_inf_gap});
  return table;
}

CsvTable envelope_table(const EnvelopeReport& report) {
  CsvTable table;
  table.header = kEnvelopeColumns;
  for (const auto& e : report.entries)
    table.rows.push_back({static_cast<double>(e.k), e.bound, e.measured, e.satisfied ? 1.0 : 0.0});
  return table;
}

}  // namespace nag::harness
