#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "nag/diagnostics.hpp"
#include "nag/ode.hpp"

// Flat CSV channel for traces and reports. 17 significant digits, C locale,
// comma separated, LF terminated; values round-trip bit for bit.
namespace nag::harness {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

extern const std::vector<std::string> kTraceColumns;
extern const std::vector<std::string> kOdeColumns;
extern const std::vector<std::string> kEnvelopeColumns;

std::string format_number(double v);
// Accepts what format_number writes, plus nan/inf spellings.
double parse_number(std::string_view text);

std::string render_csv(const CsvTable& table);
// Writes to a temporary sibling and renames over the target.
// Throws std::runtime_error naming the path on I/O failure.
void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

// Lyapunov and envelope columns are NaN when the trace has no minimizer.
CsvTable trace_table(const Trace& trace);
CsvTable ode_table(const ContinuousRateReport& report);
CsvTable envelope_table(const EnvelopeReport& report);

void write_text_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace nag::harness
