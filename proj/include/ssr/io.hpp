#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssr/harmonics.hpp"
#include "ssr/recovery.hpp"

namespace ssr {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Measure files: {"atoms": [{"r": .., "theta": .., "c": ..}, ...]} with r the
// inclination and theta the azimuth.
AtomicMeasure measure_from_json(const std::string& text);
std::string measure_to_json(const AtomicMeasure& mu);
AtomicMeasure load_measure(const std::string& path);

// {"N": N, "values": [[re, im], ...]} in flat l^2 + l + m order.
MomentVector moments_from_json(const std::string& text);
std::string moments_to_json(const MomentVector& y);
MomentVector load_moments(const std::string& path);

std::string recovery_to_json(const RecoveryResult& r);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

using CsvTable = std::vector<std::vector<std::string>>;
void write_csv(std::ostream& os, const std::vector<std::string>& header, const CsvTable& rows);
CsvTable read_csv(std::istream& is);
// Whitespace-separated columns with a '#' header line.
void write_dat(std::ostream& os, const std::vector<std::string>& header, const CsvTable& rows);

std::string format_double(double v);

CsvTable sweep_table(const std::vector<SweepBin>& bins);
CsvTable convergence_table(const std::vector<ConvergenceRow>& rows);
extern const std::vector<std::string> kSweepHeader;
extern const std::vector<std::string> kConvergenceHeader;

}  // namespace ssr
