// Job configuration (JSON), batch evaluation driver and serialization of
// fields, residual reports and determinant scans.
#pragma once

#include <string>
#include <vector>

#include "hsgreen/halfspace.hpp"
#include "hsgreen/spectral.hpp"

namespace hsgreen {

struct OutputSpec {
  std::string format = "csv";          // field records; reports are JSON
  std::string path = "out";            // output directory
  std::string which = "displacement";  // displacement | traction | both
};

struct VerifySpec {
  bool traction_free = false;
  bool pde = false;
  bool reciprocity = false;
  bool hypothesis_scan = false;
};

struct JobConfig {
  Material material;
  std::vector<double> frequencies;
  Vec3 source = Vec3(0.0, 0.0, -1.0);
  std::vector<Vec3> receivers;  // expanded row-major when given as a grid
  QuadratureConfig quadrature;
  OutputSpec outputs;
  VerifySpec verify;
  double eps_damp = 0.0;
  ScanGrid scan;
  double scan_xi3 = -1.0;
};

// Throws ParseError (malformed JSON, message carries the position) or
// ValidationError (names the offending field and bound).
JobConfig parse_config(const std::string& text);
JobConfig load_config(const std::string& path);

// Inverse of parse_config up to grid expansion (receivers serialize as an
// explicit point list).
std::string serialize_config(const JobConfig& cfg);

// Writes fields.csv (and tractions.csv when requested) plus report.json /
// scan.json for enabled verifications. Per-point failures become flags in
// the output, not aborts. Returns a process exit status.
int run_job(const JobConfig& cfg, const std::string& out_dir);

std::string scan_report_json(const ScanReport& rep);
std::string residual_reports_json(const std::vector<ResidualReport>& reps);

}  // namespace hsgreen
