#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "idim/imbalance.hpp"

namespace idim::io {

struct ClassRecord {
  int label = 0;
  std::int64_t count = 0;
  double id_raw = 0.0;
  double id_norm = 0.0;
  bool degenerate = false;
};

/// The JSON document the classwise and weights commands exchange. Every
/// config field that affects results is serialized, so a stored report can
/// be replayed without re-estimating.
struct ReportJson {
  int schema_version = 1;
  std::string tool_version;
  EstimatorSelector estimator;
  std::uint64_t seed = 0;
  std::vector<ClassRecord> classes;
  std::vector<MitigationReport> artifacts;

  ClassIdProfile profile() const;
  static ReportJson from_profile(const ClassIdProfile& profile, const EstimatorSelector& selector,
                                 std::uint64_t seed, const std::vector<int>& labels);
};

/// Serialization is round-trip stable field for field. Validation failures
/// throw SchemaError naming the offending field path.
std::string report_to_json(const ReportJson& report);
ReportJson report_from_json(const std::string& text);

void write_report(const std::string& path, const ReportJson& report);
ReportJson read_report(const std::string& path);

}  // namespace idim::io
