#pragma once

#include <string>
#include <vector>

#include "wulffcap/checks.hpp"

namespace wulffcap {

struct CheckInstance {
  std::string id;
  std::string label;
  CheckRun defaults;
  std::function<CheckReport(const CheckRun&)> runner;
};

// The fixed verification catalog behind `verify all` and the acceptance
// suite: every identity, inequality, boundary lemma, and rigidity relation
// instantiated on the named surface/norm battery with pinned tolerances.
const std::vector<CheckInstance>& builtinCatalog();
std::vector<std::string> catalogCheckIds();

SurfaceSpec namedSurface(const std::string& name);
MinkowskiNorm namedSurfaceNorm(const std::string& name);
std::vector<std::string> namedSurfaces();

struct VerifyOutcome {
  std::vector<CheckReport> reports;
  bool all_pass = true;
};

// Runs the catalog (id_filter empty or "all" runs everything), with optional
// level override for single-level instances, the given seed, and job-level
// parallelism. Reports come back sorted by (id, label) so output bytes do
// not depend on scheduling.
VerifyOutcome runCatalog(const std::string& id_filter, int level_override,
                         std::uint64_t seed, int jobs);

nlohmann::ordered_json reportsToJson(const std::vector<CheckReport>& reports);
void writeLadderCsv(const CheckReport& report, const std::string& path);

}  // namespace wulffcap
