#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vfm/harness/templates.hpp"
#include "vfm/market/market.hpp"

namespace vfm::harness {

struct ScenarioConfig {
  std::vector<fol::Sentence> universe;
  std::vector<market::AgentSpec> roster;
  market::EmpiricalReality reality = market::EmpiricalReality::arithmetic();
  std::uint64_t horizon = 1;
  FuelPolicy fuel;
  std::uint64_t seed = 0;  // reserved for stochastic templates; none shipped
  Rat window = Rat(1, 4);
};

// Line-based config text; see README for the schema. Throws ConfigError
// with a line number on any malformed input.
ScenarioConfig parse_scenario(const std::string& text);

ScenarioConfig load_scenario(const std::string& path);

struct Convergence {
  Rat amplitude;  // max - min over the trailing window fraction
  Rat last;
};

Convergence convergence_report(const std::vector<Rat>& series, const Rat& window);

struct RunArtifacts {
  std::string prices_csv;
  std::string audit_log;
  std::string ledger_txt;
  std::string report_txt;
};

// Deterministic: equal configs give byte-identical artifacts.
RunArtifacts run_scenario(const ScenarioConfig& cfg);

// Writes prices.csv, audit.log, ledger.txt, report.txt under `dir`.
void write_artifacts(const RunArtifacts& a, const std::string& dir);

}  // namespace vfm::harness
