#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "catchup/scenarios.hpp"

namespace catchup {

// Schema violation with a precise location. what() carries
// "<file>:<line>: [section] key '<key>': <message>" (line/key when known).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string msg, std::string file, int line, std::string section,
              std::string key);
  const std::string& file() const { return file_; }
  int line() const { return line_; }
  const std::string& section() const { return section_; }
  const std::string& key() const { return key_; }

 private:
  std::string file_, section_, key_;
  int line_ = 0;
};

struct RunSettings {
  double h = -1;        // <= 0: use the scenario default
  int refine = 0;       // additional halvings; > 0 runs a convergence study
  std::uint64_t seed = 42;
  std::optional<double> slack;  // decay slack; unset = 5 h
  std::optional<double> delta;  // step-rule delta; unset = scenario default
  std::string out_dir;
};

struct LyapunovSettings {
  bool enabled = true;          // evaluate the pair when the scenario has one
  int samples = 64;
  std::optional<double> radius; // velocity truncation; unset = M(x0)
};

struct ScenarioConfig {
  std::string kind;
  std::string name;
  ScenarioBundle bundle;
  RunSettings run;
  LyapunovSettings lyap;
  std::string notes;  // extra report text assembled at load time
};

// INI-style scenario description; full schema in docs/scenario-format.md.
ScenarioConfig load_scenario_config_text(const std::string& text,
                                         const std::string& filename = "<inline>");
ScenarioConfig load_scenario_config_file(const std::string& path);

}  // namespace catchup
