#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "magvir/fields.hpp"
#include "magvir/grid.hpp"
#include "magvir/multipliers.hpp"

namespace magvir {

using json = nlohmann::json;

inline constexpr const char* kVersion = "magvir 1.0.0";
inline constexpr int kSchemaVersion = 1;

struct ScenarioInfo {
    std::string id;
    std::string summary;
    std::vector<std::string> exercises;  // identities and estimates, by name
    json config;
};

const std::vector<ScenarioInfo>& scenario_registry();
std::vector<std::string> list_scenarios();
std::string describe(const std::string& id);
const ScenarioInfo& find_scenario(const std::string& id);

struct Assertion {
    std::string name;
    double value = 0;
    double limit = 0;
    bool pass = false;
};

struct RunOptions {
    std::string out_dir = "out";
    bool has_seed = false;
    std::uint64_t seed = 0;
    bool checkpoints = true;
};

struct RunResult {
    std::string id;
    bool passed = false;
    bool partial = false;
    std::string error;
    std::vector<Assertion> assertions;
    std::string summary_path;
    json summary;
};

// Throws ConfigError naming the offending field.
void validate_config(const json& cfg);
// Builders exposed for tests.
GridSpec grid_from_config(const json& cfg);
PotentialSpec potential_from_config(const json& cfg, int n);
RadialMultiplier multiplier_from_config(const json& cfg, int n);
PlateauWeight psi_from_config(const json& cfg);

RunResult run_config(const json& cfg, const RunOptions& opt);
RunResult run_file(const std::string& path, const RunOptions& opt);
// Worker pool over configs; results in input order.
std::vector<RunResult> run_many(const std::vector<json>& configs, const RunOptions& opt, int threads);

std::uint64_t fnv1a(const std::string& s);
std::string config_hash(const json& cfg);
std::string report_stem(const std::string& id, const GridSpec& g);

// Oracle-generated reference values consumed by the test suites.
json derived_fixtures();

}  // namespace magvir
