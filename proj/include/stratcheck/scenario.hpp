#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "stratcheck/regularity.hpp"
#include "stratcheck/strata.hpp"

namespace stratcheck {

inline constexpr int kScenarioVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";

/// A map as written in the scenario: expressions over the ambient names,
/// plus its composition with every chart.
struct NamedMap {
    std::vector<std::string> sources;
    std::vector<Expr> ambient;  // over the ambient names
    StratifiedMap map;
};

struct CheckSpec {
    std::string id;
    std::string kind;
    std::string path;  // JSON pointer of the check entry
    nlohmann::json body;
};

struct Scenario {
    nlohmann::json doc;
    std::string name;
    std::vector<std::string> ambient;
    std::optional<Stratification> strata;
    std::map<std::string, NamedMap> maps;
    std::vector<CheckSpec> checks;
    std::uint64_t hash = 0;
};

/// Builds a scenario from a parsed document. Throws ScenarioError with the
/// JSON pointer of the offending field.
Scenario load_scenario(const nlohmann::json& doc);

/// Parses text (comments allowed) and loads it.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);

/// Command-line values that replace per-check settings.
struct Overrides {
    std::optional<std::size_t> shells;
    std::optional<std::size_t> samples;
    std::optional<std::uint64_t> seed;
    std::optional<double> r0;
    std::optional<double> rho;
    std::optional<double> eps_b;
    std::optional<double> tol;  // comparison tolerance of Derivative, Frontier and Transversal checks
};

enum class CheckStatus { Pass, Fail, Error };
std::string_view to_string(CheckStatus s);

struct CheckOutcome {
    std::string id;
    std::string kind;
    CheckStatus status = CheckStatus::Error;
    nlohmann::json detail;
};

struct RunResult {
    std::vector<CheckOutcome> outcomes;
    nlohmann::json report;
    int exit_code = 0;  // 0 all pass, 1 some check fails, 2 some check errored
};

RunResult run_scenario(const Scenario& sc, const Overrides& ov = {});

nlohmann::json to_json(const ShellStat& s);
nlohmann::json to_json(const RegularityVerdict& v);
nlohmann::json to_json(const ProjectionReport& r);
nlohmann::json to_json(const TransversalReport& r);
nlohmann::json to_json(const FrontierReport& r);

}  // namespace stratcheck
