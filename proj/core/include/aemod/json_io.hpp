#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "aemod/lp.hpp"
#include "aemod/model.hpp"
#include "aemod/scenarios.hpp"
#include "aemod/sim.hpp"

namespace aemod {
namespace io {

using nlohmann::json;

/// Parse a zone from JSON. Field names mirror the struct; unknown fields
/// are errors. The scenario-builder alternative accepts "p_shape" instead
/// of "p", and "c_shape" + "sum_lambda_c" instead of "lambda_c", generating
/// the vectors with the standard shape families.
ZoneConfig zone_from_json(const json& j);
json to_json(const ZoneConfig& config);

Policy policy_from_json(const json& j);
json to_json(const Policy& policy);

/// Simulation job: a SimConfig whose policy may still be symbolic (a named
/// baseline or "optimal", resolved by the caller).
struct SimJob {
    sim::SimConfig config;                             // policy filled when explicit
    std::optional<scenarios::PolicyKind> policy_kind;  // set when symbolic
    bool seed_in_file = false;
};

SimJob sim_job_from_json(const json& j);

json to_json(const sim::SimReport& report);
std::string sim_report_csv_header();
std::string sim_report_csv_rows(const sim::SimReport& report);

json to_json(const lp::LpProblem& problem);
json to_json(const lp::LpSolution& solution);
Policy policy_from_solution_json(const json& j);  // reads "policy" back out
json to_json(const lp::KktReport& report);

scenarios::SweepSpec sweep_spec_from_json(const json& j);

json parse_file(const std::string& path);     // ConfigError with location on bad JSON
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace io
}  // namespace aemod
