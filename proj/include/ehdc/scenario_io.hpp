#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "ehdc/model.hpp"
#include "ehdc/oracle.hpp"

namespace ehdc::io {

/// Malformed document: bad JSON, missing fields, wrong types or unknown
/// names.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads a scenario document. Throws ParseError for malformed input and lets
/// DomainError / StructuralError through for values the model rejects.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);

/// check_scenario plus agreement with the document's "slots" field.
std::vector<std::string> scenario_violations(const nlohmann::json& doc,
                                             const Scenario& s);

nlohmann::json to_json(const Scenario& s);

/// Policies in a solve result document, for re-auditing.
oracle::Policies policies_from_json(const nlohmann::json& result,
                                    const Scenario& s);

}  // namespace ehdc::io
