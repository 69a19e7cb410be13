#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rpomdp/hsvi.hpp"
#include "rpomdp/model.hpp"
#include "rpomdp/policy_graph.hpp"
#include "rpomdp/transforms.hpp"

namespace rpomdp {

/// Emission uses ordered maps so the canonical form is byte-stable.
using Json = nlohmann::ordered_json;

using AnyModel = std::variant<Pomdp, MePomdp, AbPomdp, Posg>;

Json model_to_json(const Pomdp& m);
Json model_to_json(const MePomdp& m);
Json model_to_json(const AbPomdp& m);
Json model_to_json(const Posg& m);
Json model_to_json(const AnyModel& m);

/// Parses any model document; throws ParseError on structural issues.
/// Probabilities may be numbers or decimal strings.
AnyModel parse_model(const Json& j);

std::vector<std::string> validate_any(const AnyModel& m);
std::string model_type_name(const AnyModel& m);

Json policy_to_json(const PolicyGraph& g, const std::vector<std::string>& actions,
                    const std::vector<std::string>& observations);
Json policy_to_json(const MixedPolicy& mp, const std::vector<std::string>& actions,
                    const std::vector<std::string>& observations);
MixedPolicy parse_policy(const Json& j, const std::vector<std::string>& actions,
                         const std::vector<std::string>& observations);

Json record_to_json(const TransformRecord& record);

/// Trace CSV: header iter,elapsed_s,lb,ub,gap; 9 significant digits.
std::string trace_to_csv(const std::vector<TraceRow>& trace);

std::string dump_canonical(const Json& j);
Json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace rpomdp
