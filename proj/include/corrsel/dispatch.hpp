#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "corrsel/selectors.hpp"
#include "corrsel/types.hpp"

namespace corrsel {

using MethodParams = std::variant<NnsrParams, RansacParams, StParams, GtmParams, UsacParams,
                                  VfcParams, GmsParams, LpmParams>;

struct MethodSpec {
  std::string name;
  MethodParams params;
};

// Known method names, in canonical order.
const std::vector<std::string>& method_names();

// Spec with default parameters; throws InvalidInput for unknown names.
MethodSpec method_defaults(const std::string& name);

// Parameter keys a method accepts, in serialization order.
std::vector<std::string> param_keys(const std::string& name);

// Applies one key=value override (numbers parsed, model kinds by name);
// throws InvalidInput on unknown keys or malformed values.
void apply_param(MethodSpec& spec, const std::string& key, const std::string& value);

// Ordered (key, printed value) view of the effective parameters.
std::vector<std::pair<std::string, std::string>> describe_params(const MethodSpec& spec);

SelectionResult run_method(const MethodSpec& spec, const CorrespondenceSet& set,
                           std::uint64_t seed);

}  // namespace corrsel
