#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "mhl/atomic.hpp"
#include "mhl/filtration.hpp"
#include "mhl/musielak.hpp"

namespace mhl::io {

using Json = nlohmann::ordered_json;

/// {"probs": [...], "levels": [[[pt, ...], ...], ...]}. Other keys are ignored
/// so the object can sit inside a larger document.
Json to_json(const Filtration& filtration);
Filtration filtration_from_json(const Json& j);

/// Point-value matrix [[f_0(x_0), ...], ...] for each level.
Json to_json(const Martingale& f);
Martingale martingale_from_json(const FiltrationPtr& filtration, const Json& j);

/// Exchange document: filtration fields plus {"martingales": {name: matrix}}.
struct Exchange {
  FiltrationPtr filtration;
  std::map<std::string, Martingale> martingales;
};
Json to_json(const Exchange& doc);
Exchange exchange_from_json(const Json& j);

/// ν as per-point integers, null for ∞.
Json to_json(const StoppingTime& tau);
StoppingTime stopping_time_from_json(const FiltrationPtr& filtration, const Json& j);

Json to_json(const Decomposition& d);
Decomposition decomposition_from_json(const Json& j);

/// {"kind":"power","p":..} | {"kind":"orlicz","orlicz":{..}} |
/// {"kind":"weighted","w":[..],"orlicz":{"type":"power"|"power_log","p":..}} |
/// {"kind":"variable","p":[..]}. Custom evaluators are not serializable.
Json to_json(const MOFunction& phi);
MOFunction phi_from_json(const Json& j);

}  // namespace mhl::io
