#pragma once

#include <nlohmann/json.hpp>

#include "queuechan/capacity.hpp"
#include "queuechan/coding.hpp"
#include "queuechan/errors.hpp"
#include "queuechan/noise.hpp"
#include "queuechan/pipeline.hpp"
#include "queuechan/pmf.hpp"
#include "queuechan/sim.hpp"

namespace queuechan {

// Parsing is strict: a key that is neither required nor optional for the
// object at hand is a ConfigError, as is a missing required key or a value
// of the wrong type.

nlohmann::json dist_to_json(const ParametricDist& dist);
ParametricDist dist_from_json(const nlohmann::json& j);

nlohmann::json noise_to_json(const NoiseModel& nm);
NoiseModel noise_from_json(const nlohmann::json& j);

/// {"arrival": {"mode": "interarrival"|"batch", "dist": {...}},
///  "service": {...}, "noise": {...}, "horizon_departures": int,
///  optional "warmup_departures", "seed", "record_per_slot"}
SimConfig sim_config_from_json(const nlohmann::json& j);
nlohmann::json sim_config_to_json(const SimConfig& cfg);

nlohmann::json stationary_to_json(const StationaryDist& pi);
nlohmann::json report_to_json(const CapacityReport& rep);
nlohmann::json summary_to_json(const EmpiricalSummary& s);
nlohmann::json experiment_to_json(const ExperimentResult& r);
nlohmann::json paired_to_json(const PairedExperiment& p);
nlohmann::json ordering_to_json(const OrderingTable& t);
nlohmann::json invariance_to_json(const InvarianceReport& r);

/// {"error": {"type": <error kind>, "message": ...}}
nlohmann::json error_to_json(const Error& e);

}  // namespace queuechan
