#include "queuechan/json_io.hpp"

#include <initializer_list>
#include <string>

#include "queuechan/errors.hpp"

namespace queuechan {

namespace {

using nlohmann::json;

void check_keys(const json& j, const char* what, std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional = {}) {
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
  for (const char* k : required) {
    if (!j.contains(k))
      throw ConfigError(std::string(what) + " is missing required key \"" + k + "\"");
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : required) known = known || it.key() == k;
    for (const char* k : optional) known = known || it.key() == k;
    if (!known)
      throw ConfigError(std::string(what) + " has unknown key \"" + it.key() + "\"");
  }
}

double get_num(const json& j, const char* key, const char* what) {
  const json& v = j.at(key);
  if (!v.is_number())
    throw ConfigError(std::string(what) + "." + key + " must be a number");
  return v.get<double>();
}

std::int64_t get_int(const json& j, const char* key, const char* what) {
  const json& v = j.at(key);
  if (!v.is_number_integer())
    throw ConfigError(std::string(what) + "." + key + " must be an integer");
  return v.get<std::int64_t>();
}

std::uint64_t get_uint(const json& j, const char* key, const char* what) {
  const json& v = j.at(key);
  if (!(v.is_number_integer() && (v.is_number_unsigned() || v.get<std::int64_t>() >= 0)))
    throw ConfigError(std::string(what) + "." + key + " must be a non-negative integer");
  return v.get<std::uint64_t>();
}

bool get_bool(const json& j, const char* key, const char* what) {
  const json& v = j.at(key);
  if (!v.is_boolean()) throw ConfigError(std::string(what) + "." + key + " must be a boolean");
  return v.get<bool>();
}

std::string get_str(const json& j, const char* key, const char* what) {
  const json& v = j.at(key);
  if (!v.is_string()) throw ConfigError(std::string(what) + "." + key + " must be a string");
  return v.get<std::string>();
}

std::vector<double> num_array(const json& v, const std::string& what) {
  if (!v.is_array()) throw ConfigError(what + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const json& e : v) {
    if (!e.is_number()) throw ConfigError(what + " must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

json dist_to_json(const ParametricDist& dist) {
  struct V {
    json operator()(const Deterministic& d) const {
      return {{"kind", "deterministic"}, {"value", d.value}};
    }
    json operator()(const Geometric& g) const {
      return {{"kind", "geometric"}, {"rate", g.rate}};
    }
    json operator()(const TwoPoint& t) const {
      return {{"kind", "two_point"}, {"epsilon", t.epsilon}, {"n", t.n}};
    }
    json operator()(const SumOfGeometric& s) const {
      return {{"kind", "sum_of_geometric"}, {"rates", s.rates}};
    }
    json operator()(const MixtureOfGeometric& m) const {
      return {{"kind", "mixture_of_geometric"}, {"weights", m.weights}, {"rates", m.rates}};
    }
    json operator()(const Explicit& e) const {
      json out{{"kind", "explicit"},
               {"offset", e.pmf.offset()},
               {"masses", e.pmf.masses()}};
      if (e.pmf.tail_bound() > 0.0) out["tail_bound"] = e.pmf.tail_bound();
      return out;
    }
  };
  return std::visit(V{}, dist.value());
}

ParametricDist dist_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw ConfigError("distribution must be an object with a \"kind\" key");
  std::string kind = get_str(j, "kind", "distribution");
  if (kind == "deterministic") {
    check_keys(j, "deterministic distribution", {"kind", "value"});
    return Deterministic{get_int(j, "value", "deterministic distribution")};
  }
  if (kind == "geometric") {
    check_keys(j, "geometric distribution", {"kind", "rate"});
    return Geometric{get_num(j, "rate", "geometric distribution")};
  }
  if (kind == "two_point") {
    check_keys(j, "two_point distribution", {"kind", "epsilon", "n"});
    return TwoPoint{get_num(j, "epsilon", "two_point distribution"),
                    get_int(j, "n", "two_point distribution")};
  }
  if (kind == "sum_of_geometric") {
    check_keys(j, "sum_of_geometric distribution", {"kind", "rates"});
    return SumOfGeometric{num_array(j.at("rates"), "sum_of_geometric.rates")};
  }
  if (kind == "mixture_of_geometric") {
    check_keys(j, "mixture_of_geometric distribution", {"kind", "weights", "rates"});
    return MixtureOfGeometric{num_array(j.at("weights"), "mixture_of_geometric.weights"),
                              num_array(j.at("rates"), "mixture_of_geometric.rates")};
  }
  if (kind == "explicit") {
    check_keys(j, "explicit distribution", {"kind", "offset", "masses"}, {"tail_bound"});
    double tail = j.contains("tail_bound") ? get_num(j, "tail_bound", "explicit distribution")
                                           : 0.0;
    return Explicit{Pmf(get_int(j, "offset", "explicit distribution"),
                        num_array(j.at("masses"), "explicit.masses"), tail)};
  }
  throw ConfigError("unknown distribution kind \"" + kind + "\"");
}

json noise_to_json(const NoiseModel& nm) {
  if (const ThresholdedNoise* t = nm.thresholded()) {
    return {{"alphabet", nm.alphabet_size()},
            {"kind", "thresholded"},
            {"b", t->threshold},
            {"psi_low", t->low},
            {"psi_high", t->high}};
  }
  const TabulatedNoise* t = nm.tabulated();
  return {{"alphabet", nm.alphabet_size()},
          {"kind", "tabulated"},
          {"psis", t->levels},
          {"tail_psi", t->tail}};
}

NoiseModel noise_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw ConfigError("noise model must be an object with a \"kind\" key");
  std::string kind = get_str(j, "kind", "noise model");
  if (kind == "thresholded") {
    check_keys(j, "thresholded noise", {"alphabet", "kind", "b", "psi_low", "psi_high"});
    Alphabet a{static_cast<int>(get_int(j, "alphabet", "noise model"))};
    ThresholdedNoise t;
    t.threshold = get_int(j, "b", "thresholded noise");
    t.low = num_array(j.at("psi_low"), "thresholded.psi_low");
    t.high = num_array(j.at("psi_high"), "thresholded.psi_high");
    return NoiseModel(a, std::move(t));
  }
  if (kind == "tabulated") {
    check_keys(j, "tabulated noise", {"alphabet", "kind", "psis", "tail_psi"});
    Alphabet a{static_cast<int>(get_int(j, "alphabet", "noise model"))};
    TabulatedNoise t;
    const json& psis = j.at("psis");
    if (!psis.is_array()) throw ConfigError("tabulated.psis must be an array of arrays");
    for (std::size_t i = 0; i < psis.size(); ++i)
      t.levels.push_back(num_array(psis[i], "tabulated.psis[" + std::to_string(i) + "]"));
    t.tail = num_array(j.at("tail_psi"), "tabulated.tail_psi");
    return NoiseModel(a, std::move(t));
  }
  throw ConfigError("unknown noise kind \"" + kind + "\"");
}

SimConfig sim_config_from_json(const json& j) {
  check_keys(j, "simulation config", {"arrival", "service", "noise", "horizon_departures"},
             {"warmup_departures", "seed", "record_per_slot"});
  const json& arr = j.at("arrival");
  check_keys(arr, "arrival", {"mode", "dist"});
  std::string mode = get_str(arr, "mode", "arrival");
  ArrivalMode arrival_mode;
  if (mode == "interarrival")
    arrival_mode = ArrivalMode::InterarrivalTimes;
  else if (mode == "batch")
    arrival_mode = ArrivalMode::PerSlotBatches;
  else
    throw ConfigError("arrival.mode must be \"interarrival\" or \"batch\"");

  SimConfig cfg{arrival_mode,
                dist_from_json(arr.at("dist")),
                dist_from_json(j.at("service")),
                noise_from_json(j.at("noise")),
                get_int(j, "horizon_departures", "simulation config"),
                j.contains("warmup_departures")
                    ? get_int(j, "warmup_departures", "simulation config")
                    : -1,
                j.contains("seed") ? get_uint(j, "seed", "simulation config") : 0,
                j.contains("record_per_slot")
                    ? get_bool(j, "record_per_slot", "simulation config")
                    : false};
  return cfg;
}

json sim_config_to_json(const SimConfig& cfg) {
  return {{"arrival",
           {{"mode", cfg.arrival_mode == ArrivalMode::InterarrivalTimes ? "interarrival"
                                                                        : "batch"},
            {"dist", dist_to_json(cfg.arrival)}}},
          {"service", dist_to_json(cfg.service)},
          {"noise", noise_to_json(cfg.noise)},
          {"horizon_departures", cfg.horizon_departures},
          {"warmup_departures", cfg.warmup_departures},
          {"seed", cfg.seed},
          {"record_per_slot", cfg.record_per_slot}};
}

json stationary_to_json(const StationaryDist& pi) {
  json out{{"masses", pi.masses},
           {"tail_bound", pi.tail_bound},
           {"form", pi.form == StationaryDist::Form::Geometric ? "geometric" : "recursive"}};
  if (pi.sigma) out["sigma"] = *pi.sigma;
  return out;
}

json report_to_json(const CapacityReport& rep) {
  return {{"capacity_bits_per_slot", rep.capacity_bits_per_slot},
          {"lambda", rep.lambda},
          {"log_alphabet", rep.log_alphabet},
          {"noise_penalty", rep.noise_penalty},
          {"error_bound", rep.error_bound},
          {"method", method_name(rep.method)}};
}

json summary_to_json(const EmpiricalSummary& s) {
  return {{"empirical_pi", {{"offset", s.empirical_pi.offset()}, {"masses", s.empirical_pi.masses()}}},
          {"info_density_mean", s.info_density_mean},
          {"info_density_stderr", s.info_density_stderr},
          {"jobs_used", s.jobs_used}};
}

json experiment_to_json(const ExperimentResult& r) {
  return {{"decoder", decoder_name(r.decoder)},
          {"n", r.n},
          {"messages", r.messages},
          {"trials", r.trials},
          {"block_errors", r.block_errors},
          {"block_error_rate", r.block_error_rate},
          {"mean_block_duration_slots", r.mean_block_duration_slots},
          {"rate_bits_per_symbol", r.rate_bits_per_symbol},
          {"rate_bits_per_slot", r.rate_bits_per_slot},
          {"bler_ci95", {{"low", r.bler_ci.low}, {"high", r.bler_ci.high}}}};
}

json paired_to_json(const PairedExperiment& p) {
  return {{"with_timestamps", experiment_to_json(p.with_timestamps)},
          {"without_timestamps", experiment_to_json(p.without_timestamps)},
          {"error_gap_mean", p.error_gap_mean},
          {"error_gap_stderr", p.error_gap_stderr}};
}

json ordering_to_json(const OrderingTable& t) {
  json entries = json::array();
  for (const auto& e : t.entries)
    entries.push_back({{"kind", e.kind}, {"sigma", e.sigma}, {"capacity", e.capacity}});
  auto checks = [](const std::vector<OrderingCheck>& cs) {
    json out = json::array();
    for (const auto& c : cs)
      out.push_back({{"description", c.description}, {"margin", c.margin}, {"holds", c.holds}});
    return out;
  };
  return {{"lambda", t.lambda},
          {"mu", t.mu},
          {"entries", entries},
          {"capacity_checks", checks(t.capacity_checks)},
          {"gf_curve_checks", checks(t.gf_curve_checks)},
          {"all_hold", t.all_hold}};
}

json invariance_to_json(const InvarianceReport& r) {
  return {{"capacities", r.capacities},
          {"max_abs_dev", r.max_abs_dev},
          {"allowed_dev", r.allowed_dev},
          {"all_equal", r.all_equal}};
}

json error_to_json(const Error& e) {
  return {{"error", {{"type", e.kind()}, {"message", e.what()}}}};
}

}  // namespace queuechan
