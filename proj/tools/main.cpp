// Command-line front end: JSON-configured runs, CSV/JSON output.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "queuechan/capacity.hpp"
#include "queuechan/coding.hpp"
#include "queuechan/errors.hpp"
#include "queuechan/json_io.hpp"
#include "queuechan/pipeline.hpp"
#include "queuechan/sim.hpp"

using nlohmann::json;
using namespace queuechan;

namespace {

// ---------------------------------------------------------------------------
// logging (QUEUECHAN_LOG = debug|info|warn|error|off, default warn)
// ---------------------------------------------------------------------------

enum class LogLevel { Debug = 0, Info, Warn, Err, Off };

LogLevel log_threshold() {
  static LogLevel level = [] {
    const char* env = std::getenv("QUEUECHAN_LOG");
    std::string v = env != nullptr ? env : "warn";
    if (v == "debug") return LogLevel::Debug;
    if (v == "info") return LogLevel::Info;
    if (v == "warn") return LogLevel::Warn;
    if (v == "error") return LogLevel::Err;
    if (v == "off") return LogLevel::Off;
    return LogLevel::Warn;
  }();
  return level;
}

void logmsg(LogLevel lvl, const std::string& msg) {
  if (lvl >= log_threshold()) std::cerr << "[queuechan] " << msg << "\n";
}

// ---------------------------------------------------------------------------
// shared option plumbing
// ---------------------------------------------------------------------------

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::string format = "json";
  std::string svg_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 1;
  std::int64_t q_max = -1;
  double tail_eps = -1.0;
  bool no_header_meta = false;
};

void add_common(CLI::App* sc, CommonOpts& o, bool with_svg = false) {
  sc->add_option("--config", o.config_path, "JSON config file")->required();
  sc->add_option("--seed", o.seed, "override the config seed")
      ->each([&o](const std::string&) { o.seed_set = true; });
  sc->add_option("--jobs", o.jobs, "worker threads for grid evaluation")
      ->check(CLI::PositiveNumber);
  sc->add_option("--q-max", o.q_max, "stationary truncation override");
  sc->add_option("--tail-eps", o.tail_eps, "materialization tail bound override");
  sc->add_option("--out", o.out_path, "output file (default stdout)");
  sc->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  sc->add_flag("--no-header-meta", o.no_header_meta,
               "omit the timestamped comment line from CSV output");
  if (with_svg) sc->add_option("--svg", o.svg_path, "also write a minimal SVG line chart");
}

json load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

void allow_keys(const json& j, const char* what, const std::vector<std::string>& keys) {
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const auto& k : keys) known = known || k == it.key();
    if (!known)
      throw ConfigError(std::string(what) + " has unknown key \"" + it.key() + "\"");
  }
}

void require_keys(const json& j, const char* what, const std::vector<std::string>& keys) {
  for (const auto& k : keys) {
    if (!j.contains(k))
      throw ConfigError(std::string(what) + " is missing required key \"" + k + "\"");
  }
}

SolveOptions solve_options(const json& j, const CommonOpts& o) {
  SolveOptions so;
  if (j.contains("q_max")) so.q_max = j.at("q_max").get<std::int64_t>();
  if (j.contains("j_max")) so.j_max = j.at("j_max").get<std::int64_t>();
  if (j.contains("tail_eps")) so.tail_eps = j.at("tail_eps").get<double>();
  if (o.q_max > 0) so.q_max = o.q_max;
  if (o.tail_eps > 0.0) so.tail_eps = o.tail_eps;
  return so;
}

// Builds a SimConfig from the channel keys of a command config. Commands that
// never simulate pass need_horizon/need_seed = false and get horizon 1.
SimConfig channel_config(const json& j, const CommonOpts& o, bool need_horizon,
                         bool need_seed) {
  require_keys(j, "config", {"arrival", "service", "noise"});
  json sub{{"arrival", j.at("arrival")},
           {"service", j.at("service")},
           {"noise", j.at("noise")}};
  if (need_horizon) {
    require_keys(j, "config", {"horizon_departures"});
    sub["horizon_departures"] = j.at("horizon_departures");
  } else {
    sub["horizon_departures"] = 1;
  }
  if (j.contains("warmup_departures")) sub["warmup_departures"] = j.at("warmup_departures");
  if (j.contains("record_per_slot")) sub["record_per_slot"] = j.at("record_per_slot");
  if (o.seed_set)
    sub["seed"] = o.seed;
  else if (j.contains("seed"))
    sub["seed"] = j.at("seed");
  else if (need_seed)
    throw ConfigError(
        "a seed is required for stochastic commands: set \"seed\" in the config or "
        "pass --seed");
  return sim_config_from_json(sub);
}

// ---------------------------------------------------------------------------
// output sinks
// ---------------------------------------------------------------------------

void write_output(const CommonOpts& o, const std::string& text) {
  if (o.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out_path);
  if (!f) throw ConfigError("cannot open output file " + o.out_path);
  f << text;
}

void write_json(const CommonOpts& o, const json& j) { write_output(o, j.dump(2) + "\n"); }

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string now_iso8601() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
  return buf;
}

struct CsvBuilder {
  std::ostringstream out;

  CsvBuilder(const std::string& command, const CommonOpts& o) {
    if (!o.no_header_meta) out << "# queuechan " << command << " " << now_iso8601() << "\n";
  }
  void header(const std::string& line) { out << line << "\n"; }
  template <class... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((out << (first ? "" : ",") << cell_str(cells), first = false), ...);
    out << "\n";
  }
  static std::string cell_str(double v) { return fmt_num(v); }
  static std::string cell_str(const std::string& s) { return s; }
  static std::string cell_str(const char* s) { return s; }
  static std::string cell_str(std::int64_t v) { return std::to_string(v); }
  static std::string cell_str(std::size_t v) { return std::to_string(v); }
  static std::string cell_str(int v) { return std::to_string(v); }
  static std::string cell_str(bool v) { return v ? "true" : "false"; }
  std::string str() const { return out.str(); }
};

std::vector<double> grid_from_json(const json& j, const char* what) {
  if (j.is_array()) {
    std::vector<double> out;
    for (const json& e : j) {
      if (!e.is_number()) throw ConfigError(std::string(what) + " must contain numbers");
      out.push_back(e.get<double>());
    }
    if (out.empty()) throw ConfigError(std::string(what) + " must not be empty");
    return out;
  }
  if (j.is_object()) {
    allow_keys(j, what, {"from", "to", "step"});
    require_keys(j, what, {"from", "to", "step"});
    double from = j.at("from").get<double>();
    double to = j.at("to").get<double>();
    double step = j.at("step").get<double>();
    if (!(step > 0.0)) throw ConfigError(std::string(what) + ".step must be > 0");
    std::vector<double> out;
    for (double v = from; v <= to + 1e-12; v += step) out.push_back(v);
    if (out.empty()) throw ConfigError(std::string(what) + " produced an empty grid");
    return out;
  }
  throw ConfigError(std::string(what) + " must be an array or {from,to,step}");
}

// ---------------------------------------------------------------------------
// subcommand implementations
// ---------------------------------------------------------------------------

const std::vector<std::string> kChannelKeys = {
    "arrival", "service",        "noise", "horizon_departures", "warmup_departures",
    "seed",    "record_per_slot"};

std::vector<std::string> with_knobs(std::vector<std::string> keys) {
  keys.insert(keys.end(), {"q_max", "j_max", "tail_eps"});
  return keys;
}

int cmd_capacity(const CommonOpts& o) {
  json cfg = load_config(o.config_path);
  auto keys = with_knobs(kChannelKeys);
  keys.push_back("timestamps");
  allow_keys(cfg, "capacity config", keys);
  SimConfig ch = channel_config(cfg, o, false, false);
  SolveOptions so = solve_options(cfg, o);
  bool timestamps = cfg.contains("timestamps") ? cfg.at("timestamps").get<bool>() : true;

  CapacityReport rep = analytic_capacity(ch, so, timestamps);
  json out = report_to_json(rep);
  out["system"] = system_kind_name(classify(ch));
  logmsg(LogLevel::Info, "capacity " + fmt_num(rep.capacity_bits_per_slot) + " bits/slot via " +
                             method_name(rep.method));
  if (o.format == "csv") {
    CsvBuilder csv("capacity", o);
    csv.header("capacity_bits_per_slot,lambda,log_alphabet,noise_penalty,error_bound,method,system");
    csv.row(rep.capacity_bits_per_slot, rep.lambda, rep.log_alphabet, rep.noise_penalty,
            rep.error_bound, method_name(rep.method), system_kind_name(classify(ch)));
    write_output(o, csv.str());
  } else {
    write_json(o, out);
  }
  return 0;
}

int cmd_sigma(const CommonOpts& o) {
  json cfg = load_config(o.config_path);
  allow_keys(cfg, "sigma config", {"arrival_dist", "mu"});
  require_keys(cfg, "sigma config", {"arrival_dist", "mu"});
  ParametricDist arrival = dist_from_json(cfg.at("arrival_dist"));
  double mu = cfg.at("mu").get<double>();

  double sigma = solve_sigma(arrival, mu);
  double lambda = rate_from_interarrival(arrival);
  double residual = std::abs(atilde(arrival, mu, sigma) - sigma);
  json out{{"sigma", sigma}, {"lambda", lambda}, {"mu", mu}, {"residual", residual}};
  if (arrival.kind() == "geometric")
    out["closed_form"] = sigma_closed_form_geo(lambda, mu);
  if (o.format == "csv") {
    CsvBuilder csv("sigma", o);
    csv.header("lambda,mu,sigma,residual");
    csv.row(lambda, mu, sigma, residual);
    write_output(o, csv.str());
  } else {
    write_json(o, out);
  }
  return 0;
}

json noiseless_placeholder() {
  return {{"alphabet", 2},
          {"kind", "thresholded"},
          {"b", 0},
          {"psi_low", {1.0, 0.0}},
          {"psi_high", {1.0, 0.0}}};
}

int cmd_stationary(const CommonOpts& o) {
  json cfg = load_config(o.config_path);
  allow_keys(cfg, "stationary config", with_knobs(kChannelKeys));
  if (!cfg.contains("noise")) cfg["noise"] = noiseless_placeholder();
  SimConfig ch = channel_config(cfg, o, false, false);
  SolveOptions so = solve_options(cfg, o);

  StationaryDist pi = analytic_pi(ch, so);
  if (o.format == "csv") {
    CsvBuilder csv("stationary", o);
    csv.header("q,pi");
    for (std::size_t q = 0; q < pi.masses.size(); ++q)
      csv.row(static_cast<std::int64_t>(q), pi.masses[q]);
    write_output(o, csv.str());
  } else {
    json out = stationary_to_json(pi);
    out["system"] = system_kind_name(classify(ch));
    write_json(o, out);
  }
  return 0;
}

std::string sweep_svg(const std::vector<SweepPoint>& points);

int cmd_sweep(const CommonOpts& o) {
  json cfg = load_config(o.config_path);
  allow_keys(cfg, "sweep config", {"lambdas", "mus", "noise", "q_max", "j_max", "tail_eps"});
  require_keys(cfg, "sweep config", {"lambdas", "mus", "noise"});
  std::vector<double> lambdas = grid_from_json(cfg.at("lambdas"), "sweep.lambdas");
  std::vector<double> mus = grid_from_json(cfg.at("mus"), "sweep.mus");
  NoiseModel nm = noise_from_json(cfg.at("noise"));
  SolveOptions so = solve_options(cfg, o);

  std::vector<SweepPoint> points = sweep_geometric(lambdas, mus, nm, so, o.jobs);
  if (!o.svg_path.empty()) {
    std::ofstream f(o.svg_path);
    if (!f) throw ConfigError("cannot open SVG output file " + o.svg_path);
    f << sweep_svg(points);
  }
  if (o.format == "json") {
    json arr = json::array();
    for (const auto& p : points) {
      json row{{"lambda", p.lambda}, {"mu", p.mu}};
      if (p.error.empty()) {
        row["sigma"] = p.sigma;
        row["pi0"] = p.pi0;
        row["capacity"] = p.capacity;
        row["capacity_no_ts"] = p.capacity_no_ts;
      } else {
        row["error"] = p.error;
      }
      arr.push_back(row);
    }
    write_json(o, arr);
  } else {
    CsvBuilder csv("sweep", o);
    csv.header("lambda,mu,sigma,pi0,capacity,capacity_no_ts,error");
    for (const auto& p : points) {
      if (p.error.empty())
        csv.row(p.lambda, p.mu, p.sigma, p.pi0, p.capacity, p.capacity_no_ts, "");
      else
        csv.row(p.lambda, p.mu, "", "", "", "", p.error);
    }
    write_output(o, csv.str());
  }
  return 0;
}

std::string sweep_svg(const std::vector<SweepPoint>& points) {
  // minimal data-only line chart: capacity vs lambda, one polyline per mu
  const double W = 640, H = 400, ML = 60, MR = 20, MT = 20, MB = 50;
  double lmin = 1e300, lmax = -1e300, cmax = 0.0;
  std::vector<double> mus;
  for (const auto& p : points) {
    if (!p.error.empty()) continue;
    lmin = std::min(lmin, p.lambda);
    lmax = std::max(lmax, p.lambda);
    cmax = std::max(cmax, p.capacity);
    bool seen = false;
    for (double m : mus) seen = seen || m == p.mu;
    if (!seen) mus.push_back(p.mu);
  }
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  s << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  if (lmax > lmin && cmax > 0.0) {
    auto X = [&](double l) { return ML + (l - lmin) / (lmax - lmin) * (W - ML - MR); };
    auto Y = [&](double c) { return H - MB - c / cmax * (H - MT - MB); };
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    s << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR << "\" y2=\""
      << H - MB << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\"" << H - MB
      << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << (W / 2) << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">arrival rate</text>\n";
    s << "<text x=\"14\" y=\"" << (H / 2)
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 14 " << (H / 2)
      << ")\">capacity (bits/slot)</text>\n";
    for (std::size_t mi = 0; mi < mus.size(); ++mi) {
      s << "<polyline fill=\"none\" stroke=\"" << colors[mi % 5] << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& p : points) {
        if (!p.error.empty() || p.mu != mus[mi]) continue;
        s << X(p.lambda) << "," << Y(p.capacity) << " ";
      }
      s << "\"/>\n";
      s << "<text x=\"" << W - MR - 4 << "\" y=\"" << MT + 16 + 16 * static_cast<double>(mi)
        << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << colors[mi % 5]
        << "\">service rate " << fmt_num(mus[mi]) << "</text>\n";
    }
  }
  s << "</svg>\n";
  return s.str();
}

int cmd_simulate(const CommonOpts& o) {
  json cfg = load_config(o.config_path);
  allow_keys(cfg, "simulate config", kChannelKeys);
  SimConfig ch = channel_config(cfg, o, true, true);
  SimulationTrace trace = simulate(ch);
  logmsg(LogLevel::Info, "simulated " + std::to_string(trace.size()) + " departures over " +
                             std::to_string(trace.last_slot) + " slots");
  if (o.format == "csv") {
    std::ostringstream body;
    write_trace_csv(trace, body);
    CsvBuilder csv("simulate", o);
    write_output(o, csv.str() + body.str());
  } else {
    Pmf pi = empirical_pi(trace, ch.resolved_warmup());
    double mean_sojourn = 0.0;
    for (std::size_t i = 0; i < trace.size(); ++i)
      mean_sojourn += static_cast<double>(trace.sojourn(i));
    mean_sojourn /= static_cast<double>(trace.size());
    json out{{"departures", trace.size()},
             {"last_slot", trace.last_slot},
             {"warmup", ch.resolved_warmup()},
             {"mean_sojourn_slots", mean_sojourn},
             {"empirical_pi", {{"offset", pi.offset()}, {"masses", pi.masses()}}}};
    write_json(o, out);
  }
  return 0;
}

int cmd_infodensity(const CommonOpts& o) {
  json cfg = load_config(o.config_path);
  allow_keys(cfg, "infodensity config", with_knobs(kChannelKeys));
  SimConfig ch = channel_config(cfg, o, true, true);
  SolveOptions so = solve_options(cfg, o);

  SimulationTrace trace = simulate(ch);
  EmpiricalSummary est = info_density_estimate(trace, ch.noise, ch.resolved_warmup());
  json out = summary_to_json(est);
  double analytic = 0.0, z = 0.0;
  bool have_analytic = false;
  try {
    CapacityReport rep = analytic_capacity(ch, so);
    analytic = rep.log_alphabet - rep.noise_penalty;  // capacity per arrival
    z = est.info_density_stderr > 0.0 ? (est.info_density_mean - analytic) / est.info_density_stderr
                                      : 0.0;
    have_analytic = true;
  } catch (const Error& e) {
    logmsg(LogLevel::Warn, std::string("no analytic reference: ") + e.what());
  }
  if (have_analytic) {
    out["analytic_per_arrival"] = analytic;
    out["z_score"] = z;
  }
  if (o.format == "csv") {
    CsvBuilder csv("infodensity", o);
    csv.header("jobs_used,info_density_mean,info_density_stderr,analytic_per_arrival,z_score");
    csv.row(est.jobs_used, est.info_density_mean, est.info_density_stderr,
            have_analytic ? fmt_num(analytic) : std::string(),
            have_analytic ? fmt_num(z) : std::string());
    write_output(o, csv.str());
  } else {
    write_json(o, out);
  }
  return 0;
}

void experiment_csv_rows(CsvBuilder& csv, const ExperimentResult& r) {
  csv.row(decoder_name(r.decoder), r.n, r.messages, r.rate_bits_per_symbol, r.rate_bits_per_slot,
          r.trials, r.block_error_rate, r.bler_ci.low, r.bler_ci.high);
}

int cmd_codeexp(const CommonOpts& o) {
  json cfg = load_config(o.config_path);
  std::vector<std::string> keys = {"arrival", "service", "noise",        "seed",
                                   "n",       "trials",  "decoder",      "messages",
                                   "rates",   "codebook_seed"};
  allow_keys(cfg, "codeexp config", with_knobs(keys));
  require_keys(cfg, "codeexp config", {"n", "trials"});
  SimConfig ch = channel_config(cfg, o, false, true);
  SolveOptions so = solve_options(cfg, o);
  std::int64_t n = cfg.at("n").get<std::int64_t>();
  std::int64_t trials = cfg.at("trials").get<std::int64_t>();
  std::string decoder = cfg.contains("decoder") ? cfg.at("decoder").get<std::string>()
                                                : "with_timestamps";
  std::uint64_t cb_seed = cfg.contains("codebook_seed")
                              ? cfg.at("codebook_seed").get<std::uint64_t>()
                              : ch.seed + 1;

  if (cfg.contains("rates") == cfg.contains("messages"))
    throw ConfigError("codeexp config needs exactly one of \"messages\" or \"rates\"");

  if (cfg.contains("rates")) {
    if (decoder == "paired")
      throw ConfigError("paired decoding is only available for a single \"messages\" run");
    DecoderKind dk = decoder == "without_timestamps" ? DecoderKind::WithoutTimestamps
                                                     : DecoderKind::WithTimestamps;
    std::vector<double> rates = grid_from_json(cfg.at("rates"), "codeexp.rates");
    std::vector<ExperimentResult> results = rate_sweep(ch, n, rates, trials, dk, cb_seed, so);
    if (o.format == "csv") {
      CsvBuilder csv("codeexp", o);
      csv.header("decoder,n,messages,rate_bits_per_symbol,rate_bits_per_slot,trials,bler,ci_low,ci_high");
      for (const auto& r : results) experiment_csv_rows(csv, r);
      write_output(o, csv.str());
    } else {
      json arr = json::array();
      for (const auto& r : results) arr.push_back(experiment_to_json(r));
      write_json(o, arr);
    }
    return 0;
  }

  std::int64_t messages = cfg.at("messages").get<std::int64_t>();
  Codebook cb = Codebook::random(n, messages, ch.noise.alphabet_size(), cb_seed);
  if (decoder == "paired") {
    PairedExperiment p = run_paired(cb, ch, trials, so);
    if (o.format == "csv") {
      CsvBuilder csv("codeexp", o);
      csv.header("decoder,n,messages,rate_bits_per_symbol,rate_bits_per_slot,trials,bler,ci_low,ci_high");
      experiment_csv_rows(csv, p.with_timestamps);
      experiment_csv_rows(csv, p.without_timestamps);
      write_output(o, csv.str());
    } else {
      write_json(o, paired_to_json(p));
    }
    return 0;
  }
  DecoderKind dk = decoder == "without_timestamps" ? DecoderKind::WithoutTimestamps
                                                   : DecoderKind::WithTimestamps;
  ExperimentResult r = run_experiment(cb, ch, dk, trials, so);
  if (o.format == "csv") {
    CsvBuilder csv("codeexp", o);
    csv.header("decoder,n,messages,rate_bits_per_symbol,rate_bits_per_slot,trials,bler,ci_low,ci_high");
    experiment_csv_rows(csv, r);
    write_output(o, csv.str());
  } else {
    write_json(o, experiment_to_json(r));
  }
  return 0;
}

int cmd_extremal(const CommonOpts& o) {
  json cfg = load_config(o.config_path);
  allow_keys(cfg, "extremal config", {"lambda", "mu", "noise", "kinds", "q_max", "tail_eps"});
  require_keys(cfg, "extremal config", {"lambda", "mu", "noise", "kinds"});
  double lambda = cfg.at("lambda").get<double>();
  double mu = cfg.at("mu").get<double>();
  NoiseModel nm = noise_from_json(cfg.at("noise"));
  SolveOptions so = solve_options(cfg, o);

  std::vector<ParametricDist> dists;
  if (!cfg.at("kinds").is_array()) throw ConfigError("extremal.kinds must be an array");
  for (const json& spec : cfg.at("kinds")) {
    if (!spec.is_object() || !spec.contains("kind"))
      throw ConfigError("each extremal kind needs a \"kind\" key");
    std::string kind = spec.at("kind").get<std::string>();
    if (kind == "deterministic") {
      allow_keys(spec, "extremal kind", {"kind"});
      dists.push_back(extremal_deterministic(lambda));
    } else if (kind == "geometric") {
      allow_keys(spec, "extremal kind", {"kind"});
      dists.push_back(extremal_geometric(lambda));
    } else if (kind == "two_point") {
      allow_keys(spec, "extremal kind", {"kind", "eps0"});
      require_keys(spec, "extremal two_point", {"eps0"});
      dists.push_back(extremal_two_point(lambda, spec.at("eps0").get<double>()));
    } else if (kind == "sum_of_geometric") {
      allow_keys(spec, "extremal kind", {"kind", "stages"});
      require_keys(spec, "extremal sum_of_geometric", {"stages"});
      dists.push_back(extremal_sum_of_geometric(lambda, spec.at("stages").get<int>()));
    } else if (kind == "mixture_of_geometric") {
      allow_keys(spec, "extremal kind", {"kind", "weights"});
      require_keys(spec, "extremal mixture_of_geometric", {"weights"});
      dists.push_back(
          extremal_mixture_of_geometric(lambda, spec.at("weights").get<std::vector<double>>()));
    } else {
      throw ConfigError("unknown extremal kind \"" + kind + "\"");
    }
  }

  OrderingTable table = ordering_check(dists, mu, nm, so.q_max);
  if (o.format == "csv") {
    CsvBuilder csv("extremal", o);
    csv.header("row,label,sigma,capacity,margin,holds");
    for (const auto& e : table.entries)
      csv.row("entry", e.kind, e.sigma, e.capacity, "", "");
    for (const auto& c : table.capacity_checks)
      csv.row("capacity_check", c.description, "", "", c.margin, c.holds);
    for (const auto& c : table.gf_curve_checks)
      csv.row("gf_curve_check", c.description, "", "", c.margin, c.holds);
    write_output(o, csv.str());
  } else {
    write_json(o, ordering_to_json(table));
  }
  return table.all_hold ? 0 : 3;
}

int cmd_bounds(const CommonOpts& o) {
  json cfg = load_config(o.config_path);
  allow_keys(cfg, "bounds config",
             {"lambda", "mu", "service", "B", "noise", "m0_lower", "m0_upper"});
  require_keys(cfg, "bounds config", {"lambda", "service", "B", "noise"});
  double lambda = cfg.at("lambda").get<double>();
  ParametricDist service = dist_from_json(cfg.at("service"));
  double mu = cfg.contains("mu") ? cfg.at("mu").get<double>() : 1.0 / moments(service).mean;
  std::int64_t B = cfg.at("B").get<std::int64_t>();
  NoiseModel nm = noise_from_json(cfg.at("noise"));

  CapacityReport lower =
      cfg.contains("m0_lower")
          ? capacity_bound_from_m0(lambda, mu, service, cfg.at("m0_lower").get<double>(), nm,
                                   BoundSide::Lower)
          : capacity_bound_type2(lambda, mu, service, B, nm, BoundSide::Lower);
  CapacityReport upper =
      cfg.contains("m0_upper")
          ? capacity_bound_from_m0(lambda, mu, service, cfg.at("m0_upper").get<double>(), nm,
                                   BoundSide::Upper)
          : capacity_bound_type2(lambda, mu, service, B, nm, BoundSide::Upper);

  if (o.format == "csv") {
    CsvBuilder csv("bounds", o);
    csv.header("side,capacity_bits_per_slot,lambda,mu,noise_penalty,method");
    csv.row("lower", lower.capacity_bits_per_slot, lambda, mu, lower.noise_penalty,
            method_name(lower.method));
    csv.row("upper", upper.capacity_bits_per_slot, lambda, mu, upper.noise_penalty,
            method_name(upper.method));
    write_output(o, csv.str());
  } else {
    write_json(o, json{{"lower", report_to_json(lower)}, {"upper", report_to_json(upper)}});
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "queuechan: capacity of discrete-time queues whose service noise depends on "
      "queue length"};
  app.require_subcommand(1);
  CommonOpts o;

  CLI::App* sc_capacity = app.add_subcommand("capacity", "analytic capacity of a configuration");
  CLI::App* sc_sweep = app.add_subcommand("sweep", "capacity over a (lambda, mu) grid");
  CLI::App* sc_sigma = app.add_subcommand("sigma", "fixed-point ratio of the geometric-service queue");
  CLI::App* sc_stationary = app.add_subcommand("stationary", "stationary departure-queue law");
  CLI::App* sc_simulate = app.add_subcommand("simulate", "slot-exact queue simulation");
  CLI::App* sc_infodensity =
      app.add_subcommand("infodensity", "empirical information-density estimate");
  CLI::App* sc_codeexp = app.add_subcommand("codeexp", "random-code block-error experiment");
  CLI::App* sc_extremal =
      app.add_subcommand("extremal", "capacity ordering across arrival constructions");
  CLI::App* sc_bounds = app.add_subcommand("bounds", "closed-form batch-arrival capacity bounds");

  add_common(sc_capacity, o);
  add_common(sc_sweep, o, /*with_svg=*/true);
  add_common(sc_sigma, o);
  add_common(sc_stationary, o);
  add_common(sc_simulate, o);
  add_common(sc_infodensity, o);
  add_common(sc_codeexp, o);
  add_common(sc_extremal, o);
  add_common(sc_bounds, o);

  try {
    app.parse(argc, argv);
    if (sc_capacity->parsed()) return cmd_capacity(o);
    if (sc_sweep->parsed()) return cmd_sweep(o);
    if (sc_sigma->parsed()) return cmd_sigma(o);
    if (sc_stationary->parsed()) return cmd_stationary(o);
    if (sc_simulate->parsed()) return cmd_simulate(o);
    if (sc_infodensity->parsed()) return cmd_infodensity(o);
    if (sc_codeexp->parsed()) return cmd_codeexp(o);
    if (sc_extremal->parsed()) return cmd_extremal(o);
    if (sc_bounds->parsed()) return cmd_bounds(o);
    return 0;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cout << error_to_json(e).dump(2) << "\n";
    logmsg(LogLevel::Err, std::string(e.kind()) + ": " + e.what());
    return 1;
  } catch (const std::exception& e) {
    std::cout << json{{"error", {{"type", "InternalError"}, {"message", e.what()}}}}.dump(2)
              << "\n";
    logmsg(LogLevel::Err, std::string("internal error: ") + e.what());
    return 2;
  }
}
