#include "exactsel/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "exactsel/errors.hpp"
#include "exactsel/signal_bank.hpp"

namespace exactsel {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ConfigError("value of '" + key + "' is not a valid number: '" + text + "'");
  if constexpr (std::is_floating_point_v<T>)
    if (!std::isfinite(out)) throw ConfigError("value of '" + key + "' must be finite");
  return out;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse_number<T>(key, item));
  return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("value of '" + key + "' must be true or false");
}

std::string exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    if constexpr (std::is_floating_point_v<T>)
      s += exact(v[i]);
    else
      s += std::to_string(v[i]);
  }
  return s;
}

template <class E>
E parse_enum(const std::string& key, const std::string& text, const std::vector<std::pair<std::string, E>>& names) {
  const std::string v = trim(text);
  for (const auto& [n, e] : names)
    if (n == v) return e;
  std::string allowed;
  for (const auto& [n, e] : names) allowed += (allowed.empty() ? "" : "|") + n;
  throw ConfigError("value of '" + key + "' must be one of " + allowed + ", got '" + text + "'");
}

template <class E>
std::string enum_name(E e, const std::vector<std::pair<std::string, E>>& names) {
  for (const auto& [n, x] : names)
    if (x == e) return n;
  return "?";
}

const std::vector<std::pair<std::string, EnumerationMode>> kModes{{"full", EnumerationMode::full},
                                                                  {"pool", EnumerationMode::pool}};
const std::vector<std::pair<std::string, TruncationMode>> kTruncations{{"preset", TruncationMode::preset},
                                                                       {"rule", TruncationMode::rule}};
const std::vector<std::pair<std::string, CalibrationMode>> kCalibrations{{"exact", CalibrationMode::exact},
                                                                         {"asymptotic", CalibrationMode::asymptotic}};
const std::vector<std::pair<std::string, EpsHatRule>> kEpsRules{{"fixed", EpsHatRule::fixed},
                                                                {"growing_s", EpsHatRule::growing_s}};
const std::vector<std::pair<std::string, NoiseModel>> kNoise{{"auto", NoiseModel::automatic},
                                                             {"coefficient", NoiseModel::coefficient},
                                                             {"shell", NoiseModel::shell}};
const std::vector<std::string> kExperiments{"table1", "table2", "calibrate", "risk", "boundary", "audit"};

// Keys written by manifest_text that carry no configuration.
const std::vector<std::string> kInformational{"code_version", "wall_time_s", "data_file"};

struct Field {
  std::string name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> f{
      {"experiment", [](RunConfig& c, const std::string& v) { c.experiment = trim(v); },
       [](const RunConfig& c) { return c.experiment; }},
      {"d", [](RunConfig& c, const std::string& v) { c.dim.d = parse_number<int>("d", v); },
       [](const RunConfig& c) { return std::to_string(c.dim.d); }},
      {"s", [](RunConfig& c, const std::string& v) { c.dim.s = parse_number<int>("s", v); },
       [](const RunConfig& c) { return std::to_string(c.dim.s); }},
      {"beta", [](RunConfig& c, const std::string& v) { c.dim.beta = parse_number<double>("beta", v); },
       [](const RunConfig& c) { return exact(c.dim.beta); }},
      {"sigma", [](RunConfig& c, const std::string& v) { c.dim.sigma = parse_number<double>("sigma", v); },
       [](const RunConfig& c) { return exact(c.dim.sigma); }},
      {"epsilon", [](RunConfig& c, const std::string& v) { c.dim.epsilon = parse_number<double>("epsilon", v); },
       [](const RunConfig& c) { return exact(c.dim.epsilon); }},
      {"ds", [](RunConfig& c, const std::string& v) { c.ds = parse_list<int>("ds", v); },
       [](const RunConfig& c) { return join(c.ds); }},
      {"M", [](RunConfig& c, const std::string& v) { c.M = parse_number<int>("M", v); },
       [](const RunConfig& c) { return std::to_string(c.M); }},
      {"J", [](RunConfig& c, const std::string& v) { c.J = parse_number<int>("J", v); },
       [](const RunConfig& c) { return std::to_string(c.J); }},
      {"alphas", [](RunConfig& c, const std::string& v) { c.alphas = parse_list<double>("alphas", v); },
       [](const RunConfig& c) { return join(c.alphas); }},
      {"target", [](RunConfig& c, const std::string& v) { c.target = parse_list<int>("target", v); },
       [](const RunConfig& c) { return join(c.target); }},
      {"alpha", [](RunConfig& c, const std::string& v) { c.alpha = parse_number<double>("alpha", v); },
       [](const RunConfig& c) { return exact(c.alpha); }},
      {"mode", [](RunConfig& c, const std::string& v) { c.enumeration.mode = parse_enum("mode", v, kModes); },
       [](const RunConfig& c) { return enum_name(c.enumeration.mode, kModes); }},
      {"pool_size",
       [](RunConfig& c, const std::string& v) { c.enumeration.pool_size = parse_number<std::uint64_t>("pool_size", v); },
       [](const RunConfig& c) { return std::to_string(c.enumeration.pool_size); }},
      {"truncation", [](RunConfig& c, const std::string& v) { c.truncation = parse_enum("truncation", v, kTruncations); },
       [](const RunConfig& c) { return enum_name(c.truncation, kTruncations); }},
      {"calibration",
       [](RunConfig& c, const std::string& v) { c.calibration = parse_enum("calibration", v, kCalibrations); },
       [](const RunConfig& c) { return enum_name(c.calibration, kCalibrations); }},
      {"eps_hat_rule", [](RunConfig& c, const std::string& v) { c.eps_hat_rule = parse_enum("eps_hat_rule", v, kEpsRules); },
       [](const RunConfig& c) { return enum_name(c.eps_hat_rule, kEpsRules); }},
      {"noise", [](RunConfig& c, const std::string& v) { c.noise = parse_enum("noise", v, kNoise); },
       [](const RunConfig& c) { return enum_name(c.noise, kNoise); }},
      {"seed", [](RunConfig& c, const std::string& v) { c.seed = parse_number<std::uint64_t>("seed", v); },
       [](const RunConfig& c) { return std::to_string(c.seed); }},
      {"out", [](RunConfig& c, const std::string& v) { c.out = trim(v); }, [](const RunConfig& c) { return c.out; }},
      {"threads", [](RunConfig& c, const std::string& v) { c.threads = parse_number<int>("threads", v); },
       [](const RunConfig& c) { return std::to_string(c.threads); }},
      {"quiet", [](RunConfig& c, const std::string& v) { c.quiet = parse_bool("quiet", v); },
       [](const RunConfig& c) { return std::string(c.quiet ? "true" : "false"); }},
      {"calibrate_ks", [](RunConfig& c, const std::string& v) { c.calibrate_ks = parse_list<int>("calibrate_ks", v); },
       [](const RunConfig& c) { return join(c.calibrate_ks); }},
      {"audit_T", [](RunConfig& c, const std::string& v) { c.audit_T = parse_number<double>("audit_T", v); },
       [](const RunConfig& c) { return exact(c.audit_T); }},
      {"audit_trials",
       [](RunConfig& c, const std::string& v) { c.audit_trials = parse_number<std::uint64_t>("audit_trials", v); },
       [](const RunConfig& c) { return std::to_string(c.audit_trials); }},
      {"audit_k", [](RunConfig& c, const std::string& v) { c.audit_k = parse_number<int>("audit_k", v); },
       [](const RunConfig& c) { return std::to_string(c.audit_k); }},
      {"audit_m", [](RunConfig& c, const std::string& v) { c.audit_m = parse_number<int>("audit_m", v); },
       [](const RunConfig& c) { return std::to_string(c.audit_m); }},
      {"boundary_betas",
       [](RunConfig& c, const std::string& v) { c.boundary_betas = parse_number<int>("boundary_betas", v); },
       [](const RunConfig& c) { return std::to_string(c.boundary_betas); }},
      {"boundary_r_points",
       [](RunConfig& c, const std::string& v) { c.boundary_r_points = parse_number<int>("boundary_r_points", v); },
       [](const RunConfig& c) { return std::to_string(c.boundary_r_points); }},
      {"boundary_ks", [](RunConfig& c, const std::string& v) { c.boundary_ks = parse_list<int>("boundary_ks", v); },
       [](const RunConfig& c) { return join(c.boundary_ks); }},
      {"boundary_epsilon",
       [](RunConfig& c, const std::string& v) { c.boundary_epsilon = parse_number<double>("boundary_epsilon", v); },
       [](const RunConfig& c) { return exact(c.boundary_epsilon); }},
      {"boundary_ratio_lo",
       [](RunConfig& c, const std::string& v) { c.boundary_ratio_lo = parse_number<double>("boundary_ratio_lo", v); },
       [](const RunConfig& c) { return exact(c.boundary_ratio_lo); }},
      {"boundary_ratio_hi",
       [](RunConfig& c, const std::string& v) { c.boundary_ratio_hi = parse_number<double>("boundary_ratio_hi", v); },
       [](const RunConfig& c) { return exact(c.boundary_ratio_hi); }},
      {"boundary_band",
       [](RunConfig& c, const std::string& v) { c.boundary_band = parse_number<double>("boundary_band", v); },
       [](const RunConfig& c) { return exact(c.boundary_band); }},
  };
  return f;
}

const Field& field(const std::string& key) {
  for (const auto& f : fields())
    if (f.name == key) return f;
  throw ConfigError("unknown configuration key '" + key + "'");
}

std::string env_name(const std::string& key) {
  std::string s = kEnvPrefix;
  for (char c : key) s += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

Subset target_subset(const RunConfig& c) { return Subset(c.target, c.dim.d); }

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.push_back(f.name);
    return out;
  }();
  return k;
}

void RunConfig::set(const std::string& key, const std::string& value) { field(key).set(*this, value); }

std::string RunConfig::get(const std::string& key) const { return field(key).get(*this); }

SelectorConfig RunConfig::selector_config() const {
  SelectorConfig s;
  s.dim = dim;
  s.M = M;
  s.eps_hat_rule = eps_hat_rule;
  s.truncation = truncation;
  s.calibration = calibration;
  s.noise = noise;
  return s;
}

RiskOptions RunConfig::risk_options() const {
  RiskOptions o;
  o.J = J;
  o.seed = seed;
  o.enumeration = enumeration;
  o.threads = threads;
  return o;
}

void RunConfig::validate() const {
  require(std::find(kExperiments.begin(), kExperiments.end(), experiment) != kExperiments.end(),
          experiment.empty() ? "no experiment given" : "unknown experiment '" + experiment + "'");
  try {
    dim.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  require(M >= 0, "M must be nonnegative");
  require(threads >= 0, "threads must be nonnegative");
  require(!out.empty(), "out must name a directory");
  require(truncation != TruncationMode::preset || dim.s <= 4, "truncation=preset supports s <= 4 only");

  if (experiment == "table1") {
    require(!ds.empty(), "ds must list at least one dimension");
    for (int d : ds) require(d >= dim.s, "every d in ds must be at least s");
  }
  if (experiment == "table2" || experiment == "risk") {
    require(J >= 1, "J must be at least 1");
    require(enumeration.pool_size >= 1, "pool_size must be at least 1");
    require(!target.empty(), "target must name a subset");
    try {
      const SparsityPattern p = build_pattern(dim);
      const Subset t = target_subset(*this);
      require(p.is_active(t), "target " + t.to_string() + " is not an active component");
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
    if (experiment == "table2") {
      require(!alphas.empty(), "alphas must not be empty");
      for (double a : alphas) require(a > 0.0 && a <= 1.0, "alphas must lie in (0, 1]");
    } else {
      require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
    }
  }
  if (experiment == "calibrate") {
    require(M >= 2, "calibrate needs M >= 2");
    for (int k : calibrate_ks) require(k >= 1 && k <= dim.s, "calibrate_ks entries must lie in [1, s]");
  }
  if (experiment == "audit") {
    require(M >= 1, "audit needs M >= 1");
    require(audit_T >= 0.0, "audit_T must be nonnegative");
    require(audit_trials >= 1, "audit_trials must be positive");
    require(audit_k >= 1 && audit_k <= dim.s, "audit_k must lie in [1, s]");
    require(audit_m >= 0 && audit_m <= M, "audit_m must lie in [0, M]");
  }
  if (experiment == "boundary") {
    require(boundary_betas >= 1 && boundary_r_points >= 1, "boundary grid sizes must be positive");
    require(!boundary_ks.empty(), "boundary_ks must not be empty");
    for (int k : boundary_ks) require(k >= 1 && k <= dim.d, "boundary_ks entries must lie in [1, d]");
    require(boundary_epsilon > 0.0, "boundary_epsilon must be positive");
    require(boundary_ratio_lo > 0.0 && boundary_ratio_lo <= boundary_ratio_hi,
            "need 0 < boundary_ratio_lo <= boundary_ratio_hi");
    require(boundary_band >= 0.0, "boundary_band must be nonnegative");
  }
}

void apply_config_text(RunConfig& cfg, const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + " is not of the form key = value");
    const std::string key = trim(line.substr(0, eq));
    if (std::find(kInformational.begin(), kInformational.end(), key) != kInformational.end()) continue;
    cfg.set(key, line.substr(eq + 1));
  }
}

void apply_environment(RunConfig& cfg, const std::function<const char*(const char*)>& lookup) {
  for (const auto& key : RunConfig::keys())
    if (const char* v = lookup(env_name(key).c_str())) cfg.set(key, v);
}

// ---------------------------------------------------------------------------

namespace {

RunOutput run_table1(const RunConfig& c) {
  // pattern_count: actives in the preset layout, where one exists for (d, s, beta).
  CsvTable t({"d", "k", "beta", "log_binom", "active_count", "pattern_count"});
  for (int d : c.ds) {
    std::optional<SparsityPattern> preset;
    try {
      DimensionSpec dim = c.dim;
      dim.d = d;
      preset = build_pattern(dim);
    } catch (const DomainError&) {
    }
    for (int k = 1; k <= c.dim.s; ++k)
      t.add_row({std::to_string(d), std::to_string(k), format_number(c.dim.beta), format_number(log_binomial(d, k)),
                 std::to_string(active_count(d, k, c.dim.beta)),
                 preset ? std::to_string(preset->actives(k).size()) : ""});
  }
  return {t, "table1: " + std::to_string(t.rows().size()) + " rows"};
}

std::string losses_cell(const RiskReport& r) {
  std::string s;
  for (std::size_t i = 0; i < r.per_cycle_losses.size(); ++i)
    s += (i ? ";" : "") + std::to_string(r.per_cycle_losses[i]);
  return s;
}

std::string mode_label(const RiskReport& r) { return r.mode == EnumerationMode::pool ? "pool" : "full"; }

std::uint64_t sum_fp(const RiskReport& r) {
  std::uint64_t n = 0;
  for (const auto& t : r.orders) n += t.false_positives;
  return n;
}

std::uint64_t sum_miss(const RiskReport& r) {
  std::uint64_t n = 0;
  for (const auto& t : r.orders) n += t.misses;
  return n;
}

RunOutput run_table2(const RunConfig& c) {
  const SparsityPattern pattern = build_pattern(c.dim);
  const Selector selector(c.selector_config());
  const auto reports = attenuation_experiment(c.alphas, pattern, selector, c.risk_options(), target_subset(c));
  CsvTable t({"d", "alpha", "err", "se", "J", "mode", "pool_size", "misses", "false_positives",
              "extrapolated_false_positives", "per_cycle_losses"});
  std::string summary = "table2 d=" + std::to_string(c.dim.d) + " err:";
  for (const auto& r : reports) {
    t.add_row({std::to_string(c.dim.d), format_number(r.alpha), format_number(r.err), format_number(r.standard_error()),
               std::to_string(r.J), mode_label(r), std::to_string(r.pool_size), std::to_string(sum_miss(r)),
               std::to_string(sum_fp(r)), format_number(r.extrapolated_false_positives()), losses_cell(r)});
    summary += " " + format_number(r.err);
  }
  return {t, summary};
}

RunOutput run_risk(const RunConfig& c) {
  SparsityPattern pattern = build_pattern(c.dim);
  if (c.alpha != 1.0) pattern = pattern.attenuated(target_subset(c), c.alpha);
  const Selector selector(c.selector_config());
  const RiskReport r = estimate_risk(pattern, selector, c.risk_options());
  CsvTable t({"k", "universe", "active", "inactive_evaluated", "false_positives", "misses", "err", "se", "J", "mode",
              "pool_size", "extrapolated_false_positives", "per_cycle_losses"});
  for (const auto& o : r.orders) {
    const double err_k = static_cast<double>(o.false_positives + o.misses) / r.J;
    t.add_row({std::to_string(o.k), std::to_string(o.universe), std::to_string(o.active),
               std::to_string(o.inactive_evaluated), std::to_string(o.false_positives), std::to_string(o.misses),
               format_number(err_k), "", std::to_string(r.J), mode_label(r), std::to_string(r.pool_size), "", ""});
  }
  t.add_row({"all", "", "", "", std::to_string(sum_fp(r)), std::to_string(sum_miss(r)), format_number(r.err),
             format_number(r.standard_error()), std::to_string(r.J), mode_label(r), std::to_string(r.pool_size),
             format_number(r.extrapolated_false_positives()), losses_cell(r)});
  return {t, "risk err=" + format_number(r.err) + " (" + mode_label(r) + ")"};
}

RunOutput run_calibrate(const RunConfig& c) {
  const Selector selector(c.selector_config());
  std::vector<int> ks = c.calibrate_ks;
  if (ks.empty())
    for (int k = 1; k <= c.dim.s; ++k) ks.push_back(k);
  CsvTable t({"k", "m", "beta", "target", "r_star", "a_exact", "rel_residual", "eps_hat", "threshold",
              "support_radius", "support_points", "sum_omega_sq", "truncation_n"});
  double worst = 0.0;
  for (int k : ks) {
    const OrderSetup& o = selector.order(k);
    for (std::size_t m = 0; m < o.profiles.size(); ++m) {
      const double a = a_exact(o.r_stars[m], k, c.dim.sigma, c.dim.epsilon);
      const double res = std::abs(a - o.targets[m]) / o.targets[m];
      worst = std::max(worst, res);
      t.add_row({std::to_string(k), std::to_string(m + 1), format_number(o.betas[m]), format_number(o.targets[m]),
                 format_number(o.r_stars[m]), format_number(a), format_number(res), format_number(o.eps_hat),
                 format_number(o.threshold), format_number(o.profiles[m].support_radius()),
                 std::to_string(o.profiles[m].support_size()), format_number(o.profiles[m].sum_sq()),
                 std::to_string(o.truncation_n)});
    }
  }
  return {t, "calibrate: " + std::to_string(t.rows().size()) + " rows, worst residual " + format_number(worst)};
}

RunOutput run_audit(const RunConfig& c) {
  const Selector selector(c.selector_config());
  CsvTable t({"check", "k", "m", "value", "reference", "pass"});
  bool all = true;
  for (int k = 1; k <= c.dim.s; ++k) {
    const OrderSetup& o = selector.order(k);
    for (std::size_t m = 0; m < o.profiles.size(); ++m) {
      const double v = o.profiles[m].sum_sq();
      const bool ok = std::abs(v - 0.5) <= 1e-10 * 0.5;
      all = all && ok;
      t.add_row({"normalization", std::to_string(k), std::to_string(m + 1), format_number(v), "0.5", ok ? "1" : "0"});
    }
  }
  const OrderSetup& o = selector.order(c.audit_k);
  const int m = c.audit_m == 0 ? (c.M + 1) / 2 : c.audit_m;
  const WeightProfile& w = o.profiles[static_cast<std::size_t>(m - 1)];
  const TailAuditReport rep = tail_bound_audit(c.audit_T, c.audit_trials, c.seed, w);
  const double slack = std::exp(-0.5 * c.audit_T * c.audit_T * 0.8);
  const bool tail_ok = rep.upper_exceedance <= slack;
  all = all && tail_ok;
  t.add_row({"tail_upper", std::to_string(c.audit_k), std::to_string(m), format_number(rep.upper_exceedance),
             format_number(rep.reference), tail_ok ? "1" : "0"});
  t.add_row({"tail_regime", std::to_string(c.audit_k), std::to_string(m), format_number(c.audit_T * w.max_weight()),
             "0.1", rep.regime_ok ? "1" : "0"});
  return {t, std::string("audit: ") + (all ? "all checks pass" : "some checks fail")};
}

RunOutput run_boundary(const RunConfig& c) {
  BoundaryGrid g;
  for (int i = 0; i < c.boundary_betas; ++i) g.betas.push_back((i + 0.5) / c.boundary_betas);
  g.sigmas = {c.dim.sigma};
  g.ds = {c.dim.d};
  g.ks = c.boundary_ks;
  g.r_points = c.boundary_r_points;
  g.ratio_lo = c.boundary_ratio_lo;
  g.ratio_hi = c.boundary_ratio_hi;
  g.epsilon = c.boundary_epsilon;
  g.band = c.boundary_band;
  const auto rows = boundary_sweep(g);
  CsvTable t({"beta", "sigma", "d", "k", "r", "ratio", "verdict", "selection_threshold", "detection_threshold"});
  for (const auto& r : rows)
    t.add_row({format_number(r.beta), format_number(r.sigma), std::to_string(r.d), std::to_string(r.k),
               format_number(r.r), format_number(r.ratio), to_string(r.verdict),
               format_number(selection_boundary(r.beta)), format_number(detection_boundary())});
  return {t, "boundary: " + std::to_string(rows.size()) + " rows"};
}

}  // namespace

RunOutput execute(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.experiment == "table1") return run_table1(cfg);
  if (cfg.experiment == "table2") return run_table2(cfg);
  if (cfg.experiment == "risk") return run_risk(cfg);
  if (cfg.experiment == "calibrate") return run_calibrate(cfg);
  if (cfg.experiment == "audit") return run_audit(cfg);
  return run_boundary(cfg);
}

std::string manifest_text(const RunConfig& cfg, double wall_seconds, const std::string& data_file) {
  std::ostringstream os;
  for (const auto& key : RunConfig::keys()) os << key << " = " << cfg.get(key) << '\n';
  os << "code_version = " << kCodeVersion << '\n';
  os << "wall_time_s = " << format_number(wall_seconds) << '\n';
  os << "data_file = " << data_file << '\n';
  return os.str();
}

std::string usage_text() {
  std::string s = "usage: exactsel <experiment> [--config PATH] [--seed N] [--out DIR] [--mode full|pool]\n"
                  "                [--pool-size N] [--threads N] [--quiet]\n"
                  "experiments:";
  for (const auto& e : kExperiments) s += " " + e;
  s += "\nconfiguration keys (also settable as ";
  s += kEnvPrefix;
  s += "<KEY>):";
  for (const auto& k : RunConfig::keys()) s += " " + k;
  s += "\n";
  return s;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact selection of sparse functional-ANOVA components", "exactsel"};
  std::string experiment, config_path, out_dir, mode;
  std::uint64_t seed = 0, pool_size = 0;
  int threads = 0;
  bool quiet = false;
  app.add_option("experiment", experiment, "table1 | table2 | calibrate | risk | boundary | audit");
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--mode", mode, "subset enumeration: full | pool");
  app.add_option("--pool-size", pool_size, "sampled inactive subsets per order");
  app.add_option("--threads", threads, "worker threads, 0 = all cores");
  app.add_flag("--quiet", quiet, "no summary line");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help() << usage_text();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << usage_text();
    return kExitConfig;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot read config file " + config_path);
      std::stringstream buf;
      buf << in.rdbuf();
      apply_config_text(cfg, buf.str());
    }
    apply_environment(cfg, [](const char* name) { return std::getenv(name); });
    if (!experiment.empty()) cfg.experiment = experiment;
    if (app.count("--seed")) cfg.seed = seed;
    if (app.count("--out")) cfg.out = out_dir;
    if (app.count("--mode")) cfg.set("mode", mode);
    if (app.count("--pool-size")) cfg.enumeration.pool_size = pool_size;
    if (app.count("--threads")) cfg.threads = threads;
    if (quiet) cfg.quiet = true;
    cfg.validate();
    std::filesystem::create_directories(cfg.out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n' << usage_text();
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "config error: cannot create output directory: " << e.what() << '\n';
    return kExitConfig;
  }

  const auto start = std::chrono::steady_clock::now();
  RunOutput result;
  try {
    result = execute(cfg);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const std::filesystem::path dir(cfg.out);
  const std::string data_name = cfg.experiment + ".csv";
  {
    std::ofstream data(dir / data_name, std::ios::binary);
    result.data.write(data);
    std::ofstream manifest(dir / (cfg.experiment + ".manifest"), std::ios::binary);
    manifest << manifest_text(cfg, wall, data_name);
    if (!data || !manifest) {
      err << "error: cannot write outputs to " << cfg.out << '\n';
      return kExitNumeric;
    }
  }
  if (!cfg.quiet) out << result.summary << '\n';
  return kExitOk;
}

}  // namespace exactsel
