#include "haddm/config.hpp"

#include <set>

namespace haddm {

namespace {

using nlohmann::json;

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

// Strict field reader over one JSON object: every key must be consumed,
// finish() rejects leftovers by path.
class Fields {
 public:
  Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj.is_object()) throw ConfigError(path_, "expected an object");
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void get(const std::string& key, double& out) {
    if (const json* j = find(key)) {
      if (!j->is_number()) throw ConfigError(join(path_, key), "expected a number");
      out = j->get<double>();
    }
  }

  void get(const std::string& key, int& out) {
    if (const json* j = find(key)) {
      if (!j->is_number_integer())
        throw ConfigError(join(path_, key), "expected an integer");
      out = j->get<int>();
    }
  }

  void get(const std::string& key, long long& out) {
    if (const json* j = find(key)) {
      if (!j->is_number_integer())
        throw ConfigError(join(path_, key), "expected an integer");
      out = j->get<long long>();
    }
  }

  void get(const std::string& key, std::uint64_t& out) {
    if (const json* j = find(key)) {
      if (!j->is_number_integer() || (j->is_number_integer() && !j->is_number_unsigned() && j->get<long long>() < 0))
        throw ConfigError(join(path_, key), "expected a non-negative integer");
      out = j->get<std::uint64_t>();
    }
  }

  void get(const std::string& key, bool& out) {
    if (const json* j = find(key)) {
      if (!j->is_boolean()) throw ConfigError(join(path_, key), "expected a boolean");
      out = j->get<bool>();
    }
  }

  void get(const std::string& key, std::string& out) {
    if (const json* j = find(key)) {
      if (!j->is_string()) throw ConfigError(join(path_, key), "expected a string");
      out = j->get<std::string>();
    }
  }

  void get(const std::string& key, std::vector<double>& out) {
    if (const json* j = find(key)) {
      if (!j->is_array())
        throw ConfigError(join(path_, key), "expected an array of numbers");
      std::vector<double> values;
      for (std::size_t i = 0; i < j->size(); ++i) {
        const json& e = (*j)[i];
        if (!e.is_number())
          throw ConfigError(join(path_, key) + "[" + std::to_string(i) + "]",
                            "expected a number");
        values.push_back(e.get<double>());
      }
      out = std::move(values);
    }
  }

  void finish() const {
    for (const auto& item : obj_.items())
      if (!seen_.count(item.key()))
        throw ConfigError(join(path_, item.key()), "unknown key");
  }

  const std::string& path() const { return path_; }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

ArrayConfig parse_array(const json& j, const std::string& path) {
  Fields f(j, path);
  int n = 0, m = 0;
  double spacing = 0.5, wavelength = 1.0;
  f.get("n_antennas", n);
  f.get("subarray_size", m);
  f.get("spacing", spacing);
  f.get("wavelength", wavelength);
  f.finish();
  if (n == 0) throw ConfigError(join(path, "n_antennas"), "required field is missing");
  if (m == 0) throw ConfigError(join(path, "subarray_size"), "required field is missing");
  try {
    return make_array(n, m, spacing, wavelength);
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
}

OutputSpec parse_output(const json& j, const std::string& path) {
  Fields f(j, path);
  OutputSpec out;
  f.get("directory", out.directory);
  f.get("format", out.format);
  f.finish();
  if (out.format != "csv" && out.format != "json")
    throw ConfigError(join(path, "format"), "expected \"csv\" or \"json\"");
  if (out.directory.empty())
    throw ConfigError(join(path, "directory"), "must not be empty");
  return out;
}

WeightMethod parse_method(Fields& f) {
  WeightMethod method;
  std::string rule = "snr_sample_product", state = "stationary";
  f.get("weight_rule", rule);
  f.get("motion", state);
  if (rule == "snr_ratio") method.rule = WeightRule::snr_ratio;
  else if (rule == "sample_count") method.rule = WeightRule::sample_count;
  else if (rule == "snr_sample_product") method.rule = WeightRule::snr_sample_product;
  else
    throw ConfigError(join(f.path(), "weight_rule"),
                      "expected snr_ratio, sample_count or snr_sample_product");
  if (state == "stationary") method.state = MotionState::stationary;
  else if (state == "moving") method.state = MotionState::moving;
  else
    throw ConfigError(join(f.path(), "motion"), "expected stationary or moving");
  return method;
}

void parse_density_fields(Fields& f, DensityProtocol& proto) {
  f.get("theta0_deg", proto.theta0_deg);
  f.get("snr_tds_db", proto.snr_tds_db);
  f.get("snr_rts_db", proto.snr_rts_db);
  f.get("n_tds", proto.n_tds);
  f.get("n_rts", proto.n_rts);
  f.get("n_snapshots", proto.n_snapshots);
  f.get("n_ambiguity_snapshots", proto.n_ambiguity_snapshots);
  proto.method = parse_method(f);
}

void check_positive(int v, const std::string& path) {
  if (v < 1) throw ConfigError(path, "must be at least 1");
}

void check_angle(double theta_deg, const std::string& path) {
  if (!(theta_deg >= 0.0 && theta_deg <= 180.0))
    throw ConfigError(path, "must lie in [0, 180] degrees");
}

DoaScenario parse_doa(const json& j, const std::string& path) {
  Fields f(j, path);
  DoaScenario s;
  f.get("theta0_deg", s.theta0_deg);
  f.get("snr_db", s.snr_db);
  f.get("noiseless", s.noiseless);
  f.get("n_snapshots", s.n_snapshots);
  f.get("n_ambiguity_snapshots", s.n_ambiguity_snapshots);
  f.finish();
  check_angle(s.theta0_deg, join(path, "theta0_deg"));
  check_positive(s.n_snapshots, join(path, "n_snapshots"));
  check_positive(s.n_ambiguity_snapshots, join(path, "n_ambiguity_snapshots"));
  return s;
}

SweepRmseScenario parse_sweep_rmse(const json& j, const std::string& path) {
  Fields f(j, path);
  SweepRmseScenario s;
  f.get("theta0_deg", s.proto.theta0_deg);
  f.get("n_snapshots", s.proto.n_snapshots);
  f.get("n_ambiguity_snapshots", s.proto.n_ambiguity_snapshots);
  f.get("snr_grid_db", s.snr_grid_db);
  f.get("n_trials", s.n_trials);
  f.finish();
  check_angle(s.proto.theta0_deg, join(path, "theta0_deg"));
  check_positive(s.proto.n_snapshots, join(path, "n_snapshots"));
  check_positive(s.proto.n_ambiguity_snapshots, join(path, "n_ambiguity_snapshots"));
  if (s.n_trials < 2) throw ConfigError(join(path, "n_trials"), "must be at least 2");
  if (s.snr_grid_db.empty())
    throw ConfigError(join(path, "snr_grid_db"), "must not be empty");
  return s;
}

DensityScenario parse_density(const json& j, const std::string& path) {
  Fields f(j, path);
  DensityScenario s;
  parse_density_fields(f, s.proto);
  f.finish();
  check_angle(s.proto.theta0_deg, join(path, "theta0_deg"));
  if (s.proto.n_tds < 2) throw ConfigError(join(path, "n_tds"), "must be at least 2");
  if (s.proto.n_rts < 2) throw ConfigError(join(path, "n_rts"), "must be at least 2");
  check_positive(s.proto.n_snapshots, join(path, "n_snapshots"));
  check_positive(s.proto.n_ambiguity_snapshots,
                 join(path, "n_ambiguity_snapshots"));
  return s;
}

DmEvalScenario parse_dm_eval(const json& j, const std::string& path) {
  Fields f(j, path);
  DmEvalScenario s;
  f.get("theta_d_deg", s.proto.theta_d_deg);
  f.get("theta_e_deg", s.proto.theta_e_deg);
  f.get("beta", s.proto.beta);
  f.get("n_streams", s.proto.n_streams);
  f.get("snr_grid_db", s.proto.snr_grid_db);
  f.get("n_draws", s.proto.n_draws);
  f.get("n_bits_per_draw", s.proto.n_bits_per_draw);
  if (const json* learn = f.find("learning")) {
    Fields lf(*learn, join(path, "learning"));
    parse_density_fields(lf, s.proto.learning);
    lf.finish();
    check_angle(s.proto.learning.theta0_deg,
                join(path, "learning.theta0_deg"));
  }
  f.finish();
  check_angle(s.proto.theta_d_deg, join(path, "theta_d_deg"));
  check_angle(s.proto.theta_e_deg, join(path, "theta_e_deg"));
  if (!(s.proto.beta >= 0.0 && s.proto.beta <= 1.0))
    throw ConfigError(join(path, "beta"), "must lie in [0, 1]");
  if (s.proto.n_streams < 0)
    throw ConfigError(join(path, "n_streams"), "must be 0 (auto) or positive");
  if (s.proto.snr_grid_db.empty())
    throw ConfigError(join(path, "snr_grid_db"), "must not be empty");
  if (s.proto.n_draws < 2)
    throw ConfigError(join(path, "n_draws"), "must be at least 2");
  if (s.proto.n_bits_per_draw < 1000 || (s.proto.n_bits_per_draw & 1))
    throw ConfigError(join(path, "n_bits_per_draw"),
                      "must be even and at least 1000");
  return s;
}

SnrEstScenario parse_snr_est(const json& j, const std::string& path) {
  Fields f(j, path);
  SnrEstScenario s;
  f.get("theta0_deg", s.theta0_deg);
  f.get("snr_grid_db", s.snr_grid_db);
  f.get("n_snapshots", s.n_snapshots);
  f.get("n_trials", s.n_trials);
  f.finish();
  check_angle(s.theta0_deg, join(path, "theta0_deg"));
  if (s.snr_grid_db.empty())
    throw ConfigError(join(path, "snr_grid_db"), "must not be empty");
  check_positive(s.n_snapshots, join(path, "n_snapshots"));
  if (s.n_trials < 2) throw ConfigError(join(path, "n_trials"), "must be at least 2");
  return s;
}

}  // namespace

ExperimentConfig parse_config(const json& root) {
  Fields f(root, "");
  ExperimentConfig cfg;
  f.get("experiment", cfg.experiment);
  f.get("seed", cfg.seed);

  if (const json* arr = f.find("array"))
    cfg.array = parse_array(*arr, "array");
  else
    throw ConfigError("array", "required section is missing");

  if (const json* out = f.find("output")) cfg.output = parse_output(*out, "output");

  const json* scenario = f.find("scenario");
  const json empty = json::object();
  const json& sj = scenario ? *scenario : empty;

  if (cfg.experiment == "doa") cfg.scenario = parse_doa(sj, "scenario");
  else if (cfg.experiment == "sweep-rmse") cfg.scenario = parse_sweep_rmse(sj, "scenario");
  else if (cfg.experiment == "density") cfg.scenario = parse_density(sj, "scenario");
  else if (cfg.experiment == "dm-eval") cfg.scenario = parse_dm_eval(sj, "scenario");
  else if (cfg.experiment == "snr-est") cfg.scenario = parse_snr_est(sj, "scenario");
  else if (cfg.experiment.empty())
    throw ConfigError("experiment", "required field is missing");
  else
    throw ConfigError("experiment",
                      "unknown experiment \"" + cfg.experiment +
                          "\"; expected doa, sweep-rmse, density, dm-eval or snr-est");

  f.finish();
  return cfg;
}

void apply_override(json& root, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError(assignment, "override must look like path.to.field=value");
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  json parsed = json::parse(value, nullptr, false);
  if (parsed.is_discarded()) parsed = value;  // bare strings stay strings

  std::string pointer;
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t dot = path.find('.', start);
    const std::string part =
        path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty())
      throw ConfigError(path, "override path has an empty segment");
    pointer += "/" + part;
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  root[json::json_pointer(pointer)] = std::move(parsed);
}

}  // namespace haddm
