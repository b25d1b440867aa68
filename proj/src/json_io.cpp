#include "gibbsstab/json_io.hpp"

#include <algorithm>
#include <cmath>

namespace gstab {

ConfigError::ConfigError(const std::string& path, const std::string& what) : Error(path + ": " + what) {}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!ok) throw ConfigError(path, "unknown key '" + key + "'");
  }
}

namespace {

double get_number(const json& j, const char* key, const std::string& path) {
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(path + "." + key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(path + "." + key, "expected a finite number");
  return d;
}

double number_or(const json& j, const char* key, double def, const std::string& path) {
  return j.contains(key) ? get_number(j, key, path) : def;
}

std::int64_t get_int(const json& j, const char* key, const std::string& path) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(path + "." + key, "expected an integer");
  return v.get<std::int64_t>();
}

std::int64_t int_or(const json& j, const char* key, std::int64_t def, const std::string& path) {
  return j.contains(key) ? get_int(j, key, path) : def;
}

std::size_t count_or(const json& j, const char* key, std::size_t def, const std::string& path) {
  const std::int64_t v = int_or(j, key, static_cast<std::int64_t>(def), path);
  if (v < 0) throw ConfigError(path + "." + key, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

bool bool_or(const json& j, const char* key, bool def, const std::string& path) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_boolean()) throw ConfigError(path + "." + key, "expected a boolean");
  return j.at(key).get<bool>();
}

std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(path, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

template <typename F>
auto rethrow_as_config(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError(path, e.what());
  } catch (const json::exception& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace

ErrorDist dist_from_json(const json& j, const std::string& path) {
  check_keys(j, {"kind", "scale", "variance", "beta"}, path);
  return rethrow_as_config(path, [&] {
    if (!j.contains("kind") || !j.at("kind").is_string()) throw ConfigError(path + ".kind", "missing or not a string");
    const std::string kind = j.at("kind").get<std::string>();
    if (j.contains("scale") && j.contains("variance")) throw ConfigError(path, "give either scale or variance");
    double scale = 1.0;
    if (j.contains("scale")) scale = get_number(j, "scale", path);
    if (j.contains("variance")) {
      const double v = get_number(j, "variance", path);
      if (!(v > 0.0)) throw ConfigError(path + ".variance", "must be positive");
      scale = std::sqrt(v);
    }
    if (j.contains("beta") && kind != "exppower") throw ConfigError(path + ".beta", "only valid for exppower");
    if (kind == "cauchy") return ErrorDist::cauchy(scale);
    if (kind == "dexp") return ErrorDist::double_exp(scale);
    if (kind == "gauss") return ErrorDist::gaussian(scale);
    if (kind == "exppower") return ErrorDist::exp_power(scale, number_or(j, "beta", 3.0, path));
    throw ConfigError(path + ".kind", "unknown distribution '" + kind + "'");
  });
}

json to_json(const ErrorDist& d) {
  static const char* names[] = {"cauchy", "dexp", "gauss", "exppower"};
  json j{{"kind", names[static_cast<int>(d.kind())]}, {"scale", d.scale()}};
  if (d.kind() == DistKind::ExpPower) j["beta"] = d.beta();
  return j;
}

HierModel model_from_json(const json& j, const std::string& path) {
  check_keys(j, {"type", "f1", "f2", "y"}, path);
  return rethrow_as_config(path, [&] {
    if (j.contains("type") && j.at("type") != "hier") throw ConfigError(path + ".type", "expected \"hier\"");
    if (!j.contains("f1") || !j.contains("f2")) throw ConfigError(path, "f1 and f2 are required");
    const ErrorDist f1 = dist_from_json(j.at("f1"), path + ".f1");
    const ErrorDist f2 = dist_from_json(j.at("f2"), path + ".f2");
    std::vector<std::vector<double>> y;
    const json yj = j.value("y", json(0.0));
    if (yj.is_number()) {
      y = {{yj.get<double>()}};
    } else if (yj.is_array() && !yj.empty() && yj.front().is_array()) {
      for (std::size_t i = 0; i < yj.size(); ++i) y.push_back(number_list(yj[i], path + ".y[" + std::to_string(i) + "]"));
    } else {
      for (double v : number_list(yj, path + ".y")) y.push_back({v});
    }
    return HierModel(f1, f2, y);
  });
}

json to_json(const HierModel& m) {
  json j{{"type", "hier"}, {"f1", to_json(m.f1())}, {"f2", to_json(m.f2())}};
  if (m.is_simple()) {
    j["y"] = m.y_scalar();
  } else {
    j["y"] = m.y();
  }
  return j;
}

bool is_lgp_model(const json& j) { return j.is_object() && j.value("type", std::string()) == "lgp"; }

LgpModel lgp_model_from_json(const json& j, const std::string& path) {
  check_keys(j, {"type", "f1", "p", "phi", "marginal_var", "sigma", "y", "data_seed", "data_theta"}, path);
  return rethrow_as_config(path, [&] {
    const ErrorDist f1 = j.contains("f1") ? dist_from_json(j.at("f1"), path + ".f1") : ErrorDist::cauchy(1.0);
    Eigen::MatrixXd sigma;
    if (j.contains("sigma")) {
      if (j.contains("p") || j.contains("phi") || j.contains("marginal_var")) {
        throw ConfigError(path, "give either sigma or the AR(1) parameters");
      }
      const json& s = j.at("sigma");
      if (!s.is_array() || s.empty()) throw ConfigError(path + ".sigma", "expected a square matrix");
      const auto p = static_cast<Eigen::Index>(s.size());
      sigma.resize(p, p);
      for (Eigen::Index r = 0; r < p; ++r) {
        const std::vector<double> row = number_list(s[static_cast<std::size_t>(r)], path + ".sigma");
        if (static_cast<Eigen::Index>(row.size()) != p) throw ConfigError(path + ".sigma", "expected a square matrix");
        for (Eigen::Index c = 0; c < p; ++c) sigma(r, c) = row[static_cast<std::size_t>(c)];
      }
    } else {
      const std::int64_t p = int_or(j, "p", 100, path);
      sigma = build_ar1_cov(static_cast<int>(p), number_or(j, "phi", 0.9, path), number_or(j, "marginal_var", 1.0, path));
    }
    Eigen::VectorXd y;
    if (j.contains("y")) {
      if (j.contains("data_seed") || j.contains("data_theta")) throw ConfigError(path, "give either y or data_seed");
      const std::vector<double> v = number_list(j.at("y"), path + ".y");
      y = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    } else {
      const std::int64_t ds = int_or(j, "data_seed", 1, path);
      y = LgpModel::simulate(sigma, f1, number_or(j, "data_theta", 0.0, path), static_cast<std::uint64_t>(ds));
    }
    return LgpModel(sigma, y, f1);
  });
}

Parametrisation kernel_from_json(const json& j, const std::string& path) {
  check_keys(j, {"type", "rho", "p_mix"}, path);
  return rethrow_as_config(path, [&] {
    if (!j.contains("type") || !j.at("type").is_string()) throw ConfigError(path + ".type", "missing or not a string");
    const std::string t = j.at("type").get<std::string>();
    if (j.contains("rho") && t != "partially_centred") throw ConfigError(path + ".rho", "only valid for partially_centred");
    if (j.contains("p_mix") && t != "hybrid") throw ConfigError(path + ".p_mix", "only valid for hybrid");
    if (t == "centred") return Parametrisation::centred();
    if (t == "noncentred") return Parametrisation::non_centred();
    if (t == "partially_centred") {
      if (!j.contains("rho")) throw ConfigError(path + ".rho", "required for partially_centred");
      return Parametrisation::partially_centred(get_number(j, "rho", path));
    }
    if (t == "grouped") return Parametrisation::grouped();
    if (t == "hybrid") return Parametrisation::hybrid(number_or(j, "p_mix", 0.5, path));
    throw ConfigError(path + ".type", "unknown kernel '" + t + "'");
  });
}

json to_json(const Parametrisation& p) {
  switch (p.kind) {
    case Parametrisation::Kind::Centred:
      return {{"type", "centred"}};
    case Parametrisation::Kind::NonCentred:
      return {{"type", "noncentred"}};
    case Parametrisation::Kind::PartiallyCentred:
      return {{"type", "partially_centred"}, {"rho", p.rho}};
    case Parametrisation::Kind::Grouped:
      return {{"type", "grouped"}};
    case Parametrisation::Kind::Hybrid:
      return {{"type", "hybrid"}, {"p_mix", p.p_mix}};
  }
  return {};
}

SliceConfig slice_from_json(const json& j, const std::string& path) {
  check_keys(j, {"initial_width", "max_stepout", "max_shrink", "n_sweeps", "reflect"}, path);
  return rethrow_as_config(path, [&] {
    SliceConfig c;
    c.initial_width = number_or(j, "initial_width", c.initial_width, path);
    c.max_stepout = static_cast<int>(int_or(j, "max_stepout", c.max_stepout, path));
    c.max_shrink = static_cast<int>(int_or(j, "max_shrink", c.max_shrink, path));
    c.n_sweeps = static_cast<int>(int_or(j, "n_sweeps", c.n_sweeps, path));
    c.reflect = bool_or(j, "reflect", c.reflect, path);
    c.validate();
    return c;
  });
}

json to_json(const SliceConfig& c) {
  return {{"initial_width", c.initial_width}, {"max_stepout", c.max_stepout}, {"max_shrink", c.max_shrink},
          {"n_sweeps", c.n_sweeps},           {"reflect", c.reflect}};
}

QRate qrate_from_json(const json& j, const std::string& path) {
  if (j == "derived") return QRate::Derived;
  if (j == "likelihood_only") return QRate::LikelihoodOnly;
  throw ConfigError(path, "expected \"derived\" or \"likelihood_only\"");
}

LgpRunConfig mala_from_json(const json& j, const std::string& path) {
  check_keys(j, {"step_size", "n_inner", "target_accept", "tune_iter"}, path);
  return rethrow_as_config(path, [&] {
    LgpRunConfig c;
    c.mala.step_size = number_or(j, "step_size", c.mala.step_size, path);
    c.mala.n_inner = static_cast<int>(int_or(j, "n_inner", c.mala.n_inner, path));
    c.mala.target_accept = number_or(j, "target_accept", c.mala.target_accept, path);
    c.tune_iter = count_or(j, "tune_iter", c.tune_iter, path);
    c.mala.validate();
    return c;
  });
}

json to_json(const LgpRunConfig& c) {
  return {{"step_size", c.mala.step_size},
          {"n_inner", c.mala.n_inner},
          {"target_accept", c.mala.target_accept},
          {"tune_iter", c.tune_iter}};
}

DiagConfig diag_from_json(const json& j, const std::string& path) {
  check_keys(j,
             {"alpha", "theta_ladder", "n_rep", "mode_radius", "ks_threshold", "drift_threshold", "ptip_eps",
              "return_seeds", "return_max_iter", "return_envelope", "limit_tol", "pull_min"},
             path);
  return rethrow_as_config(path, [&] {
    DiagConfig c;
    c.alpha = number_or(j, "alpha", c.alpha, path);
    if (j.contains("theta_ladder")) c.theta_ladder = number_list(j.at("theta_ladder"), path + ".theta_ladder");
    c.n_rep = count_or(j, "n_rep", c.n_rep, path);
    c.mode_radius = number_or(j, "mode_radius", c.mode_radius, path);
    c.ks_threshold = number_or(j, "ks_threshold", c.ks_threshold, path);
    c.drift_threshold = number_or(j, "drift_threshold", c.drift_threshold, path);
    c.ptip_eps = number_or(j, "ptip_eps", c.ptip_eps, path);
    c.return_seeds = count_or(j, "return_seeds", c.return_seeds, path);
    c.return_max_iter = count_or(j, "return_max_iter", c.return_max_iter, path);
    c.return_envelope = number_or(j, "return_envelope", c.return_envelope, path);
    c.limit_tol = number_or(j, "limit_tol", c.limit_tol, path);
    c.pull_min = number_or(j, "pull_min", c.pull_min, path);
    c.validate();
    return c;
  });
}

json to_json(const DiagConfig& c) {
  return {{"alpha", c.alpha},
          {"theta_ladder", c.theta_ladder},
          {"n_rep", c.n_rep},
          {"mode_radius", c.mode_radius},
          {"ks_threshold", c.ks_threshold},
          {"drift_threshold", c.drift_threshold},
          {"ptip_eps", c.ptip_eps},
          {"return_seeds", c.return_seeds},
          {"return_max_iter", c.return_max_iter},
          {"return_envelope", c.return_envelope},
          {"limit_tol", c.limit_tol},
          {"pull_min", c.pull_min}};
}

QuadConfig quad_from_json(const json& j, const std::string& path) {
  check_keys(j, {"rel_tol", "abs_tol", "max_subdivisions", "tail_policy", "truncate_scales"}, path);
  return rethrow_as_config(path, [&] {
    QuadConfig c;
    c.rel_tol = number_or(j, "rel_tol", c.rel_tol, path);
    c.abs_tol = number_or(j, "abs_tol", c.abs_tol, path);
    c.max_subdivisions = static_cast<int>(int_or(j, "max_subdivisions", c.max_subdivisions, path));
    c.truncate_scales = number_or(j, "truncate_scales", c.truncate_scales, path);
    if (j.contains("tail_policy")) {
      const json& t = j.at("tail_policy");
      if (t == "tangent_map") {
        c.tail_policy = TailPolicy::TangentMap;
      } else if (t == "truncate") {
        c.tail_policy = TailPolicy::Truncate;
      } else {
        throw ConfigError(path + ".tail_policy", "expected \"tangent_map\" or \"truncate\"");
      }
    }
    if (!(c.rel_tol > 0.0) || !(c.abs_tol > 0.0)) throw ConfigError(path, "tolerances must be positive");
    if (c.max_subdivisions < 1) throw ConfigError(path + ".max_subdivisions", "must be positive");
    return c;
  });
}

json to_json(const QuadConfig& c) {
  return {{"rel_tol", c.rel_tol},
          {"abs_tol", c.abs_tol},
          {"max_subdivisions", c.max_subdivisions},
          {"tail_policy", c.tail_policy == TailPolicy::TangentMap ? "tangent_map" : "truncate"},
          {"truncate_scales", c.truncate_scales}};
}

namespace {
json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
}  // namespace

json to_json(const StabilityReport& r) {
  json j;
  j["model_id"] = r.model_id;
  j["kernel_id"] = r.kernel_id;
  j["seed"] = r.seed;
  j["config"] = to_json(r.config);
  j["classification"] = std::string(1, to_code(r.classification));
  j["evidence"] = r.evidence;
  j["drift_curve"] = json::array();
  for (const auto& d : r.drift_curve) j["drift_curve"].push_back({{"theta0", d.theta0}, {"ratio", d.ratio}, {"stderr", d.se}});
  j["increment_tests"] = json::array();
  for (const auto& t : r.increment_tests) {
    j["increment_tests"].push_back(
        {{"theta0", t.theta0}, {"ks_prev", optional_number(t.ks_prev)}, {"ks_limit", optional_number(t.ks_limit)}});
  }
  j["tail_probs"] = json::array();
  for (const auto& [t, p] : r.tail_probs) j["tail_probs"].push_back({{"theta0", t}, {"prob", p}});
  j["return_times"] = json::array();
  for (const auto& rt : r.return_times) {
    j["return_times"].push_back({{"theta0", rt.theta0},
                                 {"median", rt.median},
                                 {"q25", rt.q25},
                                 {"q75", rt.q75},
                                 {"n_censored", rt.n_censored},
                                 {"times", rt.times}});
  }
  if (r.tail_ratio_summary.size() == 4) {
    j["tail_increment_ratio"] = {{"mean", r.tail_ratio_summary[0]},
                                 {"q25", r.tail_ratio_summary[1]},
                                 {"median", r.tail_ratio_summary[2]},
                                 {"q75", r.tail_ratio_summary[3]}};
  }
  return j;
}

json to_json(const PropertyReport& r) {
  return {{"RIP", r.rip},
          {"RID", r.rid},
          {"DUR", r.dur},
          {"PUR", r.pur},
          {"PTIP_P0", r.ptip_p0},
          {"PTIP_P1", r.ptip_p1},
          {"ladder", r.ladder},
          {"rip_distance", r.rip_distance},
          {"rid_distance", r.rid_distance},
          {"conditional_means", r.conditional_means},
          {"tail_p0", r.tail_p0},
          {"tail_p1", r.tail_p1},
          {"dur_pull", r.dur_pull},
          {"pur_pull", r.pur_pull}};
}

}  // namespace gstab
