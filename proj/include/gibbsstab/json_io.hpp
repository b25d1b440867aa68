#pragma once

#include <initializer_list>
#include <string>

#include <json.hpp>

#include "gibbsstab/diagnostics.hpp"
#include "gibbsstab/error_dists.hpp"
#include "gibbsstab/hier_model.hpp"
#include "gibbsstab/latent_gp.hpp"
#include "gibbsstab/oracle.hpp"

namespace gstab {

using json = nlohmann::json;

/// Raised for malformed or unknown configuration entries; `path` points at
/// the offending key, e.g. "model.f1.scale".
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& what);
};

/// Throws ConfigError when `j` is not an object or has keys outside `allowed`.
void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& path);

/// {"kind": "cauchy|dexp|gauss|exppower", "scale": s, "beta": b} where
/// "variance" may replace "scale".
ErrorDist dist_from_json(const json& j, const std::string& path = "dist");
json to_json(const ErrorDist& d);

/// {"f1": ..., "f2": ..., "y": number | [numbers] | [[numbers], ...]}.
/// A flat list means one observation per group.
HierModel model_from_json(const json& j, const std::string& path = "model");
json to_json(const HierModel& m);

/// {"type": "lgp", "f1": ..., "p": .., "phi": .., "marginal_var": ..} or
/// {"type": "lgp", "sigma": [[..]]}, with either "y" or a simulated data
/// set ("data_seed", "data_theta").
LgpModel lgp_model_from_json(const json& j, const std::string& path = "model");
bool is_lgp_model(const json& j);

/// {"type": "centred|noncentred|partially_centred|grouped|hybrid", "rho": r, "p_mix": p}
Parametrisation kernel_from_json(const json& j, const std::string& path = "kernel");
json to_json(const Parametrisation& p);

SliceConfig slice_from_json(const json& j, const std::string& path = "slice");
json to_json(const SliceConfig& c);
QRate qrate_from_json(const json& j, const std::string& path = "q_rate");
LgpRunConfig mala_from_json(const json& j, const std::string& path = "mala");
json to_json(const LgpRunConfig& c);
DiagConfig diag_from_json(const json& j, const std::string& path = "diag");
json to_json(const DiagConfig& c);
QuadConfig quad_from_json(const json& j, const std::string& path = "quadrature");
json to_json(const QuadConfig& c);

json to_json(const StabilityReport& r);
json to_json(const PropertyReport& r);

}  // namespace gstab
