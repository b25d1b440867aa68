#include "gibbsstab/experiment.hpp"

#include <array>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "gibbsstab/stats.hpp"

namespace gstab {

namespace fs = std::filesystem;

std::size_t thread_budget() {
  if (const char* env = std::getenv("GSL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t nt = std::min(thread_budget(), n);
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first) first = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

namespace {

struct Common {
  std::string name;
  std::uint64_t seed = 1;
  fs::path out_dir = ".";
};

std::uint64_t seed_of(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) throw ConfigError(path, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

fs::path resolve_out(const json& cfg, const CliOverrides& cli) {
  if (cli.out_dir) return *cli.out_dir;
  if (cfg.contains("output_dir")) {
    if (!cfg.at("output_dir").is_string()) throw ConfigError("output_dir", "expected a string");
    return cfg.at("output_dir").get<std::string>();
  }
  return ".";
}

std::ofstream open_out(const fs::path& p) {
  fs::create_directories(p.parent_path().empty() ? fs::path(".") : p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error("cannot open " + p.string() + " for writing");
  return os;
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream os = open_out(p);
  os << j.dump(2) << '\n';
}

std::string kernel_tag(const Parametrisation& p) {
  switch (p.kind) {
    case Parametrisation::Kind::Centred:
      return "P0";
    case Parametrisation::Kind::NonCentred:
      return "P1";
    case Parametrisation::Kind::PartiallyCentred:
      return "PC" + format_double(p.rho);
    case Parametrisation::Kind::Grouped:
      return "grouped";
    case Parametrisation::Kind::Hybrid:
      return "hybrid" + format_double(p.p_mix);
  }
  return "kernel";
}

KernelOptions kernel_options(const json& cfg) {
  KernelOptions o;
  if (cfg.contains("slice")) o.slice = slice_from_json(cfg.at("slice"), "slice");
  if (cfg.contains("q_rate")) o.q_rate = qrate_from_json(cfg.at("q_rate"), "q_rate");
  return o;
}

json kernel_options_json(const KernelOptions& o) {
  return {{"slice", to_json(o.slice)}, {"q_rate", o.q_rate == QRate::Derived ? "derived" : "likelihood_only"}};
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

std::string name_of(const json& cfg, const std::string& def) {
  if (!cfg.contains("name")) return def;
  if (!cfg.at("name").is_string()) throw ConfigError("name", "expected a string");
  return cfg.at("name").get<std::string>();
}

// ---------------------------------------------------------------- run

struct Job {
  Parametrisation kernel;
  double theta0;
  std::size_t chain;
  std::size_t index;
};

}  // namespace

int cmd_run(const json& config, const CliOverrides& cli, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    check_keys(config, {"name", "model", "kernel", "run", "slice", "q_rate", "mala", "output_dir"}, "config");
    if (!config.contains("model")) throw ConfigError("model", "required");
    if (!config.contains("kernel")) throw ConfigError("kernel", "required");
    const json run = config.value("run", json::object());
    check_keys(run, {"theta0", "n_iter", "burn_in", "seed", "n_chains", "record_x"}, "run");

    const bool lgp = is_lgp_model(config.at("model"));
    std::optional<HierModel> hm;
    std::optional<LgpModel> lm;
    if (lgp) {
      lm = lgp_model_from_json(config.at("model"));
    } else {
      hm = model_from_json(config.at("model"));
    }
    std::vector<Parametrisation> kernels;
    const json& kj = config.at("kernel");
    if (kj.is_array()) {
      for (std::size_t i = 0; i < kj.size(); ++i) kernels.push_back(kernel_from_json(kj[i], "kernel[" + std::to_string(i) + "]"));
    } else {
      kernels.push_back(kernel_from_json(kj));
    }
    if (kernels.empty()) throw ConfigError("kernel", "no kernels given");
    if (lgp) {
      for (const auto& k : kernels) {
        if (k.kind != Parametrisation::Kind::Centred && k.kind != Parametrisation::Kind::NonCentred) {
          throw ConfigError("kernel", "latent GP runs support centred and noncentred only");
        }
      }
      if (config.contains("slice") && config.at("slice").contains("reflect")) {
        throw ConfigError("slice.reflect", "not used by latent GP runs");
      }
    } else if (config.contains("mala")) {
      throw ConfigError("mala", "only valid for latent GP models");
    }

    std::vector<double> theta0s{0.0};
    if (run.contains("theta0")) {
      const json& t = run.at("theta0");
      if (t.is_number()) {
        theta0s = {t.get<double>()};
      } else if (t.is_array() && !t.empty()) {
        theta0s.clear();
        for (const auto& v : t) {
          if (!v.is_number()) throw ConfigError("run.theta0", "expected numbers");
          theta0s.push_back(v.get<double>());
        }
      } else {
        throw ConfigError("run.theta0", "expected a number or a non-empty array");
      }
    }
    auto count = [&](const char* key, std::int64_t def, std::int64_t min) {
      if (!run.contains(key)) return static_cast<std::size_t>(def);
      if (!run.at(key).is_number_integer() || run.at(key).get<std::int64_t>() < min) {
        throw ConfigError(std::string("run.") + key, "expected an integer >= " + std::to_string(min));
      }
      return static_cast<std::size_t>(run.at(key).get<std::int64_t>());
    };
    const std::size_t n_iter = count("n_iter", 10000, 1);
    const std::size_t burn_in = count("burn_in", 0, 0);
    const std::size_t n_chains = count("n_chains", 1, 1);
    if (burn_in >= n_iter) throw ConfigError("run.burn_in", "must be smaller than n_iter");
    std::uint64_t seed = run.contains("seed") ? seed_of(run.at("seed"), "run.seed") : 1;
    if (cli.seed) seed = *cli.seed;
    bool record_x = false;
    if (run.contains("record_x")) {
      if (!run.at("record_x").is_boolean()) throw ConfigError("run.record_x", "expected a boolean");
      record_x = run.at("record_x").get<bool>();
    }
    const KernelOptions kopts = kernel_options(config);
    LgpRunConfig lcfg;
    if (config.contains("mala")) lcfg = mala_from_json(config.at("mala"));
    lcfg.slice = kopts.slice;
    const std::string name = name_of(config, "run");
    const fs::path out = resolve_out(config, cli);

    json resolved;
    resolved["name"] = name;
    resolved["model"] = lgp ? config.at("model") : to_json(*hm);
    resolved["kernel"] = json::array();
    for (const auto& k : kernels) resolved["kernel"].push_back(to_json(k));
    resolved["run"] = {{"theta0", theta0s}, {"n_iter", n_iter},     {"burn_in", burn_in},
                       {"seed", seed},      {"n_chains", n_chains}, {"record_x", record_x}};
    const json ko = kernel_options_json(kopts);
    resolved["slice"] = ko["slice"];
    if (!lgp) resolved["q_rate"] = ko["q_rate"];
    if (lgp) resolved["mala"] = to_json(lcfg);
    resolved["output_dir"] = out.string();

    std::vector<Job> jobs;
    for (const auto& k : kernels) {
      for (double t : theta0s) {
        for (std::size_t c = 0; c < n_chains; ++c) jobs.push_back({k, t, c, jobs.size()});
      }
    }
    std::vector<Trace> traces(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) {
      const Job& jb = jobs[i];
      traces[i] = lgp ? run_lgp_chain(*lm, jb.kernel, jb.theta0, lcfg, n_iter, seed, record_x, jb.index)
                      : run_chain(jb.kernel, *hm, jb.theta0, n_iter, seed, kopts, record_x, jb.index);
      traces[i].burn_in = std::max(traces[i].burn_in, burn_in);
    });

    json summary;
    summary["config"] = resolved;
    summary["seed"] = seed;
    summary["chains"] = json::array();
    const std::string cfg_line = resolved.dump();
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      const Job& jb = jobs[i];
      const Trace& tr = traces[i];
      const std::string file =
          name + "_" + kernel_tag(jb.kernel) + "_theta0_" + format_double(jb.theta0) + "_chain" + std::to_string(jb.chain) + ".csv";
      {
        std::ofstream os = open_out(out / file);
        write_trace_csv(os, tr,
                        {"config: " + cfg_line, "seed: " + std::to_string(seed), "kernel: " + tr.kernel_id,
                         "model: " + tr.model_id, "theta0: " + format_double(jb.theta0),
                         "chain: " + std::to_string(jb.chain) + " (stream " + std::to_string(jb.index) + ")",
                         "burn_in: " + std::to_string(tr.burn_in)});
      }
      const std::span<const double> all(tr.thetas);
      const std::span<const double> kept = all.subspan(tr.burn_in);
      json c;
      c["file"] = file;
      c["kernel"] = tr.kernel_id;
      c["theta0"] = jb.theta0;
      c["chain"] = jb.chain;
      c["stream_index"] = jb.index;
      c["n_iter"] = tr.n_iter;
      c["burn_in"] = tr.burn_in;
      c["theta_min"] = *std::min_element(all.begin(), all.end());
      c["theta_max"] = *std::max_element(all.begin(), all.end());
      c["theta_mean"] = kept.size() ? mean(kept) : 0.0;
      c["acf"] = kept.size() > 1 ? acf(kept, 50) : std::vector<double>{};
      c["stats"] = tr.stats;
      summary["chains"].push_back(c);
      log << "wrote " << (out / file).string() << '\n';
    }
    write_json(out / (name + "_summary.json"), summary);
    log << "wrote " << (out / (name + "_summary.json")).string() << '\n';
    return static_cast<int>(kExitOk);
  });
}

// ---------------------------------------------------------------- table2

namespace {

constexpr char kCodes[4] = {'C', 'E', 'G', 'L'};

struct CellJob {
  int row;  // f2
  int col;  // f1
  int panel;
  double ratio;  // sigma2 / sigma1
};

}  // namespace

int cmd_table2(const json& config, const CliOverrides& cli, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    check_keys(config, {"name", "sigma", "beta", "y", "ee_ratios", "seed", "diag", "slice", "output_dir"}, "config");
    auto num = [&](const char* key, double def) {
      if (!config.contains(key)) return def;
      if (!config.at(key).is_number()) throw ConfigError(key, "expected a number");
      return config.at(key).get<double>();
    };
    const double sigma = num("sigma", 1.0);
    const double beta = num("beta", 3.0);
    const double y = num("y", 0.0);
    if (!(sigma > 0.0)) throw ConfigError("sigma", "must be positive");
    std::vector<double> ratios{0.5, 2.0};
    if (config.contains("ee_ratios")) {
      ratios.clear();
      if (!config.at("ee_ratios").is_array() || config.at("ee_ratios").empty()) {
        throw ConfigError("ee_ratios", "expected a non-empty array");
      }
      for (const auto& r : config.at("ee_ratios")) {
        if (!r.is_number() || !(r.get<double>() > 0.0)) throw ConfigError("ee_ratios", "expected positive numbers");
        ratios.push_back(r.get<double>());
      }
    }
    std::uint64_t seed = config.contains("seed") ? seed_of(config.at("seed"), "seed") : 20240601;
    if (cli.seed) seed = *cli.seed;
    DiagConfig diag = config.contains("diag") ? diag_from_json(config.at("diag")) : DiagConfig{};
    KernelOptions kopts = kernel_options(config);
    diag.kernel = kopts;
    const std::string name = name_of(config, "table2");
    const fs::path out = resolve_out(config, cli);

    std::optional<std::array<int, 3>> filter;
    if (cli.cell) {
      std::vector<std::string> parts;
      std::stringstream ss(*cli.cell);
      for (std::string p; std::getline(ss, p, ',');) parts.push_back(p);
      auto idx = [&](const std::string& s) {
        for (int i = 0; i < 4; ++i) {
          if (s.size() == 1 && s[0] == kCodes[i]) return i;
        }
        throw ConfigError("--cell", "error codes must be one of C, E, G, L");
      };
      if (parts.size() != 3 || (parts[2] != "P0" && parts[2] != "P1")) {
        throw ConfigError("--cell", "expected f1,f2,P0|P1, e.g. C,G,P0");
      }
      filter = std::array<int, 3>{idx(parts[0]), idx(parts[1]), parts[2] == "P0" ? 0 : 1};
    }

    std::vector<CellJob> jobs;
    for (int panel = 0; panel < 2; ++panel) {
      for (int row = 0; row < 4; ++row) {
        for (int col = 0; col < 4; ++col) {
          if (filter && ((*filter)[0] != col || (*filter)[1] != row || (*filter)[2] != panel)) continue;
          if (row == 1 && col == 1) {
            for (double r : ratios) jobs.push_back({row, col, panel, r});
          } else {
            jobs.push_back({row, col, panel, 1.0});
          }
        }
      }
    }

    std::vector<json> cells(jobs.size());
    std::vector<std::string> codes(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) {
      const CellJob& cj = jobs[i];
      const ErrorDist f1 = dist_from_code(kCodes[cj.col], sigma, beta);
      const ErrorDist f2 = dist_from_code(kCodes[cj.row], sigma * cj.ratio, beta);
      const HierModel model = HierModel::simple(f1, f2, y);
      const Parametrisation par = cj.panel == 0 ? Parametrisation::centred() : Parametrisation::non_centred();
      json c{{"panel", cj.panel == 0 ? "P0" : "P1"},
             {"f1", std::string(1, kCodes[cj.col])},
             {"f2", std::string(1, kCodes[cj.row])},
             {"scale_ratio", cj.ratio},
             {"model", to_json(model)}};
      const std::uint64_t cell_seed = derive_seed(seed, static_cast<std::uint64_t>(cj.panel * 1000 + cj.row * 100 + cj.col * 10) +
                                                            static_cast<std::uint64_t>(cj.ratio * 16));
      c["seed"] = cell_seed;
      try {
        const StabilityReport rep = classify(par, model, diag, cell_seed);
        codes[i] = std::string(1, to_code(rep.classification));
        c["classification"] = codes[i];
        c["theory"] = std::string(1, to_code(theoretical_stability(model, par)));
        c["report"] = to_json(rep);
      } catch (const std::exception& e) {
        codes[i] = "error";
        c["classification"] = "error";
        c["error"] = e.what();
      }
      cells[i] = std::move(c);
    });

    std::string matrix[2][4][4];
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      std::string& s = matrix[jobs[i].panel][jobs[i].row][jobs[i].col];
      s += (s.empty() ? "" : "/") + codes[i];
    }
    json resolved{{"name", name},   {"sigma", sigma},         {"beta", beta},
                  {"y", y},         {"ee_ratios", ratios},    {"seed", seed},
                  {"diag", to_json(diag)}, {"slice", to_json(kopts.slice)}, {"output_dir", out.string()}};
    if (cli.cell) resolved["cell"] = *cli.cell;
    {
      std::ofstream os = open_out(out / (name + ".csv"));
      os << "# config: " << resolved.dump() << '\n';
      os << "# seed: " << seed << '\n';
      os << "# rows: hidden error Z2; columns: observation error Z1; (E,E) lists scale ratios " ;
      for (std::size_t i = 0; i < ratios.size(); ++i) os << (i ? "/" : "") << format_double(ratios[i]);
      os << " (sigma2/sigma1)\n";
      os << "panel,z2,C,E,G,L\n";
      for (int panel = 0; panel < 2; ++panel) {
        for (int row = 0; row < 4; ++row) {
          os << (panel == 0 ? "P0" : "P1") << ',' << kCodes[row];
          for (int col = 0; col < 4; ++col) {
            const std::string& s = matrix[panel][row][col];
            os << ',' << (s.empty() ? "-" : s);
          }
          os << '\n';
        }
      }
    }
    write_json(out / (name + "_evidence.json"), json{{"config", resolved}, {"seed", seed}, {"cells", cells}});
    log << "wrote " << (out / (name + ".csv")).string() << " and " << (out / (name + "_evidence.json")).string() << '\n';
    for (int panel = 0; panel < 2; ++panel) {
      log << (panel == 0 ? "P0" : "P1") << "   C    E    G    L\n";
      for (int row = 0; row < 4; ++row) {
        log << ' ' << kCodes[row] << "  ";
        for (int col = 0; col < 4; ++col) {
          const std::string& s = matrix[panel][row][col];
          std::string cell = s.empty() ? "-" : s;
          cell.resize(5, ' ');
          log << cell;
        }
        log << '\n';
      }
    }
    return static_cast<int>(kExitOk);
  });
}

// ---------------------------------------------------------------- oracle

namespace {

double req_number(const json& q, const char* key) {
  if (!q.contains(key)) throw ConfigError(key, "required for this query");
  if (!q.at(key).is_number()) throw ConfigError(key, "expected a number");
  return q.at(key).get<double>();
}

Frame frame_of(const json& q) {
  if (!q.contains("frame")) return Frame::Centred;
  if (q.at("frame") == "centred") return Frame::Centred;
  if (q.at("frame") == "noncentred") return Frame::NonCentred;
  throw ConfigError("frame", "expected \"centred\" or \"noncentred\"");
}

}  // namespace

json oracle_query(const json& q) {
  if (!q.is_object() || !q.contains("query") || !q.at("query").is_string()) {
    throw ConfigError("query", "expected an object with a string \"query\"");
  }
  const std::string name = q.at("query").get<std::string>();
  auto quad = [&] { return q.contains("quadrature") ? quad_from_json(q.at("quadrature")) : QuadConfig{}; };
  auto model = [&] {
    if (!q.contains("model")) throw ConfigError("model", "required for this query");
    return model_from_json(q.at("model"));
  };
  OracleValue v;
  try {
    if (name == "normalizing_constant") {
      check_keys(q, {"query", "model", "theta", "quadrature"}, "query");
      v = normalizing_constant(model(), req_number(q, "theta"), quad());
    } else if (name == "conditional_mean") {
      check_keys(q, {"query", "model", "theta", "quadrature"}, "query");
      v = conditional_mean(model(), req_number(q, "theta"), quad());
    } else if (name == "conditional_tail_prob") {
      check_keys(q, {"query", "model", "theta", "k", "frame", "quadrature"}, "query");
      v = conditional_tail_prob(model(), req_number(q, "theta"), req_number(q, "k"), frame_of(q), quad());
    } else if (name == "marginal_tail_prob") {
      check_keys(q, {"query", "model", "a", "quadrature"}, "query");
      v = marginal_tail_prob(model(), req_number(q, "a"), quad());
    } else if (name == "gaussian_rate") {
      check_keys(q, {"query", "sigma1", "sigma2", "rho"}, "query");
      v = {gaussian_rate(req_number(q, "sigma1"), req_number(q, "sigma2"), req_number(q, "rho")), 0.0};
    } else if (name == "cdf_distance") {
      check_keys(q, {"query", "model", "theta", "frame", "reference", "quadrature"}, "query");
      if (!q.contains("reference")) throw ConfigError("reference", "required for this query");
      Reference ref;
      const json& r = q.at("reference");
      if (r == "self") {
        ref = Reference::self();
      } else {
        check_keys(r, {"dist", "location"}, "reference");
        if (!r.contains("dist")) throw ConfigError("reference.dist", "required");
        ref = Reference::located(dist_from_json(r.at("dist"), "reference.dist"),
                                 r.contains("location") ? req_number(r, "location") : 0.0);
      }
      v = cdf_distance(model(), req_number(q, "theta"), frame_of(q), ref, quad());
    } else {
      throw ConfigError("query", "unknown oracle query '" + name +
                                     "' (expected normalizing_constant, conditional_mean, conditional_tail_prob, "
                                     "marginal_tail_prob, gaussian_rate or cdf_distance)");
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError("query", e.what());
  }
  json inputs = q;
  inputs.erase("query");
  return {{"query", name}, {"inputs", inputs}, {"value", v.value}, {"est_error", v.est_error}};
}

int cmd_oracle(const json& query, const CliOverrides& cli, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const json r = oracle_query(query);
    out << r.dump(2) << '\n';
    if (cli.out_dir) write_json(fs::path(*cli.out_dir) / ("oracle_" + r.at("query").get<std::string>() + ".json"), r);
    return static_cast<int>(kExitOk);
  });
}

// ---------------------------------------------------------------- diagnose

int cmd_diagnose(const json& config, const CliOverrides& cli, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    check_keys(config,
               {"name", "model", "kernel", "diag", "seed", "slice", "q_rate", "limit_law", "properties", "quadrature",
                "output_dir"},
               "config");
    if (!config.contains("model") || !config.contains("kernel")) throw ConfigError("config", "model and kernel are required");
    if (is_lgp_model(config.at("model"))) throw ConfigError("model", "diagnose supports the hierarchical model only");
    const HierModel model = model_from_json(config.at("model"));
    const Parametrisation kernel = kernel_from_json(config.at("kernel"));
    DiagConfig diag = config.contains("diag") ? diag_from_json(config.at("diag")) : DiagConfig{};
    diag.kernel = kernel_options(config);
    std::uint64_t seed = config.contains("seed") ? seed_of(config.at("seed"), "seed") : 1;
    if (cli.seed) seed = *cli.seed;
    const QuadConfig qcfg = config.contains("quadrature") ? quad_from_json(config.at("quadrature")) : QuadConfig{};
    std::optional<LimitCdf> limit;
    json limit_json;
    if (config.contains("limit_law")) {
      const json& l = config.at("limit_law");
      check_keys(l, {"dist", "location"}, "limit_law");
      if (!l.contains("dist")) throw ConfigError("limit_law.dist", "required");
      const ErrorDist d = dist_from_json(l.at("dist"), "limit_law.dist");
      const double loc = l.contains("location") ? req_number(l, "location") : 0.0;
      limit = [d, loc](double x) { return d.cdf(x - loc); };
      limit_json = {{"dist", to_json(d)}, {"location", loc}};
    }
    bool props = model.is_simple();
    if (config.contains("properties")) {
      if (!config.at("properties").is_boolean()) throw ConfigError("properties", "expected a boolean");
      props = config.at("properties").get<bool>();
      if (props && !model.is_simple()) throw ConfigError("properties", "needs a single-observation model");
    }
    const std::string name = name_of(config, "diagnose");
    const fs::path out = resolve_out(config, cli);

    const StabilityReport rep = classify(kernel, model, diag, seed, limit);
    json resolved{{"name", name},
                  {"model", to_json(model)},
                  {"kernel", to_json(kernel)},
                  {"diag", to_json(diag)},
                  {"seed", seed},
                  {"quadrature", to_json(qcfg)},
                  {"properties", props},
                  {"output_dir", out.string()}};
    const json ko = kernel_options_json(diag.kernel);
    resolved["slice"] = ko["slice"];
    resolved["q_rate"] = ko["q_rate"];
    if (limit) resolved["limit_law"] = limit_json;
    json doc{{"config", resolved}, {"seed", seed}, {"report", to_json(rep)}};
    if (props) doc["properties"] = to_json(property_check(model, diag, qcfg));
    write_json(out / (name + "_report.json"), doc);
    log << rep.kernel_id << " on " << rep.model_id << ": " << to_code(rep.classification) << "\n  " << rep.evidence
        << "\nwrote " << (out / (name + "_report.json")).string() << '\n';
    return static_cast<int>(kExitOk);
  });
}

}  // namespace gstab
