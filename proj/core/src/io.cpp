#include "retsolve/io.hpp"

#include <charconv>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace retsolve {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void config_error(const std::string& field,
                               const std::string& what) {
  throw ValidationError(ValidationError::Code::BadValue, field, what);
}

double as_number(const nlohmann::json& j, const std::string& field) {
  if (!j.is_number()) config_error(field, field + " must be a number");
  return j.get<double>();
}

long as_integer(const nlohmann::json& j, const std::string& field) {
  if (!j.is_number_integer()) {
    config_error(field, field + " must be an integer");
  }
  return j.get<long>();
}

bool as_bool(const nlohmann::json& j, const std::string& field) {
  if (!j.is_boolean()) config_error(field, field + " must be a boolean");
  return j.get<bool>();
}

SweepSpec parse_sweep_axis(const nlohmann::json& j) {
  if (!j.is_object()) config_error("sweep", "sweep axis must be an object");
  SweepSpec spec;
  if (!j.contains("param") || !j.at("param").is_string()) {
    config_error("sweep.param", "sweep.param must be a string");
  }
  spec.param = j.at("param").get<std::string>();
  for (const char* key : {"from", "to", "step"}) {
    if (!j.contains(key)) {
      config_error(std::string("sweep.") + key,
                   std::string("sweep.") + key + " is required");
    }
  }
  spec.from = as_number(j.at("from"), "sweep.from");
  spec.to = as_number(j.at("to"), "sweep.to");
  spec.step = as_number(j.at("step"), "sweep.step");
  return spec;
}

ordered_json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round_sig(x);
}

ordered_json num(const std::optional<double>& x) {
  if (!x) return nullptr;
  return num(*x);
}

}  // namespace

SolverConfig parse_config(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    config_error("config", std::string("config is not valid JSON: ") +
                               e.what());
  }
  if (!doc.is_object()) config_error("config", "config must be an object");

  SolverConfig cfg;
  cfg.config_hash = fnv1a64(text);

  const auto read_param = [&](const char* key,
                              std::optional<double>& slot) {
    if (doc.contains(key)) slot = as_number(doc.at(key), key);
  };
  read_param("r", cfg.params.r);
  read_param("mu", cfg.params.mu);
  read_param("sigma", cfg.params.sigma);
  read_param("rho", cfg.params.rho);
  read_param("gamma", cfg.params.gamma);
  read_param("delta", cfg.params.delta);
  read_param("y1", cfg.params.y1);
  read_param("y2", cfg.params.y2);
  if (doc.contains("regime_tol")) {
    cfg.params.regime_tol = as_number(doc.at("regime_tol"), "regime_tol");
  }
  if (doc.contains("tie_delta_to_k")) {
    cfg.params.tie_delta_to_k =
        as_bool(doc.at("tie_delta_to_k"), "tie_delta_to_k");
  }
  if (doc.contains("support")) {
    const auto& sup = doc.at("support");
    if (!sup.is_object()) {
      config_error("support", "support must be an object with I or L");
    }
    if (sup.contains("I")) {
      cfg.params.support_i = as_number(sup.at("I"), "support.I");
    }
    if (sup.contains("L")) {
      cfg.params.support_l = as_number(sup.at("L"), "support.L");
    }
  }

  if (doc.contains("grid")) {
    const auto& grid = doc.at("grid");
    if (!grid.is_object()) config_error("grid", "grid must be an object");
    cfg.has_grid = true;
    if (grid.contains("z_min")) {
      cfg.grid.z_min = as_number(grid.at("z_min"), "grid.z_min");
    }
    if (grid.contains("z_max")) {
      cfg.grid.z_max = as_number(grid.at("z_max"), "grid.z_max");
    }
    if (grid.contains("n")) {
      cfg.grid.n = static_cast<int>(as_integer(grid.at("n"), "grid.n"));
    }
  }

  if (doc.contains("sim")) {
    const auto& sim = doc.at("sim");
    if (!sim.is_object()) config_error("sim", "sim must be an object");
    cfg.has_sim = true;
    if (sim.contains("n_paths")) {
      cfg.sim.n_paths = as_integer(sim.at("n_paths"), "sim.n_paths");
    }
    if (sim.contains("csv_paths")) {
      cfg.sim.csv_paths = as_integer(sim.at("csv_paths"), "sim.csv_paths");
    }
    if (sim.contains("horizon_years")) {
      cfg.sim.horizon_years =
          as_number(sim.at("horizon_years"), "sim.horizon_years");
    }
    if (sim.contains("dt")) cfg.sim.dt = as_number(sim.at("dt"), "sim.dt");
    if (sim.contains("seed")) {
      cfg.sim.master_seed = static_cast<std::uint64_t>(
          as_integer(sim.at("seed"), "sim.seed"));
    }
    if (sim.contains("z0")) cfg.sim.z0 = as_number(sim.at("z0"), "sim.z0");
    if (sim.contains("w0")) cfg.sim.w0 = as_number(sim.at("w0"), "sim.w0");
    if (sim.contains("overlay_disaster")) {
      cfg.sim.overlay_disaster =
          as_bool(sim.at("overlay_disaster"), "sim.overlay_disaster");
    }
    if (sim.contains("phase")) {
      const auto& ph = sim.at("phase");
      if (!ph.is_string()) config_error("sim.phase", "sim.phase must be a string");
      const std::string s = ph.get<std::string>();
      if (s == "pre") {
        cfg.sim.phase = Phase::PreRetirement;
      } else if (s == "post") {
        cfg.sim.phase = Phase::PostRetirement;
      } else {
        config_error("sim.phase", "sim.phase must be \"pre\" or \"post\"");
      }
    }
  }

  if (doc.contains("sweep")) {
    const auto& sweep = doc.at("sweep");
    if (sweep.is_object()) {
      cfg.sweep.push_back(parse_sweep_axis(sweep));
    } else if (sweep.is_array()) {
      if (sweep.empty() || sweep.size() > 2) {
        config_error("sweep", "sweep takes one or two axes");
      }
      for (const auto& axis : sweep) {
        cfg.sweep.push_back(parse_sweep_axis(axis));
      }
    } else {
      config_error("sweep", "sweep must be an object or an array");
    }
  }

  return cfg;
}

SolverConfig load_config(const std::string& path) {
  return parse_config(read_file(path));
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char ch : text) {
    hash ^= static_cast<unsigned char>(ch);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string format_sig(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x,
                                 std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

double round_sig(double x) {
  if (!std::isfinite(x)) return x;
  const std::string s = format_sig(x);
  double out = x;
  std::from_chars(s.data(), s.data() + s.size(), out);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError(ValidationError::Code::BadValue, "config",
                          "cannot read " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("short write to " + path);
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string policy_csv(const std::vector<PolicyPoint>& rows) {
  std::string out = "z,wealth,consumption,portfolio,phase,is_threshold\n";
  for (const auto& row : rows) {
    out += format_sig(row.z);
    out += ',';
    out += format_sig(row.wealth);
    out += ',';
    out += format_sig(row.consumption);
    out += ',';
    out += format_sig(row.portfolio);
    out += ',';
    out += to_string(row.phase);
    out += ',';
    out += row.is_threshold ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string paths_csv(const std::vector<PathRecord>& paths) {
  std::string out = "path_id,t,z,wealth,consumption,portfolio,status\n";
  for (const auto& path : paths) {
    for (size_t i = 0; i < path.t.size(); ++i) {
      out += std::to_string(path.path_id);
      out += ',';
      out += format_sig(path.t[i]);
      out += ',';
      out += format_sig(path.z[i]);
      out += ',';
      out += format_sig(path.wealth[i]);
      out += ',';
      out += format_sig(path.consumption[i]);
      out += ',';
      out += format_sig(path.portfolio[i]);
      out += ',';
      out += to_string(path.status[i]);
      out += '\n';
    }
  }
  return out;
}

std::string sweep_csv(const std::vector<std::string>& names,
                      const std::vector<SweepRow>& rows) {
  std::string out;
  for (const auto& name : names) {
    out += name;
    out += ',';
  }
  out += "regime,j,z_bar,w_bar,error\n";
  for (const auto& row : rows) {
    for (const double v : row.values) {
      out += format_sig(v);
      out += ',';
    }
    out += row.regime;
    out += ',';
    out += row.j ? format_sig(*row.j) : "";
    out += ',';
    out += row.z_bar ? format_sig(*row.z_bar) : "";
    out += ',';
    out += row.w_bar ? format_sig(*row.w_bar) : "";
    out += ',';
    out += row.error;
    out += '\n';
  }
  return out;
}

std::string manifest_json(const SolvedModel& m, const SolverConfig& cfg,
                          const std::string& created_utc) {
  const ModelParams& p = m.params;
  char hash[24];
  std::snprintf(hash, sizeof(hash), "0x%016llx",
                static_cast<unsigned long long>(cfg.config_hash));

  ordered_json doc;
  doc["tool"] = kToolName;
  doc["version"] = kToolVersion;
  doc["created_utc"] = created_utc;
  doc["config_hash"] = hash;

  ordered_json params;
  params["r"] = num(p.r);
  params["mu"] = num(p.mu);
  params["sigma"] = num(p.sigma);
  params["rho"] = num(p.rho);
  params["gamma"] = num(p.gamma);
  params["delta"] = num(p.delta);
  params["y1"] = num(p.y1);
  params["y2"] = num(p.y2);
  params["support_l"] = num(p.support_l);
  params["support_i"] = num(p.support_i);
  params["theta"] = num(p.theta);
  params["merton_k"] = num(p.merton_k);
  params["merton_k_effective"] = num(p.merton_k_effective());
  params["regime_tol"] = num(p.regime_tol);
  params["delta_equals_k"] = p.delta_tied;
  doc["params"] = params;

  ordered_json roots;
  roots["m_plus"] = num(m.roots.m_plus);
  roots["m_minus"] = num(m.roots.m_minus);
  doc["roots"] = roots;

  doc["regime"] = to_string(m.boundary.regime);

  ordered_json threshold;
  threshold["j"] = num(m.boundary.j);
  threshold["z_bar"] = num(m.boundary.z_bar);
  threshold["w_bar"] = num(m.boundary.w_bar);
  threshold["residual"] = num(m.boundary.residual);
  if (m.boundary.z_bar) {
    threshold["z_bar_below_kink"] = *m.boundary.z_bar < p.kink();
  } else {
    threshold["z_bar_below_kink"] = nullptr;
  }
  doc["threshold"] = threshold;

  return doc.dump(2) + "\n";
}

std::string summary_json(const BudgetReport& rep,
                         const std::vector<MartingaleCheck>& martingale,
                         std::uint64_t seed) {
  ordered_json doc;
  doc["phase"] = rep.phase;
  doc["estimate"] = num(rep.estimate);
  doc["std_error"] = num(rep.std_error);
  doc["target"] = num(rep.target);
  doc["tail_bound"] = num(rep.tail_bound);
  doc["pass"] = rep.pass;
  doc["n_paths"] = rep.n_paths;
  doc["horizon"] = num(rep.horizon);
  doc["dt"] = num(rep.dt);
  doc["z0"] = num(rep.z0);
  doc["seed"] = seed;
  doc["transversality_term"] = rep.transversality_term;
  doc["paths_stopped"] = rep.paths_stopped;

  ordered_json marts = ordered_json::array();
  for (const auto& chk : martingale) {
    ordered_json one;
    one["t"] = num(chk.t);
    one["estimate"] = num(chk.estimate);
    one["std_error"] = num(chk.std_error);
    one["target"] = num(chk.target);
    one["pass"] = chk.pass;
    marts.push_back(one);
  }
  doc["martingale"] = marts;
  return doc.dump(2) + "\n";
}

std::string verify_json(const std::vector<CheckResult>& checks) {
  ordered_json doc;
  doc["all_passed"] = all_passed(checks);
  ordered_json arr = ordered_json::array();
  for (const auto& chk : checks) {
    ordered_json one;
    one["name"] = chk.name;
    one["status"] = chk.status;
    one["error"] = num(chk.error);
    one["tolerance"] = num(chk.tolerance);
    one["detail"] = chk.detail;
    arr.push_back(one);
  }
  doc["checks"] = arr;
  return doc.dump(2) + "\n";
}

}  // namespace retsolve
