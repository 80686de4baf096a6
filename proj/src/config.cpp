#include "tunnel/config.hpp"

#include <fstream>
#include <set>

namespace tunnel {

using nlohmann::json;

RunConfig default_config() {
  RunConfig cfg;
  // Calibrated values; see `tunnelsim calibrate` and config/default.json.
  cfg.mass.length_m = 0.9525 * units::kAngstrom;
  cfg.lindblad.bath = {200.0, 80.0, 10.0};
  return cfg;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::kClosed: return "closed";
    case Method::kPointer: return "pointer";
    case Method::kLindblad: return "lindblad";
  }
  return "?";
}

std::string to_string(SweepAxis a) {
  return a == SweepAxis::kTemperature ? "temperature" : "frequency";
}

Method parse_method(const std::string& s) {
  if (s == "closed") return Method::kClosed;
  if (s == "pointer") return Method::kPointer;
  if (s == "lindblad") return Method::kLindblad;
  throw ValidationError("method", "expected closed, pointer or lindblad, got '" + s + "'");
}

SweepAxis parse_axis(const std::string& s) {
  if (s == "temperature") return SweepAxis::kTemperature;
  if (s == "frequency") return SweepAxis::kFrequency;
  throw ValidationError("sweep.axis", "expected temperature or frequency, got '" + s + "'");
}

namespace {

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ValidationError(where.empty() ? "config" : where, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) {
      throw ValidationError(where.empty() ? k : where + "." + k, "unknown field");
    }
  }
}

template <typename T>
void read(const json& j, const char* key, const std::string& where, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(where + "." + key, "has the wrong type");
  }
}

}  // namespace

void merge_json(RunConfig& cfg, const json& j) {
  check_keys(j, "", {"potential", "grid", "mass", "initial", "method", "closed", "pointer",
                     "lindblad", "integration", "output"});
  if (j.contains("potential")) {
    const json& p = j["potential"];
    check_keys(p, "potential", {"barrier_cm1", "asymmetry_cm1"});
    read(p, "barrier_cm1", "potential", cfg.potential.barrier);
    read(p, "asymmetry_cm1", "potential", cfg.potential.asymmetry);
  }
  if (j.contains("grid")) {
    const json& g = j["grid"];
    check_keys(g, "grid", {"n_points", "zeta_min", "zeta_max"});
    read(g, "n_points", "grid", cfg.grid.n_points);
    read(g, "zeta_min", "grid", cfg.grid.zeta_min);
    read(g, "zeta_max", "grid", cfg.grid.zeta_max);
  }
  if (j.contains("mass")) {
    const json& m = j["mass"];
    check_keys(m, "mass", {"mass_kg", "length_scale_angstrom"});
    read(m, "mass_kg", "mass", cfg.mass.mass_kg);
    if (m.contains("length_scale_angstrom")) {
      Real a = 0.0;
      read(m, "length_scale_angstrom", "mass", a);
      cfg.mass.length_m = a * units::kAngstrom;
    }
  }
  if (j.contains("initial")) {
    const json& i = j["initial"];
    check_keys(i, "initial", {"kind", "centre", "width", "index"});
    if (i.contains("kind")) {
      std::string kind;
      read(i, "kind", "initial", kind);
      if (kind == "gaussian") {
        cfg.initial.kind = InitialKind::kGaussian;
      } else if (kind == "eigenstate") {
        cfg.initial.kind = InitialKind::kEigenstate;
      } else {
        throw ValidationError("initial.kind", "expected gaussian or eigenstate");
      }
    }
    read(i, "centre", "initial", cfg.initial.centre);
    read(i, "width", "initial", cfg.initial.width);
    read(i, "index", "initial", cfg.initial.index);
  }
  if (j.contains("method")) {
    std::string m;
    read(j, "method", "config", m);
    cfg.method = parse_method(m);
  }
  if (j.contains("closed")) {
    const json& c = j["closed"];
    check_keys(c, "closed", {"basis"});
    std::string b = "grid";
    read(c, "basis", "closed", b);
    if (b == "grid") {
      cfg.closed_basis = ClosedBasis::kGrid;
    } else if (b == "eigen") {
      cfg.closed_basis = ClosedBasis::kEigen;
    } else {
      throw ValidationError("closed.basis", "expected grid or eigen");
    }
  }
  if (j.contains("pointer")) {
    const json& p = j["pointer"];
    check_keys(p, "pointer", {"frequency_per_ps", "harshness", "block_size", "global_decay"});
    read(p, "frequency_per_ps", "pointer", cfg.pointer.frequency);
    read(p, "harshness", "pointer", cfg.pointer.harshness);
    read(p, "block_size", "pointer", cfg.pointer.block_size);
    read(p, "global_decay", "pointer", cfg.pointer.global);
  }
  if (j.contains("lindblad")) {
    const json& l = j["lindblad"];
    check_keys(l, "lindblad", {"temperature_k", "phonon_frequency_rad_per_ps",
                               "rearrangement_energy_cm1", "n_basis"});
    read(l, "temperature_k", "lindblad", cfg.lindblad.bath.temperature);
    read(l, "phonon_frequency_rad_per_ps", "lindblad", cfg.lindblad.bath.phonon_frequency);
    read(l, "rearrangement_energy_cm1", "lindblad", cfg.lindblad.bath.rearrangement_energy);
    read(l, "n_basis", "lindblad", cfg.lindblad.n_basis);
  }
  if (j.contains("integration")) {
    const json& i = j["integration"];
    check_keys(i, "integration", {"dt_ps", "eigen_dt_ps", "t_end_ps", "record_every_ps",
                                  "min_eigenvalue_every"});
    read(i, "dt_ps", "integration", cfg.integration.dt);
    read(i, "eigen_dt_ps", "integration", cfg.integration.eigen_dt);
    read(i, "t_end_ps", "integration", cfg.integration.t_end);
    read(i, "record_every_ps", "integration", cfg.integration.record_every);
    read(i, "min_eigenvalue_every", "integration", cfg.integration.min_eigenvalue_every);
  }
  read(j, "output", "config", cfg.output);
}

json to_json(const RunConfig& cfg) {
  json j;
  j["potential"] = {{"barrier_cm1", cfg.potential.barrier},
                    {"asymmetry_cm1", cfg.potential.asymmetry}};
  j["grid"] = {{"n_points", cfg.grid.n_points},
               {"zeta_min", cfg.grid.zeta_min},
               {"zeta_max", cfg.grid.zeta_max}};
  j["mass"] = {{"mass_kg", cfg.mass.mass_kg},
               {"length_scale_angstrom", cfg.mass.length_m / units::kAngstrom}};
  j["initial"] = {{"kind", cfg.initial.kind == InitialKind::kGaussian ? "gaussian" : "eigenstate"},
                  {"centre", cfg.initial.centre},
                  {"width", cfg.initial.width},
                  {"index", cfg.initial.index}};
  j["method"] = to_string(cfg.method);
  j["closed"] = {{"basis", cfg.closed_basis == ClosedBasis::kGrid ? "grid" : "eigen"}};
  j["pointer"] = {{"frequency_per_ps", cfg.pointer.frequency},
                  {"harshness", cfg.pointer.harshness},
                  {"block_size", cfg.pointer.block_size},
                  {"global_decay", cfg.pointer.global}};
  j["lindblad"] = {{"temperature_k", cfg.lindblad.bath.temperature},
                   {"phonon_frequency_rad_per_ps", cfg.lindblad.bath.phonon_frequency},
                   {"rearrangement_energy_cm1", cfg.lindblad.bath.rearrangement_energy},
                   {"n_basis", cfg.lindblad.n_basis}};
  j["integration"] = {{"dt_ps", cfg.integration.dt},
                      {"eigen_dt_ps", cfg.integration.eigen_dt},
                      {"t_end_ps", cfg.integration.t_end},
                      {"record_every_ps", cfg.integration.record_every},
                      {"min_eigenvalue_every", cfg.integration.min_eigenvalue_every}};
  j["output"] = cfg.output;
  return j;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("config", std::string("malformed JSON: ") + e.what());
  }
  RunConfig cfg = default_config();
  merge_json(cfg, j);
  return cfg;
}

void validate(const RunConfig& cfg) {
  cfg.potential.validate();
  if (cfg.grid.n_points < 3) throw ValidationError("grid.n_points", "must be at least 3");
  if (!(cfg.grid.zeta_max > cfg.grid.zeta_min)) {
    throw ValidationError("grid.zeta_max", "must exceed zeta_min");
  }
  cfg.mass.validate();
  if (cfg.initial.kind == InitialKind::kGaussian && !(cfg.initial.width > 0.0)) {
    throw ValidationError("initial.width", "must be positive");
  }
  if (cfg.initial.index < 0) throw ValidationError("initial.index", "must be >= 0");
  if (!(cfg.pointer.frequency >= 0.0)) {
    throw ValidationError("pointer.frequency_per_ps", "must be >= 0");
  }
  if (!(cfg.pointer.harshness >= 0.0)) throw ValidationError("pointer.harshness", "must be >= 0");
  const Eigen::Index block = cfg.pointer.resolved_block(cfg.grid.n_points);
  if (block < 1 || cfg.grid.n_points % block != 0) {
    throw ValidationError("pointer.block_size", "must divide grid.n_points");
  }
  cfg.lindblad.bath.validate();
  if (cfg.lindblad.n_basis < 2 || cfg.lindblad.n_basis > cfg.grid.n_points) {
    throw ValidationError("lindblad.n_basis", "must be in [2, grid.n_points]");
  }
  if (cfg.initial.kind == InitialKind::kEigenstate && cfg.initial.index >= cfg.lindblad.n_basis) {
    throw ValidationError("initial.index", "must be below lindblad.n_basis");
  }
  const auto& in = cfg.integration;
  if (!(in.dt > 0.0)) throw ValidationError("integration.dt_ps", "must be positive");
  if (!(in.eigen_dt > 0.0)) throw ValidationError("integration.eigen_dt_ps", "must be positive");
  if (!(in.t_end > 0.0)) throw ValidationError("integration.t_end_ps", "must be positive");
  if (!(in.record_every > 0.0)) {
    throw ValidationError("integration.record_every_ps", "must be positive");
  }
  if (in.min_eigenvalue_every < 0) {
    throw ValidationError("integration.min_eigenvalue_every", "must be >= 0");
  }
}

IntegrationOptions grid_options(const RunConfig& cfg) {
  return {cfg.integration.t_end, cfg.integration.dt, cfg.integration.record_every,
          cfg.integration.min_eigenvalue_every};
}

IntegrationOptions eigen_options(const RunConfig& cfg) {
  return {cfg.integration.t_end, cfg.integration.eigen_dt, cfg.integration.record_every,
          cfg.integration.min_eigenvalue_every};
}

void SweepSpec::validate() const {
  if (values.empty()) throw ValidationError("sweep.values", "must not be empty");
  for (Real v : values) {
    if (!(v > 0.0)) throw ValidationError("sweep.values", "must all be positive");
  }
  if (snapshots.empty()) throw ValidationError("sweep.snapshots", "must not be empty");
  for (Real s : snapshots) {
    if (!(s > 0.0)) throw ValidationError("sweep.snapshots", "must all be positive");
  }
}

}  // namespace tunnel
