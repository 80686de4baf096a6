#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "tunnel/csv.hpp"
#include "tunnel/harness.hpp"

using namespace tunnel;
using nlohmann::json;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string output;
  std::vector<std::string> sets;
  std::optional<std::string> method;
  std::optional<double> t_end, dt, eigen_dt, record_every;
  std::optional<double> frequency, temperature, phonon_frequency, rearrangement_energy;
  std::optional<long> n_points, n_basis;
  std::optional<double> length_scale;
  std::optional<std::string> initial;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config_path, "JSON config file");
    app->add_option("-o,--output", output, "output path (default: stdout)");
    app->add_option("--set", sets, "override a config field, e.g. --set pointer.harshness=1e-3");
    app->add_option("--method", method, "closed | pointer | lindblad");
    app->add_option("--t-end", t_end, "ps");
    app->add_option("--dt", dt, "pointer step, ps");
    app->add_option("--eigen-dt", eigen_dt, "eigenbasis step, ps");
    app->add_option("--record-every", record_every, "ps");
    app->add_option("--frequency", frequency, "measurement frequency, 1/ps");
    app->add_option("--temperature", temperature, "bath temperature, K");
    app->add_option("--phonon-frequency", phonon_frequency, "rad/ps");
    app->add_option("--rearrangement-energy", rearrangement_energy, "cm^-1");
    app->add_option("--n-points", n_points, "grid points");
    app->add_option("--n-basis", n_basis, "eigenstates kept");
    app->add_option("--length-scale", length_scale, "Angstrom per unit zeta");
    app->add_option("--initial", initial, "gaussian | eigenstate");
  }

  json patch() const {
    json j = json::object();
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) throw ValidationError("--set", "expected key=value: " + s);
      json* node = &j;
      std::stringstream path(s.substr(0, eq));
      std::string part;
      std::vector<std::string> parts;
      while (std::getline(path, part, '.')) parts.push_back(part);
      for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
      const std::string value = s.substr(eq + 1);
      json parsed = json::parse(value, nullptr, false);
      (*node)[parts.back()] = parsed.is_discarded() ? json(value) : parsed;
    }
    if (method) j["method"] = *method;
    if (t_end) j["integration"]["t_end_ps"] = *t_end;
    if (dt) j["integration"]["dt_ps"] = *dt;
    if (eigen_dt) j["integration"]["eigen_dt_ps"] = *eigen_dt;
    if (record_every) j["integration"]["record_every_ps"] = *record_every;
    if (frequency) j["pointer"]["frequency_per_ps"] = *frequency;
    if (temperature) j["lindblad"]["temperature_k"] = *temperature;
    if (phonon_frequency) j["lindblad"]["phonon_frequency_rad_per_ps"] = *phonon_frequency;
    if (rearrangement_energy) j["lindblad"]["rearrangement_energy_cm1"] = *rearrangement_energy;
    if (n_points) j["grid"]["n_points"] = *n_points;
    if (n_basis) j["lindblad"]["n_basis"] = *n_basis;
    if (length_scale) j["mass"]["length_scale_angstrom"] = *length_scale;
    if (initial) j["initial"]["kind"] = *initial;
    return j;
  }

  RunConfig resolve() const {
    RunConfig cfg = config_path.empty() ? default_config() : load_config(config_path);
    merge_json(cfg, patch());
    if (!output.empty()) cfg.output = output;
    validate(cfg);
    return cfg;
  }
};

template <typename F>
void with_output(const std::string& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
    std::cout.flush();
    if (!std::cout) throw IoError("failed writing to stdout");
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  write(os);
  os.close();
  if (!os) throw IoError("failed writing " + path);
}

std::vector<double> parse_list(const std::string& s, const char* field) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError(field, "not a number: '" + item + "'");
    }
  }
  return out;
}

int report(ExitCode code, const std::string& what) {
  std::cerr << "tunnelsim: " << what << '\n';
  return static_cast<int>(code);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proton tunnelling in an asymmetric double well: pointer measurements and "
               "Lindblad bath."};
  app.set_version_flag("--version", "tunnelsim " + version_string());
  app.require_subcommand(1);

  CommonFlags flags;

  auto* eigens = app.add_subcommand("eigens", "eigenstates on the grid as CSV");
  flags.attach(eigens);
  std::string rates_path;
  eigens->add_option("--rates", rates_path, "also write the rate matrix W to this path");

  auto* run_cmd = app.add_subcommand("run", "one trajectory as CSV");
  flags.attach(run_cmd);

  auto* sweep_cmd = app.add_subcommand("sweep", "P_shallow at snapshot times over a parameter axis");
  flags.attach(sweep_cmd);
  std::string axis = "temperature", values = "115,155,200", snapshots = "10";
  std::optional<unsigned> workers;
  sweep_cmd->add_option("--axis", axis, "temperature | frequency");
  sweep_cmd->add_option("--values", values, "comma separated axis values");
  sweep_cmd->add_option("--snapshots", snapshots, "comma separated times, ps");
  sweep_cmd->add_option("--workers", workers, "threads (capped by TUNNEL_WORKERS)");

  auto* compare_cmd = app.add_subcommand("compare", "pointer and lindblad runs joined on t");
  flags.attach(compare_cmd);

  auto* calibrate_cmd = app.add_subcommand("calibrate", "fit length scale and bath parameters");
  flags.attach(calibrate_cmd);
  std::string what = "all";
  double band_lo = CalibrationBand{}.lo, band_hi = CalibrationBand{}.hi;
  calibrate_cmd->add_option("--what", what, "length | bath | all");
  calibrate_cmd->add_option("--band-lo", band_lo, "lower edge of the P(10 ps, 200 K) band");
  calibrate_cmd->add_option("--band-hi", band_hi, "upper edge of the P(10 ps, 200 K) band");
  std::string rearrangement_list;
  calibrate_cmd->add_option("--rearrangement-values", rearrangement_list,
                            "comma separated dV_R candidates (default: log grid)");

  auto* selftest_cmd = app.add_subcommand("selftest", "invariant checks at reduced size");
  std::string fault = "none";
  selftest_cmd->add_option("--inject-fault", fault, "none | negate-rate | coarse-step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::kValidation);
  }

  try {
    if (eigens->parsed()) {
      const RunConfig cfg = flags.resolve();
      const Model m = Model::build(cfg);
      with_output(cfg.output, [&](std::ostream& os) {
        for (const auto& line : provenance(cfg)) os << "# " << line << '\n';
        write_eigen_csv(os, m.grid, m.hamiltonian.potential, m.basis);
      });
      if (!rates_path.empty()) {
        const RateMatrix w = rate_matrix(m.basis, m.grid, cfg.lindblad.bath);
        with_output(rates_path, [&](std::ostream& os) {
          for (const auto& line : provenance(cfg)) os << "# " << line << '\n';
          write_rate_csv(os, w);
        });
      }
    } else if (run_cmd->parsed()) {
      const RunConfig cfg = flags.resolve();
      with_output(cfg.output, [&](std::ostream& os) { run(cfg, os); });
    } else if (sweep_cmd->parsed()) {
      const RunConfig cfg = flags.resolve();
      SweepSpec spec;
      spec.axis = parse_axis(axis);
      spec.values = parse_list(values, "sweep.values");
      spec.snapshots = parse_list(snapshots, "sweep.snapshots");
      unsigned n = default_workers();
      if (workers) n = std::max(1u, std::min(*workers, n));
      const auto rows = sweep(spec, cfg, n);
      with_output(cfg.output, [&](std::ostream& os) { write_sweep_csv(os, rows, spec, cfg); });
    } else if (compare_cmd->parsed()) {
      const RunConfig cfg = flags.resolve();
      const Comparison c = compare(cfg);
      with_output(cfg.output, [&](std::ostream& os) { write_comparison_csv(os, c, cfg); });
    } else if (calibrate_cmd->parsed()) {
      if (what != "length" && what != "bath" && what != "all") {
        throw ValidationError("--what", "expected length, bath or all");
      }
      RunConfig cfg = flags.resolve();
      json frag = json::object();
      json resid = json::object();
      if (what != "bath") {
        const LengthCalibration l = calibrate_length(cfg);
        resid["length"] = {{"feasible", l.feasible},
                           {"band_angstrom", {l.band_lo, l.band_hi}},
                           {"sub_barrier_states", l.sub_barrier_states},
                           {"fourth_gap_fraction", l.fourth_gap_fraction}};
        if (l.feasible) {
          frag["mass"]["length_scale_angstrom"] = l.length_angstrom;
          cfg.mass.length_m = l.length_angstrom * units::kAngstrom;
        }
      }
      if (what != "length") {
        BathSearch search;
        search.band = {band_lo, band_hi};
        if (!rearrangement_list.empty()) {
          search.rearrangement_energies = parse_list(rearrangement_list, "calibrate.rearrangement_values");
        }
        const BathCalibration b = calibrate_bath(cfg, search);
        resid["bath"] = {{"feasible", b.feasible},
                         {"band", {b.band.lo, b.band.hi}},
                         {"p_shallow_10ps", b.p_shallow_10ps},
                         {"band_residual", b.band_residual},
                         {"plateau_slope_per_ps", b.plateau_slope}};
        if (b.feasible) {
          frag["lindblad"]["phonon_frequency_rad_per_ps"] = b.phonon_frequency;
          frag["lindblad"]["rearrangement_energy_cm1"] = b.rearrangement_energy;
        }
      }
      json out = {{"version", version_string()}, {"config", frag}, {"calibration", resid}};
      with_output(cfg.output, [&](std::ostream& os) { os << out.dump(2) << '\n'; });
      const bool ok = (!resid.contains("length") || resid["length"]["feasible"].get<bool>()) &&
                      (!resid.contains("bath") || resid["bath"]["feasible"].get<bool>());
      if (!ok) return report(ExitCode::kNumerical, "calibration infeasible");
    } else if (selftest_cmd->parsed()) {
      Fault f = Fault::kNone;
      if (fault == "negate-rate") {
        f = Fault::kNegateRate;
      } else if (fault == "coarse-step") {
        f = Fault::kCoarsePointerStep;
      } else if (fault != "none") {
        throw ValidationError("--inject-fault", "expected none, negate-rate or coarse-step");
      }
      bool all = true;
      for (const auto& r : selftest(f)) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
        all = all && r.passed;
      }
      if (!all) return report(ExitCode::kNumerical, "selftest failed");
    }
  } catch (const ValidationError& e) {
    return report(ExitCode::kValidation, e.what());
  } catch (const NumericalError& e) {
    return report(ExitCode::kNumerical, e.what());
  } catch (const IoError& e) {
    return report(ExitCode::kIo, e.what());
  } catch (const std::exception& e) {
    return report(ExitCode::kNumerical, e.what());
  }
  return 0;
}
