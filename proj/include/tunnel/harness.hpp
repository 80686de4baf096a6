#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "tunnel/config.hpp"
#include "tunnel/lindblad.hpp"

namespace tunnel {

/// Everything derived from a RunConfig before time stepping.
struct Model {
  SpatialGrid grid;
  DoubleWellParams potential;
  MassScale mass;
  GridHamiltonian hamiltonian;
  EigenBasis basis;  // lindblad.n_basis states
  WellPartition partition;
  RealMatrix projector;

  static Model build(const RunConfig& cfg);
};

std::string version_string();

/// Provenance header lines: code version and the resolved config.
std::vector<std::string> provenance(const RunConfig& cfg);

/// Run one trajectory with the configured method. Grid runs for the closed
/// and pointer methods; eigenbasis runs for lindblad (T = 0 is closed) and for
/// closed runs with closed.basis = eigen.
Trajectory run_trajectory(const RunConfig& cfg);
Trajectory run_trajectory(const RunConfig& cfg, const Model& model);

/// run_trajectory followed by the trajectory CSV with provenance header.
void run(const RunConfig& cfg, std::ostream& os);

/// Pointer (grid) and Lindblad (eigenbasis) runs on one config, joined on t.
struct Comparison {
  Trajectory pointer;
  Trajectory lindblad;
  Real max_abs_difference = 0.0;
};
Comparison compare(const RunConfig& cfg);
void write_comparison_csv(std::ostream& os, const Comparison& c, const RunConfig& cfg);

struct SweepRow {
  Real axis_value;
  Real snapshot;
  Real p_shallow;
  std::optional<Real> first_difference;  // vs the previous axis value, same snapshot
};

/// Worker count for sweeps: TUNNEL_WORKERS when set, else hardware concurrency.
unsigned default_workers();

/// One run per axis value, executed on up to `workers` threads. Rows come out
/// ordered by axis value (as given), then snapshot.
std::vector<SweepRow> sweep(const SweepSpec& spec, const RunConfig& base, unsigned workers);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, const SweepSpec& spec,
                     const RunConfig& base);

// ---------------------------------------------------------------------------
// Calibration of the parameters the model leaves open.

/// Shallow-well probability band targeted for P(10 ps) at 200 K.
struct CalibrationBand {
  Real lo = 0.15;
  Real hi = 0.25;
};

struct LengthCalibration {
  bool feasible = false;
  Real length_angstrom = 0.0;
  Real band_lo = 0.0, band_hi = 0.0;  // feasible length interval, Angstrom
  int sub_barrier_states = 0;
  Real fourth_gap_fraction = 0.0;  // (V* - E_4) / (V* - V_deep)
};

/// Scan length_scale over [lo, hi] Angstrom in `step` increments and return the
/// midpoint of the interval with exactly four sub-barrier states, the fourth
/// within 10 % of the barrier top.
LengthCalibration calibrate_length(const RunConfig& base, Real lo = 0.30, Real hi = 2.00,
                                   Real step = 0.001);

/// Number of eigenvalues below the barrier top and the relative gap of the
/// fourth state, for the grid/mass in `cfg`.
LengthCalibration level_structure(const RunConfig& cfg);

struct BathCalibration {
  bool feasible = false;
  Real phonon_frequency = 0.0;
  Real rearrangement_energy = 0.0;
  Real p_shallow_10ps = 0.0;
  Real band_residual = 0.0;  // distance outside the band, 0 when inside
  Real plateau_slope = 0.0;  // |dP/dt| at 100 ps
  CalibrationBand band;
};

struct BathSearch {
  std::vector<Real> phonon_frequencies{10.0, 20.0, 30.0, 50.0, 80.0, 120.0};
  std::vector<Real> rearrangement_energies;  // empty: log grid 1e-2 .. 1e3, 10 per decade
  CalibrationBand band;
};

/// Ground-state-initial Lindblad runs at 200 K. Picks the candidate whose
/// P(10 ps) is closest to the band centre among those with a plateau
/// (|dP/dt| <= 1e-4 / ps at 100 ps); ties break toward lower w_p and dV_R.
BathCalibration calibrate_bath(const RunConfig& base, const BathSearch& search = {});

/// P_shallow at the snapshot times for a ground-state-initial Lindblad run.
std::vector<Real> lindblad_snapshots(const RunConfig& cfg, const Model& model,
                                     const std::vector<Real>& times);

// ---------------------------------------------------------------------------
// Self test.

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

enum class Fault { kNone, kNegateRate, kCoarsePointerStep };

std::vector<CheckResult> selftest(Fault fault = Fault::kNone);

Real step_doubling_ratio(Real coarse, Real mid, Real fine);

}  // namespace tunnel
