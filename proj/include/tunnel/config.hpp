#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "tunnel/bath.hpp"
#include "tunnel/pointer.hpp"

namespace tunnel {

enum class Method { kClosed, kPointer, kLindblad };
enum class InitialKind { kGaussian, kEigenstate };
enum class ClosedBasis { kGrid, kEigen };

struct GridSpec {
  Eigen::Index n_points = 128;
  Real zeta_min = -2.2;
  Real zeta_max = 2.2;
};

struct InitialSpec {
  InitialKind kind = InitialKind::kGaussian;
  Real centre = -1.0;
  Real width = 0.18;
  Eigen::Index index = 0;
};

struct LindbladSpec {
  BathParams bath;
  Eigen::Index n_basis = 16;
};

struct IntegrationSpec {
  Real dt = 5e-5;         // ps, pointer grid
  Real eigen_dt = 1e-3;   // ps, eigenbasis
  Real t_end = 3.0;       // ps
  Real record_every = 0.01;
  int min_eigenvalue_every = 0;
};

/// Fully resolved run configuration. Precedence: CLI flags > JSON file > defaults.
struct RunConfig {
  DoubleWellParams potential{620.0, 63.6};
  GridSpec grid;
  MassScale mass;
  InitialSpec initial;
  Method method = Method::kClosed;
  ClosedBasis closed_basis = ClosedBasis::kGrid;
  MeasurementSchedule pointer{100.0, 1e-4, 0, false};
  LindbladSpec lindblad;
  IntegrationSpec integration;
  std::string output;
};

/// Shipped defaults, including the calibrated length scale and bath.
RunConfig default_config();

/// Overlay the fields present in `j` onto `cfg`. Unknown keys are rejected.
void merge_json(RunConfig& cfg, const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);

RunConfig load_config(const std::string& path);

/// Throws ValidationError naming the first invalid field.
void validate(const RunConfig& cfg);

IntegrationOptions grid_options(const RunConfig& cfg);
IntegrationOptions eigen_options(const RunConfig& cfg);

enum class SweepAxis { kTemperature, kFrequency };

struct SweepSpec {
  SweepAxis axis = SweepAxis::kTemperature;
  std::vector<Real> values;
  std::vector<Real> snapshots{10.0};

  void validate() const;
};

std::string to_string(Method m);
std::string to_string(SweepAxis a);
Method parse_method(const std::string& s);
SweepAxis parse_axis(const std::string& s);

}  // namespace tunnel
