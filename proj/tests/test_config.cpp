#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "tunnel/config.hpp"

using namespace tunnel;
using nlohmann::json;

TEST_CASE("defaults validate") {
  const RunConfig cfg = default_config();
  CHECK_NOTHROW(validate(cfg));
  CHECK(cfg.grid.n_points == 128);
  CHECK(cfg.integration.dt == 5e-5);
  CHECK(cfg.lindblad.n_basis == 16);
  CHECK(cfg.pointer.harshness == 1e-4);
}

TEST_CASE("json round trip") {
  RunConfig cfg = default_config();
  cfg.method = Method::kLindblad;
  cfg.pointer.frequency = 3300.0;
  cfg.initial.kind = InitialKind::kEigenstate;
  cfg.closed_basis = ClosedBasis::kEigen;
  RunConfig back = default_config();
  merge_json(back, to_json(cfg));
  CHECK(to_json(back) == to_json(cfg));
  CHECK(back.mass.length_m == doctest::Approx(cfg.mass.length_m).epsilon(1e-15));
}

TEST_CASE("partial overlay keeps other fields") {
  RunConfig cfg = default_config();
  merge_json(cfg, json::parse(R"({"lindblad": {"temperature_k": 115}, "method": "lindblad"})"));
  CHECK(cfg.lindblad.bath.temperature == 115.0);
  CHECK(cfg.method == Method::kLindblad);
  CHECK(cfg.lindblad.bath.phonon_frequency == default_config().lindblad.bath.phonon_frequency);
}

TEST_CASE("later overlays win") {
  RunConfig cfg = default_config();
  merge_json(cfg, json::parse(R"({"pointer": {"frequency_per_ps": 20}})"));
  merge_json(cfg, json::parse(R"({"pointer": {"frequency_per_ps": 100}})"));
  CHECK(cfg.pointer.frequency == 100.0);
}

TEST_CASE("errors name the field") {
  RunConfig cfg = default_config();
  auto field_of = [&](const char* text) -> std::string {
    try {
      RunConfig c = default_config();
      merge_json(c, json::parse(text));
      validate(c);
    } catch (const ValidationError& e) {
      return e.field();
    }
    return "";
  };
  CHECK(field_of(R"({"grid": {"n_pionts": 3}})") == "grid.n_pionts");
  CHECK(field_of(R"({"bogus": 1})") == "bogus");
  CHECK(field_of(R"({"grid": {"n_points": "many"}})") == "grid.n_points");
  CHECK(field_of(R"({"method": "quantum"})") == "method");
  CHECK(field_of(R"({"grid": {"n_points": 2}})") == "grid.n_points");
  CHECK(field_of(R"({"pointer": {"block_size": 5}})") == "pointer.block_size");
  CHECK(field_of(R"({"lindblad": {"n_basis": 500}})") == "lindblad.n_basis");
  CHECK(field_of(R"({"lindblad": {"temperature_k": -3}})") == "lindblad.temperature_k");
  CHECK(field_of(R"({"integration": {"dt_ps": 0}})") == "integration.dt_ps");
  CHECK(field_of(R"({"initial": {"kind": "eigenstate", "index": 16}})") == "initial.index");
}

TEST_CASE("config files") {
  CHECK_THROWS_AS(load_config("/nonexistent/dir/cfg.json"), IoError);
  const std::string path = "tunnel_test_config.json";
  {
    std::ofstream os(path);
    os << R"({"grid": {"n_points": 64}, "integration": {"t_end_ps": 1.5}})";
  }
  const RunConfig cfg = load_config(path);
  CHECK(cfg.grid.n_points == 64);
  CHECK(cfg.integration.t_end == 1.5);
  {
    std::ofstream os(path);
    os << "{ not json";
  }
  CHECK_THROWS_AS(load_config(path), ValidationError);
  std::remove(path.c_str());
}

TEST_CASE("sweep spec") {
  SweepSpec s;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s.values = {115, 155, 200};
  CHECK_NOTHROW(s.validate());
  s.values.push_back(-1);
  CHECK_THROWS_AS(s.validate(), ValidationError);
  CHECK(parse_axis("frequency") == SweepAxis::kFrequency);
  CHECK_THROWS_AS(parse_axis("pressure"), ValidationError);
}
