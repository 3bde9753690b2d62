#pragma once

// Command-line front end: profile, cascade-table, catalog, verify, evolve.
// Exit codes: 0 success, 1 failed check or numerical failure, 2 usage error.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gkdv {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct RunConfig {
  std::string subcommand;
  std::string catalog_action;  // list | eval

  std::string nonlinearity = "6*u";
  std::vector<std::string> params;  // name=value
  double c = 1.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
  std::optional<double> y_min;
  std::optional<double> y_max;
  std::optional<double> y_base;
  std::uint64_t seed = 1;

  std::string out = "-";
  std::string json;

  // profile
  double z_min = -10.0;
  double z_max = 10.0;
  std::size_t points = 2001;
  double z_start = 0.0;
  std::optional<double> y_start;
  std::optional<int> sign;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double guard = 1e-8;

  // cascade-table
  std::size_t table_points = 201;

  // catalog eval
  std::string entry;
  double x_min = -10.0;
  double x_max = 10.0;
  std::size_t x_points = 201;
  double t = 0.0;

  // verify
  std::size_t jet_points = 50;
  std::size_t grid_points = 1000;
  std::size_t pde_points = 200;
  double drift_length = 20.0;

  // evolve
  std::size_t N = 1024;
  double L = 80.0;
  double dt = 0.0;
  double T = 10.0;
  std::size_t snapshot_every = 0;
};

/// Parses argv (argv[0] is the program name) and runs the subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Runs a fully parsed configuration.
int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace gkdv
