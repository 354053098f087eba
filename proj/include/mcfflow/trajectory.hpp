#ifndef MCFFLOW_TRAJECTORY_HPP
#define MCFFLOW_TRAJECTORY_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mcfflow/errors.hpp"
#include "mcfflow/support_profile.hpp"

namespace mcfflow {

/// Geodesic sphere in the round sphere of radius `ambient_radius`
/// (ambient curvature K = 1 / R^2). The state is the angular gap to the
/// equator, pi/2 - rho/R, which stays accurate where rho itself would round to
/// the equator.
struct CapState {
  int n = 2;
  double ambient_radius = 1.0;
  double equator_gap = 0.0;

  static CapState from_radius(int n, double R, double rho) { return {n, R, 0.5 * pi - rho / R}; }
  static CapState from_gap(int n, double R, double gap) { return {n, R, gap}; }

  double geodesic_radius() const { return ambient_radius * (0.5 * pi - equator_gap); }
  double ambient_curvature() const { return 1.0 / (ambient_radius * ambient_radius); }
  /// Each principal curvature, cot(rho / R) / R; zero on the equator.
  double principal_curvature() const { return std::tan(equator_gap) / ambient_radius; }
  double mean_curvature() const { return n * principal_curvature(); }
  bool is_equator() const { return equator_gap == 0.0; }
};

struct TimeSlice {
  double t = 0.0;
  std::variant<SupportProfile, CapState> geometry;

  bool is_cap() const { return std::holds_alternative<CapState>(geometry); }
  const SupportProfile& profile() const { return std::get<SupportProfile>(geometry); }
  const CapState& cap() const { return std::get<CapState>(geometry); }
};

struct FlowControls {
  double cfl = 0.4;
  double max_dt = 1e-2;
  double stop_rho_plus = 0.05;
  std::size_t snapshot_stride = 50;
  std::size_t refinement = 256;
  /// Optional hard stop on the internal clock; the last step lands on it.
  std::optional<double> t_end;

  void validate() const {
    require(cfl > 0.0 && cfl <= 0.5, "cfl must lie in (0, 0.5]");
    require(stop_rho_plus > 0.0, "stop_rho_plus must be positive");
    require(max_dt > 0.0, "max_dt must be positive");
    require(snapshot_stride >= 1, "snapshot_stride must be >= 1");
  }
};

struct Provenance {
  std::string engine;
  std::uint64_t seed = 0;
  std::string config_hash;
};

struct Trajectory {
  std::string engine;  // curve | axisym | cap | exact
  int n = 1;
  std::vector<TimeSlice> slices;
  FlowControls controls;
  /// Internal-clock extinction estimate used to relabel times (absent when the
  /// run did not reach extinction, in which case times are left as given).
  std::optional<double> t_ext_estimate;
  Provenance provenance;

  std::size_t size() const { return slices.size(); }
  double t_front() const { return slices.front().t; }
  double t_back() const { return slices.back().t; }

  void validate() const {
    for (std::size_t i = 1; i < slices.size(); ++i)
      if (!(slices[i].t > slices[i - 1].t))
        throw ValidationError("trajectory times must be strictly increasing");
  }
};

} // namespace mcfflow

#endif
