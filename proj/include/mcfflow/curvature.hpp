#ifndef MCFFLOW_CURVATURE_HPP
#define MCFFLOW_CURVATURE_HPP

#include <cmath>
#include <vector>

#include "mcfflow/support_profile.hpp"

namespace mcfflow {

/// Principal curvatures of the body at each sample. For curves only `k1`
/// is filled. For profiles `k1` is the meridian curvature 1/(h''+h) and `k2`
/// the parallel curvature sin(phi)/r with multiplicity n-1; at the poles the
/// symmetric limit k2 = k1 is used.
struct ProfileCurvatures {
  std::vector<double> k1;
  std::vector<double> k2;
  std::vector<double> r; // distance to the axis (profiles only)
};

inline ProfileCurvatures profile_curvatures(const SupportProfile& body) {
  ProfileCurvatures out;
  out.k1 = body.profile_curvature();
  if (body.is_curve()) return out;
  const auto h = body.values();
  const auto dh = body.first_derivative();
  const std::size_t last = h.size() - 1;
  out.k2.resize(h.size());
  out.r.resize(h.size());
  for (std::size_t j = 0; j <= last; ++j) {
    const double a = body.angle(j);
    if (j == 0 || j == last) {
      out.r[j] = 0.0;
      out.k2[j] = out.k1[j];
      continue;
    }
    out.r[j] = h[j] * std::sin(a) + dh[j] * std::cos(a);
    out.k2[j] = std::sin(a) / out.r[j];
  }
  return out;
}

inline std::vector<double> mean_curvature(const SupportProfile& body, const ProfileCurvatures& k) {
  std::vector<double> H = k.k1;
  if (!body.is_curve())
    for (std::size_t j = 0; j < H.size(); ++j) H[j] += (body.dimension() - 1) * k.k2[j];
  return H;
}

inline std::vector<double> mean_curvature(const SupportProfile& body) {
  return mean_curvature(body, profile_curvatures(body));
}

} // namespace mcfflow

#endif
