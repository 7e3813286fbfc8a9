#pragma once

// Central finite differences over every parameter of the TD loss.

#include <algorithm>
#include <cmath>
#include <span>

#include "sentishape/qnetwork.hpp"

namespace oracle {

struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};

// Relative error |a - n| / max(|a|, |n|, floor); the floor keeps entries
// whose true gradient is ~0 from dividing by rounding noise.
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

inline GradCheck check_gradient(const sshape::QParams& params, const sshape::QParams& target,
                                std::span<const sshape::ReplayEntry> batch, double gamma,
                                double h = 1e-4) {
  const auto analytic = sshape::loss_and_gradient(params, target, batch, gamma).gradient;
  sshape::QParams probe = params;
  GradCheck out;
  // walk the groups of probe and analytic in lockstep
  std::vector<double*> p_data;
  std::vector<const double*> g_data;
  std::vector<Eigen::Index> sizes;
  probe.for_each_group([&](const char*, auto& m) {
    p_data.push_back(m.data());
    sizes.push_back(m.size());
  });
  analytic.for_each_group([&](const char*, const auto& m) { g_data.push_back(m.data()); });
  for (std::size_t g = 0; g < p_data.size(); ++g) {
    for (Eigen::Index i = 0; i < sizes[g]; ++i) {
      double& x = p_data[g][i];
      const double saved = x;
      x = saved + h;
      const double up = sshape::td_loss(probe, target, batch, gamma);
      x = saved - h;
      const double down = sshape::td_loss(probe, target, batch, gamma);
      x = saved;
      const double numeric = (up - down) / (2.0 * h);
      out.max_rel_error = std::max(out.max_rel_error, relative_error(g_data[g][i], numeric));
      ++out.checked;
    }
  }
  return out;
}

}  // namespace oracle
