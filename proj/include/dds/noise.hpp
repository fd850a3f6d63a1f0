#pragma once

namespace dds {

// Geometric noise level: sigma(t) = sigma_min^(1-t) * sigma_max^t on t in
// [0, 1]. sigma_bar(t) is the integral of sigma over [0, t]; sigma_bar(0) is
// exactly zero.
struct noise_schedule {
  double sigma_min = 0.01;
  double sigma_max = 5.0;

  double sigma(double t) const;
  double sigma_bar(double t) const;

  // Throws config_error for non-positive or non-increasing levels.
  void validate() const;
};

}  // namespace dds
