#include "dds/noise.hpp"

#include <cmath>

#include "dds/errors.hpp"

namespace dds {

double noise_schedule::sigma(double t) const {
  return sigma_min * std::pow(sigma_max / sigma_min, t);
}

double noise_schedule::sigma_bar(double t) const {
  if (t == 0.0) return 0.0;
  return (sigma(t) - sigma_min) / std::log(sigma_max / sigma_min);
}

void noise_schedule::validate() const {
  if (!(sigma_min > 0.0))
    throw config_error("noise schedule: sigma_min must be positive");
  if (!(sigma_max > sigma_min))
    throw config_error("noise schedule: sigma_max must exceed sigma_min");
}

}  // namespace dds
