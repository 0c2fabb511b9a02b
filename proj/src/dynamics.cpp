#include "contsim/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace contsim {

double step_volume(double volume, double alpha_step, NoiseDraw eps) {
  return std::max(0.0, alpha_step + volume + eps.value);
}

double processing_time(double volume, const ContainerParams& p) {
  return p.actuation_time + p.time_per_product * std::floor(volume / p.product_size);
}

double decay_timer(double timer, double delta) { return std::max(0.0, timer - delta); }

}  // namespace contsim
