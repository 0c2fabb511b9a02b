#pragma once

#include "contsim/config.hpp"

namespace contsim {

// A single noise sample eps ~ N(0, sigma^2), in volume units.
struct NoiseDraw {
  double value = 0.0;
};

// max(0, alpha + v + eps). No upper clamp; overflow is the env's business.
double step_volume(double volume, double alpha_step, NoiseDraw eps);

// beta + lambda * floor(v / b), floor on the exact double quotient.
double processing_time(double volume, const ContainerParams& p);

// max(0, timer - delta)
double decay_timer(double timer, double delta);

}  // namespace contsim
