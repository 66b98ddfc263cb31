#pragma once

#include <array>
#include <vector>

#include "slipdet/common.hpp"
#include "slipdet/event_detector.hpp"

namespace slipdet::friction {

struct FrictionSample {
  double v = 0.0;
  double f_n = 0.0;
  double mu = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t frame = 0;
};

struct FrictionModel {
  std::array<double, 3> beta{};      // intercept, velocity, normal force
  std::array<double, 3> std_error{};
  double sigma = 0.0;
  std::size_t sample_count = 0;
};

inline constexpr std::size_t kMinSamples = 30;

std::vector<FrictionSample> collect_samples(const std::vector<detect::Event>& events,
                                            const std::vector<DeformationFrame>& frames);

FrictionModel fit_linear(const std::vector<FrictionSample>& samples);

}  // namespace slipdet::friction
