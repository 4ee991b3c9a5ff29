#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "mdke/encoders.hpp"
#include "mdke/kernels.hpp"

namespace mdke {

/// A trained (or freshly initialized) encoder plus the frozen kernel settings
/// it was trained with.
struct Checkpoint {
  Encoder encoder;
  EncoderDims dims;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  DistributionKernel family = DistributionKernel::kGaussian;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t step_count = 0;
};

/// JSON with sorted keys; parameters stored as flat full-precision arrays with
/// their shapes.
std::string to_json(const Checkpoint& checkpoint);
Checkpoint parse_checkpoint(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace mdke
