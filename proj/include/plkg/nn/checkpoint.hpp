#pragma once

#include <filesystem>

#include "plkg/nn/tensor.hpp"

namespace plkg::nn {

// Binary parameter container:
//   "PLKGCKPT" | u32 version | u32 count |
//   count x ( u32 name_len | name | u32 ndim=2 | u64 rows | u64 cols | f64 values[] )
// All integers and doubles little-endian. Only parameter values are stored.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::filesystem::path& path, const ParamRefs& params);

// Loads into existing params, matched by name; shapes must agree and every
// param must be present.
void load_checkpoint(const std::filesystem::path& path, const ParamRefs& params);

}  // namespace plkg::nn
