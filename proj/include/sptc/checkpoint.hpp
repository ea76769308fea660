#pragma once

#include <string>

#include "sptc/tensor.hpp"

namespace sptc {

/// Checkpoint file layout (all integers little-endian):
///   magic "SPTC", u32 version=1, u32 tensor count,
///   per tensor: u32 name length, UTF-8 name, u32 rank, u64 dims...,
///               raw little-endian f32 data,
///   trailing u64 CRC-64 of all preceding bytes.
/// Save -> load -> save round-trips bit-exactly.
void save_checkpoint(const std::string& path, const ParamSet& params);
ParamSet load_checkpoint(const std::string& path);

}  // namespace sptc
