#pragma once

#include <string>

#include "dacat/tensor.hpp"

namespace dacat::nn {

// Named-tensor checkpoint container, little-endian throughout:
//   magic "DCPT", u32 version (1), u32 tensor count, then per tensor:
//   u16 name length, name bytes, u8 rank, u32 dims, f64 values row-major.
// Tensors are written in name order, so files are byte-reproducible.
void save_checkpoint(const std::string& path, const ParamSet& params);
ParamSet load_checkpoint(const std::string& path);

}  // namespace dacat::nn
