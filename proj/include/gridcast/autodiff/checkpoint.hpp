// Copyright 2026 The GridCast Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Parameter checkpoints.
//
//   [0, 8)    magic "GCKPT001"
//   [8, 16)   index length L (u64 little-endian)
//   [16, 16+L) JSON index: {"meta": {...}, "tensors": {name: {"offset": o, "shape": [...]}}}
//   then one GRD1 float32 blob per tensor; offsets count from the first blob.

#ifndef GRIDCAST__AUTODIFF__CHECKPOINT_HPP_
#define GRIDCAST__AUTODIFF__CHECKPOINT_HPP_

#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "gridcast/autodiff/tensor.hpp"

namespace gridcast::ad
{

struct Checkpoint
{
  nlohmann::json meta = nlohmann::json::object();
  std::map<std::string, Tensor<float>> tensors;
};

void save_checkpoint(const std::filesystem::path & path, const Checkpoint & ckpt);
/// Throws gridcast::FormatError on malformed files.
Checkpoint load_checkpoint(const std::filesystem::path & path);

}  // namespace gridcast::ad

#endif  // GRIDCAST__AUTODIFF__CHECKPOINT_HPP_
