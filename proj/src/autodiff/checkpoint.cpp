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


#include "gridcast/autodiff/checkpoint.hpp"

#include <array>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "gridcast/grd1.hpp"

namespace gridcast::ad
{

namespace
{

constexpr char kMagic[8] = {'G', 'C', 'K', 'P', 'T', '0', '0', '1'};

std::array<std::uint32_t, 4> grd_dims(const Shape & shape)
{
  if (shape.size() > 4) {
    throw std::invalid_argument("checkpoint tensors have at most 4 dims, got " + shape_string(shape));
  }
  std::array<std::uint32_t, 4> dims{1, 1, 1, 1};
  const std::size_t lead = 4 - shape.size();
  for (std::size_t i = 0; i < shape.size(); ++i) {
    dims[lead + i] = static_cast<std::uint32_t>(shape[i]);
  }
  return dims;
}

}  // namespace

void save_checkpoint(const std::filesystem::path & path, const Checkpoint & ckpt)
{
  std::ostringstream blobs(std::ios::binary);
  nlohmann::json index = nlohmann::json::object();
  for (const auto & [name, t] : ckpt.tensors) {
    index[name] = {{"offset", static_cast<std::uint64_t>(blobs.tellp())}, {"shape", t.shape()}};
    write_grd1(blobs, GrdTensor::make_f32(grd_dims(t.shape()), t.values()));
  }
  const std::string header = nlohmann::json{{"meta", ckpt.meta}, {"tensors", index}}.dump();
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw FormatError("cannot open " + path.string() + " for writing");
  }
  os.write(kMagic, 8);
  std::uint64_t len = header.size();
  for (int i = 0; i < 8; ++i) {
    os.put(static_cast<char>((len >> (8 * i)) & 0xFF));
  }
  os << header << blobs.str();
  if (!os) {
    throw FormatError("write failed for " + path.string());
  }
}

Checkpoint load_checkpoint(const std::filesystem::path & path)
{
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw FormatError("cannot open checkpoint " + path.string());
  }
  try {
    char magic[8];
    unsigned char len_bytes[8];
    if (!is.read(magic, 8) || std::string(magic, 8) != std::string(kMagic, 8)) {
      throw FormatError("bad checkpoint magic");
    }
    if (!is.read(reinterpret_cast<char *>(len_bytes), 8)) {
      throw FormatError("truncated checkpoint header");
    }
    std::uint64_t len = 0;
    for (int i = 7; i >= 0; --i) {
      len = (len << 8) | len_bytes[i];
    }
    std::string header(len, '\0');
    if (!is.read(header.data(), static_cast<std::streamsize>(len))) {
      throw FormatError("truncated checkpoint index");
    }
    const auto index = nlohmann::json::parse(header);
    const std::streamoff base = is.tellg();
    Checkpoint ckpt;
    ckpt.meta = index.at("meta");
    for (const auto & [name, entry] : index.at("tensors").items()) {
      is.seekg(base + static_cast<std::streamoff>(entry.at("offset").get<std::uint64_t>()));
      GrdTensor g = read_grd1(is);
      const Shape shape = entry.at("shape").get<Shape>();
      if (g.dtype != GrdType::kFloat32 || g.dims != grd_dims(shape)) {
        throw FormatError("tensor '" + name + "' does not match its index entry");
      }
      ckpt.tensors.emplace(name, Tensor<float>(shape, std::move(g.f32)));
    }
    return ckpt;
  } catch (const nlohmann::json::exception & e) {
    throw FormatError(path.string() + ": malformed checkpoint index: " + e.what());
  } catch (const FormatError & e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace gridcast::ad
