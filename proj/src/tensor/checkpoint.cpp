// Copyright 2026 The Linkgate Authors.
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

#include "linkgate/tensor/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "linkgate/error.hpp"

namespace linkgate {
namespace {

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(const std::string& in, std::size_t pos) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  }
  return v;
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& checkpoint) {
  nlohmann::json manifest = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& [name, t] : checkpoint.tensors) {
    manifest.push_back({{"name", name}, {"shape", t.shape()}, {"offset", offset}});
    offset += 8 * t.size();
  }
  const nlohmann::json header = {{"format_version", kCheckpointFormatVersion},
                                 {"metadata", checkpoint.metadata},
                                 {"tensors", manifest}};
  const std::string text = header.dump();

  std::string out;
  out.reserve(8 + text.size() + offset);
  put_u64(out, text.size());
  out += text;
  for (const auto& [name, t] : checkpoint.tensors) {
    for (double v : t.data()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  if (bytes.size() < 8) throw LoadError("checkpoint: truncated header");
  const std::uint64_t header_len = get_u64(bytes, 0);
  if (header_len > bytes.size() - 8) throw LoadError("checkpoint: header length exceeds file");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(8, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("checkpoint: bad header: ") + e.what());
  }
  if (header.value("format_version", "") != kCheckpointFormatVersion) {
    throw LoadError("checkpoint: unsupported format version");
  }
  const std::size_t payload = 8 + header_len;
  Checkpoint out;
  out.metadata = header.at("metadata");
  for (const auto& entry : header.at("tensors")) {
    const auto name = entry.at("name").get<std::string>();
    const auto shape = entry.at("shape").get<Shape>();
    const auto offset = entry.at("offset").get<std::uint64_t>();
    const std::size_t n = shape_size(shape);
    if (payload + offset + 8 * n > bytes.size()) {
      throw LoadError("checkpoint: tensor '" + name + "' extends past end of file");
    }
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
      values[i] = std::bit_cast<double>(get_u64(bytes, payload + offset + 8 * i));
    }
    out.tensors.emplace(name, Tensor(shape, std::move(values)));
  }
  return out;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw LoadError("cannot open '" + path.string() + "' for writing");
  const std::string bytes = encode_checkpoint(checkpoint);
  file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!file) throw LoadError("failed writing '" + path.string() + "'");
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw LoadError("cannot open checkpoint '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace linkgate
