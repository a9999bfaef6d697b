// Copyright 2026 The NASE Authors.
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

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "nase/optim.hpp"

// Checkpoint layout:
//
//   NASE-CHECKPOINT
//   format-version: 1
//   element-precision: f32|f64
//   parameter-count: <n>
//   param: <name> <theta|alpha> <d0xd1x...> <byte offset> <byte count>
//   ...
//   meta: <key> <single-line JSON>
//   ...
//   end-header
//   <raw little-endian IEEE-754 payload, parameters in header order>
//
// Byte offsets are relative to the first payload byte.
namespace nase {

inline constexpr int kCheckpointFormatVersion = 1;

struct CheckpointEntry {
  std::string name;
  Group group = Group::kTheta;
  Shape shape;
  int64_t offset = 0;
  int64_t bytes = 0;
};

struct Checkpoint {
  int format_version = kCheckpointFormatVersion;
  Precision precision = Precision::kF32;
  std::vector<CheckpointEntry> entries;
  std::map<std::string, std::string> meta;
  std::vector<unsigned char> payload;

  const CheckpointEntry* Find(const std::string& name) const;
  // Values of one entry widened to double.
  std::vector<double> ValuesAsDouble(const CheckpointEntry& entry) const;
};

template <typename T>
void SaveCheckpoint(const std::filesystem::path& path,
                    const ParameterStore<T>& store,
                    const std::map<std::string, std::string>& meta = {});

Checkpoint ReadCheckpoint(const std::filesystem::path& path);

// Copies every stored parameter into the same-named parameter of `store`.
// Precision, names, and shapes must agree exactly.
template <typename T>
void RestoreParameters(const Checkpoint& ckpt, ParameterStore<T>& store);

}  // namespace nase
