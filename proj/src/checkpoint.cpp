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

#include "nase/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace nase {
namespace {

constexpr const char* kMagic = "NASE-CHECKPOINT";

template <typename T>
void AppendLittleEndian(std::vector<unsigned char>& out, T value) {
  using Bits = std::conditional_t<sizeof(T) == 4, uint32_t, uint64_t>;
  const Bits bits = std::bit_cast<Bits>(value);
  for (size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<unsigned char>((bits >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T ReadLittleEndian(const unsigned char* p) {
  using Bits = std::conditional_t<sizeof(T) == 4, uint32_t, uint64_t>;
  Bits bits = 0;
  for (size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<Bits>(p[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

Shape ParseShape(const std::string& s) {
  Shape shape;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, 'x')) shape.push_back(std::stoll(part));
  return shape;
}

std::string FormatShape(const Shape& shape) {
  std::string s;
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s;
}

size_t ElementBytes(Precision p) { return p == Precision::kF32 ? 4 : 8; }

}  // namespace

const CheckpointEntry* Checkpoint::Find(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

std::vector<double> Checkpoint::ValuesAsDouble(const CheckpointEntry& entry) const {
  const size_t width = ElementBytes(precision);
  const size_t n = entry.bytes / width;
  std::vector<double> out(n);
  const unsigned char* base = payload.data() + entry.offset;
  for (size_t i = 0; i < n; ++i) {
    out[i] = precision == Precision::kF32
                 ? static_cast<double>(ReadLittleEndian<float>(base + i * width))
                 : ReadLittleEndian<double>(base + i * width);
  }
  return out;
}

template <typename T>
void SaveCheckpoint(const std::filesystem::path& path,
                    const ParameterStore<T>& store,
                    const std::map<std::string, std::string>& meta) {
  std::vector<unsigned char> payload;
  std::ostringstream header;
  header << kMagic << "\n";
  header << "format-version: " << kCheckpointFormatVersion << "\n";
  header << "element-precision: " << PrecisionName(PrecisionOf<T>::value) << "\n";
  header << "parameter-count: " << store.all().size() << "\n";
  for (const auto& p : store.all()) {
    const int64_t offset = static_cast<int64_t>(payload.size());
    for (T v : p->tensor.data()) AppendLittleEndian(payload, v);
    header << "param: " << p->name << " "
           << (p->group == Group::kTheta ? "theta" : "alpha") << " "
           << FormatShape(p->tensor.shape()) << " " << offset << " "
           << (static_cast<int64_t>(payload.size()) - offset) << "\n";
  }
  for (const auto& [key, value] : meta) {
    if (value.find('\n') != std::string::npos) {
      throw Error("checkpoint meta '" + key + "' must be a single line");
    }
    header << "meta: " << key << " " << value << "\n";
  }
  header << "end-header\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  const std::string h = header.str();
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  if (!out) throw Error("failed writing checkpoint " + path.string());
}

Checkpoint ReadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  auto fail = [&](const std::string& why) {
    return Error("malformed checkpoint " + path.string() + ": " + why);
  };
  std::string line;
  if (!std::getline(in, line) || line != kMagic) throw fail("bad magic");

  Checkpoint ckpt;
  size_t declared = 0;
  bool ended = false;
  while (std::getline(in, line)) {
    if (line == "end-header") {
      ended = true;
      break;
    }
    const auto colon = line.find(": ");
    if (colon == std::string::npos) throw fail("bad header line '" + line + "'");
    const std::string key = line.substr(0, colon);
    const std::string rest = line.substr(colon + 2);
    if (key == "format-version") {
      ckpt.format_version = std::stoi(rest);
      if (ckpt.format_version != kCheckpointFormatVersion) {
        throw fail("unsupported format-version " + rest);
      }
    } else if (key == "element-precision") {
      ckpt.precision = ParsePrecision(rest);
    } else if (key == "parameter-count") {
      declared = std::stoul(rest);
    } else if (key == "param") {
      std::istringstream ss(rest);
      CheckpointEntry e;
      std::string group, shape;
      if (!(ss >> e.name >> group >> shape >> e.offset >> e.bytes)) {
        throw fail("bad param line '" + line + "'");
      }
      e.group = group == "alpha" ? Group::kAlpha : Group::kTheta;
      e.shape = ParseShape(shape);
      ckpt.entries.push_back(std::move(e));
    } else if (key == "meta") {
      const auto space = rest.find(' ');
      if (space == std::string::npos) throw fail("bad meta line");
      ckpt.meta[rest.substr(0, space)] = rest.substr(space + 1);
    } else {
      throw fail("unknown header key '" + key + "'");
    }
  }
  if (!ended) throw fail("missing end-header");
  if (declared != ckpt.entries.size()) throw fail("parameter-count mismatch");

  ckpt.payload.assign(std::istreambuf_iterator<char>(in),
                      std::istreambuf_iterator<char>());
  const size_t width = ElementBytes(ckpt.precision);
  for (const auto& e : ckpt.entries) {
    if (e.offset < 0 || e.offset + e.bytes > static_cast<int64_t>(ckpt.payload.size()) ||
        e.bytes != NumElements(e.shape) * static_cast<int64_t>(width)) {
      throw fail("entry '" + e.name + "' out of bounds");
    }
  }
  return ckpt;
}

template <typename T>
void RestoreParameters(const Checkpoint& ckpt, ParameterStore<T>& store) {
  if (ckpt.precision != PrecisionOf<T>::value) {
    throw Error("checkpoint precision " + PrecisionName(ckpt.precision) +
                " does not match model precision " +
                PrecisionName(PrecisionOf<T>::value));
  }
  if (ckpt.entries.size() != store.all().size()) {
    throw Error("checkpoint has " + std::to_string(ckpt.entries.size()) +
                " parameters, model has " + std::to_string(store.all().size()));
  }
  for (const auto& e : ckpt.entries) {
    auto& p = store.Get(e.name);
    if (p.tensor.shape() != e.shape) {
      throw ShapeError("checkpoint:" + e.name, {p.tensor.shape(), e.shape});
    }
    auto dst = p.tensor.mutable_data();
    const unsigned char* base = ckpt.payload.data() + e.offset;
    for (size_t i = 0; i < dst.size(); ++i) {
      dst[i] = ReadLittleEndian<T>(base + i * sizeof(T));
    }
  }
}

template void SaveCheckpoint(const std::filesystem::path&,
                             const ParameterStore<float>&,
                             const std::map<std::string, std::string>&);
template void SaveCheckpoint(const std::filesystem::path&,
                             const ParameterStore<double>&,
                             const std::map<std::string, std::string>&);
template void RestoreParameters(const Checkpoint&, ParameterStore<float>&);
template void RestoreParameters(const Checkpoint&, ParameterStore<double>&);

}  // namespace nase
