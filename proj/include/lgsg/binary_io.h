// Copyright 2026 The LGSG Authors.
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

#ifndef LGSG_BINARY_IO_H_
#define LGSG_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace lgsg {

static_assert(std::endian::native == std::endian::little,
              "binary formats are written in host order and assume little-endian");

// Append-only byte buffer for the little-endian artifact formats.
class ByteWriter {
 public:
  template <typename T>
    requires std::is_arithmetic_v<T>
  void Put(T value) {
    const auto* p = reinterpret_cast<const char*>(&value);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  template <typename T>
    requires std::is_arithmetic_v<T>
  void PutSpan(std::span<const T> values) {
    const auto* p = reinterpret_cast<const char*>(values.data());
    bytes_.insert(bytes_.end(), p, p + values.size_bytes());
  }
  void PutBytes(std::string_view raw) {
    bytes_.insert(bytes_.end(), raw.begin(), raw.end());
  }

  const std::vector<char>& bytes() const { return bytes_; }
  void WriteTo(const std::filesystem::path& path) const;

 private:
  std::vector<char> bytes_;
};

// Bounds-checked reader; throws std::runtime_error on truncation.
class ByteReader {
 public:
  explicit ByteReader(std::vector<char> bytes, std::string source = "buffer")
      : bytes_(std::move(bytes)), source_(std::move(source)) {}
  static ByteReader FromFile(const std::filesystem::path& path);

  template <typename T>
    requires std::is_arithmetic_v<T>
  T Get() {
    T value;
    std::memcpy(&value, Take(sizeof(T)), sizeof(T));
    return value;
  }
  template <typename T>
    requires std::is_arithmetic_v<T>
  void GetSpan(std::span<T> out) {
    std::memcpy(out.data(), Take(out.size_bytes()), out.size_bytes());
  }
  // Throws unless the next bytes equal `magic`.
  void ExpectMagic(std::string_view magic);
  bool AtEnd() const { return pos_ == bytes_.size(); }
  const std::string& source() const { return source_; }

 private:
  const char* Take(size_t n);

  std::vector<char> bytes_;
  size_t pos_ = 0;
  std::string source_;
};

// 64-bit FNV-1a, used to fingerprint artifacts.
uint64_t Fingerprint(std::span<const char> bytes);
std::string HexDigest(uint64_t value);

}  // namespace lgsg

#endif  // LGSG_BINARY_IO_H_
