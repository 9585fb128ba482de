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

#include "lgsg/binary_io.h"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace lgsg {

void ByteWriter::WriteTo(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(bytes_.data(), static_cast<std::streamsize>(bytes_.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

ByteReader ByteReader::FromFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  return ByteReader(std::move(bytes), path.string());
}

void ByteReader::ExpectMagic(std::string_view magic) {
  const char* p = Take(magic.size());
  if (std::string_view(p, magic.size()) != magic) {
    throw std::runtime_error(source_ + ": bad magic, not a " +
                             std::string(magic.substr(0, magic.find('\0'))) +
                             " file");
  }
}

const char* ByteReader::Take(size_t n) {
  if (bytes_.size() - pos_ < n) {
    throw std::runtime_error(source_ + ": truncated file");
  }
  const char* p = bytes_.data() + pos_;
  pos_ += n;
  return p;
}

uint64_t Fingerprint(std::span<const char> bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string HexDigest(uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace lgsg
