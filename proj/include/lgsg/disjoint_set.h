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

#ifndef LGSG_DISJOINT_SET_H_
#define LGSG_DISJOINT_SET_H_

#include <cstdint>
#include <vector>

namespace lgsg {

// Union-find with union by rank and path compression. Not thread-safe.
class DisjointSetUnion {
 public:
  explicit DisjointSetUnion(int size = 0);

  int size() const { return static_cast<int>(parent_.size()); }
  // Number of disjoint sets.
  int groups() const { return groups_; }

  // Throws std::out_of_range for x outside [0, size()).
  int Find(int x);
  // Merges the sets of x and y; returns false if they were already joined.
  bool Link(int x, int y);
  bool Same(int x, int y) { return Find(x) == Find(y); }

 private:
  std::vector<int> parent_;
  std::vector<uint8_t> rank_;
  int groups_ = 0;
};

}  // namespace lgsg

#endif  // LGSG_DISJOINT_SET_H_
