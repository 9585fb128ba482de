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

#include "lgsg/disjoint_set.h"

#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace lgsg {

DisjointSetUnion::DisjointSetUnion(int size)
    : parent_(size), rank_(size, 0), groups_(size) {
  if (size < 0) throw std::invalid_argument("negative union-find size");
  std::iota(parent_.begin(), parent_.end(), 0);
}

int DisjointSetUnion::Find(int x) {
  if (x < 0 || x >= size()) {
    throw std::out_of_range("union-find index " + std::to_string(x) +
                            " out of range");
  }
  int root = x;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[x] != root) x = std::exchange(parent_[x], root);
  return root;
}

bool DisjointSetUnion::Link(int x, int y) {
  int a = Find(x);
  int b = Find(y);
  if (a == b) return false;
  if (rank_[a] < rank_[b]) std::swap(a, b);
  parent_[b] = a;
  if (rank_[a] == rank_[b]) ++rank_[a];
  --groups_;
  return true;
}

}  // namespace lgsg
