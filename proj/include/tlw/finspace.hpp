/* Copyright 2026 The TLW Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Finite topological spaces. Points are 0..n-1 (with display names); subsets
// are bit masks. A finite topology is determined by the minimal open
// neighbourhood of each point, which is what we store.

#ifndef TLW_FINSPACE_HPP_
#define TLW_FINSPACE_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tlw/error.hpp"

namespace tlw {

using PointSet = std::uint64_t;

inline PointSet bit(int p) { return PointSet{1} << p; }
inline bool has(PointSet s, int p) { return (s >> p) & 1U; }
int popcount(PointSet s);
std::vector<int> members(PointSet s);

// Cap on user-supplied spaces; TLW_MAX_POINTS overrides the default of 6.
int max_points();
void check_point_cap(int n);

class FinSpace {
 public:
  FinSpace();  // the one-point space

  // Validates that `opens` contains the empty and full sets and is closed
  // under union and intersection.
  FinSpace(std::vector<std::string> names, const std::vector<PointSet>& opens);

  static FinSpace from_subbasis(std::vector<std::string> names, const std::vector<PointSet>& subbasis);
  static FinSpace from_min_opens(std::vector<std::string> names, std::vector<PointSet> min_opens);
  static FinSpace discrete(int n);
  static FinSpace indiscrete(int n);
  static FinSpace sierpinski();  // points g, c; opens {}, {g}, {g,c}
  static FinSpace point() { return FinSpace(); }

  int size() const { return static_cast<int>(min_open_.size()); }
  PointSet full() const { return size() == 64 ? ~PointSet{0} : bit(size()) - 1; }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(int p) const { return names_[p]; }
  std::optional<int> index_of(const std::string& name) const;

  PointSet min_open(int p) const { return min_open_[p]; }
  // p <= q iff q lies in every open containing p.
  bool leq(int p, int q) const { return has(min_open_[p], q); }
  std::vector<std::vector<bool>> specialization() const;
  bool equivalent(int p, int q) const { return leq(p, q) && leq(q, p); }

  bool is_open(PointSet s) const;
  PointSet interior(PointSet s) const;
  PointSet up_closure(PointSet s) const;
  // Every open set, in increasing numeric order of masks.
  const std::vector<PointSet>& opens() const;

  int num_components() const;
  std::vector<int> component_ids() const;  // canonical: by smallest member

  bool is_t0() const;
  bool is_discrete() const;
  std::string str() const;

  friend bool operator==(const FinSpace& a, const FinSpace& b) {
    return a.min_open_ == b.min_open_ && a.names_ == b.names_;
  }
  // Same topology on the same index set, ignoring names.
  bool same_topology(const FinSpace& other) const { return min_open_ == other.min_open_; }

 private:
  std::vector<std::string> names_;
  std::vector<PointSet> min_open_;
  struct Cache;
  std::shared_ptr<Cache> cache_;  // lazily enumerated opens, shared by copies
};

bool is_continuous(const std::vector<int>& f, const FinSpace& x, const FinSpace& y);

struct ContinuousMap {
  FinSpace source;
  FinSpace target;
  std::vector<int> map;
};

// All topologies on n labelled points.
std::vector<FinSpace> all_topologies(int n);
// One representative per homeomorphism class.
std::vector<FinSpace> topologies_up_to_homeomorphism(int n);
bool homeomorphic(const FinSpace& a, const FinSpace& b);

std::vector<std::string> default_point_names(int n);

}  // namespace tlw

#endif  // TLW_FINSPACE_HPP_
