// Copyright 2026 The cogroute Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef COGROUTE_ROUTE_HPP_
#define COGROUTE_ROUTE_HPP_

#include <vector>

#include "cogroute/scenario.hpp"

namespace cogroute {

// Realized path from a source to a CPC station.
struct RoutePath {
  std::vector<NodeId> nodes;  // source first, CPC last
  StateIndex state = 0;
  // Stage delay of each hop at its receiving node, s: nodes.size() - 1
  // entries, or empty for baseline routes that have not been evaluated yet.
  std::vector<double> hop_delay;

  std::size_t hops() const { return nodes.empty() ? 0 : nodes.size() - 1; }
  bool operator==(const RoutePath&) const = default;
};

}  // namespace cogroute

#endif  // COGROUTE_ROUTE_HPP_
