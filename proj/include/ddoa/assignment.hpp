// Copyright 2026 The ddoa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DDOA_ASSIGNMENT_HPP_
#define DDOA_ASSIGNMENT_HPP_

#include <cstddef>
#include <vector>

namespace ddoa::assignment {

// Exact minimum-cost one-to-one assignment on a square cost matrix
// (row-major n x n), Hungarian algorithm with potentials, O(n^3).
// Returns the matched column for each row; total cost via `total_cost`.
std::vector<int> solve(const std::vector<double>& cost, std::size_t n);

double total_cost(const std::vector<double>& cost, std::size_t n,
                  const std::vector<int>& row_to_col);

}  // namespace ddoa::assignment

#endif  // DDOA_ASSIGNMENT_HPP_
