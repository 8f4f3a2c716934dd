// Copyright 2026 The Tunescape Authors.
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

#include <span>
#include <vector>

namespace tunescape::stats {

// Median with the even-count convention of averaging the two central values.
// Throws EmptyDataset on empty input.
double median(std::span<const double> values);

// Linear-interpolation quantile (Hyndman-Fan type 7) for q in [0, 1].
// quantile(v, 0.5) == median(v).
double quantile(std::span<const double> values, double q);

// Ranks starting at 1, ties receive the average of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

double pearson(std::span<const double> x, std::span<const double> y);

// Pearson correlation of average ranks. Returns 0 when either side is constant.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace tunescape::stats
