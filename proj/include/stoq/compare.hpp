// Copyright 2026 The stoqtraj Authors
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

#pragma once

#include <string>
#include <variant>
#include <vector>

namespace stoq {

/// distance <= eps
struct AbsRule {
    double eps = 0.0;
};
/// distance <= k * stderr
struct StderrRule {
    double k = 3.0;
};
/// distance <= max(k * stderr, floor)
struct StderrOrAbsRule {
    double k = 3.0;
    double floor = 1e-2;
};

using ToleranceRule = std::variant<AbsRule, StderrRule, StderrOrAbsRule>;

double tolerance_bound(const ToleranceRule& rule, double stderr_value);
std::string describe(const ToleranceRule& rule);

struct ComparisonReport {
    double max_trace_distance = 0.0;
    double time_of_max = 0.0;
    std::vector<double> times;
    std::vector<double> per_time_distance;
    std::vector<double> per_time_stderr;
    std::vector<double> per_time_bound;
    bool pass = true;
    std::string rule;

    /// Structured text: one summary line and the worst time point.
    std::string summary() const;
};

}  // namespace stoq
