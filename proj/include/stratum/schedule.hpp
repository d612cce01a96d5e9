// Copyright (c) the stratum authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace stratum {

/// How the semantic density of an object evolves over the sampling steps.
enum class ScheduleKind {
    InverseProportional,  // D * T / (T + 1 - t): opaque early, target density last
    FixedOpaque,          // D * T at every step
    FixedDensity,         // D at every step
};

const char* to_string(ScheduleKind kind);
bool schedule_kind_from_string(const std::string& name, ScheduleKind& out);

/// Per-object density schedule: target density D >= 0 over T >= 1 steps.
/// The step index t counts down from T (first step) to 1 (last step).
struct DensitySchedule {
    ScheduleKind kind = ScheduleKind::InverseProportional;
    double density = 0.0;  // D
    int steps = 1;         // T
};

/// Density at step t. For the inverse-proportional schedule this starts at
/// D*T (effectively opaque: layers do not mix while object concepts are
/// still forming) and descends to exactly D at t = 1.
double sigma_at(const DensitySchedule& schedule, int t);

/// One row per schedule, one column per step from t = T down to t = 1.
/// Throws ConfigError unless every schedule agrees on `steps`.
std::vector<std::vector<double>> schedule_table(const std::vector<DensitySchedule>& schedules,
                                                int steps);

}  // namespace stratum
