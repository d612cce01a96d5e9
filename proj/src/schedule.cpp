// Copyright (c) the stratum authors
// SPDX-License-Identifier: Apache-2.0
#include "stratum/schedule.hpp"

#include <cmath>

#include "stratum/errors.hpp"

namespace stratum {

const char* to_string(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::InverseProportional: return "inverse_proportional";
        case ScheduleKind::FixedOpaque: return "fixed_opaque";
        case ScheduleKind::FixedDensity: return "fixed_density";
    }
    return "unknown";
}

bool schedule_kind_from_string(const std::string& name, ScheduleKind& out) {
    if (name == "inverse_proportional") {
        out = ScheduleKind::InverseProportional;
    } else if (name == "fixed_opaque") {
        out = ScheduleKind::FixedOpaque;
    } else if (name == "fixed_density") {
        out = ScheduleKind::FixedDensity;
    } else {
        return false;
    }
    return true;
}

double sigma_at(const DensitySchedule& schedule, int t) {
    if (schedule.steps < 1) {
        throw RangeError("sigma_at: schedule must have at least one step");
    }
    if (!(std::isfinite(schedule.density) && schedule.density >= 0.0)) {
        throw RangeError("sigma_at: target density must be finite and non-negative");
    }
    if (t < 1 || t > schedule.steps) {
        throw RangeError("sigma_at: step " + std::to_string(t) + " outside [1, " +
                         std::to_string(schedule.steps) + "]");
    }
    const double steps = static_cast<double>(schedule.steps);
    switch (schedule.kind) {
        case ScheduleKind::InverseProportional:
            // Grouped as D * (T / (T + 1 - t)) so both endpoints are exact:
            // the ratio is T/1 at t = T and T/T = 1 at t = 1.
            return schedule.density * (steps / (schedule.steps + 1 - t));
        case ScheduleKind::FixedOpaque:
            return schedule.density * steps;
        case ScheduleKind::FixedDensity:
            return schedule.density;
    }
    throw RangeError("sigma_at: unknown schedule kind");
}

std::vector<std::vector<double>> schedule_table(const std::vector<DensitySchedule>& schedules,
                                                int steps) {
    for (std::size_t i = 0; i < schedules.size(); ++i) {
        if (schedules[i].steps != steps) {
            throw ConfigError("schedule_table: schedule " + std::to_string(i) + " has " +
                              std::to_string(schedules[i].steps) + " steps, expected " +
                              std::to_string(steps));
        }
    }
    std::vector<std::vector<double>> table;
    table.reserve(schedules.size());
    for (const DensitySchedule& schedule : schedules) {
        std::vector<double> row;
        row.reserve(steps);
        for (int t = steps; t >= 1; --t) {
            row.push_back(sigma_at(schedule, t));
        }
        table.push_back(std::move(row));
    }
    return table;
}

}  // namespace stratum
