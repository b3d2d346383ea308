// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

namespace iags::train {

/// Linear interpolation (1 - f) * start + f * end with f = iteration / total, so both endpoints are exact.
double anneal(double start, double end, long iteration, long total);

/// Refiner noise level: 0.6 -> 0.3 by default.
inline double anneal_noise_level(long iteration, long total, double start = 0.6, double end = 0.3)
{
    return anneal(start, end, iteration, total);
}

/// Lower residual-quantile bound: 0.7 -> 0.85 by default.
inline double anneal_tau_low(long iteration, long total, double start = 0.7, double end = 0.85)
{
    return anneal(start, end, iteration, total);
}

/// Completed-iteration counts after which a refinement round runs: interval, 2*interval, ... <= total.
std::vector<long> refinement_iterations(long total, long interval);

inline bool is_refinement_iteration(long completed, long interval) { return completed > 0 && completed % interval == 0; }

} // namespace iags::train
