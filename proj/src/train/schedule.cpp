// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/train/schedule.hpp"

#include "iags/common/error.hpp"

namespace iags::train {

double anneal(double start, double end, long iteration, long total)
{
    if (total < 1 || iteration < 0 || iteration > total)
        throw Error(ErrorCategory::InvalidInput, "anneal: need 0 <= iteration <= total and total >= 1");
    if (iteration == total)
        return end;
    const double f = static_cast<double>(iteration) / static_cast<double>(total);
    return (1.0 - f) * start + f * end;
}

std::vector<long> refinement_iterations(long total, long interval)
{
    if (interval < 1 || interval > total)
        throw Error(ErrorCategory::Config, "refine interval must lie in [1, total iterations]");
    std::vector<long> out;
    for (long k = interval; k <= total; k += interval)
        out.push_back(k);
    return out;
}

} // namespace iags::train
