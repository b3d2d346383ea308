// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/common/image.hpp"

#include "iags/common/error.hpp"

#include <algorithm>

namespace iags {

namespace {

void require_same(const Mask& a, const Mask& b)
{
    if (!a.same_shape(b))
        throw Error(ErrorCategory::InvalidInput, "mask dimension mismatch");
}

} // namespace

Mask mask_not(const Mask& m)
{
    Mask out(m.width(), m.height(), 1);
    for (std::size_t i = 0; i < m.size(); ++i)
        out[i] = m[i] ? 0 : 1;
    return out;
}

Mask mask_or(const Mask& a, const Mask& b)
{
    require_same(a, b);
    Mask out(a.width(), a.height(), 1);
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = (a[i] || b[i]) ? 1 : 0;
    return out;
}

Mask mask_and(const Mask& a, const Mask& b)
{
    require_same(a, b);
    Mask out(a.width(), a.height(), 1);
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = (a[i] && b[i]) ? 1 : 0;
    return out;
}

std::size_t mask_count(const Mask& m)
{
    return static_cast<std::size_t>(std::count_if(m.storage().begin(), m.storage().end(), [](std::uint8_t v) { return v != 0; }));
}

bool mask_subset(const Mask& inner, const Mask& outer)
{
    require_same(inner, outer);
    for (std::size_t i = 0; i < inner.size(); ++i)
        if (inner[i] && !outer[i])
            return false;
    return true;
}

} // namespace iags
