// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/train/gs_loss.hpp"

#include "iags/common/error.hpp"
#include "iags/train/pearson.hpp"

#include <cmath>
#include <vector>

namespace iags::train {

GsLossResult gs_loss(const ColorImage& render, const ColorImage& refined, const ColorImage& initial, const Mask& mlp,
                     const Mask& refine_mask, const ScalarMap& rendered_depth, const ScalarMap& cond_depth,
                     const GsLossWeights& weights)
{
    if (!render.same_shape(refined) || !render.same_shape(initial) || !render.same_shape(mlp) ||
        !render.same_shape(refine_mask) || !render.same_shape(rendered_depth) || !render.same_shape(cond_depth) ||
        render.channels() != 3 || refined.channels() != 3 || initial.channels() != 3)
        throw Error(ErrorCategory::InvalidInput, "gs_loss: map dimensions differ");

    const int w = render.width();
    const int h = render.height();
    const std::size_t npix = render.pixel_count();
    const double inv = 1.0 / (3.0 * static_cast<double>(npix));
    GsLossResult out{{}, make_color(w, h), make_scalar(w, h)};

    double l2 = 0.0, l1 = 0.0;
    for (std::size_t p = 0; p < npix; ++p) {
        const bool in_union = mlp[p] || refine_mask[p];
        for (int c = 0; c < 3; ++c) {
            const std::size_t i = p * 3 + c;
            if (in_union) {
                const double d = render[i] - refined[i];
                l2 += d * d;
                out.grad_color[i] = weights.l2 * 2.0 * d * inv;
            } else {
                const double d = render[i] - initial[i];
                l1 += std::abs(d);
                out.grad_color[i] = weights.l1 * (d > 0.0 ? inv : (d < 0.0 ? -inv : 0.0));
            }
        }
    }
    out.terms.l2 = l2 * inv;
    out.terms.l1 = l1 * inv;

    std::vector<double> x, y;
    std::vector<std::size_t> where;
    for (std::size_t p = 0; p < npix; ++p) {
        if (std::isfinite(cond_depth[p]) && std::isfinite(rendered_depth[p])) {
            x.push_back(cond_depth[p]);
            y.push_back(rendered_depth[p]);
            where.push_back(p);
        }
    }
    if (x.size() >= 2) {
        const PearsonResult r = pearson(x, y);
        out.terms.pearson = r.value;
        out.terms.zero_variance = r.zero_variance;
        const std::vector<double> g = pearson_grad_y(x, y);
        for (std::size_t k = 0; k < where.size(); ++k)
            out.grad_depth[where[k]] = -weights.depth * g[k];
    } else {
        out.terms.zero_variance = true;
    }
    out.terms.total = weights.l2 * out.terms.l2 + weights.l1 * out.terms.l1 - weights.depth * out.terms.pearson;
    return out;
}

} // namespace iags::train
