// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "iags/common/image.hpp"
#include "iags/geometry/camera.hpp"
#include "iags/geometry/point_cloud.hpp"
#include "iags/pipeline/config.hpp"
#include "iags/pipeline/synthetic.hpp"
#include "iags/splat/splat.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace iags::pipeline {

/// "<prefix>_####.png"
std::string frame_file(const std::string& prefix, std::size_t index);

// Dataset directory:
//   trajectory.txt, frames/frame_####.png      always
//   gt/frame_####.png, gt/depth_####.png       ground truth, when known
//   regions.txt ("view x0 y0 x1 y1" lines)     corruption rectangles, when known
//   scene.txt                                  ground-truth splat field, when known
struct Dataset {
    std::vector<geometry::CameraView> cams;
    std::vector<ColorImage> frames;
    std::vector<ColorImage> gt_frames;
    std::vector<ScalarMap> gt_depth;
    std::vector<CorruptRegion> regions;
    std::optional<splat::SplatField> gt_field;

    bool has_ground_truth() const { return gt_frames.size() == cams.size() && gt_depth.size() == cams.size(); }
    std::vector<Mask> region_masks() const;
};

Dataset dataset_from_scene(const SyntheticScene& scene);
void write_dataset(const std::filesystem::path& dir, const Dataset& dataset, double depth_scale);
/// Throws Io naming the first missing file.
Dataset read_dataset(const std::filesystem::path& dir, double depth_scale);

// Initialization directory:
//   points.txt, reference_points.txt, field.txt
//   initial/frame_####.png                     I^init
//   renders/frame_####.png, renders/depth_####.png
//   masks/pix_####.png, masks/occ_####.png, masks/refine_####.png
struct InitOutputs {
    geometry::PointCloud reference_cloud;
    geometry::PointCloud cloud;
    splat::SplatField field;
    std::vector<ColorImage> initial;
    std::vector<geometry::PosedRender> renders;
    std::vector<Mask> pix_masks;
    std::vector<Mask> occlusion_masks;
    std::vector<Mask> refine_masks;
};

void write_init(const std::filesystem::path& dir, const InitOutputs& init, double depth_scale);
/// Loads what training needs (field, I^init, occlusion and refine masks); Precondition error if absent.
InitOutputs read_init(const std::filesystem::path& dir, std::size_t views);

/// One splat per occupied cell of the coarsest-first voxel grid that keeps at most `max_splats` cells:
/// mean and color are cell averages, isotropic scale half the cell size.
splat::SplatField field_from_points(const geometry::PointCloud& cloud, long max_splats, double opacity,
                                    const Eigen::Vector3d& background);

} // namespace iags::pipeline
