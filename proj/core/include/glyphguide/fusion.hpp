#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "glyphguide/tensor.hpp"

namespace glyphguide {

inline constexpr int kExpandedChannels = 13;
inline constexpr int kFusedChannels = 16;  // 13 expanded + 3 modulated guidance
inline constexpr int kTrunkWidth = 8;
inline constexpr int kResidualUnits = 3;
/// Mask-branch output bias at identity initialization.
inline constexpr double kMaskGateBias = 4.0;

struct ResidualUnit {
    ad::Parameter reduce_w, reduce_b;    // 1x1, 16 -> 8
    ad::Parameter spatial_w, spatial_b;  // 3x3, 8 -> 8
    ad::Parameter restore_w, restore_b;  // 1x1, 8 -> 16
};

/// Trainable state of the fusion block.
///
/// expand:    1x1 conv 3 -> 13 on the decoded RGB
/// attention: trunk of three residual units and a sigmoid mask branch
///            (1x1 16 -> 16, relu, 1x1 16 -> 16), combined as
///            trunk * mask + input
/// project:   1x1 conv 16 -> 3
struct FusionParams {
    ad::Parameter expand_w, expand_b;
    std::array<ResidualUnit, kResidualUnits> trunk;
    ad::Parameter mask1_w, mask1_b;
    ad::Parameter mask2_w, mask2_b;
    ad::Parameter project_w, project_b;

    /// Every parameter in a fixed order.
    std::vector<ad::Parameter*> all();
    std::vector<const ad::Parameter*> all() const;
    std::size_t parameter_count() const;

    std::vector<ad::NamedTensor> to_named() const;
    /// Throws DecodeError when names or shapes do not match the block layout.
    static FusionParams from_named(const std::vector<ad::NamedTensor>& tensors);

    /// Deep copy with fresh leaves and optimizer state.
    FusionParams clone() const;
};

/// Parameter groups used when auditing gradient flow.
enum class FusionGroup { expand, trunk, mask, project };
FusionGroup group_of(const std::string& parameter_name);

/// Pass-through initialization. Expand copies RGB into its first three
/// channels (the other ten are N(0, 0.01^2)), every residual unit's final
/// conv is zero so the trunk is the identity, the mask branch outputs the
/// constant sigmoid(4), and project reads the copied channels scaled by
/// 1 / (1 + sigmoid(4)). The block therefore returns its decoded input for
/// any guidance.
FusionParams init_identity(std::uint64_t seed);

struct FusionOutput {
    ad::Tensor image;      // 3 x H x W, not clamped
    ad::Tensor attention;  // mask-branch activations, 16 x H x W
};

/// decoded, guidance: 3 x H x W. Throws ShapeError on mismatch.
FusionOutput fuse(const ad::Tensor& decoded, const ad::Tensor& guidance, const FusionParams& params);

/// Inference helper: fused output clamped to [0, 1].
Image fuse_image(const Image& decoded, const Image& guidance, const FusionParams& params);

}  // namespace glyphguide
