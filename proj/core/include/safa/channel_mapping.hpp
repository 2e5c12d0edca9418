#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "safa/latent_map.hpp"

namespace safa {

struct ChannelMapping {
  Eigen::MatrixXd W;  // C_x x C_z
  double fit_residual = 0.0;
};

// Least squares X_down ~ W Z treating every spatial site as one observation.
// RankError when the Z site matrix is rank deficient.
ChannelMapping fit_channel_mapping(const LatentMap& x_down, const LatentMap& z);

// Z = (W^T W)^-1 W^T X_down per site. SingularError when W^T W is singular.
LatentMap invert_channel_mapping(const ChannelMapping& mapping, const LatentMap& x_down);

// Applies W per site: out = W z.
LatentMap apply_channel_mapping(const Eigen::MatrixXd& W, const LatentMap& z);

// Non-overlapping factor x factor average pooling.
LatentMap downsample(const LatentMap& x, std::size_t factor);

}  // namespace safa
