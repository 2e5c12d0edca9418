#include "safa/channel_mapping.hpp"

#include "safa/errors.hpp"

namespace safa {
namespace {

// Channels as rows, spatial sites as columns.
Eigen::MatrixXd site_matrix(const LatentMap& m) {
  const auto C = static_cast<Eigen::Index>(m.channels());
  const auto N = static_cast<Eigen::Index>(m.height() * m.width());
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      m.data().data(), C, N);
}

LatentMap from_site_matrix(const Eigen::MatrixXd& s, std::size_t height, std::size_t width) {
  LatentMap out(static_cast<std::size_t>(s.rows()), height, width);
  const auto N = static_cast<Eigen::Index>(height * width);
  for (Eigen::Index c = 0; c < s.rows(); ++c) {
    for (Eigen::Index i = 0; i < N; ++i) {
      out.data()[static_cast<std::size_t>(c * N + i)] = s(c, i);
    }
  }
  return out;
}

}  // namespace

ChannelMapping fit_channel_mapping(const LatentMap& x_down, const LatentMap& z) {
  if (x_down.height() != z.height() || x_down.width() != z.width()) {
    throw ShapeError("fit_channel_mapping: spatial dimensions differ");
  }
  const Eigen::MatrixXd X = site_matrix(x_down);
  const Eigen::MatrixXd Z = site_matrix(z);
  // Solve Z^T W^T = X^T in the least-squares sense.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z.transpose());
  if (qr.rank() < Z.rows()) {
    throw RankError("latent site matrix is rank deficient (rank " + std::to_string(qr.rank()) +
                    " < " + std::to_string(Z.rows()) + ")");
  }
  ChannelMapping m;
  m.W = qr.solve(X.transpose()).transpose();
  const double xn = X.norm();
  m.fit_residual = xn > 0.0 ? (X - m.W * Z).norm() / xn : 0.0;
  return m;
}

LatentMap invert_channel_mapping(const ChannelMapping& mapping, const LatentMap& x_down) {
  const Eigen::MatrixXd& W = mapping.W;
  if (static_cast<std::size_t>(W.rows()) != x_down.channels()) {
    throw ShapeError("invert_channel_mapping: channel count does not match W");
  }
  const Eigen::MatrixXd G = W.transpose() * W;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
  if (!lu.isInvertible()) throw SingularError("W^T W is singular");
  const Eigen::MatrixXd Z = lu.solve(W.transpose() * site_matrix(x_down));
  return from_site_matrix(Z, x_down.height(), x_down.width());
}

LatentMap apply_channel_mapping(const Eigen::MatrixXd& W, const LatentMap& z) {
  if (static_cast<std::size_t>(W.cols()) != z.channels()) {
    throw ShapeError("apply_channel_mapping: channel count does not match W");
  }
  return from_site_matrix(W * site_matrix(z), z.height(), z.width());
}

LatentMap downsample(const LatentMap& x, std::size_t factor) {
  if (factor == 0 || x.height() % factor != 0 || x.width() % factor != 0) {
    throw ShapeError("downsample: dimensions not divisible by factor");
  }
  const std::size_t H = x.height() / factor, W = x.width() / factor;
  LatentMap out(x.channels(), H, W);
  const double inv = 1.0 / static_cast<double>(factor * factor);
  for (std::size_t c = 0; c < x.channels(); ++c) {
    for (std::size_t h = 0; h < H; ++h) {
      for (std::size_t w = 0; w < W; ++w) {
        double s = 0.0;
        for (std::size_t i = 0; i < factor; ++i) {
          for (std::size_t j = 0; j < factor; ++j) s += x(c, h * factor + i, w * factor + j);
        }
        out(c, h, w) = s * inv;
      }
    }
  }
  return out;
}

}  // namespace safa
