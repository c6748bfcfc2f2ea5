#include <Eigen/Dense>
#include <cmath>

#include "hsigan/data/hsi.hpp"

namespace hsigan::data {

PixelFeatures pca3(const HsiCube& cube) {
  const std::size_t B = cube.bands;
  const std::size_t N = cube.pixels();
  if (B < 3) throw ContractError("pca3 needs at least 3 bands, got " + std::to_string(B));
  if (N < 2) throw ContractError("pca3 needs at least 2 pixels");

  Eigen::MatrixXd X(N, B);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t b = 0; b < B; ++b) X(i, b) = cube.radiance[i * B + b];
  }
  const Eigen::RowVectorXd mean = X.colwise().mean();
  X.rowwise() -= mean;
  const Eigen::MatrixXd cov = (X.transpose() * X) / static_cast<double>(N - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericError("band covariance eigensolver failed");

  PixelFeatures f;
  f.height = cube.height;
  f.width = cube.width;
  f.projection.assign(B * 3, 0.0);
  Eigen::MatrixXd V(B, 3);
  for (int k = 0; k < 3; ++k) {
    // Eigen sorts ascending; component k is the (k+1)-th largest.
    const Eigen::Index col = static_cast<Eigen::Index>(B) - 1 - k;
    Eigen::VectorXd v = eig.eigenvectors().col(col);
    Eigen::Index arg = 0;
    for (Eigen::Index b = 1; b < v.size(); ++b) {
      if (std::abs(v(b)) > std::abs(v(arg))) arg = b;
    }
    if (v(arg) < 0) v = -v;
    V.col(k) = v;
    f.eigenvalues[k] = eig.eigenvalues()(col);
    for (std::size_t b = 0; b < B; ++b) f.projection[b + B * k] = v(b);
  }

  const Eigen::MatrixXd P = X * V;
  f.appearance.resize(N);
  for (int k = 0; k < 3; ++k) {
    const double m = P.col(k).mean();
    const double sd = std::sqrt((P.col(k).array() - m).square().mean());
    for (std::size_t i = 0; i < N; ++i) {
      f.appearance[i][k] = sd > 0.0 ? (P(i, k) - m) / sd : 0.0;
    }
  }
  return f;
}

}  // namespace hsigan::data
