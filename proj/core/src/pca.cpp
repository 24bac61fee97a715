/*
 * Copyright (c) 2026, The coordet Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "coordet/embed.hpp"
#include "coordet/error.hpp"

namespace coordet {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

PcaResult pca_reduce(const EmbeddingMatrix& m, std::size_t target_dim) {
  const std::size_t n = m.rows();
  const std::size_t d = m.dim();
  if (target_dim == 0 || target_dim > std::min(n, d))
    throw Error(ErrorKind::InvalidArgument, "pca target_dim " + std::to_string(target_dim) +
                                                " must be in [1, min(rows, dim)] = [1, " +
                                                std::to_string(std::min(n, d)) + "]");

  const Eigen::Map<const RowMatrix> x(m.values().data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  const Eigen::RowVectorXd mu = x.colwise().mean();
  const RowMatrix centered = x.rowwise() - mu;
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / denom;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::InvalidArgument, "covariance eigendecomposition failed");
  // Eigen sorts ascending; walk from the back.
  const Eigen::VectorXd& evals = solver.eigenvalues();
  const Eigen::MatrixXd& evecs = solver.eigenvectors();
  const auto last = static_cast<Eigen::Index>(d) - 1;

  double total_variance = 0.0;
  for (Eigen::Index i = 0; i <= last; ++i) total_variance += std::max(0.0, evals(i));
  const double top = std::max(0.0, evals(last));
  const double tol = std::max(top * static_cast<double>(d) * 1e-12, 1e-300);

  PcaResult result;
  result.mean.assign(mu.data(), mu.data() + d);
  result.components.assign(target_dim * d, 0.0);
  result.explained_variance.assign(target_dim, 0.0);
  result.explained_variance_ratio.assign(target_dim, 0.0);

  for (std::size_t k = 0; k < target_dim; ++k) {
    const Eigen::Index col = last - static_cast<Eigen::Index>(k);
    const double lambda = evals(col);
    if (!(lambda > tol)) {
      ++result.padded;
      continue;
    }
    ++result.rank;
    Eigen::VectorXd v = evecs.col(col);
    // Deterministic sign: the largest-magnitude entry is positive.
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    std::copy(v.data(), v.data() + d, result.components.begin() + static_cast<std::ptrdiff_t>(k * d));
    result.explained_variance[k] = lambda;
    result.explained_variance_ratio[k] = total_variance > 0 ? lambda / total_variance : 0.0;
  }

  const Eigen::Map<const RowMatrix> w(result.components.data(), static_cast<Eigen::Index>(target_dim),
                                      static_cast<Eigen::Index>(d));
  RowMatrix projected = centered * w.transpose();
  std::vector<double> values(projected.data(), projected.data() + n * target_dim);
  result.reduced = EmbeddingMatrix(m.row_ids(), target_dim, std::move(values));
  return result;
}

EmbeddingMatrix reduce_to_width(const EmbeddingMatrix& m, std::size_t target_dim) {
  const std::size_t k = std::min({target_dim, m.rows(), m.dim()});
  EmbeddingMatrix out(m.row_ids(), target_dim);
  if (k == 0) return out;
  const PcaResult pca = pca_reduce(m, k);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto src = pca.reduced.row(r);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

EmbeddingMatrix l2_normalize_rows(const EmbeddingMatrix& m) {
  EmbeddingMatrix out = m;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    const double norm = std::sqrt(dot(row, row));
    if (norm > 0)
      for (double& v : row) v /= norm;
  }
  return out;
}

EmbeddingMatrix align_single(const EmbeddingMatrix& m, std::size_t target_dim) {
  return l2_normalize_rows(reduce_to_width(m, target_dim));
}

EmbeddingMatrix concat_align(const EmbeddingMatrix& text, const EmbeddingMatrix& network, std::size_t target_dim) {
  if (text.rows() != network.rows())
    throw Error(ErrorKind::RowMismatch, "text has " + std::to_string(text.rows()) + " rows, network has " +
                                            std::to_string(network.rows()));
  EmbeddingMatrix net_aligned;
  try {
    net_aligned = network.select(text.row_ids());
  } catch (const MissingRows& e) {
    throw Error(ErrorKind::RowMismatch, std::string("network embedding lacks rows: ") + e.what());
  }
  const EmbeddingMatrix a = align_single(text, target_dim);
  const EmbeddingMatrix b = align_single(net_aligned, target_dim);
  std::vector<double> values;
  values.reserve(text.rows() * 2 * target_dim);
  for (std::size_t r = 0; r < text.rows(); ++r) {
    const auto ra = a.row(r);
    const auto rb = b.row(r);
    values.insert(values.end(), ra.begin(), ra.end());
    values.insert(values.end(), rb.begin(), rb.end());
  }
  return EmbeddingMatrix(text.row_ids(), 2 * target_dim, std::move(values));
}

}  // namespace coordet
