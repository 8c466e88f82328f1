// Copyright 2026 The scorelab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "scorelab/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "scorelab/errors.hpp"

namespace scorelab {

namespace {

Matrix sqrt_psd(const Matrix& c) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(c);
  const Vector ev = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
}

bool is_singular(const Matrix& c) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(c, Eigen::EigenvaluesOnly);
  const double top = std::max(eig.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  return eig.eigenvalues().minCoeff() <= 1e-14 * top;
}

double dist(const Batch& a, Eigen::Index i, const Batch& b, Eigen::Index j) {
  double s = 0.0;
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    const double d = a(r, i) - b(r, j);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

double frechet_distance(const Vector& mu1, const Matrix& c1, const Vector& mu2, const Matrix& c2) {
  const Matrix r1 = sqrt_psd(c1);
  Matrix inner = r1 * c2 * r1;
  inner = 0.5 * (inner + inner.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(inner, Eigen::EigenvaluesOnly);
  const double tr_sqrt = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::max(0.0, (mu1 - mu2).squaredNorm() + c1.trace() + c2.trace() - 2.0 * tr_sqrt);
}

FrechetResult frechet_gaussian(const Batch& real, const Batch& fake) {
  const Eigen::Index d = real.rows();
  if (fake.rows() != d) throw ShapeError("frechet_gaussian: sets differ in dimension");
  if (real.cols() < d + 1 || fake.cols() < d + 1)
    throw RangeError("frechet_gaussian: each set needs at least D + 1 points");
  auto fit = [](const Batch& x, Vector& mu, Matrix& c) {
    mu = x.rowwise().mean();
    const Batch centered = x.colwise() - mu;
    c = centered * centered.transpose() / static_cast<double>(x.cols() - 1);
  };
  Vector mr, mf;
  Matrix cr, cf;
  fit(real, mr, cr);
  fit(fake, mf, cf);
  FrechetResult out;
  const Matrix eye = Matrix::Identity(d, d);
  if (is_singular(cr)) {
    cr += 1e-9 * eye;
    out.regularized = true;
  }
  if (is_singular(cf)) {
    cf += 1e-9 * eye;
    out.regularized = true;
  }
  out.value = frechet_distance(mr, cr, mf, cf);
  return out;
}

DensityCoverage density_coverage(const Batch& real, const Batch& fake, int k) {
  const Eigen::Index nr = real.cols(), nf = fake.cols();
  if (real.rows() != fake.rows()) throw ShapeError("density_coverage: dimension mismatch");
  if (k < 1 || k >= nr) throw RangeError("density_coverage: need 1 <= k < n_real");
  if (nf < 1) throw RangeError("density_coverage: empty fake set");

  std::vector<double> radius(nr);
  std::vector<double> row(nr - 1);
  for (Eigen::Index i = 0; i < nr; ++i) {
    Eigen::Index w = 0;
    for (Eigen::Index j = 0; j < nr; ++j)
      if (j != i) row[w++] = dist(real, i, real, j);
    std::nth_element(row.begin(), row.begin() + (k - 1), row.end());
    radius[i] = row[k - 1];
  }

  long inside = 0;
  std::vector<char> covered(nr, 0);
  for (Eigen::Index j = 0; j < nf; ++j)
    for (Eigen::Index i = 0; i < nr; ++i)
      if (dist(fake, j, real, i) <= radius[i]) {
        ++inside;
        covered[i] = 1;
      }
  DensityCoverage out;
  out.density = static_cast<double>(inside) / (static_cast<double>(k) * nf);
  out.coverage = static_cast<double>(std::count(covered.begin(), covered.end(), 1)) / nr;
  return out;
}

double assignment_entropy(const Batch& fake, const GaussianMixture& target) {
  if (fake.cols() < 1) throw RangeError("assignment_entropy: empty sample set");
  const MarginalMixture mm(0.0, target.weights, target.means, target.covariances);
  std::vector<long> counts(target.size(), 0);
  for (Eigen::Index j = 0; j < fake.cols(); ++j) {
    Eigen::Index best;
    mm.component_posterior(fake.col(j)).maxCoeff(&best);
    ++counts[best];
  }
  double h = 0.0;
  for (long c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / fake.cols();
    h -= p * std::log(p);
  }
  return h;
}

MetricReport evaluate_metrics(const Batch& real, const Batch& fake, const GaussianMixture& target,
                              int k) {
  MetricReport r;
  const FrechetResult fr = frechet_gaussian(real, fake);
  r.frechet = fr.value;
  r.frechet_regularized = fr.regularized;
  const DensityCoverage dc = density_coverage(real, fake, k);
  r.density = dc.density;
  r.coverage = dc.coverage;
  r.entropy = assignment_entropy(fake, target);
  r.k_neighbors = k;
  r.n_real = static_cast<int>(real.cols());
  r.n_fake = static_cast<int>(fake.cols());
  return r;
}

}  // namespace scorelab
