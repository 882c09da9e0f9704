// tests/support/gradient_check.hpp

// Copyright 2026  svkit authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Central finite-difference verification of the pooling gradients.  The
// checked scalar is upstream . pool_forward(H); the reported error is the
// largest |analytic - fd| over all frame and parameter entries, scaled by
// max(1, largest |fd|).

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "svkit/pooling.hpp"

namespace test_util {

inline double pool_gradient_max_error(const svkit::Matrix& h,
                                      svkit::PoolingMode mode,
                                      const svkit::AttentionParams* params,
                                      svkit::Rng& rng, double step = 1e-5) {
  using svkit::AttentionParams;
  using svkit::Matrix;
  using svkit::Vector;

  const Vector out = svkit::pool_forward(h, mode, params);
  const Vector upstream = rng.gaussian_vector(out.size());
  const svkit::PoolGradients grads =
      svkit::pool_backward(h, mode, params, upstream);

  std::vector<std::pair<double, double>> pairs;  // (analytic, fd)

  auto scalar = [&](const Matrix& hh, const AttentionParams* pp) {
    return upstream.dot(svkit::pool_forward(hh, mode, pp));
  };

  Matrix hp = h;
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      hp(i, j) = h(i, j) + step;
      const double f_plus = scalar(hp, params);
      hp(i, j) = h(i, j) - step;
      const double f_minus = scalar(hp, params);
      hp(i, j) = h(i, j);
      pairs.push_back({grads.dh(i, j), (f_plus - f_minus) / (2.0 * step)});
    }
  }

  if (svkit::pooling_needs_params(mode)) {
    AttentionParams pp = *params;
    auto check_matrix = [&](Matrix& block, const Matrix& analytic) {
      for (Eigen::Index i = 0; i < block.rows(); ++i)
        for (Eigen::Index j = 0; j < block.cols(); ++j) {
          const double saved = block(i, j);
          block(i, j) = saved + step;
          const double f_plus = scalar(h, &pp);
          block(i, j) = saved - step;
          const double f_minus = scalar(h, &pp);
          block(i, j) = saved;
          pairs.push_back(
              {analytic(i, j), (f_plus - f_minus) / (2.0 * step)});
        }
    };
    auto check_vector = [&](Vector& block, const Vector& analytic) {
      for (Eigen::Index i = 0; i < block.size(); ++i) {
        const double saved = block[i];
        block[i] = saved + step;
        const double f_plus = scalar(h, &pp);
        block[i] = saved - step;
        const double f_minus = scalar(h, &pp);
        block[i] = saved;
        pairs.push_back({analytic[i], (f_plus - f_minus) / (2.0 * step)});
      }
    };
    if (mode == svkit::PoolingMode::kAttentionGated) {
      check_matrix(pp.gate_w, grads.dparams.gate_w);
      check_vector(pp.gate_b, grads.dparams.gate_b);
      check_vector(pp.gate_u, grads.dparams.gate_u);
    } else {
      check_matrix(pp.w, grads.dparams.w);
      check_vector(pp.b, grads.dparams.b);
      check_vector(pp.v, grads.dparams.v);
    }
  }

  double max_fd = 0.0;
  for (const auto& [a, fd] : pairs) max_fd = std::max(max_fd, std::abs(fd));
  const double denom = std::max(1.0, max_fd);
  double max_err = 0.0;
  for (const auto& [a, fd] : pairs)
    max_err = std::max(max_err, std::abs(a - fd));
  return max_err / denom;
}

}  // namespace test_util
