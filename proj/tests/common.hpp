#pragma once

#include <random>
#include <vector>

#include "stolqr/sysmodel.hpp"

namespace testing {

using stolqr::Matrix;
using stolqr::Vector;

inline Matrix from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

/// Two-state PWM inverter with one multiplicative channel.
inline stolqr::StochasticSystem pwm_inverter() {
  stolqr::StochasticSystem s;
  s.A = from_rows({{0.6929, 8.6545}, {-0.0241, 0.8603}});
  s.B = from_rows({{0.1290}, {0.0267}});
  s.channels.push_back({from_rows({{0.01, 0.02}, {-0.001, 0.05}}), from_rows({{-0.02}, {0.005}})});
  s.sigma = 1.0;
  s.Sigma = Matrix::Identity(2, 2);
  s.Q = Matrix::Identity(2, 2);
  s.R = Matrix::Constant(1, 1, 1e-5);
  s.alpha = 0.5;
  s.x0_mean = Vector(2);
  s.x0_mean << 1.0, 2.0;
  s.x0_cov = 5.0 * Matrix::Identity(2, 2);
  return s;
}

inline Matrix random_matrix(std::mt19937_64& rng, int r, int c, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Matrix m(r, c);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) m(i, j) = nd(rng);
  }
  return m;
}

inline Matrix random_spd(std::mt19937_64& rng, int n, double shift = 0.5) {
  const Matrix g = random_matrix(rng, n, n);
  return g * g.transpose() / n + shift * Matrix::Identity(n, n);
}

/// Random system with `channels` multiplicative channels; A is scaled so its
/// spectral radius is `radius`.
inline stolqr::StochasticSystem random_system(std::mt19937_64& rng, int n, int m, int channels,
                                              double radius = 0.9, double chan_scale = 0.2) {
  stolqr::StochasticSystem s;
  s.A = random_matrix(rng, n, n);
  const double rho = s.A.eigenvalues().cwiseAbs().maxCoeff();
  s.A *= radius / rho;
  s.B = random_matrix(rng, n, m);
  for (int l = 0; l < channels; ++l) {
    s.channels.push_back({random_matrix(rng, n, n, chan_scale), random_matrix(rng, n, m, chan_scale)});
  }
  s.sigma = 1.0;
  s.Sigma = random_spd(rng, n);
  s.Q = random_spd(rng, n);
  s.R = random_spd(rng, m);
  s.alpha = 0.8;
  s.x0_mean = random_matrix(rng, n, 1);
  s.x0_cov = random_spd(rng, n);
  return s;
}

}  // namespace testing
