// Copyright 2026 The byzpgd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "byzpgd/problems.h"

#include <algorithm>
#include <string>

#include "byzpgd/linalg.h"

namespace byzpgd {

void ProblemMeta::validate() const {
  if (dim < 1) throw ConfigError("ProblemMeta: dim must be >= 1");
  if (!(smoothness > 0.0) || !std::isfinite(smoothness)) {
    throw ConfigError("ProblemMeta: smoothness L_F must be > 0");
  }
  if (!(hessian_lipschitz > 0.0) || !std::isfinite(hessian_lipschitz)) {
    throw ConfigError("ProblemMeta: hessian_lipschitz rho_F must be > 0");
  }
  if (!(initial_gap >= 0.0) || !std::isfinite(initial_gap)) {
    throw ConfigError("ProblemMeta: initial_gap must be >= 0");
  }
}

double Problem::value(const ParamVector& w) const {
  require_dim(w, dim(), name() + " value");
  require_finite(w, "iterate");
  return value_impl(w);
}

ParamVector Problem::grad(const ParamVector& w) const {
  require_dim(w, dim(), name() + " grad");
  require_finite(w, "iterate");
  return grad_impl(w);
}

Matrix Problem::hessian(const ParamVector& w) const {
  require_dim(w, dim(), name() + " hessian");
  require_finite(w, "iterate");
  return hessian_impl(w);
}

double Problem::hessian_min_eig(const ParamVector& w) const {
  return min_eigenvalue(hessian(w));
}

ProblemMeta Problem::meta_at(const ParamVector& w0) const {
  ProblemMeta meta;
  meta.dim = dim();
  meta.smoothness = smoothness();
  meta.hessian_lipschitz = hessian_lipschitz();
  meta.initial_gap = std::max(0.0, value(w0) - min_value());
  return meta;
}

ParamVector Problem::draw_sample(Rng& rng) const {
  return sample_mean() + sample_gaussian(rng, sample_dim(), sample_sigma());
}

ParamVector Problem::sample_grad(const ParamVector& w,
                                 const ParamVector& z) const {
  require_dim(w, dim(), name() + " sample_grad");
  require_dim(z, sample_dim(), name() + " sample");
  return sample_grad_impl(w, z);
}

// Additive noise model: f(w; z) = F(w) + <z - E z, w>.
ParamVector Problem::sample_grad_impl(const ParamVector& w,
                                      const ParamVector& z) const {
  return grad_impl(w) + (z - sample_mean());
}

// convex_1d

double Convex1d::value_impl(const ParamVector& w) const {
  const double t = w[0] - 1.0;
  return t * t;
}

ParamVector Convex1d::grad_impl(const ParamVector& w) const {
  return ParamVector::Constant(1, 2.0 * (w[0] - 1.0));
}

Matrix Convex1d::hessian_impl(const ParamVector&) const {
  return Matrix::Constant(1, 1, 2.0);
}

// quartic_1d

Quartic1d::Quartic1d(double clamp, double sigma) : clamp_(clamp), sigma_(sigma) {
  if (!(clamp > 0.0)) throw ConfigError("quartic_1d: clamp must be > 0");
}

double Quartic1d::smoothness() const {
  return std::max(3.0 * clamp_ * clamp_ - 1.0, 1.0);
}

namespace {

double quartic_f(double w) { return (w * w - 1.0) * (w * w - 1.0) / 4.0; }
double quartic_df(double w) { return w * w * w - w; }
double quartic_d2f(double w) { return 3.0 * w * w - 1.0; }

}  // namespace

double Quartic1d::value_impl(const ParamVector& w) const {
  const double x = w[0];
  if (std::abs(x) <= clamp_) return quartic_f(x);
  const double c = std::copysign(clamp_, x);
  const double s = x - c;
  return quartic_f(c) + quartic_df(c) * s + 0.5 * quartic_d2f(c) * s * s;
}

ParamVector Quartic1d::grad_impl(const ParamVector& w) const {
  const double x = w[0];
  if (std::abs(x) <= clamp_) return ParamVector::Constant(1, quartic_df(x));
  const double c = std::copysign(clamp_, x);
  return ParamVector::Constant(1, quartic_df(c) + quartic_d2f(c) * (x - c));
}

Matrix Quartic1d::hessian_impl(const ParamVector& w) const {
  const double x = std::clamp(w[0], -clamp_, clamp_);
  return Matrix::Constant(1, 1, quartic_d2f(x));
}

// saddle_2d

ClampedSaddle2d::ClampedSaddle2d(double lambda, double b, double kappa,
                                 double sigma)
    : lambda_(lambda), b_(b), kappa_(kappa), sigma_(sigma) {
  if (!(lambda > 0.0)) throw ConfigError("saddle_2d: lambda must be > 0");
  if (!(b > 0.0)) throw ConfigError("saddle_2d: b must be > 0");
  if (!(kappa > 0.0)) throw ConfigError("saddle_2d: kappa must be > 0");
}

double ClampedSaddle2d::smoothness() const {
  return std::max({1.0, lambda_, kappa_});
}

double ClampedSaddle2d::phi(double t) const {
  const double a = std::abs(t);
  const double lk = lambda_ + kappa_;
  if (a <= b_) return -0.5 * lambda_ * a * a;
  if (a <= 2.0 * b_) {
    const double u = a - b_;
    return -0.5 * lambda_ * b_ * b_ - lambda_ * b_ * u - 0.5 * lambda_ * u * u +
           lk * u * u * u / (6.0 * b_);
  }
  const double s = a - 2.0 * b_;
  const double phi2 = -2.0 * lambda_ * b_ * b_ + lk * b_ * b_ / 6.0;
  const double dphi2 = 0.5 * b_ * (kappa_ - 3.0 * lambda_);
  return phi2 + dphi2 * s + 0.5 * kappa_ * s * s;
}

double ClampedSaddle2d::phi_prime(double t) const {
  const double a = std::abs(t);
  const double lk = lambda_ + kappa_;
  double d;
  if (a <= b_) {
    d = -lambda_ * a;
  } else if (a <= 2.0 * b_) {
    const double u = a - b_;
    d = -lambda_ * b_ - lambda_ * u + lk * u * u / (2.0 * b_);
  } else {
    d = 0.5 * b_ * (kappa_ - 3.0 * lambda_) + kappa_ * (a - 2.0 * b_);
  }
  return std::copysign(1.0, t) * d;
}

double ClampedSaddle2d::phi_second(double t) const {
  const double a = std::abs(t);
  if (a <= b_) return -lambda_;
  if (a <= 2.0 * b_) return -lambda_ + (lambda_ + kappa_) * (a - b_) / b_;
  return kappa_;
}

double ClampedSaddle2d::minimizer_offset() const {
  const double lk = lambda_ + kappa_;
  if (kappa_ < 3.0 * lambda_) {
    return 2.0 * b_ + b_ * (3.0 * lambda_ - kappa_) / (2.0 * kappa_);
  }
  const double u =
      b_ * (lambda_ + std::sqrt(lambda_ * lambda_ + 2.0 * lambda_ * lk)) / lk;
  return b_ + u;
}

double ClampedSaddle2d::min_value() const { return phi(minimizer_offset()); }

double ClampedSaddle2d::value_impl(const ParamVector& w) const {
  return 0.5 * w[0] * w[0] + phi(w[1]);
}

ParamVector ClampedSaddle2d::grad_impl(const ParamVector& w) const {
  ParamVector g(2);
  g << w[0], phi_prime(w[1]);
  return g;
}

Matrix ClampedSaddle2d::hessian_impl(const ParamVector& w) const {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 0) = 1.0;
  h(1, 1) = phi_second(w[1]);
  return h;
}

// mean_estimation

MeanEstimation::MeanEstimation(ParamVector mu, double sigma)
    : mu_(std::move(mu)), sigma_(sigma) {
  if (mu_.size() < 1) throw ConfigError("mean_estimation: dim must be >= 1");
  require_finite(mu_, "mean_estimation mu");
}

double MeanEstimation::min_value() const {
  return 0.5 * static_cast<double>(mu_.size()) * sigma_ * sigma_;
}

double MeanEstimation::value_impl(const ParamVector& w) const {
  return 0.5 * (w - mu_).squaredNorm() + min_value();
}

ParamVector MeanEstimation::grad_impl(const ParamVector& w) const {
  return w - mu_;
}

Matrix MeanEstimation::hessian_impl(const ParamVector&) const {
  return Matrix::Identity(mu_.size(), mu_.size());
}

ParamVector MeanEstimation::sample_grad_impl(const ParamVector& w,
                                             const ParamVector& z) const {
  return w - z;
}

// sine_1d

SineFamily1d::SineFamily1d(double delta, double phase, double sigma)
    : delta_(delta), phase_(phase), sigma_(sigma) {
  if (!(delta > 0.0)) throw ConfigError("sine_1d: delta must be > 0");
}

double SineFamily1d::value_impl(const ParamVector& w) const {
  return delta_ * std::sqrt(delta_) *
         std::sin(w[0] / std::sqrt(delta_) + phase_);
}

ParamVector SineFamily1d::grad_impl(const ParamVector& w) const {
  return ParamVector::Constant(
      1, delta_ * std::cos(w[0] / std::sqrt(delta_) + phase_));
}

Matrix SineFamily1d::hessian_impl(const ParamVector& w) const {
  return Matrix::Constant(
      1, 1, -std::sqrt(delta_) * std::sin(w[0] / std::sqrt(delta_) + phase_));
}

std::unique_ptr<Problem> make_problem(const ProblemParams& p) {
  if (!(p.sigma >= 0.0) || !std::isfinite(p.sigma)) {
    throw ConfigError("problem: sigma must be >= 0");
  }
  if (p.name == "convex_1d") return std::make_unique<Convex1d>(p.sigma);
  if (p.name == "quartic_1d") return std::make_unique<Quartic1d>(p.clamp, p.sigma);
  if (p.name == "saddle_2d") {
    return std::make_unique<ClampedSaddle2d>(p.lambda, p.b, p.kappa, p.sigma);
  }
  if (p.name == "sine_1d") {
    return std::make_unique<SineFamily1d>(p.delta, p.phase, p.sigma);
  }
  if (p.name == "mean_estimation") {
    Eigen::Index dim = p.dim;
    if (dim < 0) throw ConfigError("mean_estimation: dim must be >= 1");
    if (!p.mu.empty()) {
      if (dim != 0 && dim != static_cast<Eigen::Index>(p.mu.size())) {
        throw ConfigError("mean_estimation: mu has " +
                          std::to_string(p.mu.size()) +
                          " entries but dim is " + std::to_string(dim));
      }
      dim = static_cast<Eigen::Index>(p.mu.size());
    }
    if (dim < 1) throw ConfigError("mean_estimation: dim must be >= 1");
    ParamVector mu = ParamVector::Zero(dim);
    for (std::size_t i = 0; i < p.mu.size(); ++i) {
      mu[static_cast<Eigen::Index>(i)] = p.mu[i];
    }
    return std::make_unique<MeanEstimation>(std::move(mu), p.sigma);
  }
  throw ConfigError("unknown problem '" + p.name +
                    "' (expected convex_1d, quartic_1d, saddle_2d, "
                    "mean_estimation or sine_1d)");
}

}  // namespace byzpgd
