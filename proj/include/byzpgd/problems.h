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

#ifndef BYZPGD_PROBLEMS_H_
#define BYZPGD_PROBLEMS_H_

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "byzpgd/rng.h"
#include "byzpgd/types.h"

namespace byzpgd {

/// Constants that feed parameter derivation.
struct ProblemMeta {
  Eigen::Index dim = 0;
  double smoothness = 0.0;         // L_F
  double hessian_lipschitz = 0.0;  // rho_F
  double initial_gap = 0.0;        // F(w0) - F*

  void validate() const;
};

/// i.i.d. draws held by one worker, one row per data point.
struct SampleSet {
  Matrix samples;
  ParamVector mean;  // distribution mean of z
  double sigma = 0.0;

  Eigen::Index size() const { return samples.rows(); }
};

/// Analytic population loss F with closed-form gradient and Hessian, plus the
/// per-sample statistical model used by the worker simulation.
///
/// The declared smoothness and Hessian-Lipschitz constants are valid global
/// upper bounds; the property tests check them on random pairs.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::string name() const = 0;
  virtual Eigen::Index dim() const = 0;
  virtual double smoothness() const = 0;
  virtual double hessian_lipschitz() const = 0;
  /// F* = min_w F(w).
  virtual double min_value() const = 0;

  double value(const ParamVector& w) const;
  ParamVector grad(const ParamVector& w) const;
  Matrix hessian(const ParamVector& w) const;
  double hessian_min_eig(const ParamVector& w) const;

  ProblemMeta meta_at(const ParamVector& w0) const;

  // Statistical model. Every problem defines f(w; z) with E f(w; z) = F(w)
  // and an isotropic Gaussian z.
  virtual Eigen::Index sample_dim() const { return dim(); }
  virtual ParamVector sample_mean() const = 0;
  virtual double sample_sigma() const = 0;
  ParamVector draw_sample(Rng& rng) const;
  ParamVector sample_grad(const ParamVector& w, const ParamVector& z) const;

  /// Constant C of the iterate-radius monitor ||w - w0|| <= C (F0 - F*) / Delta.
  virtual double boundedness_constant() const { return 10.0; }

 protected:
  virtual double value_impl(const ParamVector& w) const = 0;
  virtual ParamVector grad_impl(const ParamVector& w) const = 0;
  virtual Matrix hessian_impl(const ParamVector& w) const = 0;
  virtual ParamVector sample_grad_impl(const ParamVector& w,
                                       const ParamVector& z) const;
};

/// F(w) = (w - 1)^2.
class Convex1d final : public Problem {
 public:
  explicit Convex1d(double sigma = 1.0) : sigma_(sigma) {}
  std::string name() const override { return "convex_1d"; }
  Eigen::Index dim() const override { return 1; }
  double smoothness() const override { return 2.0; }
  // The Hessian is constant; any positive value bounds its Lipschitz constant.
  double hessian_lipschitz() const override { return 1.0; }
  double min_value() const override { return 0.0; }
  ParamVector sample_mean() const override { return ParamVector::Zero(1); }
  double sample_sigma() const override { return sigma_; }

 protected:
  double value_impl(const ParamVector& w) const override;
  ParamVector grad_impl(const ParamVector& w) const override;
  Matrix hessian_impl(const ParamVector& w) const override;

 private:
  double sigma_;
};

/// F(w) = (w^2 - 1)^2 / 4 on |w| <= c, continued by its second-order Taylor
/// expansion at +-c so that F'' is bounded and continuous.
class Quartic1d final : public Problem {
 public:
  explicit Quartic1d(double clamp = 2.0, double sigma = 1.0);
  std::string name() const override { return "quartic_1d"; }
  Eigen::Index dim() const override { return 1; }
  double smoothness() const override;
  double hessian_lipschitz() const override { return 6.0 * clamp_; }
  double min_value() const override { return 0.0; }
  ParamVector sample_mean() const override { return ParamVector::Zero(1); }
  double sample_sigma() const override { return sigma_; }
  double clamp() const { return clamp_; }

 protected:
  double value_impl(const ParamVector& w) const override;
  ParamVector grad_impl(const ParamVector& w) const override;
  Matrix hessian_impl(const ParamVector& w) const override;

 private:
  double clamp_;
  double sigma_;
};

/// Strict saddle F(w) = w1^2 / 2 + phi(w2) with phi(t) = -lambda t^2 / 2 for
/// |t| <= b. On b <= |t| <= 2b, phi'' ramps linearly from -lambda to kappa and
/// stays at kappa beyond, so F is C^2 with Hessian diag(1, phi''(w2)) and has
/// true local minima at w = (0, +-t*).
///
/// The clamp acts on |w2| rather than ||w||; the quadratic saddle form still
/// holds on all of B_0(b), and the constants are exact:
/// L_F = max(1, lambda, kappa), rho_F = (lambda + kappa) / b.
class ClampedSaddle2d final : public Problem {
 public:
  ClampedSaddle2d(double lambda = 0.5, double b = 1.0, double kappa = 1.0,
                  double sigma = 1.0);
  std::string name() const override { return "saddle_2d"; }
  Eigen::Index dim() const override { return 2; }
  double smoothness() const override;
  double hessian_lipschitz() const override { return (lambda_ + kappa_) / b_; }
  double min_value() const override;
  ParamVector sample_mean() const override { return ParamVector::Zero(2); }
  double sample_sigma() const override { return sigma_; }

  double lambda() const { return lambda_; }
  double b() const { return b_; }
  /// |w2| of the true local minima.
  double minimizer_offset() const;

  double phi(double t) const;
  double phi_prime(double t) const;
  double phi_second(double t) const;

 protected:
  double value_impl(const ParamVector& w) const override;
  ParamVector grad_impl(const ParamVector& w) const override;
  Matrix hessian_impl(const ParamVector& w) const override;

 private:
  double lambda_;
  double b_;
  double kappa_;
  double sigma_;
};

/// Mean estimation: f(w; z) = ||w - z||^2 / 2 with z ~ N(mu, sigma^2 I), so
/// F(w) = ||w - mu||^2 / 2 + d sigma^2 / 2 and grad F(w) = w - mu.
class MeanEstimation final : public Problem {
 public:
  MeanEstimation(ParamVector mu, double sigma);
  std::string name() const override { return "mean_estimation"; }
  Eigen::Index dim() const override { return mu_.size(); }
  double smoothness() const override { return 1.0; }
  double hessian_lipschitz() const override { return 1.0; }
  double min_value() const override;
  ParamVector sample_mean() const override { return mu_; }
  double sample_sigma() const override { return sigma_; }
  const ParamVector& mu() const { return mu_; }

 protected:
  double value_impl(const ParamVector& w) const override;
  ParamVector grad_impl(const ParamVector& w) const override;
  Matrix hessian_impl(const ParamVector& w) const override;
  ParamVector sample_grad_impl(const ParamVector& w,
                               const ParamVector& z) const override;

 private:
  ParamVector mu_;
  double sigma_;
};

/// f_s(w) = delta^{3/2} sin(delta^{-1/2} w + s). Its gradient never exceeds
/// delta in magnitude, so a delta-inexact oracle may always answer zero.
class SineFamily1d final : public Problem {
 public:
  SineFamily1d(double delta, double phase, double sigma = 1.0);
  std::string name() const override { return "sine_1d"; }
  Eigen::Index dim() const override { return 1; }
  double smoothness() const override { return std::sqrt(delta_); }
  double hessian_lipschitz() const override { return 1.0; }
  double min_value() const override { return -delta_ * std::sqrt(delta_); }
  ParamVector sample_mean() const override { return ParamVector::Zero(1); }
  double sample_sigma() const override { return sigma_; }

 protected:
  double value_impl(const ParamVector& w) const override;
  ParamVector grad_impl(const ParamVector& w) const override;
  Matrix hessian_impl(const ParamVector& w) const override;

 private:
  double delta_;
  double phase_;
  double sigma_;
};

/// Problem selection by name plus the union of per-problem parameters.
struct ProblemParams {
  std::string name;
  Eigen::Index dim = 0;         // mean_estimation only; 0 takes mu's size
  std::vector<double> mu;       // mean_estimation; defaults to zeros
  double sigma = 1.0;           // sample noise scale
  double lambda = 0.5;          // saddle_2d
  double b = 1.0;               // saddle_2d
  double kappa = 1.0;           // saddle_2d
  double clamp = 2.0;           // quartic_1d
  double delta = 1.0;           // sine_1d
  double phase = 0.0;           // sine_1d
};

std::unique_ptr<Problem> make_problem(const ProblemParams& params);

}  // namespace byzpgd

#endif  // BYZPGD_PROBLEMS_H_
