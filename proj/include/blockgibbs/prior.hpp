#pragma once

#include <variant>

#include <Eigen/Dense>

#include "blockgibbs/errors.hpp"

namespace blockgibbs {

// Two-point mixture on each prior variance tau_j: spike zeta_j with
// probability 1 - w_j, slab kappa_j * zeta_j with probability w_j.
// Fields hold either one shared value or one value per coordinate.
struct SpikeSlabPrior {
  Eigen::VectorXd w;      // mixture weight, each in (0,1)
  Eigen::VectorXd kappa;  // slab inflation, each > 1
  Eigen::VectorXd zeta;   // spike variance, each > 0

  SpikeSlabPrior(double w_in, double kappa_in, double zeta_in)
      : SpikeSlabPrior(Eigen::VectorXd::Constant(1, w_in),
                       Eigen::VectorXd::Constant(1, kappa_in),
                       Eigen::VectorXd::Constant(1, zeta_in)) {}

  SpikeSlabPrior(Eigen::VectorXd w_in, Eigen::VectorXd kappa_in,
                 Eigen::VectorXd zeta_in)
      : w(std::move(w_in)), kappa(std::move(kappa_in)), zeta(std::move(zeta_in)) {
    if ((w.array() <= 0.0).any() || (w.array() >= 1.0).any()) {
      throw InvalidParameter("spike-and-slab weight must lie in (0,1)");
    }
    if ((kappa.array() <= 1.0).any()) {
      throw InvalidParameter("slab inflation kappa must exceed 1");
    }
    if ((zeta.array() <= 0.0).any()) {
      throw InvalidParameter("spike variance zeta must be positive");
    }
  }

  double w_at(Eigen::Index j) const { return w.size() == 1 ? w(0) : w(j); }
  double kappa_at(Eigen::Index j) const {
    return kappa.size() == 1 ? kappa(0) : kappa(j);
  }
  double zeta_at(Eigen::Index j) const {
    return zeta.size() == 1 ? zeta(0) : zeta(j);
  }
};

// Exponential(lambda^2 / 2) prior on each tau_j, the Bayesian lasso.
struct LassoPrior {
  double lambda;

  explicit LassoPrior(double lambda_in) : lambda(lambda_in) {
    if (!(lambda > 0.0)) throw InvalidParameter("lasso lambda must be positive");
  }
};

using PriorConfig = std::variant<SpikeSlabPrior, LassoPrior>;

inline const char* prior_tag(const PriorConfig& prior) {
  return std::holds_alternative<SpikeSlabPrior>(prior) ? "spike-slab" : "lasso";
}

}  // namespace blockgibbs
