#pragma once

// Domain types and the shared linear algebra behind every sampler step:
// response centering, column standardization, the posterior precision
// A_tau = X'X + D_tau^{-1}, and its Cholesky factorization.

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "blockgibbs/errors.hpp"
#include "blockgibbs/random.hpp"

namespace blockgibbs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Dataset {
  Vector y;
  Matrix X;
  std::vector<std::string> names;  // optional column labels, empty or size p

  Dataset(Vector y_in, Matrix X_in, std::vector<std::string> names_in = {})
      : y(std::move(y_in)), X(std::move(X_in)), names(std::move(names_in)) {
    if (y.size() < 3) throw InvalidData("need at least 3 observations");
    if (X.cols() < 1) throw InvalidData("need at least 1 predictor");
    if (X.rows() != y.size()) throw InvalidData("X row count must match y length");
    if (!y.allFinite() || !X.allFinite()) throw InvalidData("non-finite entries");
    if (!names.empty() && static_cast<Eigen::Index>(names.size()) != X.cols()) {
      throw InvalidData("names length must match predictor count");
    }
  }

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
};

inline std::pair<Vector, double> center_response(const Vector& y) {
  if (y.size() < 1 || !y.allFinite()) throw InvalidData("invalid response vector");
  const double y_bar = y.mean();
  return {y.array() - y_bar, y_bar};
}

// Centers each column and rescales it to squared Euclidean norm n.
inline Matrix standardize_columns(const Matrix& X) {
  const auto n = X.rows();
  Matrix out(X.rows(), X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    Vector col = X.col(j).array() - X.col(j).mean();
    const double sq = col.squaredNorm();
    if (sq <= 0.0) throw DegenerateColumn(static_cast<std::size_t>(j));
    out.col(j) = col * std::sqrt(static_cast<double>(n) / sq);
  }
  return out;
}

// Precomputed per-dataset quantities shared read-only across chains.
struct CenteredDesign {
  Vector y_tilde;
  double y_bar;
  Matrix X_std;
  Matrix gram;   // X_std' X_std
  Vector xty;    // X_std' y_tilde
  double yty;    // ||y_tilde||^2

  explicit CenteredDesign(const Dataset& data) {
    auto [yt, yb] = center_response(data.y);
    y_tilde = std::move(yt);
    y_bar = yb;
    X_std = standardize_columns(data.X);
    const double n = static_cast<double>(X_std.rows());
    for (Eigen::Index j = 0; j < X_std.cols(); ++j) {
      if (std::abs(X_std.col(j).mean()) > 1e-10 ||
          std::abs(X_std.col(j).squaredNorm() - n) > 1e-8) {
        throw NumericalFailure("column standardization out of tolerance");
      }
    }
    gram = X_std.transpose() * X_std;
    xty = X_std.transpose() * y_tilde;
    yty = y_tilde.squaredNorm();
  }

  Eigen::Index n() const { return X_std.rows(); }
  Eigen::Index p() const { return X_std.cols(); }
};

inline Matrix posterior_precision(const Matrix& gram, const Vector& tau) {
  if (gram.rows() != gram.cols() || gram.rows() != tau.size()) {
    throw InvalidInput("gram/tau dimension mismatch");
  }
  if ((tau.array() <= 0.0).any()) throw InvalidTau("every tau_j must be positive");
  Matrix a = gram;
  a.diagonal() += tau.cwiseInverse();
  return a;
}

// Cholesky of an SPD precision matrix, retained for both solves and
// covariance sampling. On failure, ridge jitter 1e-10 * trace(A)/p is added
// once; a second failure is a hard error.
class PrecisionSolver {
 public:
  explicit PrecisionSolver(const Matrix& a_tau) {
    llt_.compute(a_tau);
    if (llt_.info() != Eigen::Success) {
      const double jitter =
          1e-10 * a_tau.trace() / static_cast<double>(a_tau.rows());
      Matrix jittered = a_tau;
      jittered.diagonal().array() += jitter;
      llt_.compute(jittered);
      if (llt_.info() != Eigen::Success) {
        throw NumericalFailure("Cholesky factorization failed after jitter");
      }
    }
  }

  Vector solve(const Vector& rhs) const { return llt_.solve(rhs); }
  Matrix solve(const Matrix& rhs) const { return llt_.solve(rhs); }

  // L^{-T} z, so that the result of sampling has covariance A^{-1}.
  Vector inverse_transpose_factor_apply(const Vector& z) const {
    return llt_.matrixU().solve(z);
  }

 private:
  Eigen::LLT<Matrix> llt_;
};

// One draw from N_p(mean, sigma2 * A^{-1}) given the factorization of A.
inline Vector draw_mvn_mean_precision(const Vector& mean, double sigma2,
                                      const PrecisionSolver& factor,
                                      RngStream& rng) {
  if (!(sigma2 > 0.0)) throw InvalidParameter("sigma2 must be positive");
  Vector z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = draw_normal(rng);
  return mean + std::sqrt(sigma2) * factor.inverse_transpose_factor_apply(z);
}

}  // namespace blockgibbs
