#pragma once

// Classical sparse recovery baselines on real (lifted) systems.

#include "l0qubo/qubo.hpp"
#include "l0qubo/scenarios.hpp"

#include <Eigen/QR>

namespace l0qubo {

struct BaselineConfig {
  double gamma1 = 0.0005;
  std::size_t max_iterations = 10000;
  double tolerance = 1e-8;             // relative objective decrease
  std::size_t omp_max_nonzeros = 0;    // 0: number of rows of the operator
  double omp_residual_tolerance = 1e-6;

  void validate() const {
    if (!(std::isfinite(gamma1) && gamma1 > 0.0)) throw InputError("gamma1 must be positive");
    if (max_iterations < 1) throw InputError("max_iterations must be positive");
    if (!(std::isfinite(tolerance) && tolerance > 0.0)) throw InputError("tolerance must be positive");
    if (!(std::isfinite(omp_residual_tolerance) && omp_residual_tolerance > 0.0))
      throw InputError("omp_residual_tolerance must be positive");
  }
};

// ---------------------------------------------------------------------------
// Orthogonal matching pursuit.

struct OmpResult {
  RealVector coefficients;
  std::vector<std::size_t> selected;     // in selection order
  std::vector<double> residual_norms;    // before the first and after each selection
  bool rank_deficient = false;
};

inline OmpResult omp(const RealMatrix& A, const RealVector& x, const BaselineConfig& cfg = {}) {
  detail::require_nonempty(A, "operator");
  detail::require_finite(A, "operator");
  detail::require_finite(x, "observation");
  if (x.size() != A.rows()) throw InputError("observation length does not match operator rows");
  const RealVector norms = A.colwise().norm();
  for (Eigen::Index j = 0; j < norms.size(); ++j)
    if (norms(j) == 0.0) throw InputError("operator column " + std::to_string(j) + " is zero");

  const std::size_t limit = std::min<std::size_t>(
      cfg.omp_max_nonzeros == 0 ? static_cast<std::size_t>(A.rows()) : cfg.omp_max_nonzeros,
      static_cast<std::size_t>(A.cols()));
  OmpResult out;
  out.coefficients = RealVector::Zero(A.cols());
  RealVector residual = x;
  out.residual_norms.push_back(residual.norm());
  std::vector<bool> used(static_cast<std::size_t>(A.cols()), false);
  RealVector coef_on_support;

  while (out.selected.size() < limit && out.residual_norms.back() > cfg.omp_residual_tolerance) {
    const RealVector corr = (A.transpose() * residual).cwiseAbs().cwiseQuotient(norms);
    Eigen::Index pick = -1;
    for (Eigen::Index j = 0; j < corr.size(); ++j)
      if (!used[static_cast<std::size_t>(j)] && (pick < 0 || corr(j) > corr(pick))) pick = j;
    if (pick < 0 || corr(pick) == 0.0) break;

    std::vector<std::size_t> trial = out.selected;
    trial.push_back(static_cast<std::size_t>(pick));
    RealMatrix sub(A.rows(), static_cast<Eigen::Index>(trial.size()));
    for (std::size_t t = 0; t < trial.size(); ++t) sub.col(static_cast<Eigen::Index>(t)) = A.col(static_cast<Eigen::Index>(trial[t]));
    Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(sub);
    const RealVector c = cod.solve(x);
    const RealVector r = x - sub * c;
    // Stop once an extra atom no longer reduces the residual.
    if (!(r.norm() < out.residual_norms.back())) break;
    if (cod.rank() < sub.cols()) out.rank_deficient = true;
    used[static_cast<std::size_t>(pick)] = true;
    out.selected = std::move(trial);
    coef_on_support = c;
    residual = r;
    out.residual_norms.push_back(residual.norm());
  }
  for (std::size_t t = 0; t < out.selected.size(); ++t)
    out.coefficients(static_cast<Eigen::Index>(out.selected[t])) = coef_on_support(static_cast<Eigen::Index>(t));
  return out;
}

// ---------------------------------------------------------------------------
// LASSO: (1 / 2 gamma1) ||x - A z||^2 + ||z||_1 by cyclic coordinate descent.

struct LassoResult {
  RealVector coefficients;
  std::vector<double> objective_history;   // after each full cycle, starting from z = 0
  std::size_t iterations = 0;
  bool converged = false;
  double objective() const { return objective_history.back(); }
};

inline constexpr double kLassoKktTolerance = 1e-6;

inline double soft_threshold(double v, double t) { return v > t ? v - t : (v < -t ? v + t : 0.0); }

inline double lasso_objective(const RealMatrix& A, const RealVector& x, const RealVector& z, double gamma1) {
  return (x - A * z).squaredNorm() / (2.0 * gamma1) + z.lpNorm<1>();
}

/// Largest violation of the subgradient optimality condition, in units of
/// the l1 weight.
inline double lasso_kkt_violation(const RealMatrix& A, const RealVector& x, const RealVector& z, double gamma1) {
  const RealVector grad = A.transpose() * (x - A * z) / gamma1;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    const double v = z(j) > 0.0 ? std::abs(grad(j) - 1.0) : z(j) < 0.0 ? std::abs(grad(j) + 1.0)
                                                                      : std::max(0.0, std::abs(grad(j)) - 1.0);
    worst = std::max(worst, v);
  }
  return worst;
}

inline LassoResult lasso_cd(const RealMatrix& A, const RealVector& x, double gamma1, const BaselineConfig& cfg = {}) {
  detail::require_nonempty(A, "operator");
  detail::require_finite(A, "operator");
  detail::require_finite(x, "observation");
  if (x.size() != A.rows()) throw InputError("observation length does not match operator rows");
  if (!(std::isfinite(gamma1) && gamma1 > 0.0)) throw InputError("gamma1 must be positive");

  const RealVector sq = A.colwise().squaredNorm();
  LassoResult out;
  out.coefficients = RealVector::Zero(A.cols());
  RealVector& z = out.coefficients;
  RealVector residual = x;
  double obj = residual.squaredNorm() / (2.0 * gamma1);
  out.objective_history.push_back(obj);
  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (sq(j) == 0.0) continue;
      const double old = z(j);
      // argmin_v (1 / 2 gamma1) ||r + a_j old - a_j v||^2 + |v|
      const double rho = A.col(j).dot(residual) + sq(j) * old;
      const double v = soft_threshold(rho, gamma1) / sq(j);
      if (v != old) {
        residual.noalias() -= (v - old) * A.col(j);
        z(j) = v;
      }
    }
    const double next = residual.squaredNorm() / (2.0 * gamma1) + z.lpNorm<1>();
    out.objective_history.push_back(next);
    out.iterations = it + 1;
    const double decrease = obj - next;
    obj = next;
    if (decrease <= cfg.tolerance * std::max(std::abs(next), std::numeric_limits<double>::min()) &&
        lasso_kkt_violation(A, x, z, gamma1) <= kLassoKktTolerance) {
      out.converged = true;
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Group LASSO: (1 / 2 gamma1) ||X - A Z||_F^2 + sum_g ||Z_g||_2 where group g
// is a row of Z (Real layout) or the row pair (i, M + i) of a block-lifted
// coefficient matrix (ComplexPairs layout).

struct GroupLassoResult {
  RealMatrix coefficients;
  std::vector<double> objective_history;
  std::size_t iterations = 0;
  bool converged = false;
  double objective() const { return objective_history.back(); }
};

namespace detail {

inline std::size_t group_count(const RealMatrix& Z, SignalLayout layout) {
  return static_cast<std::size_t>(layout == SignalLayout::ComplexPairs ? Z.rows() / 2 : Z.rows());
}

inline double group_norm(const RealMatrix& Z, std::size_t g, SignalLayout layout) {
  const auto i = static_cast<Eigen::Index>(g);
  double s = Z.row(i).squaredNorm();
  if (layout == SignalLayout::ComplexPairs) s += Z.row(i + Z.rows() / 2).squaredNorm();
  return std::sqrt(s);
}

inline void scale_group(RealMatrix& Z, std::size_t g, SignalLayout layout, double factor) {
  const auto i = static_cast<Eigen::Index>(g);
  Z.row(i) *= factor;
  if (layout == SignalLayout::ComplexPairs) Z.row(i + Z.rows() / 2) *= factor;
}

}  // namespace detail

inline double group_lasso_objective(const RealMatrix& A, const RealMatrix& X, const RealMatrix& Z, double gamma1,
                                    SignalLayout layout = SignalLayout::Real) {
  double pen = 0.0;
  for (std::size_t g = 0; g < detail::group_count(Z, layout); ++g) pen += detail::group_norm(Z, g, layout);
  return (X - A * Z).squaredNorm() / (2.0 * gamma1) + pen;
}

/// Proximal gradient with step 1 / Lip, Lip = sigma_max(A)^2 / gamma1, and
/// Nesterov momentum that is reset whenever a step would raise the
/// objective; accepted iterates therefore never increase it.
inline GroupLassoResult group_lasso_pg(const RealMatrix& A, const RealMatrix& X, double gamma1,
                                       const BaselineConfig& cfg = {}, SignalLayout layout = SignalLayout::Real) {
  detail::require_nonempty(A, "operator");
  detail::require_finite(A, "operator");
  detail::require_finite(X, "observation");
  if (X.rows() != A.rows()) throw InputError("observation length does not match operator rows");
  if (X.cols() < 1) throw InputError("group LASSO needs at least one observation column");
  if (!(std::isfinite(gamma1) && gamma1 > 0.0)) throw InputError("gamma1 must be positive");
  if (layout == SignalLayout::ComplexPairs && A.cols() % 2 != 0)
    throw InputError("block-lifted operator must have an even number of columns");

  GroupLassoResult out;
  out.coefficients = RealMatrix::Zero(A.cols(), X.cols());
  RealMatrix& Z = out.coefficients;
  double obj = group_lasso_objective(A, X, Z, gamma1, layout);
  out.objective_history.push_back(obj);

  const double smax = Eigen::JacobiSVD<RealMatrix>(A).singularValues()(0);
  if (smax == 0.0) {
    out.converged = true;
    return out;
  }
  const double step = gamma1 / (smax * smax);
  const RealMatrix AtA = A.transpose() * A;
  const RealMatrix AtX = A.transpose() * X;

  auto prox_step = [&](const RealMatrix& from) {
    RealMatrix next = from - (step / gamma1) * (AtA * from - AtX);
    for (std::size_t g = 0; g < detail::group_count(next, layout); ++g) {
      const double nrm = detail::group_norm(next, g, layout);
      detail::scale_group(next, g, layout, nrm > step ? 1.0 - step / nrm : 0.0);
    }
    return next;
  };

  RealMatrix Y = Z;
  double t = 1.0;
  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    RealMatrix cand = prox_step(Y);
    double cand_obj = group_lasso_objective(A, X, cand, gamma1, layout);
    if (cand_obj > obj) {
      // Momentum overshoot: restart from the current iterate with a plain step.
      t = 1.0;
      cand = prox_step(Z);
      cand_obj = group_lasso_objective(A, X, cand, gamma1, layout);
      if (cand_obj > obj) {
        cand = Z;
        cand_obj = obj;
      }
    }
    const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
    Y = cand + ((t - 1.0) / t_next) * (cand - Z);
    t = t_next;
    const double decrease = obj - cand_obj;
    Z = std::move(cand);
    obj = cand_obj;
    out.objective_history.push_back(obj);
    out.iterations = it + 1;
    if (decrease <= cfg.tolerance * std::max(std::abs(obj), std::numeric_limits<double>::min())) {
      out.converged = true;
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// l1-SVD: group LASSO on the leading left singular vectors of the shots.

struct L1SvdResult {
  ComplexMatrix signal;       // M x L; column 0 is the evaluation column
  SvdBasis basis;
  GroupLassoResult solve;
};

inline L1SvdResult l1_svd_pipeline(const ComplexMatrix& A, const ComplexMatrix& shots, std::size_t L, double gamma1,
                                   const BaselineConfig& cfg = {}) {
  if (L < 1 || L > static_cast<std::size_t>(shots.cols())) throw InputError("basis size must satisfy 1 <= L <= S");
  if (shots.rows() != A.rows()) throw InputError("shot length does not match operator rows");
  L1SvdResult out;
  out.basis = observation_basis(shots, L);
  const RealMatrix A_lift = realify_for_complex_signal(A);
  RealMatrix X(A_lift.rows(), static_cast<Eigen::Index>(L));
  for (Eigen::Index l = 0; l < X.cols(); ++l) X.col(l) = stack_complex(out.basis.columns.col(l));
  out.solve = group_lasso_pg(A_lift, X, gamma1, cfg, SignalLayout::ComplexPairs);
  const Eigen::Index M = A.cols();
  out.signal.resize(M, X.cols());
  for (Eigen::Index l = 0; l < X.cols(); ++l)
    for (Eigen::Index i = 0; i < M; ++i) out.signal(i, l) = Complex(out.solve.coefficients(i, l), out.solve.coefficients(M + i, l));
  return out;
}

}  // namespace l0qubo
