#pragma once

// Synthetic direction-of-arrival problems: steering matrices for a uniform
// linear array, sparse source signals, observation noise, multi-shot
// generation and the SVD reduction of multi-shot observations.

#include "l0qubo/core.hpp"

#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include <numbers>
#include <random>

namespace l0qubo {

using Rng = std::mt19937_64;

enum class GridKind : std::uint8_t { UniformAngle, Arcsin };

struct DoaGrid {
  std::size_t sensors = 8;      // N
  std::size_t grid_size = 32;   // M
  double spacing = 0.5;         // element spacing over wavelength
  GridKind kind = GridKind::Arcsin;

  /// Underdetermined setups have fewer sensors than grid points; other
  /// shapes are allowed but flagged by callers.
  bool underdetermined() const noexcept { return sensors < grid_size; }

  /// Azimuths in radians. Arcsin: asin(2m/M - 1); uniform: -pi/2 + pi m / M.
  std::vector<double> angles() const {
    std::vector<double> phi(grid_size);
    for (std::size_t m = 0; m < grid_size; ++m) {
      const double t = static_cast<double>(m) / static_cast<double>(grid_size);
      phi[m] = kind == GridKind::Arcsin ? std::asin(2.0 * t - 1.0) : -std::numbers::pi / 2 + std::numbers::pi * t;
    }
    return phi;
  }
};

/// a_nm = exp(2 pi i n (d / lambda) sin(phi_m)), sensors n = 0..N-1.
inline ComplexMatrix steering_matrix_uniform(const DoaGrid& g) {
  if (g.sensors < 1 || g.grid_size < 1) throw InputError("grid needs at least one sensor and one azimuth");
  if (!std::isfinite(g.spacing) || g.spacing <= 0.0) throw InputError("element spacing must be positive");
  const auto phi = g.angles();
  ComplexMatrix A(g.sensors, g.grid_size);
  for (std::size_t n = 0; n < g.sensors; ++n)
    for (std::size_t m = 0; m < g.grid_size; ++m)
      A(n, m) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(n) * g.spacing * std::sin(phi[m]));
  return A;
}

/// a_nm = (-1)^n exp(2 pi i n m / M): the half-wavelength array on the
/// arcsin grid, i.e. the top N rows of an M-point DFT up to row signs.
inline ComplexMatrix steering_matrix_arcsin(std::size_t sensors, std::size_t grid_size) {
  if (sensors < 1 || grid_size < 1) throw InputError("grid needs at least one sensor and one azimuth");
  ComplexMatrix A(sensors, grid_size);
  for (std::size_t n = 0; n < sensors; ++n) {
    const double sign = n % 2 == 0 ? 1.0 : -1.0;
    for (std::size_t m = 0; m < grid_size; ++m) {
      // Reduce n*m mod M first so the phase stays small and exact.
      const double frac = static_cast<double>((n * m) % grid_size) / static_cast<double>(grid_size);
      A(n, m) = sign * std::polar(1.0, 2.0 * std::numbers::pi * frac);
    }
  }
  return A;
}

/// Circular complex Gaussian operator with E|a|^2 = 1 / rows, so columns
/// have unit expected norm.
inline ComplexMatrix gaussian_operator(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(2.0 * static_cast<double>(rows)));
  ComplexMatrix A(rows, cols);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) {
      const double re = normal(rng);
      A(i, j) = Complex(re, normal(rng));
    }
  return A;
}

/// k distinct indices of [0, length), uniformly, returned sorted.
inline std::vector<std::size_t> sample_support(std::size_t length, std::size_t nonzeros, Rng& rng) {
  if (nonzeros > length) throw InputError("more nonzeros than signal entries");
  std::vector<std::size_t> idx(length);
  for (std::size_t i = 0; i < length; ++i) idx[i] = i;
  for (std::size_t i = 0; i < nonzeros; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, length - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(nonzeros);
  std::sort(idx.begin(), idx.end());
  return idx;
}

/// k-sparse signal with i.i.d. uniform [0, 1) values on a uniform support.
inline SparseSignal gen_sparse_signal(std::size_t length, std::size_t nonzeros, Rng& rng) {
  const auto idx = sample_support(length, nonzeros, rng);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  RealVector z = RealVector::Zero(static_cast<Eigen::Index>(length));
  for (std::size_t i : idx) {
    double v = 0.0;
    while (v == 0.0) v = value(rng);
    z(static_cast<Eigen::Index>(i)) = v;
  }
  return SparseSignal(std::move(z));
}

/// k-sparse signal whose values are drawn uniformly from the nonzero
/// levels of a quantizer (so the signal is exactly representable).
inline SparseSignal gen_grid_signal(std::size_t length, std::size_t nonzeros, const Quantizer& q, Rng& rng) {
  const auto idx = sample_support(length, nonzeros, rng);
  const auto levels = q.nonzero_levels();
  std::uniform_int_distribution<std::size_t> pick(0, levels.size() - 1);
  RealVector z = RealVector::Zero(static_cast<Eigen::Index>(length));
  for (std::size_t i : idx) z(static_cast<Eigen::Index>(i)) = levels[pick(rng)];
  return SparseSignal(std::move(z));
}

/// i.i.d. N(0, sigma^2) on each real and imaginary component.
inline ComplexMatrix complex_noise(Eigen::Index rows, Eigen::Index cols, double sigma, Rng& rng) {
  if (!std::isfinite(sigma) || sigma < 0.0) throw InputError("noise std must be finite and non-negative");
  ComplexMatrix n = ComplexMatrix::Zero(rows, cols);
  if (sigma == 0.0) return n;
  std::normal_distribution<double> normal(0.0, sigma);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      n(i, j) = Complex(re, im);
    }
  return n;
}

inline SparseInstance gen_single_instance(const ComplexMatrix& A, const SparseSignal& z, double sigma, Rng& rng) {
  ComplexVector noise = complex_noise(A.rows(), 1, sigma, rng).col(0);
  return SparseInstance::make(A, z, std::move(noise));
}

/// Shot s has entries zeta_i + N(0, (rho zeta_i)^2), so zero entries stay
/// zero; observations x_s = A z_s + noise(sigma).
inline MultiShotInstance gen_multishot(const ComplexMatrix& A, const SparseSignal& zeta, std::size_t shots, double rho,
                                       double sigma, Rng& rng) {
  if (shots < 1) throw InputError("multi-shot generation needs at least one shot");
  if (!std::isfinite(rho) || rho < 0.0) throw InputError("fluctuation rho must be finite and non-negative");
  if (static_cast<Eigen::Index>(zeta.size()) != A.cols()) throw InputError("signal length does not match operator");
  MultiShotInstance inst;
  inst.A = A;
  inst.truth = zeta;
  const auto S = static_cast<Eigen::Index>(shots);
  inst.shot_signals = zeta.values().replicate(1, S);
  if (rho > 0.0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index s = 0; s < S; ++s)
      for (std::size_t i : zeta.support()) {
        const auto r = static_cast<Eigen::Index>(i);
        inst.shot_signals(r, s) += rho * zeta.values()(r) * normal(rng);
      }
  }
  inst.noise = complex_noise(A.rows(), S, sigma, rng);
  inst.shots = A * inst.shot_signals.cast<Complex>() + inst.noise;
  return inst;
}

/// Averaged observation over shots (the reference LASSO input).
inline ComplexVector average_observation(const MultiShotInstance& inst) { return inst.shots.rowwise().mean(); }

struct SvdBasis {
  ComplexMatrix columns;        // N x L
  RealVector singular_values;   // all of them, descending
};

/// Leading L left singular vectors of X ordered by descending singular
/// value. Each column's phase is fixed so that its first entry (or its
/// largest entry, when the first vanishes) is real and non-negative.
inline SvdBasis svd_preprocess(const ComplexMatrix& X, std::size_t L) {
  detail::require_nonempty(X, "observation matrix");
  if (!detail::all_finite(X)) throw SolveError("SVD input has non-finite entries");
  if (L < 1 || L > static_cast<std::size_t>(std::min(X.rows(), X.cols())))
    throw InputError("basis size must be between 1 and min(N, S)");
  Eigen::JacobiSVD<ComplexMatrix> svd(X, Eigen::ComputeThinU);
  if (svd.info() != Eigen::Success) throw SolveError("singular value decomposition failed");
  SvdBasis out;
  out.singular_values = svd.singularValues();
  out.columns = svd.matrixU().leftCols(static_cast<Eigen::Index>(L));
  for (Eigen::Index j = 0; j < out.columns.cols(); ++j) {
    auto col = out.columns.col(j);
    Eigen::Index ref = 0;
    if (std::abs(col(0)) <= 1e-8) col.cwiseAbs().maxCoeff(&ref);
    const Complex r = col(ref);
    if (std::abs(r) > 0.0) col *= std::conj(r) / std::abs(r);
  }
  return out;
}

/// svd_preprocess with directions that carry no signal removed: columns
/// whose singular value is at most rel_tol * sigma_1 are set to zero.
inline SvdBasis observation_basis(const ComplexMatrix& X, std::size_t L, double rel_tol = 1e-9) {
  SvdBasis b = svd_preprocess(X, L);
  const double top = b.singular_values.size() > 0 ? b.singular_values(0) : 0.0;
  for (Eigen::Index j = 0; j < b.columns.cols(); ++j)
    if (!(b.singular_values(j) > rel_tol * top)) b.columns.col(j).setZero();
  return b;
}

// ---------------------------------------------------------------------------
// Instance documents. Complex entries are [re, im] pairs; matrices are lists
// of rows.

namespace detail {

inline nlohmann::json complex_to_json(const ComplexMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json complex_to_json(const ComplexVector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

inline Complex complex_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw InputError("complex entries must be [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline ComplexMatrix complex_matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw InputError("matrix must be a non-empty list of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols) throw InputError("matrix rows have different lengths");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = complex_from_json(j[i][c]);
  }
  return m;
}

inline ComplexVector complex_vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InputError("vector must be a list");
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = complex_from_json(j[i]);
  return v;
}

inline RealVector real_vector_from_json(const nlohmann::json& j) {
  const auto vals = j.get<std::vector<double>>();
  return Eigen::Map<const RealVector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

inline std::vector<double> to_std(const RealVector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace detail

inline nlohmann::json instance_to_json(const SparseInstance& inst) {
  return {{"schema_version", 1},
          {"kind", "single"},
          {"operator", detail::complex_to_json(inst.A)},
          {"observation", detail::complex_to_json(inst.x)},
          {"truth", detail::to_std(inst.truth.values())},
          {"noise", detail::complex_to_json(inst.noise)}};
}

/// Missing truth means "unknown" (zero signal) and missing noise means the
/// observation is taken as given; the consistency check only applies when
/// both are present.
inline SparseInstance single_instance_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != 1) throw InputError("unsupported instance schema_version");
    if (j.at("kind").get<std::string>() != "single") throw InputError("instance kind must be 'single'");
    SparseInstance inst;
    inst.A = detail::complex_matrix_from_json(j.at("operator"));
    inst.x = detail::complex_vector_from_json(j.at("observation"));
    if (inst.x.size() != inst.A.rows()) throw InputError("observation length does not match operator rows");
    inst.truth = j.contains("truth") ? SparseSignal(detail::real_vector_from_json(j["truth"]))
                                     : SparseSignal::zeros(static_cast<std::size_t>(inst.A.cols()));
    if (j.contains("noise")) {
      inst.noise = detail::complex_vector_from_json(j["noise"]);
      if (j.contains("truth")) inst.validate();
    } else {
      inst.noise = inst.x - inst.A * inst.truth.values().cast<Complex>();
    }
    detail::require_finite(inst.A, "operator");
    detail::require_finite(inst.x, "observation");
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed instance document: ") + e.what());
  }
}

inline nlohmann::json instance_to_json(const MultiShotInstance& inst) {
  nlohmann::json signals = nlohmann::json::array();
  for (Eigen::Index s = 0; s < inst.shot_signals.cols(); ++s) signals.push_back(detail::to_std(inst.shot_signals.col(s)));
  return {{"schema_version", 1},
          {"kind", "multishot"},
          {"operator", detail::complex_to_json(inst.A)},
          {"shots", detail::complex_to_json(ComplexMatrix(inst.shots.transpose()))},
          {"truth", detail::to_std(inst.truth.values())},
          {"shot_signals", signals},
          {"noise", detail::complex_to_json(ComplexMatrix(inst.noise.transpose()))}};
}

/// Shots are stored one observation per list entry.
inline MultiShotInstance multishot_instance_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != 1) throw InputError("unsupported instance schema_version");
    if (j.at("kind").get<std::string>() != "multishot") throw InputError("instance kind must be 'multishot'");
    MultiShotInstance inst;
    inst.A = detail::complex_matrix_from_json(j.at("operator"));
    inst.shots = detail::complex_matrix_from_json(j.at("shots")).transpose();
    if (inst.shots.rows() != inst.A.rows()) throw InputError("shot length does not match operator rows");
    const auto M = static_cast<std::size_t>(inst.A.cols());
    inst.truth = j.contains("truth") ? SparseSignal(detail::real_vector_from_json(j["truth"])) : SparseSignal::zeros(M);
    inst.shot_signals = RealMatrix::Zero(inst.A.cols(), inst.shots.cols());
    if (j.contains("shot_signals")) {
      const auto& sig = j["shot_signals"];
      if (sig.size() != static_cast<std::size_t>(inst.shots.cols())) throw InputError("shot_signals count mismatch");
      for (std::size_t s = 0; s < sig.size(); ++s) {
        RealVector v = detail::real_vector_from_json(sig[s]);
        if (v.size() != inst.A.cols()) throw InputError("shot signal length mismatch");
        inst.shot_signals.col(static_cast<Eigen::Index>(s)) = v;
      }
    }
    inst.noise = j.contains("noise") ? ComplexMatrix(detail::complex_matrix_from_json(j["noise"]).transpose())
                                     : ComplexMatrix(inst.shots - inst.A * inst.shot_signals.cast<Complex>());
    if (inst.noise.rows() != inst.shots.rows() || inst.noise.cols() != inst.shots.cols())
      throw InputError("noise shape does not match shots");
    detail::require_finite(inst.A, "operator");
    detail::require_finite(inst.shots, "shots");
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed instance document: ") + e.what());
  }
}

}  // namespace l0qubo
