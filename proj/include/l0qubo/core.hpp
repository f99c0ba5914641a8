#pragma once

// Domain types shared by every other header: dense real/complex operators,
// bit quantization of signal amplitudes, sparse signals and instances.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace l0qubo {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// One byte per binary variable, values 0 or 1.
using Bits = std::vector<std::uint8_t>;

struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct BuildError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

template <class Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const auto v = m(i, j);
      if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Complex>) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
      } else {
        if (!std::isfinite(v)) return false;
      }
    }
  return true;
}

template <class Derived>
void require_finite(const Eigen::DenseBase<Derived>& m, const char* what) {
  if (!all_finite(m)) throw InputError(std::string(what) + " has non-finite entries");
}

template <class Derived>
void require_nonempty(const Eigen::DenseBase<Derived>& m, const char* what) {
  if (m.rows() < 1 || m.cols() < 1) throw InputError(std::string(what) + " must be non-empty");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Real lifting of complex least-squares residuals.

struct RealSystem {
  RealMatrix A;
  RealVector x;
};

/// Stacks real and imaginary parts: [Re v; Im v].
inline RealVector stack_complex(const ComplexVector& v) {
  RealVector out(2 * v.size());
  out.head(v.size()) = v.real();
  out.tail(v.size()) = v.imag();
  return out;
}

/// Inverse of stack_complex; the input length must be even.
inline ComplexVector unstack_complex(const RealVector& v) {
  if (v.size() % 2 != 0) throw InputError("stacked complex vector must have even length");
  const Eigen::Index m = v.size() / 2;
  ComplexVector out(m);
  for (Eigen::Index i = 0; i < m; ++i) out(i) = Complex(v(i), v(m + i));
  return out;
}

/// Lifting for a real coefficient vector z: ||x - A z||^2 over C equals
/// ||[Re x; Im x] - [Re A; Im A] z||^2 over R.
inline RealSystem realify_for_real_signal(const ComplexMatrix& A, const ComplexVector& x) {
  detail::require_nonempty(A, "operator");
  detail::require_finite(A, "operator");
  detail::require_finite(x, "observation");
  if (x.size() != A.rows()) throw InputError("observation length does not match operator rows");
  RealSystem out;
  out.A.resize(2 * A.rows(), A.cols());
  out.A.topRows(A.rows()) = A.real();
  out.A.bottomRows(A.rows()) = A.imag();
  out.x = stack_complex(x);
  return out;
}

/// Block lifting [[Re A, -Im A], [Im A, Re A]] acting on (u; v) where z = u + i v.
/// Coefficient columns i and M + i belong to signal entry i.
inline RealMatrix realify_for_complex_signal(const ComplexMatrix& A) {
  detail::require_nonempty(A, "operator");
  detail::require_finite(A, "operator");
  const Eigen::Index n = A.rows(), m = A.cols();
  RealMatrix out(2 * n, 2 * m);
  out.block(0, 0, n, m) = A.real();
  out.block(0, m, n, m) = -A.imag();
  out.block(n, 0, n, m) = A.imag();
  out.block(n, m, n, m) = A.real();
  return out;
}

// ---------------------------------------------------------------------------
// Quantizer: value = sum_k w_k * bit_k.

class Quantizer {
 public:
  static constexpr std::size_t kMaxBits = 20;

  explicit Quantizer(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw InputError("quantizer needs at least one bit");
    if (weights_.size() > kMaxBits)
      throw InputError("quantizer bit length exceeds " + std::to_string(kMaxBits));
    bool any_nonzero = false;
    for (double w : weights_) {
      if (!std::isfinite(w)) throw InputError("quantizer weights must be finite");
      any_nonzero = any_nonzero || w != 0.0;
    }
    if (!any_nonzero) throw InputError("quantizer weights are all zero");

    const std::size_t count = std::size_t{1} << weights_.size();
    levels_.resize(count);
    std::size_t zeros = 0;
    for (std::size_t pattern = 0; pattern < count; ++pattern) {
      double v = 0.0;
      for (std::size_t k = 0; k < weights_.size(); ++k)
        if ((pattern >> k) & 1U) v += weights_[k];
      levels_[pattern] = v;
      if (v == 0.0) ++zeros;
    }
    if (zeros != 1) throw InputError("quantizer grid has a non-zero bit pattern decoding to 0");
  }

  /// Weights 2^-1, 2^-2, ..., 2^-K covering [0, 1).
  static Quantizer unsigned_binary(std::size_t bits) {
    std::vector<double> w(bits);
    for (std::size_t k = 0; k < bits; ++k) w[k] = std::ldexp(1.0, -static_cast<int>(k + 1));
    return Quantizer(std::move(w));
  }

  /// Same as unsigned_binary but with w_1 = -1/2, covering [-0.5, 0.5).
  static Quantizer signed_binary(std::size_t bits) {
    auto w = unsigned_binary(bits).weights_;
    w[0] = -w[0];
    return Quantizer(std::move(w));
  }

  std::size_t bit_length() const noexcept { return weights_.size(); }
  std::span<const double> weights() const noexcept { return weights_; }

  double decode(std::span<const std::uint8_t> bits) const {
    if (bits.size() != weights_.size())
      throw InputError("bit pattern length " + std::to_string(bits.size()) +
                       " does not match quantizer length " + std::to_string(weights_.size()));
    double v = 0.0;
    for (std::size_t k = 0; k < bits.size(); ++k)
      if (bits[k]) v += weights_[k];
    return v;
  }

  /// Nearest grid pattern; ties go to the smaller decoded magnitude, then to
  /// the lower pattern number.
  Bits quantize(double value) const {
    if (!std::isfinite(value)) throw InputError("cannot quantize a non-finite value");
    std::size_t best = 0;
    double best_dist = std::abs(levels_[0] - value);
    for (std::size_t p = 1; p < levels_.size(); ++p) {
      const double d = std::abs(levels_[p] - value);
      if (d < best_dist || (d == best_dist && std::abs(levels_[p]) < std::abs(levels_[best]))) {
        best = p;
        best_dist = d;
      }
    }
    return pattern_bits(best);
  }

  double round(double value) const { return levels_[pattern_of(quantize(value))]; }

  /// Decoded value of every bit pattern, indexed by pattern number (bit k of
  /// the pattern number is bit k of the sequence).
  std::span<const double> levels() const noexcept { return levels_; }

  std::vector<double> nonzero_levels() const {
    std::vector<double> out;
    for (double v : levels_)
      if (v != 0.0) out.push_back(v);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  Bits pattern_bits(std::size_t pattern) const {
    Bits b(weights_.size());
    for (std::size_t k = 0; k < b.size(); ++k) b[k] = static_cast<std::uint8_t>((pattern >> k) & 1U);
    return b;
  }

  static std::size_t pattern_of(std::span<const std::uint8_t> bits) {
    std::size_t p = 0;
    for (std::size_t k = 0; k < bits.size(); ++k)
      if (bits[k]) p |= std::size_t{1} << k;
    return p;
  }

  bool operator==(const Quantizer& o) const { return weights_ == o.weights_; }

 private:
  std::vector<double> weights_;
  std::vector<double> levels_;
};

// ---------------------------------------------------------------------------
// Supports and sparse signals.

/// Indices with |v_i| > threshold (strict).
template <class Derived>
std::vector<std::size_t> support(const Eigen::MatrixBase<Derived>& v, double threshold) {
  if (!(threshold >= 0.0)) throw InputError("support threshold must be non-negative");
  std::vector<std::size_t> out;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > threshold) out.push_back(static_cast<std::size_t>(i));
  return out;
}

inline std::size_t count_nonzero(const RealVector& v) {
  return static_cast<std::size_t>((v.array() != 0.0).count());
}

inline std::size_t count_nonzero(const ComplexVector& v) {
  std::size_t n = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v(i) != Complex(0.0, 0.0)) ++n;
  return n;
}

/// Number of rows with a nonzero entry.
template <class Derived>
std::size_t count_nonzero_rows(const Eigen::MatrixBase<Derived>& m) {
  std::size_t n = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    bool nz = false;
    for (Eigen::Index j = 0; j < m.cols() && !nz; ++j) nz = std::abs(m(i, j)) != 0.0;
    if (nz) ++n;
  }
  return n;
}

class SparseSignal {
 public:
  SparseSignal() = default;
  explicit SparseSignal(RealVector values) : values_(std::move(values)) {
    detail::require_finite(values_, "signal");
    support_ = l0qubo::support(values_, 0.0);
  }

  static SparseSignal zeros(std::size_t m) { return SparseSignal(RealVector::Zero(static_cast<Eigen::Index>(m))); }

  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
  const RealVector& values() const noexcept { return values_; }
  const std::vector<std::size_t>& support() const noexcept { return support_; }
  std::size_t nonzeros() const noexcept { return support_.size(); }

 private:
  RealVector values_;
  std::vector<std::size_t> support_;
};

// ---------------------------------------------------------------------------
// Instances.

/// Single observation x = A z + n.
struct SparseInstance {
  ComplexMatrix A;
  ComplexVector x;
  SparseSignal truth;
  ComplexVector noise;

  static SparseInstance make(ComplexMatrix A, SparseSignal truth, ComplexVector noise) {
    detail::require_nonempty(A, "operator");
    detail::require_finite(A, "operator");
    if (static_cast<Eigen::Index>(truth.size()) != A.cols())
      throw InputError("signal length does not match operator columns");
    if (noise.size() == 0) noise = ComplexVector::Zero(A.rows());
    if (noise.size() != A.rows()) throw InputError("noise length does not match operator rows");
    detail::require_finite(noise, "noise");
    SparseInstance inst;
    inst.x = A * truth.values().cast<Complex>() + noise;
    inst.A = std::move(A);
    inst.truth = std::move(truth);
    inst.noise = std::move(noise);
    return inst;
  }

  /// Checks x = A z + n to 1e-12 relative error (used for loaded documents).
  void validate() const {
    detail::require_nonempty(A, "operator");
    detail::require_finite(A, "operator");
    detail::require_finite(x, "observation");
    if (x.size() != A.rows() || noise.size() != A.rows() ||
        static_cast<Eigen::Index>(truth.size()) != A.cols())
      throw InputError("instance dimensions are inconsistent");
    const ComplexVector model = A * truth.values().cast<Complex>() + noise;
    const double scale = std::max(1.0, x.norm());
    if ((model - x).norm() > 1e-12 * scale)
      throw InputError("instance observation does not equal A z + n");
  }
};

/// S observations of perturbed copies of one sparse signal.
struct MultiShotInstance {
  ComplexMatrix A;
  ComplexMatrix shots;       // N x S
  SparseSignal truth;        // zeta
  RealMatrix shot_signals;   // M x S
  ComplexMatrix noise;       // N x S

  std::size_t num_shots() const noexcept { return static_cast<std::size_t>(shots.cols()); }

  bool shots_share_support() const {
    for (Eigen::Index s = 0; s < shot_signals.cols(); ++s)
      if (l0qubo::support(shot_signals.col(s), 0.0) != truth.support()) return false;
    return true;
  }
};

}  // namespace l0qubo
