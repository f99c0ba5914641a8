#pragma once

// QUBO models and the compiler from quantized l0-regularized least squares
// (single observation and row-grouped multi-column) into QUBO form.
//
// The l0 term of an entry is 1 - prod_k (1 - b_k). Products of more than two
// literals are reduced with chains of auxiliary variables c = a * b, each
// enforced by the penalty 3c + ab - 2ac - 2bc, which is zero exactly when
// the identity holds and at least 1 otherwise.

#include "l0qubo/core.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace l0qubo {

// ---------------------------------------------------------------------------
// QuboModel

/// Upper-triangular coefficient table; diagonal entries are linear terms
/// (b * b = b). Energy = sum coeff(i,j) b_i b_j + offset.
class QuboModel {
 public:
  using Key = std::pair<std::size_t, std::size_t>;
  using Table = std::map<Key, double>;

  QuboModel() = default;
  explicit QuboModel(std::size_t num_vars) : num_vars_(num_vars) {}

  std::size_t num_vars() const noexcept { return num_vars_; }
  std::size_t num_entries() const noexcept { return table_.size(); }
  double offset() const noexcept { return offset_; }
  const Table& entries() const noexcept { return table_; }

  /// Adds v to coefficient (i, j); the pair is ordered internally. Entries
  /// that become exactly zero are removed.
  void add(std::size_t i, std::size_t j, double v) {
    if (!std::isfinite(v)) throw BuildError("non-finite QUBO coefficient");
    if (i >= num_vars_ || j >= num_vars_)
      throw BuildError("QUBO variable index out of range: (" + std::to_string(i) + ", " +
                       std::to_string(j) + ") with " + std::to_string(num_vars_) + " variables");
    if (v == 0.0) return;
    if (j < i) std::swap(i, j);
    auto [it, inserted] = table_.try_emplace(Key{i, j}, v);
    if (!inserted) {
      it->second += v;
      if (it->second == 0.0) table_.erase(it);
    }
  }

  void add_linear(std::size_t i, double v) { add(i, i, v); }

  void add_offset(double v) {
    if (!std::isfinite(v)) throw BuildError("non-finite QUBO offset");
    offset_ += v;
  }

  /// Sets a coefficient verbatim (file import); zero removes the entry.
  void set(std::size_t i, std::size_t j, double v) {
    if (j < i) std::swap(i, j);
    if (i >= num_vars_ || j >= num_vars_) throw BuildError("QUBO variable index out of range");
    if (!std::isfinite(v)) throw BuildError("non-finite QUBO coefficient");
    if (v == 0.0)
      table_.erase(Key{i, j});
    else
      table_[Key{i, j}] = v;
  }

  void set_offset(double v) {
    if (!std::isfinite(v)) throw BuildError("non-finite QUBO offset");
    offset_ = v;
  }

  double coefficient(std::size_t i, std::size_t j) const {
    if (j < i) std::swap(i, j);
    auto it = table_.find(Key{i, j});
    return it == table_.end() ? 0.0 : it->second;
  }

  bool operator==(const QuboModel&) const = default;

 private:
  std::size_t num_vars_ = 0;
  Table table_;
  double offset_ = 0.0;
};

inline void require_assignment(std::size_t expected, std::size_t got) {
  if (expected != got)
    throw InputError("assignment has " + std::to_string(got) + " bits, model has " +
                     std::to_string(expected) + " variables");
}

inline double evaluate_qubo(const QuboModel& m, std::span<const std::uint8_t> bits) {
  require_assignment(m.num_vars(), bits.size());
  double e = m.offset();
  for (const auto& [key, v] : m.entries())
    if (bits[key.first] && bits[key.second]) e += v;
  return e;
}

// ---------------------------------------------------------------------------
// Ising form: H(s) = -sum_{i<j} J_ij s_i s_j - sum_i h_i s_i + offset, with
// s = 1 - 2b.

struct IsingModel {
  std::size_t num_vars = 0;
  std::map<std::pair<std::size_t, std::size_t>, double> couplings;
  std::vector<double> fields;
  double offset = 0.0;

  double energy(std::span<const std::int8_t> spins) const {
    require_assignment(num_vars, spins.size());
    double e = offset;
    for (const auto& [key, j] : couplings) e -= j * spins[key.first] * spins[key.second];
    for (std::size_t i = 0; i < num_vars; ++i) e -= fields[i] * spins[i];
    return e;
  }
};

inline std::vector<std::int8_t> bits_to_spins(std::span<const std::uint8_t> bits) {
  std::vector<std::int8_t> s(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) s[i] = bits[i] ? -1 : 1;
  return s;
}

inline Bits spins_to_bits(std::span<const std::int8_t> spins) {
  Bits b(spins.size());
  for (std::size_t i = 0; i < spins.size(); ++i) b[i] = spins[i] < 0 ? 1 : 0;
  return b;
}

inline IsingModel qubo_to_ising(const QuboModel& m) {
  IsingModel out;
  out.num_vars = m.num_vars();
  out.fields.assign(m.num_vars(), 0.0);
  out.offset = m.offset();
  for (const auto& [key, q] : m.entries()) {
    const auto [i, j] = key;
    if (i == j) {
      // q b = q/2 - (q/2) s
      out.fields[i] += q / 2;
      out.offset += q / 2;
    } else {
      // q b_i b_j = q/4 (1 - s_i - s_j + s_i s_j)
      out.offset += q / 4;
      out.fields[i] += q / 4;
      out.fields[j] += q / 4;
      out.couplings[key] -= q / 4;
    }
  }
  std::erase_if(out.couplings, [](const auto& kv) { return kv.second == 0.0; });
  return out;
}

inline QuboModel ising_to_qubo(const IsingModel& is) {
  if (is.fields.size() != is.num_vars) throw InputError("Ising field vector length mismatch");
  QuboModel out(is.num_vars);
  double offset = is.offset;
  for (const auto& [key, j] : is.couplings) {
    const auto [a, b] = key;
    if (a >= b) throw InputError("Ising couplings must satisfy i < j");
    // -J s_a s_b = -J (1 - 2b_a)(1 - 2b_b)
    offset -= j;
    out.add_linear(a, 2 * j);
    out.add_linear(b, 2 * j);
    out.add(a, b, -4 * j);
  }
  for (std::size_t i = 0; i < is.num_vars; ++i) {
    // -h s = -h + 2h b
    offset -= is.fields[i];
    out.add_linear(i, 2 * is.fields[i]);
  }
  out.add_offset(offset);
  return out;
}

// ---------------------------------------------------------------------------
// Literals and the product penalty.

/// A variable or its complement (1 - b).
struct Literal {
  std::size_t var = 0;
  bool negated = false;

  int value(std::span<const std::uint8_t> bits) const {
    const int b = bits[var] ? 1 : 0;
    return negated ? 1 - b : b;
  }
  bool operator==(const Literal&) const = default;
};

inline Literal positive(std::size_t v) { return {v, false}; }
inline Literal negative(std::size_t v) { return {v, true}; }

/// p(a, b, c) = 3c + ab - 2ac - 2bc over {0, 1}.
constexpr int penalty_value(int a, int b, int c) { return 3 * c + a * b - 2 * a * c - 2 * b * c; }

/// Adds weight * value(lit).
inline void add_literal(QuboModel& m, Literal lit, double weight) {
  if (lit.negated) {
    m.add_offset(weight);
    m.add_linear(lit.var, -weight);
  } else {
    m.add_linear(lit.var, weight);
  }
}

/// Adds weight * value(x) * value(y), expanding complements into plain
/// variables and a constant.
inline void add_literal_product(QuboModel& m, Literal x, Literal y, double weight) {
  // value = alpha + beta * b
  const double ax = x.negated ? 1.0 : 0.0, bx = x.negated ? -1.0 : 1.0;
  const double ay = y.negated ? 1.0 : 0.0, by = y.negated ? -1.0 : 1.0;
  m.add_offset(weight * ax * ay);
  if (ax * by != 0.0) m.add_linear(y.var, weight * ax * by);
  if (bx * ay != 0.0) m.add_linear(x.var, weight * bx * ay);
  m.add(x.var, y.var, weight * bx * by);  // b * b = b when x.var == y.var
}

/// Adds weight * p(a, b, c), the penalty enforcing c = a * b.
inline void add_penalty(QuboModel& m, Literal a, Literal b, std::size_t c, double weight) {
  if (a.var == b.var || a.var == c || b.var == c)
    throw BuildError("penalty gadget needs three distinct variables");
  if (!(weight > 0.0) || !std::isfinite(weight)) throw BuildError("penalty weight must be positive");
  m.add_linear(c, 3.0 * weight);
  add_literal_product(m, a, b, weight);
  add_literal_product(m, a, positive(c), -2.0 * weight);
  add_literal_product(m, b, positive(c), -2.0 * weight);
}

// ---------------------------------------------------------------------------
// Variable registry.

enum class VariableKind : std::uint8_t { SignalBit, ChainAux, RowAux };

inline const char* to_string(VariableKind k) {
  switch (k) {
    case VariableKind::SignalBit: return "signal";
    case VariableKind::ChainAux: return "chain";
    case VariableKind::RowAux: return "row";
  }
  return "?";
}

/// SignalBit: (row, column, bit). ChainAux: (row, column, chain position).
/// RowAux: (row, 0, chain position).
struct VariableRole {
  VariableKind kind = VariableKind::SignalBit;
  std::size_t row = 0;
  std::size_t column = 0;
  std::size_t position = 0;
  bool operator==(const VariableRole&) const = default;
};

/// Constraint output = value(a) * value(b).
struct Gadget {
  Literal a;
  Literal b;
  std::size_t output = 0;
};

/// Literal product that equals 1 exactly when a row decodes to zero
/// (second literal absent for a single-literal indicator).
struct ZeroIndicator {
  Literal a;
  std::optional<Literal> b;

  int value(std::span<const std::uint8_t> bits) const { return a.value(bits) * (b ? b->value(bits) : 1); }
};

enum class RegistryKind : std::uint8_t { Single, Group };

/// Real: registry column l holds real coefficients for observation l.
/// ComplexPairs: the operator is block-lifted (2M coefficients per observation)
/// and registry columns 2l, 2l+1 hold the real and imaginary parts of
/// observation l.
enum class SignalLayout : std::uint8_t { Real, ComplexPairs };

class VariableRegistry {
 public:
  /// Single observation: M*K signal bits plus K-2 chain auxiliaries per row.
  static VariableRegistry single(std::size_t rows, Quantizer q) {
    if (rows == 0) throw BuildError("registry needs at least one row");
    VariableRegistry reg(RegistryKind::Single, rows, 1, SignalLayout::Real, std::move(q));
    const std::size_t K = reg.bits();
    for (std::size_t i = 0; i < rows; ++i) {
      if (K == 1) {
        reg.zero_.push_back({negative(reg.signal_index(i, 0, 0)), std::nullopt});
        continue;
      }
      // c_0 = 1 - b_0 is a literal; c_j = c_{j-1} (1 - b_j) for j = 1..K-2.
      Literal chain = negative(reg.signal_index(i, 0, 0));
      for (std::size_t j = 1; j + 1 < K; ++j) {
        const std::size_t c = reg.add_variable({VariableKind::ChainAux, i, 0, j - 1});
        reg.gadgets_.push_back({negative(reg.signal_index(i, 0, j)), chain, c});
        chain = positive(c);
      }
      reg.zero_.push_back({chain, negative(reg.signal_index(i, 0, K - 1))});
    }
    return reg;
  }

  /// Row-grouped form: every (row, column) entry reduces prod_k (1 - b_k) to a
  /// single literal (K-1 chain auxiliaries), then every row reduces the
  /// product over its columns to one literal (columns-1 row auxiliaries).
  static VariableRegistry group(std::size_t rows, std::size_t observation_columns, Quantizer q,
                                SignalLayout layout = SignalLayout::Real) {
    if (rows == 0) throw BuildError("registry needs at least one row");
    if (observation_columns == 0) throw BuildError("group registry needs at least one column");
    const std::size_t L = observation_columns * (layout == SignalLayout::ComplexPairs ? 2 : 1);
    VariableRegistry reg(RegistryKind::Group, rows, observation_columns, layout, std::move(q));
    const std::size_t K = reg.bits();
    std::vector<Literal> entry_zero(rows * L);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t l = 0; l < L; ++l) {
        Literal chain = negative(reg.signal_index(i, l, 0));
        for (std::size_t j = 1; j < K; ++j) {
          const std::size_t c = reg.add_variable({VariableKind::ChainAux, i, l, j - 1});
          reg.gadgets_.push_back({negative(reg.signal_index(i, l, j)), chain, c});
          chain = positive(c);
        }
        entry_zero[i * L + l] = chain;
      }
    for (std::size_t i = 0; i < rows; ++i) {
      Literal chain = entry_zero[i * L];
      for (std::size_t l = 1; l < L; ++l) {
        const std::size_t d = reg.add_variable({VariableKind::RowAux, i, 0, l - 1});
        reg.gadgets_.push_back({entry_zero[i * L + l], chain, d});
        chain = positive(d);
      }
      reg.zero_.push_back({chain, std::nullopt});
    }
    return reg;
  }

  RegistryKind kind() const noexcept { return kind_; }
  SignalLayout layout() const noexcept { return layout_; }
  std::size_t rows() const noexcept { return rows_; }
  /// Real signal columns per row (2x observation columns for ComplexPairs).
  std::size_t columns() const noexcept { return columns_; }
  std::size_t observation_columns() const noexcept { return observation_columns_; }
  std::size_t bits() const noexcept { return quantizer_.bit_length(); }
  const Quantizer& quantizer() const noexcept { return quantizer_; }

  std::size_t num_variables() const noexcept { return roles_.size(); }
  std::size_t num_signal_bits() const noexcept { return rows_ * columns_ * bits(); }
  const VariableRole& role(std::size_t v) const { return roles_.at(v); }
  const std::vector<VariableRole>& roles() const noexcept { return roles_; }
  const std::vector<Gadget>& gadgets() const noexcept { return gadgets_; }
  const std::vector<ZeroIndicator>& zero_indicators() const noexcept { return zero_; }

  std::size_t signal_index(std::size_t row, std::size_t column, std::size_t bit) const {
    return (row * columns_ + column) * bits() + bit;
  }

  /// Observation column fed by a registry column.
  std::size_t observation_of(std::size_t column) const {
    return layout_ == SignalLayout::ComplexPairs ? column / 2 : column;
  }

  /// Coefficient index within the lifted coefficient vector of its observation.
  std::size_t coefficient_of(std::size_t row, std::size_t column) const {
    return layout_ == SignalLayout::ComplexPairs ? (column % 2) * rows_ + row : row;
  }

  /// Coefficients per observation that the real operator multiplies.
  std::size_t coefficients_per_observation() const {
    return layout_ == SignalLayout::ComplexPairs ? 2 * rows_ : rows_;
  }

  bool operator==(const VariableRegistry& o) const {
    return kind_ == o.kind_ && layout_ == o.layout_ && rows_ == o.rows_ &&
           observation_columns_ == o.observation_columns_ && quantizer_ == o.quantizer_;
  }

 private:
  VariableRegistry(RegistryKind kind, std::size_t rows, std::size_t observation_columns,
                   SignalLayout layout, Quantizer q)
      : kind_(kind),
        layout_(layout),
        rows_(rows),
        observation_columns_(observation_columns),
        columns_(observation_columns * (layout == SignalLayout::ComplexPairs ? 2 : 1)),
        quantizer_(std::move(q)) {
    roles_.reserve(num_signal_bits());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t l = 0; l < columns_; ++l)
        for (std::size_t k = 0; k < bits(); ++k) roles_.push_back({VariableKind::SignalBit, i, l, k});
  }

  std::size_t add_variable(VariableRole r) {
    roles_.push_back(r);
    return roles_.size() - 1;
  }

  RegistryKind kind_;
  SignalLayout layout_;
  std::size_t rows_;
  std::size_t observation_columns_;
  std::size_t columns_;
  Quantizer quantizer_;
  std::vector<VariableRole> roles_;
  std::vector<Gadget> gadgets_;
  std::vector<ZeroIndicator> zero_;
};

// ---------------------------------------------------------------------------
// Builders.

struct BuildParams {
  double gamma0 = 0.001;
  double lambda_c = 1.5;
  double lambda_d = 1.5;

  void validate() const {
    auto positive_finite = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive_finite(gamma0)) throw BuildError("gamma0 must be positive");
    if (!positive_finite(lambda_c)) throw BuildError("lambda_c must be positive");
    if (!positive_finite(lambda_d)) throw BuildError("lambda_d must be positive");
  }
};

struct QuboBuild {
  QuboModel model;
  VariableRegistry registry;
  std::vector<std::string> warnings;
};

namespace detail {

/// (1 / 2 gamma0) * sum_l ||x_l - A z_l||^2 with z_l decoded from the signal
/// bits of observation l.
inline void add_fidelity(QuboModel& m, const VariableRegistry& reg, const RealMatrix& A,
                         const RealMatrix& X, double gamma0) {
  const double scale = 1.0 / (2.0 * gamma0);
  const RealMatrix gram = A.transpose() * A;
  const auto w = reg.quantizer().weights();
  struct Term {
    std::size_t var;
    Eigen::Index coef;
    double weight;
  };
  for (Eigen::Index l = 0; l < X.cols(); ++l) {
    const RealVector corr = A.transpose() * X.col(l);
    m.add_offset(scale * X.col(l).squaredNorm());
    std::vector<Term> terms;
    for (std::size_t i = 0; i < reg.rows(); ++i)
      for (std::size_t c = 0; c < reg.columns(); ++c) {
        if (reg.observation_of(c) != static_cast<std::size_t>(l)) continue;
        const auto p = static_cast<Eigen::Index>(reg.coefficient_of(i, c));
        for (std::size_t k = 0; k < reg.bits(); ++k)
          if (w[k] != 0.0) terms.push_back({reg.signal_index(i, c, k), p, w[k]});
      }
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const Term& a = terms[t];
      m.add_linear(a.var, scale * (gram(a.coef, a.coef) * a.weight * a.weight - 2.0 * corr(a.coef) * a.weight));
      for (std::size_t u = t + 1; u < terms.size(); ++u) {
        const Term& b = terms[u];
        m.add(a.var, b.var, scale * 2.0 * gram(a.coef, b.coef) * a.weight * b.weight);
      }
    }
  }
}

/// sum over rows of (1 - zero indicator) plus weighted gadget penalties.
inline void add_l0_and_penalties(QuboModel& m, const VariableRegistry& reg, const BuildParams& params) {
  for (const ZeroIndicator& z : reg.zero_indicators()) {
    m.add_offset(1.0);
    if (z.b)
      add_literal_product(m, z.a, *z.b, -1.0);
    else
      add_literal(m, z.a, -1.0);
  }
  for (const Gadget& g : reg.gadgets()) {
    const double weight =
        reg.role(g.output).kind == VariableKind::RowAux ? params.lambda_d : params.lambda_c;
    add_penalty(m, g.a, g.b, g.output, weight);
  }
}

inline void check_system(const RealMatrix& A, const RealMatrix& X) {
  detail::require_nonempty(A, "operator");
  detail::require_finite(A, "operator");
  detail::require_finite(X, "observation");
  if (X.rows() != A.rows())
    throw BuildError("observation length " + std::to_string(X.rows()) + " does not match operator rows " +
                     std::to_string(A.rows()));
}

}  // namespace detail

/// Quantized single-observation objective
///   (1 / 2 gamma0) ||x - A B w||^2 + sum_i (1 - prod_k (1 - b_ik))
/// with chain auxiliaries for K > 2.
inline QuboBuild build_l0_qubo(const RealMatrix& A, const RealVector& x, const Quantizer& q,
                               const BuildParams& params) {
  params.validate();
  detail::check_system(A, x);
  QuboBuild out{QuboModel{}, VariableRegistry::single(static_cast<std::size_t>(A.cols()), q), {}};
  out.model = QuboModel(out.registry.num_variables());
  detail::add_fidelity(out.model, out.registry, A, x, params.gamma0);
  detail::add_l0_and_penalties(out.model, out.registry, params);
  if (params.lambda_c < 1.0 && !out.registry.gadgets().empty())
    out.warnings.push_back("lambda_c < 1: one unit of l0 can pay for a violated chain constraint");
  return out;
}

/// Row-grouped objective over the columns of X:
///   (1 / 2 gamma0) sum_l ||x_l - A z_l||^2 + #(nonzero rows of Z).
/// With SignalLayout::ComplexPairs, A is the block-lifted operator (2M
/// columns) and X holds stacked [Re; Im] observation columns.
inline QuboBuild build_group_l0_qubo(const RealMatrix& A, const RealMatrix& X, const Quantizer& q,
                                     const BuildParams& params, SignalLayout layout = SignalLayout::Real) {
  params.validate();
  detail::check_system(A, X);
  if (X.cols() < 1) throw BuildError("group objective needs at least one observation column");
  if (layout == SignalLayout::ComplexPairs && A.cols() % 2 != 0)
    throw BuildError("block-lifted operator must have an even number of columns");
  const auto rows = static_cast<std::size_t>(layout == SignalLayout::ComplexPairs ? A.cols() / 2 : A.cols());
  QuboBuild out{QuboModel{}, VariableRegistry::group(rows, static_cast<std::size_t>(X.cols()), q, layout), {}};
  out.model = QuboModel(out.registry.num_variables());
  detail::add_fidelity(out.model, out.registry, A, X, params.gamma0);
  detail::add_l0_and_penalties(out.model, out.registry, params);
  if (params.lambda_c < 1.0 && out.registry.bits() > 1)
    out.warnings.push_back("lambda_c < 1: one unit of l0 can pay for a violated chain constraint");
  if (params.lambda_d < 1.0 && out.registry.columns() > 1)
    out.warnings.push_back("lambda_d < 1: one unit of l0 can pay for a violated row constraint");
  return out;
}

// ---------------------------------------------------------------------------
// Decoding and constraint checks.

/// Decoded real signal matrix, rows x registry columns; auxiliaries ignored.
inline RealMatrix decode_solution(const VariableRegistry& reg, std::span<const std::uint8_t> bits) {
  require_assignment(reg.num_variables(), bits.size());
  RealMatrix Z(reg.rows(), reg.columns());
  for (std::size_t i = 0; i < reg.rows(); ++i)
    for (std::size_t l = 0; l < reg.columns(); ++l)
      Z(i, l) = reg.quantizer().decode(bits.subspan(reg.signal_index(i, l, 0), reg.bits()));
  return Z;
}

/// Single-observation decode as a vector.
inline RealVector decode_signal(const VariableRegistry& reg, std::span<const std::uint8_t> bits) {
  return decode_solution(reg, bits).col(0);
}

/// Complex view of a decoded matrix: rows x observation columns.
inline ComplexMatrix to_complex_signal(const VariableRegistry& reg, const RealMatrix& Z) {
  ComplexMatrix out(reg.rows(), reg.observation_columns());
  for (std::size_t i = 0; i < reg.rows(); ++i)
    for (std::size_t l = 0; l < reg.observation_columns(); ++l)
      out(i, l) = reg.layout() == SignalLayout::ComplexPairs ? Complex(Z(i, 2 * l), Z(i, 2 * l + 1))
                                                             : Complex(Z(i, l), 0.0);
  return out;
}

/// Lifted coefficient matrix (coefficients per observation x observations)
/// that the real operator multiplies.
inline RealMatrix lifted_coefficients(const VariableRegistry& reg, const RealMatrix& Z) {
  RealMatrix out = RealMatrix::Zero(reg.coefficients_per_observation(), reg.observation_columns());
  for (std::size_t i = 0; i < reg.rows(); ++i)
    for (std::size_t l = 0; l < reg.columns(); ++l) out(reg.coefficient_of(i, l), reg.observation_of(l)) = Z(i, l);
  return out;
}

struct Violation {
  std::size_t variable = 0;
  VariableRole role;
  bool operator==(const Violation&) const = default;
};

/// Every auxiliary whose value differs from the product of its inputs.
inline std::vector<Violation> constraint_violations(const VariableRegistry& reg,
                                                    std::span<const std::uint8_t> bits) {
  require_assignment(reg.num_variables(), bits.size());
  std::vector<Violation> out;
  for (const Gadget& g : reg.gadgets()) {
    const int expected = g.a.value(bits) * g.b.value(bits);
    if ((bits[g.output] ? 1 : 0) != expected) out.push_back({g.output, reg.role(g.output)});
  }
  return out;
}

/// Completes an assignment by setting every auxiliary to the product of its
/// inputs (gadgets are stored in dependency order).
inline Bits satisfy_constraints(const VariableRegistry& reg, Bits bits) {
  require_assignment(reg.num_variables(), bits.size());
  for (const Gadget& g : reg.gadgets())
    bits[g.output] = static_cast<std::uint8_t>(g.a.value(bits) * g.b.value(bits));
  return bits;
}

/// Assignment whose signal bits encode Z (rows x registry columns, values on
/// the quantizer grid via quantize) with consistent auxiliaries.
inline Bits encode_solution(const VariableRegistry& reg, const RealMatrix& Z) {
  if (Z.rows() != static_cast<Eigen::Index>(reg.rows()) || Z.cols() != static_cast<Eigen::Index>(reg.columns()))
    throw InputError("signal matrix shape does not match the registry");
  Bits bits(reg.num_variables(), 0);
  for (std::size_t i = 0; i < reg.rows(); ++i)
    for (std::size_t l = 0; l < reg.columns(); ++l) {
      const Bits p = reg.quantizer().quantize(Z(i, l));
      std::copy(p.begin(), p.end(), bits.begin() + static_cast<std::ptrdiff_t>(reg.signal_index(i, l, 0)));
    }
  return satisfy_constraints(reg, std::move(bits));
}

// ---------------------------------------------------------------------------
// Unquantized objective evaluation.

/// (1 / 2 gamma0) ||x - A z||^2 + ||z||_0 for a real operator and signal.
inline double evaluate_l0_objective(const RealMatrix& A, const RealVector& x, const RealVector& z, double gamma0) {
  if (!(gamma0 > 0.0)) throw InputError("gamma0 must be positive");
  if (A.cols() != z.size() || A.rows() != x.size()) throw InputError("objective dimensions are inconsistent");
  return (x - A * z).squaredNorm() / (2.0 * gamma0) + static_cast<double>(count_nonzero(z));
}

/// Complex operator with a complex signal.
inline double evaluate_l0_objective(const ComplexMatrix& A, const ComplexVector& x, const ComplexVector& z,
                                    double gamma0) {
  if (!(gamma0 > 0.0)) throw InputError("gamma0 must be positive");
  if (A.cols() != z.size() || A.rows() != x.size()) throw InputError("objective dimensions are inconsistent");
  return (x - A * z).squaredNorm() / (2.0 * gamma0) + static_cast<double>(count_nonzero(z));
}

/// Complex operator with a real signal (length M) or a stacked complex
/// signal [u; v] (length 2M).
inline double evaluate_l0_objective(const ComplexMatrix& A, const ComplexVector& x, const RealVector& z,
                                    double gamma0) {
  if (z.size() == 2 * A.cols() && A.cols() > 0) return evaluate_l0_objective(A, x, unstack_complex(z), gamma0);
  return evaluate_l0_objective(A, x, ComplexVector(z.cast<Complex>()), gamma0);
}

/// (1 / 2 gamma0) ||X - A Z||_F^2 + #(nonzero rows of Z).
inline double evaluate_group_l0_objective(const ComplexMatrix& A, const ComplexMatrix& X, const ComplexMatrix& Z,
                                          double gamma0) {
  if (!(gamma0 > 0.0)) throw InputError("gamma0 must be positive");
  if (A.cols() != Z.rows() || A.rows() != X.rows() || X.cols() != Z.cols())
    throw InputError("objective dimensions are inconsistent");
  return (X - A * Z).squaredNorm() / (2.0 * gamma0) + static_cast<double>(count_nonzero_rows(Z));
}

inline double evaluate_group_l0_objective(const RealMatrix& A, const RealMatrix& X, const RealMatrix& Z,
                                          double gamma0) {
  if (!(gamma0 > 0.0)) throw InputError("gamma0 must be positive");
  if (A.cols() != Z.rows() || A.rows() != X.rows() || X.cols() != Z.cols())
    throw InputError("objective dimensions are inconsistent");
  return (X - A * Z).squaredNorm() / (2.0 * gamma0) + static_cast<double>(count_nonzero_rows(Z));
}

}  // namespace l0qubo
