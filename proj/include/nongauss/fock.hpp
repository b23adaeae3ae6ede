#pragma once

// Dense states and operators on a truncated multi-mode Fock space.
//
// Basis ordering is row-major over modes: the occupation tuple (n_0, ..., n_{k-1})
// maps to index sum_k n_k * prod_{j>k} D_j, so the last mode varies fastest.

#include "nongauss/error.hpp"
#include "nongauss/special.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace nongauss {

namespace tol {
inline constexpr double hermitian = 1e-10;
inline constexpr double eigenvalue_floor = -1e-10;
inline constexpr double imaginary_residue = 1e-10;
inline constexpr double trace_excess = 1e-9;
inline constexpr double max_trace_deficit = 1e-6;
inline constexpr double tail_budget = 1e-8;
}  // namespace tol

class ModeShape {
 public:
  ModeShape() = default;
  explicit ModeShape(std::vector<int> cutoffs) : cutoffs_(std::move(cutoffs)) {
    if (cutoffs_.empty()) throw Error(ErrorKind::invalid_dimension, "at least one mode is required");
    for (int d : cutoffs_) {
      if (d < 1) throw Error(ErrorKind::invalid_dimension, "cutoff must be positive");
    }
  }
  static ModeShape single(int cutoff) { return ModeShape({cutoff}); }

  int modes() const { return static_cast<int>(cutoffs_.size()); }
  int cutoff(int mode) const { return cutoffs_.at(mode); }
  const std::vector<int>& cutoffs() const { return cutoffs_; }

  Eigen::Index dim() const {
    Eigen::Index d = 1;
    for (int c : cutoffs_) d *= c;
    return d;
  }

  /// Index distance between neighbouring occupations of `mode`.
  Eigen::Index stride(int mode) const {
    Eigen::Index s = 1;
    for (int j = mode + 1; j < modes(); ++j) s *= cutoffs_[j];
    return s;
  }

  Eigen::Index index(std::span<const int> occupation) const {
    Eigen::Index i = 0;
    for (int k = 0; k < modes(); ++k) i = i * cutoffs_[k] + occupation[k];
    return i;
  }

  std::vector<int> occupation(Eigen::Index index) const {
    std::vector<int> occ(cutoffs_.size());
    for (int k = modes() - 1; k >= 0; --k) {
      occ[k] = static_cast<int>(index % cutoffs_[k]);
      index /= cutoffs_[k];
    }
    return occ;
  }

  friend bool operator==(const ModeShape&, const ModeShape&) = default;

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t k = 0; k < cutoffs_.size(); ++k) {
      if (k) s += ",";
      s += std::to_string(cutoffs_[k]);
    }
    return s + ")";
  }

 private:
  std::vector<int> cutoffs_;
};

enum class Validation { full, basic };

class FockState {
 public:
  FockState() = default;

  /// Wraps a density matrix. `basic` skips the eigenvalue check, which is
  /// O(dim^3); use it only for matrices produced by positivity-preserving maps.
  static FockState from_matrix(ModeShape shape, cmat rho, Flags flags = {},
                               Validation validation = Validation::full) {
    FockState s;
    s.shape_ = std::move(shape);
    s.rho_ = std::move(rho);
    s.flags_ = flags;
    s.validate(validation);
    return s;
  }

  static FockState from_ket(ModeShape shape, const cvec& ket, Flags flags = {}) {
    if (ket.size() != shape.dim()) {
      throw Error(ErrorKind::invalid_dimension, "ket length does not match " + shape.to_string());
    }
    FockState s;
    s.shape_ = std::move(shape);
    s.rho_ = ket * ket.adjoint();
    s.ket_ = ket;
    s.flags_ = flags;
    s.validate(Validation::basic);
    return s;
  }

  const ModeShape& shape() const { return shape_; }
  int modes() const { return shape_.modes(); }
  const cmat& matrix() const { return rho_; }
  bool is_pure_backed() const { return ket_.has_value(); }
  const std::optional<cvec>& ket() const { return ket_; }
  Flags flags() const { return flags_; }
  void add_flags(Flags f) { flags_ |= f; }

  double trace() const { return rho_.trace().real(); }
  double trace_deficit() const { return 1.0 - trace(); }

 private:
  void validate(Validation validation) {
    if (rho_.rows() != shape_.dim() || rho_.cols() != shape_.dim()) {
      throw Error(ErrorKind::invalid_dimension,
                  "matrix side " + std::to_string(rho_.rows()) + " does not match " + shape_.to_string());
    }
    const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol::hermitian) {
      throw Error(ErrorKind::validation, "matrix is not Hermitian (max |rho - rho^dag| = " +
                                             std::to_string(herm) + ")");
    }
    const cplx tr = rho_.trace();
    if (std::abs(tr.imag()) > tol::imaginary_residue) {
      throw Error(ErrorKind::numeric_integrity, "trace has an imaginary part");
    }
    if (tr.real() > 1.0 + tol::trace_excess) {
      throw Error(ErrorKind::validation, "trace exceeds 1 (" + std::to_string(tr.real()) + ")");
    }
    const double deficit = 1.0 - tr.real();
    if (deficit > tol::max_trace_deficit) {
      throw Error(ErrorKind::validation, "trace deficit " + std::to_string(deficit) +
                                             " exceeds budget " + std::to_string(tol::max_trace_deficit));
    }
    if (deficit > tol::tail_budget) flags_.set(Flag::trace_deficit);
    if (validation == Validation::full) {
      Eigen::SelfAdjointEigenSolver<cmat> es(rho_, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < tol::eigenvalue_floor) {
        throw Error(ErrorKind::validation,
                    "negative eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
      }
    }
  }

  ModeShape shape_;
  cmat rho_;
  std::optional<cvec> ket_;
  Flags flags_;
};

class FockOperator {
 public:
  FockOperator() = default;
  FockOperator(ModeShape shape, cmat matrix, Flags flags = {})
      : shape_(std::move(shape)), matrix_(std::move(matrix)), flags_(flags) {
    if (matrix_.rows() != shape_.dim() || matrix_.cols() != shape_.dim()) {
      throw Error(ErrorKind::invalid_dimension, "operator matrix does not match " + shape_.to_string());
    }
  }

  const ModeShape& shape() const { return shape_; }
  const cmat& matrix() const { return matrix_; }
  Flags flags() const { return flags_; }

  FockOperator adjoint() const { return {shape_, matrix_.adjoint(), flags_}; }

  friend FockOperator operator*(const FockOperator& a, const FockOperator& b) {
    if (!(a.shape_ == b.shape_)) throw Error(ErrorKind::shape_mismatch, "operator product");
    return {a.shape_, a.matrix_ * b.matrix_, a.flags_ | b.flags_};
  }

  /// U rho U^dag.
  FockState conjugate(const FockState& rho) const {
    if (!(shape_ == rho.shape())) throw Error(ErrorKind::shape_mismatch, "operator and state shapes differ");
    cmat out = matrix_ * rho.matrix() * matrix_.adjoint();
    out = 0.5 * (out + out.adjoint()).eval();
    return FockState::from_matrix(shape_, std::move(out), rho.flags() | flags_, Validation::basic);
  }

  cvec apply(const cvec& ket) const { return matrix_ * ket; }

 private:
  ModeShape shape_;
  cmat matrix_;
  Flags flags_;
};

// ---------------------------------------------------------------------------
// Builders

/// Annihilation operator on one mode: a|n> = sqrt(n)|n-1>.
inline FockOperator ladder(int cutoff) {
  if (cutoff < 2) throw Error(ErrorKind::invalid_dimension, "ladder needs cutoff >= 2");
  cmat a = cmat::Zero(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(double(n));
  return {ModeShape::single(cutoff), std::move(a)};
}

/// Embeds a single-mode matrix as op_mode (x) identity on the other modes.
inline cmat embed_single_mode(const ModeShape& shape, int mode, const cmat& op) {
  cmat out = cmat::Identity(1, 1);
  for (int k = 0; k < shape.modes(); ++k) {
    const cmat factor = k == mode ? op : cmat::Identity(shape.cutoff(k), shape.cutoff(k));
    cmat next(out.rows() * factor.rows(), out.cols() * factor.cols());
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      for (Eigen::Index j = 0; j < out.cols(); ++j)
        next.block(i * factor.rows(), j * factor.cols(), factor.rows(), factor.cols()) = out(i, j) * factor;
    out = std::move(next);
  }
  return out;
}

/// Annihilation operator of `mode` acting on the full multi-mode space.
inline cmat mode_ladder(const ModeShape& shape, int mode) {
  const int d = shape.cutoff(mode);
  cmat a = cmat::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(double(n));
  return embed_single_mode(shape, mode, a);
}

inline bool displacement_guard_ok(cplx alpha, int cutoff) {
  const double a = std::abs(alpha);
  return a * a + 6.0 * a + 10.0 <= cutoff;
}

inline bool squeeze_guard_ok(cplx zeta, int cutoff) {
  return 10.0 * std::exp(2.0 * std::abs(zeta)) <= cutoff;
}

/// D(alpha) as the exponential of the truncated generator.
inline FockOperator displacement(cplx alpha, int cutoff) {
  const cmat a = ladder(cutoff).matrix();
  const cmat gen = alpha * a.adjoint() - std::conj(alpha) * a;
  Flags flags;
  if (!displacement_guard_ok(alpha, cutoff)) flags.set(Flag::truncation_guard);
  return {ModeShape::single(cutoff), gen.exp(), flags};
}

/// D(alpha) from the closed-form matrix elements, truncated to cutoff x cutoff.
inline FockOperator displacement_closed_form(cplx alpha, int cutoff) {
  Flags flags;
  if (!displacement_guard_ok(alpha, cutoff)) flags.set(Flag::truncation_guard);
  return {ModeShape::single(cutoff), displacement_elements(alpha, cutoff, cutoff), flags};
}

/// S(zeta) = exp[zeta (a^dag)^2 / 2 - zeta^* a^2 / 2] as the exponential of the truncated generator.
inline FockOperator squeeze(cplx zeta, int cutoff) {
  const cmat a = ladder(cutoff).matrix();
  const cmat gen = 0.5 * zeta * a.adjoint() * a.adjoint() - 0.5 * std::conj(zeta) * a * a;
  Flags flags;
  if (!squeeze_guard_ok(zeta, cutoff)) flags.set(Flag::truncation_guard);
  return {ModeShape::single(cutoff), gen.exp(), flags};
}

struct TwoModeSqueeze {
  cplx xi;
};
struct BeamSplitter {
  double theta;  // transmissivity cos^2(theta)
};

/// Two-mode squeezer exp(xi a1^dag a2^dag - xi^* a1 a2) or beam splitter
/// exp[i theta (a1^dag a2 + a2^dag a1)], built on the tensor space.
template <class Gate>
FockOperator two_mode_gate(const Gate& gate, int cutoff1, int cutoff2) {
  if (cutoff1 < 2 || cutoff2 < 2) throw Error(ErrorKind::invalid_dimension, "two-mode gate needs cutoffs >= 2");
  const ModeShape shape({cutoff1, cutoff2});
  const cmat a1 = mode_ladder(shape, 0);
  const cmat a2 = mode_ladder(shape, 1);
  cmat gen;
  Flags flags;
  if constexpr (std::is_same_v<Gate, TwoModeSqueeze>) {
    gen = gate.xi * a1.adjoint() * a2.adjoint() - std::conj(gate.xi) * a1 * a2;
    if (!squeeze_guard_ok(gate.xi, std::min(cutoff1, cutoff2))) flags.set(Flag::truncation_guard);
  } else {
    static_assert(std::is_same_v<Gate, BeamSplitter>, "unsupported two-mode gate");
    gen = cplx(0.0, gate.theta) * (a1.adjoint() * a2 + a2.adjoint() * a1);
  }
  return {shape, gen.exp(), flags};
}

/// Smallest cutoff D with (n_t/(1+n_t))^D <= tail.
inline int thermal_cutoff(double n_t, double tail = tol::tail_budget) {
  if (n_t <= 0.0) return 1;
  const double ratio = n_t / (1.0 + n_t);
  return static_cast<int>(std::ceil(std::log(tail) / std::log(ratio)));
}

inline FockState thermal_state(double n_t, int cutoff) {
  if (!(n_t >= 0.0)) throw Error(ErrorKind::domain, "thermal occupation must be non-negative");
  if (cutoff < 1) throw Error(ErrorKind::invalid_dimension, "cutoff must be positive");
  Flags flags;
  if (n_t > 0.0 && std::pow(n_t / (1.0 + n_t), cutoff) > tol::tail_budget) flags.set(Flag::truncation_guard);
  const rvec p = thermal_populations(n_t, cutoff);
  return FockState::from_matrix(ModeShape::single(cutoff), p.cast<cplx>().asDiagonal().toDenseMatrix(), flags,
                                Validation::basic);
}

inline FockState fock_state(int p, int cutoff) {
  if (p < 0) throw Error(ErrorKind::domain, "photon number must be non-negative");
  if (cutoff < p + 1) throw Error(ErrorKind::invalid_dimension, "cutoff must exceed the photon number");
  cvec ket = cvec::Zero(cutoff);
  ket(p) = 1.0;
  return FockState::from_ket(ModeShape::single(cutoff), ket);
}

// ---------------------------------------------------------------------------
// Mode-wise application

/// (A acting on `mode`) * M, where M has shape.dim() rows and any number of columns.
inline cmat act_left(const ModeShape& shape, int mode, const cmat& op, const cmat& m) {
  const Eigen::Index dk = shape.cutoff(mode);
  if (op.rows() != dk || op.cols() != dk) throw Error(ErrorKind::shape_mismatch, "act_left operator size");
  if (m.rows() != shape.dim()) throw Error(ErrorKind::shape_mismatch, "act_left operand rows");
  const Eigen::Index inner = shape.stride(mode);
  const Eigen::Index outer = shape.dim() / (dk * inner);
  cmat out(m.rows(), m.cols());
  const cmat op_t = op.transpose();
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index p = 0; p < outer; ++p) {
      const Eigen::Index offset = p * dk * inner;
      Eigen::Map<const cmat> in_block(m.col(c).data() + offset, inner, dk);
      Eigen::Map<cmat> out_block(out.col(c).data() + offset, inner, dk);
      out_block.noalias() = in_block * op_t;
    }
  }
  return out;
}

/// Photon-number-conserving unitary U with U^dag a U = u a, applied as U * M.
///
/// The generator a^dag h a (h = i log u) is block diagonal in total photon
/// number; each block is exponentiated on its own, which is exact for blocks
/// that fit entirely inside the per-mode cutoffs.
class PassiveUnitary {
 public:
  PassiveUnitary(const ModeShape& shape, const cmat& u) : shape_(shape) {
    const int n = shape.modes();
    if (u.rows() != n || u.cols() != n) throw Error(ErrorKind::shape_mismatch, "passive unitary size");
    cmat h = cplx(0.0, 1.0) * u.log();
    h = 0.5 * (h + h.adjoint()).eval();

    std::map<int, std::vector<Eigen::Index>> by_total;
    for (Eigen::Index i = 0; i < shape.dim(); ++i) {
      const auto occ = shape.occupation(i);
      by_total[std::accumulate(occ.begin(), occ.end(), 0)].push_back(i);
    }
    for (auto& [total, indices] : by_total) {
      const Eigen::Index size = static_cast<Eigen::Index>(indices.size());
      std::map<Eigen::Index, Eigen::Index> position;
      for (Eigen::Index b = 0; b < size; ++b) position[indices[b]] = b;
      // generator -i sum_jk h_jk a_j^dag a_k restricted to the block
      cmat gen = cmat::Zero(size, size);
      for (Eigen::Index b = 0; b < size; ++b) {
        const auto occ = shape.occupation(indices[b]);
        for (int k = 0; k < n; ++k) {
          if (occ[k] == 0) continue;
          for (int j = 0; j < n; ++j) {
            auto target = occ;
            target[k] -= 1;
            target[j] += 1;
            if (target[j] >= shape.cutoff(j)) continue;
            const double amp = std::sqrt(double(occ[k])) * std::sqrt(double(target[j]));
            const auto it = position.find(shape.index(target));
            if (it == position.end()) continue;
            gen(it->second, b) += cplx(0.0, -1.0) * h(j, k) * amp;
          }
        }
      }
      blocks_.push_back({indices, gen.exp()});
    }
  }

  cmat apply_left(const cmat& m) const {
    cmat out(m.rows(), m.cols());
    for (const auto& block : blocks_) {
      const Eigen::Index size = static_cast<Eigen::Index>(block.indices.size());
      cmat gathered(size, m.cols());
      for (Eigen::Index b = 0; b < size; ++b) gathered.row(b) = m.row(block.indices[b]);
      const cmat mapped = block.unitary * gathered;
      for (Eigen::Index b = 0; b < size; ++b) out.row(block.indices[b]) = mapped.row(b);
    }
    return out;
  }

  /// Dense matrix of U on the truncated space.
  cmat matrix() const { return apply_left(cmat::Identity(shape_.dim(), shape_.dim())); }

 private:
  struct Block {
    std::vector<Eigen::Index> indices;
    cmat unitary;
  };
  ModeShape shape_;
  std::vector<Block> blocks_;
};

// ---------------------------------------------------------------------------
// Algebra

namespace detail {

/// Index pairs (i_small, i_big) of the basis states common to both shapes.
inline std::vector<std::pair<Eigen::Index, Eigen::Index>> common_indices(const ModeShape& a, const ModeShape& b) {
  if (a.modes() != b.modes()) throw Error(ErrorKind::shape_mismatch, "mode counts differ");
  std::vector<int> common(a.modes());
  for (int k = 0; k < a.modes(); ++k) common[k] = std::min(a.cutoff(k), b.cutoff(k));
  const ModeShape c(common);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
  out.reserve(c.dim());
  for (Eigen::Index i = 0; i < c.dim(); ++i) {
    const auto occ = c.occupation(i);
    out.emplace_back(a.index(occ), b.index(occ));
  }
  return out;
}

inline double checked_real(cplx value, const char* what) {
  if (std::abs(value.imag()) > tol::imaginary_residue * std::max(1.0, std::abs(value.real()))) {
    throw Error(ErrorKind::numeric_integrity, std::string(what) + " has imaginary part " +
                                                  std::to_string(value.imag()));
  }
  return value.real();
}

}  // namespace detail

/// Tr[rho tau]. States may use different cutoffs per mode; the missing
/// entries of the smaller one are zero.
inline double overlap(const FockState& rho, const FockState& tau) {
  if (rho.modes() != tau.modes()) throw Error(ErrorKind::shape_mismatch, "overlap: mode counts differ");
  cplx acc = 0.0;
  if (rho.shape() == tau.shape()) {
    acc = (rho.matrix().cwiseProduct(tau.matrix().transpose())).sum();
  } else {
    const auto idx = detail::common_indices(rho.shape(), tau.shape());
    for (const auto& [ri, ti] : idx)
      for (const auto& [rj, tj] : idx) acc += rho.matrix()(ri, rj) * tau.matrix()(tj, ti);
  }
  return detail::checked_real(acc, "overlap");
}

inline double purity(const FockState& rho) { return overlap(rho, rho); }

/// Hilbert-Schmidt norm sqrt(Tr[rho^dag rho]).
inline double hs_norm(const FockState& rho) { return rho.matrix().norm(); }

inline FockState tensor(const FockState& a, const FockState& b) {
  std::vector<int> cutoffs = a.shape().cutoffs();
  cutoffs.insert(cutoffs.end(), b.shape().cutoffs().begin(), b.shape().cutoffs().end());
  const cmat& ma = a.matrix();
  const cmat& mb = b.matrix();
  cmat out(ma.rows() * mb.rows(), ma.cols() * mb.cols());
  for (Eigen::Index i = 0; i < ma.rows(); ++i)
    for (Eigen::Index j = 0; j < ma.cols(); ++j)
      out.block(i * mb.rows(), j * mb.cols(), mb.rows(), mb.cols()) = ma(i, j) * mb;
  // trace(a (x) b) = trace(a) trace(b), so the deficit stays within budget
  return FockState::from_matrix(ModeShape(std::move(cutoffs)), std::move(out), a.flags() | b.flags(),
                                Validation::basic);
}

/// Traces out the listed modes; the remaining modes keep their order.
inline FockState partial_trace(const FockState& rho, const std::vector<int>& traced_modes) {
  const ModeShape& shape = rho.shape();
  std::vector<bool> traced(shape.modes(), false);
  for (int m : traced_modes) {
    if (m < 0 || m >= shape.modes()) throw Error(ErrorKind::invalid_dimension, "partial_trace: bad mode index");
    traced[m] = true;
  }
  std::vector<int> kept_cutoffs;
  std::vector<int> traced_cutoffs;
  for (int k = 0; k < shape.modes(); ++k) (traced[k] ? traced_cutoffs : kept_cutoffs).push_back(shape.cutoff(k));
  if (kept_cutoffs.empty()) throw Error(ErrorKind::invalid_dimension, "partial_trace: cannot trace all modes");
  const ModeShape kept(kept_cutoffs);
  const ModeShape env(traced_cutoffs.empty() ? std::vector<int>{1} : traced_cutoffs);

  Eigen::Matrix<Eigen::Index, Eigen::Dynamic, Eigen::Dynamic> full(kept.dim(), env.dim());
  for (Eigen::Index i = 0; i < kept.dim(); ++i) {
    const auto ko = kept.occupation(i);
    for (Eigen::Index e = 0; e < env.dim(); ++e) {
      const auto eo = env.occupation(e);
      std::vector<int> occ(shape.modes());
      std::size_t a = 0, b = 0;
      for (int k = 0; k < shape.modes(); ++k) occ[k] = traced[k] ? eo[b++] : ko[a++];
      full(i, e) = shape.index(occ);
    }
  }

  cmat out = cmat::Zero(kept.dim(), kept.dim());
  for (Eigen::Index e = 0; e < env.dim(); ++e)
    for (Eigen::Index j = 0; j < kept.dim(); ++j)
      for (Eigen::Index i = 0; i < kept.dim(); ++i) out(i, j) += rho.matrix()(full(i, e), full(j, e));
  return FockState::from_matrix(kept, std::move(out), rho.flags(), Validation::basic);
}

/// Copies the state into larger (zero-padded) or smaller (cropped) cutoffs.
inline cmat resize_matrix(const ModeShape& from, const cmat& m, const ModeShape& to) {
  cmat out = cmat::Zero(to.dim(), to.dim());
  const auto idx = detail::common_indices(from, to);
  for (const auto& [fi, ti] : idx)
    for (const auto& [fj, tj] : idx) out(ti, tj) = m(fi, fj);
  return out;
}

}  // namespace nongauss
