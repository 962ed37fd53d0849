#include "magnus/hilbert.hpp"

#include <cmath>

#include "magnus/errors.hpp"

namespace magnus {

int HilbertLayout::dim() const {
  int d = 1;
  for (const auto& f : factors) d *= f.dim;
  return d;
}

int HilbertLayout::factor_index(const std::string& label) const {
  for (std::size_t i = 0; i < factors.size(); ++i)
    if (factors[i].label == label) return static_cast<int>(i);
  throw ConfigError("layout has no factor named '" + label + "'");
}

HilbertLayout HilbertLayout::two_qubit_two_mode(int fock_c_cutoff,
                                                int fock_s_cutoff) {
  if (fock_c_cutoff < 0 || fock_s_cutoff < 0)
    throw ConfigError("Fock cutoffs must be non-negative");
  return HilbertLayout{{{"spin_i", 2},
                        {"spin_j", 2},
                        {"fock_c", fock_c_cutoff + 1},
                        {"fock_s", fock_s_cutoff + 1}}};
}

Operator::Operator(HilbertLayout layout, Matrix m)
    : layout_(std::move(layout)), mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols() || mat_.rows() != layout_.dim())
    throw ConfigError("operator matrix does not match layout dimension " +
                      std::to_string(layout_.dim()));
  if (!mat_.allFinite()) throw NumericsError("operator has non-finite entries");
}

bool Operator::is_hermitian(double rel_tol) const {
  const double scale = mat_.cwiseAbs().maxCoeff();
  if (scale == 0.0) return true;
  const double dev = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
  return dev < rel_tol * scale;
}

void Operator::require_hermitian(double rel_tol) const {
  if (!is_hermitian(rel_tol))
    throw NumericsError("operator is not Hermitian within tolerance");
}

StateVector::StateVector(HilbertLayout layout, Vector v)
    : layout_(std::move(layout)), vec_(std::move(v)) {
  if (vec_.size() != layout_.dim())
    throw ConfigError("state vector does not match layout dimension " +
                      std::to_string(layout_.dim()));
  if (!vec_.allFinite()) throw NumericsError("state has non-finite entries");
}

StateVector StateVector::basis_state(const HilbertLayout& layout,
                                     const std::vector<int>& occupation) {
  if (occupation.size() != layout.factors.size())
    throw ConfigError("basis_state needs one index per layout factor");
  int idx = 0;
  for (std::size_t i = 0; i < occupation.size(); ++i) {
    const auto& f = layout.factors[i];
    if (occupation[i] < 0 || occupation[i] >= f.dim)
      throw ConfigError("basis index " + std::to_string(occupation[i]) +
                        " out of range for factor '" + f.label + "'");
    idx = idx * f.dim + occupation[i];
  }
  Vector v = Vector::Zero(layout.dim());
  v(idx) = 1.0;
  return StateVector(layout, std::move(v));
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Operator kron(const HilbertLayout& layout, const std::vector<Matrix>& factor_ops) {
  if (factor_ops.size() != layout.factors.size())
    throw ConfigError("kron expects " + std::to_string(layout.factors.size()) +
                      " factor operators, got " +
                      std::to_string(factor_ops.size()));
  for (std::size_t i = 0; i < factor_ops.size(); ++i) {
    const auto& f = layout.factors[i];
    if (factor_ops[i].rows() != f.dim || factor_ops[i].cols() != f.dim)
      throw ConfigError("kron: factor '" + f.label + "' expects dim " +
                        std::to_string(f.dim) + ", got " +
                        std::to_string(factor_ops[i].rows()) + "x" +
                        std::to_string(factor_ops[i].cols()));
  }
  Matrix m = factor_ops.front();
  for (std::size_t i = 1; i < factor_ops.size(); ++i) m = kron(m, factor_ops[i]);
  return Operator(layout, std::move(m));
}

Operator embed(const HilbertLayout& layout, const std::string& factor,
               const Matrix& op) {
  const int target = layout.factor_index(factor);
  std::vector<Matrix> ops;
  ops.reserve(layout.factors.size());
  for (std::size_t i = 0; i < layout.factors.size(); ++i) {
    if (static_cast<int>(i) == target)
      ops.push_back(op);
    else
      ops.push_back(Matrix::Identity(layout.factors[i].dim, layout.factors[i].dim));
  }
  return kron(layout, ops);
}

std::pair<Matrix, Matrix> ladder_ops(int n_max) {
  if (n_max < 0) throw ConfigError("ladder_ops: cutoff must be non-negative");
  const int d = n_max + 1;
  Matrix a = Matrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return {a, a.adjoint()};
}

Matrix number_op(int n_max) {
  const int d = n_max + 1;
  Matrix n = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

Matrix expm_propagator(const Matrix& h, double dt) {
  const double scale = h.cwiseAbs().maxCoeff();
  if (scale > 0.0 && (h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw NumericsError("expm_propagator: Hamiltonian is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success)
    throw NumericsError("expm_propagator: eigendecomposition failed");
  const auto& w = es.eigenvectors();
  Vector phases(h.rows());
  for (Eigen::Index k = 0; k < h.rows(); ++k) {
    const double x = -es.eigenvalues()(k) * dt;
    phases(k) = ComplexScalar(std::cos(x), std::sin(x));
  }
  return w * phases.asDiagonal() * w.adjoint();
}

Operator expm_propagator(const Operator& h, double dt) {
  return Operator(h.layout(), expm_propagator(h.matrix(), dt));
}

ComplexScalar expectation(const StateVector& psi, const Operator& m) {
  if (!(psi.layout() == m.layout()))
    throw ConfigError("expectation: state and operator layouts differ");
  return psi.vector().dot(m.matrix() * psi.vector());
}

const Matrix& pauli(int k) {
  static const std::vector<Matrix> p = [] {
    std::vector<Matrix> v(4, Matrix(2, 2));
    const ComplexScalar i(0.0, 1.0);
    v[0] << 1, 0, 0, 1;
    v[1] << 0, 1, 1, 0;
    v[2] << 0, -i, i, 0;
    v[3] << 1, 0, 0, -1;
    return v;
  }();
  if (k < 0 || k > 3) throw ConfigError("pauli index out of range");
  return p[k];
}

const std::vector<Matrix>& two_qubit_paulis() {
  static const std::vector<Matrix> strings = [] {
    std::vector<Matrix> v;
    v.reserve(16);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) v.push_back(kron(pauli(a), pauli(b)));
    return v;
  }();
  return strings;
}

}  // namespace magnus
