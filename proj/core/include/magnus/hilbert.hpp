#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace magnus {

using ComplexScalar = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Ordered tensor-factor structure of the working Hilbert space. Index of the
// full space runs fastest over the last factor (row-major kron convention).
struct HilbertLayout {
  struct Factor {
    std::string label;
    int dim;
    bool operator==(const Factor&) const = default;
  };
  std::vector<Factor> factors;

  int dim() const;
  int factor_index(const std::string& label) const;
  bool operator==(const HilbertLayout&) const = default;

  // spin_i(2) x spin_j(2) x fock_c(nc+1) x fock_s(ns+1)
  static HilbertLayout two_qubit_two_mode(int fock_c_cutoff, int fock_s_cutoff);
};

// Dense operator tied to a layout. Construction rejects non-finite entries.
class Operator {
 public:
  Operator(HilbertLayout layout, Matrix m);

  const HilbertLayout& layout() const { return layout_; }
  const Matrix& matrix() const { return mat_; }
  int dim() const { return static_cast<int>(mat_.rows()); }

  bool is_hermitian(double rel_tol = 1e-12) const;
  void require_hermitian(double rel_tol = 1e-12) const;

 private:
  HilbertLayout layout_;
  Matrix mat_;
};

class StateVector {
 public:
  StateVector(HilbertLayout layout, Vector v);

  const HilbertLayout& layout() const { return layout_; }
  const Vector& vector() const { return vec_; }
  double norm() const { return vec_.norm(); }

  // occupation gives one basis index per layout factor.
  static StateVector basis_state(const HilbertLayout& layout,
                                 const std::vector<int>& occupation);

 private:
  HilbertLayout layout_;
  Vector vec_;
};

Matrix kron(const Matrix& a, const Matrix& b);

// Full-space operator from one block per layout factor, in layout order.
// Dimension mismatches are reported with the offending factor label.
Operator kron(const HilbertLayout& layout, const std::vector<Matrix>& factor_ops);

// Operator acting on a single factor, identity elsewhere.
Operator embed(const HilbertLayout& layout, const std::string& factor,
               const Matrix& op);

// Truncated ladder operators on dim n_max+1: a|n> = sqrt(n)|n-1>.
std::pair<Matrix, Matrix> ladder_ops(int n_max);
Matrix number_op(int n_max);

// exp(-i H dt) for Hermitian H via eigendecomposition. Rejects non-Hermitian
// input; the result is unitary to ~1e-10.
Matrix expm_propagator(const Matrix& h, double dt);
Operator expm_propagator(const Operator& h, double dt);

ComplexScalar expectation(const StateVector& psi, const Operator& m);

// 0:I 1:X 2:Y 3:Z
const Matrix& pauli(int k);
// The 16 two-qubit strings kron(pauli(a), pauli(b)), index 4*a+b.
const std::vector<Matrix>& two_qubit_paulis();

}  // namespace magnus
