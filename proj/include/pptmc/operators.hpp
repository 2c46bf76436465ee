#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace pptmc {

using cxd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Numerical failures (eigensolver / interior-point breakdown), as opposed to
// contract violations which throw std::invalid_argument.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Instance exceeds the dense-size budget.
struct budget_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SpectralReport {
  VectorXd eigenvalues;      // ascending
  double min_eigenvalue = 0.0;
  double max_abs_eigenvalue = 0.0;  // operator norm
  double trace = 0.0;
  double trace_norm = 0.0;
};

// Dense Hermitian operator on a tensor product of finite-dimensional systems.
// dims lists the local dimensions in tensor order; the matrix side is their
// product. Construction validates Hermiticity and stores the exact Hermitian
// part so downstream algebra never sees asymmetry at roundoff level.
class HermitianOp {
 public:
  HermitianOp() = default;
  HermitianOp(std::vector<int> dims, const MatrixXcd& m);

  static HermitianOp zero(std::vector<int> dims);
  static HermitianOp identity(std::vector<int> dims);

  const std::vector<int>& dims() const { return dims_; }
  int side() const { return static_cast<int>(m_.rows()); }
  int num_subsystems() const { return static_cast<int>(dims_.size()); }
  const MatrixXcd& mat() const { return m_; }

  // Same matrix with a re-grouped dims list (product must be unchanged).
  HermitianOp with_dims(std::vector<int> new_dims) const;

  HermitianOp operator+(const HermitianOp& o) const;
  HermitianOp operator-(const HermitianOp& o) const;
  HermitianOp operator*(double s) const;

 private:
  std::vector<int> dims_;
  MatrixXcd m_;
};

inline HermitianOp operator*(double s, const HermitianOp& o) { return o * s; }

// Multi-index helpers for a dims list.
int dims_product(const std::vector<int>& dims);
std::vector<int> decode_index(int flat, const std::vector<int>& dims);
int encode_index(const std::vector<int>& idx, const std::vector<int>& dims);

HermitianOp tensor(const HermitianOp& a, const HermitianOp& b);

// Trace out all subsystems not listed in keep (ascending, no duplicates).
HermitianOp partial_trace(const HermitianOp& o, const std::vector<int>& keep);

// Transpose the listed subsystem between row and column indices:
// for bipartite A(x)B with sub=0, out[(a,b),(a',b')] = in[(a',b),(a,b')].
HermitianOp partial_transpose(const HermitianOp& o, int sub);
HermitianOp partial_transpose(const HermitianOp& o, const std::vector<int>& subs);

// Reorder subsystems: new slot k holds old subsystem perm[k].
HermitianOp permute_subsystems(const HermitianOp& o, const std::vector<int>& perm);

HermitianOp transpose(const HermitianOp& o);

// Eigenvalues via the real symmetric embedding [[Re,-Im],[Im,Re]]; every
// eigenvalue of the embedding appears twice, so traces are halved.
SpectralReport spectral(const HermitianOp& o);
bool is_psd(const HermitianOp& o, double tol = 1e-9);

double trace_of(const HermitianOp& o);
// Hilbert-Schmidt inner product Tr[a b]; real for Hermitian arguments.
double trace_inner(const HermitianOp& a, const HermitianOp& b);
double max_abs(const HermitianOp& o);
double max_abs_diff(const HermitianOp& a, const HermitianOp& b);

// Real symmetric embedding of a complex matrix and its inverse.
MatrixXd real_embedding(const MatrixXcd& m);
MatrixXcd from_real_embedding(const MatrixXd& e);

// Rank-one projector |v><v| (v need not be normalized).
HermitianOp outer(const VectorXcd& v, std::vector<int> dims);

// Standard states and operators.
HermitianOp omega(int d);                 // unnormalized max-entangled, trace d
HermitianOp max_entangled_state(int d);   // omega(d)/d
HermitianOp maximally_mixed(int d);
HermitianOp bell_phi_plus();
HermitianOp bell_phi_minus();
HermitianOp bell_psi_plus();
HermitianOp bell_psi_minus();
HermitianOp swap_operator(int d);
MatrixXcd pauli(int k);                   // 0:I 1:X 2:Y 3:Z

}  // namespace pptmc
