#pragma once

#include "pptmc/operators.hpp"

#include <functional>
#include <vector>

namespace pptmc {

// Isometric real coordinates for Hermitian matrices of side n, dimension n^2:
//   [A_00..A_(n-1)(n-1); sqrt2*Re A_ij (i<j, lex); sqrt2*Im A_ij (i<j, lex)]
// so that csvec(A).dot(csvec(B)) == Tr[A B] exactly for Hermitian A, B.
int csvec_dim(int n);
int pair_index(int i, int j, int n);  // i < j, lexicographic
VectorXd csvec(const MatrixXcd& a);
MatrixXcd csmat(const VectorXd& v, int n);

// Same for real symmetric matrices, dimension n(n+1)/2:
//   [A_kk; sqrt2*A_ij (i<j)]
int rsvec_dim(int n);
VectorXd rsvec(const MatrixXd& a);
MatrixXd rsmat(const VectorXd& v, int n);

struct MapEntry {
  int row = 0, col = 0;
  double val = 0.0;
};

// Sparse linear map between Hermitian operator spaces, stored in csvec
// coordinates. Because csvec is an isometry, adjoint() is a plain transpose
// of the coefficient triplets.
class LinMap {
 public:
  LinMap() = default;
  LinMap(int in_side, int out_side) : in_side_(in_side), out_side_(out_side) {}

  int in_side() const { return in_side_; }
  int out_side() const { return out_side_; }
  const std::vector<MapEntry>& entries() const { return entries_; }

  void add_entry(int row, int col, double val);

  VectorXd apply(const VectorXd& x) const;
  MatrixXcd apply_op(const MatrixXcd& x) const;

  LinMap adjoint() const;
  LinMap scaled(double s) const;
  MatrixXd to_matrix() const;

  static LinMap identity(int n);
  static LinMap transpose_map(int n);
  static LinMap partial_transpose_map(const std::vector<int>& dims, int sub);
  // X -> X (x) 1_d and X -> 1_d (x) X
  static LinMap tensor_id_right(int n, int d);
  static LinMap tensor_id_left(int d, int n);
  static LinMap ptrace_map(const std::vector<int>& dims, const std::vector<int>& keep);
  // X -> [Tr F X] into the side-1 space
  static LinMap inner_map(const MatrixXcd& f);
  // t -> t*F from the side-1 space
  static LinMap times_op_map(const MatrixXcd& f);

  friend LinMap compose(const LinMap& a, const LinMap& b);  // a after b
  friend LinMap add(const LinMap& a, const LinMap& b);

 private:
  int in_side_ = 0, out_side_ = 0;
  std::vector<MapEntry> entries_;
};

LinMap compose(const LinMap& a, const LinMap& b);
LinMap add(const LinMap& a, const LinMap& b);

}  // namespace pptmc
