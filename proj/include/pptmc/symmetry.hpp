#pragma once

#include <vector>

#include "pptmc/converse.hpp"
#include "pptmc/operators.hpp"

namespace pptmc {

struct GroupElement {
  MatrixXcd u;  // input-side unitary
  MatrixXcd v;  // output-side unitary; 1 x 1 identity for input-only groups
};

// Finite unitary group action used for averaging. Weights are uniform when
// the vector is empty; otherwise they must be nonnegative and sum to 1.
struct GroupRep {
  std::vector<GroupElement> elements;
  std::vector<double> weights;

  int dim_a() const;
  int dim_b() const;
  double weight(std::size_t i) const;
  void validate() const;
};

// Group average sum_g w_g W_g o W_g^dag with W_g = u_g^T (x) v_g^dag.
// Idempotent, self-adjoint, and fixes exactly the operators commuting with
// every W_g. o must have side dim_a * dim_b.
HermitianOp twirl(const HermitianOp& o, const GroupRep& g);

// Companion average with W_g = (u_g (x) v_g)^dag. Satisfies
// twirl(o)^TA = twirl_alternate(o^TA), so partial transposition maps one
// averaged family onto the other.
HermitianOp twirl_alternate(const HermitianOp& o, const GroupRep& g);

// Feasibility is preserved by averaging: validates that (phi, lambda) is
// feasible for the minimizing form and m_op for the payoff set, averages all
// three, and re-checks feasibility and the acceptance value. Requires the
// channel to be covariant for g. Returns true when every re-checked
// condition holds within tol.
bool check_prop3(const HermitianOp& phi, const HermitianOp& lambda,
                 const HermitianOp& m_op, const Channel& ch, const GroupRep& g,
                 double eps, double tol = 1e-8);

struct InvariantBasis {
  std::vector<HermitianOp> ops;  // orthonormal Hermitian basis of the fixed space
  MatrixXd gram;                 // trace inner products, identity up to roundoff
};

// Orthonormal basis of the subspace fixed by the twirl, computed from an SVD
// of the averaging map; singular values below 1e-9 are discarded.
InvariantBasis invariant_basis(const GroupRep& g, const std::vector<int>& dims);

GroupRep pauli_group();        // (sigma_k, sigma_k) on 2 (x) 2
GroupRep pauli_group_input();  // (sigma_k, 1): input-side twirl to the maximally mixed state
GroupRep clifford_group();     // (c, c) over the 24 single-qubit Cliffords
GroupRep erasure_group();      // (c, c + [1]): Cliffords acting trivially on the flag
GroupRep trivial_group(int dim_a, int dim_b);

// Bound via the channel's classical reduction instead of the semidefinite
// programs: binary-symmetric likelihood classes for dephasing and
// depolarizing (p in [0, 1/2]; identity is the p = 0 case), the
// permutation-invariant erasure program for erasure (p in [0, 1]).
// n is the number of channel uses.
BoundResult reduced_bound(const ChannelSpec& spec, int n, double eps);

}  // namespace pptmc
