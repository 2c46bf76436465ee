#pragma once

#include <utility>
#include <vector>

#include "pptmc/operators.hpp"
#include "pptmc/sdp.hpp"

namespace pptmc {

// Optimal randomized likelihood-ratio test at type-I acceptance level alpha.
//
// beta           minimal type-II error (mass of the test under q)
// log_beta       natural log of beta, faithful when beta underflows
// achieved_alpha acceptance mass under p (equals alpha up to roundoff)
// threshold      natural-log likelihood ratio of the boundary class;
//                +inf when the test is empty, -inf when everything is taken
// tie_gamma      acceptance probability on the boundary class, in [0, 1]
struct NPTest {
  double beta = 0.0;
  double log_beta = 0.0;
  double achieved_alpha = 0.0;
  double threshold = 0.0;
  double tie_gamma = 0.0;
};

// Minimal type-II error between two explicit finite distributions.
// Outcomes with equal log likelihood ratio are grouped and randomized
// jointly, so permuting outcomes never changes the value. p and q must be
// nonnegative and sum to 1 within 1e-9; alpha must lie in [0, 1]. The
// endpoints are closed forms: alpha = 0 rejects everything and alpha = 1
// accepts the full support of p.
NPTest beta_classical(const std::vector<double>& p,
                      const std::vector<double>& q, double alpha);

// One likelihood-ratio class of an i.i.d. product test. d indexes the class
// (Hamming distance from the sent word, or erasure count), log_p / log_q are
// the total class masses under the two hypotheses, log_ratio their
// per-outcome log likelihood ratio.
struct DistanceClass {
  int d = 0;
  double log_p = 0.0;
  double log_q = 0.0;
  double log_ratio = 0.0;
};

// Exact binomial log-coefficient. Integer arithmetic through n = 60,
// lgamma beyond.
double log_binom(int n, int k);

// Distance classes of n uses of a binary symmetric likelihood pair:
// p-mass C(n,d) p^d (1-p)^(n-d) against the uniform q-mass C(n,d) 2^-n.
std::vector<DistanceClass> bsc_classes(int n, double p);

// Erasure-count classes of n binary-erasure uses against the reference
// measure that puts total weight class_weights[k] * 2^(k-n) on the class
// with k erasures. class_weights must be nonnegative and sum to 1 within
// 1e-9. Classes with zero mass under both measures are omitted.
std::vector<DistanceClass> bec_classes(int n, double p,
                                       const std::vector<double>& class_weights);

// Optimal randomized test over precomputed likelihood classes. Classes are
// taken in descending log_ratio order with exact ties grouped; accumulation
// is compensated in the linear domain and log_beta is a logsumexp over the
// accepted classes, so it stays faithful when beta underflows. The alpha
// endpoints use the same closed forms as beta_classical.
NPTest class_np(std::vector<DistanceClass> classes, double alpha);

// Minimal type-II error for n i.i.d. binary symmetric uses at crossover p
// against the uniform reference, at type-I acceptance level alpha.
// Requires p in (0, 1/2] and 1 <= n <= 100000. O(n) time.
NPTest bsc_beta(int n, double p, double alpha);

// Composite-alternative family for the erasure bound. Only the
// permutation-invariant family is implemented; the closed form below is the
// exact optimum of the corresponding linear program.
enum class QFamily { PermutationInvariant };

struct ErasureBound {
  double value = 0.0;      // may underflow to 0 for large n
  double log_value = 0.0;  // faithful natural log, -inf when value is 0
  int boundary_class = 0;  // largest erasure count whose test is clipped at 1
};

// Largest type-II error any permutation-invariant reference measure can
// force for n binary-erasure uses with erasure probability p, at type-I
// acceptance level 1 - eps. Evaluated in closed form: the equalizing test
// accepts class k with probability min(1, u * 2^(n-k)) and u solves the
// acceptance constraint on the unique bracket where the clipped mass
// crosses 1 - eps.
ErasureBound bec_bound(int n, double p, double eps,
                       QFamily family = QFamily::PermutationInvariant);

struct QuantumNP {
  double beta = 0.0;
  HermitianOp test;  // optimal measurement operator, 0 <= test <= 1
  SdpStatus status = SdpStatus::Optimal;
  double gap = 0.0;
};

// Minimal type-II error between quantum states: minimize Tr[T sigma] over
// 0 <= T <= 1 with Tr[T rho] >= alpha. rho must be a density operator; sigma
// positive semidefinite of equal side (need not be normalized); alpha in
// [0, 1]. The endpoints bypass the solver: alpha = 0 returns the zero test
// and alpha = 1 the support projector of rho, both exact.
QuantumNP beta_quantum(const HermitianOp& rho, const HermitianOp& sigma,
                       double alpha, const SdpOptions& opt = SdpOptions{});

// For a pair of commuting states, the quantum test value equals the
// classical one on the spectrum read out in the supplied orthonormal basis
// (columns of basis). Rejects non-commuting pairs, and pairs the basis
// fails to diagonalize, with a diagnostic. Returns (quantum, classical).
std::pair<double, double> quantum_classical_equivalence(
    const HermitianOp& omega, const HermitianOp& sigma,
    const MatrixXcd& basis, double alpha,
    const SdpOptions& opt = SdpOptions{});

}  // namespace pptmc
