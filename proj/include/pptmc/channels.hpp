#pragma once

#include "pptmc/operators.hpp"

#include <string>
#include <vector>

namespace pptmc {

enum class ChannelKind { Identity, Dephasing, Depolarizing, Erasure, Custom };
const char* to_string(ChannelKind k);
ChannelKind kind_from_string(const std::string& s);

// A completely positive trace-non-increasing map held as its Choi operator
// on A tensor B, with A indexed first.
struct Channel {
  ChannelKind kind = ChannelKind::Custom;
  double p = 0.0;  // noise parameter; meaningless for identity/custom
  int in_dim = 0, out_dim = 0;
  HermitianOp choi;
  bool trace_preserving = true;

  std::string label() const;
};

struct ChannelSpec {
  ChannelKind kind = ChannelKind::Identity;
  double p = 0.0;
  HermitianOp custom_choi;  // required for Custom
  bool has_custom = false;
};

Channel choi_from_kraus(const std::vector<MatrixXcd>& kraus);
Channel build(const ChannelSpec& spec);
Channel identity_channel(int d);
Channel dephasing_channel(double p);
Channel depolarizing_channel(double p);
Channel erasure_channel(double p);
Channel custom_channel(const HermitianOp& choi, int in_dim, int out_dim);

// Channel action rho -> Tr_A[N (rho^T tensor 1_B)].
HermitianOp apply(const Channel& ch, const HermitianOp& rho);

// Jamiolkowski representative N^{T_A}; action becomes transpose-free.
HermitianOp jamiolkowski(const Channel& ch);

// n-fold memoryless extension, subsystems reordered to A^n tensor B^n and
// collapsed to dims {in^n, out^n}.
Channel tensor_power(const Channel& ch, int n);

struct GroupRep;
bool is_covariant(const Channel& ch, const GroupRep& g, double tol = 1e-9);

}  // namespace pptmc
