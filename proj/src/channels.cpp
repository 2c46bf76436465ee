#include "pptmc/channels.hpp"

#include <cmath>
#include <stdexcept>

namespace pptmc {

namespace {

void check_p(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("channel: p must lie in [0,1]");
}

Channel finish(ChannelKind kind, double p, int in_dim, int out_dim, HermitianOp choi) {
  if (!is_psd(choi, 1e-9)) throw std::invalid_argument("channel: Choi operator is not PSD");
  Channel ch;
  ch.kind = kind;
  ch.p = p;
  ch.in_dim = in_dim;
  ch.out_dim = out_dim;
  const HermitianOp marg = partial_trace(choi, {0});
  const HermitianOp id_a = HermitianOp::identity({in_dim});
  if (max_abs_diff(marg, id_a) <= 1e-9) {
    ch.trace_preserving = true;
  } else if (is_psd(id_a - marg, 1e-9)) {
    ch.trace_preserving = false;
  } else {
    throw std::invalid_argument("channel: Tr_B of the Choi operator exceeds the identity");
  }
  ch.choi = std::move(choi);
  return ch;
}

}  // namespace

const char* to_string(ChannelKind k) {
  switch (k) {
    case ChannelKind::Identity: return "identity";
    case ChannelKind::Dephasing: return "dephasing";
    case ChannelKind::Depolarizing: return "depolarizing";
    case ChannelKind::Erasure: return "erasure";
    default: return "custom";
  }
}

ChannelKind kind_from_string(const std::string& s) {
  if (s == "identity") return ChannelKind::Identity;
  if (s == "dephasing") return ChannelKind::Dephasing;
  if (s == "depolarizing") return ChannelKind::Depolarizing;
  if (s == "erasure") return ChannelKind::Erasure;
  if (s == "custom") return ChannelKind::Custom;
  throw std::invalid_argument("unknown channel kind: " + s);
}

std::string Channel::label() const {
  std::string s = to_string(kind);
  if (kind == ChannelKind::Dephasing || kind == ChannelKind::Depolarizing ||
      kind == ChannelKind::Erasure) {
    s += "(p=" + std::to_string(p) + ")";
  }
  return s;
}

Channel choi_from_kraus(const std::vector<MatrixXcd>& kraus) {
  if (kraus.empty()) throw std::invalid_argument("channel: empty Kraus list");
  const int out = static_cast<int>(kraus[0].rows());
  const int in = static_cast<int>(kraus[0].cols());
  MatrixXcd comp = MatrixXcd::Zero(in, in);
  MatrixXcd choi = MatrixXcd::Zero(in * out, in * out);
  for (const auto& k : kraus) {
    if (k.rows() != out || k.cols() != in)
      throw std::invalid_argument("channel: Kraus operators must share one shape");
    comp += k.adjoint() * k;
    // (1 tensor K)|Omega> has amplitude K(a,i) on |i>|a>.
    VectorXcd w(in * out);
    for (int i = 0; i < in; ++i)
      for (int a = 0; a < out; ++a) w[i * out + a] = k(a, i);
    choi += w * w.adjoint();
  }
  if ((comp - MatrixXcd::Identity(in, in)).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("channel: Kraus completeness violated");
  return finish(ChannelKind::Custom, 0.0, in, out, HermitianOp({in, out}, choi));
}

Channel identity_channel(int d) {
  Channel ch = finish(ChannelKind::Identity, 0.0, d, d, omega(d));
  return ch;
}

Channel dephasing_channel(double p) {
  check_p(p);
  const std::vector<MatrixXcd> kraus = {std::sqrt(1.0 - p) * pauli(0), std::sqrt(p) * pauli(3)};
  Channel ch = choi_from_kraus(kraus);
  ch.kind = ChannelKind::Dephasing;
  ch.p = p;
  return ch;
}

Channel depolarizing_channel(double p) {
  check_p(p);
  std::vector<MatrixXcd> kraus = {std::sqrt(1.0 - p) * pauli(0)};
  for (int k = 1; k <= 3; ++k) kraus.push_back(std::sqrt(p / 3.0) * pauli(k));
  Channel ch = choi_from_kraus(kraus);
  ch.kind = ChannelKind::Depolarizing;
  ch.p = p;
  return ch;
}

Channel erasure_channel(double p) {
  check_p(p);
  MatrixXcd keep = MatrixXcd::Zero(3, 2);
  keep(0, 0) = keep(1, 1) = std::sqrt(1.0 - p);
  MatrixXcd e0 = MatrixXcd::Zero(3, 2), e1 = MatrixXcd::Zero(3, 2);
  e0(2, 0) = std::sqrt(p);
  e1(2, 1) = std::sqrt(p);
  Channel ch = choi_from_kraus({keep, e0, e1});
  ch.kind = ChannelKind::Erasure;
  ch.p = p;
  return ch;
}

Channel custom_channel(const HermitianOp& choi, int in_dim, int out_dim) {
  if (choi.side() != in_dim * out_dim)
    throw std::invalid_argument("channel: Choi side does not match in_dim*out_dim");
  return finish(ChannelKind::Custom, 0.0, in_dim, out_dim,
                choi.with_dims({in_dim, out_dim}));
}

Channel build(const ChannelSpec& spec) {
  switch (spec.kind) {
    case ChannelKind::Identity: return identity_channel(2);
    case ChannelKind::Dephasing: return dephasing_channel(spec.p);
    case ChannelKind::Depolarizing: return depolarizing_channel(spec.p);
    case ChannelKind::Erasure: return erasure_channel(spec.p);
    case ChannelKind::Custom:
      if (!spec.has_custom) throw std::invalid_argument("channel: custom spec needs a Choi operator");
      if (spec.custom_choi.num_subsystems() != 2)
        throw std::invalid_argument("channel: custom Choi must carry dims {in,out}");
      return custom_channel(spec.custom_choi, spec.custom_choi.dims()[0], spec.custom_choi.dims()[1]);
  }
  throw std::invalid_argument("channel: unknown kind");
}

HermitianOp apply(const Channel& ch, const HermitianOp& rho) {
  if (rho.side() != ch.in_dim) throw std::invalid_argument("channel: input dimension mismatch");
  if (std::abs(trace_of(rho) - 1.0) > 1e-9)
    throw std::invalid_argument("channel: apply expects a unit-trace input");
  const HermitianOp arg = tensor(transpose(rho).with_dims({ch.in_dim}),
                                 HermitianOp::identity({ch.out_dim}));
  const MatrixXcd big = ch.choi.mat() * arg.mat();
  MatrixXcd out = MatrixXcd::Zero(ch.out_dim, ch.out_dim);
  for (int a = 0; a < ch.out_dim; ++a)
    for (int b = 0; b < ch.out_dim; ++b)
      for (int i = 0; i < ch.in_dim; ++i) out(a, b) += big(i * ch.out_dim + a, i * ch.out_dim + b);
  return HermitianOp({ch.out_dim}, out);
}

HermitianOp jamiolkowski(const Channel& ch) { return partial_transpose(ch.choi, 0); }

Channel tensor_power(const Channel& ch, int n) {
  if (n < 1) throw std::invalid_argument("channel: tensor power needs n >= 1");
  double side = 1.0;
  for (int i = 0; i < n; ++i) side *= ch.in_dim * ch.out_dim;
  if (side > 4096.0) throw budget_error("channel: tensor power exceeds the dense-size budget");
  if (n == 1) return ch;
  HermitianOp t = ch.choi;
  for (int i = 1; i < n; ++i) t = tensor(t, ch.choi);
  // t carries A1 B1 A2 B2 ...; gather the inputs in front.
  std::vector<int> perm(2 * n);
  for (int k = 0; k < n; ++k) {
    perm[k] = 2 * k;
    perm[n + k] = 2 * k + 1;
  }
  t = permute_subsystems(t, perm);
  int da = 1, db = 1;
  for (int i = 0; i < n; ++i) {
    da *= ch.in_dim;
    db *= ch.out_dim;
  }
  Channel out;
  out.kind = ch.kind;
  out.p = ch.p;
  out.in_dim = da;
  out.out_dim = db;
  out.choi = t.with_dims({da, db});
  out.trace_preserving = ch.trace_preserving;
  return out;
}

}  // namespace pptmc
