#include "pptmc/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace pptmc {

namespace {

json matrix_to_json(const MatrixXcd& m) {
  json re = json::array(), im = json::array();
  bool any_im = false;
  for (int i = 0; i < m.rows(); ++i) {
    json rrow = json::array(), irow = json::array();
    for (int j = 0; j < m.cols(); ++j) {
      rrow.push_back(m(i, j).real());
      irow.push_back(m(i, j).imag());
      if (m(i, j).imag() != 0.0) any_im = true;
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  json out{{"re", std::move(re)}};
  if (any_im) out["im"] = std::move(im);
  return out;
}

MatrixXcd matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("re") || !j["re"].is_array()) {
    throw std::invalid_argument("matrix json: needs an \"re\" array of rows");
  }
  const auto& re = j["re"];
  const int rows = static_cast<int>(re.size());
  if (rows == 0) throw std::invalid_argument("matrix json: empty matrix");
  const int cols = static_cast<int>(re[0].size());
  MatrixXcd m(rows, cols);
  const bool has_im = j.contains("im");
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(re[i].size()) != cols ||
        (has_im && static_cast<int>(j["im"][i].size()) != cols)) {
      throw std::invalid_argument("matrix json: ragged rows");
    }
    for (int k = 0; k < cols; ++k) {
      double rv = re[i][k].get<double>();
      double iv = has_im ? j["im"][i][k].get<double>() : 0.0;
      m(i, k) = std::complex<double>(rv, iv);
    }
  }
  return m;
}

json finite_or_inf(double v) {
  if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
  return json(v);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json operator_to_json(const HermitianOp& o) {
  json j = matrix_to_json(o.mat());
  j["dims"] = o.dims();
  return j;
}

HermitianOp operator_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dims") || !j["dims"].is_array()) {
    throw std::invalid_argument("operator json: needs a \"dims\" array");
  }
  std::vector<int> dims = j["dims"].get<std::vector<int>>();
  MatrixXcd m = matrix_from_json(j);
  if (m.rows() != m.cols() || m.rows() != dims_product(dims)) {
    throw std::invalid_argument("operator json: matrix side does not match dims");
  }
  return HermitianOp(dims, m);  // rejects non-Hermitian input
}

json channel_spec_to_json(const ChannelSpec& spec) {
  json j{{"kind", to_string(spec.kind)}};
  if (spec.kind == ChannelKind::Dephasing ||
      spec.kind == ChannelKind::Depolarizing ||
      spec.kind == ChannelKind::Erasure) {
    j["p"] = spec.p;
  }
  if (spec.kind == ChannelKind::Custom) {
    if (!spec.has_custom) {
      throw std::invalid_argument("channel spec: custom kind without a Choi operator");
    }
    j["choi"] = operator_to_json(spec.custom_choi);
  }
  return j;
}

ChannelSpec channel_spec_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) {
    throw std::invalid_argument("channel spec json: needs a \"kind\"");
  }
  ChannelSpec spec;
  spec.kind = kind_from_string(j["kind"].get<std::string>());
  spec.p = j.value("p", 0.0);
  if (spec.kind == ChannelKind::Custom) {
    if (!j.contains("choi")) {
      throw std::invalid_argument("channel spec json: custom kind needs \"choi\"");
    }
    spec.custom_choi = operator_from_json(j["choi"]);
    if (spec.custom_choi.num_subsystems() != 2) {
      throw std::invalid_argument("channel spec json: choi needs dims {in, out}");
    }
    spec.has_custom = true;
  }
  return spec;
}

json group_to_json(const GroupRep& g) {
  json elems = json::array();
  for (const auto& e : g.elements) {
    elems.push_back(json{{"u", matrix_to_json(e.u)}, {"v", matrix_to_json(e.v)}});
  }
  json j{{"elements", std::move(elems)}};
  if (!g.weights.empty()) j["weights"] = g.weights;
  return j;
}

GroupRep group_from_json(const json& j) {
  if (!j.is_object() || !j.contains("elements") || !j["elements"].is_array()) {
    throw std::invalid_argument("group json: needs an \"elements\" array");
  }
  GroupRep g;
  for (const auto& e : j["elements"]) {
    if (!e.contains("u") || !e.contains("v")) {
      throw std::invalid_argument("group json: each element needs \"u\" and \"v\"");
    }
    g.elements.push_back({matrix_from_json(e["u"]), matrix_from_json(e["v"])});
  }
  if (j.contains("weights")) g.weights = j["weights"].get<std::vector<double>>();
  g.validate();
  return g;
}

json distribution_to_json(const std::vector<double>& probs) {
  return json{{"probs", probs}};
}

std::vector<double> distribution_from_json(const json& j) {
  if (!j.is_object() || !j.contains("probs") || !j["probs"].is_array()) {
    throw std::invalid_argument("distribution json: needs a \"probs\" array");
  }
  std::vector<double> p = j["probs"].get<std::vector<double>>();
  double sum = 0.0;
  for (double v : p) {
    if (v < -1e-12) throw std::invalid_argument("distribution json: negative entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("distribution json: probabilities must sum to 1");
  }
  return p;
}

json bound_result_to_json(const BoundResult& r) {
  return json{{"channel", r.channel},
              {"n", r.n},
              {"p", r.p},
              {"eps", r.eps},
              {"method", r.method},
              {"value", r.value},
              {"log2_M_upper", finite_or_inf(r.log2_M_upper)},
              {"min_value", r.min_value},
              {"max_value", r.max_value},
              {"saddle_gap", r.saddle_gap},
              {"degenerate", r.degenerate},
              {"min_status", to_string(r.min_status)},
              {"max_status", to_string(r.max_status)},
              {"iterations_min", r.iterations_min},
              {"iterations_max", r.iterations_max}};
}

json slackness_to_json(const SlacknessReport& rep) {
  return json{{"prior_normalized", rep.prior_normalized},
              {"acceptance_tight", rep.acceptance_tight},
              {"refund_saturates", rep.refund_saturates},
              {"payoff_saturates", rep.payoff_saturates},
              {"refund_price", rep.refund_price},
              {"ppt_boundary", rep.ppt_boundary},
              {"marginal_tight", rep.marginal_tight},
              {"dominance_tight", rep.dominance_tight},
              {"worst", rep.worst}};
}

json sdp_problem_to_json(const SdpProblem& p) {
  json blocks = json::array();
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    blocks.push_back(json{
        {"name", p.blocks[i].name},
        {"side", p.blocks[i].side},
        {"cone", p.blocks[i].cone == Cone::Psd ? "psd" : "nonneg_diag"},
        {"objective", matrix_to_json(p.objective[i])}});
  }
  json cons = json::array();
  for (const auto& c : p.constraints) {
    json terms = json::array();
    for (const auto& t : c.terms) {
      json entries = json::array();
      for (const auto& e : t.map.entries()) {
        entries.push_back(json::array({e.row, e.col, e.val}));
      }
      terms.push_back(json{{"block", p.blocks[t.block].name},
                           {"entries", std::move(entries)}});
    }
    cons.push_back(json{{"name", c.name},
                        {"space_side", c.space_side},
                        {"sense", c.sense == Sense::Le ? "le" : "eq"},
                        {"bound", matrix_to_json(c.bound)},
                        {"terms", std::move(terms)}});
  }
  return json{{"direction",
               p.direction == Direction::Minimize ? "minimize" : "maximize"},
              {"blocks", std::move(blocks)},
              {"constraints", std::move(cons)}};
}

}  // namespace pptmc
