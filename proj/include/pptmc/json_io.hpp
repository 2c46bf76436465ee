#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pptmc/channels.hpp"
#include "pptmc/converse.hpp"
#include "pptmc/operators.hpp"
#include "pptmc/sdp.hpp"
#include "pptmc/symmetry.hpp"

namespace pptmc {

using json = nlohmann::json;

// Shortest round-trip decimal representation (%.17g) used for CSV output.
std::string format_double(double v);

// {"dims": [...], "re": [[...]], "im": [[...]]}; "im" may be omitted for
// real operators. Parsing rejects non-Hermitian input.
json operator_to_json(const HermitianOp& o);
HermitianOp operator_from_json(const json& j);

// {"kind": "dephasing", "p": 0.1}; custom kind carries "choi" (an operator
// with dims {in, out}).
json channel_spec_to_json(const ChannelSpec& spec);
ChannelSpec channel_spec_from_json(const json& j);

// {"elements": [{"u": op, "v": op}, ...], "weights": [...]} with unitary
// matrices in the same re/im layout as operators.
json group_to_json(const GroupRep& g);
GroupRep group_from_json(const json& j);

// {"probs": [...]}: a finite distribution, validated nonnegative and
// normalized within 1e-9.
json distribution_to_json(const std::vector<double>& probs);
std::vector<double> distribution_from_json(const json& j);

// Infinite log2_M_upper (the eps = 1 corner) serializes as the string "inf".
json bound_result_to_json(const BoundResult& r);

json slackness_to_json(const SlacknessReport& rep);

// Full problem dump for offline inspection: blocks, objectives, and every
// constraint term as sparse (row, col, value) triplets over svec coordinates.
json sdp_problem_to_json(const SdpProblem& p);

}  // namespace pptmc
