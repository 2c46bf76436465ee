#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "pptmc/channels.hpp"
#include "pptmc/converse.hpp"
#include "pptmc/hypothesis.hpp"
#include "pptmc/json_io.hpp"
#include "pptmc/symmetry.hpp"

namespace {

using namespace pptmc;

int log_level() {
  const char* env = std::getenv("PPTMC_LOG");
  if (env == nullptr) return 0;
  std::string v(env);
  if (v == "debug") return 2;
  if (v == "info") return 1;
  return 0;
}

void log_line(int level, const std::string& msg) {
  if (log_level() >= level) std::cerr << "pptmc: " << msg << "\n";
}

struct CommonArgs {
  std::string channel;
  std::string choi_file;
  double p = 0.0;
  std::vector<double> eps;
  std::vector<std::string> n_raw;
  std::string method = "sdp";
  std::string out;
  std::string format;
  int seed = 42;
  int jobs = 1;
  double tol_gap = 1e-8;
  double tol_cone = 1e-9;
  bool timing = false;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool multi) {
  cmd->add_option("--channel", a.channel,
                  "channel kind: identity|dephasing|depolarizing|erasure|custom");
  cmd->add_option("--choi", a.choi_file,
                  "JSON file with a custom Choi operator (dims {in, out})");
  cmd->add_option("--p", a.p, "noise parameter");
  auto* eps = cmd->add_option("--eps", a.eps, "error budget(s) in [0, 1]");
  auto* n = cmd->add_option("--n", a.n_raw,
                            "channel use count(s); single values or a..b ranges");
  if (!multi) {
    eps->expected(1);
    n->expected(0, 1);
  }
  cmd->add_option("--method", a.method, "sdp|reduced|classical")
      ->check(CLI::IsMember({"sdp", "reduced", "classical"}));
  cmd->add_option("--out", a.out, "write the report to this file as well");
  cmd->add_option("--format", a.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", a.seed, "seed for randomized helpers (default 42)");
  cmd->add_option("--jobs", a.jobs, "max concurrent sweep rows")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tol-gap", a.tol_gap, "solver relative gap tolerance");
  cmd->add_option("--tol-cone", a.tol_cone, "solver cone tolerance");
  cmd->add_flag("--timing", a.timing,
                "report measured runtimes (off by default so output is reproducible)");
}

std::vector<int> parse_n_list(const std::vector<std::string>& raw) {
  std::vector<int> out;
  for (const auto& tok : raw) {
    auto dots = tok.find("..");
    if (dots == std::string::npos) {
      out.push_back(std::stoi(tok));
      continue;
    }
    int a = std::stoi(tok.substr(0, dots));
    int b = std::stoi(tok.substr(dots + 2));
    if (a < 1 || b < a) {
      throw std::invalid_argument("--n range must satisfy 1 <= a <= b");
    }
    for (int k = a; k <= b; ++k) out.push_back(k);
  }
  for (int v : out) {
    if (v < 1) throw std::invalid_argument("--n values must be positive");
  }
  return out;
}

ChannelSpec make_spec(const CommonArgs& a) {
  ChannelSpec spec;
  if (!a.choi_file.empty()) {
    std::ifstream in(a.choi_file);
    if (!in) throw std::invalid_argument("cannot open " + a.choi_file);
    json j = json::parse(in);
    spec.kind = ChannelKind::Custom;
    spec.custom_choi = operator_from_json(j);
    if (spec.custom_choi.num_subsystems() != 2) {
      throw std::invalid_argument("custom Choi needs dims {in, out}");
    }
    spec.has_custom = true;
    return spec;
  }
  if (a.channel.empty()) {
    throw std::invalid_argument("--channel (or --choi) is required");
  }
  spec.kind = kind_from_string(a.channel);
  if (spec.kind == ChannelKind::Custom) {
    throw std::invalid_argument("custom channels need --choi <file>");
  }
  spec.p = a.p;
  return spec;
}

SdpOptions solver_options(const CommonArgs& a) {
  SdpOptions opt;
  opt.tol_gap = a.tol_gap;
  opt.tol_cone = a.tol_cone;
  return opt;
}

BoundResult compute_one(const ChannelSpec& spec, int n, double eps,
                        const CommonArgs& a) {
  if (a.method == "sdp") {
    Channel ch = build(spec);
    Channel chn = n == 1 ? ch : tensor_power(ch, n);
    BoundOptions opt;
    opt.sdp = solver_options(a);
    BoundResult res = bound(chn, eps, opt);
    res.channel = to_string(spec.kind);
    res.n = n;
    res.p = spec.kind == ChannelKind::Identity ? 0.0 : spec.p;
    return res;
  }
  BoundResult res = reduced_bound(spec, n, eps);
  res.method = a.method;  // reduced and classical share the type-class evaluator
  return res;
}

void emit(const std::string& text, const std::string& out_file) {
  std::cout << text;
  if (!out_file.empty()) {
    std::ofstream f(out_file);
    if (!f) throw std::invalid_argument("cannot write " + out_file);
    f << text;
  }
}

int cmd_bound(const CommonArgs& a) {
  ChannelSpec spec = make_spec(a);
  if (a.eps.size() != 1) throw std::invalid_argument("bound needs exactly one --eps");
  std::vector<int> ns = parse_n_list(a.n_raw);
  if (ns.size() > 1) throw std::invalid_argument("bound needs exactly one --n");
  int n = ns.empty() ? 1 : ns[0];
  log_line(1, "bound: " + std::string(to_string(spec.kind)) + " n=" +
                  std::to_string(n));
  BoundResult res = compute_one(spec, n, a.eps[0], a);
  json j = bound_result_to_json(res);
  j["gap"] = res.saddle_gap;
  if (a.method == "sdp") {
    Channel ch = build(spec);
    Channel chn = n == 1 ? ch : tensor_power(ch, n);
    j["residuals"] = slackness_to_json(slackness_audit(chn, a.eps[0], res));
  }
  emit(j.dump(2) + "\n", a.out);
  return 0;
}

struct SweepRow {
  int n = 0;
  double eps = 0.0;
  std::string status = "ok";
  double value = std::nan("");
  double log2_m = std::nan("");
  long long runtime_ms = 0;
};

int cmd_sweep(const CommonArgs& a) {
  ChannelSpec spec = make_spec(a);
  std::vector<int> ns = parse_n_list(a.n_raw);
  if (ns.empty() || a.eps.empty()) {
    throw std::invalid_argument("sweep needs at least one --n and one --eps");
  }
  struct Key {
    int n;
    double eps;
  };
  std::vector<Key> keys;
  for (int n : ns) {
    for (double e : a.eps) keys.push_back({n, e});
  }
  std::sort(keys.begin(), keys.end(), [](const Key& x, const Key& y) {
    if (x.n != y.n) return x.n < y.n;
    return x.eps < y.eps;
  });
  keys.erase(std::unique(keys.begin(), keys.end(),
                         [](const Key& x, const Key& y) {
                           return x.n == y.n && x.eps == y.eps;
                         }),
             keys.end());

  std::vector<SweepRow> rows(keys.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= keys.size()) return;
      SweepRow& row = rows[i];
      row.n = keys[i].n;
      row.eps = keys[i].eps;
      auto start = std::chrono::steady_clock::now();
      try {
        BoundResult res = compute_one(spec, keys[i].n, keys[i].eps, a);
        row.value = res.value;
        row.log2_m = res.log2_M_upper;
      } catch (const budget_error& e) {
        row.status = "budget";
        log_line(2, std::string("row budget-exceeded: ") + e.what());
      } catch (const numerical_error& e) {
        row.status = "solver_failure";
        log_line(2, std::string("row failed: ") + e.what());
      } catch (const std::exception& e) {
        row.status = "invalid";
        log_line(2, std::string("row rejected: ") + e.what());
      }
      if (a.timing) {
        row.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
      }
      log_line(2, "row n=" + std::to_string(row.n) + " done (" + row.status + ")");
    }
  };
  int jobs = std::max(1, std::min<int>(a.jobs, static_cast<int>(keys.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  const double pval = spec.kind == ChannelKind::Identity ? 0.0 : spec.p;
  std::string text;
  if (a.format == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      json j{{"n", r.n},          {"p", pval},
             {"eps", r.eps},      {"method", a.method},
             {"status", r.status}, {"runtime_ms", r.runtime_ms}};
      j["value"] = std::isnan(r.value) ? json() : json(r.value);
      j["log2_M_upper"] = std::isnan(r.log2_m)  ? json()
                          : std::isinf(r.log2_m) ? json("inf")
                                                  : json(r.log2_m);
      arr.push_back(std::move(j));
    }
    text = arr.dump(2) + "\n";
  } else {
    std::ostringstream csv;
    csv << "n,p,eps,method,status,value,log2_M_upper,runtime_ms\n";
    for (const auto& r : rows) {
      csv << r.n << ',' << format_double(pval) << ',' << format_double(r.eps)
          << ',' << a.method << ',' << r.status << ',' << format_double(r.value)
          << ',' << format_double(r.log2_m) << ',' << r.runtime_ms << '\n';
    }
    text = csv.str();
  }
  emit(text, a.out);
  for (const auto& r : rows) {
    if (r.status != "ok") return 2;
  }
  return 0;
}

const char* to_string(SlaterVerdict v) {
  switch (v) {
    case SlaterVerdict::StrictlyFeasible: return "strictly_feasible";
    case SlaterVerdict::BoundaryOnly: return "boundary_only";
    default: return "unknown";
  }
}

int cmd_audit(const CommonArgs& a) {
  ChannelSpec spec = make_spec(a);
  if (a.eps.size() != 1) throw std::invalid_argument("audit needs exactly one --eps");
  std::vector<int> ns = parse_n_list(a.n_raw);
  if (ns.size() > 1) throw std::invalid_argument("audit needs exactly one --n");
  int n = ns.empty() ? 1 : ns[0];
  double eps = a.eps[0];
  Channel ch = build(spec);
  Channel chn = n == 1 ? ch : tensor_power(ch, n);
  BoundOptions opt;
  opt.sdp = solver_options(a);
  log_line(1, "audit: solving both forms");
  BoundResult res = bound(chn, eps, opt);
  res.channel = to_string(spec.kind);
  res.n = n;
  res.p = spec.kind == ChannelKind::Identity ? 0.0 : spec.p;
  SlacknessReport rep = slackness_audit(chn, eps, res);
  log_line(1, "audit: probing strict feasibility");
  SlaterReport smin = slater_check(min_form(chn, eps), opt.sdp);
  SlaterReport smax = slater_check(max_form(chn, eps), opt.sdp);
  json j = bound_result_to_json(res);
  j["gap"] = res.saddle_gap;
  j["residuals"] = slackness_to_json(rep);
  j["slater"] = json{
      {"min_form",
       json{{"verdict", to_string(smin.verdict)}, {"margin", smin.margin}}},
      {"max_form",
       json{{"verdict", to_string(smax.verdict)}, {"margin", smax.margin}}}};
  emit(j.dump(2) + "\n", a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"one-shot converse bounds for quantum channel coding"};
  app.require_subcommand(1);
  CommonArgs ab, as, aa;
  CLI::App* b = app.add_subcommand("bound", "single bound evaluation");
  CLI::App* s = app.add_subcommand("sweep", "grid of bounds over n and eps");
  CLI::App* au = app.add_subcommand("audit", "duality and slackness report");
  add_common(b, ab, false);
  add_common(s, as, true);
  add_common(au, aa, false);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    if (b->parsed()) return cmd_bound(ab);
    if (s->parsed()) return cmd_sweep(as);
    return cmd_audit(aa);
  } catch (const std::invalid_argument& e) {
    std::cerr << "pptmc: " << e.what() << "\n";
    return 1;
  } catch (const budget_error& e) {
    std::cerr << "pptmc: " << e.what() << "\n";
    return 2;
  } catch (const numerical_error& e) {
    std::cerr << "pptmc: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "pptmc: " << e.what() << "\n";
    return 1;
  }
}
