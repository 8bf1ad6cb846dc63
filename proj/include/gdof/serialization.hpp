#pragma once

// JSON encoding of parameters, results, plans, MAC problems and AIS
// experiments. Readers reject unknown keys and report parse failures with
// line and column.

#include <cstddef>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "gdof/ais_oracle.hpp"
#include "gdof/gdof_core.hpp"
#include "gdof/lemma_coeff.hpp"
#include "gdof/mac_region.hpp"
#include "gdof/scheme_planner.hpp"

namespace gdof::io {

using nlohmann::json;

/// Malformed text, with a 1-based position (0 when unknown).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, std::size_t column, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Well-formed JSON with a missing, unknown or mistyped key.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[nodiscard]] inline json parse(const std::string& text, const std::string& source = "<input>") {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points one past the offending character.
    const std::size_t offset = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    if (const auto pos = what.find("] "); pos != std::string::npos) what = what.substr(pos + 2);
    throw ParseError(source, line, column, what);
  }
}

[[nodiscard]] inline json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

inline void require_keys(const json& j, std::initializer_list<const char*> allowed, const char* what) {
  if (!j.is_object()) throw SchemaError(std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw SchemaError("unknown key '" + key + "' in " + what);
  }
}

/// Runs a reader and turns nlohmann key/type errors into SchemaError.
template <typename T>
[[nodiscard]] T decode(const json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string(what) + ": " + e.what());
  }
}

}  // namespace gdof::io

// ---------------------------------------------------------------------------
// Core

namespace gdof {

inline void to_json(nlohmann::json& j, const GdofParams& p) {
  j = {{"K", p.K}, {"M", p.M}, {"N", p.N}, {"alpha", p.alpha}};
}
inline void from_json(const nlohmann::json& j, GdofParams& p) {
  io::require_keys(j, {"K", "M", "N", "alpha"}, "parameters");
  j.at("K").get_to(p.K);
  j.at("M").get_to(p.M);
  j.at("N").get_to(p.N);
  j.at("alpha").get_to(p.alpha);
}

inline void to_json(nlohmann::json& j, const BoundTable& t) {
  j = nlohmann::json::object();
  for (BoundId id : kAllBounds) {
    const auto& v = t[id];
    j[std::string(to_string(id))] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  }
}

inline void to_json(nlohmann::json& j, const GdofResult& r) {
  j = {{"sum_gdof", r.sum_gdof}, {"active_branch", std::string(to_string(r.active_branch))}, {"bounds", r.bounds}};
}

inline void to_json(nlohmann::json& j, const LemmaGroup& g) {
  j = {{"streams", g.streams}, {"level1", g.level1}, {"level2", g.level2}};
}
inline void from_json(const nlohmann::json& j, LemmaGroup& g) {
  io::require_keys(j, {"streams", "level1", "level2"}, "lemma group");
  j.at("streams").get_to(g.streams);
  j.at("level1").get_to(g.level1);
  j.at("level2").get_to(g.level2);
}

inline void to_json(nlohmann::json& j, const LemmaInstance& i) {
  j = {{"eta", i.eta}, {"groups", i.groups}, {"N1", i.N1}, {"N2", i.N2}};
}
inline void from_json(const nlohmann::json& j, LemmaInstance& i) {
  io::require_keys(j, {"eta", "groups", "N1", "N2"}, "lemma instance");
  j.at("eta").get_to(i.eta);
  j.at("groups").get_to(i.groups);
  j.at("N1").get_to(i.N1);
  j.at("N2").get_to(i.N2);
}

}  // namespace gdof

// ---------------------------------------------------------------------------
// MAC

namespace gdof::mac {

inline void to_json(nlohmann::json& j, const MacProblem& p) {
  j = {{"M1", p.M1}, {"M2", p.M2}, {"alpha", p.alpha}, {"eta", p.eta}, {"noise_levels", p.noise_levels}, {"N", p.N}};
}
inline void from_json(const nlohmann::json& j, MacProblem& p) {
  io::require_keys(j, {"M1", "M2", "alpha", "eta", "noise_levels", "N"}, "MAC problem");
  j.at("M1").get_to(p.M1);
  j.at("M2").get_to(p.M2);
  j.at("alpha").get_to(p.alpha);
  j.at("eta").get_to(p.eta);
  j.at("noise_levels").get_to(p.noise_levels);
  j.at("N").get_to(p.N);
}

inline void to_json(nlohmann::json& j, const GdofTuple& t) { j = {{"d", t.d}}; }
inline void from_json(const nlohmann::json& j, GdofTuple& t) {
  io::require_keys(j, {"d"}, "GDoF tuple");
  j.at("d").get_to(t.d);
}

inline void to_json(nlohmann::json& j, const SizeConstraint& c) {
  j = {{"size", c.size}, {"margin", c.margin}, {"worst_subset", c.worst}, {"tight", c.tight()}, {"violated", c.violated()}};
}

inline void to_json(nlohmann::json& j, const MacVerdict& v) {
  j = {{"achievable", v.achievable},
       {"outside_stated_regime", v.outside_stated_regime},
       {"constraints", v.constraints},
       {"binding", v.binding()}};
}

}  // namespace gdof::mac

// ---------------------------------------------------------------------------
// Scheme plans

namespace gdof::scheme {

inline void to_json(nlohmann::json& j, const Codeword& c) {
  j = {{"kind", std::string(to_string(c.kind))}, {"beam", c.beam}, {"power_exponent", c.power_exponent}, {"load", c.load}};
}
inline void from_json(const nlohmann::json& j, Codeword& c) {
  io::require_keys(j, {"kind", "beam", "power_exponent", "load"}, "codeword");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "common") c.kind = CodewordKind::kCommon;
  else if (kind == "private") c.kind = CodewordKind::kPrivate;
  else throw io::SchemaError("unknown codeword kind '" + kind + "'");
  j.at("beam").get_to(c.beam);
  j.at("power_exponent").get_to(c.power_exponent);
  j.at("load").get_to(c.load);
}

inline void to_json(nlohmann::json& j, const StreamRef& s) { j = nlohmann::json::array({s.user, s.codeword}); }
inline void from_json(const nlohmann::json& j, StreamRef& s) {
  if (!j.is_array() || j.size() != 2) throw io::SchemaError("stream reference must be [user, codeword]");
  j[0].get_to(s.user);
  j[1].get_to(s.codeword);
}

inline void to_json(nlohmann::json& j, const UserPlan& u) { j = {{"codewords", u.codewords}}; }
inline void from_json(const nlohmann::json& j, UserPlan& u) {
  io::require_keys(j, {"codewords"}, "user plan");
  j.at("codewords").get_to(u.codewords);
}

inline void to_json(nlohmann::json& j, const ReceiverPlan& r) {
  j = {{"decoded", r.decoded}, {"treated_as_noise", r.treated_as_noise}, {"nulled", r.nulled}};
}
inline void from_json(const nlohmann::json& j, ReceiverPlan& r) {
  io::require_keys(j, {"decoded", "treated_as_noise", "nulled"}, "receiver plan");
  j.at("decoded").get_to(r.decoded);
  j.at("treated_as_noise").get_to(r.treated_as_noise);
  j.at("nulled").get_to(r.nulled);
}

[[nodiscard]] inline Construction construction_from_string(const std::string& s) {
  for (Construction c : {Construction::kWeak, Construction::kModerate, Construction::kStrong, Construction::kZeroForcing})
    if (to_string(c) == s) return c;
  throw io::SchemaError("unknown construction '" + s + "'");
}

inline void to_json(nlohmann::json& j, const SchemePlan& p) {
  j = {{"params", p.params},
       {"construction", std::string(to_string(p.construction))},
       {"users", p.users},
       {"receivers", p.receivers},
       {"warnings", p.warnings},
       {"total_load", p.total_load()}};
}
inline void from_json(const nlohmann::json& j, SchemePlan& p) {
  io::require_keys(j, {"params", "construction", "users", "receivers", "warnings", "total_load"}, "scheme plan");
  j.at("params").get_to(p.params);
  p.construction = construction_from_string(j.at("construction").get<std::string>());
  j.at("users").get_to(p.users);
  j.at("receivers").get_to(p.receivers);
  j.at("warnings").get_to(p.warnings);
}

inline void to_json(nlohmann::json& j, const ReceiverValidation& r) {
  j = {{"receiver", r.receiver}, {"problem", r.problem}, {"tuple", r.tuple}, {"verdict", r.verdict}};
}

inline void to_json(nlohmann::json& j, const PlanValidation& v) {
  j = {{"receivers", v.receivers},
       {"achieved_sum_gdof", v.achieved_sum_gdof},
       {"formula_sum_gdof", v.formula_sum_gdof},
       {"all_achievable", v.all_achievable},
       {"match", v.match},
       {"rank_certificate", v.rank_certificate ? nlohmann::json(*v.rank_certificate) : nlohmann::json(nullptr)}};
}

}  // namespace gdof::scheme

// ---------------------------------------------------------------------------
// Aligned image set experiments

namespace gdof::ais {

inline void to_json(nlohmann::json& j, const AlignmentSettings& a) {
  j = {{"pbar", a.pbar}, {"pairs", a.pairs}, {"draws", a.draws}};
}
inline void from_json(const nlohmann::json& j, AlignmentSettings& a) {
  io::require_keys(j, {"pbar", "pairs", "draws"}, "alignment settings");
  a.pbar = j.value("pbar", a.pbar);
  a.pairs = j.value("pairs", a.pairs);
  a.draws = j.value("draws", a.draws);
}

inline void to_json(nlohmann::json& j, const AisConfig& c) {
  nlohmann::json pmf = nlohmann::json::object();
  for (const auto& [pb, q] : c.custom_pmf) pmf[std::to_string(pb)] = q;
  j = {{"instance", c.instance},
       {"pbar_sweep", c.pbar_sweep},
       {"T", c.T},
       {"trials", c.trials},
       {"input_law", c.input_law == InputLaw::kUniform ? "uniform" : "custom"},
       {"custom_pmf", pmf},
       {"seed", c.seed},
       {"budget", c.budget},
       {"coefficient_law", c.coefficient_law == det::CoefficientLaw::kUniformPositive ? "uniform_positive"
                                                                                       : "uniform_symmetric"},
       {"shared_coefficients", c.shared_coefficients},
       {"reference", c.reference == ReferenceMode::kZeros ? "zeros" : "sampled_max"},
       {"reference_samples", c.reference_samples},
       {"partition_trials", c.partition_trials},
       {"partition_limit", c.partition_limit},
       {"threads", c.threads},
       {"side_information", "constant"},
       {"alignment", c.alignment ? nlohmann::json(*c.alignment) : nlohmann::json(nullptr)}};
}

/// Every key except "instance" is optional and keeps its default.
inline void from_json(const nlohmann::json& j, AisConfig& c) {
  io::require_keys(j,
                   {"instance", "pbar_sweep", "T", "trials", "input_law", "custom_pmf", "seed", "budget",
                    "coefficient_law", "shared_coefficients", "reference", "reference_samples", "partition_trials",
                    "partition_limit", "threads", "side_information", "alignment"},
                   "AIS config");
  j.at("instance").get_to(c.instance);
  c.pbar_sweep = j.value("pbar_sweep", c.pbar_sweep);
  c.T = j.value("T", c.T);
  c.trials = j.value("trials", c.trials);
  c.seed = j.value("seed", c.seed);
  c.budget = j.value("budget", c.budget);
  c.shared_coefficients = j.value("shared_coefficients", c.shared_coefficients);
  c.reference_samples = j.value("reference_samples", c.reference_samples);
  c.partition_trials = j.value("partition_trials", c.partition_trials);
  c.partition_limit = j.value("partition_limit", c.partition_limit);
  c.threads = j.value("threads", c.threads);

  const std::string law = j.value("input_law", std::string("uniform"));
  if (law == "uniform") c.input_law = InputLaw::kUniform;
  else if (law == "custom") c.input_law = InputLaw::kCustom;
  else throw io::SchemaError("unknown input_law '" + law + "'");

  c.custom_pmf.clear();
  if (j.contains("custom_pmf")) {
    for (const auto& [key, value] : j.at("custom_pmf").items()) {
      std::size_t used = 0;
      int pb = 0;
      try {
        pb = std::stoi(key, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != key.size()) throw io::SchemaError("custom_pmf keys must be integer Pbar values, got '" + key + "'");
      c.custom_pmf[pb] = value.get<std::vector<double>>();
    }
  }

  const std::string coeff = j.value("coefficient_law", std::string("uniform_positive"));
  if (coeff == "uniform_positive") c.coefficient_law = det::CoefficientLaw::kUniformPositive;
  else if (coeff == "uniform_symmetric") c.coefficient_law = det::CoefficientLaw::kUniformSymmetric;
  else throw io::SchemaError("unknown coefficient_law '" + coeff + "'");

  const std::string ref = j.value("reference", std::string("zeros"));
  if (ref == "zeros") c.reference = ReferenceMode::kZeros;
  else if (ref == "sampled_max") c.reference = ReferenceMode::kSampledMax;
  else throw io::SchemaError("unknown reference mode '" + ref + "'");

  if (j.value("side_information", std::string("constant")) != "constant")
    throw io::SchemaError("only side_information \"constant\" is supported");

  if (j.contains("alignment") && !j.at("alignment").is_null()) c.alignment = j.at("alignment").get<AlignmentSettings>();
  else c.alignment.reset();
}

inline void to_json(nlohmann::json& j, const SweepPoint& p) {
  j = {{"pbar", p.pbar},
       {"P", p.P},
       {"entropy_diff", p.entropy_diff},
       {"entropy_diff_stderr", p.entropy_diff_stderr},
       {"expected_log_set_size", p.expected_log_set_size},
       {"expected_log_set_size_stderr", p.expected_log_set_size_stderr},
       {"mean_max_sampled_log_set_size", p.mean_max_sampled_log_set_size},
       {"mean_set_size", p.mean_set_size},
       {"set_size_bound", p.set_size_bound},
       {"max_chain_error", p.max_chain_error},
       {"functional_trials", p.functional_trials},
       {"partition_checked", p.partition_checked},
       {"partition_failures", p.partition_failures}};
}
inline void from_json(const nlohmann::json& j, SweepPoint& p) {
  j.at("pbar").get_to(p.pbar);
  j.at("P").get_to(p.P);
  j.at("entropy_diff").get_to(p.entropy_diff);
  j.at("entropy_diff_stderr").get_to(p.entropy_diff_stderr);
  j.at("expected_log_set_size").get_to(p.expected_log_set_size);
  j.at("expected_log_set_size_stderr").get_to(p.expected_log_set_size_stderr);
  j.at("mean_max_sampled_log_set_size").get_to(p.mean_max_sampled_log_set_size);
  j.at("mean_set_size").get_to(p.mean_set_size);
  j.at("set_size_bound").get_to(p.set_size_bound);
  j.at("max_chain_error").get_to(p.max_chain_error);
  j.at("functional_trials").get_to(p.functional_trials);
  j.at("partition_checked").get_to(p.partition_checked);
  j.at("partition_failures").get_to(p.partition_failures);
}

inline void to_json(nlohmann::json& j, const PairOutcome& p) {
  j = {{"first", p.first}, {"second", p.second}, {"empirical", p.empirical}, {"bound_u4", p.bound_u4}, {"bound_top", p.bound_top}};
}
inline void from_json(const nlohmann::json& j, PairOutcome& p) {
  j.at("first").get_to(p.first);
  j.at("second").get_to(p.second);
  j.at("empirical").get_to(p.empirical);
  j.at("bound_u4").get_to(p.bound_u4);
  j.at("bound_top").get_to(p.bound_top);
}

inline void to_json(nlohmann::json& j, const AlignmentReport& r) {
  j = {{"pbar", r.pbar},
       {"draws", r.draws},
       {"pairs_evaluated", r.pairs_evaluated},
       {"pairs_skipped", r.pairs_skipped},
       {"violations", r.violations},
       {"top_level_violations", r.top_level_violations},
       {"max_ratio", r.max_ratio},
       {"max_pairwise_prob_violation", r.max_pairwise_prob_violation},
       {"pairs", r.pairs}};
}
inline void from_json(const nlohmann::json& j, AlignmentReport& r) {
  j.at("pbar").get_to(r.pbar);
  j.at("draws").get_to(r.draws);
  j.at("pairs_evaluated").get_to(r.pairs_evaluated);
  j.at("pairs_skipped").get_to(r.pairs_skipped);
  j.at("violations").get_to(r.violations);
  j.at("top_level_violations").get_to(r.top_level_violations);
  j.at("max_ratio").get_to(r.max_ratio);
  j.at("max_pairwise_prob_violation").get_to(r.max_pairwise_prob_violation);
  j.at("pairs").get_to(r.pairs);
}

inline void to_json(nlohmann::json& j, const AisReport& r) {
  j = {{"seed", r.seed},
       {"coefficient_rhs", r.coefficient_rhs},
       {"points", r.points},
       {"fitted_slope", r.fitted_slope},
       {"alignment", r.alignment ? nlohmann::json(*r.alignment) : nlohmann::json(nullptr)}};
}
inline void from_json(const nlohmann::json& j, AisReport& r) {
  j.at("seed").get_to(r.seed);
  j.at("coefficient_rhs").get_to(r.coefficient_rhs);
  j.at("points").get_to(r.points);
  j.at("fitted_slope").get_to(r.fitted_slope);
  if (j.contains("alignment") && !j.at("alignment").is_null()) r.alignment = j.at("alignment").get<AlignmentReport>();
  else r.alignment.reset();
}

}  // namespace gdof::ais
