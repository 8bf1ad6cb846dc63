// gdof: command-line front end for the sum-GDoF toolkit.
//
// Exit codes: 0 success, 1 domain or IO error, 2 usage/parse error,
// 3 enumeration budget exceeded.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "gdof/curve.hpp"
#include "gdof/gdof.hpp"
#include "gdof/serialization.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

struct ChannelFlags {
  int K = 3;
  int M = 1;
  int N = 1;
  double alpha = 0.0;
};

void add_channel_flags(CLI::App* cmd, ChannelFlags& f, bool with_alpha) {
  cmd->add_option("-K", f.K, "number of users")->required();
  cmd->add_option("-M", f.M, "transmit antennas per user")->required();
  cmd->add_option("-N", f.N, "receive antennas per user")->required();
  if (with_alpha) cmd->add_option("-a,--alpha", f.alpha, "cross-link strength exponent")->required();
}

/// Writes to `path`, or stdout when empty.
void emit(const std::optional<std::string>& path, const std::string& text) {
  if (!path) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(*path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::ios_base::failure("cannot open " + *path + " for writing");
  out << text;
  out.flush();
  if (!out) throw std::ios_base::failure("write failed for " + *path);
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sum-GDoF toolkit for the K-user symmetric MIMO interference channel"};
  app.require_subcommand(1);

  ChannelFlags ch;
  std::optional<std::string> out_path;
  std::string format;

  // eval
  auto* eval = app.add_subcommand("eval", "closed-form sum GDoF, active branch and outer bounds");
  add_channel_flags(eval, ch, true);
  eval->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}))->default_val("text");
  eval->add_option("--out", out_path, "output file (default stdout)");

  // curve
  double a_start = 0.0, a_stop = 3.0, a_step = 0.01;
  auto* curve = app.add_subcommand("curve", "sum GDoF over an alpha sweep");
  add_channel_flags(curve, ch, false);
  curve->add_option("--alpha-start", a_start, "first alpha")->default_val(0.0);
  curve->add_option("--alpha-stop", a_stop, "last alpha")->default_val(3.0);
  curve->add_option("--alpha-step", a_step, "alpha increment")->default_val(0.01);
  curve->add_option("--format", format, "csv or text")->check(CLI::IsMember({"csv", "text"}))->default_val("csv");
  curve->add_option("--out", out_path, "output file (default stdout)");

  // plan
  auto* plan = app.add_subcommand("plan", "achievability plan and its MAC validation");
  add_channel_flags(plan, ch, true);
  plan->add_option("--out", out_path, "output file (default stdout)");

  // check-mac
  std::string problem_path, tuple_path;
  bool brute_force = false;
  auto* check_mac = app.add_subcommand("check-mac", "decide whether a GDoF tuple is achievable in a layered MAC");
  check_mac->add_option("--problem", problem_path, "MAC problem JSON")->required();
  check_mac->add_option("--tuple", tuple_path, "GDoF tuple JSON")->required();
  check_mac->add_flag("--brute-force", brute_force, "also run exhaustive subset enumeration (at most 20 streams)");
  check_mac->add_option("--out", out_path, "output file (default stdout)");

  // ais
  std::string config_path;
  std::optional<std::uint64_t> seed, budget;
  std::optional<int> threads;
  auto* ais = app.add_subcommand("ais", "aligned image set experiment");
  ais->add_option("--config", config_path, "experiment config JSON")->required();
  ais->add_option("--seed", seed, "override the config seed");
  ais->add_option("--budget", budget, "override the enumeration budget");
  ais->add_option("--threads", threads, "worker threads for Monte-Carlo trials");
  ais->add_option("--out", out_path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    (void)app.exit(e);
    return kExitUsage;
  }

  try {
    if (*eval) {
      const gdof::GdofParams p{ch.K, ch.M, ch.N, ch.alpha};
      const gdof::GdofResult r = gdof::sum_gdof(p);
      if (format == "json") {
        emit(out_path, dump({{"params", p}, {"result", r}}));
      } else {
        std::ostringstream s;
        s << "sum_gdof " << gdof::format_number(r.sum_gdof) << '\n'
          << "active_branch " << gdof::to_string(r.active_branch) << '\n';
        for (gdof::BoundId id : gdof::kAllBounds) {
          s << gdof::to_string(id) << ' ';
          if (const auto& v = r.bounds[id]) s << gdof::format_number(*v);
          else s << '-';
          s << '\n';
        }
        emit(out_path, s.str());
      }
    } else if (*curve) {
      gdof::GdofParams{ch.K, ch.M, ch.N, 0.0}.validate();
      const auto rows = gdof::sum_gdof_curve(ch.K, ch.M, ch.N, gdof::alpha_grid(a_start, a_stop, a_step));
      std::ostringstream s;
      if (format == "text") gdof::write_curve_text(s, rows);
      else gdof::write_curve_csv(s, rows);
      emit(out_path, s.str());
    } else if (*plan) {
      const gdof::GdofParams p{ch.K, ch.M, ch.N, ch.alpha};
      p.validate();
      const auto sp = p.receivers_separate_all_streams() ? gdof::scheme::zero_force_plan(p) : gdof::scheme::plan(p);
      const auto v = gdof::scheme::validate(sp, p);
      emit(out_path, dump({{"plan", sp}, {"validation", v}}));
    } else if (*check_mac) {
      const auto problem = gdof::io::decode<gdof::mac::MacProblem>(gdof::io::read_file(problem_path), "MAC problem");
      const auto tuple = gdof::io::decode<gdof::mac::GdofTuple>(gdof::io::read_file(tuple_path), "GDoF tuple");
      const auto verdict = gdof::mac::check_achievable(problem, tuple);
      nlohmann::json j = {{"verdict", verdict}};
      if (brute_force) j["brute_force_achievable"] = gdof::mac::check_achievable_bruteforce(problem, tuple);
      emit(out_path, dump(j));
    } else if (*ais) {
      auto cfg = gdof::io::decode<gdof::ais::AisConfig>(gdof::io::read_file(config_path), "AIS config");
      if (seed) cfg.seed = *seed;
      if (budget) cfg.budget = *budget;
      if (threads) cfg.threads = *threads;
      const auto report = gdof::ais::run_experiment(cfg);
      emit(out_path, dump(report));
    }
  } catch (const gdof::io::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const gdof::io::SchemaError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const gdof::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}
