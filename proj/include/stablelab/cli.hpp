// Command-line front end. Parsing and execution are split so the same
// configuration can be echoed, stored and replayed.
//
// Exit codes: 0 success or stable, 1 unstable verdict, 2 usage or data
// error, 3 enumeration cap exceeded.
#pragma once

#include "stablelab/experiments.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace stablelab {

enum ExitCode : int { kExitOk = 0, kExitUnstable = 1, kExitUsage = 2, kExitCap = 3 };

struct CliConfig {
  std::string subcommand;  // generate, check, count, algo, constants, experiment
  std::string algorithm;   // algo: gale-shapley or extension
  ModelParams params;
  std::optional<std::uint64_t> seed;
  std::uint64_t trial = 0;
  std::uint64_t trials = 100;
  EnumerationCap caps;
  std::string output;  // empty: standard output
  std::string format = "json";
  double tolerance = 1e-12;

  std::string instance_path;
  std::string matching;  // path or inline JSON
  std::vector<std::string> notions;
  int threshold = 0;
  bool keep_partner = false;
  std::string order = "lowest";  // gale-shapley proposer order: lowest or chain
  bool woman_optimal = false;

  std::string c_r_range, rho_k_range, r_k_range;

  std::string manifest_path;
  std::string out_dir = ".";
  int threads = 0;  // 0: available cores
  bool mc = false;
  std::optional<std::uint64_t> samples;

  friend bool operator==(const CliConfig&, const CliConfig&) = default;
};

Json to_json(const CliConfig& c);
CliConfig cli_config_from_json(const Json& j);

/// Raised by parse_cli for --help (code 0) and malformed command lines (code 2).
struct CliUsage : std::runtime_error {
  CliUsage(int code, std::string out_text, std::string err_text)
      : std::runtime_error(err_text), code(code), out(std::move(out_text)), err(std::move(err_text)) {}
  int code;
  std::string out;
  std::string err;
};

/// args excludes the program name.
CliConfig parse_cli(const std::vector<std::string>& args);
int execute(const CliConfig& config, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// JSON text with every double at 17 significant digits.
std::string dump17(const Json& j);

/// "3..5", "2,4,7" or "6".
std::vector<int> parse_int_range(const std::string& text);

}  // namespace stablelab
