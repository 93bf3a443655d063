#pragma once

// Command-line surface of the `carmichael` tool: argument parsing, output
// serialization and the subcommand runner.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "carmichael/construction.hpp"
#include "carmichael/korselt.hpp"
#include "carmichael/nat.hpp"

namespace carmichael::cli {

enum class Subcommand { verify, census, construct, solve };
enum class OutputFormat { json_lines, csv, human };

std::string_view to_string(Subcommand s);
std::string_view to_string(OutputFormat f);

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitNoResults = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInfeasible = 3;

inline constexpr const char* kThreadsEnv = "CARMICHAEL_THREADS";

/// Bad command line; maps to exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// --help was given; what() is the help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Subcommand subcommand = Subcommand::verify;
  OutputFormat format = OutputFormat::json_lines;
  std::optional<std::string> output_path;
  unsigned thread_count = 1;

  // verify
  Nat n;
  // census (modulus in construction.M)
  std::uint64_t limit = 0;
  // construct (and census modulus)
  ConstructionParams construction;
  // solve
  std::string pool_path;
  std::uint64_t solve_modulus = 1;
  std::uint64_t solve_target = 1;
  std::size_t min_size = 1;
  std::size_t max_size = kUnbounded;
};

/// Arguments exclude the program name. Throws UsageError or HelpRequested.
RunConfig parse_args(std::span<const std::string> args);

/// One line (with trailing LF). Refuses certificates with a failed check by
/// throwing AssemblyError.
std::string emit_certificate(const CarmichaelCertificate& cert, OutputFormat format);
/// Inverse of the json-lines form of emit_certificate.
CarmichaelCertificate parse_certificate(std::string_view json_line);

/// Census table body. csv: "residue,count" header then ascending rows.
std::string emit_census(const CensusTable& table, OutputFormat format);

/// Runs the configured subcommand, writing results to `out` and diagnostics
/// to `err`. Returns the process exit status.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + run with output-file handling.
int main_entry(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace carmichael::cli
