#include "cli_io.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "carmichael/errors.hpp"
#include "carmichael/group_solver.hpp"

namespace carmichael::cli {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Subcommand s) {
  switch (s) {
    case Subcommand::verify:
      return "verify";
    case Subcommand::census:
      return "census";
    case Subcommand::construct:
      return "construct";
    case Subcommand::solve:
      return "solve";
  }
  return "verify";
}

std::string_view to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::json_lines:
      return "json-lines";
    case OutputFormat::csv:
      return "csv";
    case OutputFormat::human:
      return "human";
  }
  return "json-lines";
}

namespace {

std::uint64_t parse_u64(const std::string& text, const std::string& flag) {
  try {
    return Nat::parse(text).to_u64();
  } catch (const Error&) {
    throw UsageError(flag + ": expected a nonnegative 64-bit integer, got '" + text + "'");
  }
}

Nat parse_nat(const std::string& text, const std::string& flag) {
  try {
    return Nat::parse(text);
  } catch (const Error&) {
    throw UsageError(flag + ": expected a nonnegative integer, got '" + text + "'");
  }
}

Rational parse_rational(const std::string& text, const std::string& flag) {
  try {
    return Rational::parse(text);
  } catch (const Error&) {
    throw UsageError(flag + ": expected a rational such as 1.5 or 3/2, got '" + text + "'");
  }
}

unsigned default_threads() {
  if (const char* env = std::getenv(kThreadsEnv); env != nullptr && *env != '\0') {
    const std::uint64_t v = parse_u64(env, kThreadsEnv);
    if (v == 0) throw UsageError(std::string(kThreadsEnv) + " must be >= 1");
    return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string join(const std::vector<Nat>& values, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += sep;
    out += values[i].to_string();
  }
  return out;
}

Nat shared_modulus(const CarmichaelCertificate& cert) {
  return cert.mode == Mode::agp ? cert.shared_multiplier * cert.L : cert.shared_multiplier;
}

std::string optional_flag(const std::optional<std::uint64_t>& v) {
  return v ? std::to_string(*v) : std::string("none");
}

// Parameters echoed ahead of the results. thread_count is left out so
// output does not depend on it.
ordered_json metadata(const RunConfig& c) {
  ordered_json m;
  m["kind"] = "metadata";
  m["subcommand"] = std::string(to_string(c.subcommand));
  switch (c.subcommand) {
    case Subcommand::verify:
      m["n"] = c.n.to_string();
      break;
    case Subcommand::census:
      m["limit"] = c.limit;
      m["modulus"] = c.construction.M;
      break;
    case Subcommand::construct: {
      const ConstructionParams& p = c.construction;
      m["M"] = p.M;
      m["a"] = p.a;
      m["mode"] = std::string(to_string(p.mode));
      if (p.mode == Mode::erdos) {
        m["lambda"] = p.lambda.to_string();
      } else {
        m["y"] = p.y;
        m["theta"] = p.theta.to_string();
        m["B"] = p.B.to_string();
        m["require_qr"] = p.filters.require_qr;
        m["require_residue"] = p.filters.require_residue;
        m["excluded"] = std::vector<std::uint64_t>(p.excluded.begin(), p.excluded.end());
        m["k_cap"] = p.caps.k_cap;
      }
      m["x_cap"] = optional_flag(p.caps.x_cap);
      m["pool_cap"] = p.caps.pool_cap;
      m["max_factors"] = p.max_factors == kUnbounded ? std::string("none") : std::to_string(p.max_factors);
      break;
    }
    case Subcommand::solve:
      m["pool"] = c.pool_path;
      m["modulus"] = c.solve_modulus;
      m["target"] = c.solve_target;
      m["min_size"] = c.min_size;
      m["max_size"] = c.max_size == kUnbounded ? std::string("none") : std::to_string(c.max_size);
      break;
  }
  return m;
}

std::string comment_line(const ordered_json& meta) {
  std::string line = "#";
  for (const auto& [key, value] : meta.items()) {
    if (key == "kind") continue;
    line += ' ';
    line += key;
    line += '=';
    line += value.is_string() ? value.get<std::string>() : value.dump();
  }
  return line + "\n";
}

void write_metadata(const ordered_json& meta, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::json_lines) {
    out << meta.dump() << '\n';
  } else {
    out << comment_line(meta);
  }
}

int run_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  ordered_json meta = metadata(c);
  const Factorization f = factorize(c.n);
  write_metadata(meta, c.format, out);
  if (!korselt_check(c.n, f)) {
    err << c.n << " is not a Carmichael number\n";
    return kExitNoResults;
  }
  std::vector<Nat> primes;
  for (const auto& pp : f.factors()) primes.push_back(pp.prime);
  const CarmichaelCertificate cert = assemble(primes, {Mode::external, Nat(0), Nat(0), 1, 0});
  out << emit_certificate(cert, c.format);
  return kExitSuccess;
}

int run_census(const RunConfig& c, std::ostream& out, std::ostream& /*err*/) {
  const CensusTable table = census(c.limit, c.construction.M, {std::size_t{1} << 20, c.thread_count});
  write_metadata(metadata(c), c.format, out);
  out << emit_census(table, c.format);
  return kExitSuccess;
}

int run_construct(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const ConstructionOutcome outcome = construct(c.construction, c.thread_count);
  const ConstructionState& st = outcome.state;
  ordered_json meta = metadata(c);
  if (st.mode == Mode::agp) {
    meta["Q"] = st.Q;
    meta["L_prime"] = st.L_prime.to_string();
    meta["x_faithful"] = st.x_faithful ? st.x_faithful->to_string() : std::string("exceeds size limit");
    meta["x_used"] = std::to_string(st.x_used);
    meta["L"] = st.L.to_string();
    meta["k0"] = st.k.k0;
    meta["k0_count"] = st.k.count;
  }
  meta["pool"] = [&] {
    std::vector<std::uint64_t> ps;
    for (const auto& e : st.pool) ps.push_back(e.p);
    return ps;
  }();
  if (outcome.target) {
    meta["target"] = outcome.target->h.to_string();
    meta["target_modulus"] = outcome.target->modulus.to_string();
  }
  write_metadata(meta, c.format, out);

  if (st.pool_too_small) {
    err << "pool has fewer than 3 primes; no Carmichael number can be formed\n";
    return kExitNoResults;
  }
  if (!outcome.certificate) {
    err << "no subset of the pool reaches the target residue\n";
    return kExitNoResults;
  }
  out << emit_certificate(*outcome.certificate, c.format);
  return kExitSuccess;
}

std::vector<std::uint64_t> read_pool(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("--pool: cannot open '" + path + "'");
  std::vector<std::uint64_t> pool;
  std::string line;
  while (std::getline(in, line)) {
    line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char ch) { return std::isspace(ch); }),
               line.end());
    if (line.empty()) continue;
    pool.push_back(parse_u64(line, "--pool entry"));
  }
  return pool;
}

int run_solve(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const std::vector<std::uint64_t> pool = read_pool(c.pool_path);
  const auto subset = subset_product_find(pool, c.solve_modulus, c.solve_target, c.min_size, c.max_size);
  write_metadata(metadata(c), c.format, out);
  if (!subset) {
    err << "no subset of the pool has product " << c.solve_target << " mod " << c.solve_modulus << "\n";
    return kExitNoResults;
  }
  std::vector<std::string> elements;
  for (std::size_t i : *subset) elements.push_back(std::to_string(pool[i]));
  switch (c.format) {
    case OutputFormat::json_lines: {
      ordered_json j;
      j["indices"] = *subset;
      j["elements"] = elements;
      j["modulus"] = c.solve_modulus;
      j["target"] = c.solve_target % c.solve_modulus;
      out << j.dump() << '\n';
      break;
    }
    case OutputFormat::csv: {
      std::string idx;
      std::string el;
      for (std::size_t i = 0; i < subset->size(); ++i) {
        if (i > 0) {
          idx += ' ';
          el += ' ';
        }
        idx += std::to_string((*subset)[i]);
        el += elements[i];
      }
      out << "indices,elements\n" << idx << ',' << el << '\n';
      break;
    }
    case OutputFormat::human: {
      std::string line;
      for (std::size_t i = 0; i < elements.size(); ++i) line += (i > 0 ? " · " : "") + elements[i];
      out << line << " ≡ " << c.solve_target % c.solve_modulus << " mod " << c.solve_modulus << '\n';
      break;
    }
  }
  return kExitSuccess;
}

void validate(RunConfig& c) {
  switch (c.subcommand) {
    case Subcommand::verify:
      if (c.n < Nat(2)) throw UsageError("verify: n must be >= 2");
      break;
    case Subcommand::census:
      if (c.construction.M == 0) throw UsageError("--modulus must be >= 1");
      if (c.limit > kEnumerationCap) {
        throw UsageError("--limit must be <= " + std::to_string(kEnumerationCap));
      }
      break;
    case Subcommand::construct: {
      ConstructionParams& p = c.construction;
      if (p.M == 0) throw UsageError("--modulus must be >= 1");
      if (std::gcd(p.a, p.M) != 1) {
        throw UsageError("--residue: gcd(" + std::to_string(p.a) + ", " + std::to_string(p.M) + ") != 1");
      }
      try {
        p.validate();
      } catch (const DomainError& e) {
        throw UsageError(std::string("construct: ") + e.what());
      }
      break;
    }
    case Subcommand::solve:
      if (c.solve_modulus == 0) throw UsageError("--modulus must be >= 1");
      if (c.min_size == 0) throw UsageError("--min-size must be >= 1");
      if (c.max_size < c.min_size) throw UsageError("--max-size must be >= --min-size");
      break;
  }
}

}  // namespace

RunConfig parse_args(std::span<const std::string> args) {
  RunConfig c;
  CLI::App app{"Construct, search for and certify Carmichael numbers in residue classes", "carmichael"};
  app.require_subcommand(1, 1);

  std::string format = "json-lines";
  std::string output;
  std::optional<std::uint64_t> threads;
  app.add_option("--format", format, "json-lines | csv | human")
      ->check(CLI::IsMember({"json-lines", "csv", "human"}));
  app.add_option("--output", output, "Write results to this file instead of stdout");
  app.add_option("--threads", threads, std::string("Worker threads (default: ") + kThreadsEnv +
                                           " or available parallelism)");

  auto* verify = app.add_subcommand("verify", "Check whether n is a Carmichael number");
  std::string n_text;
  verify->add_option("n", n_text, "Integer to verify")->required();

  auto* census_cmd = app.add_subcommand("census", "Count Carmichael numbers below a limit per residue class");
  std::string limit_text;
  std::string census_modulus_text;
  census_cmd->add_option("--limit", limit_text, "Exclusive upper bound")->required();
  census_cmd->add_option("--modulus", census_modulus_text, "Modulus M")->required();

  auto* construct_cmd = app.add_subcommand("construct", "Construct a Carmichael number n = a (mod M)");
  std::string modulus_text;
  std::string residue_text;
  std::string mode_text = "erdos";
  std::string lambda_text;
  std::string y_text;
  std::string theta_text;
  std::string b_text;
  std::string x_cap_text;
  std::string k_cap_text;
  std::string pool_cap_text;
  std::string max_factors_text;
  std::vector<std::string> excluded_text;
  bool no_qr = false;
  bool no_residue = false;
  construct_cmd->add_option("--modulus", modulus_text, "Modulus M")->required();
  construct_cmd->add_option("--residue", residue_text, "Residue a, coprime to M")->required();
  construct_cmd->add_option("--mode", mode_text, "agp | erdos")->check(CLI::IsMember({"agp", "erdos"}));
  construct_cmd->add_option("--lambda", lambda_text, "Smooth modulus Lambda (erdos mode)");
  construct_cmd->add_option("--y", y_text, "Smoothness bound y (agp mode)");
  construct_cmd->add_option("--theta", theta_text, "Window exponent, 1 < theta < 2 (agp mode)");
  construct_cmd->add_option("--B", b_text, "Density parameter, 0 < B < 5/12 (agp mode)");
  construct_cmd->add_option("--x-cap", x_cap_text, "Override for x");
  construct_cmd->add_option("--k-cap", k_cap_text, "Largest multiplier k scanned (agp mode)");
  construct_cmd->add_option("--pool-cap", pool_cap_text, "Largest pool size used");
  construct_cmd->add_option("--max-factors", max_factors_text, "Largest number of prime factors");
  construct_cmd->add_option("--exclude", excluded_text, "Primes removed from Q when forming L (agp mode)");
  construct_cmd->add_flag("--no-qr-filter", no_qr, "Do not require p to be a QR mod L (agp mode)");
  construct_cmd->add_flag("--no-residue-filter", no_residue, "Do not require p = a mod M (agp mode)");

  auto* solve_cmd = app.add_subcommand("solve", "Find a subset of a pool with a given product modulo m");
  std::string solve_modulus_text;
  std::string target_text;
  std::string min_size_text;
  std::string max_size_text;
  solve_cmd->add_option("--pool", c.pool_path, "File with one decimal integer per line")->required();
  solve_cmd->add_option("--modulus", solve_modulus_text, "Modulus m")->required();
  solve_cmd->add_option("--target", target_text, "Target residue")->required();
  solve_cmd->add_option("--min-size", min_size_text, "Smallest subset size")->required();
  solve_cmd->add_option("--max-size", max_size_text, "Largest subset size");

  for (auto* sub : {verify, census_cmd, construct_cmd, solve_cmd}) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  c.format = format == "csv" ? OutputFormat::csv : (format == "human" ? OutputFormat::human : OutputFormat::json_lines);
  if (!output.empty()) c.output_path = output;
  if (threads) {
    if (*threads == 0) throw UsageError("--threads must be >= 1");
    c.thread_count = static_cast<unsigned>(*threads);
  } else {
    c.thread_count = default_threads();
  }

  if (verify->parsed()) {
    c.subcommand = Subcommand::verify;
    c.n = parse_nat(n_text, "verify <n>");
  } else if (census_cmd->parsed()) {
    c.subcommand = Subcommand::census;
    c.limit = parse_u64(limit_text, "--limit");
    c.construction.M = parse_u64(census_modulus_text, "--modulus");
  } else if (construct_cmd->parsed()) {
    c.subcommand = Subcommand::construct;
    ConstructionParams& p = c.construction;
    p.M = parse_u64(modulus_text, "--modulus");
    p.a = parse_u64(residue_text, "--residue");
    p.mode = mode_text == "agp" ? Mode::agp : Mode::erdos;
    if (p.mode == Mode::erdos) {
      if (lambda_text.empty()) throw UsageError("--lambda is required in erdos mode");
      for (const auto* flag : {&y_text, &theta_text, &b_text}) {
        if (!flag->empty()) throw UsageError("--y/--theta/--B apply to agp mode only");
      }
      p.lambda = parse_nat(lambda_text, "--lambda");
    } else {
      if (y_text.empty() || theta_text.empty() || b_text.empty()) {
        throw UsageError("agp mode requires --y, --theta and --B");
      }
      if (!lambda_text.empty()) throw UsageError("--lambda applies to erdos mode only");
      p.y = parse_u64(y_text, "--y");
      p.theta = parse_rational(theta_text, "--theta");
      p.B = parse_rational(b_text, "--B");
      for (const auto& e : excluded_text) p.excluded.insert(parse_u64(e, "--exclude"));
      p.filters.require_qr = !no_qr;
      p.filters.require_residue = !no_residue;
    }
    if (!x_cap_text.empty()) p.caps.x_cap = parse_u64(x_cap_text, "--x-cap");
    if (!k_cap_text.empty()) p.caps.k_cap = parse_u64(k_cap_text, "--k-cap");
    if (!pool_cap_text.empty()) p.caps.pool_cap = parse_u64(pool_cap_text, "--pool-cap");
    if (!max_factors_text.empty()) p.max_factors = parse_u64(max_factors_text, "--max-factors");
  } else {
    c.subcommand = Subcommand::solve;
    c.solve_modulus = parse_u64(solve_modulus_text, "--modulus");
    c.solve_target = parse_u64(target_text, "--target");
    c.min_size = parse_u64(min_size_text, "--min-size");
    if (!max_size_text.empty()) c.max_size = parse_u64(max_size_text, "--max-size");
  }
  validate(c);
  return c;
}

std::string emit_certificate(const CarmichaelCertificate& cert, OutputFormat format) {
  if (!cert.checks.all_pass()) {
    throw AssemblyError("certificate", "refusing to emit a certificate with a failed check for n = " +
                                           cert.n.to_string());
  }
  switch (format) {
    case OutputFormat::json_lines: {
      ordered_json j;
      j["n"] = cert.n.to_string();
      std::vector<std::string> primes;
      for (const Nat& p : cert.prime_factors) primes.push_back(p.to_string());
      j["primes"] = primes;
      j["mode"] = std::string(to_string(cert.mode));
      j["L"] = cert.L.to_string();
      j["multiplier"] = cert.shared_multiplier.to_string();
      j["M"] = cert.M;
      j["a"] = cert.a;
      j["checks"] = ordered_json{{"composite", cert.checks.composite},
                                 {"squarefree", cert.checks.squarefree},
                                 {"korselt", cert.checks.korselt},
                                 {"residue_class", cert.checks.residue_class},
                                 {"probabilistic_primality_used", cert.checks.probabilistic_primality_used}};
      return j.dump() + "\n";
    }
    case OutputFormat::csv: {
      std::ostringstream os;
      os << "n,primes,mode,L,multiplier,M,a,composite,squarefree,korselt,residue_class,"
            "probabilistic_primality_used\n";
      os << cert.n << ',' << join(cert.prime_factors, " ") << ',' << to_string(cert.mode) << ',' << cert.L << ','
         << cert.shared_multiplier << ',' << cert.M << ',' << cert.a << ',' << cert.checks.composite << ','
         << cert.checks.squarefree << ',' << cert.checks.korselt << ',' << cert.checks.residue_class << ','
         << cert.checks.probabilistic_primality_used << '\n';
      return os.str();
    }
    case OutputFormat::human: {
      std::string line = cert.n.to_string() + " = " + join(cert.prime_factors, " · ");
      std::vector<std::string> notes;
      if (cert.mode != Mode::external) notes.push_back("≡ 1 mod " + shared_modulus(cert).to_string());
      if (cert.M > 1) notes.push_back("≡ " + std::to_string(cert.a) + " mod " + std::to_string(cert.M));
      if (!notes.empty()) {
        line += " (";
        for (std::size_t i = 0; i < notes.size(); ++i) line += (i > 0 ? ", " : "") + notes[i];
        line += ")";
      }
      return line + "\n";
    }
  }
  return {};
}

CarmichaelCertificate parse_certificate(std::string_view json_line) {
  try {
    const ordered_json j = ordered_json::parse(json_line);
    CarmichaelCertificate cert;
    cert.n = Nat::parse(j.at("n").get<std::string>());
    for (const auto& p : j.at("primes")) cert.prime_factors.push_back(Nat::parse(p.get<std::string>()));
    cert.mode = parse_mode(j.at("mode").get<std::string>());
    cert.L = Nat::parse(j.at("L").get<std::string>());
    cert.shared_multiplier = Nat::parse(j.at("multiplier").get<std::string>());
    cert.M = j.at("M").get<std::uint64_t>();
    cert.a = j.at("a").get<std::uint64_t>();
    const auto& checks = j.at("checks");
    cert.checks.composite = checks.at("composite").get<bool>();
    cert.checks.squarefree = checks.at("squarefree").get<bool>();
    cert.checks.korselt = checks.at("korselt").get<bool>();
    cert.checks.residue_class = checks.at("residue_class").get<bool>();
    cert.checks.probabilistic_primality_used = checks.at("probabilistic_primality_used").get<bool>();
    return cert;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed certificate: ") + e.what());
  }
}

std::string emit_census(const CensusTable& table, OutputFormat format) {
  std::ostringstream os;
  switch (format) {
    case OutputFormat::csv:
      os << "residue,count\n";
      for (const auto& [residue, count] : table.counts) os << residue << ',' << count << '\n';
      if (table.other > 0) os << "other," << table.other << '\n';
      break;
    case OutputFormat::json_lines:
      for (const auto& [residue, count] : table.counts) {
        os << ordered_json{{"residue", residue}, {"count", count}}.dump() << '\n';
      }
      if (table.other > 0) os << ordered_json{{"residue", "other"}, {"count", table.other}}.dump() << '\n';
      break;
    case OutputFormat::human:
      for (const auto& [residue, count] : table.counts) {
        os << "n ≡ " << residue << " mod " << table.modulus << ": " << count << '\n';
      }
      if (table.other > 0) os << "not coprime to " << table.modulus << ": " << table.other << '\n';
      os << "total below " << table.limit << ": " << table.total() << '\n';
      break;
  }
  return os.str();
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    switch (config.subcommand) {
      case Subcommand::verify:
        return run_verify(config, out, err);
      case Subcommand::census:
        return run_census(config, out, err);
      case Subcommand::construct:
        return run_construct(config, out, err);
      case Subcommand::solve:
        return run_solve(config, out, err);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInfeasible;
  }
  return kExitUsage;
}

int main_entry(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = parse_args(args);
  } catch (const HelpRequested& h) {
    out << h.what();
    return kExitSuccess;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (!config.output_path) return run(config, out, err);
  std::ofstream file(*config.output_path, std::ios::binary);
  if (!file) {
    err << "usage error: cannot open output file '" << *config.output_path << "'\n";
    return kExitUsage;
  }
  return run(config, file, err);
}

}  // namespace carmichael::cli
