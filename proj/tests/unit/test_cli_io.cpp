#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "carmichael/errors.hpp"
#include "carmichael/group_solver.hpp"
#include "cli_io.hpp"

using namespace carmichael;
using namespace carmichael::cli;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int status = main_entry(args, out, err);
  return {status, out.str(), err.str()};
}

CarmichaelCertificate cert_41041() {
  const std::vector<Nat> primes{7, 11, 13, 41};
  return assemble(primes, {Mode::erdos, Nat(120), Nat(0), 1, 1});
}

}  // namespace

TEST_CASE("parse_args examples") {
  const std::vector<std::string> v{"verify", "561"};
  const RunConfig a = parse_args(v);
  CHECK(a.subcommand == Subcommand::verify);
  CHECK(a.n == Nat(561));
  CHECK(a.format == OutputFormat::json_lines);
  CHECK(a.thread_count >= 1);

  const std::vector<std::string> c{"census", "--limit", "10000", "--modulus", "4"};
  const RunConfig b = parse_args(c);
  CHECK(b.subcommand == Subcommand::census);
  CHECK(b.limit == 10000);
  CHECK(b.construction.M == 4);

  const std::vector<std::string> bad{"construct", "--modulus", "4", "--residue", "2"};
  CHECK_THROWS_AS(parse_args(bad), UsageError);
}

TEST_CASE("parse_args defaults and rejections") {
  const std::vector<std::string> e{"construct", "--modulus", "4", "--residue", "3", "--lambda", "630"};
  const RunConfig c = parse_args(e);
  CHECK(c.construction.mode == Mode::erdos);
  CHECK(c.construction.lambda == Nat(630));

  const std::vector<std::string> g{"construct", "--modulus", "1", "--residue", "1", "--mode", "agp",
                                   "--y",       "5",        "--theta", "1.5", "--B", "0.4",
                                   "--x-cap",   "40",       "--no-qr-filter", "--format", "csv", "--threads", "3"};
  const RunConfig agp = parse_args(g);
  CHECK(agp.construction.mode == Mode::agp);
  CHECK(agp.construction.theta == Rational{3, 2});
  CHECK(agp.construction.B == Rational{2, 5});
  CHECK(agp.construction.caps.x_cap == std::optional<std::uint64_t>{40});
  CHECK_FALSE(agp.construction.filters.require_qr);
  CHECK(agp.construction.filters.require_residue);
  CHECK(agp.format == OutputFormat::csv);
  CHECK(agp.thread_count == 3);

  for (const std::vector<std::string>& args : std::vector<std::vector<std::string>>{
           {},
           {"verify"},
           {"verify", "561", "--bogus"},
           {"census", "--limit", "100"},
           {"census", "--limit", "100", "--modulus", "0"},
           {"verify", "12a"},
           {"verify", "561", "--threads", "0"},
           {"verify", "561", "--format", "xml"},
           {"construct", "--modulus", "4", "--residue", "3"},
           {"construct", "--modulus", "4", "--residue", "3", "--mode", "agp", "--y", "50"},
           {"construct", "--modulus", "1", "--residue", "1", "--mode", "agp", "--y", "5", "--theta", "2.5", "--B",
            "0.4"},
       }) {
    CAPTURE(args.size());
    CHECK_THROWS_AS(parse_args(args), UsageError);
  }
}

TEST_CASE("usage errors exit with status 2 naming the flag") {
  const Result r = run_cli({"verify", "561", "--bogus"});
  CHECK(r.status == kExitUsage);
  CHECK(r.err.find("--bogus") != std::string::npos);
  CHECK(run_cli({"--help"}).status == kExitSuccess);
}

TEST_CASE("emit_certificate json-lines") {
  const std::string line = emit_certificate(cert_41041(), OutputFormat::json_lines);
  CHECK(line ==
        "{\"n\":\"41041\",\"primes\":[\"7\",\"11\",\"13\",\"41\"],\"mode\":\"erdos\",\"L\":\"0\","
        "\"multiplier\":\"120\",\"M\":1,\"a\":1,\"checks\":{\"composite\":true,\"squarefree\":true,"
        "\"korselt\":true,\"residue_class\":true,\"probabilistic_primality_used\":false}}\n");
  CHECK(parse_certificate(line) == cert_41041());
}

TEST_CASE("certificate round trip") {
  const std::vector<Nat> primes{43, 127, 211};
  const CarmichaelCertificate c = assemble(primes, {Mode::erdos, Nat(630), Nat(0), 4, 3});
  CHECK(parse_certificate(emit_certificate(c, OutputFormat::json_lines)) == c);
  const std::vector<Nat> agp{7, 19, 67};
  const CarmichaelCertificate e = assemble(agp, {Mode::external, Nat(0), Nat(0), 1, 0});
  CHECK(parse_certificate(emit_certificate(e, OutputFormat::json_lines)) == e);
  CHECK_THROWS_AS(parse_certificate("{\"n\":1}"), DomainError);
  CHECK_THROWS_AS(parse_certificate("not json"), DomainError);
}

TEST_CASE("emit_certificate human and csv") {
  CHECK(emit_certificate(cert_41041(), OutputFormat::human) == "41041 = 7 · 11 · 13 · 41 (≡ 1 mod 120)\n");
  const std::string csv = emit_certificate(cert_41041(), OutputFormat::csv);
  CHECK(csv.find("\n41041,7 11 13 41,erdos,0,120,1,1,1,1,1,1,0\n") != std::string::npos);
}

TEST_CASE("failed certificates are not emitted") {
  CarmichaelCertificate c = cert_41041();
  c.checks.korselt = false;
  CHECK_THROWS_AS(emit_certificate(c, OutputFormat::json_lines), AssemblyError);
}

TEST_CASE("emit_census csv bytes") {
  CHECK(emit_census(census(10000, 4), OutputFormat::csv) == "residue,count\n1,6\n3,1\n");
  CHECK(emit_census(census(500, 3), OutputFormat::csv) == "residue,count\n1,0\n2,0\n");
  CHECK(emit_census(census(600, 3), OutputFormat::csv) == "residue,count\n1,0\n2,0\nother,1\n");
}

TEST_CASE("output is byte-identical across thread counts") {
  for (const std::vector<std::string>& base : std::vector<std::vector<std::string>>{
           {"census", "--limit", "300000", "--modulus", "12"},
           {"construct", "--modulus", "4", "--residue", "3", "--lambda", "630"},
           {"construct", "--modulus", "4", "--residue", "3", "--mode", "agp", "--y", "50", "--theta", "1.2", "--B",
            "0.4", "--x-cap", "1000000000", "--k-cap", "300"},
       }) {
    std::vector<std::string> one = base;
    one.insert(one.end(), {"--threads", "1"});
    std::vector<std::string> four = base;
    four.insert(four.end(), {"--threads", "4"});
    const Result a = run_cli(one);
    const Result b = run_cli(four);
    CHECK(a.status == b.status);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("every json-lines line parses on its own") {
  const Result r = run_cli({"census", "--limit", "100000", "--modulus", "5"});
  CHECK(r.status == kExitSuccess);
  std::istringstream lines(r.out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    CHECK(nlohmann::json::accept(line));
    ++count;
  }
  CHECK(count == 6);  // metadata, four residues, other (1105 = 5 * 13 * 17)
}

TEST_CASE("verify subcommand") {
  const Result yes = run_cli({"verify", "41041"});
  CHECK(yes.status == kExitSuccess);
  CHECK(yes.out.find("\"mode\":\"external\"") != std::string::npos);
  const Result no = run_cli({"verify", "41043", "--format", "human"});
  CHECK(no.status == kExitNoResults);
  CHECK(no.out.rfind("#", 0) == 0);
  CHECK_FALSE(no.err.empty());
}

TEST_CASE("construct and solve subcommands") {
  const Result r = run_cli({"construct", "--modulus", "4", "--residue", "3", "--lambda", "198", "--format", "human"});
  CHECK(r.status == kExitSuccess);
  CHECK(r.out.find("8911 = 7 · 19 · 67 (≡ 1 mod 198, ≡ 3 mod 4)\n") != std::string::npos);
  CHECK(run_cli({"construct", "--modulus", "8", "--residue", "3", "--lambda", "120"}).status == kExitInfeasible);

  const std::string path = "cli_io_pool.txt";
  {
    std::ofstream f(path);
    f << "7\n11\n\n13\n41\n";
  }
  const Result s = run_cli({"solve", "--pool", path, "--modulus", "120", "--target", "1", "--min-size", "3"});
  CHECK(s.status == kExitSuccess);
  CHECK(s.out.find("\"elements\":[\"7\",\"11\",\"13\",\"41\"]") != std::string::npos);
  const Result miss = run_cli({"solve", "--pool", path, "--modulus", "120", "--target", "17", "--min-size", "1"});
  CHECK(miss.status == kExitNoResults);
  std::remove(path.c_str());
}

TEST_CASE("output file option") {
  const std::string path = "cli_io_out.txt";
  const Result r = run_cli({"census", "--limit", "10000", "--modulus", "4", "--format", "csv", "--output", path});
  CHECK(r.status == kExitSuccess);
  CHECK(r.out.empty());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == "# subcommand=census limit=10000 modulus=4\nresidue,count\n1,6\n3,1\n");
  std::remove(path.c_str());
}
