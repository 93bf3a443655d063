// Acceptance checks for the carmichael library and CLI. Prints one
// PASS/FAIL line per criterion; exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "carmichael/construction.hpp"
#include "carmichael/errors.hpp"
#include "carmichael/group_solver.hpp"
#include "carmichael/korselt.hpp"
#include "carmichael/pipeline.hpp"
#include "carmichael/smooth_sieve.hpp"
#include "cli_io.hpp"

using namespace carmichael;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Checker {
 public:
  explicit Checker(Outcome& o) : o_(o) {}
  void expect(bool ok, const std::string& what) {
    if (!ok && o_.pass) {
      o_.pass = false;
      o_.detail = what;
    }
  }

 private:
  Outcome& o_;
};

struct CliResult {
  int status;
  std::string out;
};

CliResult cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int status = cli::main_entry(args, out, err);
  return {status, out.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// Trial-division Korselt test, independent of the library's factorizer.
bool korselt_trial(std::uint64_t n) {
  std::uint64_t m = n;
  int factors = 0;
  for (std::uint64_t p = 2; p * p <= m; ++p) {
    if (m % p != 0) continue;
    m /= p;
    if (m % p == 0) return false;
    if ((n - 1) % (p - 1) != 0) return false;
    ++factors;
  }
  if (m > 1) {
    if (m == n) return false;
    if ((n - 1) % (m - 1) != 0) return false;
    ++factors;
  }
  return factors >= 2;
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  unsigned __int128 r = 1 % m;
  unsigned __int128 b = a % m;
  while (e > 0) {
    if (e & 1) r = r * b % m;
    b = b * b % m;
    e >>= 1;
  }
  return static_cast<std::uint64_t>(r);
}

Outcome census_fidelity() {
  Outcome o;
  Checker c(o);
  const CliResult r = cli({"census", "--limit", "10000", "--modulus", "1", "--format", "csv"});
  c.expect(r.status == cli::kExitSuccess, "census exit status " + std::to_string(r.status));
  const auto lines = lines_of(r.out);
  std::uint64_t total = 0;
  for (std::size_t i = 2; i < lines.size(); ++i) total += std::stoull(lines[i].substr(lines[i].find(',') + 1));
  c.expect(lines.size() >= 2 && lines[1] == "residue,count", "missing csv header");
  c.expect(total == 7, "census total " + std::to_string(total) + ", expected 7");
  o.detail = o.pass ? "7 Carmichael numbers below 10000" : o.detail;
  return o;
}

Outcome enumerator_agreement() {
  Outcome o;
  Checker c(o);
  const auto entries = enumerate_carmichael(100000);
  const std::vector<std::uint64_t> expected{561,   1105,  1729,  2465,  2821,  6601,  8911,  10585,
                                            15841, 29341, 41041, 46657, 52633, 62745, 63973, 75361};
  std::vector<std::uint64_t> got;
  for (const auto& e : entries) got.push_back(e.n);
  c.expect(got == expected, "enumeration differs from the reference list");

  std::mt19937_64 rng(1);
  for (std::uint64_t n : got) {
    c.expect(korselt_trial(n), "trial-division Korselt rejects " + std::to_string(n));
    if (n <= 20000) {
      for (std::uint64_t a = 0; a < n; ++a) c.expect(powmod(a, n, n) == a, "Fermat fails for " + std::to_string(n));
    } else {
      for (int i = 0; i < 64; ++i) {
        const std::uint64_t a = rng() % n;
        c.expect(powmod(a, n, n) == a, "Fermat fails for " + std::to_string(n));
      }
    }
  }
  // no composite below 2*10^4 that satisfies the definition was missed
  std::size_t below = 0;
  for (std::uint64_t n = 4; n <= 20000; ++n) {
    if (!korselt_trial(n)) continue;
    ++below;
  }
  std::size_t listed = 0;
  for (std::uint64_t n : got) listed += n <= 20000;
  c.expect(below == listed, "enumerator missed a Carmichael number below 20000");
  if (o.pass) o.detail = std::to_string(got.size()) + " numbers below 1e5, all cross-checked";
  return o;
}

Outcome erdos_construction() {
  Outcome o;
  Checker c(o);
  const CliResult r = cli({"construct", "--modulus", "1", "--residue", "1", "--mode", "erdos", "--lambda", "120"});
  c.expect(r.status == cli::kExitSuccess, "construct exit status " + std::to_string(r.status));
  const auto lines = lines_of(r.out);
  c.expect(lines.size() == 2, "expected metadata and one certificate line");
  if (lines.size() == 2) {
    const CarmichaelCertificate cert = cli::parse_certificate(lines[1]);
    c.expect(cert.checks.all_pass(), "certificate check failed");
    c.expect((cert.n % Nat(120)).is_one(), "n is not 1 mod 120");
    c.expect(korselt_check(cert.n, factorize(cert.n)), "emitted n is not Carmichael");
    o.detail = "certificate n = " + cert.n.to_string();
  }
  const std::vector<std::uint64_t> pool{7, 11, 13, 31, 41, 61};
  c.expect(erdos_pool(120, 1, 1, 1000) == pool, "pool differs from [7,11,13,31,41,61]");
  const auto all = subset_product_enumerate(pool, 120, 1, 3);
  const bool has = std::find(all.begin(), all.end(), IndexSubset{0, 1, 2, 4}) != all.end();
  c.expect(has, "{7,11,13,41} missing from the exhaustive solutions");
  c.expect(all.size() == 3, "expected 3 exhaustive solutions");
  if (o.pass) o.detail += "; {7,11,13,41} among " + std::to_string(all.size()) + " exhaustive solutions";
  return o;
}

Outcome residue_construction() {
  Outcome o;
  Checker c(o);
  const CliResult r = cli({"construct", "--modulus", "4", "--residue", "3", "--mode", "erdos", "--lambda", "630"});
  c.expect(r.status == cli::kExitSuccess, "construct exit status " + std::to_string(r.status));
  const auto lines = lines_of(r.out);
  if (lines.size() == 2) {
    const CarmichaelCertificate cert = cli::parse_certificate(lines[1]);
    c.expect(cert.checks.all_pass(), "certificate check failed");
    c.expect(cert.n == Nat(1152271), "expected 1152271, got " + cert.n.to_string());
    c.expect(cert.n % Nat(4) == Nat(3), "n is not 3 mod 4");
  } else {
    c.expect(false, "no certificate line");
  }

  // smallest Lambda with a certificate, decided exhaustively per Lambda
  std::uint64_t smallest = 0;
  for (std::uint64_t lambda = 2; lambda <= 10000 && smallest == 0; ++lambda) {
    std::vector<std::uint64_t> pool;
    ResidueTarget target;
    try {
      pool = erdos_pool(lambda, 4, 3, 1000);
      target = derive_target(lambda, 4, 3);
    } catch (const Error&) {
      continue;
    }
    const auto found = subset_product_find(pool, target.modulus.to_u64(), target.h.to_u64(), 3);
    if (pool.size() <= kEnumerateCap) {
      const bool exists = !subset_product_enumerate(pool, target.modulus.to_u64(), target.h.to_u64(), 3).empty();
      c.expect(found.has_value() == exists, "solver and enumerator disagree at Lambda " + std::to_string(lambda));
    }
    if (found) smallest = lambda;
  }
  c.expect(smallest == 198, "smallest Lambda is " + std::to_string(smallest) + ", expected 198");
  ConstructionParams p;
  p.M = 4;
  p.a = 3;
  p.lambda = 198;
  const ConstructionOutcome out = construct(p);
  c.expect(out.certificate && out.certificate->n == Nat(8911), "Lambda = 198 does not give 8911");
  if (o.pass) o.detail = "1152271 = 43 * 127 * 211 = 3 mod 4; smallest Lambda 198 gives 8911";
  return o;
}

Outcome solver_equivalence() {
  Outcome o;
  Checker c(o);
  std::mt19937_64 rng(20240601);
  int found_count = 0;
  for (int i = 0; i < 200; ++i) {
    const std::uint64_t m = 2 + rng() % 4999;
    const std::size_t n = rng() % 17;
    std::vector<std::uint64_t> pool;
    while (pool.size() < n) {
      const std::uint64_t v = 1 + rng() % 1000000;
      if (std::gcd(v, m) == 1) pool.push_back(v);
    }
    const std::uint64_t target = rng() % m;
    const std::size_t min_size = 1 + rng() % 4;
    const bool exists = !subset_product_enumerate(pool, m, target, min_size).empty();
    const auto found = subset_product_find(pool, m, target, min_size);
    c.expect(found.has_value() == exists, "existence disagreement on instance " + std::to_string(i));
    if (found) {
      ++found_count;
      std::uint64_t prod = 1 % m;
      for (std::size_t idx : *found) prod = static_cast<std::uint64_t>(static_cast<unsigned __int128>(prod) * pool[idx] % m);
      c.expect(prod == target && found->size() >= min_size, "returned subset does not re-verify");
    }
  }
  if (o.pass) o.detail = "200 instances, " + std::to_string(found_count) + " solvable, 0 disagreements";
  return o;
}

Outcome formula_fidelity() {
  Outcome o;
  Checker c(o);
  const auto rel = [](long double got, long double want) { return std::fabs(got - want) / std::fabs(want); };
  c.expect(s_of(2, 1, 3) == Nat(58), "s(G) != 58");
  c.expect(compute_x(4, 21, {2, 5}) == Nat(4182119424ULL), "x != 4182119424");
  c.expect(rel(n_bound_of(2, 8), 4.0794415416798359282516963643745297L) < 1e-12L, "n_bound off");
  c.expect(rel(t_of(2, 1, std::log(40.0L)), 0.006506040736363602997879709L) < 1e-12L, "t(2,1,40) off");
  c.expect(rel(t_of(5, 2, std::log(1000.0L)), 0.003001843458915276632724603L) < 1e-12L, "t(5,2,1000) off");
  c.expect(rel(t_of(10, 4, std::log(1e6L)), 0.001867386778922015287685321L) < 1e-12L, "t(10,4,1e6) off");
  const GroupInvariants inv = compute_invariants(GroupSpec::of(Nat(1260)), 2, 40, 1);
  c.expect(inv.s_G == Nat(11944), "s(G) for m = 1260 != 11944");
  c.expect(rel(inv.n_bound, 17.66296048013594592987665L) < 1e-12L, "n_bound for m = 1260 off");
  if (o.pass) o.detail = "s_G = 58, x = 4182119424, n_bound and t within 1e-12";
  return o;
}

Outcome agp_toy() {
  Outcome o;
  Checker c(o);
  const CongruenceFilters off{false, false};
  c.expect(build_q({5, {3, 2}, 1}) == std::vector<std::uint64_t>{7, 11}, "Q != [7, 11]");
  const Factorization L = factorize(Nat(15));
  const KSearchResult k = find_k0(L, 40, 1, 1, off, 10);
  c.expect(k.k0 == 2, "k0 = " + std::to_string(k.k0) + ", expected 2");
  const PoolResult pool = build_pool(L, k.k0, 40, 1, 1, off);
  std::vector<std::uint64_t> primes;
  for (const auto& e : pool.entries) primes.push_back(e.p);
  c.expect(primes == std::vector<std::uint64_t>{7, 11, 31}, "pool != {7, 11, 31}");
  c.expect(k.count == primes.size(), "k0 count does not match the pool");
  if (o.pass) o.detail = "Q = [7, 11], k0 = 2, pool {7, 11, 31}";
  return o;
}

Outcome size_bounds() {
  Outcome o;
  Checker c(o);
  long double worst_lambda = 0;
  long double worst_L = 0;
  for (std::uint64_t y : {50, 100, 200}) {
    for (const Rational theta : {Rational{6, 5}, Rational{3, 2}, Rational{9, 5}}) {
      const auto q = build_q({y, theta, 1});
      const LModulus lm = build_L(q);
      const GroupSpec g = GroupSpec::of(lm.factors);
      const long double y_theta = std::pow(static_cast<long double>(y), theta.value());
      // lambda(G) <= ceil(e^{2 theta y}), compared in logs
      const long double ratio_lambda = ln(g.exponent) / (2.0L * theta.value() * y);
      const long double ratio_L = ln(lm.L) / (1.02L * y_theta);
      worst_lambda = std::max(worst_lambda, ratio_lambda);
      worst_L = std::max(worst_L, ratio_L);
      const std::string at = " at y = " + std::to_string(y) + ", theta = " + theta.to_string();
      c.expect(ratio_lambda <= 1.0L, "lambda(G) bound fails" + at);
      c.expect(ratio_L <= 1.0L, "log L bound fails" + at);
    }
  }
  if (o.pass) {
    std::ostringstream os;
    os.precision(3);
    os << "max ln lambda / (2 theta y) = " << static_cast<double>(worst_lambda)
       << ", max ln L / (1.02 y^theta) = " << static_cast<double>(worst_L);
    o.detail = os.str();
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "census fidelity", census_fidelity},
      {2, "enumerator oracle agreement", enumerator_agreement},
      {3, "erdos-mode construction", erdos_construction},
      {4, "residue-class construction", residue_construction},
      {5, "solver equivalence", solver_equivalence},
      {6, "formula fidelity", formula_fidelity},
      {7, "agp toy pipeline", agp_toy},
      {8, "lambda(G) and log L bounds", size_bounds},
  };
  int failures = 0;
  for (const auto& cr : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << cr.id << " (" << cr.name << "): " << o.detail
              << " [" << std::fixed;
    std::cout.precision(2);
    std::cout << secs << " s]\n";
  }
  return failures == 0 ? 0 : 1;
}
