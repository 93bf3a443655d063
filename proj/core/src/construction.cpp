#include "carmichael/construction.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "carmichael/errors.hpp"

namespace carmichael {

void ConstructionParams::validate() const {
  if (M == 0) throw DomainError("modulus M must be >= 1");
  if (std::gcd(a, M) != 1) {
    throw DomainError("residue a = " + std::to_string(a) + " must be coprime to M = " + std::to_string(M));
  }
  if (min_factors < 3) throw DomainError("a Carmichael number needs at least 3 prime factors");
  if (max_factors < min_factors) throw DomainError("max factors below min factors");
  if (caps.k_cap == 0 || caps.pool_cap == 0 || (caps.x_cap && *caps.x_cap == 0)) {
    throw DomainError("caps must all be >= 1");
  }
  switch (mode) {
    case Mode::agp:
      SmoothPrimeQuery{y, theta, M}.validate();
      if (B.num == 0 || !(B < Rational{5, 12})) throw DomainError("B must satisfy 0 < B < 5/12");
      break;
    case Mode::erdos:
      if (lambda < Nat(2)) throw DomainError("erdos mode needs Lambda >= 2");
      break;
    case Mode::external:
      throw DomainError("external mode is not a construction mode");
  }
}

namespace {

void solve_and_assemble(ConstructionOutcome& out, const ConstructionParams& params, const SharedModulus& shared,
                        const SolverOptions& solver) {
  const std::uint64_t modulus = out.target->modulus.to_u64();
  const std::uint64_t target = out.target->h.to_u64();
  std::vector<std::uint64_t> primes;
  primes.reserve(out.state.pool.size());
  for (const auto& e : out.state.pool) primes.push_back(e.p);

  out.subset = subset_product_find(primes, modulus, target, params.min_factors, params.max_factors, solver);
  if (!out.subset) return;
  std::vector<Nat> chosen;
  for (std::size_t i : *out.subset) chosen.emplace_back(primes[i]);
  out.certificate = assemble(chosen, shared);
}

ConstructionOutcome construct_agp(const ConstructionParams& params, unsigned threads, const SolverOptions& solver) {
  ConstructionOutcome out;
  ConstructionState& st = out.state;
  st.mode = Mode::agp;

  st.Q = build_q({params.y, params.theta, params.M});
  st.L_prime = build_L_prime(st.Q);
  st.ln_x_faithful = log_x(Nat(params.M), st.L_prime, params.B);
  try {
    st.x_faithful = compute_x(Nat(params.M), st.L_prime, params.B);
  } catch (const CapacityError&) {
    st.x_faithful.reset();
  }
  if (params.caps.x_cap) {
    st.x_used = *params.caps.x_cap;
    if (st.x_faithful && *st.x_faithful < Nat(st.x_used)) st.x_used = st.x_faithful->to_u64();
  } else if (st.x_faithful && st.x_faithful->fits_u64()) {
    st.x_used = st.x_faithful->to_u64();
  } else {
    throw CapacityError("faithful x = ceil((M L')^(2/B)) does not fit in 64 bits; supply an x cap");
  }

  LModulus lm = build_L(st.Q, params.excluded);
  st.L = std::move(lm.L);
  st.L_fact = std::move(lm.factors);
  st.k = find_k0(st.L_fact, st.x_used, params.M, params.a, params.filters, params.caps.k_cap, threads);

  PoolResult pool = build_pool(st.L_fact, st.k.k0, st.x_used, params.M, params.a, params.filters);
  st.pool = std::move(pool.entries);
  if (st.pool.size() > params.caps.pool_cap) st.pool.resize(params.caps.pool_cap);
  st.pool_too_small = st.pool.size() < 3;

  const Factorization m_fact = factorize(Nat(params.M));
  out.group = GroupSpec::of(m_fact * st.L_fact);
  out.invariants = compute_invariants_log_x(*out.group, st.L_fact.distinct_count(), st.ln_x_faithful,
                                            euler_phi(m_fact));
  out.target = derive_target(st.L, Nat(params.M), Nat(params.a));
  if (st.pool_too_small) return out;

  solve_and_assemble(out, params, {Mode::agp, Nat(st.k.k0), st.L, params.M, params.a}, solver);
  return out;
}

ConstructionOutcome construct_erdos(const ConstructionParams& params, const SolverOptions& solver) {
  ConstructionOutcome out;
  ConstructionState& st = out.state;
  st.mode = Mode::erdos;
  st.lambda = params.lambda;

  for (std::uint64_t p : erdos_pool(params.lambda, params.M, params.a, params.caps.pool_cap)) {
    st.pool.push_back({p, p - 1});
  }
  out.target = derive_target(params.lambda, Nat(params.M), Nat(params.a));
  out.group = GroupSpec::of(out.target->modulus);
  solve_and_assemble(out, params, {Mode::erdos, params.lambda, Nat(0), params.M, params.a}, solver);
  return out;
}

}  // namespace

ConstructionOutcome construct(const ConstructionParams& params, unsigned threads, const SolverOptions& solver) {
  params.validate();
  return params.mode == Mode::agp ? construct_agp(params, threads, solver) : construct_erdos(params, solver);
}

}  // namespace carmichael
