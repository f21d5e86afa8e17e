#include "sepcd/solve.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <thread>

#include "sepcd/error.hpp"

namespace sepcd {
namespace {

// Variable adjacency of the quadratic part, CSR layout.
template <typename Value>
struct Couplings {
  std::vector<std::size_t> offsets;
  std::vector<VarIndex> neighbor;
  std::vector<Value> weight;
  std::vector<Value> linear;
  Value offset{};

  explicit Couplings(const QuboProblem& p) : offsets(p.num_vars() + 1, 0), linear(p.num_vars(), Value{}) {
    offset = static_cast<Value>(p.offset());
    for (const auto& t : p.linear()) linear[t.var] = static_cast<Value>(t.coefficient);
    for (const auto& t : p.quadratic()) {
      ++offsets[t.i + 1];
      ++offsets[t.j + 1];
    }
    for (std::size_t i = 0; i < p.num_vars(); ++i) offsets[i + 1] += offsets[i];
    neighbor.resize(offsets.back());
    weight.resize(offsets.back());
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    for (const auto& t : p.quadratic()) {
      neighbor[cursor[t.i]] = t.j;
      weight[cursor[t.i]++] = static_cast<Value>(t.coefficient);
      neighbor[cursor[t.j]] = t.i;
      weight[cursor[t.j]++] = static_cast<Value>(t.coefficient);
    }
  }

  std::size_t size() const { return linear.size(); }

  // field_i = linear_i + sum_j Q_ij x_j, the energy change of raising x_i.
  void fields(std::span<const std::uint8_t> x, std::vector<Value>& out) const {
    out.assign(linear.begin(), linear.end());
    for (std::size_t i = 0; i < size(); ++i) {
      if (!x[i]) continue;
      for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) out[neighbor[k]] += weight[k];
    }
  }

  Value energy(std::span<const std::uint8_t> x) const {
    Value e = offset;
    for (std::size_t i = 0; i < size(); ++i) {
      if (!x[i]) continue;
      e += linear[i];
      for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
        if (neighbor[k] > i && x[neighbor[k]]) e += weight[k];
      }
    }
    return e;
  }

  void flip(std::size_t i, std::vector<std::uint8_t>& x, std::vector<Value>& field) const {
    x[i] ^= 1;
    const bool raised = x[i] != 0;
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
      field[neighbor[k]] += raised ? weight[k] : -weight[k];
    }
  }
};

struct RestartResult {
  BitVector x;
  double energy = 0.0;
  std::uint64_t evaluations = 0;
};

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename Value>
RestartResult run_restart(const Couplings<Value>& c, const AnnealSchedule& schedule,
                          std::uint32_t restart, const AnnealObserver& observer) {
  const std::size_t n = c.size();
  std::mt19937_64 rng(schedule.seed + restart);
  BitVector x(n);
  for (auto& bit : x) bit = static_cast<std::uint8_t>(rng() & 1U);

  std::vector<Value> field;
  c.fields(x, field);
  Value energy = c.energy(x);
  RestartResult best{x, static_cast<double>(energy), 0};
  Value best_energy = energy;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const double ratio = schedule.final_temp / schedule.initial_temp;
  for (std::uint32_t s = 0; s < schedule.sweeps; ++s) {
    const double progress =
        schedule.sweeps > 1 ? static_cast<double>(s) / static_cast<double>(schedule.sweeps - 1) : 1.0;
    const double temp = schedule.initial_temp * std::pow(ratio, progress);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    for (std::size_t i : order) {
      const Value delta = x[i] ? -field[i] : field[i];
      ++best.evaluations;
      if (delta > Value{} && unit_uniform(rng) >= std::exp(-static_cast<double>(delta) / temp)) {
        continue;
      }
      c.flip(i, x, field);
      energy += delta;
      if (energy < best_energy) {
        best_energy = energy;
        best.x = x;
      }
    }
    if (observer) observer({restart, s, x, static_cast<double>(energy)});
  }
  best.energy = static_cast<double>(best_energy);
  return best;
}

template <typename Value>
SolverResult anneal_impl(const QuboProblem& problem, const AnnealSchedule& schedule, unsigned jobs,
                         const AnnealObserver& observer) {
  const Couplings<Value> couplings(problem);
  std::vector<RestartResult> results(schedule.restarts);
  auto run_range = [&](std::uint32_t begin, std::uint32_t end) {
    for (std::uint32_t r = begin; r < end; ++r) results[r] = run_restart(couplings, schedule, r, observer);
  };
  const std::uint32_t workers =
      observer ? 1U : std::clamp<std::uint32_t>(jobs, 1U, schedule.restarts);
  if (workers == 1) {
    run_range(0, schedule.restarts);
  } else {
    std::vector<std::jthread> pool;
    const std::uint32_t chunk = (schedule.restarts + workers - 1) / workers;
    for (std::uint32_t b = 0; b < schedule.restarts; b += chunk) {
      pool.emplace_back(run_range, b, std::min(schedule.restarts, b + chunk));
    }
  }

  SolverResult out;
  std::size_t winner = 0;
  for (std::size_t r = 0; r < results.size(); ++r) {
    out.energy_trace.push_back(results[r].energy);
    out.evaluations += results[r].evaluations;
    if (results[r].energy < results[winner].energy) winner = r;
  }
  out.best_x = std::move(results[winner].x);
  out.best_energy = problem.energy(out.best_x);
  return out;
}

BitVector bits_of(std::uint64_t code, std::size_t n) {
  BitVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::uint8_t>((code >> i) & 1U);
  return x;
}

// Visits all 2^n states in Gray-code order: visit(code, energy).
template <typename Value, typename Visit>
void enumerate_states(const QuboProblem& problem, Visit&& visit) {
  const Couplings<Value> c(problem);
  const std::size_t n = c.size();
  BitVector x(n, 0);
  std::vector<Value> field;
  c.fields(x, field);
  Value energy = c.offset;
  visit(std::uint64_t{0}, energy);
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    const auto i = static_cast<std::size_t>(std::countr_zero(k));
    energy += x[i] ? -field[i] : field[i];
    c.flip(i, x, field);
    visit(k ^ (k >> 1), energy);
  }
}

void require_exhaustive_size(std::size_t n, std::size_t limit, const char* what) {
  if (n > limit) {
    throw InvalidArgument(std::string(what) + " limited to " + std::to_string(limit) +
                          " variables, got " + std::to_string(n));
  }
}

template <typename Value>
SolverResult exhaustive_impl(const QuboProblem& problem, double tolerance) {
  std::uint64_t best_code = 0;
  Value best{};
  bool first = true;
  std::uint64_t visited = 0;
  enumerate_states<Value>(problem, [&](std::uint64_t code, Value e) {
    ++visited;
    const bool better = first || static_cast<double>(e) < static_cast<double>(best) - tolerance;
    const bool tie = !better && std::abs(static_cast<double>(e - best)) <= tolerance && code < best_code;
    if (better || tie) {
      best = e;
      best_code = code;
      first = false;
    }
  });
  SolverResult out;
  out.best_x = bits_of(best_code, problem.num_vars());
  out.best_energy = problem.energy(out.best_x);
  out.energy_trace = {out.best_energy};
  out.evaluations = visited;
  return out;
}

}  // namespace

void AnnealSchedule::validate() const {
  if (!(final_temp > 0.0) || !(initial_temp >= final_temp) || !std::isfinite(initial_temp)) {
    throw InvalidArgument("anneal schedule needs initial_temp >= final_temp > 0");
  }
  if (sweeps < 1) throw InvalidArgument("anneal schedule needs at least one sweep");
  if (restarts < 1) throw InvalidArgument("anneal schedule needs at least one restart");
}

AnnealSchedule AnnealSchedule::defaults_for(const QuboProblem& problem, std::uint64_t seed) {
  AnnealSchedule s;
  s.initial_temp = std::max(problem.max_abs_coefficient(), s.final_temp);
  if (problem.max_abs_coefficient() == 0.0) s.initial_temp = 1.0;
  s.seed = seed;
  return s;
}

SolverResult anneal(const QuboProblem& problem, const AnnealSchedule& schedule, unsigned jobs,
                    const AnnealObserver& observer) {
  schedule.validate();
  if (problem.num_vars() == 0) {
    SolverResult out;
    out.best_energy = problem.offset();
    out.energy_trace.assign(schedule.restarts, problem.offset());
    return out;
  }
  if (problem.is_integral()) return anneal_impl<std::int64_t>(problem, schedule, jobs, observer);
  return anneal_impl<double>(problem, schedule, jobs, observer);
}

SolverResult exhaustive(const QuboProblem& problem) {
  require_exhaustive_size(problem.num_vars(), kMaxExhaustiveVars, "exhaustive search");
  if (problem.is_integral()) return exhaustive_impl<std::int64_t>(problem, 0.0);
  return exhaustive_impl<double>(problem, 1e-9);
}

std::vector<BitVector> all_minimizers(const QuboProblem& problem, double tolerance) {
  require_exhaustive_size(problem.num_vars(), kMaxExhaustiveVars, "exhaustive search");
  const std::size_t n = problem.num_vars();
  std::vector<double> energies(std::size_t{1} << n);
  auto record = [&](std::uint64_t code, auto e) { energies[code] = static_cast<double>(e); };
  if (problem.is_integral()) {
    enumerate_states<std::int64_t>(problem, record);
  } else {
    enumerate_states<double>(problem, record);
  }
  const double best = *std::min_element(energies.begin(), energies.end());
  std::vector<BitVector> out;
  for (std::uint64_t code = 0; code < energies.size(); ++code) {
    if (energies[code] <= best + tolerance) out.push_back(bits_of(code, n));
  }
  return out;
}

PuboMinimum pubo_minimize(const Pubo& terms, std::size_t num_vars) {
  require_exhaustive_size(num_vars, kMaxPuboVars, "PUBO minimization");
  if (pubo_num_vars(terms) > num_vars) throw InvalidArgument("PUBO uses more variables than given");
  PuboMinimum best;
  bool first = true;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << num_vars); ++code) {
    const BitVector x = bits_of(code, num_vars);
    const double value = evaluate_pubo(terms, x);
    if (first || value < best.value) {
      best = {x, value};
      first = false;
    }
  }
  return best;
}

}  // namespace sepcd
