#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sepcd/pubo.hpp"
#include "sepcd/qubo.hpp"
#include "sepcd/types.hpp"

namespace sepcd {

// Geometric cooling from initial_temp to final_temp over `sweeps` sweeps; one
// sweep proposes a flip of every variable once, in random order. Restart r
// draws from a generator seeded with seed + r.
struct AnnealSchedule {
  double initial_temp = 1.0;
  double final_temp = 1e-3;
  std::uint32_t sweeps = 1000;
  std::uint32_t restarts = 10;
  std::uint64_t seed = 0;

  // Throws InvalidArgument unless initial >= final > 0, sweeps, restarts >= 1.
  void validate() const;

  // initial_temp = largest |coefficient| of the problem (1 if it has none).
  static AnnealSchedule defaults_for(const QuboProblem& problem, std::uint64_t seed = 0);
};

struct SolverResult {
  BitVector best_x;
  double best_energy = 0.0;
  std::vector<double> energy_trace;  // best energy of each restart
  std::uint64_t evaluations = 0;     // flip proposals (or states visited)
};

// Snapshot handed to an AnnealObserver after every sweep.
struct SweepState {
  std::uint32_t restart = 0;
  std::uint32_t sweep = 0;
  std::span<const std::uint8_t> x;
  double tracked_energy = 0.0;
};
using AnnealObserver = std::function<void(const SweepState&)>;

// Single-flip Metropolis annealing with O(degree) incremental energy updates.
// Problems with integral coefficients are tracked in exact 64-bit integers.
// Deterministic for a given schedule regardless of `jobs`.
SolverResult anneal(const QuboProblem& problem, const AnnealSchedule& schedule, unsigned jobs = 1,
                    const AnnealObserver& observer = {});

inline constexpr std::size_t kMaxExhaustiveVars = 24;

// Global optimum by enumeration; ties go to the smallest binary value
// sum_i x_i 2^i. Throws InvalidArgument above kMaxExhaustiveVars.
SolverResult exhaustive(const QuboProblem& problem);

// Every optimal assignment (energy within `tolerance` of the optimum), in
// increasing binary value.
std::vector<BitVector> all_minimizers(const QuboProblem& problem, double tolerance = 1e-9);

inline constexpr std::size_t kMaxPuboVars = 20;

struct PuboMinimum {
  BitVector x;
  double value = 0.0;
};

// Exhaustive minimum of a polynomial; ties to the smallest binary value.
PuboMinimum pubo_minimize(const Pubo& terms, std::size_t num_vars);

}  // namespace sepcd
