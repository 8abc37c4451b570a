#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsa/cost_model.hpp"
#include "nsa/state_space.hpp"

namespace nsa {

struct ProblemMeta {
  std::string name;
  std::string citation;
  double m_star = 0.0;
};

struct BenchmarkProblem {
  FiniteSpace space;
  CostOracle oracle;
  std::vector<double> exact_J;
  ProblemMeta meta;
};

// Line graph 0..n-1 with moves +-1; endpoints pad their missing neighbor
// with a self-loop so q0 = 1/2 everywhere and uniform mu0 is reversible.
FiniteSpace line_space(std::size_t n, std::vector<std::string> labels = {});

// Two-basin line landscape: local minimum J = w at n/4, barrier J = 2w at
// n/2, global minimum J = 0 at 3n/4, endpoints at 1.5w, linear in between.
// m* = w.
BenchmarkProblem hajek_problem(std::size_t n_states, double well_depth, const NoiseSpec& noise);

// J(x) = -20 exp(-0.2 |x|) - exp(cos(2 pi x)) + 20 + e on 2000 uniform grid
// points over [-100, 100], shifted so min J = 0.
BenchmarkProblem ackley_1d(const NoiseSpec& noise, std::size_t grid_points = 2000);

struct AircraftOptions {
  std::size_t n_steps = 3;
  std::size_t positions = 6;     // step-position slots along the route
  std::size_t levels = 3;        // flight levels
  std::uint64_t wind_seed = 1;
  double wind_noise = 0.0;       // per-evaluation multiplier ~ U(1 - w, 1 + w)
  double time_weight = 0.2;      // weight of flight duration against fuel
};

// Step-climb surrogate. A state is (p_1..p_s, h_1..h_s): step i starts at
// slot p_i and climbs or descends to level h_i. Positions must be strictly
// ascending; other states have infinite cost.
BenchmarkProblem aircraft_surrogate(const AircraftOptions& options);

// Decodes an aircraft state index into positions followed by levels.
std::vector<std::size_t> aircraft_decode(const AircraftOptions& options, StateIndex x);
StateIndex aircraft_encode(const AircraftOptions& options, const std::vector<std::size_t>& coords);

// {"name", "citation", "m_star", "space", "cost"}.
nlohmann::json problem_to_json(const BenchmarkProblem& problem);

}  // namespace nsa
