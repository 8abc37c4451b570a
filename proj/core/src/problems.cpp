#include "nsa/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "nsa/landscape.hpp"
#include "nsa/rng.hpp"

namespace nsa {

FiniteSpace line_space(std::size_t n, std::vector<std::string> labels) {
  if (n == 0) throw std::invalid_argument("line_space: empty line");
  std::vector<std::vector<StateIndex>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = static_cast<StateIndex>(i);
    adj[i] = {i == 0 ? x : x - 1, i + 1 == n ? x : x + 1};
  }
  return uniform_space(adj, std::move(labels));
}

namespace {

std::vector<std::string> index_labels(std::size_t n, const char* prefix) {
  std::vector<std::string> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = prefix + std::to_string(i);
  return out;
}

}  // namespace

BenchmarkProblem hajek_problem(std::size_t n_states, double well_depth, const NoiseSpec& noise) {
  if (n_states < 7) throw std::invalid_argument("hajek_problem: need at least 7 states");
  if (!(well_depth > 0.0) || !std::isfinite(well_depth))
    throw std::invalid_argument("hajek_problem: well depth must be positive and finite");

  const std::size_t last = n_states - 1;
  const std::size_t local = n_states / 4;
  const std::size_t barrier = n_states / 2;
  const std::size_t global = (3 * n_states) / 4;
  const double w = well_depth;
  // Anchor points of the piecewise-linear profile.
  const std::vector<std::pair<std::size_t, double>> anchors = {
      {0, 1.5 * w}, {local, w}, {barrier, 2.0 * w}, {global, 0.0}, {last, 1.5 * w}};

  std::vector<double> J(n_states);
  for (std::size_t a = 0; a + 1 < anchors.size(); ++a) {
    const auto [x0, y0] = anchors[a];
    const auto [x1, y1] = anchors[a + 1];
    for (std::size_t x = x0; x <= x1; ++x) {
      const double s = static_cast<double>(x - x0) / static_cast<double>(x1 - x0);
      J[x] = (x == x1) ? y1 : y0 + s * (y1 - y0);
    }
  }

  BenchmarkProblem p;
  p.space = line_space(n_states, index_labels(n_states, "s"));
  p.exact_J = J;
  p.oracle = make_oracle(J, noise);
  p.meta = {"hajek", "hajek-two-basin", w};
  return p;
}

BenchmarkProblem ackley_1d(const NoiseSpec& noise, std::size_t grid_points) {
  if (grid_points < 2) throw std::invalid_argument("ackley_1d: need at least 2 grid points");
  std::vector<double> J(grid_points);
  std::vector<std::string> labels(grid_points);
  const double step = 200.0 / static_cast<double>(grid_points - 1);
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double x = -100.0 + step * static_cast<double>(i);
    J[i] = -20.0 * std::exp(-0.2 * std::abs(x)) - std::exp(std::cos(2.0 * std::numbers::pi * x)) +
           20.0 + std::numbers::e;
    labels[i] = std::to_string(x);
  }
  const double lo = *std::min_element(J.begin(), J.end());
  for (double& v : J) v -= lo;

  BenchmarkProblem p;
  p.space = line_space(grid_points, std::move(labels));
  p.exact_J = J;
  p.oracle = make_oracle(J, noise);
  p.meta = {"ackley1d", "ackley-1d", m_star(p.space, J)};
  return p;
}

namespace {

void check_aircraft(const AircraftOptions& o) {
  if (o.n_steps == 0) throw std::invalid_argument("aircraft_surrogate: need at least one step");
  if (o.positions == 0 || o.levels == 0) throw std::invalid_argument("aircraft_surrogate: empty grid");
  if (o.positions < o.n_steps)
    throw std::invalid_argument("aircraft_surrogate: fewer position slots than steps");
  if (!(o.wind_noise >= 0.0 && o.wind_noise < 1.0))
    throw std::invalid_argument("aircraft_surrogate: wind noise must lie in [0, 1)");
  if (!(o.time_weight >= 0.0)) throw std::invalid_argument("aircraft_surrogate: time weight must be >= 0");
  double total = 1.0;
  for (std::size_t i = 0; i < o.n_steps; ++i)
    total *= static_cast<double>(o.positions) * static_cast<double>(o.levels);
  if (total > static_cast<double>(std::numeric_limits<StateIndex>::max()))
    throw std::invalid_argument("aircraft_surrogate: grid too large");
}

std::size_t aircraft_size(const AircraftOptions& o) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < o.n_steps; ++i) n *= o.positions * o.levels;
  return n;
}

// Fuel plus weighted time for ascending positions.
double aircraft_cost(const AircraftOptions& o, const std::vector<std::size_t>& c,
                     const std::vector<double>& wind) {
  const std::size_t s = o.n_steps;
  const double top = static_cast<double>(o.levels - 1);
  const double burn_rate = 0.3 / static_cast<double>(o.positions);
  double weight = 1.0;
  double fuel = 0.0;
  double time = 0.0;
  std::size_t level = 0;
  std::size_t next = 0;
  for (std::size_t u = 0; u < o.positions; ++u) {
    while (next < s && c[next] == u) {
      const std::size_t target = c[s + next];
      const double up = target > level ? static_cast<double>(target - level) : 0.0;
      const double down = target < level ? static_cast<double>(level - target) : 0.0;
      fuel += 0.02 * up * weight + 0.005 * down;
      level = target;
      ++next;
    }
    // Optimal level climbs as the aircraft gets lighter.
    const double h_opt = std::clamp(top * (1.0 - weight) / 0.2, 0.0, top);
    const double miss = std::max(0.0, std::abs(static_cast<double>(level) - h_opt) - 0.35);
    const double burn = burn_rate * weight * (1.0 + 0.15 * miss * miss) * wind[u * o.levels + level];
    fuel += burn;
    weight -= burn;
    time += 1.0 / (1.0 + 0.05 * static_cast<double>(level));
  }
  return fuel + o.time_weight * time / static_cast<double>(o.positions);
}

}  // namespace

std::vector<std::size_t> aircraft_decode(const AircraftOptions& o, StateIndex x) {
  std::vector<std::size_t> c(2 * o.n_steps);
  std::size_t r = x;
  for (std::size_t i = 0; i < o.n_steps; ++i) {
    c[i] = r % o.positions;
    r /= o.positions;
  }
  for (std::size_t i = 0; i < o.n_steps; ++i) {
    c[o.n_steps + i] = r % o.levels;
    r /= o.levels;
  }
  return c;
}

StateIndex aircraft_encode(const AircraftOptions& o, const std::vector<std::size_t>& c) {
  if (c.size() != 2 * o.n_steps) throw std::invalid_argument("aircraft_encode: wrong coordinate count");
  std::size_t x = 0;
  for (std::size_t i = o.n_steps; i-- > 0;) x = x * o.levels + c[o.n_steps + i];
  for (std::size_t i = o.n_steps; i-- > 0;) x = x * o.positions + c[i];
  return static_cast<StateIndex>(x);
}

BenchmarkProblem aircraft_surrogate(const AircraftOptions& o) {
  check_aircraft(o);
  const std::size_t n = aircraft_size(o);
  const std::size_t s = o.n_steps;

  std::vector<double> wind(o.positions * o.levels);
  for (std::size_t i = 0; i < wind.size(); ++i) {
    Rng r = Rng::stream(o.wind_seed, i);
    wind[i] = 1.0 + 0.08 * (2.0 * r.uniform() - 1.0);
  }

  std::vector<double> J(n, kInfeasible);
  std::vector<std::vector<StateIndex>> adj(n);
  std::vector<std::string> labels(n);
  for (std::size_t x = 0; x < n; ++x) {
    auto c = aircraft_decode(o, static_cast<StateIndex>(x));
    bool ascending = true;
    for (std::size_t i = 1; i < s; ++i) ascending = ascending && c[i - 1] < c[i];
    if (ascending) J[x] = aircraft_cost(o, c, wind);

    std::string label = "p=";
    for (std::size_t i = 0; i < s; ++i) label += (i ? "," : "") + std::to_string(c[i]);
    label += ";h=";
    for (std::size_t i = 0; i < s; ++i) label += (i ? "," : "") + std::to_string(c[s + i]);
    labels[x] = std::move(label);

    // 4s neighbor slots, out-of-range moves padded with x itself.
    auto& row = adj[x];
    row.reserve(4 * s);
    for (std::size_t i = 0; i < 2 * s; ++i) {
      const std::size_t limit = i < s ? o.positions : o.levels;
      for (int dir : {-1, 1}) {
        const std::size_t v = c[i];
        if ((dir < 0 && v == 0) || (dir > 0 && v + 1 == limit)) {
          row.push_back(static_cast<StateIndex>(x));
          continue;
        }
        c[i] = dir < 0 ? v - 1 : v + 1;
        row.push_back(aircraft_encode(o, c));
        c[i] = v;
      }
    }
  }

  BenchmarkProblem p;
  p.space = uniform_space(adj, std::move(labels));
  p.space.restrict_feasible(J);
  p.exact_J = J;

  double max_j = 0.0;
  for (double v : J)
    if (!is_infeasible(v)) max_j = std::max(max_j, v);
  const double a = o.wind_noise;
  CostOracle oracle;
  oracle.sample = [J, a](StateIndex x, Rng& rng) {
    const double j = J[x];
    if (is_infeasible(j)) return kInfeasible;
    return j * (a > 0.0 ? rng.uniform(1.0 - a, 1.0 + a) : 1.0);
  };
  oracle.bound_M = max_j * (1.0 + a);
  oracle.sigma = 2.0 * oracle.bound_M;
  oracle.kind = NoiseKind::custom;
  oracle.noise_param = a;
  oracle.bounded = true;
  oracle.exact_J = J;
  p.oracle = std::move(oracle);
  p.meta = {"aircraft", "step-climb-surrogate", m_star(p.space, J)};
  return p;
}

nlohmann::json problem_to_json(const BenchmarkProblem& problem) {
  return {{"name", problem.meta.name},
          {"citation", problem.meta.citation},
          {"m_star", problem.meta.m_star},
          {"space", space_to_json(problem.space)},
          {"cost", cost_table_to_json(problem.exact_J)}};
}

}  // namespace nsa
