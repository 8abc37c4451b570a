#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsa/rng.hpp"
#include "nsa/state_space.hpp"

namespace nsa {

enum class NoiseKind { none, gaussian, uniform, custom };

const char* to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);

// Stochastic cost U(x, omega). `sample` returns one realization and must be
// safe to call concurrently with distinct rngs.
struct CostOracle {
  std::function<double(StateIndex, Rng&)> sample;
  // Optional exact law of the mean of `n` i.i.d. samples, used in place of
  // n calls to `sample` when the noise family is closed under averaging.
  std::function<double(StateIndex, std::uint64_t, Rng&)> batch_mean;
  double bound_M = 0.0;
  double sigma = 0.0;
  NoiseKind kind = NoiseKind::custom;
  double noise_param = 0.0;
  // False when the per-sample noise has unbounded support.
  bool bounded = true;
  std::optional<std::vector<double>> exact_J;
};

struct BatchEstimate {
  double mean = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t draws_consumed = 0;
};

// N = 1 + Poisson(n_t).
std::uint64_t draw_batch_size(double n_t, Rng& rng);

// Poisson(lambda) variate: inversion below 30, PTRD transformed rejection above.
std::uint64_t poisson(double lambda, Rng& rng);

BatchEstimate estimate_cost(const CostOracle& oracle, StateIndex x, std::uint64_t n, Rng& rng);

// U = J + Normal(0, noise_sd^2). Unbounded noise; kept for the Gaussian
// experiments and flagged through `bounded = false`.
CostOracle gaussian_noise_oracle(std::vector<double> cost, double noise_sd);

// U = J + Uniform(-half_width, half_width); requires J - half_width >= 0 on
// the feasible set.
CostOracle bounded_noise_oracle(std::vector<double> cost, double half_width);

// Cost-table file: a JSON array aligned with state indices; null or the
// string "inf" marks an infeasible state.
std::vector<double> cost_table_from_json(const nlohmann::json& doc);
nlohmann::json cost_table_to_json(std::span<const double> cost);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::none;
  double param = 0.0;
};

NoiseSpec noise_spec_from_json(const nlohmann::json& doc);
nlohmann::json noise_spec_to_json(const NoiseSpec& spec);

CostOracle make_oracle(std::vector<double> cost, const NoiseSpec& spec);

}  // namespace nsa
