#include "nsa/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace nsa {

const char* to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::none: return "none";
    case NoiseKind::gaussian: return "gaussian";
    case NoiseKind::uniform: return "uniform";
    case NoiseKind::custom: return "custom";
  }
  return "custom";
}

NoiseKind noise_kind_from_string(const std::string& name) {
  if (name == "none") return NoiseKind::none;
  if (name == "gaussian") return NoiseKind::gaussian;
  if (name == "uniform") return NoiseKind::uniform;
  throw std::invalid_argument("unknown noise kind '" + name + "' (expected gaussian|uniform|none)");
}

namespace {

std::uint64_t poisson_inversion(double lambda, Rng& rng) {
  double p = std::exp(-lambda);
  double cdf = p;
  const double u = rng.uniform();
  std::uint64_t k = 0;
  while (u >= cdf) {
    ++k;
    p *= lambda / static_cast<double>(k);
    const double next = cdf + p;
    // Tail mass below double resolution.
    if (next == cdf) break;
    cdf = next;
  }
  return k;
}

// Hormann (1993), "The transformed rejection method for generating Poisson
// random variables", algorithm PTRD.
std::uint64_t poisson_ptrd(double lambda, Rng& rng) {
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -lambda + k * loglam - std::lgamma(k + 1.0))
      return static_cast<std::uint64_t>(k);
  }
}

}  // namespace

std::uint64_t poisson(double lambda, Rng& rng) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("poisson: rate must be finite and >= 0");
  if (lambda == 0.0) return 0;
  if (lambda < 30.0) return poisson_inversion(lambda, rng);
  return poisson_ptrd(lambda, rng);
}

std::uint64_t draw_batch_size(double n_t, Rng& rng) { return 1 + poisson(n_t, rng); }

BatchEstimate estimate_cost(const CostOracle& oracle, StateIndex x, std::uint64_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("estimate_cost: batch size must be >= 1");
  BatchEstimate est;
  est.n_samples = n;
  est.draws_consumed = n;
  if (oracle.batch_mean) {
    est.mean = oracle.batch_mean(x, n, rng);
    return est;
  }
  // Running mean: a batch of identical draws returns that value exactly.
  double mean = 0.0;
  for (std::uint64_t i = 1; i <= n; ++i) {
    const double u = oracle.sample(x, rng);
    if (is_infeasible(u)) {
      mean = kInfeasible;
      continue;
    }
    if (!is_infeasible(mean)) mean += (u - mean) / static_cast<double>(i);
  }
  est.mean = mean;
  return est;
}

namespace {

double max_finite(const std::vector<double>& cost) {
  double m = 0.0;
  bool any = false;
  for (double c : cost) {
    if (is_infeasible(c)) continue;
    m = any ? std::max(m, c) : c;
    any = true;
  }
  if (!any) throw std::invalid_argument("cost table has no finite entry");
  return m;
}

}  // namespace

CostOracle gaussian_noise_oracle(std::vector<double> cost, double noise_sd) {
  if (!(noise_sd >= 0.0)) throw std::invalid_argument("gaussian_noise_oracle: noise_sd must be >= 0");
  CostOracle oracle;
  oracle.bound_M = max_finite(cost);
  oracle.sigma = noise_sd;
  oracle.kind = noise_sd == 0.0 ? NoiseKind::none : NoiseKind::gaussian;
  oracle.noise_param = noise_sd;
  oracle.bounded = noise_sd == 0.0;
  auto table = std::make_shared<const std::vector<double>>(cost);
  oracle.sample = [table, noise_sd](StateIndex x, Rng& rng) {
    const double j = (*table)[x];
    if (is_infeasible(j)) return kInfeasible;
    if (noise_sd == 0.0) return j;
    return j + noise_sd * rng.normal();
  };
  // The mean of n Gaussian draws is exactly Normal(J, noise_sd^2 / n).
  oracle.batch_mean = [table, noise_sd](StateIndex x, std::uint64_t n, Rng& rng) {
    const double j = (*table)[x];
    if (is_infeasible(j)) return kInfeasible;
    if (noise_sd == 0.0) return j;
    return j + noise_sd / std::sqrt(static_cast<double>(n)) * rng.normal();
  };
  oracle.exact_J = std::move(cost);
  return oracle;
}

CostOracle bounded_noise_oracle(std::vector<double> cost, double half_width) {
  if (!(half_width >= 0.0)) throw std::invalid_argument("bounded_noise_oracle: half_width must be >= 0");
  for (std::size_t x = 0; x < cost.size(); ++x) {
    if (is_infeasible(cost[x])) continue;
    if (cost[x] - half_width < 0.0)
      throw std::invalid_argument("bounded_noise_oracle: J(" + std::to_string(x) +
                                  ") - half_width < 0 violates non-negativity");
  }
  CostOracle oracle;
  oracle.bound_M = max_finite(cost) + half_width;
  oracle.sigma = 2.0 * oracle.bound_M;
  oracle.kind = half_width == 0.0 ? NoiseKind::none : NoiseKind::uniform;
  oracle.noise_param = half_width;
  oracle.bounded = true;
  auto table = std::make_shared<const std::vector<double>>(cost);
  oracle.sample = [table, half_width](StateIndex x, Rng& rng) {
    const double j = (*table)[x];
    if (is_infeasible(j)) return kInfeasible;
    if (half_width == 0.0) return j;
    return j + rng.uniform(-half_width, half_width);
  };
  oracle.exact_J = std::move(cost);
  return oracle;
}

std::vector<double> cost_table_from_json(const nlohmann::json& doc) {
  if (!doc.is_array()) throw std::invalid_argument("cost table must be a JSON array");
  std::vector<double> cost;
  cost.reserve(doc.size());
  for (const auto& v : doc) {
    if (v.is_null() || (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infeasible"))) {
      cost.push_back(kInfeasible);
    } else if (v.is_number()) {
      cost.push_back(v.get<double>());
    } else {
      throw std::invalid_argument("cost table entries must be numbers, null or \"inf\"");
    }
  }
  return cost;
}

nlohmann::json cost_table_to_json(std::span<const double> cost) {
  nlohmann::json doc = nlohmann::json::array();
  for (double c : cost) {
    if (is_infeasible(c)) doc.push_back("inf");
    else doc.push_back(c);
  }
  return doc;
}

NoiseSpec noise_spec_from_json(const nlohmann::json& doc) {
  NoiseSpec spec;
  spec.kind = noise_kind_from_string(doc.value("kind", std::string("none")));
  spec.param = doc.value("param", 0.0);
  if (spec.param < 0.0) throw std::invalid_argument("noise param must be >= 0");
  return spec;
}

nlohmann::json noise_spec_to_json(const NoiseSpec& spec) {
  return {{"kind", to_string(spec.kind)}, {"param", spec.param}};
}

CostOracle make_oracle(std::vector<double> cost, const NoiseSpec& spec) {
  switch (spec.kind) {
    case NoiseKind::none: return gaussian_noise_oracle(std::move(cost), 0.0);
    case NoiseKind::gaussian: return gaussian_noise_oracle(std::move(cost), spec.param);
    case NoiseKind::uniform: return bounded_noise_oracle(std::move(cost), spec.param);
    case NoiseKind::custom: break;
  }
  throw std::invalid_argument("make_oracle: custom noise needs an explicit oracle");
}

}  // namespace nsa
