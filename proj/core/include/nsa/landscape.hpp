#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsa/state_space.hpp"

namespace nsa {

// Dense symmetric matrix of minimax path elevations over the feasible set.
// Entries involving infeasible states are +inf.
class ElevationMatrix {
 public:
  explicit ElevationMatrix(std::size_t n) : n_(n), h_(n * n, kInfeasible) {}
  std::size_t size() const { return n_; }
  double operator()(std::size_t x, std::size_t y) const { return h_[x * n_ + y]; }
  double& operator()(std::size_t x, std::size_t y) { return h_[x * n_ + y]; }

 private:
  std::size_t n_;
  std::vector<double> h_;
};

// H_{x,y} = min over paths of max J along the path, by sorted insertion with
// union-find. Throws if the feasible set is disconnected.
ElevationMatrix elevation_matrix(const FiniteSpace& space, std::span<const double> cost);

// m* = max_{x,y} H_{x,y} - max(J(x), J(y)). Computed from component merges
// during sorted insertion, without materializing H.
double m_star(const FiniteSpace& space, std::span<const double> cost);

// Same quantity read off a precomputed elevation matrix.
double m_star(const ElevationMatrix& H, std::span<const double> cost);

// max_{x,y} H_{x,y} - J(x) - J(y) + min J.
double m_star_hs(const ElevationMatrix& H, std::span<const double> cost);

double min_cost(std::span<const double> cost);

// {x : J(x) <= J* + eps}, feasible states only.
std::vector<StateIndex> chi_epsilon(std::span<const double> cost, double epsilon);

struct SpectralGapOptions {
  std::size_t max_states = 512;
};

// Smallest nonzero eigenvalue of -L_beta, L_beta = Q_beta - I, for the
// Metropolis kernel q_beta(x,y) = q0(x,y) exp(-beta (J(y)-J(x))_+) on the
// feasible set. Uses the symmetrization D^{1/2} Q D^{-1/2} with D the
// stationary law.
double spectral_gap(const FiniteSpace& space, std::span<const double> cost, double beta,
                    const SpectralGapOptions& options = {});

// Metropolis transition matrix on the feasible states (row-major, n_f x n_f)
// and the index map into the full space.
struct MetropolisMatrix {
  std::vector<StateIndex> states;
  std::vector<double> q;
  std::size_t n() const { return states.size(); }
};
MetropolisMatrix metropolis_matrix(const FiniteSpace& space, std::span<const double> cost, double beta);

struct LandscapeReport {
  std::vector<double> J;
  double J_star = 0.0;
  double m_star = 0.0;
  std::optional<double> m_star_hs;
  std::map<double, std::vector<StateIndex>> chi;
  std::map<double, double> gap;
};

// H is built (and m*_HS reported) only when |E| <= elevation_cap; gaps only
// when the feasible set fits the spectral cap.
LandscapeReport analyze_landscape(const FiniteSpace& space, std::span<const double> cost,
                                  std::span<const double> epsilons, std::span<const double> betas,
                                  std::size_t elevation_cap = 2048,
                                  const SpectralGapOptions& gap_options = {});

nlohmann::json landscape_to_json(const LandscapeReport& report);

}  // namespace nsa
