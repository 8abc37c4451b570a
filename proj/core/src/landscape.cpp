#include "nsa/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace nsa {

namespace {

std::vector<std::vector<StateIndex>> feasible_graph(const FiniteSpace& space) {
  const std::size_t n = space.size();
  std::vector<std::vector<StateIndex>> adj(n);
  for (StateIndex x = 0; x < n; ++x) {
    if (!space.feasible(x)) continue;
    for (const auto& p : space.neighbors(x)) {
      if (p.prob <= 0.0 || p.to == x || !space.feasible(p.to)) continue;
      adj[x].push_back(p.to);
      adj[p.to].push_back(x);
    }
  }
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  return adj;
}

struct DisjointSets {
  std::vector<StateIndex> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  StateIndex find(StateIndex x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
};

// Feasible states in increasing cost; ties by index.
std::vector<StateIndex> insertion_order(const FiniteSpace& space, std::span<const double> cost) {
  if (cost.size() != space.size()) throw std::invalid_argument("landscape: cost table size mismatch");
  std::vector<StateIndex> order;
  for (StateIndex x = 0; x < space.size(); ++x)
    if (space.feasible(x) && !is_infeasible(cost[x])) order.push_back(x);
  if (order.empty()) throw std::invalid_argument("landscape: no feasible state");
  std::stable_sort(order.begin(), order.end(),
                   [&](StateIndex a, StateIndex b) { return cost[a] < cost[b]; });
  return order;
}

// Runs sorted insertion; `on_merge(v, roots)` sees the distinct components
// joined by v before they are united.
template <typename OnMerge>
void sorted_insertion(const FiniteSpace& space, std::span<const double> cost, OnMerge on_merge) {
  const auto order = insertion_order(space, cost);
  const auto adj = feasible_graph(space);
  DisjointSets sets(space.size());
  std::vector<bool> inserted(space.size(), false);
  std::vector<StateIndex> roots;
  std::size_t components = 0;
  for (StateIndex v : order) {
    roots.clear();
    for (StateIndex u : adj[v]) {
      if (!inserted[u] || is_infeasible(cost[u])) continue;
      const StateIndex r = sets.find(u);
      if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
    }
    on_merge(v, roots);
    inserted[v] = true;
    for (StateIndex r : roots) sets.parent[r] = v;
    components = components + 1 - roots.size();
  }
  if (components != 1)
    throw std::invalid_argument("landscape: feasible set is disconnected");
}

}  // namespace

double min_cost(std::span<const double> cost) {
  double m = kInfeasible;
  for (double c : cost) m = std::min(m, c);
  if (is_infeasible(m)) throw std::invalid_argument("min_cost: every state is infeasible");
  return m;
}

ElevationMatrix elevation_matrix(const FiniteSpace& space, std::span<const double> cost) {
  ElevationMatrix H(space.size());
  std::vector<std::vector<StateIndex>> members(space.size());
  sorted_insertion(space, cost, [&](StateIndex v, const std::vector<StateIndex>& roots) {
    const double level = cost[v];
    H(v, v) = level;
    for (StateIndex r : roots)
      for (StateIndex u : members[r]) H(v, u) = H(u, v) = level;
    for (std::size_t i = 0; i < roots.size(); ++i)
      for (std::size_t j = i + 1; j < roots.size(); ++j)
        for (StateIndex a : members[roots[i]])
          for (StateIndex b : members[roots[j]]) H(a, b) = H(b, a) = level;
    auto& mine = members[v];
    mine.push_back(v);
    for (StateIndex r : roots) {
      mine.insert(mine.end(), members[r].begin(), members[r].end());
      members[r].clear();
      members[r].shrink_to_fit();
    }
  });
  return H;
}

double m_star(const FiniteSpace& space, std::span<const double> cost) {
  // The deepest pair split by a merge at level J(v) consists of the two
  // lowest component minima; the shallower of them sets the depth.
  std::vector<double> comp_min(space.size(), kInfeasible);
  double best = 0.0;
  sorted_insertion(space, cost, [&](StateIndex v, const std::vector<StateIndex>& roots) {
    double lowest = kInfeasible, second = kInfeasible;
    for (StateIndex r : roots) {
      const double m = comp_min[r];
      if (m < lowest) {
        second = lowest;
        lowest = m;
      } else if (m < second) {
        second = m;
      }
    }
    if (roots.size() >= 2) best = std::max(best, cost[v] - second);
    comp_min[v] = std::min(cost[v], lowest);
  });
  return best;
}

double m_star(const ElevationMatrix& H, std::span<const double> cost) {
  double best = 0.0;
  for (std::size_t x = 0; x < H.size(); ++x) {
    if (is_infeasible(cost[x]) || is_infeasible(H(x, x))) continue;
    for (std::size_t y = x + 1; y < H.size(); ++y) {
      if (is_infeasible(cost[y]) || is_infeasible(H(x, y))) continue;
      best = std::max(best, H(x, y) - std::max(cost[x], cost[y]));
    }
  }
  return best;
}

double m_star_hs(const ElevationMatrix& H, std::span<const double> cost) {
  const double j_min = min_cost(cost);
  double best = -kInfeasible;
  for (std::size_t x = 0; x < H.size(); ++x) {
    if (is_infeasible(cost[x]) || is_infeasible(H(x, x))) continue;
    for (std::size_t y = x; y < H.size(); ++y) {
      if (is_infeasible(cost[y]) || is_infeasible(H(x, y))) continue;
      best = std::max(best, H(x, y) - cost[x] - cost[y] + j_min);
    }
  }
  return best;
}

std::vector<StateIndex> chi_epsilon(std::span<const double> cost, double epsilon) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("chi_epsilon: epsilon must be >= 0");
  const double threshold = min_cost(cost) + epsilon;
  std::vector<StateIndex> out;
  for (StateIndex x = 0; x < cost.size(); ++x)
    if (!is_infeasible(cost[x]) && cost[x] <= threshold) out.push_back(x);
  return out;
}

MetropolisMatrix metropolis_matrix(const FiniteSpace& space, std::span<const double> cost,
                                   double beta) {
  if (cost.size() != space.size()) throw std::invalid_argument("metropolis_matrix: size mismatch");
  MetropolisMatrix m;
  std::vector<std::size_t> local(space.size(), space.size());
  for (StateIndex x = 0; x < space.size(); ++x) {
    if (space.feasible(x) && !is_infeasible(cost[x])) {
      local[x] = m.states.size();
      m.states.push_back(x);
    }
  }
  const std::size_t n = m.n();
  m.q.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const StateIndex x = m.states[i];
    double off = 0.0;
    for (const auto& p : space.neighbors(x)) {
      if (p.to == x || local[p.to] == space.size()) continue;
      const double q = p.prob * std::exp(-beta * std::max(0.0, cost[p.to] - cost[x]));
      m.q[i * n + local[p.to]] += q;
      off += q;
    }
    m.q[i * n + i] = 1.0 - off;
  }
  return m;
}

double spectral_gap(const FiniteSpace& space, std::span<const double> cost, double beta,
                    const SpectralGapOptions& options) {
  if (!(beta >= 0.0)) throw std::invalid_argument("spectral_gap: beta must be >= 0");
  const MetropolisMatrix m = metropolis_matrix(space, cost, beta);
  const std::size_t n = m.n();
  if (n > options.max_states)
    throw std::invalid_argument("spectral_gap: " + std::to_string(n) + " feasible states exceed cap " +
                                std::to_string(options.max_states));
  if (n < 2) return 0.0;

  // log pi(x) = log mu0(x) - beta J(x), up to a constant.
  std::vector<double> log_pi(n);
  for (std::size_t i = 0; i < n; ++i)
    log_pi[i] = std::log(space.initial(m.states[i])) - beta * cost[m.states[i]];

  Eigen::MatrixXd A(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double q = m.q[i * n + j];
      const double s = (q == 0.0) ? 0.0 : q * std::exp(0.5 * (log_pi[i] - log_pi[j]));
      A(i, j) = (i == j ? 1.0 : 0.0) - s;
    }
  }
  const Eigen::MatrixXd sym = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("spectral_gap: eigensolver failed");
  return solver.eigenvalues()(1);
}

LandscapeReport analyze_landscape(const FiniteSpace& space, std::span<const double> cost,
                                  std::span<const double> epsilons, std::span<const double> betas,
                                  std::size_t elevation_cap,
                                  const SpectralGapOptions& gap_options) {
  LandscapeReport report;
  report.J.assign(cost.begin(), cost.end());
  report.J_star = min_cost(cost);
  report.m_star = m_star(space, cost);
  if (space.size() <= elevation_cap) {
    const ElevationMatrix H = elevation_matrix(space, cost);
    report.m_star_hs = m_star_hs(H, cost);
  }
  for (double eps : epsilons) report.chi[eps] = chi_epsilon(cost, eps);
  if (space.feasible_count() <= gap_options.max_states)
    for (double beta : betas) report.gap[beta] = spectral_gap(space, cost, beta, gap_options);
  return report;
}

nlohmann::json landscape_to_json(const LandscapeReport& report) {
  nlohmann::json doc;
  doc["num_states"] = report.J.size();
  doc["J_star"] = report.J_star;
  doc["m_star"] = report.m_star;
  if (report.m_star_hs) doc["m_star_hs"] = *report.m_star_hs;
  else doc["m_star_hs"] = nullptr;
  nlohmann::json chi = nlohmann::json::array();
  for (const auto& [eps, set] : report.chi) chi.push_back({{"epsilon", eps}, {"size", set.size()}});
  doc["chi"] = std::move(chi);
  nlohmann::json gaps = nlohmann::json::array();
  for (const auto& [beta, g] : report.gap) gaps.push_back({{"beta", beta}, {"gap", g}});
  doc["gap"] = std::move(gaps);
  return doc;
}

}  // namespace nsa
