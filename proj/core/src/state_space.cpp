#include "nsa/state_space.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace nsa {

FiniteSpace::FiniteSpace(std::vector<std::string> labels,
                         std::vector<std::vector<Proposal>> rows,
                         std::vector<double> initial,
                         std::vector<bool> feasible)
    : labels_(std::move(labels)),
      rows_(std::move(rows)),
      initial_(std::move(initial)),
      feasible_(std::move(feasible)) {
  const std::size_t n = rows_.size();
  if (n == 0) throw std::invalid_argument("FiniteSpace: empty state set");
  if (labels_.empty()) {
    labels_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels_.push_back(std::to_string(i));
  }
  if (feasible_.empty()) feasible_.assign(n, true);
  if (labels_.size() != n || initial_.size() != n || feasible_.size() != n)
    throw std::invalid_argument("FiniteSpace: inconsistent table sizes");

  cumulative_.resize(n);
  for (std::size_t x = 0; x < n; ++x) {
    std::map<StateIndex, double> merged;
    for (const auto& p : rows_[x]) {
      if (p.to >= n)
        throw std::invalid_argument("FiniteSpace: neighbor index out of range");
      if (!(p.prob >= 0.0))
        throw std::invalid_argument("FiniteSpace: negative proposal weight");
      merged[p.to] += p.prob;
    }
    rows_[x].clear();
    double acc = 0.0;
    for (const auto& [to, prob] : merged) {
      rows_[x].push_back({to, prob});
      acc += prob;
      cumulative_[x].push_back(acc);
    }
  }
}

double FiniteSpace::proposal(StateIndex x, StateIndex y) const {
  const auto& row = rows_[x];
  auto it = std::lower_bound(row.begin(), row.end(), y,
                             [](const Proposal& p, StateIndex v) { return p.to < v; });
  return (it != row.end() && it->to == y) ? it->prob : 0.0;
}

std::size_t FiniteSpace::feasible_count() const {
  return static_cast<std::size_t>(std::count(feasible_.begin(), feasible_.end(), true));
}

StateIndex FiniteSpace::propose(StateIndex x, Rng& rng) const {
  const auto& cum = cumulative_[x];
  const double u = rng.uniform() * cum.back();
  auto it = std::upper_bound(cum.begin(), cum.end(), u);
  if (it == cum.end()) --it;
  return rows_[x][static_cast<std::size_t>(it - cum.begin())].to;
}

StateIndex FiniteSpace::draw_initial(Rng& rng) const {
  double total = 0.0;
  for (std::size_t x = 0; x < size(); ++x)
    if (feasible_[x]) total += initial_[x];
  if (!(total > 0.0))
    throw std::invalid_argument("initial law does not charge the feasible set");
  const double u = rng.uniform() * total;
  double acc = 0.0;
  StateIndex last = 0;
  for (std::size_t x = 0; x < size(); ++x) {
    if (!feasible_[x] || initial_[x] <= 0.0) continue;
    acc += initial_[x];
    last = static_cast<StateIndex>(x);
    if (u < acc) return last;
  }
  return last;
}

void FiniteSpace::restrict_feasible(std::span<const double> cost) {
  if (cost.size() != size())
    throw std::invalid_argument("restrict_feasible: cost table size mismatch");
  for (std::size_t x = 0; x < size(); ++x)
    feasible_[x] = feasible_[x] && !is_infeasible(cost[x]);
}

const char* to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::row_stochastic: return "row_stochastic";
    case Violation::Kind::support: return "support";
    case Violation::Kind::connectivity: return "connectivity";
    case Violation::Kind::reversibility: return "reversibility";
    case Violation::Kind::initial_support: return "initial_support";
    case Violation::Kind::initial_mass: return "initial_mass";
  }
  return "unknown";
}

bool ValidationReport::has(Violation::Kind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

ValidationReport validate_space(const FiniteSpace& space, double tolerance) {
  ValidationReport report;
  const std::size_t n = space.size();
  auto add = [&](Violation::Kind kind, const std::string& msg) {
    report.violations.push_back({kind, msg});
  };

  for (StateIndex x = 0; x < n; ++x) {
    double sum = 0.0;
    for (const auto& p : space.neighbors(x)) sum += p.prob;
    if (std::abs(sum - 1.0) > tolerance) {
      std::ostringstream os;
      os << "q0 row " << x << " sums to " << sum;
      add(Violation::Kind::row_stochastic, os.str());
    }
  }

  double mass = 0.0;
  for (StateIndex x = 0; x < n; ++x) {
    const double m = space.initial(x);
    mass += m;
    if (m < 0.0) add(Violation::Kind::initial_mass, "negative mu0 at state " + std::to_string(x));
    if (space.feasible(x) && !(m > 0.0))
      add(Violation::Kind::initial_support, "mu0 does not charge feasible state " + std::to_string(x));
  }
  if (std::abs(mass - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "mu0 sums to " << mass;
    add(Violation::Kind::initial_mass, os.str());
  }

  // Reversibility over every ordered pair with positive proposal in either direction.
  for (StateIndex x = 0; x < n; ++x) {
    for (const auto& p : space.neighbors(x)) {
      const StateIndex y = p.to;
      if (y <= x) continue;
      const double forward = space.initial(x) * p.prob;
      const double backward = space.initial(y) * space.proposal(y, x);
      if (std::abs(forward - backward) > tolerance) {
        std::ostringstream os;
        os << "mu0(" << x << ")q0(" << x << "," << y << ")=" << forward << " != mu0(" << y
           << ")q0(" << y << "," << x << ")=" << backward;
        add(Violation::Kind::reversibility, os.str());
      }
    }
    // Downward edges whose reverse entry is absent are invisible from y's row.
    for (const auto& p : space.neighbors(x)) {
      const StateIndex y = p.to;
      if (y >= x || space.proposal(y, x) != 0.0) continue;
      const double forward = space.initial(x) * p.prob;
      if (std::abs(forward) > tolerance) {
        std::ostringstream os;
        os << "q0(" << x << "," << y << ")>0 but q0(" << y << "," << x << ")=0";
        add(Violation::Kind::reversibility, os.str());
      }
    }
  }

  // Connectivity of the feasible set along positive-probability edges.
  std::vector<std::vector<StateIndex>> undirected(n);
  for (StateIndex x = 0; x < n; ++x) {
    if (!space.feasible(x)) continue;
    for (const auto& p : space.neighbors(x)) {
      if (p.prob <= 0.0 || p.to == x || !space.feasible(p.to)) continue;
      undirected[x].push_back(p.to);
      undirected[p.to].push_back(x);
    }
  }
  std::vector<bool> seen(n, false);
  std::size_t start = n;
  for (std::size_t x = 0; x < n; ++x)
    if (space.feasible(static_cast<StateIndex>(x))) { start = x; break; }
  if (start == n) {
    add(Violation::Kind::connectivity, "feasible set is empty");
  } else {
    std::queue<StateIndex> q;
    q.push(static_cast<StateIndex>(start));
    seen[start] = true;
    std::size_t reached = 1;
    while (!q.empty()) {
      const StateIndex x = q.front();
      q.pop();
      for (StateIndex y : undirected[x]) {
        if (!seen[y]) {
          seen[y] = true;
          ++reached;
          q.push(y);
        }
      }
    }
    const std::size_t feasible = space.feasible_count();
    if (reached != feasible) {
      std::ostringstream os;
      os << "feasible set has " << feasible << " states but only " << reached
         << " are reachable from state " << start;
      add(Violation::Kind::connectivity, os.str());
    }
  }
  return report;
}

FiniteSpace uniform_space(const std::vector<std::vector<StateIndex>>& adjacency,
                          std::vector<std::string> labels) {
  const std::size_t n = adjacency.size();
  if (n == 0) throw std::invalid_argument("uniform_space: empty graph");
  std::vector<std::vector<Proposal>> rows(n);
  for (std::size_t x = 0; x < n; ++x) {
    if (adjacency[x].empty())
      throw std::invalid_argument("uniform_space: state " + std::to_string(x) + " has no neighbors");
    const double p = 1.0 / static_cast<double>(adjacency[x].size());
    for (StateIndex y : adjacency[x]) rows[x].push_back({y, p});
  }
  std::vector<double> initial(n, 1.0 / static_cast<double>(n));
  return FiniteSpace(std::move(labels), std::move(rows), std::move(initial), {});
}

namespace {

GibbsMeasure normalized_weights(std::span<const double> cost, double beta,
                                std::span<const double> prior) {
  if (!(beta >= 0.0)) throw std::invalid_argument("gibbs_measure: beta must be >= 0");
  double j_min = kInfeasible;
  for (std::size_t x = 0; x < cost.size(); ++x)
    if (!is_infeasible(cost[x]) && (prior.empty() || prior[x] > 0.0))
      j_min = std::min(j_min, cost[x]);
  if (is_infeasible(j_min))
    throw std::invalid_argument("gibbs_measure: every state has infinite cost");

  GibbsMeasure g;
  g.beta = beta;
  g.mass.assign(cost.size(), 0.0);
  double total = 0.0;
  for (std::size_t x = 0; x < cost.size(); ++x) {
    if (is_infeasible(cost[x])) continue;
    const double w0 = prior.empty() ? 1.0 : prior[x];
    if (w0 <= 0.0) continue;
    // beta == 0 gives exp(0) even where beta * (J - Jmin) would be 0 * finite.
    const double w = w0 * std::exp(-beta * (cost[x] - j_min));
    g.mass[x] = w;
    total += w;
  }
  for (double& m : g.mass) m /= total;
  return g;
}

}  // namespace

GibbsMeasure gibbs_measure(std::span<const double> cost, double beta) {
  return normalized_weights(cost, beta, {});
}

GibbsMeasure stationary_measure(const FiniteSpace& space, std::span<const double> cost,
                                double beta) {
  if (cost.size() != space.size())
    throw std::invalid_argument("stationary_measure: cost table size mismatch");
  return normalized_weights(cost, beta, space.initial());
}

FiniteSpace space_from_json(const nlohmann::json& doc) {
  const auto& adj_json = doc.at("adjacency");
  std::vector<std::vector<StateIndex>> adjacency;
  for (const auto& row : adj_json) adjacency.push_back(row.get<std::vector<StateIndex>>());
  const std::size_t n = adjacency.size();

  std::vector<std::string> labels;
  if (doc.contains("labels")) labels = doc.at("labels").get<std::vector<std::string>>();
  if (!labels.empty() && labels.size() != n)
    throw std::invalid_argument("space JSON: labels and adjacency differ in length");

  std::vector<std::vector<Proposal>> rows(n);
  if (doc.contains("proposal")) {
    const auto& prop = doc.at("proposal");
    if (prop.size() != n) throw std::invalid_argument("space JSON: proposal has wrong length");
    for (std::size_t x = 0; x < n; ++x)
      for (const auto& entry : prop[x])
        rows[x].push_back({entry.at(0).get<StateIndex>(), entry.at(1).get<double>()});
  } else {
    for (std::size_t x = 0; x < n; ++x) {
      if (adjacency[x].empty())
        throw std::invalid_argument("space JSON: state " + std::to_string(x) + " has no neighbors");
      const double p = 1.0 / static_cast<double>(adjacency[x].size());
      for (StateIndex y : adjacency[x]) rows[x].push_back({y, p});
    }
  }

  std::vector<double> initial(n, 1.0 / static_cast<double>(n));
  if (doc.contains("initial")) initial = doc.at("initial").get<std::vector<double>>();
  std::vector<bool> feasible;
  if (doc.contains("feasible")) feasible = doc.at("feasible").get<std::vector<bool>>();
  return FiniteSpace(std::move(labels), std::move(rows), std::move(initial), std::move(feasible));
}

nlohmann::json space_to_json(const FiniteSpace& space) {
  nlohmann::json doc;
  doc["labels"] = space.labels();
  nlohmann::json adjacency = nlohmann::json::array();
  nlohmann::json proposal = nlohmann::json::array();
  for (StateIndex x = 0; x < space.size(); ++x) {
    nlohmann::json adj = nlohmann::json::array();
    nlohmann::json row = nlohmann::json::array();
    for (const auto& p : space.neighbors(x)) {
      adj.push_back(p.to);
      row.push_back({p.to, p.prob});
    }
    adjacency.push_back(std::move(adj));
    proposal.push_back(std::move(row));
  }
  doc["adjacency"] = std::move(adjacency);
  doc["proposal"] = std::move(proposal);
  doc["initial"] = space.initial();
  doc["feasible"] = space.feasible_mask();
  return doc;
}

}  // namespace nsa
