#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsa/rng.hpp"

namespace nsa {

using StateIndex = std::uint32_t;

// Cost value of states outside the feasible set. Treated as exact +inf by
// Gibbs weights and acceptance; never replaced by a large finite number.
inline constexpr double kInfeasible = std::numeric_limits<double>::infinity();

inline bool is_infeasible(double cost) { return cost == kInfeasible; }

// One outgoing proposal edge: q0(x, to) = prob.
struct Proposal {
  StateIndex to;
  double prob;
};

// Finite search graph with proposal law q0, initial law mu0 and feasible set.
// States are dense indices 0..size()-1; labels are informational.
class FiniteSpace {
 public:
  FiniteSpace() = default;

  // rows[x] lists q0(x, .) restricted to S_x. Duplicate targets are merged.
  FiniteSpace(std::vector<std::string> labels,
              std::vector<std::vector<Proposal>> rows,
              std::vector<double> initial, std::vector<bool> feasible);

  std::size_t size() const { return rows_.size(); }
  const std::string& label(StateIndex x) const { return labels_[x]; }
  const std::vector<std::string>& labels() const { return labels_; }

  std::span<const Proposal> neighbors(StateIndex x) const { return rows_[x]; }
  double proposal(StateIndex x, StateIndex y) const;
  double initial(StateIndex x) const { return initial_[x]; }
  const std::vector<double>& initial() const { return initial_; }
  bool feasible(StateIndex x) const { return feasible_[x]; }
  const std::vector<bool>& feasible_mask() const { return feasible_; }
  std::size_t feasible_count() const;

  // Draws y ~ q0(x, .).
  StateIndex propose(StateIndex x, Rng& rng) const;

  // Draws x ~ mu0 restricted to the feasible set.
  StateIndex draw_initial(Rng& rng) const;

  // Marks states with infinite cost as infeasible.
  void restrict_feasible(std::span<const double> cost);

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<Proposal>> rows_;
  std::vector<std::vector<double>> cumulative_;
  std::vector<double> initial_;
  std::vector<bool> feasible_;
};

struct Violation {
  enum class Kind { row_stochastic, support, connectivity, reversibility, initial_support, initial_mass };
  Kind kind;
  std::string detail;
};

const char* to_string(Violation::Kind kind);

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(Violation::Kind kind) const;
};

// Checks q0 rows, connectivity of S over the feasible set, mu0-reversibility
// and mu0 support. Violations are returned as data.
ValidationReport validate_space(const FiniteSpace& space,
                                double tolerance = 1e-12);

// Classical construction mu0 = 1/|E|, q0(x, y) = 1/|S_x|. `adjacency[x]` may
// contain x itself (self-loop neighborhoods).
FiniteSpace uniform_space(const std::vector<std::vector<StateIndex>>& adjacency,
                          std::vector<std::string> labels = {});

struct GibbsMeasure {
  double beta = 0.0;
  std::vector<double> mass;
};

// mu_beta(x) = exp(-beta J(x)) / sum_y exp(-beta J(y)), zero on infeasible
// states. Normalized with a max-shift.
GibbsMeasure gibbs_measure(std::span<const double> cost, double beta);

// Metropolis stationary law for a mu0-reversible q0: proportional to
// mu0(x) exp(-beta J(x)). Equals gibbs_measure when mu0 is uniform.
GibbsMeasure stationary_measure(const FiniteSpace& space,
                                std::span<const double> cost, double beta);

// JSON document: {"labels": [...], "adjacency": [[...], ...],
// optional "proposal": [[[to, p], ...], ...], optional "initial": [...],
// optional "feasible": [...]}. Missing q0/mu0 use the uniform construction.
FiniteSpace space_from_json(const nlohmann::json& doc);
nlohmann::json space_to_json(const FiniteSpace& space);

}  // namespace nsa
