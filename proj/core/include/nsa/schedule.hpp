#pragma once

#include <optional>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

namespace nsa {

// log_beta: beta_t = b log(1 + t d). poly_beta: beta_t = d (1 + t)^b, for
// landscapes with no non-global well (m* = 0).
enum class BetaVariant { log_beta, poly_beta };

// power: n_t = (1 + t d)^alpha. logarithmic: n_t = log(1 + t d), the slow
// sampling schedule used in the Ackley comparison.
enum class SamplingVariant { power, logarithmic };

const char* to_string(BetaVariant v);
const char* to_string(SamplingVariant v);

struct ScheduleParams {
  double b = 1.0;
  double d = 1.0;
  double alpha = 2.0;
  BetaVariant variant = BetaVariant::log_beta;
  SamplingVariant sampling = SamplingVariant::power;

  // Throws std::invalid_argument on b, d <= 0, alpha < 0 or poly_beta with b > 1.
  // alpha = 0 keeps n_t = 1.
  void validate() const;
};

double beta_at(const ScheduleParams& params, double t);
double n_at(const ScheduleParams& params, double t);

// a(delta) = |(1 - delta)(1 - log(1 - delta)) - 1|, delta in (0, 1).
double poisson_tail_constant(double delta);

struct EpsilonBounds {
  double eps_minus = 0.0;
  double eps_plus = 0.0;
  // Set when exp(beta^2 sigma^2) or the Gaussian factor overflowed.
  bool overflow = false;
};

// eps+ = sqrt(2 pi) beta sigma [ exp(beta^2 sigma^2 / (2 (1-delta) n)) / sqrt((1-delta) n)
//                               + exp(beta^2 sigma^2 - a(delta) n) ],  eps- = -eps+.
EpsilonBounds epsilon_bounds(double beta, double n, double sigma, double delta);

// (|E| / |chi_eps| - 1) (1 + t d)^(-b eps).
double gibbs_tail_bound(std::size_t size_E, std::size_t size_chi, double b, double epsilon,
                        double d, double t);

struct OptimalParams {
  double alpha = 2.0;
  double b = 1.0;
};

// alpha = 2 (1 + gamma), b = 1 / (m* + eps).
OptimalParams optimal_params(double m_star, double epsilon, double gamma);

struct RateConstants {
  double gamma = 0.01;
  double Gamma_gamma = 100.0;
  double Gamma_2 = 0.0;
  double m_star = 0.0;
  double epsilon = 1.0;
  double delta_conf = 0.1;

  // Gamma_gamma defaults to 1 / gamma.
  static RateConstants make(double m_star, double epsilon, double delta_conf, double gamma,
                            std::size_t size_E, std::size_t size_chi,
                            std::optional<double> Gamma_gamma = std::nullopt);
};

// True when gamma lies in (0, alpha/2 - m* b).
bool gamma_admissible(const RateConstants& rc, const ScheduleParams& params);

// Convergence regime: m* b < min(1, alpha / 2).
bool in_convergence_regime(double m_star, const ScheduleParams& params);

// Boundary regime m* b = 1, alpha > 2; its extra condition d < 2 c m* / M
// involves an unknown spectral constant and cannot be checked here.
bool in_boundary_regime(double m_star, const ScheduleParams& params, double tol = 1e-12);

// Exponent denominator min(1, alpha/2 - gamma) - m* b + b eps.
double t_star_denominator(const RateConstants& rc, const ScheduleParams& params);

// Horizon after which P(X_t outside chi_eps) <= delta_conf.
double t_star(const RateConstants& rc, const ScheduleParams& params);

struct ConvergenceTerms {
  double sampling = 0.0;       // Gamma_gamma Gamma_2 (1 + t d)^((m* b - min(1, alpha/2 - gamma) - b eps) / 2)
  double concentration = 0.0;  // Gamma_2 (1 + t d)^(-b eps)
  double total() const { return sampling + concentration; }
};

// The two terms of the finite-time exceedance bound at time t.
ConvergenceTerms convergence_bound(const RateConstants& rc, const ScheduleParams& params, double t);

struct CallBound {
  double tight = 0.0;  // T (1 + d T)^alpha
  double loose = 0.0;  // (1 / d) (1 + d T)^(alpha + 1)
};

CallBound expected_call_bound(double T_star, const ScheduleParams& params);

struct CorollaryCosts {
  double general = 0.0;                 // (1/d) (2 Gamma_gamma / delta)^(((m* + eps) / eps)(3 + 2 gamma))
  std::optional<double> no_well;        // (2 log(1/delta) / (d eps))^3, only when m* = 0
};

CorollaryCosts corollary_costs(double m_star, double epsilon, double delta_conf, double gamma,
                               double d, double Gamma_gamma);

// Config form: {"variant", "sampling", "b", "d", "alpha"} or
// {"auto": {"m_star", "epsilon", "gamma"}, "d", "variant"?}.
ScheduleParams schedule_from_json(const nlohmann::json& doc,
                                  std::optional<double> landscape_m_star = std::nullopt);
nlohmann::json schedule_to_json(const ScheduleParams& params);

}  // namespace nsa
