#include "nsa/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nsa {

const char* to_string(BetaVariant v) {
  return v == BetaVariant::log_beta ? "log_beta" : "poly_beta";
}

const char* to_string(SamplingVariant v) {
  return v == SamplingVariant::power ? "power" : "logarithmic";
}

void ScheduleParams::validate() const {
  if (!(b > 0.0) || !(d > 0.0) || !(alpha >= 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("schedule: b and d must be > 0 and alpha >= 0");
  if (variant == BetaVariant::poly_beta && b > 1.0)
    throw std::invalid_argument("schedule: poly_beta requires b <= 1");
}

double beta_at(const ScheduleParams& params, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("beta_at: t must be >= 0");
  if (params.variant == BetaVariant::log_beta) return params.b * std::log1p(t * params.d);
  return params.d * std::pow(1.0 + t, params.b);
}

double n_at(const ScheduleParams& params, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("n_at: t must be >= 0");
  if (params.sampling == SamplingVariant::logarithmic) return std::log1p(t * params.d);
  return std::pow(1.0 + t * params.d, params.alpha);
}

double poisson_tail_constant(double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("poisson_tail_constant: delta must lie in (0, 1)");
  const double q = 1.0 - delta;
  return std::abs(q * (1.0 - std::log(q)) - 1.0);
}

EpsilonBounds epsilon_bounds(double beta, double n, double sigma, double delta) {
  if (!(beta >= 0.0) || !(n > 0.0) || !(sigma > 0.0))
    throw std::invalid_argument("epsilon_bounds: need beta >= 0, n > 0, sigma > 0");
  const double a = poisson_tail_constant(delta);
  if (beta == 0.0) return {};
  const double g2 = beta * beta * sigma * sigma;
  const double qn = (1.0 - delta) * n;
  const double first = std::exp(g2 / (2.0 * qn)) / std::sqrt(qn);
  const double second = std::exp(g2 - a * n);
  EpsilonBounds out;
  out.eps_plus = std::sqrt(2.0 * std::numbers::pi) * beta * sigma * (first + second);
  out.overflow = !std::isfinite(out.eps_plus);
  if (out.overflow) out.eps_plus = std::numeric_limits<double>::infinity();
  out.eps_minus = -out.eps_plus;
  return out;
}

double gibbs_tail_bound(std::size_t size_E, std::size_t size_chi, double b, double epsilon,
                        double d, double t) {
  if (size_chi < 1 || size_chi > size_E)
    throw std::invalid_argument("gibbs_tail_bound: need 1 <= |chi| <= |E|");
  const double lead = static_cast<double>(size_E) / static_cast<double>(size_chi) - 1.0;
  return std::max(0.0, lead * std::pow(1.0 + t * d, -b * epsilon));
}

OptimalParams optimal_params(double m_star, double epsilon, double gamma) {
  if (!(m_star >= 0.0) || !(epsilon > 0.0) || !(gamma > 0.0))
    throw std::invalid_argument("optimal_params: need m* >= 0, eps > 0, gamma > 0");
  return {2.0 * (1.0 + gamma), 1.0 / (m_star + epsilon)};
}

RateConstants RateConstants::make(double m_star, double epsilon, double delta_conf, double gamma,
                                  std::size_t size_E, std::size_t size_chi,
                                  std::optional<double> Gamma_gamma) {
  if (size_chi < 1 || size_chi > size_E)
    throw std::invalid_argument("RateConstants: need 1 <= |chi| <= |E|");
  if (!(gamma > 0.0)) throw std::invalid_argument("RateConstants: gamma must be > 0");
  RateConstants rc;
  rc.gamma = gamma;
  rc.Gamma_gamma = Gamma_gamma.value_or(1.0 / gamma);
  rc.Gamma_2 = static_cast<double>(size_E) / static_cast<double>(size_chi) - 1.0;
  rc.m_star = m_star;
  rc.epsilon = epsilon;
  rc.delta_conf = delta_conf;
  return rc;
}

bool gamma_admissible(const RateConstants& rc, const ScheduleParams& params) {
  return rc.gamma > 0.0 && rc.gamma < params.alpha / 2.0 - rc.m_star * params.b;
}

bool in_convergence_regime(double m_star, const ScheduleParams& params) {
  return m_star * params.b < std::min(1.0, params.alpha / 2.0);
}

bool in_boundary_regime(double m_star, const ScheduleParams& params, double tol) {
  return std::abs(m_star * params.b - 1.0) <= tol && params.alpha > 2.0;
}

double t_star_denominator(const RateConstants& rc, const ScheduleParams& params) {
  return std::min(1.0, params.alpha / 2.0 - rc.gamma) - rc.m_star * params.b +
         params.b * rc.epsilon;
}

double t_star(const RateConstants& rc, const ScheduleParams& params) {
  const double denom = t_star_denominator(rc, params);
  if (!(denom > 0.0))
    throw std::invalid_argument("t_star: min(1, alpha/2 - gamma) - m* b + b eps must be > 0");
  if (!(rc.delta_conf > 0.0)) throw std::invalid_argument("t_star: delta must be > 0");
  const double be = params.b * rc.epsilon;
  if (!(be > 0.0)) throw std::invalid_argument("t_star: b eps must be > 0");
  const double sampling = std::pow(2.0 * rc.Gamma_gamma / rc.delta_conf, 2.0 / denom);
  const double concentration = std::pow(2.0 * rc.Gamma_2 / rc.delta_conf, 1.0 / be);
  return (std::max(sampling, concentration) - 1.0) / params.d;
}

ConvergenceTerms convergence_bound(const RateConstants& rc, const ScheduleParams& params,
                                   double t) {
  const double base = 1.0 + t * params.d;
  const double rate = std::min(1.0, params.alpha / 2.0 - rc.gamma);
  ConvergenceTerms terms;
  terms.sampling = rc.Gamma_gamma * rc.Gamma_2 *
                   std::pow(base, (rc.m_star * params.b - rate - params.b * rc.epsilon) / 2.0);
  terms.concentration = rc.Gamma_2 * std::pow(base, -params.b * rc.epsilon);
  return terms;
}

CallBound expected_call_bound(double T_star, const ScheduleParams& params) {
  if (!(T_star >= 0.0)) throw std::invalid_argument("expected_call_bound: T must be >= 0");
  const double base = 1.0 + params.d * T_star;
  return {T_star * std::pow(base, params.alpha),
          std::pow(base, params.alpha + 1.0) / params.d};
}

CorollaryCosts corollary_costs(double m_star, double epsilon, double delta_conf, double gamma,
                               double d, double Gamma_gamma) {
  if (!(epsilon > 0.0) || !(delta_conf > 0.0) || !(d > 0.0))
    throw std::invalid_argument("corollary_costs: eps, delta and d must be > 0");
  CorollaryCosts out;
  const double exponent = (m_star + epsilon) / epsilon * (3.0 + 2.0 * gamma);
  out.general = std::pow(2.0 * Gamma_gamma / delta_conf, exponent) / d;
  if (m_star == 0.0) out.no_well = std::pow(2.0 * std::log(1.0 / delta_conf) / (d * epsilon), 3.0);
  return out;
}

ScheduleParams schedule_from_json(const nlohmann::json& doc,
                                  std::optional<double> landscape_m_star) {
  ScheduleParams p;
  if (doc.contains("variant")) {
    const auto v = doc.at("variant").get<std::string>();
    if (v == "log_beta") p.variant = BetaVariant::log_beta;
    else if (v == "poly_beta") p.variant = BetaVariant::poly_beta;
    else throw std::invalid_argument("schedule.variant must be log_beta or poly_beta");
  }
  if (doc.contains("sampling")) {
    const auto s = doc.at("sampling").get<std::string>();
    if (s == "power") p.sampling = SamplingVariant::power;
    else if (s == "logarithmic") p.sampling = SamplingVariant::logarithmic;
    else throw std::invalid_argument("schedule.sampling must be power or logarithmic");
  }
  p.d = doc.value("d", 1.0);
  if (doc.contains("auto")) {
    const auto& a = doc.at("auto");
    double m_star = 0.0;
    if (a.contains("m_star")) m_star = a.at("m_star").get<double>();
    else if (landscape_m_star) m_star = *landscape_m_star;
    else throw std::invalid_argument("schedule.auto needs m_star or a problem with known m*");
    const auto opt = optimal_params(m_star, a.value("epsilon", 1.0), a.value("gamma", 0.01));
    p.alpha = opt.alpha;
    p.b = opt.b;
  } else {
    p.b = doc.value("b", 1.0);
    p.alpha = doc.value("alpha", 2.0);
  }
  p.validate();
  return p;
}

nlohmann::json schedule_to_json(const ScheduleParams& params) {
  return {{"variant", to_string(params.variant)},
          {"sampling", to_string(params.sampling)},
          {"b", params.b},
          {"d", params.d},
          {"alpha", params.alpha}};
}

}  // namespace nsa
