// Sampling-based verification that the Cramer-Rao bound is attained:
// simulate measurement records, run maximum-likelihood estimation, compare
// the empirical error to 1/sqrt(nu F).
#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "qfip/analytic.hpp"
#include "qfip/core.hpp"
#include "qfip/qfi.hpp"

namespace qfip {

// Generator algorithm recorded in reports: std::mt19937_64.
inline constexpr const char* kRngAlgorithm = "mt19937_64";

inline std::vector<int> sample_outcomes(const Povm& povm,
                                        const DensityMatrix& state, int nu,
                                        std::uint64_t seed) {
  std::vector<double> probs;
  probs.reserve(povm.elements.size());
  for (const auto& m : povm.elements)
    probs.push_back(std::max(0.0, (m * state.entries).trace().real()));
  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> dist(probs.begin(), probs.end());
  std::vector<int> out(static_cast<std::size_t>(nu));
  for (auto& x : out) x = dist(rng);
  return out;
}

using ProbabilityModel = std::function<Eigen::VectorXd(double)>;

inline ProbabilityModel povm_model(const Povm& povm,
                                   const ParametricFamily& family,
                                   const KrausChannel* channel = nullptr) {
  auto ch = channel ? std::optional<KrausChannel>(*channel) : std::nullopt;
  return [povm, family, ch](double theta) {
    Matrix rho = evolve(family, theta).entries;
    if (ch) rho = apply_channel(*ch, rho);
    Eigen::VectorXd p(Eigen::Index(povm.elements.size()));
    for (std::size_t i = 0; i < povm.elements.size(); ++i)
      p(Eigen::Index(i)) =
          std::max(0.0, (povm.elements[i] * rho).trace().real());
    return p;
  };
}

// Grid scan (200 points) followed by golden-section refinement to 1e-8
// interval width; ties broken toward the interval midpoint.
inline double mle_estimate(const std::vector<int>& outcomes,
                           const ProbabilityModel& model, double lo,
                           double hi) {
  if (outcomes.empty()) throw std::invalid_argument("no outcomes");
  int max_outcome = 0;
  for (int x : outcomes) max_outcome = std::max(max_outcome, x);
  std::vector<double> counts(std::size_t(max_outcome) + 1, 0.0);
  for (int x : outcomes) counts[std::size_t(x)] += 1.0;

  auto loglik = [&](double theta) {
    const Eigen::VectorXd p = model(theta);
    double ll = 0.0;
    for (std::size_t x = 0; x < counts.size(); ++x)
      if (counts[x] > 0)
        ll += counts[x] * std::log(std::max(p(Eigen::Index(x)), 1e-300));
    return ll;
  };

  constexpr int kGridPoints = 200;
  const double mid = (lo + hi) / 2.0;
  double best = lo, best_ll = loglik(lo);
  double ll_min = best_ll, ll_max = best_ll;
  for (int i = 1; i < kGridPoints; ++i) {
    const double theta = lo + (hi - lo) * i / (kGridPoints - 1);
    const double ll = loglik(theta);
    ll_min = std::min(ll_min, ll);
    ll_max = std::max(ll_max, ll);
    if (ll > best_ll + 1e-12 ||
        (std::abs(ll - best_ll) <= 1e-12 &&
         std::abs(theta - mid) < std::abs(best - mid))) {
      best_ll = ll;
      best = theta;
    }
  }
  if (ll_max - ll_min < 1e-12)
    throw std::domain_error("mle_estimate: unidentifiable sample");

  const double step = (hi - lo) / (kGridPoints - 1);
  double a = std::max(lo, best - step), b = std::min(hi, best + step);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = loglik(c), fd = loglik(d);
  while (b - a > 1e-8) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a);
      fc = loglik(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a);
      fd = loglik(d);
    }
  }
  return (a + b) / 2.0;
}

struct AttainmentReport {
  double empirical_std;
  double crb;
  double ratio;
  double empirical_bias;
  int nu;
  int trials;
  std::uint64_t seed;
};

// Independent MLE experiments at theta_true; each trial owns its generator
// stream derived from (seed, trial index).
inline AttainmentReport crb_attainment_report(
    const ParametricFamily& family, const Povm& povm,
    const KrausChannel* channel, double theta_true, double search_half_width,
    int nu, int trials, std::uint64_t seed) {
  if (trials <= 0) throw std::invalid_argument("trials must be positive");
  if (nu <= 0) throw std::invalid_argument("nu must be positive");
  const double fisher = classical_fisher(povm, family, theta_true, channel);
  if (fisher <= 0)
    throw std::domain_error("crb_attainment_report: zero Fisher information");
  const double bound = crb(fisher, nu);

  Matrix rho = evolve(family, theta_true).entries;
  if (channel) rho = apply_channel(*channel, rho);
  const DensityMatrix state((rho + Matrix(rho.adjoint())) / 2.0);
  const ProbabilityModel model = povm_model(povm, family, channel);

  double sum = 0.0, sum_sq = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::seed_seq seq{seed, std::uint64_t(t)};
    std::vector<std::uint32_t> material(2);
    seq.generate(material.begin(), material.end());
    const std::uint64_t trial_seed =
        (std::uint64_t(material[0]) << 32) | material[1];
    const auto outcomes = sample_outcomes(povm, state, nu, trial_seed);
    const double est =
        mle_estimate(outcomes, model, theta_true - search_half_width,
                     theta_true + search_half_width);
    sum += est;
    sum_sq += est * est;
  }
  const double mean = sum / trials;
  const double var =
      std::max(0.0, sum_sq / trials - mean * mean) * trials /
      std::max(1, trials - 1);
  const double stddev = std::sqrt(var);
  return {stddev, bound, stddev / bound, mean - theta_true, nu, trials, seed};
}

}  // namespace qfip
