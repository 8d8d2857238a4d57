#pragma once

#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "slowfast/core/spec.hpp"
#include "slowfast/limit/limit_spec.hpp"
#include "slowfast/models/product_path.hpp"
#include "slowfast/models/trait.hpp"

namespace slowfast {

/// Branching population whose individuals carry independent trait processes.
///
/// The state on E_i = D^i is the ordered tuple of the i living traits; E_0
/// holds the empty population. An individual with trait x is replaced by j
/// offspring at rate r_j(x), so beta = sum_j r_j. Offspring traits are copies
/// of the parent's or fresh stationary draws.
struct TypedBranchingParams {
  std::shared_ptr<const TraitModel> trait;
  /// r_j for j = 0..J; empty entries are treated as zero.
  std::vector<TraitFunction> offspring_rates;
  enum class OffspringTrait { inherit, stationary } offspring_trait = OffspringTrait::inherit;
};

struct TypedBranching {
  TypedBranchingParams params;
  SemiMarkovSpec spec;
  LimitSpec limit;
  TraitFunction beta;

  /// chi(beta): per-capita branching rate of the limit Galton-Watson process.
  double limit_branching_rate() const { return params.trait->stationary_mean(beta); }

  /// L_j = chi(r_j) / chi(beta).
  std::vector<double> offspring_law() const {
    const double total = limit_branching_rate();
    std::vector<double> law;
    for (const auto& r : params.offspring_rates) law.push_back(r ? params.trait->stationary_mean(r) / total : 0.0);
    return law;
  }

  /// Population of i individuals with the given traits (all equal to `trait` by default).
  State start(std::int64_t i, double trait = 0.0) const {
    return State{Index{i}, std::vector<double>(static_cast<std::size_t>(i), trait)};
  }
};

namespace detail {

class BranchingDynamics final : public FastDynamics {
 public:
  BranchingDynamics(std::shared_ptr<const TraitModel> trait, TraitFunction beta)
      : trait_(std::move(trait)), beta_(std::move(beta)) {
    if (trait_->is_finite())
      for (std::size_t s = 0; s < trait_->num_states(); ++s) beta_table_.push_back(beta_(static_cast<double>(s)));
  }

  std::unique_ptr<FastPath> start(const State& x, Rng& rng) const override {
    ProductLayout layout;
    layout.coords.resize(x.point.size());
    for (std::size_t k = 0; k < layout.coords.size(); ++k) layout.coords[k] = k;
    layout.table_of.assign(layout.coords.size(), 0);
    if (trait_->is_finite()) {
      layout.tables = {beta_table_};
    } else {
      layout.functions = {beta_};
    }
    return make_product_path(x, std::move(layout), *trait_, rng);
  }

 private:
  std::shared_ptr<const TraitModel> trait_;
  TraitFunction beta_;
  std::vector<double> beta_table_;
};

}  // namespace detail

inline TypedBranching build_typed_branching(TypedBranchingParams p) {
  if (!p.trait) throw ConfigError("typed branching needs a trait model");
  if (p.offspring_rates.empty()) throw ConfigError("typed branching needs offspring rates r_j");

  TypedBranching m;
  m.params = p;
  auto rates = std::make_shared<const std::vector<TraitFunction>>(p.offspring_rates);
  m.beta = [rates](double x) {
    double s = 0.0;
    for (const auto& r : *rates)
      if (r) s += r(x);
    return s;
  };
  // probe beta on the trait space
  if (p.trait->is_finite()) {
    for (std::size_t s = 0; s < p.trait->num_states(); ++s)
      for (const auto& r : p.offspring_rates)
        if (r && !(r(static_cast<double>(s)) >= 0.0)) throw ConfigError("branching rate is negative on a probe trait");
  }
  const TraitFunction beta = m.beta;
  auto trait = p.trait;

  m.spec.name = "typed-branching";
  m.spec.fast = std::make_shared<detail::BranchingDynamics>(trait, beta);
  m.spec.rate.eval = [beta](const State& s) {
    double b = 0.0;
    for (double x : s.point) b += beta(x);
    return b;
  };
  m.spec.rate.segment_constant = [trait](Index) { return trait->is_finite(); };
  m.spec.kernel.mass = [](Index i) { return i.value > 0 ? 1.0 : 0.0; };
  const auto offspring_mode = p.offspring_trait;
  m.spec.kernel.sample = [beta, rates, trait, offspring_mode](const State& pre, Rng& rng) {
    const std::size_t i = pre.point.size();
    std::vector<double> w(i);
    for (std::size_t k = 0; k < i; ++k) w[k] = beta(pre.point[k]);
    const std::size_t who = TraitModel::sample_discrete(w, rng);
    const double parent = pre.point[who];
    std::vector<double> rj(rates->size());
    for (std::size_t j = 0; j < rj.size(); ++j) rj[j] = (*rates)[j] ? (*rates)[j](parent) : 0.0;
    const std::size_t j = TraitModel::sample_discrete(rj, rng);

    std::vector<double> next;
    next.reserve(i - 1 + j);
    next.insert(next.end(), pre.point.begin(), pre.point.begin() + static_cast<std::ptrdiff_t>(who));
    for (std::size_t c = 0; c < j; ++c)
      next.push_back(offspring_mode == TypedBranchingParams::OffspringTrait::inherit ? parent
                                                                                     : trait->sample_stationary(rng));
    next.insert(next.end(), pre.point.begin() + static_cast<std::ptrdiff_t>(who) + 1, pre.point.end());
    const auto size = static_cast<std::int64_t>(next.size());
    return State{Index{size}, std::move(next)};
  };
  m.spec.clock = JumpClock::exponential();
  m.spec.probes = {m.start(1), m.start(2), m.start(3, trait->is_finite() ? 1.0 : 0.5)};

  const double chi_beta = trait->stationary_mean(beta);
  if (!(chi_beta >= 0.0)) throw ConfigError("branching rate has negative stationary mean");
  m.limit.name = "galton-watson-limit";
  m.limit.clock = m.spec.clock;
  m.limit.kernel = m.spec.kernel;
  m.limit.mean_rate = [chi_beta](Index i) { return i.value > 0 ? static_cast<double>(i.value) * chi_beta : 0.0; };
  if (chi_beta > 0.0) {
    auto biased = std::make_shared<const std::function<double(Rng&)>>(trait->biased_sampler(beta));
    // mu_i b / mu_i(b) for b = sum beta(x_k): one uniformly chosen coordinate is
    // beta-biased, the others are stationary
    m.limit.biased_sample = [trait, biased](Index i, Rng& rng) {
      const auto n = static_cast<std::size_t>(i.value);
      if (n == 0) throw PreconditionError("biased sampling on the empty population");
      std::vector<double> x(n);
      const std::size_t k = uniform_index(rng, n);
      for (std::size_t c = 0; c < n; ++c) x[c] = c == k ? (*biased)(rng) : trait->sample_stationary(rng);
      return State{i, std::move(x)};
    };
  } else {
    m.limit.biased_sample = [](Index, Rng&) -> State {
      throw PreconditionError("biased sampling requires a positive branching rate");
    };
  }
  m.limit.analytically_explosive = false;
  return m;
}

/// Binary case: division at rate r(x) into two copies, death at rate q(x).
inline TypedBranching build_binary_branching(std::shared_ptr<const TraitModel> trait, TraitFunction division,
                                             TraitFunction death,
                                             TypedBranchingParams::OffspringTrait mode =
                                                 TypedBranchingParams::OffspringTrait::inherit) {
  TypedBranchingParams p;
  p.trait = std::move(trait);
  p.offspring_rates = {std::move(death), TraitFunction{}, std::move(division)};
  p.offspring_trait = mode;
  return build_typed_branching(std::move(p));
}

/// Fast model of i independent traits, for ergodic diagnostics of b_i.
inline FastModel branching_fast_model(const TypedBranching& m, std::int64_t i, double trait = 0.0) {
  FastModel f;
  f.dynamics = m.spec.fast;
  f.rate = m.spec.rate;
  f.start = m.start(i, trait);
  StationarySummary s;
  s.mean_rate = m.limit.mean_rate(Index{i});
  if (s.mean_rate > 0.0) {
    const auto limit = m.limit;
    s.biased_sampler = [limit, i](Rng& rng) { return limit.biased_sample(Index{i}, rng); };
  }
  f.analytic = s;
  return f;
}

}  // namespace slowfast
