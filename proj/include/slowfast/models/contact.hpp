#pragma once

#include <bit>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "slowfast/core/spec.hpp"
#include "slowfast/limit/limit_spec.hpp"
#include "slowfast/models/product_path.hpp"
#include "slowfast/models/trait.hpp"

namespace slowfast {

/// Undirected graph on at most 63 vertices; configurations are bitmasks.
struct Graph {
  std::vector<std::vector<std::size_t>> adjacency;

  std::size_t size() const { return adjacency.size(); }

  static Graph path(std::size_t n) {
    Graph g;
    g.adjacency.resize(n);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      g.adjacency[k].push_back(k + 1);
      g.adjacency[k + 1].push_back(k);
    }
    return g;
  }

  void validate() const {
    if (adjacency.empty() || adjacency.size() > 63) throw ConfigError("contact graph must have 1..63 vertices");
    for (std::size_t k = 0; k < adjacency.size(); ++k)
      for (std::size_t l : adjacency[k]) {
        if (l >= adjacency.size() || l == k) throw ConfigError("contact graph has an invalid edge");
        bool back = false;
        for (std::size_t m : adjacency[l]) back = back || m == k;
        if (!back) throw ConfigError("contact graph adjacency must be symmetric");
      }
  }
};

inline bool infected(std::int64_t config, std::size_t k) { return (config >> k) & 1; }

/// Number of susceptible neighbours of vertex l.
inline std::size_t susceptible_neighbours(const Graph& g, std::int64_t config, std::size_t l) {
  std::size_t s = 0;
  for (std::size_t k : g.adjacency[l]) s += infected(config, k) ? 0 : 1;
  return s;
}

/// Contact process with individual viral loads. The point stores one load per
/// vertex; susceptible vertices hold the degenerate load 0.
struct ViralContactParams {
  Graph graph;
  std::shared_ptr<const TraitModel> viral;
  TraitFunction infection;  // kappa_{0->1}, per infected neighbour
  TraitFunction healing;    // kappa_{1->0}
  enum class NewLoad { copy, stationary, matrix } new_load = NewLoad::copy;
  std::vector<std::vector<double>> new_load_matrix;  // p(x, .) for finite loads
};

struct ViralContact {
  ViralContactParams params;
  SemiMarkovSpec spec;
  LimitSpec limit;

  double limit_infection_rate() const { return params.viral->stationary_mean(params.infection); }
  double limit_healing_rate() const { return params.viral->stationary_mean(params.healing); }

  /// b(x) = sum_k i_k kappa10(x_k) + sum_k (1 - i_k) sum_{l ~ k} i_l kappa01(x_l).
  double rate_formula(const State& s) const {
    const auto cfg = s.index.value;
    double b = 0.0;
    for (std::size_t k = 0; k < params.graph.size(); ++k) {
      if (infected(cfg, k)) {
        b += params.healing(s.point[k]);
      } else {
        for (std::size_t l : params.graph.adjacency[k])
          if (infected(cfg, l)) b += params.infection(s.point[l]);
      }
    }
    return b;
  }

  /// Configuration with the listed vertices infected, all carrying `load`.
  State start(const std::vector<std::size_t>& infected_vertices, double load = 0.0) const {
    std::int64_t cfg = 0;
    std::vector<double> point(params.graph.size(), 0.0);
    for (std::size_t k : infected_vertices) {
      if (k >= params.graph.size()) throw ConfigError("initial infected vertex out of range");
      cfg |= std::int64_t{1} << k;
      point[k] = load;
    }
    return State{Index{cfg}, std::move(point)};
  }
};

namespace detail {

class ContactDynamics final : public FastDynamics {
 public:
  ContactDynamics(Graph graph, std::shared_ptr<const TraitModel> viral, TraitFunction infection, TraitFunction healing)
      : graph_(std::move(graph)), viral_(std::move(viral)), infection_(std::move(infection)), healing_(std::move(healing)) {
    const std::size_t max_degree = [this] {
      std::size_t d = 0;
      for (const auto& a : graph_.adjacency) d = std::max(d, a.size());
      return d;
    }();
    for (std::size_t s = 0; s <= max_degree; ++s) {
      if (viral_->is_finite()) {
        std::vector<double> t(viral_->num_states());
        for (std::size_t x = 0; x < t.size(); ++x)
          t[x] = healing_(static_cast<double>(x)) + static_cast<double>(s) * infection_(static_cast<double>(x));
        tables_.push_back(std::move(t));
      } else {
        auto h = healing_;
        auto f = infection_;
        functions_.push_back([h, f, s](double x) { return h(x) + static_cast<double>(s) * f(x); });
      }
    }
  }

  std::unique_ptr<FastPath> start(const State& x, Rng& rng) const override {
    ProductLayout layout;
    const auto cfg = x.index.value;
    for (std::size_t l = 0; l < graph_.size(); ++l) {
      if (!infected(cfg, l)) continue;
      layout.coords.push_back(l);
      layout.table_of.push_back(static_cast<std::uint32_t>(susceptible_neighbours(graph_, cfg, l)));
    }
    layout.tables = tables_;
    layout.functions = functions_;
    return make_product_path(x, std::move(layout), *viral_, rng);
  }

 private:
  Graph graph_;
  std::shared_ptr<const TraitModel> viral_;
  TraitFunction infection_;
  TraitFunction healing_;
  std::vector<std::vector<double>> tables_;
  std::vector<TraitFunction> functions_;
};

}  // namespace detail

inline ViralContact build_contact_process(ViralContactParams p) {
  p.graph.validate();
  if (!p.viral) throw ConfigError("contact process needs a viral-load model");
  if (!p.infection || !p.healing) throw ConfigError("contact process needs infection and healing rates");
  if (p.new_load == ViralContactParams::NewLoad::matrix) {
    if (!p.viral->is_finite() || p.new_load_matrix.size() != p.viral->num_states())
      throw ConfigError("new-load matrix must be square over the finite viral states");
  }

  ViralContact m;
  m.params = p;
  const auto graph = std::make_shared<const Graph>(p.graph);
  auto viral = p.viral;
  auto inf = p.infection;
  auto heal = p.healing;

  m.spec.name = "viral-contact";
  m.spec.fast = std::make_shared<detail::ContactDynamics>(p.graph, viral, inf, heal);
  m.spec.rate.eval = [m_params = m.params](const State& s) {
    ViralContact tmp;
    tmp.params = m_params;
    return tmp.rate_formula(s);
  };
  m.spec.rate.segment_constant = [viral](Index) { return viral->is_finite(); };
  m.spec.kernel.mass = [](Index i) { return i.value != 0 ? 1.0 : 0.0; };

  const auto mode = p.new_load;
  const auto load_matrix = p.new_load_matrix;
  m.spec.kernel.sample = [graph, viral, inf, heal, mode, load_matrix](const State& pre, Rng& rng) {
    const auto cfg = pre.index.value;
    // events: heal k (weight kappa10(x_k)) or infect susceptible k from l (weight kappa01(x_l))
    struct Event {
      std::size_t target;
      std::size_t source;
      bool heal;
    };
    std::vector<Event> events;
    std::vector<double> w;
    for (std::size_t k = 0; k < graph->size(); ++k) {
      if (infected(cfg, k)) {
        events.push_back({k, k, true});
        w.push_back(heal(pre.point[k]));
      } else {
        for (std::size_t l : graph->adjacency[k]) {
          if (!infected(cfg, l)) continue;
          events.push_back({k, l, false});
          w.push_back(inf(pre.point[l]));
        }
      }
    }
    const Event e = events.at(TraitModel::sample_discrete(w, rng));
    State post = pre;
    if (e.heal) {
      post.index = Index{cfg & ~(std::int64_t{1} << e.target)};
      post.point[e.target] = 0.0;
    } else {
      post.index = Index{cfg | (std::int64_t{1} << e.target)};
      const double src = pre.point[e.source];
      switch (mode) {
        case ViralContactParams::NewLoad::copy: post.point[e.target] = src; break;
        case ViralContactParams::NewLoad::stationary: post.point[e.target] = viral->sample_stationary(rng); break;
        case ViralContactParams::NewLoad::matrix:
          post.point[e.target] =
              static_cast<double>(TraitModel::sample_discrete(load_matrix.at(static_cast<std::size_t>(src)), rng));
          break;
      }
    }
    return post;
  };
  m.spec.clock = JumpClock::exponential();
  m.spec.probes = {m.start({0}), m.start({0, p.graph.size() - 1})};

  // classical contact process limit with rates nu(kappa01), nu(kappa10)
  const double lambda = viral->stationary_mean(inf);
  const double mu = viral->stationary_mean(heal);
  m.limit.name = "classical-contact-limit";
  m.limit.clock = m.spec.clock;
  m.limit.kernel = m.spec.kernel;
  m.limit.mean_rate = [graph, lambda, mu](Index i) {
    double r = 0.0;
    for (std::size_t l = 0; l < graph->size(); ++l)
      if (infected(i.value, l))
        r += mu + lambda * static_cast<double>(susceptible_neighbours(*graph, i.value, l));
    return r;
  };
  // per infected l the term g_l = kappa10 + s_l kappa01 carries mass mu + s_l lambda;
  // choose l by that mass, bias x_l by g_l, draw the other loads from nu
  std::vector<std::shared_ptr<const std::function<double(Rng&)>>> biased_by_s;
  for (std::size_t s = 0; s <= p.graph.size(); ++s) {
    TraitFunction g = [heal, inf, s](double x) { return heal(x) + static_cast<double>(s) * inf(x); };
    if (mu + static_cast<double>(s) * lambda > 0.0)
      biased_by_s.push_back(std::make_shared<const std::function<double(Rng&)>>(viral->biased_sampler(g)));
    else
      biased_by_s.push_back(nullptr);
  }
  m.limit.biased_sample = [graph, viral, lambda, mu, biased_by_s](Index i, Rng& rng) {
    const auto cfg = i.value;
    std::vector<double> point(graph->size(), 0.0);
    std::vector<double> w(graph->size(), 0.0);
    for (std::size_t l = 0; l < graph->size(); ++l)
      if (infected(cfg, l)) w[l] = mu + lambda * static_cast<double>(susceptible_neighbours(*graph, cfg, l));
    double total = 0.0;
    for (double v : w) total += v;
    if (!(total > 0.0)) throw PreconditionError("biased sampling with zero mean rate");
    const std::size_t chosen = TraitModel::sample_discrete(w, rng);
    for (std::size_t l = 0; l < graph->size(); ++l) {
      if (!infected(cfg, l)) continue;
      if (l == chosen) {
        point[l] = (*biased_by_s[susceptible_neighbours(*graph, cfg, l)])(rng);
      } else {
        point[l] = viral->sample_stationary(rng);
      }
    }
    return State{i, std::move(point)};
  };
  m.limit.analytically_explosive = false;
  return m;
}

/// Direct Gillespie simulation of the classical contact process with
/// infection rate lambda per infected neighbour and healing rate mu.
/// Returns the configuration at time t.
inline std::int64_t simulate_classical_contact(const Graph& g, double lambda, double mu, std::int64_t config, double t,
                                               Rng& rng) {
  double now = 0.0;
  const std::size_t n = g.size();
  std::vector<double> site_rate(n);
  for (;;) {
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (infected(config, k)) {
        site_rate[k] = mu;
      } else {
        std::size_t c = 0;
        for (std::size_t l : g.adjacency[k]) c += infected(config, l) ? 1 : 0;
        site_rate[k] = lambda * static_cast<double>(c);
      }
      total += site_rate[k];
    }
    if (!(total > 0.0)) return config;
    now += exponential(rng, total);
    if (now > t) return config;
    const std::size_t k = TraitModel::sample_discrete(site_rate, rng);
    config ^= std::int64_t{1} << k;
  }
}

}  // namespace slowfast
