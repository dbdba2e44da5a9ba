#include "capfl/cuts.hpp"

#include "capfl/error.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace capfl {

namespace {

std::size_t at(int v) { return static_cast<std::size_t>(v); }

void require_cfl(const Instance& inst) {
  if (inst.kind() != ProblemKind::CFL) throw InputError("capacity cuts need a CFL instance");
}

void check_ids(std::vector<int>& ids, int limit, const char* what) {
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw InputError(std::string("repeated ") + what + " id");
  }
  if (!ids.empty() && (ids.front() < 0 || ids.back() >= limit)) {
    throw InputError(std::string(what) + " id out of range");
  }
}

std::int64_t demand_of(const Instance& inst, const std::vector<int>& clients) {
  std::int64_t d = 0;
  for (int j : clients) d += inst.client(j).demand;
  return d;
}

int x_var(const Instance& inst, int i, int j) { return inst.num_facilities() + i * inst.num_clients() + j; }

// Adds coef * (1 - y_i) to the cut.
void add_complement(Cut& cut, int i, std::int64_t coef) {
  if (coef == 0) return;
  cut.terms.push_back({i, -coef});
  cut.rhs -= coef;
}

void finish(Cut& cut) {
  std::sort(cut.terms.begin(), cut.terms.end(), [](const CutTerm& a, const CutTerm& b) { return a.var < b.var; });
  std::vector<CutTerm> merged;
  for (const CutTerm& t : cut.terms) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const CutTerm& t) { return t.coef == 0; });
  cut.terms = std::move(merged);
}

Cut cover_cut(const Instance& inst, const CoverSpec& spec, CutKind kind, const std::vector<std::int64_t>& complement,
              std::int64_t rhs) {
  Cut cut;
  cut.kind = kind;
  cut.rel = Relation::LessEq;
  cut.rhs = rhs;
  for (std::size_t a = 0; a < spec.facilities.size(); ++a) {
    const int i = spec.facilities[a];
    for (int j : spec.reach[a]) cut.terms.push_back({x_var(inst, i, j), inst.client(j).demand});
    add_complement(cut, i, complement[a]);
  }
  cut.cover = spec;
  finish(cut);
  return cut;
}

// Σ u_i − d(J) over raw capacities. The flow-cover coefficient (u_i − λ)⁺
// is only valid against this excess; with the effective excess a facility
// with u_i > d(J) gets a coefficient above what it can carry.
std::int64_t raw_excess(const Instance& inst, const CoverSpec& spec) {
  std::int64_t total = 0;
  for (int i : spec.facilities) total += inst.facility(i).bound;
  return total - demand_of(inst, spec.clients);
}

}  // namespace

int CoverSpec::position(int i) const {
  auto it = std::lower_bound(facilities.begin(), facilities.end(), i);
  return it != facilities.end() && *it == i ? static_cast<int>(it - facilities.begin()) : -1;
}

CoverSpec effective_capacities(const Instance& inst, std::vector<int> facilities, std::vector<int> clients,
                               std::vector<std::vector<int>> reach) {
  require_cfl(inst);
  if (reach.size() != facilities.size()) throw InputError("one client set J_i is needed per facility in I");
  std::vector<std::size_t> order(facilities.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return facilities[a] < facilities[b]; });
  CoverSpec spec;
  for (std::size_t a : order) {
    spec.facilities.push_back(facilities[a]);
    spec.reach.push_back(std::move(reach[a]));
  }
  check_ids(spec.facilities, inst.num_facilities(), "facility");
  check_ids(clients, inst.num_clients(), "client");
  spec.clients = std::move(clients);
  for (std::size_t a = 0; a < spec.facilities.size(); ++a) {
    check_ids(spec.reach[a], inst.num_clients(), "client");
    if (!std::includes(spec.clients.begin(), spec.clients.end(), spec.reach[a].begin(), spec.reach[a].end())) {
      throw InputError("J_" + std::to_string(spec.facilities[a]) + " is not a subset of J");
    }
    spec.effective.push_back(std::min(inst.facility(spec.facilities[a]).bound, demand_of(inst, spec.reach[a])));
  }
  spec.excess = std::accumulate(spec.effective.begin(), spec.effective.end(), std::int64_t{0}) -
                demand_of(inst, spec.clients);
  return spec;
}

CoverSpec effective_capacities(const Instance& inst, std::vector<int> facilities, std::vector<int> clients) {
  std::vector<std::vector<int>> reach(facilities.size(), clients);
  return effective_capacities(inst, std::move(facilities), std::move(clients), std::move(reach));
}

std::string to_string(CutKind kind) {
  switch (kind) {
    case CutKind::FlowCover: return "flow-cover";
    case CutKind::EffectiveCapacity: return "effective-capacity";
    case CutKind::Submodular: return "submodular";
    case CutKind::AggregateCapacity: return "aggregate-capacity";
  }
  return "?";
}

CutKind parse_cut_kind(const std::string& name) {
  for (CutKind k : {CutKind::FlowCover, CutKind::EffectiveCapacity, CutKind::Submodular, CutKind::AggregateCapacity}) {
    if (to_string(k) == name) return k;
  }
  throw InputError("unknown cut kind '" + name + "'");
}

Rational Cut::lhs(const FractionalSolution& s) const {
  const std::size_t nf = s.y.size();
  const std::size_t nc = s.x.empty() ? 0 : s.x.front().size();
  Rational total = 0;
  for (const CutTerm& t : terms) {
    const std::size_t v = at(t.var);
    const Rational& value = v < nf ? s.y[v] : s.x.at((v - nf) / nc).at((v - nf) % nc);
    total += Rational(t.coef) * value;
  }
  return total;
}

Rational Cut::violation(const FractionalSolution& s) const {
  Rational l = lhs(s);
  return rel == Relation::GreaterEq ? Rational(Rational(rhs) - l) : Rational(l - rhs);
}

Cut flow_cover_cut(const Instance& inst, const CoverSpec& spec) {
  require_cfl(inst);
  for (const auto& r : spec.reach) {
    if (r != spec.clients) throw InputError("flow-cover cuts need J_i = J for every facility in I");
  }
  const std::int64_t excess = raw_excess(inst, spec);
  if (excess <= 0) throw InputError("not a cover: excess " + std::to_string(excess) + " <= 0");
  std::vector<std::int64_t> coef;
  for (int i : spec.facilities) coef.push_back(std::max<std::int64_t>(inst.facility(i).bound - excess, 0));
  return cover_cut(inst, spec, CutKind::FlowCover, coef, demand_of(inst, spec.clients));
}

Cut effective_capacity_cut(const Instance& inst, const CoverSpec& spec) {
  require_cfl(inst);
  if (spec.excess <= 0) throw InputError("not a cover: excess " + std::to_string(spec.excess) + " <= 0");
  const std::int64_t top = spec.effective.empty() ? 0 : *std::max_element(spec.effective.begin(), spec.effective.end());
  if (top <= spec.excess) {
    throw InputError("largest effective capacity " + std::to_string(top) + " does not exceed the excess " +
                     std::to_string(spec.excess));
  }
  std::vector<std::int64_t> coef;
  for (std::int64_t u : spec.effective) coef.push_back(std::max<std::int64_t>(u - spec.excess, 0));
  return cover_cut(inst, spec, CutKind::EffectiveCapacity, coef, demand_of(inst, spec.clients));
}

FlowNetwork FlowNetwork::build(const Instance& inst, const CoverSpec& spec) {
  FlowNetwork net;
  std::map<int, int> client_node;
  for (const auto& r : spec.reach) {
    for (int j : r) client_node.emplace(j, 0);
  }
  net.num_nodes = 2;
  for (std::size_t a = 0; a < spec.facilities.size(); ++a) {
    net.facility_nodes.push_back(net.num_nodes++);
    net.arcs.push_back({net.source, net.facility_nodes.back(), spec.effective[a]});
  }
  for (auto& [j, node] : client_node) {
    node = net.num_nodes++;
    net.arcs.push_back({node, net.sink, inst.client(j).demand});
  }
  for (std::size_t a = 0; a < spec.facilities.size(); ++a) {
    for (int j : spec.reach[a]) net.arcs.push_back({net.facility_nodes[a], client_node[j], inst.client(j).demand});
  }
  return net;
}

std::int64_t max_flow(const FlowNetwork& net, std::optional<int> closed) {
  // Residual graph with paired arcs: arc e and its reverse e^1.
  struct Edge {
    int to;
    std::int64_t residual;
  };
  std::vector<Edge> edges;
  std::vector<std::vector<int>> adj(at(net.num_nodes));
  for (const auto& arc : net.arcs) {
    std::int64_t cap = arc.cap;
    if (closed && arc.from == net.source && arc.to == net.facility_nodes.at(at(*closed))) cap = 0;
    adj[at(arc.from)].push_back(static_cast<int>(edges.size()));
    edges.push_back({arc.to, cap});
    adj[at(arc.to)].push_back(static_cast<int>(edges.size()));
    edges.push_back({arc.from, 0});
  }
  std::int64_t total = 0;
  std::vector<int> via(at(net.num_nodes));
  while (true) {
    std::fill(via.begin(), via.end(), -1);
    std::deque<int> queue{net.source};
    via[at(net.source)] = -2;
    while (!queue.empty() && via[at(net.sink)] == -1) {
      int u = queue.front();
      queue.pop_front();
      for (int e : adj[at(u)]) {
        if (edges[at(e)].residual > 0 && via[at(edges[at(e)].to)] == -1) {
          via[at(edges[at(e)].to)] = e;
          queue.push_back(edges[at(e)].to);
        }
      }
    }
    if (via[at(net.sink)] == -1) return total;
    std::int64_t push = INT64_MAX;
    for (int v = net.sink; v != net.source; v = edges[at(via[at(v)] ^ 1)].to) {
      push = std::min(push, edges[at(via[at(v)])].residual);
    }
    for (int v = net.sink; v != net.source; v = edges[at(via[at(v)] ^ 1)].to) {
      edges[at(via[at(v)])].residual -= push;
      edges[at(via[at(v)] ^ 1)].residual += push;
    }
    total += push;
  }
}

std::int64_t increment(const Instance& inst, const CoverSpec& spec, int facility) {
  int pos = spec.position(facility);
  if (pos < 0) throw InputError("facility " + std::to_string(facility) + " is not in I");
  FlowNetwork net = FlowNetwork::build(inst, spec);
  return max_flow(net) - max_flow(net, pos);
}

Cut submodular_cut(const Instance& inst, const CoverSpec& spec) {
  require_cfl(inst);
  FlowNetwork net = FlowNetwork::build(inst, spec);
  const std::int64_t full = max_flow(net);
  std::vector<std::int64_t> rho;
  for (std::size_t a = 0; a < spec.facilities.size(); ++a) rho.push_back(full - max_flow(net, static_cast<int>(a)));
  return cover_cut(inst, spec, CutKind::Submodular, rho, full);
}

Cut aggregate_capacity_cut(const Instance& inst) {
  require_cfl(inst);
  auto u = inst.uniform_bound();
  if (!u || *u <= 0) throw InputError("aggregate capacity cut needs one positive capacity for every facility");
  Cut cut;
  cut.kind = CutKind::AggregateCapacity;
  cut.rel = Relation::GreaterEq;
  const std::int64_t d = inst.total_demand();
  cut.rhs = (d + *u - 1) / *u;
  for (int i = 0; i < inst.num_facilities(); ++i) cut.terms.push_back({i, 1});
  return cut;
}

std::optional<Cut> make_cut(const Instance& inst, const CoverSpec& spec, CutKind kind) {
  switch (kind) {
    case CutKind::FlowCover:
      for (const auto& r : spec.reach) {
        if (r != spec.clients) return std::nullopt;
      }
      if (raw_excess(inst, spec) <= 0) return std::nullopt;
      return flow_cover_cut(inst, spec);
    case CutKind::EffectiveCapacity: {
      if (spec.excess <= 0) return std::nullopt;
      for (std::int64_t u : spec.effective) {
        if (u > spec.excess) return effective_capacity_cut(inst, spec);
      }
      return std::nullopt;
    }
    case CutKind::Submodular: return submodular_cut(inst, spec);
    case CutKind::AggregateCapacity: return aggregate_capacity_cut(inst);
  }
  return std::nullopt;
}

namespace {

CoverSpec draw_spec(const Instance& inst, CutKind kind, std::mt19937_64& rng, const SamplingOptions& options) {
  const int nf = inst.num_facilities();
  const int top = std::max(1, std::min({nf, 8, options.max_facilities}));
  std::vector<int> fac(at(nf));
  std::iota(fac.begin(), fac.end(), 0);
  std::shuffle(fac.begin(), fac.end(), rng);
  const int size = std::uniform_int_distribution<int>(1, top)(rng);
  fac.resize(at(size));

  std::vector<int> clients;
  std::bernoulli_distribution coin(0.5);
  for (int j = 0; j < inst.num_clients(); ++j) {
    if (coin(rng)) clients.push_back(j);
  }
  if (static_cast<int>(clients.size()) > options.max_clients) {
    std::shuffle(clients.begin(), clients.end(), rng);
    clients.resize(at(options.max_clients));
    std::sort(clients.begin(), clients.end());
  }
  std::vector<std::vector<int>> reach(fac.size());
  for (auto& r : reach) {
    if (kind == CutKind::FlowCover) {
      r = clients;
    } else {
      for (int j : clients) {
        if (coin(rng)) r.push_back(j);
      }
    }
  }
  return effective_capacities(inst, std::move(fac), std::move(clients), std::move(reach));
}

}  // namespace

std::vector<Cut> sample_cuts(const Instance& inst, CutKind kind, int samples, std::uint64_t seed,
                             const SamplingOptions& options) {
  require_cfl(inst);
  if (samples < 1) throw InputError("samples must be at least 1");
  if (kind == CutKind::AggregateCapacity) return {aggregate_capacity_cut(inst)};
  std::vector<std::optional<Cut>> drawn(at(samples));
  auto one = [&](int s) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(s)};
    std::mt19937_64 rng(seq);
    drawn[at(s)] = make_cut(inst, draw_spec(inst, kind, rng, options), kind);
  };
  if (options.parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (int s = 0; s < samples; ++s) one(s);
  } else {
    for (int s = 0; s < samples; ++s) one(s);
  }
  std::vector<Cut> out;
  for (auto& c : drawn) {
    if (c) out.push_back(std::move(*c));
  }
  return out;
}

std::vector<ViolatedCut> separate_by_sampling(const Instance& inst, const FractionalSolution& point, CutKind kind,
                                              int samples, std::uint64_t seed, const SamplingOptions& options) {
  std::vector<ViolatedCut> out;
  for (Cut& c : sample_cuts(inst, kind, samples, seed, options)) {
    Rational v = c.violation(point);
    if (sgn(v) > 0) out.push_back({std::move(c), std::move(v)});
  }
  return out;
}

void for_each_cover_spec(const Instance& inst, const std::function<void(const CoverSpec&)>& visit, std::uint64_t cap) {
  require_cfl(inst);
  const int nf = inst.num_facilities();
  const int nc = inst.num_clients();
  if (nf > 16 || nc > 16) throw SizeLimitError("for_each_cover_spec: instance too large");
  std::uint64_t count = 0;
  for (std::uint32_t fmask = 1; fmask < (1u << nf); ++fmask) {
    std::vector<int> fac;
    for (int i = 0; i < nf; ++i) {
      if ((fmask >> i) & 1u) fac.push_back(i);
    }
    for (std::uint32_t jmask = 0; jmask < (1u << nc); ++jmask) {
      std::vector<int> clients;
      for (int j = 0; j < nc; ++j) {
        if ((jmask >> j) & 1u) clients.push_back(j);
      }
      // Each J_i is a submask of J; iterate them as one mixed-radix counter.
      std::vector<std::uint32_t> sub(fac.size(), 0);
      while (true) {
        if (++count > cap) throw SizeLimitError("for_each_cover_spec: more than " + std::to_string(cap) + " specs");
        std::vector<std::vector<int>> reach(fac.size());
        for (std::size_t a = 0; a < fac.size(); ++a) {
          for (int j = 0; j < nc; ++j) {
            if ((sub[a] >> j) & 1u) reach[a].push_back(j);
          }
        }
        visit(effective_capacities(inst, fac, clients, std::move(reach)));
        std::size_t a = 0;
        for (; a < fac.size(); ++a) {
          sub[a] = (sub[a] - jmask) & jmask;
          if (sub[a] != 0) break;
        }
        if (a == fac.size()) break;
      }
    }
  }
}

std::string dump(const Cut& cut, const Instance& inst) {
  auto list = [](const std::vector<int>& v) {
    std::string s = "{";
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
    return s + "}";
  };
  std::ostringstream out;
  out << to_string(cut.kind);
  if (cut.cover) {
    out << " I=" << list(cut.cover->facilities) << " J=" << list(cut.cover->clients);
    for (std::size_t a = 0; a < cut.cover->facilities.size(); ++a) {
      out << " J" << cut.cover->facilities[a] << "=" << list(cut.cover->reach[a]);
    }
  }
  out << " :";
  const int nf = inst.num_facilities();
  const int nc = inst.num_clients();
  bool first = true;
  for (const CutTerm& t : cut.terms) {
    std::string name = t.var < nf ? "y" + std::to_string(t.var)
                                  : "x" + std::to_string((t.var - nf) / nc) + "_" + std::to_string((t.var - nf) % nc);
    std::int64_t c = t.coef;
    out << (c < 0 ? " - " : (first ? " " : " + "));
    if (c < 0) c = -c;
    if (c != 1) out << c << " ";
    out << name;
    first = false;
  }
  if (first) out << " 0";
  out << " " << to_string(cut.rel) << " " << cut.rhs;
  return out.str();
}

}  // namespace capfl
