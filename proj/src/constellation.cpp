#include "capfl/constellation.hpp"

#include "capfl/classic.hpp"
#include "capfl/error.hpp"
#include "capfl/families.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace capfl {

namespace {

std::size_t at(int v) { return static_cast<std::size_t>(v); }

// Where an id sits in an orbit group.
struct FacilitySite {
  int block = -1;
  int pos = -1;
};
struct ClientSite {
  enum Kind { Fixed, Attached, Pool } kind = Fixed;
  int group = -1;  // block or pool index
  int pos = -1;    // facility position for attached pools
  int idx = -1;
};

struct Sites {
  std::vector<FacilitySite> facility;
  std::vector<ClientSite> client;

  Sites(const OrbitGroup& g, int nf, int nc) : facility(at(nf)), client(at(nc)) {
    for (std::size_t b = 0; b < g.blocks.size(); ++b) {
      const auto& block = g.blocks[b];
      for (std::size_t p = 0; p < block.facilities.size(); ++p) {
        facility[at(block.facilities[p])] = {static_cast<int>(b), static_cast<int>(p)};
      }
      for (std::size_t p = 0; p < block.attached.size(); ++p) {
        for (std::size_t r = 0; r < block.attached[p].size(); ++r) {
          client[at(block.attached[p][r])] = {ClientSite::Attached, static_cast<int>(b), static_cast<int>(p),
                                              static_cast<int>(r)};
        }
      }
    }
    for (std::size_t s = 0; s < g.client_pools.size(); ++s) {
      for (std::size_t r = 0; r < g.client_pools[s].size(); ++r) {
        client[at(g.client_pools[s][r])] = {ClientSite::Pool, static_cast<int>(s), -1, static_cast<int>(r)};
      }
    }
  }
};

Rational binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return Rational(r);
}

Rational falling(int n, int k) {
  Rational r = 1;
  for (int a = 0; a < k; ++a) r *= n - a;
  return r;
}

// Calls visit(idx) for every k-subset of 0..n-1 in lexicographic order.
void for_each_combination(int n, int k, const std::function<void(const std::vector<int>&)>& visit) {
  if (k < 0 || k > n) return;
  std::vector<int> idx(at(k));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    visit(idx);
    int a = k - 1;
    while (a >= 0 && idx[at(a)] == n - k + a) --a;
    if (a < 0) return;
    ++idx[at(a)];
    for (int b = a + 1; b < k; ++b) idx[at(b)] = idx[at(b - 1)] + 1;
  }
}

Class relabel(const Instance& inst, const Class& cl, const std::vector<int>& fmap, const std::vector<int>& cmap) {
  std::vector<int> fac;
  fac.reserve(cl.facilities.size());
  for (int i : cl.facilities) fac.push_back(fmap[at(i)]);
  std::vector<std::pair<int, int>> agn;
  agn.reserve(cl.assignments.size());
  for (const auto& [i, j] : cl.assignments) agn.emplace_back(fmap[at(i)], cmap[at(j)]);
  return make_class(inst, std::move(fac), std::move(agn));
}

void require_unit_demands(const Instance& inst, const char* what) {
  for (const Client& c : inst.clients()) {
    if (c.demand != 1) throw InputError(std::string(what) + " supports unit demands only");
  }
}

bool load_ok(const Instance& inst, int i, std::int64_t load) {
  return inst.kind() == ProblemKind::CFL ? load <= inst.facility(i).bound : load >= inst.facility(i).bound;
}

}  // namespace

Class make_class(const Instance& inst, std::vector<int> facilities, std::vector<std::pair<int, int>> assignments) {
  std::sort(facilities.begin(), facilities.end());
  if (std::adjacent_find(facilities.begin(), facilities.end()) != facilities.end()) {
    throw InputError("class lists a facility twice");
  }
  for (int i : facilities) {
    if (i < 0 || i >= inst.num_facilities()) throw InputError("class facility " + std::to_string(i) + " out of range");
  }
  std::sort(assignments.begin(), assignments.end(),
            [](const auto& a, const auto& b) { return a.second != b.second ? a.second < b.second : a.first < b.first; });
  Class cl;
  for (std::size_t k = 0; k < assignments.size(); ++k) {
    const auto& [i, j] = assignments[k];
    if (j < 0 || j >= inst.num_clients()) throw InputError("class client " + std::to_string(j) + " out of range");
    if (k > 0 && assignments[k - 1].second == j) {
      throw InputError("client " + std::to_string(j) + " is assigned twice in one class");
    }
    if (!std::binary_search(facilities.begin(), facilities.end(), i)) {
      throw InputError("class assigns client " + std::to_string(j) + " to facility " + std::to_string(i) +
                       " outside the class");
    }
    cl.cost += inst.distance(i, j);
  }
  for (int i : facilities) cl.cost += inst.facility(i).open_cost;
  cl.facilities = std::move(facilities);
  cl.assignments = std::move(assignments);
  return cl;
}

void OrbitGroup::validate(int num_facilities, int num_clients) const {
  std::vector<bool> fac_seen(at(num_facilities), false);
  std::vector<bool> cli_seen(at(num_clients), false);
  auto mark = [](std::vector<bool>& seen, int id, const char* what) {
    if (id < 0 || at(id) >= seen.size()) throw InputError(std::string("orbit ") + what + " id out of range");
    if (seen[at(id)]) throw InputError(std::string("orbit ") + what + " " + std::to_string(id) + " is in two pools");
    seen[at(id)] = true;
  };
  for (const Block& b : blocks) {
    for (int i : b.facilities) mark(fac_seen, i, "facility");
    if (b.attached.empty()) continue;
    if (b.attached.size() != b.facilities.size()) throw InputError("orbit block needs one attached pool per facility");
    for (const auto& pool : b.attached) {
      if (pool.size() != b.attached.front().size()) throw InputError("attached pools of a block differ in size");
      for (int j : pool) mark(cli_seen, j, "client");
    }
  }
  for (const auto& pool : client_pools) {
    for (int j : pool) mark(cli_seen, j, "client");
  }
}

OrbitGroup OrbitGroup::full(int num_facilities, int num_clients) {
  OrbitGroup g;
  g.blocks.push_back({std::vector<int>(at(num_facilities)), {}});
  std::iota(g.blocks.back().facilities.begin(), g.blocks.back().facilities.end(), 0);
  g.client_pools.emplace_back(at(num_clients));
  std::iota(g.client_pools.back().begin(), g.client_pools.back().end(), 0);
  return g;
}

FractionalSolution project(const Instance& inst, const ClassSet& cs, const ConstellationSolution& sol) {
  if (sol.class_weights.size() != cs.classes.size() || sol.orbit_weights.size() != cs.orbits.size()) {
    throw InputError("weights do not match the class set");
  }
  const int nf = inst.num_facilities();
  const int nc = inst.num_clients();
  FractionalSolution s = FractionalSolution::zeros(nf, nc);
  for (std::size_t k = 0; k < cs.classes.size(); ++k) {
    const Rational& w = sol.class_weights[k];
    if (sgn(w) == 0) continue;
    for (int i : cs.classes[k].facilities) s.y[at(i)] += w;
    for (const auto& [i, j] : cs.classes[k].assignments) s.x[at(i)][at(j)] += w;
  }
  for (std::size_t k = 0; k < cs.orbits.size(); ++k) {
    const Rational& w = sol.orbit_weights[k];
    if (sgn(w) == 0) continue;
    const Orbit& orbit = cs.orbits[k];
    const OrbitGroup& g = orbit.group;
    g.validate(nf, nc);
    Sites sites(g, nf, nc);

    // Images of a facility with their probabilities under a uniform relabeling.
    auto facility_images = [&](int a) {
      std::vector<std::pair<int, Rational>> out;
      const FacilitySite& fs = sites.facility[at(a)];
      if (fs.block < 0) {
        out.emplace_back(a, Rational(1));
      } else {
        const auto& f = g.blocks[at(fs.block)].facilities;
        Rational p = make_rational(1, static_cast<long>(f.size()));
        for (int i : f) out.emplace_back(i, p);
      }
      return out;
    };
    auto client_images = [&](int b) {
      std::vector<std::pair<int, Rational>> out;
      const ClientSite& site = sites.client[at(b)];
      if (site.kind == ClientSite::Fixed) {
        out.emplace_back(b, Rational(1));
      } else if (site.kind == ClientSite::Pool) {
        const auto& pool = g.client_pools[at(site.group)];
        Rational p = make_rational(1, static_cast<long>(pool.size()));
        for (int j : pool) out.emplace_back(j, p);
      } else {
        const auto& block = g.blocks[at(site.group)];
        Rational p = make_rational(1, static_cast<long>(block.attached.size() * block.attached.front().size()));
        for (const auto& pool : block.attached) {
          for (int j : pool) out.emplace_back(j, p);
        }
      }
      return out;
    };

    for (int a : orbit.representative.facilities) {
      for (const auto& [i, p] : facility_images(a)) s.y[at(i)] += w * p;
    }
    for (const auto& [a, b] : orbit.representative.assignments) {
      const FacilitySite& fs = sites.facility[at(a)];
      const ClientSite& site = sites.client[at(b)];
      if (fs.block >= 0 && site.kind == ClientSite::Attached && site.group == fs.block) {
        // Facility and client pool move together under the block permutation.
        const auto& block = g.blocks[at(fs.block)];
        const long m = static_cast<long>(block.facilities.size());
        const long len = static_cast<long>(block.attached.front().size());
        const bool own = fs.pos == site.pos;
        Rational p = own ? make_rational(1, m * len) : make_rational(1, m * (m - 1) * len);
        for (long pi = 0; pi < m; ++pi) {
          for (long qi = 0; qi < m; ++qi) {
            if ((pi == qi) != own) continue;
            const int i = block.facilities[static_cast<std::size_t>(pi)];
            for (int j : block.attached[static_cast<std::size_t>(qi)]) s.x[at(i)][at(j)] += w * p;
          }
        }
        continue;
      }
      auto fi = facility_images(a);
      auto cj = client_images(b);
      for (const auto& [i, pf] : fi) {
        Rational wi = w * pf;
        for (const auto& [j, pc] : cj) s.x[at(i)][at(j)] += wi * pc;
      }
    }
  }
  return s;
}

Class apply(const Instance& inst, const OrbitGroup& group, const Relabeling& g, const Class& cl) {
  std::vector<int> fmap(at(inst.num_facilities()));
  std::vector<int> cmap(at(inst.num_clients()));
  std::iota(fmap.begin(), fmap.end(), 0);
  std::iota(cmap.begin(), cmap.end(), 0);
  for (std::size_t b = 0; b < group.blocks.size(); ++b) {
    const auto& block = group.blocks[b];
    for (std::size_t p = 0; p < block.facilities.size(); ++p) {
      const std::size_t to = at(g.block_perm[b][p]);
      fmap[at(block.facilities[p])] = block.facilities[to];
      if (block.attached.empty()) continue;
      for (std::size_t r = 0; r < block.attached[p].size(); ++r) {
        cmap[at(block.attached[p][r])] = block.attached[to][at(g.attached_perm[b][p][r])];
      }
    }
  }
  for (std::size_t s = 0; s < group.client_pools.size(); ++s) {
    const auto& pool = group.client_pools[s];
    for (std::size_t r = 0; r < pool.size(); ++r) cmap[at(pool[r])] = pool[at(g.pool_perm[s][r])];
  }
  return relabel(inst, cl, fmap, cmap);
}

Relabeling random_relabeling(const OrbitGroup& group, std::mt19937_64& rng) {
  auto perm = [&rng](std::size_t n) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
    return p;
  };
  Relabeling g;
  for (const auto& block : group.blocks) {
    g.block_perm.push_back(perm(block.facilities.size()));
    g.attached_perm.emplace_back();
    for (const auto& pool : block.attached) g.attached_perm.back().push_back(perm(pool.size()));
  }
  for (const auto& pool : group.client_pools) g.pool_perm.push_back(perm(pool.size()));
  return g;
}

std::vector<Class> materialize(const Instance& inst, const Orbit& orbit, std::size_t cap) {
  const OrbitGroup& g = orbit.group;
  g.validate(inst.num_facilities(), inst.num_clients());
  // Adjacent transpositions generate every block, attached pool and pool permutation.
  std::vector<std::pair<std::vector<int>, std::vector<int>>> generators;
  std::vector<int> fid(at(inst.num_facilities()));
  std::vector<int> cid(at(inst.num_clients()));
  std::iota(fid.begin(), fid.end(), 0);
  std::iota(cid.begin(), cid.end(), 0);
  auto client_swap = [&](const std::vector<int>& pool) {
    for (std::size_t r = 0; r + 1 < pool.size(); ++r) {
      auto c = cid;
      std::swap(c[at(pool[r])], c[at(pool[r + 1])]);
      generators.emplace_back(fid, std::move(c));
    }
  };
  for (const auto& block : g.blocks) {
    for (std::size_t p = 0; p + 1 < block.facilities.size(); ++p) {
      auto f = fid;
      auto c = cid;
      std::swap(f[at(block.facilities[p])], f[at(block.facilities[p + 1])]);
      if (!block.attached.empty()) {
        for (std::size_t r = 0; r < block.attached[p].size(); ++r) {
          std::swap(c[at(block.attached[p][r])], c[at(block.attached[p + 1][r])]);
        }
      }
      generators.emplace_back(std::move(f), std::move(c));
    }
    for (const auto& pool : block.attached) client_swap(pool);
  }
  for (const auto& pool : g.client_pools) client_swap(pool);

  std::set<Class> seen;
  std::vector<const Class*> frontier;
  auto first = seen.insert(make_class(inst, orbit.representative.facilities, orbit.representative.assignments));
  frontier.push_back(&*first.first);
  while (!frontier.empty()) {
    std::vector<const Class*> next;
    for (const Class* cl : frontier) {
      for (const auto& [f, c] : generators) {
        auto ins = seen.insert(relabel(inst, *cl, f, c));
        if (!ins.second) continue;
        if (seen.size() > cap) throw SizeLimitError("orbit has more than " + std::to_string(cap) + " classes");
        next.push_back(&*ins.first);
      }
    }
    frontier = std::move(next);
  }
  return {seen.begin(), seen.end()};
}

Class canonical_form(const Instance& inst, const Class& cl, const OrbitGroup& group, std::size_t cap) {
  return materialize(inst, {cl, group}, cap).front();
}

std::vector<Class> all_classes(const Instance& inst, const ClassSet& cs, std::size_t cap) {
  std::set<Class> out;
  auto add = [&](Class c) {
    out.insert(std::move(c));
    if (out.size() > cap) throw SizeLimitError("class set has more than " + std::to_string(cap) + " classes");
  };
  for (const Class& c : cs.classes) add(make_class(inst, c.facilities, c.assignments));
  for (const Orbit& o : cs.orbits) {
    for (Class& c : materialize(inst, o, cap)) add(std::move(c));
  }
  return {out.begin(), out.end()};
}

std::vector<Class> constellation_lp_classes(const Instance& inst, const ClassSet& cs, std::size_t cap) {
  return all_classes(inst, cs, cap);
}

LinearProgram build_constellation_lp(const Instance& inst, const ClassSet& cs, std::size_t cap) {
  const std::vector<Class> classes = all_classes(inst, cs, cap);
  LinearProgram lp;
  std::vector<std::vector<Term>> cover(at(inst.num_clients()));
  std::vector<std::vector<Term>> pack(at(inst.num_facilities()));
  std::vector<Term> obj;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    int v = lp.add_variable("cl" + std::to_string(k), Rational(0), std::nullopt);
    for (int i : classes[k].facilities) pack[at(i)].push_back({v, 1});
    for (const auto& [i, j] : classes[k].assignments) cover[at(j)].push_back({v, 1});
    if (sgn(classes[k].cost) != 0) obj.push_back({v, classes[k].cost});
  }
  for (int j = 0; j < inst.num_clients(); ++j) {
    lp.add_constraint(std::move(cover[at(j)]), Relation::Equal, 1, "cover" + std::to_string(j));
  }
  for (int i = 0; i < inst.num_facilities(); ++i) {
    lp.add_constraint(std::move(pack[at(i)]), Relation::LessEq, 1, "pack" + std::to_string(i));
  }
  lp.set_objective(std::move(obj));
  return lp;
}

ClassSet star_classes(const Instance& inst, std::size_t cap, bool orbits) {
  const int nc = inst.num_clients();
  const bool cfl = inst.kind() == ProblemKind::CFL;
  ClassSet cs;
  cs.symmetric = true;
  if (orbits) {
    require_unit_demands(inst, "orbit-form stars");
    for (int i = 0; i < inst.num_facilities(); ++i) {
      for (int s = 1; s <= nc; ++s) {
        if (!load_ok(inst, i, s)) continue;
        std::vector<std::pair<int, int>> agn;
        for (int j = 0; j < s; ++j) agn.emplace_back(i, j);
        OrbitGroup g;
        g.client_pools.emplace_back(at(nc));
        std::iota(g.client_pools.back().begin(), g.client_pools.back().end(), 0);
        cs.orbits.push_back({make_class(inst, {i}, std::move(agn)), std::move(g)});
      }
    }
    return cs;
  }
  std::int64_t min_d = INT64_MAX;
  std::int64_t max_d = 0;
  for (const Client& c : inst.clients()) {
    min_d = std::min(min_d, c.demand);
    max_d = std::max(max_d, c.demand);
  }
  for (int i = 0; i < inst.num_facilities(); ++i) {
    const std::int64_t b = inst.facility(i).bound;
    int lo = 1;
    int hi = nc;
    if (cfl && min_d > 0) hi = static_cast<int>(std::min<std::int64_t>(nc, b / min_d));
    if (!cfl && max_d > 0) lo = static_cast<int>(std::max<std::int64_t>(1, (b + max_d - 1) / max_d));
    Rational candidates = 0;
    for (int s = lo; s <= hi; ++s) candidates += binomial(nc, s);
    if (candidates > Rational(static_cast<long>(cap))) {
      throw SizeLimitError("star classes exceed the cap of " + std::to_string(cap));
    }
    for (int s = lo; s <= hi; ++s) {
      for_each_combination(nc, s, [&](const std::vector<int>& clients) {
        std::int64_t load = 0;
        for (int j : clients) load += inst.client(j).demand;
        if (!load_ok(inst, i, load)) return;
        std::vector<std::pair<int, int>> agn;
        for (int j : clients) agn.emplace_back(i, j);
        cs.classes.push_back(make_class(inst, {i}, std::move(agn)));
      });
    }
  }
  if (cs.classes.size() > cap) throw SizeLimitError("star classes exceed the cap of " + std::to_string(cap));
  return cs;
}

int max_open_facilities(const Instance& inst) {
  if (inst.kind() == ProblemKind::CFL) return inst.num_facilities();
  std::vector<std::int64_t> bounds;
  for (const Facility& f : inst.facilities()) bounds.push_back(f.bound);
  std::sort(bounds.begin(), bounds.end());
  std::int64_t left = inst.total_demand();
  int count = 0;
  for (std::int64_t b : bounds) {
    if (b > left) break;
    left -= b;
    ++count;
  }
  return count;
}

Rational complexity(const ClassSet& cs, const Instance& inst) {
  const int open = max_open_facilities(inst);
  if (open == 0) throw InputError("no integer solution opens a facility");
  std::size_t top = 0;
  for (const Class& c : cs.classes) top = std::max(top, c.facilities.size());
  for (const Orbit& o : cs.orbits) top = std::max(top, o.representative.facilities.size());
  return make_rational(static_cast<long>(top), open);
}

ClassSet integral_class_set(const Instance& inst, std::size_t cap) {
  EnumerateOptions opt;
  opt.cap = cap;
  opt.zero_load = true;
  const int nf = inst.num_facilities();
  const int nc = inst.num_clients();
  ClassSet cs;
  cs.symmetric = false;
  for (const auto& point : enumerate_integer_points(inst, opt)) {
    std::vector<int> fac;
    std::vector<std::pair<int, int>> agn;
    for (int i = 0; i < nf; ++i) {
      if (point[at(i)] == 1) fac.push_back(i);
      for (int j = 0; j < nc; ++j) {
        if (point[at(nf + i * nc + j)] == 1) agn.emplace_back(i, j);
      }
    }
    cs.classes.push_back(make_class(inst, std::move(fac), std::move(agn)));
  }
  return cs;
}

ClassSet symmetry_closure(const ClassSet& cs, const Instance& inst, std::size_t cap, bool orbits) {
  const OrbitGroup full = OrbitGroup::full(inst.num_facilities(), inst.num_clients());
  ClassSet out;
  out.symmetric = true;
  if (!orbits) {
    out.classes = all_classes(inst, cs, cap);
    std::set<Class> seen(out.classes.begin(), out.classes.end());
    for (const Class& c : out.classes) {
      for (Class& d : materialize(inst, {c, full}, cap)) {
        seen.insert(std::move(d));
        if (seen.size() > cap) throw SizeLimitError("closure has more than " + std::to_string(cap) + " classes");
      }
    }
    out.classes.assign(seen.begin(), seen.end());
    return out;
  }
  // Under all relabelings an orbit is fixed by the multiset of per-facility
  // loads; the canonical member opens 0..k-1 with loads in decreasing order
  // over consecutive clients, which is the lexicographic minimum.
  std::set<Class> reps;
  auto add = [&](const Class& c) {
    std::vector<int> load;
    for (int i : c.facilities) {
      load.push_back(static_cast<int>(std::count_if(c.assignments.begin(), c.assignments.end(),
                                                    [i](const auto& a) { return a.first == i; })));
    }
    std::sort(load.rbegin(), load.rend());
    std::vector<int> fac;
    std::vector<std::pair<int, int>> agn;
    int next = 0;
    for (std::size_t k = 0; k < load.size(); ++k) {
      fac.push_back(static_cast<int>(k));
      for (int r = 0; r < load[k]; ++r) agn.emplace_back(static_cast<int>(k), next++);
    }
    reps.insert(make_class(inst, std::move(fac), std::move(agn)));
  };
  for (const Class& c : cs.classes) add(c);
  for (const Orbit& o : cs.orbits) add(o.representative);
  for (const Class& c : reps) out.orbits.push_back({c, full});
  return out;
}

Rational solution_cost(const Instance& inst, const ClassSet& cs, const ConstellationSolution& sol) {
  return project(inst, cs, sol).cost(inst);
}

ProjectionFit fit_projection(const Instance& inst, const ClassSet& cs, const FractionalSolution& target,
                             const SolveOptions& options) {
  const int nf = inst.num_facilities();
  const int nc = inst.num_clients();
  const std::size_t items = cs.classes.size() + cs.orbits.size();
  // Row r: y_i for r < nf, x_ij at nf + i*nc + j.
  std::vector<std::vector<Term>> rows(at(nf + nf * nc));
  LinearProgram lp;
  for (std::size_t k = 0; k < items; ++k) {
    ConstellationSolution unit;
    unit.class_weights.assign(cs.classes.size(), Rational(0));
    unit.orbit_weights.assign(cs.orbits.size(), Rational(0));
    if (k < cs.classes.size()) {
      unit.class_weights[k] = 1;
    } else {
      unit.orbit_weights[k - cs.classes.size()] = 1;
    }
    int v = lp.add_variable("w" + std::to_string(k), Rational(0), std::nullopt);
    FractionalSolution p = project(inst, cs, unit);
    for (int i = 0; i < nf; ++i) {
      if (sgn(p.y[at(i)]) != 0) rows[at(i)].push_back({v, p.y[at(i)]});
      for (int j = 0; j < nc; ++j) {
        if (sgn(p.x[at(i)][at(j)]) != 0) rows[at(nf + i * nc + j)].push_back({v, p.x[at(i)][at(j)]});
      }
    }
  }
  for (int r = 0; r < nf + nf * nc; ++r) {
    const Rational& want = r < nf ? target.y[at(r)] : target.x[at((r - nf) / nc)][at((r - nf) % nc)];
    if (rows[at(r)].empty()) {
      if (sgn(want) != 0) return {};
      continue;
    }
    lp.add_constraint(std::move(rows[at(r)]), Relation::Equal, want);
  }
  SolveOutcome out = solve(lp, options);
  if (!out.optimal()) return {};
  ProjectionFit fit;
  fit.feasible = true;
  fit.solution.class_weights.assign(out.point.begin(), out.point.begin() + static_cast<long>(cs.classes.size()));
  fit.solution.orbit_weights.assign(out.point.begin() + static_cast<long>(cs.classes.size()), out.point.end());
  if (!(project(inst, cs, fit.solution) == target)) throw std::logic_error("projection fit does not reproduce the target");
  return fit;
}

PoolSupport pool_support(const FractionalSolution& target, const std::vector<std::vector<int>>& pools) {
  PoolSupport allowed(target.y.size(), std::vector<bool>(pools.size(), false));
  for (std::size_t i = 0; i < target.y.size(); ++i) {
    if (sgn(target.y[i]) == 0) continue;
    for (std::size_t k = 0; k < pools.size(); ++k) {
      for (int j : pools[k]) {
        if (sgn(target.x[i][at(j)]) != 0) allowed[i][k] = true;
      }
    }
  }
  return allowed;
}

namespace {

OrbitGroup pool_group(const std::vector<std::vector<int>>& pools) {
  OrbitGroup g;
  g.client_pools = pools;
  return g;
}

// counts[f][k]: clients of pool k taken by open[f]; the representative takes
// the first ones of each pool, facilities in order.
Class pooled_class(const Instance& inst, const std::vector<std::vector<int>>& pools, const std::vector<int>& open,
                   const std::vector<std::vector<int>>& counts) {
  std::vector<std::pair<int, int>> agn;
  std::vector<std::size_t> used(pools.size(), 0);
  for (std::size_t f = 0; f < open.size(); ++f) {
    for (std::size_t k = 0; k < pools.size(); ++k) {
      for (int r = 0; r < counts[f][k]; ++r) agn.emplace_back(open[f], pools[k][used[k]++]);
    }
  }
  return make_class(inst, open, std::move(agn));
}

void check_pools(const Instance& inst, const std::vector<std::vector<int>>& pools, const PoolSupport& allowed) {
  require_unit_demands(inst, "pooled class sets");
  OrbitGroup g = pool_group(pools);
  g.validate(inst.num_facilities(), inst.num_clients());
  if (allowed.size() != at(inst.num_facilities())) throw InputError("support needs one row per facility");
  for (const auto& row : allowed) {
    if (row.size() != pools.size()) throw InputError("support needs one flag per pool");
  }
}

// Every split of `left` (per pool) among `open` facilities with per-facility
// loads accepted by `ok`; `exact` demands that all of `left` is used.
void for_each_split(const std::vector<int>& open, std::vector<int> left, const PoolSupport& allowed, bool exact,
                    const std::function<bool(int, int)>& ok,
                    const std::function<void(const std::vector<std::vector<int>>&, const std::vector<int>&)>& visit) {
  const std::size_t np = left.size();
  std::vector<std::vector<int>> counts(open.size(), std::vector<int>(np, 0));
  std::function<void(std::size_t, std::size_t, int)> rec = [&](std::size_t f, std::size_t k, int load) {
    if (f == open.size()) {
      if (exact && std::any_of(left.begin(), left.end(), [](int v) { return v != 0; })) return;
      visit(counts, left);
      return;
    }
    if (k == np) {
      if (ok(open[f], load)) rec(f + 1, 0, 0);
      return;
    }
    const int top = allowed[at(open[f])][k] ? left[k] : 0;
    for (int c = 0; c <= top; ++c) {
      counts[f][k] = c;
      left[k] -= c;
      rec(f, k + 1, load + c);
      left[k] += c;
    }
    counts[f][k] = 0;
  };
  rec(0, 0, 0);
}

}  // namespace

ClassSet pooled_star_classes(const Instance& inst, const std::vector<std::vector<int>>& pools,
                             const PoolSupport& allowed) {
  check_pools(inst, pools, allowed);
  ClassSet cs;
  std::vector<int> sizes;
  for (const auto& p : pools) sizes.push_back(static_cast<int>(p.size()));
  for (int i = 0; i < inst.num_facilities(); ++i) {
    for_each_split({i}, sizes, allowed, false,
                   [&](int f, int load) { return load > 0 && load_ok(inst, f, load); },
                   [&](const std::vector<std::vector<int>>& counts, const std::vector<int>&) {
                     cs.orbits.push_back({pooled_class(inst, pools, {i}, counts), pool_group(pools)});
                   });
  }
  return cs;
}

ClassSet pooled_enriched_classes(const Instance& inst, const std::vector<std::vector<int>>& pools,
                                 const PoolSupport& allowed) {
  check_pools(inst, pools, allowed);
  const int nf = inst.num_facilities();
  if (nf < 2 || nf > 20) throw InputError("enriched classes need 2..20 facilities");
  std::vector<int> sizes;
  for (const auto& p : pools) sizes.push_back(static_cast<int>(p.size()));
  auto ok = [&](int f, int load) { return load_ok(inst, f, load); };
  std::set<Class> found;
  PoolSupport everything(at(nf), std::vector<bool>(pools.size(), true));
  for (std::uint32_t mask = 1; mask < (1u << nf); ++mask) {
    std::vector<int> open;
    for (int i = 0; i < nf; ++i) {
      if ((mask >> i) & 1u) open.push_back(i);
    }
    if (static_cast<int>(open.size()) == nf) continue;
    // Integer solutions on `open`.
    for_each_split(open, sizes, allowed, true, ok,
                   [&](const std::vector<std::vector<int>>& counts, const std::vector<int>&) {
                     found.insert(pooled_class(inst, pools, open, counts));
                   });
    if (static_cast<int>(open.size()) != nf - 1) continue;
    // All-open solutions restricted to `open`: the dropped facility takes the rest.
    int dropped = 0;
    while ((mask >> dropped) & 1u) ++dropped;
    for_each_split(open, sizes, allowed, false, ok,
                   [&](const std::vector<std::vector<int>>& counts, const std::vector<int>& left) {
                     int rest = std::accumulate(left.begin(), left.end(), 0);
                     if (!ok(dropped, rest)) return;
                     found.insert(pooled_class(inst, pools, open, counts));
                   });
  }
  ClassSet cs;
  for (const Class& c : found) cs.orbits.push_back({c, pool_group(pools)});
  return cs;
}

FractionalSolution toy_target(const Instance& inst) {
  auto sets = toy_proper_sets();
  if (inst.num_facilities() != 4 || inst.num_clients() != 44) throw InputError("toy target needs the TOY_PROPER instance");
  FractionalSolution s = FractionalSolution::zeros(4, 44);
  const Rational big = make_rational(9, 10);
  const Rational small = make_rational(1, 10);
  s.y = {1, 1, big, big};
  for (int j : sets[0]) s.x[0][at(j)] = 1;
  for (int j : sets[1]) s.x[1][at(j)] = 1;
  for (int j : sets[2]) {
    s.x[2][at(j)] = big;
    s.x[3][at(j)] = small;
  }
  for (int j : sets[3]) {
    s.x[3][at(j)] = big;
    s.x[2][at(j)] = small;
  }
  return s;
}

std::pair<ClassSet, ConstellationSolution> toy_star_solution(const Instance& inst) {
  auto sets = toy_proper_sets();
  ClassSet cs;
  ConstellationSolution sol;
  auto star = [&](int i, std::vector<int> clients, const Rational& w) {
    std::vector<std::pair<int, int>> agn;
    for (int j : clients) agn.emplace_back(i, j);
    cs.classes.push_back(make_class(inst, {i}, std::move(agn)));
    sol.class_weights.push_back(w);
  };
  star(0, sets[0], 1);
  star(1, sets[1], 1);
  // Facility 2 (3): all of S3 (S4) plus one client of the other set, each 1/10.
  for (int f = 2; f <= 3; ++f) {
    const auto& own = sets[at(f)];
    const auto& other = sets[at(f == 2 ? 3 : 2)];
    for (int extra : other) {
      std::vector<int> clients = own;
      clients.push_back(extra);
      star(f, clients, make_rational(1, 10));
    }
  }
  return {cs, sol};
}

RoundFractions round_a_fractions(int n, int c, const Rational& phi) {
  const long nn = static_cast<long>(n) * n;
  RoundFractions r;
  r.own = make_rational(n - c - 1, n - 1) * phi;
  r.cross = make_rational(n - c - 1, static_cast<long>(n - 1) * (n - 2) * (nn - 1)) * phi;
  r.far = make_rational(nn, 2 * (nn + n - 1)) * phi;
  return r;
}

RoundFractions round_b_fractions(int n, int c, const Rational& xi) {
  const long nn = static_cast<long>(n) * n;
  RoundFractions r;
  r.own = make_rational(n - c, n - 1) * xi;
  r.cross = make_rational(n - c, static_cast<long>(n - 1) * (n - 2) * (nn - 1)) * xi;
  r.far = 0;
  return r;
}

namespace {

void check_lbfl_rounds(int n, int c) {
  if (n < 4 || n > 64) throw InputError("rounds need 4 <= n <= 64");
  if (c < 2 || c > n - 2) throw InputError("rounds need 2 <= c <= n-2");
}

FractionalSolution lbfl_target(int n, const ProperLbflLayout& layout, int nc) {
  const Rational nn = Rational(n) * n;
  FractionalSolution t = FractionalSolution::zeros(n + 1, nc);
  const Rational own = (nn - 1) / nn;
  const Rational cross = 1 / (nn * (n - 2));
  for (int i = 0; i < n - 1; ++i) {
    t.y[at(i)] = own;
    for (int i2 = 0; i2 < n - 1; ++i2) {
      for (int j : layout.exclusive[at(i2)]) t.x[at(i)][at(j)] = i == i2 ? own : cross;
    }
  }
  for (int f : {layout.far_a, layout.far_b}) {
    t.y[at(f)] = (nn + n - 1) / (2 * nn);
    for (int j : layout.far) t.x[at(f)][at(j)] = make_rational(1, 2);
  }
  return t;
}

}  // namespace

Rounds build_rounds_lbfl(int n, int c, const Rational& d, const std::optional<Rational>& d_far) {
  check_lbfl_rounds(n, c);
  FamilyId id;
  id.family = Family::ProperLbfl;
  id.n = n;
  id.d = d;
  id.d_far = d_far;
  Rounds r;
  r.instance = gen_instance(id);
  const ProperLbflLayout layout = proper_lbfl_layout(n);
  const Rational nn = Rational(n) * n;
  r.phi = (nn + n - 1) / nn;
  r.xi = ((nn - 1) / nn - make_rational(n - c - 1, n - 1) * r.phi) * make_rational(n - 1, n - c);

  OrbitGroup simplex;
  simplex.blocks.emplace_back();
  for (int i = 0; i < n - 1; ++i) {
    simplex.blocks.back().facilities.push_back(i);
    simplex.blocks.back().attached.push_back(layout.exclusive[at(i)]);
  }
  // Type A: n-c-1 simplex facilities plus one far facility; each present
  // simplex facility borrows one distinct client of the first absent one.
  {
    OrbitGroup g = simplex;
    g.blocks.push_back({{layout.far_a, layout.far_b}, {}});
    g.client_pools.push_back(layout.far);
    std::vector<int> fac;
    std::vector<std::pair<int, int>> agn;
    const int lender = n - c - 1;
    for (int p = 0; p < n - c - 1; ++p) {
      fac.push_back(p);
      for (int j : layout.exclusive[at(p)]) agn.emplace_back(p, j);
      agn.emplace_back(p, layout.exclusive[at(lender)][at(p)]);
    }
    fac.push_back(layout.far_a);
    for (int k = 0; k < layout.bound; ++k) agn.emplace_back(layout.far_a, layout.far[at(k)]);
    r.classes.orbits.push_back({make_class(r.instance, fac, agn), g});
  }
  // Type B: n-c simplex facilities, borrowing from the first absent one.
  {
    std::vector<int> fac;
    std::vector<std::pair<int, int>> agn;
    const int lender = n - c;
    for (int p = 0; p < n - c; ++p) {
      fac.push_back(p);
      for (int j : layout.exclusive[at(p)]) agn.emplace_back(p, j);
      agn.emplace_back(p, layout.exclusive[at(lender)][at(p)]);
    }
    r.classes.orbits.push_back({make_class(r.instance, fac, agn), simplex});
  }
  r.solution.orbit_weights = {r.phi, r.xi};
  r.target = lbfl_target(n, layout, r.instance.num_clients());
  if (!(project(r.instance, r.classes, r.solution) == r.target)) {
    throw std::logic_error("round A/B projection differs from the target");
  }
  return r;
}

EnumeratedRounds enumerate_rounds_lbfl(int n, int c, const Rational& phi, const Rational& xi, std::uint64_t cap,
                                       bool parallel) {
  check_lbfl_rounds(n, c);
  const ProperLbflLayout layout = proper_lbfl_layout(n);
  const int b = layout.bound;
  const int nf = n + 1;
  const int nc = n * n * n;
  const int present_a = n - c - 1;
  const int present_b = n - c;
  const Rational count_a = 2 * binomial(n - 1, present_a) * falling(c * (b - 1), present_a) *
                           binomial(static_cast<int>(layout.far.size()), b);
  const Rational count_b = binomial(n - 1, present_b) * falling((c - 1) * (b - 1), present_b);
  if (count_a + count_b > Rational(static_cast<double>(cap))) {
    throw SizeLimitError("explicit rounds need " + to_string(count_a + count_b) + " classes; cap is " +
                         std::to_string(cap));
  }

  // One job per (round, present set, far facility); each job counts how
  // often every facility and pair appears over its classes.
  struct Job {
    bool type_a;
    std::vector<int> present;
    int far;
  };
  std::vector<Job> jobs;
  for_each_combination(n - 1, present_a, [&](const std::vector<int>& p) {
    jobs.push_back({true, p, layout.far_a});
    jobs.push_back({true, p, layout.far_b});
  });
  for_each_combination(n - 1, present_b, [&](const std::vector<int>& p) { jobs.push_back({false, p, -1}); });

  struct Counts {
    std::uint64_t classes = 0;
    std::vector<std::uint64_t> y;
    std::vector<std::uint64_t> x;
  };
  auto run = [&](const Job& job) {
    Counts out;
    out.y.assign(at(nf), 0);
    out.x.assign(at(nf * nc), 0);
    std::vector<int> pool;
    for (int i = 0; i < n - 1; ++i) {
      if (!std::binary_search(job.present.begin(), job.present.end(), i)) {
        pool.insert(pool.end(), layout.exclusive[at(i)].begin(), layout.exclusive[at(i)].end());
      }
    }
    const int k = static_cast<int>(job.present.size());
    std::vector<int> pick(at(k));
    std::vector<bool> taken(pool.size(), false);
    std::function<void(int)> borrow = [&](int slot) {
      if (slot == k) {
        auto emit = [&](const std::vector<int>& far_subset) {
          ++out.classes;
          for (int t = 0; t < k; ++t) {
            const int i = job.present[at(t)];
            ++out.y[at(i)];
            for (int j : layout.exclusive[at(i)]) ++out.x[at(i * nc + j)];
            ++out.x[at(i * nc + pool[at(pick[at(t)])])];
          }
          if (job.type_a) {
            ++out.y[at(job.far)];
            for (int q : far_subset) ++out.x[at(job.far * nc + layout.far[at(q)])];
          }
        };
        if (job.type_a) {
          for_each_combination(static_cast<int>(layout.far.size()), b, emit);
        } else {
          emit({});
        }
        return;
      }
      for (std::size_t q = 0; q < pool.size(); ++q) {
        if (taken[q]) continue;
        taken[q] = true;
        pick[at(slot)] = static_cast<int>(q);
        borrow(slot + 1);
        taken[q] = false;
      }
    };
    borrow(0);
    return out;
  };

  std::vector<Counts> results(jobs.size());
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long j = 0; j < static_cast<long>(jobs.size()); ++j) results[at(static_cast<int>(j))] = run(jobs[at(static_cast<int>(j))]);
  } else {
    for (std::size_t j = 0; j < jobs.size(); ++j) results[j] = run(jobs[j]);
  }

  std::vector<std::uint64_t> ya(at(nf), 0), yb(at(nf), 0), xa(at(nf * nc), 0), xb(at(nf * nc), 0);
  EnumeratedRounds out;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    auto& y = jobs[j].type_a ? ya : yb;
    auto& x = jobs[j].type_a ? xa : xb;
    (jobs[j].type_a ? out.type_a : out.type_b) += results[j].classes;
    for (std::size_t v = 0; v < y.size(); ++v) y[v] += results[j].y[v];
    for (std::size_t v = 0; v < x.size(); ++v) x[v] += results[j].x[v];
  }
  const Rational wa = phi / Rational(static_cast<double>(out.type_a));
  const Rational wb = xi / Rational(static_cast<double>(out.type_b));
  out.projection = FractionalSolution::zeros(nf, nc);
  auto big = [](std::uint64_t v) { return Rational(mpz_class(std::to_string(v))); };
  for (int i = 0; i < nf; ++i) {
    out.projection.y[at(i)] = wa * big(ya[at(i)]) + wb * big(yb[at(i)]);
    for (int j = 0; j < nc; ++j) {
      out.projection.x[at(i)][at(j)] = wa * big(xa[at(i * nc + j)]) + wb * big(xb[at(i * nc + j)]);
    }
  }
  return out;
}

Rounds build_rounds_cfl(int n, int t) {
  if (n < 4 || n > 64) throw InputError("rounds need 4 <= n <= 64");
  if (t < 1 || t > n - 1) throw InputError("rounds need 1 <= t <= n-1");
  FamilyId id;
  id.family = Family::ProperCfl;
  id.n = n;
  Rounds r;
  r.instance = gen_instance(id);
  const int u = n * n;
  const int nc = r.instance.num_clients();
  r.phi = make_rational(1, static_cast<long>(n) * t);
  r.xi = Rational(n - 1) * (1 - make_rational(1, u)) / t;

  std::vector<int> fac;
  std::vector<std::pair<int, int>> agn;
  for (int p = 0; p < t; ++p) {
    fac.push_back(p);
    for (int j = p * u; j < (p + 1) * u; ++j) agn.emplace_back(p, j);
  }
  const Class rep = make_class(r.instance, fac, agn);
  std::vector<int> clients(at(nc));
  std::iota(clients.begin(), clients.end(), 0);
  OrbitGroup all = OrbitGroup::full(n, nc);
  OrbitGroup first = all;
  first.blocks.front().facilities.pop_back();
  r.classes.orbits.push_back({rep, all});
  r.classes.orbits.push_back({rep, first});
  r.solution.orbit_weights = {r.phi, r.xi};

  r.target = FractionalSolution::zeros(n, nc);
  const Rational to_last = make_rational(1, nc);  // (U/n^2) / ((n-1)U+1)
  const Rational to_other = (1 - to_last) / (n - 1);
  for (int i = 0; i < n; ++i) {
    r.target.y[at(i)] = i == n - 1 ? make_rational(1, u) : Rational(1);
    for (int j = 0; j < nc; ++j) r.target.x[at(i)][at(j)] = i == n - 1 ? to_last : to_other;
  }
  if (!(project(r.instance, r.classes, r.solution) == r.target)) {
    throw std::logic_error("round A/B projection differs from the target");
  }
  return r;
}

SampleStats sample_projection(const Instance& inst, const ClassSet& cs, const ConstellationSolution& sol, int samples,
                              std::uint64_t seed, bool parallel) {
  if (samples < 1) throw InputError("samples must be at least 1");
  if (sol.class_weights.size() != cs.classes.size() || sol.orbit_weights.size() != cs.orbits.size()) {
    throw InputError("weights do not match the class set");
  }
  const int nf = inst.num_facilities();
  std::vector<double> cumulative;
  Rational total = 0;
  for (const Rational& w : sol.class_weights) cumulative.push_back((total += w).get_d());
  for (const Rational& w : sol.orbit_weights) cumulative.push_back((total += w).get_d());
  if (sgn(total) <= 0) throw InputError("solution has no weight");
  const double scale = total.get_d();

  constexpr int chunk = 1000;
  const int chunks = (samples + chunk - 1) / chunk;
  struct Sums {
    std::vector<double> y, y2, load, load2;
  };
  std::vector<Sums> partial(at(chunks));
  auto run = [&](int c) {
    Sums s{std::vector<double>(at(nf)), std::vector<double>(at(nf)), std::vector<double>(at(nf)),
           std::vector<double>(at(nf))};
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(c)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, scale);
    const int end = std::min(samples, (c + 1) * chunk);
    for (int k = c * chunk; k < end; ++k) {
      const double pick = unit(rng);
      std::size_t item = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), pick) -
                                                  cumulative.begin());
      item = std::min(item, cumulative.size() - 1);
      Class cl;
      if (item < cs.classes.size()) {
        cl = cs.classes[item];
      } else {
        const Orbit& o = cs.orbits[item - cs.classes.size()];
        cl = apply(inst, o.group, random_relabeling(o.group, rng), o.representative);
      }
      std::vector<double> load(at(nf), 0.0);
      for (const auto& [i, j] : cl.assignments) load[at(i)] += 1.0;
      for (int i : cl.facilities) {
        s.y[at(i)] += 1.0;
        s.y2[at(i)] += 1.0;
      }
      for (int i = 0; i < nf; ++i) {
        s.load[at(i)] += load[at(i)];
        s.load2[at(i)] += load[at(i)] * load[at(i)];
      }
    }
    partial[at(c)] = std::move(s);
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int c = 0; c < chunks; ++c) run(c);
  } else {
    for (int c = 0; c < chunks; ++c) run(c);
  }
  SampleStats out;
  out.y_mean.assign(at(nf), 0.0);
  out.y_sigma.assign(at(nf), 0.0);
  out.load_mean.assign(at(nf), 0.0);
  out.load_sigma.assign(at(nf), 0.0);
  std::vector<double> y(at(nf)), y2(at(nf)), l(at(nf)), l2(at(nf));
  for (const Sums& s : partial) {
    for (int i = 0; i < nf; ++i) {
      y[at(i)] += s.y[at(i)];
      y2[at(i)] += s.y2[at(i)];
      l[at(i)] += s.load[at(i)];
      l2[at(i)] += s.load2[at(i)];
    }
  }
  const double m = samples;
  for (int i = 0; i < nf; ++i) {
    double ym = y[at(i)] / m;
    double lm = l[at(i)] / m;
    out.y_mean[at(i)] = scale * ym;
    out.load_mean[at(i)] = scale * lm;
    out.y_sigma[at(i)] = scale * std::sqrt(std::max(0.0, y2[at(i)] / m - ym * ym) / m);
    out.load_sigma[at(i)] = scale * std::sqrt(std::max(0.0, l2[at(i)] / m - lm * lm) / m);
  }
  return out;
}

}  // namespace capfl
