#include "capfl/families.hpp"

#include "capfl/error.hpp"

#include <algorithm>

namespace capfl {

std::string to_string(Family f) {
  switch (f) {
    case Family::SaCfl: return "sa-cfl";
    case Family::EffcapCfl: return "effcap-cfl";
    case Family::SaLbflSimplex: return "sa-lbfl-simplex";
    case Family::ProperLbfl: return "proper-lbfl";
    case Family::ProperCfl: return "proper-cfl";
    case Family::ToyProper: return "toy-proper";
  }
  return "?";
}

Family parse_family(const std::string& name) {
  for (Family f : {Family::SaCfl, Family::EffcapCfl, Family::SaLbflSimplex, Family::ProperLbfl,
                   Family::ProperCfl, Family::ToyProper}) {
    if (to_string(f) == name) return f;
  }
  throw InputError("unknown family '" + name + "'");
}

int min_n(Family f) { return f == Family::ToyProper ? 0 : 4; }

void check_family(const FamilyId& id) {
  if (id.family != Family::ToyProper && id.n < min_n(id.family)) {
    throw InputError(to_string(id.family) + " requires n >= " + std::to_string(min_n(id.family)) + ", got " +
                     std::to_string(id.n));
  }
  if (id.family != Family::ToyProper && id.n > 64) {
    throw InputError(to_string(id.family) + ": n = " + std::to_string(id.n) + " is beyond desk scale");
  }
  if (id.family == Family::ProperLbfl) {
    if (sgn(id.d) <= 0) throw InputError("proper-lbfl: D must be positive");
    if (id.far_distance() < Rational(id.n) * id.d) throw InputError("proper-lbfl: D' must be at least n*D");
  }
}

namespace {

std::vector<Facility> uniform_facilities(int count, const Rational& cost, std::int64_t bound) {
  return std::vector<Facility>(static_cast<std::size_t>(count), Facility{cost, bound});
}

std::vector<Client> unit_clients(std::int64_t count) {
  return std::vector<Client>(static_cast<std::size_t>(count), Client{1});
}

}  // namespace

SaCflLayout sa_cfl_layout(const FamilyId& id) {
  check_family(id);
  SaCflLayout out{id.n, {}, {}, {}};
  const int n = id.n;
  if (id.family == Family::SaCfl) {
    for (int i = 0; i < n; ++i) out.cheap.push_back(i);
    for (int i = n; i < 2 * n; ++i) out.costly.push_back(i);
  } else if (id.family == Family::EffcapCfl) {
    for (int i = 0; i < n; ++i) out.cheap.push_back(i);
    for (int i = n; i < 2 * n + 2; ++i) out.costly.push_back(i);
    for (int i = 2 * n + 2; i < 3 * n + 4; ++i) out.dummy.push_back(i);
  } else {
    throw InputError("cheap/costly layout is defined only for sa-cfl and effcap-cfl");
  }
  return out;
}

ProperLbflLayout proper_lbfl_layout(int n) {
  if (n < 4) throw InputError("proper-lbfl requires n >= 4");
  ProperLbflLayout out;
  out.n = n;
  out.bound = n * n;
  out.far_a = n - 1;
  out.far_b = n;
  const int b = out.bound;
  // Block i holds clients [i*B, (i+1)*B); simplex facility i keeps its block
  // minus the highest id, which joins the far set.
  for (int i = 0; i < n - 1; ++i) {
    std::vector<int> block;
    for (int j = i * b; j < (i + 1) * b - 1; ++j) block.push_back(j);
    out.exclusive.push_back(block);
  }
  for (int j = (n - 1) * b; j < n * b; ++j) out.far.push_back(j);
  for (int i = 0; i < n - 1; ++i) out.far.push_back((i + 1) * b - 1);
  std::sort(out.far.begin(), out.far.end());
  return out;
}

std::vector<std::vector<int>> toy_proper_sets() {
  std::vector<std::vector<int>> sets(4);
  const int sizes[4] = {13, 13, 9, 9};
  int next = 0;
  for (int s = 0; s < 4; ++s) {
    for (int k = 0; k < sizes[s]; ++k) sets[static_cast<std::size_t>(s)].push_back(next++);
  }
  return sets;
}

Instance gen_instance(const FamilyId& id) {
  check_family(id);
  const int n = id.n;
  switch (id.family) {
    case Family::SaCfl: {
      const std::int64_t u = std::int64_t{n} * n * n;
      auto fac = uniform_facilities(n, 0, u);
      auto costly = uniform_facilities(n, 1, u);
      fac.insert(fac.end(), costly.begin(), costly.end());
      return Instance(ProblemKind::CFL, std::move(fac), unit_clients(n * u + 1));
    }
    case Family::EffcapCfl: {
      const std::int64_t u = std::int64_t{n} * n * n;
      auto fac = uniform_facilities(n, 0, u);
      auto costly = uniform_facilities(n + 2, 1, u);
      auto dummy = uniform_facilities(n + 2, 0, u);
      fac.insert(fac.end(), costly.begin(), costly.end());
      fac.insert(fac.end(), dummy.begin(), dummy.end());
      Instance inst(ProblemKind::CFL, std::move(fac), unit_clients(n * u + 1));
      for (int i = 2 * n + 2; i < 3 * n + 4; ++i) {
        for (int j = 0; j < inst.num_clients(); ++j) inst.set_distance(i, j, 1);
      }
      return inst;
    }
    case Family::SaLbflSimplex: {
      const std::int64_t b = std::int64_t{n} * n * n;
      Instance inst(ProblemKind::LBFL, uniform_facilities(n, 0, b), unit_clients(n * (b - 1)), Rational(1));
      for (int i = 0; i < n; ++i) {
        for (std::int64_t j = i * (b - 1); j < (i + 1) * (b - 1); ++j) inst.set_distance(i, static_cast<int>(j), 0);
      }
      return inst;
    }
    case Family::ProperLbfl: {
      ProperLbflLayout layout = proper_lbfl_layout(n);
      const Rational far = id.far_distance();
      Instance inst(ProblemKind::LBFL, uniform_facilities(n + 1, 0, layout.bound), unit_clients(std::int64_t{n} * n * n));
      // Location of each client: simplex vertex i, or -1 for the far point.
      std::vector<int> where(static_cast<std::size_t>(inst.num_clients()), -1);
      for (int i = 0; i < n - 1; ++i) {
        for (int j : layout.exclusive[static_cast<std::size_t>(i)]) where[static_cast<std::size_t>(j)] = i;
      }
      for (int i = 0; i <= n; ++i) {
        int fi = i < n - 1 ? i : -1;
        for (int j = 0; j < inst.num_clients(); ++j) {
          int lj = where[static_cast<std::size_t>(j)];
          if (fi == lj) inst.set_distance(i, j, 0);
          else if (fi < 0 || lj < 0) inst.set_distance(i, j, far);
          else inst.set_distance(i, j, id.d);
        }
      }
      return inst;
    }
    case Family::ProperCfl: {
      const std::int64_t u = std::int64_t{n} * n;
      auto fac = uniform_facilities(n, 0, u);
      fac.back().open_cost = 1;
      return Instance(ProblemKind::CFL, std::move(fac), unit_clients((n - 1) * u + 1));
    }
    case Family::ToyProper:
      return Instance(ProblemKind::LBFL, uniform_facilities(4, 0, 10), unit_clients(44));
  }
  throw InputError("unknown family");
}

FractionalSolution gen_bad_solution(const FamilyId& id) {
  check_family(id);
  const int n = id.n;
  const Rational alpha = make_rational(1, n * n);
  switch (id.family) {
    case Family::SaCfl:
    case Family::EffcapCfl: {
      Instance inst = gen_instance(id);
      SaCflLayout layout = sa_cfl_layout(id);
      FractionalSolution s = FractionalSolution::zeros(inst.num_facilities(), inst.num_clients());
      const Rational x_cheap = (1 - alpha) / n;
      const Rational x_costly = alpha / static_cast<long>(layout.costly.size());
      const Rational y_costly = make_rational(10, n * n);
      for (int i : layout.cheap) {
        s.y[static_cast<std::size_t>(i)] = 1;
        for (auto& v : s.x[static_cast<std::size_t>(i)]) v = x_cheap;
      }
      for (int i : layout.costly) {
        s.y[static_cast<std::size_t>(i)] = y_costly;
        for (auto& v : s.x[static_cast<std::size_t>(i)]) v = x_costly;
      }
      for (int i : layout.dummy) s.y[static_cast<std::size_t>(i)] = 1;
      return s;
    }
    case Family::SaLbflSimplex: {
      Instance inst = gen_instance(id);
      FractionalSolution s = FractionalSolution::zeros(inst.num_facilities(), inst.num_clients());
      const Rational excl = 1 - 10 * alpha;
      const Rational cross = 10 * alpha / (n - 1);
      const int block = n * n * n - 1;
      for (int i = 0; i < n; ++i) {
        s.y[static_cast<std::size_t>(i)] = 1 - alpha;
        for (int j = 0; j < inst.num_clients(); ++j) {
          s.x[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = (j / block == i) ? excl : cross;
        }
      }
      return s;
    }
    default:
      throw InputError("no bad solution is defined for family " + to_string(id.family));
  }
}

}  // namespace capfl
