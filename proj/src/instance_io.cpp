#include "capfl/error.hpp"
#include "capfl/instance.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace capfl {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::string body = line.substr(0, line.find('#'));
  std::istringstream in(body);
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

std::int64_t parse_int(const std::string& text, int line, const char* what) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(line, std::string(what) + ": expected an integer, got '" + text + "'");
  }
  return value;
}

Rational parse_value(const std::string& text, int line, const char* what) {
  try {
    return parse_rational(text);
  } catch (const InputError& e) {
    throw ParseError(line, std::string(what) + ": " + e.what());
  }
}

void expect_arity(const std::vector<std::string>& t, std::size_t n, int line) {
  if (t.size() != n) {
    throw ParseError(line, t[0] + " expects " + std::to_string(n - 1) + " fields, got " +
                               std::to_string(t.size() - 1));
  }
}

int checked_id(std::int64_t id, std::size_t count, int line, const char* what) {
  if (id < 0 || static_cast<std::size_t>(id) >= count) {
    throw ParseError(line, std::string(what) + " id " + std::to_string(id) + " is not declared");
  }
  return static_cast<int>(id);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return in;
}

}  // namespace

Instance read_instance(std::istream& in) {
  std::optional<ProblemKind> kind;
  std::map<std::int64_t, std::pair<Facility, int>> facilities;
  std::map<std::int64_t, std::pair<Client, int>> clients;
  struct DistEntry {
    std::int64_t i, j;
    Rational value;
    int line;
  };
  std::vector<DistEntry> dists;
  Rational dist_default = 0;
  bool have_default = false;

  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto t = tokenize(raw);
    if (t.empty()) continue;
    const std::string& key = t[0];
    if (key == "KIND") {
      expect_arity(t, 2, line);
      if (kind) throw ParseError(line, "KIND declared twice");
      if (t[1] == "cfl") kind = ProblemKind::CFL;
      else if (t[1] == "lbfl") kind = ProblemKind::LBFL;
      else throw ParseError(line, "KIND must be cfl or lbfl, got '" + t[1] + "'");
    } else if (key == "FACILITY") {
      // FACILITY <id> <cost> <bound>, or with a named bound:
      // FACILITY <id> <cost> CAPACITY <bound> | LOWER_BOUND <bound>
      if (t.size() != 4 && t.size() != 5) throw ParseError(line, "FACILITY expects 3 or 4 fields");
      if (!kind) throw ParseError(line, "FACILITY before KIND");
      Facility f;
      std::int64_t id = parse_int(t[1], line, "facility id");
      f.open_cost = parse_value(t[2], line, "open_cost");
      if (sgn(f.open_cost) < 0) throw ParseError(line, "open_cost must be >= 0");
      if (t.size() == 5) {
        bool capacity = t[3] == "CAPACITY";
        bool lower = t[3] == "LOWER_BOUND";
        if (!capacity && !lower) throw ParseError(line, "unknown facility field '" + t[3] + "'");
        if (capacity != (*kind == ProblemKind::CFL)) {
          throw ParseError(line, "kind mismatch: " + t[3] + " field in a " + to_string(*kind) + " instance");
        }
      }
      f.bound = parse_int(t.back(), line, "bound");
      if (f.bound <= 0) throw ParseError(line, "bound must be a positive integer");
      if (!facilities.emplace(id, std::make_pair(f, line)).second) {
        throw ParseError(line, "duplicate facility id " + std::to_string(id));
      }
    } else if (key == "CLIENT") {
      expect_arity(t, 3, line);
      std::int64_t id = parse_int(t[1], line, "client id");
      Client c{parse_int(t[2], line, "demand")};
      if (c.demand <= 0) throw ParseError(line, "demand must be a positive integer");
      if (!clients.emplace(id, std::make_pair(c, line)).second) {
        throw ParseError(line, "duplicate client id " + std::to_string(id));
      }
    } else if (key == "DIST") {
      expect_arity(t, 4, line);
      DistEntry e{parse_int(t[1], line, "facility id"), parse_int(t[2], line, "client id"),
                  parse_value(t[3], line, "distance"), line};
      if (sgn(e.value) < 0) throw ParseError(line, "distance must be >= 0");
      dists.push_back(std::move(e));
    } else if (key == "DIST_DEFAULT") {
      expect_arity(t, 2, line);
      if (have_default) throw ParseError(line, "DIST_DEFAULT declared twice");
      dist_default = parse_value(t[1], line, "distance");
      if (sgn(dist_default) < 0) throw ParseError(line, "distance must be >= 0");
      have_default = true;
    } else {
      throw ParseError(line, "unknown record '" + key + "'");
    }
  }
  if (!kind) throw InputError("missing KIND record");

  std::vector<Facility> fac;
  for (const auto& [id, entry] : facilities) {
    if (id != static_cast<std::int64_t>(fac.size())) {
      throw ParseError(entry.second, "facility ids must be dense from 0; found " + std::to_string(id));
    }
    fac.push_back(entry.first);
  }
  std::vector<Client> cli;
  for (const auto& [id, entry] : clients) {
    if (id != static_cast<std::int64_t>(cli.size())) {
      throw ParseError(entry.second, "client ids must be dense from 0; found " + std::to_string(id));
    }
    cli.push_back(entry.first);
  }
  Instance inst(*kind, std::move(fac), std::move(cli), dist_default);
  for (const DistEntry& e : dists) {
    int i = checked_id(e.i, static_cast<std::size_t>(inst.num_facilities()), e.line, "facility");
    int j = checked_id(e.j, static_cast<std::size_t>(inst.num_clients()), e.line, "client");
    inst.set_distance(i, j, e.value);
  }
  inst.validate();
  return inst;
}

Instance read_instance_file(const std::string& path) {
  auto in = open_input(path);
  return read_instance(in);
}

void write_instance(const Instance& inst, std::ostream& out) {
  // The most frequent distance becomes the default.
  std::map<Rational, std::size_t> freq;
  for (int i = 0; i < inst.num_facilities(); ++i) {
    for (int j = 0; j < inst.num_clients(); ++j) ++freq[inst.distance(i, j)];
  }
  Rational dflt = 0;
  std::size_t best = 0;
  for (const auto& [value, count] : freq) {
    if (count > best) {
      best = count;
      dflt = value;
    }
  }
  out << "KIND " << to_string(inst.kind()) << "\n";
  for (int i = 0; i < inst.num_facilities(); ++i) {
    out << "FACILITY " << i << " " << to_string(inst.facility(i).open_cost) << " " << inst.facility(i).bound
        << "\n";
  }
  for (int j = 0; j < inst.num_clients(); ++j) out << "CLIENT " << j << " " << inst.client(j).demand << "\n";
  out << "DIST_DEFAULT " << to_string(dflt) << "\n";
  for (int i = 0; i < inst.num_facilities(); ++i) {
    for (int j = 0; j < inst.num_clients(); ++j) {
      if (inst.distance(i, j) != dflt) out << "DIST " << i << " " << j << " " << to_string(inst.distance(i, j)) << "\n";
    }
  }
}

void write_instance_file(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  write_instance(inst, out);
}

FractionalSolution read_solution(std::istream& in, const Instance& inst) {
  const auto nf = static_cast<std::size_t>(inst.num_facilities());
  const auto nc = static_cast<std::size_t>(inst.num_clients());
  FractionalSolution sol = FractionalSolution::zeros(inst.num_facilities(), inst.num_clients());
  std::vector<bool> seen_y(nf, false);
  std::vector<bool> seen_x(nf * nc, false);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto t = tokenize(raw);
    if (t.empty()) continue;
    if (t[0] == "Y") {
      expect_arity(t, 3, line);
      int i = checked_id(parse_int(t[1], line, "facility id"), nf, line, "facility");
      if (seen_y[static_cast<std::size_t>(i)]) throw ParseError(line, "duplicate Y entry");
      seen_y[static_cast<std::size_t>(i)] = true;
      sol.y[static_cast<std::size_t>(i)] = parse_value(t[2], line, "value");
    } else if (t[0] == "X") {
      expect_arity(t, 4, line);
      int i = checked_id(parse_int(t[1], line, "facility id"), nf, line, "facility");
      int j = checked_id(parse_int(t[2], line, "client id"), nc, line, "client");
      std::size_t k = static_cast<std::size_t>(i) * nc + static_cast<std::size_t>(j);
      if (seen_x[k]) throw ParseError(line, "duplicate X entry");
      seen_x[k] = true;
      sol.x[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = parse_value(t[3], line, "value");
    } else {
      throw ParseError(line, "unknown record '" + t[0] + "'");
    }
  }
  return sol;
}

FractionalSolution read_solution_file(const std::string& path, const Instance& inst) {
  auto in = open_input(path);
  return read_solution(in, inst);
}

void write_solution(const FractionalSolution& sol, std::ostream& out) {
  for (std::size_t i = 0; i < sol.y.size(); ++i) {
    if (sgn(sol.y[i]) != 0) out << "Y " << i << " " << to_string(sol.y[i]) << "\n";
  }
  for (std::size_t i = 0; i < sol.x.size(); ++i) {
    for (std::size_t j = 0; j < sol.x[i].size(); ++j) {
      if (sgn(sol.x[i][j]) != 0) out << "X " << i << " " << j << " " << to_string(sol.x[i][j]) << "\n";
    }
  }
}

}  // namespace capfl
