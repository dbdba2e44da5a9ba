#include "capfl/constellation.hpp"
#include "capfl/error.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace capfl {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::string body;
  for (char ch : line.substr(0, line.find('#'))) {
    if (ch == '|' || ch == ';') {
      body += ' ';
      body += ch;
      body += ' ';
    } else {
      body += ch;
    }
  }
  std::istringstream in(body);
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

int parse_id(const std::string& text, int line) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value < 0) {
    throw ParseError(line, "expected a nonnegative id, got '" + text + "'");
  }
  return value;
}

Rational parse_weight(const std::string& text, int line) {
  Rational w;
  try {
    w = parse_rational(text);
  } catch (const InputError& e) {
    throw ParseError(line, std::string("weight: ") + e.what());
  }
  if (sgn(w) < 0) throw ParseError(line, "weight must be nonnegative");
  return w;
}

struct RawClass {
  std::vector<int> open;
  std::vector<std::pair<int, int>> assign;
  std::optional<Rational> weight;
  int line = 0;
};

struct RawOrbit {
  int rep = 0;
  OrbitGroup group;
  Rational weight;
  int line = 0;
};

// Parses "FACPOOL ... [ATTACHED ...] ... CLIENTPOOLS ... WEIGHT w".
RawOrbit parse_orbit(const std::vector<std::string>& t, int line) {
  if (t.size() < 2) throw ParseError(line, "ORBIT needs a representative id");
  RawOrbit o;
  o.rep = parse_id(t[1], line);
  o.line = line;
  bool have_weight = false;
  std::size_t k = 2;
  auto ids_until_keyword = [&](const char* separator) {
    std::vector<std::vector<int>> groups(1);
    while (k < t.size() && t[k] != "FACPOOL" && t[k] != "ATTACHED" && t[k] != "CLIENTPOOLS" && t[k] != "WEIGHT") {
      if (t[k] == separator) {
        groups.emplace_back();
      } else if (t[k] != "-") {
        groups.back().push_back(parse_id(t[k], line));
      }
      ++k;
    }
    return groups;
  };
  while (k < t.size()) {
    const std::string key = t[k++];
    if (key == "FACPOOL") {
      auto ids = ids_until_keyword("|");
      if (ids.size() != 1 || ids[0].empty()) throw ParseError(line, "FACPOOL needs facility ids");
      o.group.blocks.push_back({ids[0], {}});
    } else if (key == "ATTACHED") {
      if (o.group.blocks.empty()) throw ParseError(line, "ATTACHED must follow a FACPOOL");
      o.group.blocks.back().attached = ids_until_keyword("|");
    } else if (key == "CLIENTPOOLS") {
      for (auto& pool : ids_until_keyword(";")) {
        if (!pool.empty()) o.group.client_pools.push_back(std::move(pool));
      }
    } else if (key == "WEIGHT") {
      if (k >= t.size()) throw ParseError(line, "WEIGHT needs a value");
      o.weight = parse_weight(t[k++], line);
      have_weight = true;
    } else {
      throw ParseError(line, "unknown ORBIT field '" + key + "'");
    }
  }
  if (!have_weight) throw ParseError(line, "ORBIT needs a WEIGHT");
  return o;
}

void write_ids(std::ostream& out, const std::vector<int>& ids) {
  for (int v : ids) out << ' ' << v;
}

void write_class(std::ostream& out, int id, const Class& cl) {
  out << "CLASS " << id << '\n';
  for (int i : cl.facilities) out << "OPEN " << i << '\n';
  for (const auto& [i, j] : cl.assignments) out << "ASSIGN " << i << ' ' << j << '\n';
}

}  // namespace

ClassFile read_class_file(std::istream& in, const Instance& inst) {
  std::map<int, RawClass> raw;
  std::vector<RawOrbit> orbits;
  RawClass* current = nullptr;
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    auto t = tokenize(text);
    if (t.empty()) continue;
    const std::string& key = t[0];
    if (key == "CLASS") {
      if (t.size() != 2) throw ParseError(line, "CLASS expects one id");
      int id = parse_id(t[1], line);
      if (raw.count(id)) throw ParseError(line, "class " + std::to_string(id) + " is defined twice");
      current = &raw[id];
      current->line = line;
    } else if (key == "OPEN" || key == "ASSIGN" || key == "WEIGHT") {
      if (!current) throw ParseError(line, key + " before any CLASS");
      if (key == "OPEN") {
        if (t.size() != 2) throw ParseError(line, "OPEN expects one facility");
        current->open.push_back(parse_id(t[1], line));
      } else if (key == "ASSIGN") {
        if (t.size() != 3) throw ParseError(line, "ASSIGN expects a facility and a client");
        current->assign.emplace_back(parse_id(t[1], line), parse_id(t[2], line));
      } else {
        if (t.size() != 2) throw ParseError(line, "WEIGHT expects one value");
        if (current->weight) throw ParseError(line, "class has two weights");
        current->weight = parse_weight(t[1], line);
      }
    } else if (key == "ORBIT") {
      orbits.push_back(parse_orbit(t, line));
      current = nullptr;
    } else {
      throw ParseError(line, "unknown keyword '" + key + "'");
    }
  }

  std::map<int, Class> built;
  for (const auto& [id, rc] : raw) {
    try {
      built.emplace(id, make_class(inst, rc.open, rc.assign));
    } catch (const ParseError&) {
      throw;
    } catch (const InputError& e) {
      throw ParseError(rc.line, e.what());
    }
  }
  std::map<int, bool> is_rep;
  ClassFile file;
  for (const RawOrbit& o : orbits) {
    auto it = built.find(o.rep);
    if (it == built.end()) throw ParseError(o.line, "orbit representative " + std::to_string(o.rep) + " is not a class");
    try {
      o.group.validate(inst.num_facilities(), inst.num_clients());
    } catch (const InputError& e) {
      throw ParseError(o.line, e.what());
    }
    is_rep[o.rep] = true;
    file.classes.orbits.push_back({it->second, o.group});
    file.solution.orbit_weights.push_back(o.weight);
  }
  // Classes used only as orbit representatives are not explicit classes.
  for (const auto& [id, rc] : raw) {
    if (is_rep.count(id) && !rc.weight) continue;
    file.classes.classes.push_back(built.at(id));
    file.solution.class_weights.push_back(rc.weight.value_or(Rational(0)));
  }
  return file;
}

ClassFile read_class_file(const std::string& path, const Instance& inst) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_class_file(in, inst);
}

void write_class_file(const ClassSet& cs, const ConstellationSolution& sol, std::ostream& out) {
  if (sol.class_weights.size() != cs.classes.size() || sol.orbit_weights.size() != cs.orbits.size()) {
    throw InputError("weights do not match the class set");
  }
  int id = 0;
  for (std::size_t k = 0; k < cs.classes.size(); ++k) {
    write_class(out, id++, cs.classes[k]);
    out << "WEIGHT " << to_string(sol.class_weights[k]) << '\n';
  }
  for (std::size_t k = 0; k < cs.orbits.size(); ++k) {
    const Orbit& o = cs.orbits[k];
    const int rep = id++;
    write_class(out, rep, o.representative);
    out << "ORBIT " << rep;
    for (const auto& block : o.group.blocks) {
      out << " FACPOOL";
      write_ids(out, block.facilities);
      if (block.attached.empty()) continue;
      out << " ATTACHED";
      for (std::size_t p = 0; p < block.attached.size(); ++p) {
        if (p > 0) out << " |";
        write_ids(out, block.attached[p]);
      }
    }
    out << " CLIENTPOOLS";
    if (o.group.client_pools.empty()) out << " -";
    for (std::size_t p = 0; p < o.group.client_pools.size(); ++p) {
      if (p > 0) out << " ;";
      write_ids(out, o.group.client_pools[p]);
    }
    out << " WEIGHT " << to_string(sol.orbit_weights[k]) << '\n';
  }
}

}  // namespace capfl
