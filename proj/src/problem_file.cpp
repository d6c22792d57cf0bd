#include "jacsdp/problem_file.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace jacsdp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

}  // namespace

ProblemFile parse_problem_file(const std::string& text) {
  ProblemFile pf;
  std::optional<Polynomial> objective;
  std::vector<Polynomial> eqs;
  std::vector<Polynomial> ges;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ProblemFileError("expected 'key: value'", lineno);
    const std::string key = trim(line.substr(0, colon));
    const std::string value = trim(line.substr(colon + 1));

    auto poly = [&](const char* what) {
      if (pf.vars.empty()) throw ProblemFileError(std::string(what) + " before 'vars'", lineno);
      try {
        return parse_polynomial(value, pf.vars);
      } catch (const ParseError& e) {
        throw ProblemFileError(e.what(), lineno);
      }
    };

    if (key == "name") {
      pf.name = value;
    } else if (key == "vars") {
      if (!pf.vars.empty()) throw ProblemFileError("duplicate 'vars'", lineno);
      std::istringstream vs(value);
      std::set<std::string> seen;
      for (std::string v; vs >> v;) {
        if (!valid_identifier(v)) throw ProblemFileError("bad variable name '" + v + "'", lineno);
        if (!seen.insert(v).second) throw ProblemFileError("repeated variable '" + v + "'", lineno);
        pf.vars.push_back(v);
      }
      if (pf.vars.empty()) throw ProblemFileError("no variables declared", lineno);
    } else if (key == "min") {
      if (objective) throw ProblemFileError("duplicate objective", lineno);
      objective = poly("objective");
    } else if (key == "eq") {
      eqs.push_back(poly("equality"));
    } else if (key == "ge") {
      ges.push_back(poly("inequality"));
    } else if (key == "order") {
      int v = 0;
      auto res = std::from_chars(value.data(), value.data() + value.size(), v);
      if (res.ec != std::errc() || res.ptr != value.data() + value.size() || v < 1) {
        throw ProblemFileError("order must be a positive integer", lineno);
      }
      pf.order = v;
    } else if (key == "optimum") {
      double v = 0.0;
      auto res = std::from_chars(value.data(), value.data() + value.size(), v);
      if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
        throw ProblemFileError("optimum must be a number", lineno);
      }
      pf.optimum = v;
    } else {
      throw ProblemFileError("unknown key '" + key + "'", lineno);
    }
  }
  if (pf.vars.empty()) throw ProblemFileError("missing 'vars'", lineno);
  if (!objective) throw ProblemFileError("missing 'min'", lineno);
  pf.problem = OptProblem(*objective, std::move(eqs), std::move(ges));
  return pf;
}

ProblemFile load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open problem file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  ProblemFile pf = parse_problem_file(ss.str());
  if (pf.name.empty()) {
    auto slash = path.find_last_of('/');
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    auto dot = base.rfind('.');
    pf.name = dot == std::string::npos ? base : base.substr(0, dot);
  }
  return pf;
}

std::string format_problem_file(const ProblemFile& pf) {
  std::ostringstream out;
  if (!pf.name.empty()) out << "name: " << pf.name << "\n";
  out << "vars:";
  for (const auto& v : pf.vars) out << ' ' << v;
  out << "\n";
  out << "min: " << to_string(pf.problem.objective, pf.vars) << "\n";
  for (const auto& h : pf.problem.equalities) out << "eq: " << to_string(h, pf.vars) << "\n";
  for (const auto& g : pf.problem.inequalities) out << "ge: " << to_string(g, pf.vars) << "\n";
  if (pf.order) out << "order: " << *pf.order << "\n";
  if (pf.optimum) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, *pf.optimum);
    out << "optimum: " << std::string(buf, res.ptr) << "\n";
  }
  return out.str();
}

}  // namespace jacsdp
