#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jacsdp/detvar.hpp"
#include "jacsdp/parser.hpp"

namespace jacsdp {

/// Problem description read from a `.prob` file:
///
///     # comment
///     name: motzkin_ball
///     vars: x1 x2 x3
///     min: x1^4*x2^2 + x1^2*x2^4 + x3^6 - 3*x1^2*x2^2*x3^2
///     eq: ...            (zero or more, h(x) = 0)
///     ge: 1 - x1^2 - x2^2 - x3^2   (zero or more, g(x) >= 0)
///     order: 4           (optional, order used in the reference run)
///     optimum: 0         (optional, known global minimum)
///
/// `vars` must precede every expression line.
struct ProblemFile {
  std::string name;
  std::vector<std::string> vars;
  OptProblem problem;
  std::optional<int> order;
  std::optional<double> optimum;
};

/// Syntax problems in a problem file; the message carries the line number.
class ProblemFileError : public ParseError {
 public:
  ProblemFileError(const std::string& message, int line)
      : ParseError("line " + std::to_string(line) + ": " + message, 0), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

ProblemFile parse_problem_file(const std::string& text);
ProblemFile load_problem_file(const std::string& path);
/// Canonical text; parsing it again yields the same problem.
std::string format_problem_file(const ProblemFile& pf);

}  // namespace jacsdp
