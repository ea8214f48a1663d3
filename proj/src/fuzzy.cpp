#include "mldrive/fuzzy.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mldrive/errors.hpp"

namespace mldrive::fuzzy {

MembershipFunction MembershipFunction::triangular(double a, double b, double c) {
  MembershipFunction mf{MembershipShape::Triangular, {a, b, c}};
  validate(mf);
  return mf;
}

MembershipFunction MembershipFunction::gaussian(double center, double sigma) {
  MembershipFunction mf{MembershipShape::Gaussian, {center, sigma}};
  validate(mf);
  return mf;
}

double MembershipFunction::grade(double x) const {
  if (shape == MembershipShape::Gaussian) {
    const double z = (x - params[0]) / params[1];
    return std::exp(-0.5 * z * z);
  }
  const double a = params[0], b = params[1], c = params[2];
  if (x == b) return 1.0;
  if (x > a && x < b) return (x - a) / (b - a);
  if (x > b && x < c) return (c - x) / (c - b);
  return 0.0;
}

void validate(const MembershipFunction& mf) {
  for (double p : mf.params) {
    if (!std::isfinite(p)) throw ConfigurationError("membership parameters must be finite");
  }
  if (mf.shape == MembershipShape::Triangular) {
    if (mf.params.size() != 3 || !(mf.params[0] <= mf.params[1] && mf.params[1] <= mf.params[2])) {
      throw ConfigurationError("triangular membership needs ordered (a, b, c)");
    }
  } else if (mf.params.size() != 2 || !(mf.params[1] > 0.0)) {
    throw ConfigurationError("gaussian membership needs (center, sigma > 0)");
  }
}

double FuzzyRule::output(std::span<const double> x) const {
  double y = consequent[0];
  for (std::size_t k = 0; k < x.size(); ++k) y += consequent[k + 1] * x[k];
  return y;
}

void validate(const TSModel& model) {
  if (model.rules.empty()) throw ConfigurationError("a TS model needs at least one rule");
  for (const auto& rule : model.rules) {
    if (rule.antecedents.size() != model.input_dim ||
        rule.consequent.size() != model.input_dim + 1) {
      throw ShapeError(fmt::format("rule does not match input dimension {}", model.input_dim));
    }
    for (const auto& mf : rule.antecedents) validate(mf);
  }
}

double rule_weight(const FuzzyRule& rule, std::span<const double> x) {
  if (x.size() != rule.antecedents.size()) {
    throw ShapeError(fmt::format("rule expects {} inputs, got {}", rule.antecedents.size(),
                                 x.size()));
  }
  double w = 1.0;
  for (std::size_t k = 0; k < x.size(); ++k) w *= rule.antecedents[k].grade(x[k]);
  return w;
}

double ts_infer(const TSModel& model, std::span<const double> x) {
  if (x.size() != model.input_dim) {
    throw ShapeError(fmt::format("model expects {} inputs, got {}", model.input_dim, x.size()));
  }
  double weighted = 0.0;
  double total = 0.0;
  for (const auto& rule : model.rules) {
    const double w = rule_weight(rule, x);
    if (w == 0.0) continue;
    weighted += w * rule.output(x);
    total += w;
  }
  if (!(total > 0.0)) throw UncoveredInputError("no fuzzy rule fires for this input");
  return weighted / total;
}

std::vector<MembershipFunction> triangular_partition(double lo, double hi, int count) {
  if (count < 2 || !(hi > lo)) throw ConfigurationError("partition needs count >= 2 and hi > lo");
  const double step = (hi - lo) / (count - 1);
  std::vector<MembershipFunction> sets;
  for (int j = 0; j < count; ++j) {
    const double b = lo + j * step;
    sets.push_back(MembershipFunction::triangular(b - step, b, b + step));
  }
  return sets;
}

void save(std::ostream& out, const TSModel& model) {
  validate(model);
  fmt::print(out, "ts v1 {} {}\n", model.input_dim, model.rules.size());
  for (const auto& rule : model.rules) {
    out << "rule";
    for (const auto& mf : rule.antecedents) {
      out << (mf.shape == MembershipShape::Triangular ? ",tri" : ",gauss");
      for (double p : mf.params) fmt::print(out, ",{:.17g}", p);
    }
    for (double c : rule.consequent) fmt::print(out, ",{:.17g}", c);
    out << '\n';
  }
}

TSModel load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigurationError("empty TS model stream");
  std::istringstream header(line);
  std::string magic, version;
  std::size_t inputs = 0, count = 0;
  if (!(header >> magic >> version >> inputs >> count) || magic != "ts" || version != "v1") {
    throw ConfigurationError(fmt::format("bad TS model header '{}'", line));
  }
  TSModel model;
  model.input_dim = inputs;
  std::size_t line_no = 1;
  while (model.rules.size() < count && std::getline(in, line)) {
    ++line_no;
    std::vector<std::string> tokens;
    std::istringstream fields(line);
    for (std::string tok; std::getline(fields, tok, ',');) tokens.push_back(tok);
    if (tokens.empty() || tokens[0] != "rule") {
      throw ConfigurationError(fmt::format("line {}: expected a rule", line_no));
    }
    FuzzyRule rule;
    std::size_t pos = 1;
    auto number = [&](std::size_t at) {
      try {
        return std::stod(tokens.at(at));
      } catch (const std::exception&) {
        throw ConfigurationError(fmt::format("line {}: bad number in field {}", line_no, at + 1));
      }
    };
    while (pos < tokens.size() && (tokens[pos] == "tri" || tokens[pos] == "gauss")) {
      MembershipFunction mf;
      const bool tri = tokens[pos] == "tri";
      mf.shape = tri ? MembershipShape::Triangular : MembershipShape::Gaussian;
      const std::size_t n = tri ? 3 : 2;
      for (std::size_t j = 0; j < n; ++j) mf.params.push_back(number(pos + 1 + j));
      rule.antecedents.push_back(std::move(mf));
      pos += n + 1;
    }
    for (; pos < tokens.size(); ++pos) rule.consequent.push_back(number(pos));
    model.rules.push_back(std::move(rule));
  }
  if (model.rules.size() != count) throw ConfigurationError("TS model stream ended early");
  validate(model);
  return model;
}

}  // namespace mldrive::fuzzy
