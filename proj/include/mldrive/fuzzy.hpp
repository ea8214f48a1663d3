#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace mldrive::fuzzy {

enum class MembershipShape { Triangular, Gaussian };

// Triangular params: (a, b, c) with a <= b <= c, peak at b.
// Gaussian params: (center, sigma).
struct MembershipFunction {
  MembershipShape shape = MembershipShape::Triangular;
  std::vector<double> params;

  static MembershipFunction triangular(double a, double b, double c);
  static MembershipFunction gaussian(double center, double sigma);

  double grade(double x) const;
};

void validate(const MembershipFunction& mf);

// Takagi-Sugeno rule: one antecedent per input and an affine consequent
// y = c_0 + c_1 x_1 + ... + c_n x_n.
struct FuzzyRule {
  std::vector<MembershipFunction> antecedents;
  std::vector<double> consequent;

  double output(std::span<const double> x) const;
};

struct TSModel {
  std::vector<FuzzyRule> rules;
  std::size_t input_dim = 0;
};

void validate(const TSModel& model);

// Product of the antecedent grades.
double rule_weight(const FuzzyRule& rule, std::span<const double> x);

// Weighted average of the rule consequents. Throws UncoveredInputError when
// no rule fires.
double ts_infer(const TSModel& model, std::span<const double> x);

// Evenly spaced triangular partition of [lo, hi] with `count` sets whose
// neighbours cross at grade 0.5. Outer sets peak at the interval ends.
std::vector<MembershipFunction> triangular_partition(double lo, double hi, int count);

// `ts v1 <inputs> <rules>` header, then one
// `rule,<shape>,<params>...,<c_0>,...,<c_n>` line per rule.
void save(std::ostream& out, const TSModel& model);
TSModel load(std::istream& in);

}  // namespace mldrive::fuzzy
