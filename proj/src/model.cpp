#include "rum/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace rum {

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw InvalidInput("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

char to_char(Sign s) {
  switch (s) {
    case Sign::Below: return '-';
    case Sign::On: return '0';
    case Sign::Above: return '+';
  }
  return '?';
}

Sign sign_from_char(char c) {
  switch (c) {
    case '-': return Sign::Below;
    case '0': return Sign::On;
    case '+': return Sign::Above;
    default: break;
  }
  throw InvalidInput(std::string("invalid sign character '") + c + "'");
}

Sign sign_of(double margin, double tol) {
  if (std::abs(margin) <= tol) return Sign::On;
  return margin < 0.0 ? Sign::Below : Sign::Above;
}

std::string SignVector::str() const {
  std::string s;
  s.reserve(signs.size());
  for (Sign v : signs) s.push_back(to_char(v));
  return s;
}

SignVector SignVector::parse(std::string_view text) {
  SignVector sv;
  sv.signs.reserve(text.size());
  for (char c : text) sv.signs.push_back(sign_from_char(c));
  return sv;
}

bool SignVector::has_on() const {
  return std::find(signs.begin(), signs.end(), Sign::On) != signs.end();
}

int BudgetSystem::dimension() const {
  if (counterfactual) return static_cast<int>(counterfactual->p.size());
  if (!budgets.empty()) return static_cast<int>(budgets.front().p.size());
  return 0;
}

int BudgetSystem::plane_count() const {
  return observed_count() + (has_counterfactual() ? 1 : 0);
}

const Budget& BudgetSystem::plane(int a) const {
  if (has_counterfactual()) {
    if (a == 0) return *counterfactual;
    return budgets.at(static_cast<std::size_t>(a - 1));
  }
  return budgets.at(static_cast<std::size_t>(a));
}

BudgetSystem BudgetSystem::without_counterfactual() const {
  BudgetSystem s = *this;
  s.counterfactual.reset();
  return s;
}

void BudgetSystem::validate() const {
  if (tolerance <= 0.0 || !std::isfinite(tolerance))
    throw InvalidInput("tolerance must be a positive finite number");
  const int k = dimension();
  if (plane_count() > 0 && k < 1) throw InvalidInput("budget dimension K must be at least 1");
  std::set<std::string> ids;
  for (int a = 0; a < plane_count(); ++a) {
    const Budget& b = plane(a);
    if (static_cast<int>(b.p.size()) != k)
      throw InvalidInput("budget '" + b.id + "': price dimension differs from the system's K");
    for (double v : b.p) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw InvalidInput("budget '" + b.id + "': prices must be strictly positive and finite");
    }
    if (!ids.insert(b.id).second)
      throw InvalidInput("duplicate budget id '" + b.id + "'");
  }
}

int VectorRepresentation::block_size(int a) const {
  const int next = (a + 1 < blocks()) ? offsets[a + 1] : total();
  return next - offsets[a];
}

std::pair<int, int> VectorRepresentation::locate(int global) const {
  if (global < 0 || global >= total()) throw InvalidInput("row index out of range");
  int a = blocks() - 1;
  while (a > 0 && offsets[a] > global) --a;
  return {a, global - offsets[a]};
}

int VectorRepresentation::find_in_block(int a, const SignVector& sign) const {
  for (int l = 0; l < block_size(a); ++l) {
    if (patch(a, l).sign == sign) return l;
  }
  return -1;
}

bool RationalMatrix::entry(int global_row, int h) const {
  auto [a, local] = rows.locate(global_row);
  return columns[static_cast<std::size_t>(h)][static_cast<std::size_t>(a)] == local;
}

Vec RationalMatrix::apply(const Vec& nu) const {
  if (static_cast<int>(nu.size()) != H()) throw InvalidInput("apply: nu length differs from H");
  Vec out(static_cast<std::size_t>(rows.total()), 0.0);
  for (int h = 0; h < H(); ++h) {
    const auto& sel = columns[static_cast<std::size_t>(h)];
    for (int a = 0; a < rows.blocks(); ++a)
      out[static_cast<std::size_t>(rows.global_index(a, sel[static_cast<std::size_t>(a)]))] += nu[static_cast<std::size_t>(h)];
  }
  return out;
}

VectorRepresentation build_vector_representation(std::vector<Patch> patches,
                                                 const BudgetSystem& system) {
  system.validate();
  const int n_blocks = system.plane_count();
  if (n_blocks == 0) throw InvalidInput("representation requires at least one budget");

  std::stable_sort(patches.begin(), patches.end(), [](const Patch& x, const Patch& y) {
    if (x.home != y.home) return x.home < y.home;
    return x.sign < y.sign;
  });

  VectorRepresentation rep;
  rep.offsets.assign(static_cast<std::size_t>(n_blocks), 0);
  std::vector<int> counts(static_cast<std::size_t>(n_blocks), 0);
  for (const Patch& p : patches) {
    if (p.home < 0 || p.home >= n_blocks)
      throw InvalidInput("patch home index outside the system");
    if (static_cast<int>(p.sign.size()) != n_blocks)
      throw InvalidInput("patch sign length differs from the number of budgets");
    if (p.sign[static_cast<std::size_t>(p.home)] != Sign::On)
      throw InvalidInput("patch sign is not On at its home budget");
    ++counts[static_cast<std::size_t>(p.home)];
  }
  for (int a = 0; a < n_blocks; ++a) {
    if (counts[static_cast<std::size_t>(a)] == 0)
      throw InvalidInput("budget '" + system.plane(a).id + "' has no patches (upstream enumeration failed)");
    if (a + 1 < n_blocks)
      rep.offsets[static_cast<std::size_t>(a + 1)] = rep.offsets[static_cast<std::size_t>(a)] + counts[static_cast<std::size_t>(a)];
  }
  for (std::size_t i = 1; i < patches.size(); ++i) {
    if (patches[i].home == patches[i - 1].home && patches[i].sign == patches[i - 1].sign)
      throw InvalidInput("duplicate patch sign vector within one budget block");
  }
  rep.entries = std::move(patches);
  return rep;
}

DemandProbabilities validate_probabilities(const DemandProbabilities& pi,
                                           const VectorRepresentation& rep,
                                           double tolerance) {
  if (static_cast<int>(pi.values.size()) != rep.total())
    throw InvalidInput("probability vector length differs from the representation");
  DemandProbabilities out = pi;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double v = out.values[i];
    if (!std::isfinite(v)) throw InvalidInput("probability entry is not finite");
    if (v < -tolerance) {
      std::ostringstream os;
      os << "negative probability " << v << " at row " << i;
      throw InvalidInput(os.str());
    }
    if (v > 1.0 + tolerance) {
      std::ostringstream os;
      os << "probability " << v << " above one at row " << i;
      throw InvalidInput(os.str());
    }
  }
  for (int a = 0; a < rep.blocks(); ++a) {
    double sum = 0.0;
    for (int l = 0; l < rep.block_size(a); ++l)
      sum += out.values[static_cast<std::size_t>(rep.global_index(a, l))];
    if (std::abs(sum - 1.0) > tolerance) {
      std::ostringstream os;
      os << "budget block " << a << " sums to " << sum << ", not 1";
      throw InvalidInput(os.str());
    }
    for (int l = 0; l < rep.block_size(a); ++l)
      out.values[static_cast<std::size_t>(rep.global_index(a, l))] /= sum;
  }
  return out;
}

}  // namespace rum
