#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "cubeforms/density.hpp"
#include "cubeforms/error.hpp"
#include "cubeforms/forms.hpp"
#include "cubeforms/numeric.hpp"

namespace cubeforms {

namespace detail {

inline std::complex<double> unit_root_power(int p, std::int64_t exponent) {
  constexpr double kTau = 6.283185307179586476925286766559;
  const int e = exponent >= 0 ? static_cast<int>(exponent % p)
                              : static_cast<int>((exponent % p + p) % p);
  const double angle = kTau * e / p;
  return {std::cos(angle), std::sin(angle)};
}

}  // namespace detail

// Fourier coefficient of the indicator expansion of {phi_i(x) = y_i for all
// i}: F(a) = w^{-(a.y)} * prod_z E_{s in S} w^{(sum_i a_i phi_{i,z}) s}.
// Under this normalization F(0) = 1 and P = E_{a in F_p^k} F(a).
inline std::complex<double> fourier_coefficient(const std::vector<LinearForm>& forms,
                                                const std::vector<int>& y,
                                                const std::vector<int>& a,
                                                const Alphabet& S) {
  if (forms.size() != y.size() || forms.size() != a.size())
    fail(ErrorKind::InvalidInput, "fourier_coefficient: length mismatch");
  if (forms.empty()) return 1.0;
  const Modulus& p = forms.front().modulus();

  std::int64_t phase = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    phase += static_cast<std::int64_t>(a[i]) * y[i];
  std::complex<double> value = detail::unit_root_power(p.value(), -phase);

  const LinearForm comb = combine(a, forms);
  for (const auto& [z, c] : comb.coeffs()) {
    std::complex<double> avg = 0.0;
    for (int s : S.elements())
      avg += detail::unit_root_power(p.value(), static_cast<std::int64_t>(c) * s);
    value *= avg / static_cast<double>(S.size());
  }
  return value;
}

struct FourierCoefficient {
  std::vector<int> a;
  std::complex<double> value;
  double magnitude_bound = 1.0;  // (1 - p^-2)^{|Z(sum a_i phi_i)|} for a != 0
};

inline FourierCoefficient fourier_coefficient_report(const std::vector<LinearForm>& forms,
                                                     const std::vector<int>& y,
                                                     const std::vector<int>& a,
                                                     const Alphabet& S) {
  FourierCoefficient out;
  out.a = a;
  out.value = fourier_coefficient(forms, y, a, S);
  bool zero = true;
  for (int ai : a) zero = zero && ai == 0;
  if (zero) {
    out.magnitude_bound = 1.0;
  } else {
    const double p = forms.front().modulus().value();
    out.magnitude_bound =
        std::pow(1.0 - 1.0 / (p * p), combine(a, forms).support_size());
  }
  return out;
}

// (1 - p^-2)^{|Z(a_1 phi_1 + ... + a_k phi_k)|}, the character-product bound
// on |F(a)| for a != 0.
inline double bias_bound(const std::vector<LinearForm>& forms, const std::vector<int>& a) {
  bool zero = true;
  for (int ai : a) zero = zero && ai == 0;
  if (zero || a.empty())
    fail(ErrorKind::InvalidInput, "bias_bound requires a nonzero coefficient vector");
  const double p = forms.front().modulus().value();
  return std::pow(1.0 - 1.0 / (p * p), combine(a, forms).support_size());
}

inline Rational bias_bound_exact(const std::vector<LinearForm>& forms,
                                 const std::vector<int>& a) {
  bool zero = true;
  for (int ai : a) zero = zero && ai == 0;
  if (zero || a.empty())
    fail(ErrorKind::InvalidInput, "bias_bound requires a nonzero coefficient vector");
  const std::int64_t p = forms.front().modulus().value();
  return pow_rational(Rational(p * p - 1, p * p),
                      static_cast<std::uint64_t>(combine(a, forms).support_size()));
}

// E_{a in F_p^k} F(a), summed in a fixed mixed-radix order. Equals the exact
// point probability up to double rounding; used as a cross-check of the DP.
inline std::complex<double> fourier_average(const std::vector<LinearForm>& forms,
                                            const std::vector<int>& y, const Alphabet& S) {
  if (forms.empty()) return 1.0;
  const int p = forms.front().modulus().value();
  std::vector<int> a(forms.size(), 0);
  std::complex<double> sum = 0.0;
  std::size_t count = 0;
  for (;;) {
    sum += fourier_coefficient(forms, y, a, S);
    ++count;
    std::size_t i = 0;
    while (i < a.size()) {
      if (++a[i] < p) break;
      a[i] = 0;
      ++i;
    }
    if (i == a.size()) break;
  }
  return sum / static_cast<double>(count);
}

struct EquidistributionReport {
  Rational exact_prob;   // P(phi_i(x) = y_i for all i), exact
  Rational deviation;    // |exact_prob - p^-k|
  Rational bound_exact;  // ((p^2 - 1)/p^2)^separation
  double bound = 1.0;
  int separation = 0;
  bool holds = false;  // deviation <= bound, compared exactly
};

// Verifies |P(phi(x) = y) - p^-k| <= (1 - p^-2)^r with r the exact
// separation of the family. Both sides are exact rationals.
inline EquidistributionReport equidistribution_check(
    const std::vector<LinearForm>& forms, const std::vector<int>& y, const Alphabet& S,
    std::uint64_t budget = kDefaultBudget,
    std::uint64_t enumeration_cap = kDefaultEnumerationCap) {
  if (forms.empty() || forms.size() != y.size())
    fail(ErrorKind::InvalidInput, "equidistribution_check: bad input lengths");
  const Modulus& p = forms.front().modulus();

  std::vector<Condition> conditions;
  conditions.reserve(forms.size());
  for (std::size_t i = 0; i < forms.size(); ++i)
    conditions.emplace_back(forms[i], TargetSet(p, {y[i]}));
  const ConditionSystem system(p, S, std::move(conditions));

  EquidistributionReport report;
  report.exact_prob = satisfying_density(system, budget);
  report.separation = separation(forms, enumeration_cap);

  const Rational uniform(1, pow_big(p.value(), forms.size()));
  report.deviation = report.exact_prob >= uniform ? report.exact_prob - uniform
                                                  : uniform - report.exact_prob;
  const std::int64_t pv = p.value();
  report.bound_exact = pow_rational(Rational(pv * pv - 1, pv * pv),
                                    static_cast<std::uint64_t>(report.separation));
  report.bound = to_double(report.bound_exact);
  report.holds = report.deviation <= report.bound_exact;
  return report;
}

}  // namespace cubeforms
