#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace nvfactor::factor {

// Sorted, duplicate-free list of variable ids; the empty monomial is the
// constant 1. Because every variable is binary, b*b = b and a monomial is a set.
using Monomial = std::vector<int>;

// Multilinear polynomial with integer coefficients over binary variables.
class Polynomial {
 public:
  Polynomial() = default;
  static Polynomial constant(std::int64_t c);
  static Polynomial variable(int id);

  const std::map<Monomial, std::int64_t>& terms() const { return terms_; }
  std::int64_t constant_term() const;
  bool is_constant() const;
  bool is_zero() const { return terms_.empty(); }
  std::set<int> variables() const;

  // Smallest / largest value over all binary assignments, from term signs.
  std::int64_t lower_bound() const;
  std::int64_t upper_bound() const;

  // `values[id]` is the binary value of variable `id`.
  std::int64_t evaluate(std::span<const std::uint8_t> values) const;

  // Replaces every occurrence of `id` by `value` (itself a polynomial).
  Polynomial substitute(int id, const Polynomial& value) const;

  // Divides through by the gcd of the coefficients and fixes the sign so the
  // first non-constant term is positive. Zero stays zero.
  Polynomial normalized() const;

  // Number of b*b -> b reductions performed by multiplications on this thread.
  static std::int64_t idempotence_reductions();

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(std::int64_t k);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, std::int64_t k) { return a *= k; }
  friend Polynomial operator*(std::int64_t k, Polynomial a) { return a *= k; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }
  friend bool operator<(const Polynomial& a, const Polynomial& b) { return a.terms_ < b.terms_; }

  // Renders e.g. "p + q - 2*z12 - 1" with the supplied variable names.
  std::string to_string(const std::function<std::string(int)>& name) const;

 private:
  void add_term(const Monomial& m, std::int64_t c);
  std::map<Monomial, std::int64_t> terms_;
};

}  // namespace nvfactor::factor
