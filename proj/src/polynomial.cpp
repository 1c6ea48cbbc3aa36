#include "nvfactor/polynomial.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <sstream>

namespace nvfactor::factor {

namespace {
thread_local std::int64_t g_idempotence = 0;
}

Polynomial Polynomial::constant(std::int64_t c) {
  Polynomial p;
  p.add_term({}, c);
  return p;
}

Polynomial Polynomial::variable(int id) {
  Polynomial p;
  p.add_term({id}, 1);
  return p;
}

void Polynomial::add_term(const Monomial& m, std::int64_t c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

std::int64_t Polynomial::constant_term() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? 0 : it->second;
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

std::set<int> Polynomial::variables() const {
  std::set<int> vars;
  for (const auto& [m, c] : terms_) vars.insert(m.begin(), m.end());
  return vars;
}

std::int64_t Polynomial::lower_bound() const {
  std::int64_t lo = 0;
  for (const auto& [m, c] : terms_) lo += m.empty() ? c : std::min<std::int64_t>(0, c);
  return lo;
}

std::int64_t Polynomial::upper_bound() const {
  std::int64_t hi = 0;
  for (const auto& [m, c] : terms_) hi += m.empty() ? c : std::max<std::int64_t>(0, c);
  return hi;
}

std::int64_t Polynomial::evaluate(std::span<const std::uint8_t> values) const {
  std::int64_t total = 0;
  for (const auto& [m, c] : terms_) {
    bool on = true;
    for (int v : m) {
      if (!values[static_cast<std::size_t>(v)]) {
        on = false;
        break;
      }
    }
    if (on) total += c;
  }
  return total;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m;
      m.reserve(ma.size() + mb.size());
      std::set_union(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(m));
      const auto collapsed = static_cast<std::int64_t>(ma.size() + mb.size() - m.size());
      if (collapsed > 0) g_idempotence += collapsed;
      out.add_term(m, ca * cb);
    }
  }
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(std::int64_t k) {
  if (k == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= k;
  return *this;
}

Polynomial Polynomial::substitute(int id, const Polynomial& value) const {
  Polynomial out;
  for (const auto& [m, c] : terms_) {
    if (!std::binary_search(m.begin(), m.end(), id)) {
      out.add_term(m, c);
      continue;
    }
    Monomial rest;
    rest.reserve(m.size() - 1);
    for (int v : m)
      if (v != id) rest.push_back(v);
    Polynomial factor;
    factor.add_term(rest, c);
    out += factor * value;
  }
  return out;
}

Polynomial Polynomial::normalized() const {
  if (terms_.empty()) return *this;
  std::int64_t g = 0;
  for (const auto& [m, c] : terms_) g = std::gcd(g, std::llabs(c));
  std::int64_t sign = 1;
  for (const auto& [m, c] : terms_) {
    if (!m.empty()) {
      sign = c < 0 ? -1 : 1;
      break;
    }
  }
  if (is_constant()) sign = constant_term() < 0 ? -1 : 1;
  Polynomial out;
  for (const auto& [m, c] : terms_) out.terms_.emplace(m, sign * c / g);
  return out;
}

std::int64_t Polynomial::idempotence_reductions() { return g_idempotence; }

std::string Polynomial::to_string(const std::function<std::string(int)>& name) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  auto emit = [&](const Monomial& m, std::int64_t c) {
    const std::int64_t mag = std::llabs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    if (m.empty()) {
      os << mag;
      return;
    }
    if (mag != 1) os << mag << "*";
    for (std::size_t i = 0; i < m.size(); ++i) os << (i ? "*" : "") << name(m[i]);
  };
  // Non-constant terms first, constant last, so "p + q - 1" reads naturally.
  for (const auto& [m, c] : terms_)
    if (!m.empty()) emit(m, c);
  if (auto c = constant_term(); c != 0) emit({}, c);
  return os.str();
}

}  // namespace nvfactor::factor
