#include "nvfactor/factor_compiler.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "nvfactor/errors.hpp"

namespace nvfactor::factor {

namespace {

std::string bit_name(char prefix, int bit, int interior_count) {
  return interior_count == 1 ? std::string(1, prefix) : prefix + std::to_string(bit);
}

std::string carry_name(int from, int to) {
  if (from < 10 && to < 10) return "z" + std::to_string(from) + std::to_string(to);
  return "z" + std::to_string(from) + "_" + std::to_string(to);
}

int ceil_log2(std::int64_t m) {
  int k = 0;
  while ((std::int64_t{1} << k) < m) ++k;
  return k;
}

std::uint64_t min_product(int wx, int wy) { return (std::uint64_t{1} << (wx - 1)) << (wy - 1); }
std::uint64_t max_product(int wx, int wy) {
  return ((std::uint64_t{1} << wx) - 1) * ((std::uint64_t{1} << wy) - 1);
}

bool widths_fit(std::uint64_t n, int wx, int wy) {
  if (wx < 2 || wy < 2 || wx + wy > 62) return false;
  return n >= min_product(wx, wy) && n <= max_product(wx, wy);
}

}  // namespace

std::vector<int> MultiplicationTable::unknown_multiplier_bits() const {
  std::vector<int> ids;
  for (std::size_t i = 0; i < variables.size(); ++i)
    if (variables[i].kind != VarKind::carry) ids.push_back(static_cast<int>(i));
  return ids;
}

std::vector<int> MultiplicationTable::carry_variables() const {
  std::vector<int> ids;
  for (std::size_t i = 0; i < variables.size(); ++i)
    if (variables[i].kind == VarKind::carry) ids.push_back(static_cast<int>(i));
  return ids;
}

MultiplicationTable build_table(std::uint64_t n, int width_x, int width_y) {
  if (n % 2 == 0 || n < 9) throw InvalidWidths("N must be odd and >= 9, got " + std::to_string(n));
  if (!widths_fit(n, width_x, width_y)) {
    throw InvalidWidths("N = " + std::to_string(n) + " is not a product of odd " + std::to_string(width_x) +
                        "-bit and " + std::to_string(width_y) + "-bit numbers with leading bit 1");
  }

  MultiplicationTable t;
  t.n = n;
  t.width_x = width_x;
  t.width_y = width_y;

  auto make_bits = [&](int width, char prefix, VarKind kind) {
    std::vector<Polynomial> bits(static_cast<std::size_t>(width));
    for (int i = 0; i < width; ++i) {
      if (i == 0 || i == width - 1) {
        bits[static_cast<std::size_t>(i)] = Polynomial::constant(1);
        continue;
      }
      const int id = static_cast<int>(t.variables.size());
      t.variables.push_back({bit_name(prefix, i, width - 2), kind, i, -1, -1});
      bits[static_cast<std::size_t>(i)] = Polynomial::variable(id);
    }
    return bits;
  };
  t.x_bits = make_bits(width_x, 'p', VarKind::multiplier_x);
  t.y_bits = make_bits(width_y, 'q', VarKind::multiplier_y);

  const int columns = t.columns();
  t.partial_products.resize(static_cast<std::size_t>(width_y));
  std::vector<std::int64_t> column_max(static_cast<std::size_t>(columns), 0);
  for (int j = 0; j < width_y; ++j) {
    for (int i = 0; i < width_x; ++i) {
      Polynomial term = t.x_bits[static_cast<std::size_t>(i)] * t.y_bits[static_cast<std::size_t>(j)];
      column_max[static_cast<std::size_t>(i + j)] += term.upper_bound();
      t.partial_products[static_cast<std::size_t>(j)].emplace_back(i + j, std::move(term));
    }
  }

  // A column whose sum can reach m emits ceil(log2 m) carries, the k-th one
  // landing k columns ahead with weight 2^k. Carries past the top column are
  // dropped: x * y < 2^(wx + wy) cannot overflow it.
  t.carries_out.resize(static_cast<std::size_t>(columns));
  t.carries_in.resize(static_cast<std::size_t>(columns));
  for (int c = 0; c < columns; ++c) {
    const std::int64_t max_sum =
        column_max[static_cast<std::size_t>(c)] + static_cast<std::int64_t>(t.carries_in[static_cast<std::size_t>(c)].size());
    const int reach = ceil_log2(max_sum);
    for (int k = 1; k <= reach && c + k < columns; ++k) {
      const int id = static_cast<int>(t.variables.size());
      t.variables.push_back({carry_name(c, c + k), VarKind::carry, -1, c, c + k});
      t.carries_out[static_cast<std::size_t>(c)].push_back(id);
      t.carries_in[static_cast<std::size_t>(c + k)].push_back(id);
    }
  }
  return t;
}

std::vector<std::pair<int, int>> candidate_widths(std::uint64_t n) {
  std::vector<std::pair<int, int>> out;
  for (int wx = 2; wx <= 31; ++wx)
    for (int wy = wx; wy <= 31; ++wy)
      if (widths_fit(n, wx, wy)) out.emplace_back(wx, wy);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    const int da = a.second - a.first, db = b.second - b.first;
    if (da != db) return da < db;
    return a.first + a.second < b.first + b.second;
  });
  return out;
}

ConstraintSystem column_equations(const MultiplicationTable& table) {
  ConstraintSystem sys;
  sys.variables = table.variables;
  for (int c = 0; c < table.columns(); ++c) {
    Polynomial poly;
    for (const auto& row : table.partial_products)
      for (const auto& [column, term] : row)
        if (column == c) poly += term;
    for (int id : table.carries_in[static_cast<std::size_t>(c)]) poly += Polynomial::variable(id);
    poly -= Polynomial::constant(table.target_bit(c));
    for (int id : table.carries_out[static_cast<std::size_t>(c)]) {
      const int distance = sys.variables[static_cast<std::size_t>(id)].to_column - c;
      poly -= Polynomial::variable(id) * (std::int64_t{1} << distance);
    }
    if (poly.is_zero()) continue;  // e.g. column 0: 1 = 1
    sys.equations.push_back({std::move(poly), c});
  }
  return sys;
}

std::vector<int> ConstraintSystem::unknowns() const {
  std::vector<int> ids;
  for (std::size_t i = 0; i < variables.size(); ++i) {
    const int id = static_cast<int>(i);
    if (!fixed.contains(id) && !eliminated.contains(id)) ids.push_back(id);
  }
  return ids;
}

std::vector<int> ConstraintSystem::multiplier_variables() const {
  std::vector<int> ids;
  for (std::size_t i = 0; i < variables.size(); ++i)
    if (variables[i].kind != VarKind::carry) ids.push_back(static_cast<int>(i));
  return ids;
}

std::string ConstraintSystem::render(const Equation& eq) const {
  auto name = [this](int id) { return variables.at(static_cast<std::size_t>(id)).name; };
  Polynomial lhs;
  Polynomial rhs;
  for (const auto& [m, c] : eq.poly.terms()) {
    Polynomial term;
    if (m.empty()) {
      term = Polynomial::constant(std::llabs(c));
    } else {
      term = Polynomial::variable(m.front());
      for (std::size_t i = 1; i < m.size(); ++i) term = term * Polynomial::variable(m[i]);
      term *= std::llabs(c);
    }
    (c > 0 ? lhs : rhs) += term;
  }
  // Constants read first on the right-hand side ("1 + 2*z12").
  std::string right;
  if (rhs.constant_term() != 0 && !rhs.is_constant()) {
    Polynomial rest = rhs - Polynomial::constant(rhs.constant_term());
    right = std::to_string(rhs.constant_term()) + " + " + rest.to_string(name);
  } else {
    right = rhs.to_string(name);
  }
  return lhs.to_string(name) + " = " + right;
}

namespace {

class Simplifier {
 public:
  explicit Simplifier(const ConstraintSystem& in) : sys_(in) {}

  SimplifyResult run() {
    const std::int64_t idem_start = Polynomial::idempotence_reductions();
    std::int64_t idem_seen = idem_start;
    cleanup();
    int iteration = 0;
    for (;; ++iteration) {
      if (iteration > 10000) throw std::logic_error("simplify: no fixed point after 10000 iterations");
      bool changed = false;
      changed |= propagate_bounds();
      if (!changed) changed |= substitute_pair();
      dedupe();
      const std::int64_t idem_now = Polynomial::idempotence_reductions();
      if (idem_now != idem_seen) {
        record("idempotence", std::to_string(idem_now - idem_seen) + " reduction(s) b*b -> b",
               static_cast<int>(idem_now - idem_seen));
        idem_seen = idem_now;
      }
      if (!changed) break;
    }
    SimplifyResult result;
    result.system = std::move(sys_);
    result.ledger = std::move(ledger_);
    result.rule_counts = std::move(counts_);
    result.iterations = iteration + 1;
    return result;
  }

 private:
  std::string name(int id) const { return sys_.variables.at(static_cast<std::size_t>(id)).name; }
  bool is_carry(int id) const { return sys_.variables.at(static_cast<std::size_t>(id)).kind == VarKind::carry; }

  void record(const std::string& rule, const std::string& detail, int count = 1) {
    ledger_.push_back({rule, detail});
    counts_[rule] += count;
  }

  // Normalise, drop satisfied equations, reject contradictions.
  void cleanup() {
    std::vector<Equation> kept;
    for (auto& eq : sys_.equations) {
      Polynomial p = eq.poly.normalized();
      if (p.is_zero()) {
        record("satisfied", "dropped " + sys_.render(eq));
        continue;
      }
      if (p.is_constant()) throw Infeasible("constraint reduces to " + std::to_string(eq.poly.constant_term()) + " = 0");
      if (!(p == eq.poly)) eq.column = -1;
      eq.poly = std::move(p);
      kept.push_back(std::move(eq));
    }
    sys_.equations = std::move(kept);
  }

  void assign(int id, const Polynomial& value) {
    for (auto& eq : sys_.equations) {
      Polynomial p = eq.poly.substitute(id, value);
      if (!(p == eq.poly)) {
        eq.poly = std::move(p);
        eq.column = -1;
      }
    }
    for (auto& [carry, def] : sys_.eliminated) def = def.substitute(id, value);
  }

  bool propagate_bounds() {
    std::map<int, std::uint8_t> forced;
    std::vector<std::string> reasons;
    auto force = [&](int id, std::uint8_t v, const Equation& eq) {
      auto [it, inserted] = forced.emplace(id, v);
      if (!inserted && it->second != v) {
        throw Infeasible("variable " + name(id) + " forced to both 0 and 1 (" + sys_.render(eq) + ")");
      }
      if (inserted) reasons.push_back(name(id) + " = " + std::to_string(v) + " from " + sys_.render(eq));
    };
    for (const auto& eq : sys_.equations) {
      const std::int64_t lo = eq.poly.lower_bound();
      const std::int64_t hi = eq.poly.upper_bound();
      if (lo > 0 || hi < 0) throw Infeasible("constraint " + sys_.render(eq) + " has no binary solution");
      for (const auto& [m, a] : eq.poly.terms()) {
        if (m.empty()) continue;
        // must_be_zero: switching the term on leaves the range; must_be_one:
        // switching it off does.
        const bool must_be_zero = a > 0 ? lo + a > 0 : hi + a < 0;
        const bool must_be_one = a > 0 ? hi - a < 0 : lo - a > 0;
        if (must_be_zero && must_be_one) throw Infeasible("constraint " + sys_.render(eq) + " has no binary solution");
        if (must_be_one) {
          for (int v : m) force(v, 1, eq);
        } else if (must_be_zero && m.size() == 1) {
          force(m.front(), 0, eq);
        }
      }
    }
    if (forced.empty()) return false;
    for (const auto& reason : reasons) record("bound_propagation", reason);
    for (const auto& [id, v] : forced) {
      sys_.fixed[id] = v;
      assign(id, Polynomial::constant(v));
      record("substitution", name(id) + " := " + std::to_string(v));
    }
    cleanup();
    return true;
  }

  // x + y = 1  or  x = y: a carry partner is eliminated outright (its
  // definition is binary-valued, so it extends every solution uniquely); two
  // multiplier bits keep the defining equation and substitute elsewhere.
  bool substitute_pair() {
    for (std::size_t k = 0; k < sys_.equations.size(); ++k) {
      const Polynomial& p = sys_.equations[k].poly;
      std::vector<std::pair<int, std::int64_t>> singles;
      bool shape_ok = true;
      for (const auto& [m, c] : p.terms()) {
        if (m.empty()) continue;
        if (m.size() != 1) {
          shape_ok = false;
          break;
        }
        singles.emplace_back(m.front(), c);
      }
      if (!shape_ok || singles.size() != 2) continue;
      const auto [a, ca] = singles[0];
      const auto [b, cb] = singles[1];
      const std::int64_t c0 = p.constant_term();
      bool complement = false;
      if (ca == 1 && cb == 1 && c0 == -1) {
        complement = true;
      } else if (!(ca == 1 && cb == -1 && c0 == 0)) {
        continue;
      }
      int target = b;
      int keep = a;
      if (is_carry(a) && !is_carry(b)) std::swap(target, keep);
      const Polynomial value =
          complement ? Polynomial::constant(1) - Polynomial::variable(keep) : Polynomial::variable(keep);
      const std::string relation =
          name(target) + " := " + (complement ? "1 - " : "") + name(keep) + " from " + sys_.render(sys_.equations[k]);

      if (is_carry(target)) {
        Equation defining = sys_.equations[k];
        sys_.equations.erase(sys_.equations.begin() + static_cast<std::ptrdiff_t>(k));
        sys_.eliminated[target] = value;
        assign(target, value);
        record("pair_substitution", "eliminate carry " + relation);
        cleanup();
        return true;
      }
      bool used_elsewhere = false;
      for (std::size_t j = 0; j < sys_.equations.size(); ++j)
        if (j != k && sys_.equations[j].poly.variables().contains(target)) used_elsewhere = true;
      if (!used_elsewhere) continue;
      Equation defining = sys_.equations[k];
      sys_.equations.erase(sys_.equations.begin() + static_cast<std::ptrdiff_t>(k));
      assign(target, value);
      sys_.equations.insert(sys_.equations.begin() + static_cast<std::ptrdiff_t>(k), std::move(defining));
      record("pair_substitution", relation);
      cleanup();
      return true;
    }
    return false;
  }

  void dedupe() {
    std::vector<Equation> kept;
    std::set<Polynomial> seen;
    for (auto& eq : sys_.equations) {
      if (!seen.insert(eq.poly).second) {
        record("duplicate", "dropped repeated " + sys_.render(eq));
        continue;
      }
      kept.push_back(std::move(eq));
    }
    sys_.equations = std::move(kept);
  }

  ConstraintSystem sys_;
  std::vector<RuleApplication> ledger_;
  std::map<std::string, int> counts_;
};

std::vector<std::uint8_t> registry_values(const ConstraintSystem& sys) {
  std::vector<std::uint8_t> values(sys.variables.size(), 0);
  for (const auto& [id, v] : sys.fixed) values[static_cast<std::size_t>(id)] = v;
  return values;
}

}  // namespace

SimplifyResult simplify(const ConstraintSystem& system, const SimplifyOptions& options) {
  SimplifyResult result = Simplifier(system).run();
  if (options.verify && static_cast<int>(system.unknowns().size()) <= options.verify_limit) {
    const auto before = multiplier_projection(system, brute_force_solutions(system, options.verify_limit));
    if (before.empty()) throw Infeasible("no binary assignment satisfies the column equations");
    const auto after = multiplier_projection(result.system, brute_force_solutions(result.system, options.verify_limit));
    if (before != after) throw std::logic_error("simplify changed the multiplier-bit solution set");
    result.verified = true;
  }
  return result;
}

Solutions brute_force_solutions(const ConstraintSystem& system, int limit) {
  Solutions out;
  out.variables = system.unknowns();
  const int k = static_cast<int>(out.variables.size());
  if (k > limit) {
    throw TooLarge("brute force over " + std::to_string(k) + " variables exceeds limit " + std::to_string(limit));
  }
  std::vector<std::uint8_t> values = registry_values(system);
  const std::uint64_t count = std::uint64_t{1} << k;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    for (int i = 0; i < k; ++i) {
      values[static_cast<std::size_t>(out.variables[static_cast<std::size_t>(i)])] =
          static_cast<std::uint8_t>((mask >> (k - 1 - i)) & 1u);
    }
    bool ok = true;
    for (const auto& eq : system.equations) {
      if (eq.poly.evaluate(values) != 0) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    std::vector<std::uint8_t> row(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) row[static_cast<std::size_t>(i)] = values[static_cast<std::size_t>(out.variables[static_cast<std::size_t>(i)])];
    out.assignments.push_back(std::move(row));
  }
  return out;
}

std::vector<std::vector<std::uint8_t>> multiplier_projection(const ConstraintSystem& system,
                                                             const Solutions& solutions) {
  const std::vector<int> mult = system.multiplier_variables();
  std::set<std::vector<std::uint8_t>> rows;
  std::vector<std::uint8_t> values = registry_values(system);
  for (const auto& assignment : solutions.assignments) {
    for (std::size_t i = 0; i < solutions.variables.size(); ++i)
      values[static_cast<std::size_t>(solutions.variables[i])] = assignment[i];
    std::vector<std::uint8_t> row;
    row.reserve(mult.size());
    for (int id : mult) {
      if (system.eliminated.contains(id)) throw std::logic_error("multiplier bit eliminated");
      row.push_back(values[static_cast<std::size_t>(id)]);
    }
    rows.insert(std::move(row));
  }
  return {rows.begin(), rows.end()};
}

ComplexMatrix ProblemHamiltonian::unshifted() const {
  return op + offset * identity(static_cast<int>(op.rows()));
}

ComplexMatrix constraint_energy_operator(const ConstraintSystem& system, const std::vector<int>& qubits) {
  const int n = static_cast<int>(qubits.size());
  const int dim = 1 << n;
  ComplexMatrix bit_one = ComplexMatrix::Zero(2, 2);  // (I - sigma_z)/2
  bit_one(1, 1) = 1.0;
  std::map<int, ComplexMatrix> projector;
  for (int k = 0; k < n; ++k) projector.emplace(qubits[static_cast<std::size_t>(k)], embed(bit_one, k, n));

  ComplexMatrix total = ComplexMatrix::Zero(dim, dim);
  for (const auto& eq : system.equations) {
    ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
    for (const auto& [m, c] : eq.poly.terms()) {
      ComplexMatrix term = identity(dim);
      for (int v : m) {
        auto it = projector.find(v);
        if (it == projector.end()) {
          throw std::logic_error("constraint variable " + system.variables[static_cast<std::size_t>(v)].name +
                                 " has no qubit");
        }
        term = term * it->second;
      }
      p += static_cast<double>(c) * term;
    }
    total += p * p;
  }
  return total;
}

ProblemHamiltonian to_hamiltonian(const ConstraintSystem& system, double g1, int qubit_budget) {
  ProblemHamiltonian h;
  h.qubit_variables = system.unknowns();
  h.g1 = g1;
  h.fixed = system.fixed;
  if (h.n_qubits() > qubit_budget) {
    throw TooManyQubits(std::to_string(h.n_qubits()) + " qubits needed, budget is " + std::to_string(qubit_budget));
  }
  const ComplexMatrix energy = constraint_energy_operator(system, h.qubit_variables);
  const int dim = static_cast<int>(energy.rows());
  double min_diag = std::numeric_limits<double>::infinity();
  for (int k = 0; k < dim; ++k) min_diag = std::min(min_diag, energy(k, k).real());
  if (min_diag > 0.5) throw Infeasible("problem Hamiltonian has no zero-energy ground state");
  const double identity_part = energy.trace().real() / dim;
  h.op = g1 * (energy - identity_part * identity(dim));
  h.offset = g1 * identity_part;
  return h;
}

Decoded decode_solution(int basis_index, const ProblemHamiltonian& hamiltonian, const MultiplicationTable& table) {
  const int n = hamiltonian.n_qubits();
  if (basis_index < 0 || basis_index >= (1 << n)) {
    throw InvalidArgument("basis index " + std::to_string(basis_index) + " outside " + std::to_string(n) + "-qubit space");
  }
  std::vector<std::uint8_t> values(table.variables.size(), 0);
  std::vector<bool> known(table.variables.size(), false);
  for (const auto& [id, v] : hamiltonian.fixed) {
    values[static_cast<std::size_t>(id)] = v;
    known[static_cast<std::size_t>(id)] = true;
  }
  for (int k = 0; k < n; ++k) {
    const auto id = static_cast<std::size_t>(hamiltonian.qubit_variables[static_cast<std::size_t>(k)]);
    values[id] = static_cast<std::uint8_t>((basis_index >> (n - 1 - k)) & 1);
    known[id] = true;
  }
  auto assemble = [&](const std::vector<Polynomial>& bits) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      for (int id : bits[i].variables())
        if (!known[static_cast<std::size_t>(id)]) throw std::logic_error("multiplier bit without value");
      if (bits[i].evaluate(values) != 0) v |= std::uint64_t{1} << i;
    }
    return v;
  };
  Decoded d;
  d.x = assemble(table.x_bits);
  d.y = assemble(table.y_bits);
  d.is_factorization = d.x * d.y == table.n;
  return d;
}

std::vector<int> ground_basis_states(const ProblemHamiltonian& hamiltonian, double tol) {
  const ComplexMatrix& op = hamiltonian.op;
  const ComplexMatrix off = op - ComplexMatrix(op.diagonal().asDiagonal());
  if (op.size() > 0 && off.cwiseAbs().maxCoeff() > tol) {
    throw InvalidArgument("ground_basis_states: problem Hamiltonian is not diagonal");
  }
  double lowest = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < op.rows(); ++k) lowest = std::min(lowest, op(k, k).real());
  std::vector<int> out;
  for (Eigen::Index k = 0; k < op.rows(); ++k)
    if (op(k, k).real() <= lowest + tol) out.push_back(static_cast<int>(k));
  return out;
}

CompiledProblem compile(std::uint64_t n, int width_x, int width_y, double g1, int qubit_budget) {
  CompiledProblem out;
  out.table = build_table(n, width_x, width_y);
  out.original = column_equations(out.table);
  out.simplified = simplify(out.original);
  try {
    out.hamiltonian = to_hamiltonian(out.simplified.system, g1, qubit_budget);
  } catch (const TooManyQubits&) {
    out.hamiltonian.reset();
  }
  return out;
}

CompiledProblem compile_auto(std::uint64_t n, double g1, int qubit_budget) {
  const auto widths = candidate_widths(n);
  if (widths.empty()) throw InvalidWidths("no odd-factor width pair fits N = " + std::to_string(n));
  for (const auto& [wx, wy] : widths) {
    try {
      return compile(n, wx, wy, g1, qubit_budget);
    } catch (const Infeasible&) {
      continue;
    }
  }
  throw Infeasible("N = " + std::to_string(n) + " has no factorization into odd factors of any width pair");
}

}  // namespace nvfactor::factor
