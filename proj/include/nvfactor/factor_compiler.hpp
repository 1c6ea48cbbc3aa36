#pragma once

// Compiles "factor N" into a diagonal problem Hamiltonian.
//
// The binary long-multiplication table of x * y = N is written column by
// column; each column gives an integer equation between the partial-product
// bits entering it and the target bit plus outgoing carries. The equations are
// simplified with binary-logic rules and the residual system is encoded as a
// sum of squared constraint violations, with every binary variable b mapped to
// the projector (I - sigma_z)/2 on its own qubit.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nvfactor/polynomial.hpp"
#include "nvfactor/qcore.hpp"

namespace nvfactor::factor {

inline constexpr int kDefaultQubitBudget = 6;
inline constexpr int kBruteForceLimit = 24;
inline constexpr int kVerifyLimit = 20;

enum class VarKind { multiplier_x, multiplier_y, carry };

struct BitVariable {
  std::string name;
  VarKind kind = VarKind::carry;
  int bit = -1;          // bit position inside x or y (multiplier bits)
  int from_column = -1;  // carries: z_{from,to}
  int to_column = -1;
};

struct MultiplicationTable {
  std::uint64_t n = 0;
  int width_x = 0;
  int width_y = 0;
  std::vector<BitVariable> variables;
  // Bit i of x (resp. y): the constant 1 or a single variable.
  std::vector<Polynomial> x_bits;
  std::vector<Polynomial> y_bits;
  // partial_products[j] holds (column, x * y_j bit) for the row of y bit j.
  std::vector<std::vector<std::pair<int, Polynomial>>> partial_products;
  std::vector<std::vector<int>> carries_out;  // per column, nearest first
  std::vector<std::vector<int>> carries_in;   // per column

  int columns() const { return width_x + width_y; }
  int target_bit(int column) const { return static_cast<int>((n >> column) & 1u); }
  const std::string& name(int id) const { return variables.at(static_cast<std::size_t>(id)).name; }
  std::vector<int> unknown_multiplier_bits() const;
  std::vector<int> carry_variables() const;
};

struct Equation {
  Polynomial poly;  // the equation reads poly == 0
  int column = -1;  // source column, -1 once rewritten by the simplifier
};

struct ConstraintSystem {
  std::vector<BitVariable> variables;
  std::vector<Equation> equations;
  std::map<int, std::uint8_t> fixed;
  // Carries removed by substitution, with the expression that defines them.
  std::map<int, Polynomial> eliminated;

  // Variables that are neither fixed nor eliminated, in registry order.
  std::vector<int> unknowns() const;
  std::vector<int> multiplier_variables() const;
  // "p + q = 1 + 2*z12": positive terms left, negated negative terms right.
  std::string render(const Equation& eq) const;
};

struct RuleApplication {
  std::string rule;
  std::string detail;
};

struct SimplifyResult {
  ConstraintSystem system;
  std::vector<RuleApplication> ledger;
  std::map<std::string, int> rule_counts;
  int iterations = 0;
  // True when the multiplier-bit solution set was checked against brute force.
  bool verified = false;
};

struct SimplifyOptions {
  bool verify = true;
  int verify_limit = kVerifyLimit;
};

// Odd x of width_x bits times odd y of width_y bits; the leading and trailing
// bits of both are fixed to 1. Throws InvalidWidths when N is outside
// [2^(wx-1) * 2^(wy-1), (2^wx - 1)(2^wy - 1)] or N is even or < 9.
MultiplicationTable build_table(std::uint64_t n, int width_x, int width_y);

// Width pairs (wx <= wy) whose range contains N, most balanced first.
std::vector<std::pair<int, int>> candidate_widths(std::uint64_t n);

ConstraintSystem column_equations(const MultiplicationTable& table);

// Fixed-point iteration of idempotence, bound propagation, substitution of
// fixed variables, pair substitution and duplicate removal. Throws Infeasible.
SimplifyResult simplify(const ConstraintSystem& system, const SimplifyOptions& options = {});

struct Solutions {
  std::vector<int> variables;
  std::vector<std::vector<std::uint8_t>> assignments;  // lexicographic order
};

// Every binary assignment of `unknowns()` satisfying all equations.
Solutions brute_force_solutions(const ConstraintSystem& system, int limit = kBruteForceLimit);

// Assignment of every multiplier bit (fixed or solved), registry order, one
// row per solution. Sorted and duplicate-free.
std::vector<std::vector<std::uint8_t>> multiplier_projection(const ConstraintSystem& system,
                                                             const Solutions& solutions);

struct ProblemHamiltonian {
  std::vector<int> qubit_variables;  // qubit k <-> variable id
  ComplexMatrix op;                  // g1 * (sum of squares - identity part)
  double offset = 0.0;               // op + offset * I = g1 * (sum of squares)
  double g1 = 1.0;
  std::map<int, std::uint8_t> fixed;

  int n_qubits() const { return static_cast<int>(qubit_variables.size()); }
  ComplexMatrix unshifted() const;
};

// Sum over equations of poly(B)^2 with B = (I - sigma_z)/2 per qubit.
ComplexMatrix constraint_energy_operator(const ConstraintSystem& system, const std::vector<int>& qubits);

// Throws TooManyQubits above the budget and Infeasible when the unshifted
// operator has no zero eigenvalue.
ProblemHamiltonian to_hamiltonian(const ConstraintSystem& system, double g1,
                                  int qubit_budget = kDefaultQubitBudget);

struct Decoded {
  std::uint64_t x = 0;
  std::uint64_t y = 0;
  bool is_factorization = false;  // false flags a basis state that is not a ground state
};

Decoded decode_solution(int basis_index, const ProblemHamiltonian& hamiltonian,
                        const MultiplicationTable& table);

// Basis indices on the diagonal minimum of a (diagonal) problem Hamiltonian.
std::vector<int> ground_basis_states(const ProblemHamiltonian& hamiltonian, double tol = 1e-9);

struct CompiledProblem {
  MultiplicationTable table;
  ConstraintSystem original;
  SimplifyResult simplified;
  // Empty when the residual system exceeds the qubit budget.
  std::optional<ProblemHamiltonian> hamiltonian;
};

// Full compile; the Hamiltonian is omitted (not thrown) above the budget.
CompiledProblem compile(std::uint64_t n, int width_x, int width_y, double g1,
                        int qubit_budget = kDefaultQubitBudget);
// Tries candidate_widths() in order and returns the first feasible table.
CompiledProblem compile_auto(std::uint64_t n, double g1, int qubit_budget = kDefaultQubitBudget);

}  // namespace nvfactor::factor
