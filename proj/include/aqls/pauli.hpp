#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "aqls/linalg.hpp"

namespace aqls {

/// Tensor product of single-qubit operators drawn from {I, X, Y, Z}.
/// The leftmost letter is the first (most significant) tensor factor, so
/// "XII" acts with X on qubit 1 of 3.
struct PauliWord {
  std::string letters;

  int n_qubits() const { return static_cast<int>(letters.size()); }
  bool operator==(const PauliWord&) const = default;
};

struct PauliTerm {
  double coefficient;
  PauliWord word;

  bool operator==(const PauliTerm&) const = default;
};

/// A scaled sum of real-weighted Pauli words: (c1*W1 + c2*W2 + ...)/d.
///
/// Text grammar (whitespace insignificant, coefficients real literals):
///
///   expr    = [ "(" ] term { ("+"|"-") term } [ ")" "/" number ]
///   term    = [ "+" | "-" ] [ number [ "*" ] ] word
///   word    = letter { letter }          letter = "I" | "X" | "Y" | "Z"
///   number  = digits [ "." digits ] [ ("e"|"E") ["+"|"-"] digits ]
///
/// A divisor requires the parenthesized form; an omitted coefficient means 1.
/// Parsing normalizes the expression: duplicate words are merged by
/// coefficient addition and zero-coefficient terms are dropped (term order
/// follows first insertion). Real coefficients make to_matrix() structurally
/// Hermitian.
class PauliExpr {
 public:
  static constexpr int kDefaultMaxQubits = 12;

  /// Parses and normalizes. Throws ParseError (position-annotated) on syntax
  /// errors, inconsistent word lengths, zero divisor, complex coefficient
  /// tokens, or words longer than max_qubits.
  static PauliExpr parse(std::string_view text,
                         int max_qubits = kDefaultMaxQubits);

  /// Canonical text form; parse(str()) reproduces this expression exactly.
  /// A fully cancelled expression prints as a zero-coefficient identity word
  /// (e.g. "0*II") so the form stays within the grammar.
  std::string str() const;

  /// Dense (1/divisor) * sum_k c_k * kron(sigma_{w_k,1}, ..., sigma_{w_k,n}),
  /// dimension 2^n, basis ordering |0> = (1,0)^T.
  HermitianOperator to_matrix() const;

  const std::vector<PauliTerm>& terms() const { return terms_; }
  double divisor() const { return divisor_; }
  int n_qubits() const { return n_qubits_; }

  bool operator==(const PauliExpr&) const = default;

 private:
  PauliExpr(std::vector<PauliTerm> terms, double divisor, int n_qubits);

  std::vector<PauliTerm> terms_;
  double divisor_ = 1.0;
  int n_qubits_ = 0;
};

/// The four single-qubit matrices, keyed by letter.
const ComplexMatrix& pauli_matrix(char letter);

}  // namespace aqls
