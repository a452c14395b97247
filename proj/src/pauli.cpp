#include "aqls/pauli.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <utility>

#include "aqls/util.hpp"

namespace aqls {

namespace {

bool is_pauli_letter(char c) {
  return c == 'I' || c == 'X' || c == 'Y' || c == 'Z';
}

// Recursive-descent parser over the grammar in the header. Positions in
// errors are byte offsets into the original input.
class Parser {
 public:
  Parser(std::string_view text, int max_qubits)
      : text_(text), max_qubits_(max_qubits) {}

  std::pair<std::vector<PauliTerm>, double> run() {
    std::vector<PauliTerm> terms;
    skip_ws();
    bool paren = false;
    if (peek() == '(') {
      paren = true;
      ++pos_;
    }
    terms.push_back(parse_term());
    for (;;) {
      skip_ws();
      const char c = peek();
      if (c == '+' || c == '-') {
        ++pos_;
        PauliTerm t = parse_term();
        if (c == '-') t.coefficient = -t.coefficient;
        terms.push_back(t);
        continue;
      }
      break;
    }
    double divisor = 1.0;
    skip_ws();
    if (paren) {
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      skip_ws();
      if (peek() != '/') fail("expected '/' after ')'");
      ++pos_;
      skip_ws();
      const std::size_t at = pos_;
      divisor = parse_number();
      if (divisor == 0.0) {
        throw ParseError("division by zero", at);
      }
      skip_ws();
    }
    if (pos_ != text_.size()) fail("unexpected trailing characters");
    return {std::move(terms), divisor};
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, pos_);
  }

  PauliTerm parse_term() {
    skip_ws();
    double sign = 1.0;
    if (peek() == '+' || peek() == '-') {
      if (peek() == '-') sign = -1.0;
      ++pos_;
      skip_ws();
    }
    double coeff = 1.0;
    if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') {
      coeff = parse_number();
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        skip_ws();
      }
    }
    const std::size_t word_at = pos_;
    std::string letters;
    while (is_pauli_letter(peek())) {
      letters.push_back(peek());
      ++pos_;
    }
    if (letters.empty()) fail("expected a Pauli word (letters I, X, Y, Z)");
    if (static_cast<int>(letters.size()) > max_qubits_) {
      throw ParseError("word exceeds the maximum of " +
                           std::to_string(max_qubits_) + " qubits",
                       word_at);
    }
    if (word_length_ == 0) {
      word_length_ = static_cast<int>(letters.size());
    } else if (static_cast<int>(letters.size()) != word_length_) {
      throw ParseError("inconsistent word length (expected " +
                           std::to_string(word_length_) + " letters)",
                       word_at);
    }
    return PauliTerm{sign * coeff, PauliWord{std::move(letters)}};
  }

  // digits [ "." digits ] [ ("e"|"E") ["+"|"-"] digits ]; leading digits are
  // required, so ".5" and a bare "." are rejected here.
  double parse_number() {
    const std::size_t start = pos_;
    if (!std::isdigit(static_cast<unsigned char>(peek()))) {
      fail("expected a number");
    }
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (peek() == '.') {
      ++pos_;
      if (!std::isdigit(static_cast<unsigned char>(peek()))) {
        fail("expected digits after decimal point");
      }
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    }
    if (peek() == 'e' || peek() == 'E') {
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      if (!std::isdigit(static_cast<unsigned char>(peek()))) {
        fail("expected exponent digits");
      }
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    }
    double value = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
      throw ParseError("invalid number literal", start);
    }
    return value;
  }

  std::string_view text_;
  int max_qubits_;
  std::size_t pos_ = 0;
  int word_length_ = 0;
};

}  // namespace

PauliExpr::PauliExpr(std::vector<PauliTerm> terms, double divisor,
                     int n_qubits)
    : terms_(std::move(terms)), divisor_(divisor), n_qubits_(n_qubits) {}

PauliExpr PauliExpr::parse(std::string_view text, int max_qubits) {
  if (max_qubits < 1) {
    throw ParseError("max_qubits must be at least 1", 0);
  }
  auto [raw, divisor] = Parser(text, max_qubits).run();

  // Normalize: merge duplicate words in first-insertion order, drop exact
  // zeros. A fully cancelled expression keeps one zero identity term so the
  // canonical form stays inside the grammar.
  const int n = raw.front().word.n_qubits();
  std::vector<PauliTerm> merged;
  for (const PauliTerm& t : raw) {
    bool found = false;
    for (PauliTerm& m : merged) {
      if (m.word == t.word) {
        m.coefficient += t.coefficient;
        found = true;
        break;
      }
    }
    if (!found) merged.push_back(t);
  }
  std::vector<PauliTerm> kept;
  for (const PauliTerm& m : merged) {
    if (m.coefficient != 0.0) kept.push_back(m);
  }
  if (kept.empty()) {
    return PauliExpr({PauliTerm{0.0, PauliWord{std::string(n, 'I')}}}, 1.0, n);
  }
  return PauliExpr(std::move(kept), divisor, n);
}

std::string PauliExpr::str() const {
  std::string out;
  const bool parens = divisor_ != 1.0;
  if (parens) out += '(';
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    const PauliTerm& t = terms_[k];
    const double a = std::abs(t.coefficient);
    const bool negative = std::signbit(t.coefficient);
    if (k == 0) {
      if (negative) out += '-';
    } else {
      out += negative ? " - " : " + ";
    }
    if (a != 1.0) {
      out += format_double(a);
      out += '*';
    }
    out += t.word.letters;
  }
  if (parens) {
    out += ")/";
    out += format_double(divisor_);
  }
  return out;
}

HermitianOperator PauliExpr::to_matrix() const {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits_;
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (const PauliTerm& t : terms_) {
    ComplexMatrix w = ComplexMatrix::Identity(1, 1);
    for (char letter : t.word.letters) {
      w = kron(w, pauli_matrix(letter));
    }
    sum += t.coefficient * w;
  }
  sum /= divisor_;
  return HermitianOperator(std::move(sum));
}

const ComplexMatrix& pauli_matrix(char letter) {
  static const ComplexMatrix kI = [] {
    ComplexMatrix m(2, 2);
    m << 1, 0, 0, 1;
    return m;
  }();
  static const ComplexMatrix kX = [] {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
  }();
  static const ComplexMatrix kY = [] {
    ComplexMatrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
  }();
  static const ComplexMatrix kZ = [] {
    ComplexMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
  }();
  switch (letter) {
    case 'I':
      return kI;
    case 'X':
      return kX;
    case 'Y':
      return kY;
    case 'Z':
      return kZ;
    default:
      throw Error(std::string("unknown Pauli letter '") + letter + "'");
  }
}

}  // namespace aqls
