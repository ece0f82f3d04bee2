#include "fmslab/invariants.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <unordered_map>

#include "fmslab/error.hpp"
#include "fmslab/geometry.hpp"

namespace fmslab {

namespace {

int degree_of(const Exponent& e) { return e[0] + e[1] + e[2]; }

PolyGerm multiply(const PolyGerm& a, const PolyGerm& b) {
  PolyGerm out;
  out.nvars = a.nvars;
  out.names = a.names;
  for (const auto& [ea, ca] : a.terms) {
    for (const auto& [eb, cb] : b.terms) {
      out.add({ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}, ca * cb);
    }
  }
  return out;
}

PolyGerm constant(const PolyGerm& shape, const mpq_class& c) {
  PolyGerm out;
  out.nvars = shape.nvars;
  out.names = shape.names;
  out.add({0, 0, 0}, c);
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, PolyGerm shape) : text_(text), shape_(std::move(shape)) {}

  PolyGerm run() {
    PolyGerm p = expr();
    skip();
    if (pos_ != text_.size()) fail("unexpected character");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("germ: " + what + " at position " + std::to_string(pos_) + " in '" +
                      std::string(text_) + "'");
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  PolyGerm expr() {
    PolyGerm acc = term();
    for (;;) {
      if (eat('+')) {
        for (const auto& [e, c] : term().terms) acc.add(e, c);
      } else if (eat('-')) {
        for (const auto& [e, c] : term().terms) acc.add(e, -c);
      } else {
        return acc;
      }
    }
  }

  PolyGerm term() {
    PolyGerm acc = power();
    for (;;) {
      if (eat('*')) {
        acc = multiply(acc, power());
      } else if (eat('/')) {
        const PolyGerm d = power();
        if (d.terms.size() != 1 || d.terms.begin()->first != Exponent{0, 0, 0}) {
          fail("division only by nonzero constants");
        }
        acc = multiply(acc, constant(shape_, 1 / d.terms.begin()->second));
      } else {
        return acc;
      }
    }
  }

  PolyGerm power() {
    PolyGerm base = atom();
    if (!eat('^')) return base;
    skip();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a nonnegative integer exponent");
    const int n = std::stoi(std::string(text_.substr(start, pos_ - start)));
    if (n > 64) fail("exponent too large");
    PolyGerm out = constant(shape_, 1);
    for (int i = 0; i < n; ++i) out = multiply(out, base);
    return out;
  }

  PolyGerm atom() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      PolyGerm p = atom();
      for (auto& [e, v] : p.terms) v = -v;
      return p;
    }
    if (c == '+') {
      ++pos_;
      return atom();
    }
    if (c == '(') {
      ++pos_;
      PolyGerm p = expr();
      if (!eat(')')) fail("expected ')'");
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      ++pos_;
      const auto it = std::find(shape_.names.begin(), shape_.names.end(), std::string(1, c));
      Exponent e{0, 0, 0};
      e[static_cast<std::size_t>(it - shape_.names.begin())] = 1;
      PolyGerm p = constant(shape_, 0);
      p.terms.clear();
      p.add(e, 1);
      return p;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  PolyGerm number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    mpq_class value(std::string(text_.substr(start, pos_ - start)).empty()
                        ? std::string("0")
                        : std::string(text_.substr(start, pos_ - start)));
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mpq_class scale(1);
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        scale /= 10;
        value += scale * (text_[pos_] - '0');
        ++pos_;
      }
    }
    if (pos_ == start) fail("expected a number");
    value.canonicalize();
    return constant(shape_, value);
  }

  std::string_view text_;
  PolyGerm shape_;
  std::size_t pos_ = 0;
};

// Sparse row over monomial columns; the largest column index is the leading term.
using Row = std::map<int, mpq_class>;

class Echelon {
 public:
  // Reduces `row` against the stored pivots; returns true if it became zero.
  bool reduce(Row& row) const {
    while (!row.empty()) {
      const auto lead = std::prev(row.end());
      const auto pivot = pivots_.find(lead->first);
      if (pivot == pivots_.end()) return false;
      const mpq_class factor = lead->second;
      for (const auto& [col, val] : pivot->second) {
        auto [it, inserted] = row.try_emplace(col, 0);
        it->second -= factor * val;
        if (it->second == 0) row.erase(it);
      }
    }
    return true;
  }

  void insert(Row row) {
    if (reduce(row)) return;
    const auto lead = std::prev(row.end());
    const mpq_class inv = 1 / lead->second;
    for (auto& [col, val] : row) val *= inv;
    const int key = lead->first;
    pivots_.emplace(key, std::move(row));
  }

  long rank() const { return static_cast<long>(pivots_.size()); }

 private:
  std::unordered_map<int, Row> pivots_;
};

std::vector<Exponent> monomials_below(int nvars, int degree) {
  std::vector<Exponent> out;
  for (int d = 0; d < degree; ++d) {
    for (int a = d; a >= 0; --a) {
      if (nvars == 1) {
        if (a == d) out.push_back({a, 0, 0});
        continue;
      }
      for (int b = d - a; b >= 0; --b) {
        const int c = d - a - b;
        if (nvars == 2 && c != 0) continue;
        out.push_back({a, b, c});
      }
    }
  }
  return out;
}

QuotientStep quotient_at(const std::vector<PolyGerm>& generators, int nvars, int degree) {
  const auto monomials = monomials_below(nvars, degree);
  std::map<Exponent, int> index;
  for (std::size_t i = 0; i < monomials.size(); ++i) index.emplace(monomials[i], static_cast<int>(i));

  Echelon ech;
  for (const auto& g : generators) {
    const int low = g.min_degree();
    for (const auto& m : monomials) {
      if (degree_of(m) + low >= degree) continue;
      Row row;
      for (const auto& [e, c] : g.terms) {
        const Exponent prod{e[0] + m[0], e[1] + m[1], e[2] + m[2]};
        if (degree_of(prod) >= degree) continue;
        row[index.at(prod)] += c;
      }
      std::erase_if(row, [](const auto& kv) { return kv.second == 0; });
      if (!row.empty()) ech.insert(std::move(row));
    }
  }
  QuotientStep step;
  step.degree = degree;
  step.dimension = static_cast<long>(monomials.size()) - ech.rank();
  step.absorbed = true;
  for (const auto& m : monomials) {
    if (degree_of(m) != degree - 1) continue;
    Row row{{index.at(m), mpq_class(1)}};
    if (!ech.reduce(row)) {
      step.absorbed = false;
      break;
    }
  }
  return step;
}

}  // namespace

void PolyGerm::add(const Exponent& e, const mpq_class& c) {
  if (c == 0) return;
  auto [it, inserted] = terms.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms.erase(it);
  }
}

int PolyGerm::min_degree() const {
  int low = 1 << 20;
  for (const auto& [e, c] : terms) low = std::min(low, degree_of(e));
  return terms.empty() ? 0 : low;
}

std::string PolyGerm::to_string() const {
  if (terms.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
    const auto& [e, c] = *it;
    mpq_class mag = abs(c);
    out << (c < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
    bool unit = mag == 1 && degree_of(e) > 0;
    if (!unit) out << (mag.get_den() == 1 ? mag.get_str() : "(" + mag.get_str() + ")");
    bool need_star = !unit;
    for (int v = 0; v < nvars; ++v) {
      if (e[static_cast<std::size_t>(v)] == 0) continue;
      if (need_star) out << "*";
      out << names[static_cast<std::size_t>(v)];
      if (e[static_cast<std::size_t>(v)] > 1) out << "^" << e[static_cast<std::size_t>(v)];
      need_star = true;
    }
    first = false;
  }
  return out.str();
}

void PolyGerm::check() const {
  if (terms.empty()) throw ConfigError("germ: polynomial is zero");
  if (terms.count({0, 0, 0})) throw ConfigError("germ: constant term must vanish at the origin");
  if (nvars < 1 || nvars > 3) throw ConfigError("germ: between 1 and 3 variables supported");
}

PolyGerm PolyGerm::parse(std::string_view text) {
  std::set<char> letters;
  for (char c : text) {
    if (std::isalpha(static_cast<unsigned char>(c))) letters.insert(c);
  }
  if (letters.size() > 3) throw ConfigError("germ: more than 3 variables");
  PolyGerm shape;
  for (char c : letters) shape.names.emplace_back(1, c);
  shape.nvars = std::max<int>(1, static_cast<int>(letters.size()));
  if (shape.names.empty()) shape.names.emplace_back("x");
  PolyGerm f = Parser(text, shape).run();
  f.nvars = shape.nvars;
  f.names = shape.names;
  return f;
}

std::vector<PolyGerm> jacobian(const PolyGerm& f) {
  std::vector<PolyGerm> out;
  for (int v = 0; v < f.nvars; ++v) {
    PolyGerm d;
    d.nvars = f.nvars;
    d.names = f.names;
    for (const auto& [e, c] : f.terms) {
      const int p = e[static_cast<std::size_t>(v)];
      if (p == 0) continue;
      Exponent de = e;
      de[static_cast<std::size_t>(v)] -= 1;
      d.add(de, c * p);
    }
    out.push_back(std::move(d));
  }
  return out;
}

QuotientResult local_quotient(const std::vector<PolyGerm>& generators, int nvars) {
  QuotientResult res;
  std::optional<long> previous;
  for (int degree = 6; degree <= 24; degree += 2) {
    const QuotientStep step = quotient_at(generators, nvars, degree);
    res.trace.push_back(step);
    if (step.absorbed && previous && *previous == step.dimension) {
      res.dimension = step.dimension;
      res.truncation_degree = degree;
      return res;
    }
    previous = step.dimension;
  }
  throw NumericalError("local algebra did not stabilize by truncation degree 24: "
                       "non-isolated or out of desk scale");
}

long milnor(const PolyGerm& f) {
  f.check();
  return local_quotient(jacobian(f), f.nvars).dimension;
}

long tjurina(const PolyGerm& f) {
  f.check();
  auto gens = jacobian(f);
  gens.push_back(f);
  return local_quotient(gens, f.nvars).dimension;
}

InvariantReport analyze_germ(const PolyGerm& f, std::optional<long> claimed_tjurina) {
  f.check();
  InvariantReport rep;
  rep.germ = f.to_string();
  const QuotientResult mu = local_quotient(jacobian(f), f.nvars);
  auto gens = jacobian(f);
  gens.push_back(f);
  const QuotientResult tau = local_quotient(gens, f.nvars);
  rep.milnor = mu.dimension;
  rep.tjurina = tau.dimension;
  rep.modality_gap = rep.milnor - rep.tjurina;
  rep.truncation_degree_used = std::max(mu.truncation_degree, tau.truncation_degree);
  rep.predicted_peaks = rep.milnor + 1;
  rep.milnor_trace = mu.trace;
  rep.claimed_tjurina = claimed_tjurina;
  rep.tjurina_discrepancy = claimed_tjurina.has_value() && *claimed_tjurina != rep.tjurina;
  return rep;
}

bool peak_consistency(const PolyGerm& f, const SaitoScan& scan) {
  return scan.peak_count == milnor(f) + 1;
}

}  // namespace fmslab
