#include "dsgen/design_space.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace dsgen {

namespace {

constexpr double kDegenerateTol = 0.0;  // exact equality marks a point interval

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

struct Token {
  enum Kind { number, ident, op, end } kind = end;
  std::string text;
  double num = 0.0;
  std::size_t pos = 0;
};

// Tokenizer for bound expressions. Operators: + - * ( ) and the comparison
// set used by the conditional form.
class ExprLexer {
 public:
  explicit ExprLexer(std::string_view text) : text_(text) {}

  Token next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    Token t;
    t.pos = pos_;
    if (pos_ >= text_.size()) return t;
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.data() + pos_;
      const char* end = text_.data() + text_.size();
      double value = 0.0;
      auto [p, ec] = std::from_chars(begin, end, value);
      if (ec != std::errc()) throw ParseError("malformed number at position " + std::to_string(pos_));
      t.kind = Token::number;
      t.num = value;
      t.text.assign(begin, p);
      pos_ += static_cast<std::size_t>(p - begin);
      return t;
    }
    if (is_ident_start(c)) {
      std::size_t j = pos_;
      while (j < text_.size() && is_ident_char(text_[j])) ++j;
      t.kind = Token::ident;
      t.text.assign(text_.substr(pos_, j - pos_));
      pos_ = j;
      return t;
    }
    static const std::string two_char[] = {"<=", ">="};
    for (const auto& op : two_char) {
      if (text_.substr(pos_, 2) == op) {
        t.kind = Token::op;
        t.text = op;
        pos_ += 2;
        return t;
      }
    }
    if (std::string("+-*()<>").find(c) != std::string::npos) {
      t.kind = Token::op;
      t.text = std::string(1, c);
      ++pos_;
      return t;
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "' at position " +
                     std::to_string(pos_));
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

using FeatureLookup = std::unordered_map<std::string, int>;

class ExprParser {
 public:
  ExprParser(std::string_view text, const FeatureLookup& lookup, int declaring_index)
      : lexer_(text), lookup_(lookup), declaring_(declaring_index) {
    advance();
  }

  BoundExpr parse_bound() {
    BoundExpr expr;
    expr.value = parse_linear();
    if (cur_.kind == Token::ident && cur_.text == "if") {
      advance();
      BoundExpr::Condition cond;
      cond.feature = resolve_feature(expect_ident());
      cond.op = parse_cmp();
      if (cur_.kind != Token::number)
        throw ParseError("conditional threshold must be a numeric constant");
      cond.threshold = cur_.num;
      advance();
      if (!(cur_.kind == Token::ident && cur_.text == "else"))
        throw ParseError("expected 'else' in conditional bound");
      advance();
      expr.condition = cond;
      expr.alternative = parse_linear();
    }
    if (cur_.kind != Token::end)
      throw ParseError("unexpected trailing input '" + cur_.text + "' in bound expression");
    return expr;
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  std::string expect_ident() {
    if (cur_.kind != Token::ident) throw ParseError("expected feature name");
    std::string name = cur_.text;
    advance();
    return name;
  }

  BoundExpr::Cmp parse_cmp() {
    if (cur_.kind != Token::op) throw ParseError("expected comparison operator");
    BoundExpr::Cmp op;
    if (cur_.text == "<=") op = BoundExpr::Cmp::le;
    else if (cur_.text == "<") op = BoundExpr::Cmp::lt;
    else if (cur_.text == ">=") op = BoundExpr::Cmp::ge;
    else if (cur_.text == ">") op = BoundExpr::Cmp::gt;
    else throw ParseError("unsupported comparison '" + cur_.text + "'");
    advance();
    return op;
  }

  int resolve_feature(const std::string& name) {
    auto it = lookup_.find(name);
    if (it == lookup_.end())
      throw ParseError("bound expression references '" + name +
                       "', which is not declared before this feature");
    if (it->second >= declaring_)
      throw ParseError("forward reference to '" + name + "' in bound expression");
    return it->second;
  }

  // linear := [sign] term { (+|-) term }
  LinearExpr parse_linear() {
    LinearExpr out;
    double sign = 1.0;
    if (cur_.kind == Token::op && (cur_.text == "+" || cur_.text == "-")) {
      sign = cur_.text == "-" ? -1.0 : 1.0;
      advance();
    }
    parse_term(out, sign);
    while (cur_.kind == Token::op && (cur_.text == "+" || cur_.text == "-")) {
      sign = cur_.text == "-" ? -1.0 : 1.0;
      advance();
      parse_term(out, sign);
    }
    return out;
  }

  // term := number [* ident] | ident [* number]
  void parse_term(LinearExpr& out, double sign) {
    if (cur_.kind == Token::number) {
      const double value = cur_.num;
      advance();
      if (cur_.kind == Token::op && cur_.text == "*") {
        advance();
        const int feature = resolve_feature(expect_ident());
        out.terms.push_back({sign * value, feature});
      } else {
        out.constant += sign * value;
      }
      return;
    }
    if (cur_.kind == Token::ident) {
      if (cur_.text == "if" || cur_.text == "else")
        throw ParseError("expected a term before '" + cur_.text + "'");
      const int feature = resolve_feature(expect_ident());
      double coef = 1.0;
      if (cur_.kind == Token::op && cur_.text == "*") {
        advance();
        if (cur_.kind != Token::number) throw ParseError("expected numeric coefficient after '*'");
        coef = cur_.num;
        advance();
      }
      out.terms.push_back({sign * coef, feature});
      return;
    }
    throw ParseError("expected a number or feature name in bound expression");
  }

  ExprLexer lexer_;
  Token cur_;
  const FeatureLookup& lookup_;
  int declaring_;
};

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

double LinearExpr::eval(std::span<const double> values) const {
  double acc = constant;
  for (const auto& t : terms) acc += t.coef * values[static_cast<std::size_t>(t.feature)];
  return acc;
}

int LinearExpr::max_feature() const {
  int m = -1;
  for (const auto& t : terms) m = std::max(m, t.feature);
  return m;
}

double BoundExpr::eval(std::span<const double> values) const {
  if (!condition) return value.eval(values);
  const double v = values[static_cast<std::size_t>(condition->feature)];
  bool taken = false;
  switch (condition->op) {
    case Cmp::le: taken = v <= condition->threshold; break;
    case Cmp::lt: taken = v < condition->threshold; break;
    case Cmp::ge: taken = v >= condition->threshold; break;
    case Cmp::gt: taken = v > condition->threshold; break;
  }
  return taken ? value.eval(values) : alternative.eval(values);
}

int BoundExpr::max_feature() const {
  int m = value.max_feature();
  if (condition) {
    m = std::max(m, condition->feature);
    m = std::max(m, alternative.max_feature());
  }
  return m;
}

bool BoundExpr::is_constant() const { return max_feature() < 0; }

int DesignSpace::feature_index(std::string_view feature_name) const {
  for (std::size_t i = 0; i < features_.size(); ++i)
    if (features_[i].name == feature_name) return static_cast<int>(i);
  return -1;
}

DesignSpace DesignSpace::parse(std::string_view document) {
  DesignSpace space;
  space.document_ = std::string(document);

  FeatureLookup lookup;
  // Raw per-feature fields collected before compilation.
  struct RawFeature {
    std::string name;
    std::unordered_map<std::string, std::pair<std::string, int>> fields;  // key -> (value, line)
    int line = 0;
  };
  std::vector<RawFeature> raw;

  std::istringstream stream{space.document_};
  std::string line;
  int lineno = 0;
  while (std::getline(stream, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;

    const auto sp = text.find_first_of(" \t");
    const std::string key = sp == std::string::npos ? text : text.substr(0, sp);
    const std::string rest = sp == std::string::npos ? "" : trim(text.substr(sp));

    if (key == "space") {
      if (!space.name_.empty()) throw ParseError("duplicate 'space' header", lineno);
      if (rest.empty()) throw ParseError("'space' requires a name", lineno);
      space.name_ = split_ws(rest).front();
      continue;
    }
    if (key == "feature") {
      if (rest.empty()) throw ParseError("'feature' requires a name", lineno);
      const auto words = split_ws(rest);
      if (words.size() != 1) throw ParseError("feature name must be a single identifier", lineno);
      if (!is_ident_start(words[0][0]))
        throw ParseError("feature name '" + words[0] + "' is not an identifier", lineno);
      if (lookup.count(words[0]))
        throw ParseError("duplicate feature '" + words[0] + "'", lineno);
      lookup.emplace(words[0], static_cast<int>(raw.size()));
      raw.push_back({words[0], {}, lineno});
      continue;
    }
    if (raw.empty()) throw ParseError("'" + key + "' before any 'feature' record", lineno);
    auto& fields = raw.back().fields;
    if (fields.count(key)) throw ParseError("duplicate key '" + key + "' in feature record", lineno);
    fields.emplace(key, std::make_pair(rest, lineno));
  }

  if (space.name_.empty()) space.name_ = "unnamed";
  if (raw.empty()) throw ParseError("document declares no features");

  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto& rf = raw[i];
    FeatureSpec f;
    f.name = rf.name;

    auto take = [&](const char* key) -> std::optional<std::pair<std::string, int>> {
      auto it = rf.fields.find(key);
      if (it == rf.fields.end()) return std::nullopt;
      auto v = it->second;
      rf.fields.erase(it);
      return v;
    };

    if (auto kind = take("kind")) {
      const std::string& k = kind->first;
      if (k == "continuous") f.kind = FeatureKind::continuous;
      else if (k == "integer") f.kind = FeatureKind::integer;
      else if (k == "categorical") f.kind = FeatureKind::categorical;
      else throw ParseError("unknown kind '" + k + "'", kind->second);
    }
    if (auto unit = take("unit")) f.unit = unit->first;

    if (auto dist = take("distribution")) {
      const auto words = split_ws(dist->first);
      if (words.empty()) throw ParseError("empty distribution", dist->second);
      if (words[0] == "uniform") {
        f.distribution = DistributionKind::uniform;
      } else if (words[0] == "fixed") {
        f.distribution = DistributionKind::fixed;
      } else if (words[0] == "power") {
        f.distribution = DistributionKind::power;
        if (words.size() != 2 || words[1].rfind("alpha=", 0) != 0)
          throw ParseError("power distribution requires 'alpha=<value>'", dist->second);
        f.power_alpha = std::strtod(words[1].c_str() + 6, nullptr);
        if (!(f.power_alpha > 0.0))
          throw ParseError("power distribution requires alpha > 0", dist->second);
      } else {
        throw ParseError("unknown distribution '" + words[0] + "'", dist->second);
      }
    }

    if (auto cats = take("categories")) {
      f.categories = split_ws(cats->first);
      if (f.categories.empty()) throw ParseError("empty category list", cats->second);
    }

    auto parse_expr = [&](const std::pair<std::string, int>& field) -> BoundExpr {
      try {
        return ExprParser(field.first, lookup, static_cast<int>(i)).parse_bound();
      } catch (const ParseError& e) {
        throw ParseError(std::string(e.what()), field.second);
      }
    };

    const auto value_field = take("value");
    const auto lower_field = take("lower");
    const auto upper_field = take("upper");

    if (f.kind == FeatureKind::categorical) {
      if (f.categories.empty())
        throw ParseError("categorical feature '" + f.name + "' needs categories", rf.line);
      if (value_field || lower_field || upper_field)
        throw ParseError("categorical feature '" + f.name + "' cannot have numeric bounds", rf.line);
      if (f.distribution != DistributionKind::uniform)
        throw ParseError("categorical feature '" + f.name + "' supports only uniform sampling", rf.line);
    } else {
      if (!f.categories.empty())
        throw ParseError("numeric feature '" + f.name + "' cannot have categories", rf.line);
      if (value_field) {
        if (lower_field || upper_field)
          throw ParseError("'value' excludes 'lower'/'upper'", value_field->second);
        f.lower = parse_expr(*value_field);
        f.upper = f.lower;
        f.distribution = DistributionKind::fixed;
      } else {
        if (!lower_field || !upper_field)
          throw ParseError("feature '" + f.name +
                               "' is unbounded; every numeric feature needs 'lower' and 'upper' "
                               "(or 'value')",
                           rf.line);
        f.lower = parse_expr(*lower_field);
        f.upper = parse_expr(*upper_field);
      }
      if (f.distribution == DistributionKind::fixed) {
        if (!f.lower.is_constant() || !f.upper.is_constant())
          throw ParseError("fixed feature '" + f.name + "' requires constant bounds", rf.line);
        if (f.lower.eval({}) != f.upper.eval({}))
          throw ParseError("fixed feature '" + f.name + "' requires lower == upper", rf.line);
      }
      if (f.distribution == DistributionKind::power && f.kind != FeatureKind::continuous)
        throw ParseError("power distribution requires a continuous feature", rf.line);
    }

    if (!rf.fields.empty())
      throw ParseError("unknown key '" + rf.fields.begin()->first + "' in feature record",
                       rf.fields.begin()->second.second);

    space.features_.push_back(std::move(f));
  }

  return space;
}

std::pair<double, double> DesignSpace::resolve_bounds(std::span<const double> partial,
                                                      int index) const {
  const FeatureSpec& f = features_.at(static_cast<std::size_t>(index));
  if (f.kind == FeatureKind::categorical)
    return {0.0, static_cast<double>(f.categories.size() - 1)};
  const int needed = std::max(f.lower.max_feature(), f.upper.max_feature());
  if (needed >= static_cast<int>(partial.size()))
    throw DataError("resolve_bounds: feature '" + f.name +
                    "' depends on values not present in the partial vector");
  const double lo = f.lower.eval(partial);
  const double hi = f.upper.eval(partial);
  if (lo > hi)
    throw DataError("degenerate bounds for '" + f.name + "': resolved lower " +
                    std::to_string(lo) + " > upper " + std::to_string(hi));
  return {lo, hi};
}

ValidationReport DesignSpace::validate(const DesignVector& x) const {
  if (static_cast<int>(x.size()) != dimension())
    throw DataError("validate: vector length " + std::to_string(x.size()) +
                    " does not match space dimension " + std::to_string(dimension()));
  ValidationReport report;
  for (int i = 0; i < dimension(); ++i) {
    const FeatureSpec& f = features_[static_cast<std::size_t>(i)];
    const double v = x[static_cast<std::size_t>(i)];
    double lo, hi;
    if (f.kind == FeatureKind::categorical) {
      lo = 0.0;
      hi = static_cast<double>(f.categories.size() - 1);
    } else {
      lo = f.lower.eval(std::span<const double>(x.data(), static_cast<std::size_t>(i)));
      hi = f.upper.eval(std::span<const double>(x.data(), static_cast<std::size_t>(i)));
      if (lo > hi) {
        report.violations.push_back({f.name, lo, hi, v, "empty resolved interval"});
        continue;
      }
    }
    constexpr double kTol = 1e-9;
    const double slack = kTol * std::max(1.0, std::abs(hi - lo));
    if (v < lo - slack || v > hi + slack) {
      report.violations.push_back({f.name, lo, hi, v, "outside bounds"});
      continue;
    }
    if (f.kind != FeatureKind::continuous && std::abs(v - std::round(v)) > 1e-9)
      report.violations.push_back({f.name, lo, hi, v, "not an integer"});
  }
  report.valid = report.violations.empty();
  return report;
}

DesignVector DesignSpace::normalize(const DesignVector& x) const {
  if (static_cast<int>(x.size()) != dimension())
    throw DataError("normalize: vector length does not match space dimension");
  DesignVector u(x.size());
  for (int i = 0; i < dimension(); ++i) {
    const FeatureSpec& f = features_[static_cast<std::size_t>(i)];
    const double v = x[static_cast<std::size_t>(i)];
    if (f.kind == FeatureKind::categorical) {
      const auto n = f.categories.size();
      u[static_cast<std::size_t>(i)] =
          n <= 1 ? 0.5 : v / static_cast<double>(n - 1);
      continue;
    }
    const auto prefix = std::span<const double>(x.data(), static_cast<std::size_t>(i));
    const double lo = f.lower.eval(prefix);
    const double hi = f.upper.eval(prefix);
    u[static_cast<std::size_t>(i)] =
        hi - lo <= kDegenerateTol ? 0.5 : (v - lo) / (hi - lo);
  }
  return u;
}

DesignVector DesignSpace::denormalize(const DesignVector& unit) const {
  if (static_cast<int>(unit.size()) != dimension())
    throw DataError("denormalize: vector length does not match space dimension");
  DesignVector x(unit.size());
  for (int i = 0; i < dimension(); ++i) {
    const FeatureSpec& f = features_[static_cast<std::size_t>(i)];
    const double u = unit[static_cast<std::size_t>(i)];
    if (f.kind == FeatureKind::categorical) {
      const auto n = f.categories.size();
      x[static_cast<std::size_t>(i)] =
          n <= 1 ? 0.0 : std::round(u * static_cast<double>(n - 1));
      continue;
    }
    const auto prefix = std::span<const double>(x.data(), static_cast<std::size_t>(i));
    const double lo = f.lower.eval(prefix);
    const double hi = f.upper.eval(prefix);
    double v = hi - lo <= kDegenerateTol ? lo : lo + u * (hi - lo);
    if (f.kind == FeatureKind::integer) v = std::round(v);
    x[static_cast<std::size_t>(i)] = v;
  }
  return x;
}

DesignSpace DesignSpace::with_bounds(std::string_view feature_name, double lo,
                                     double hi) const {
  const int idx = feature_index(feature_name);
  if (idx < 0) throw DataError("with_bounds: unknown feature '" + std::string(feature_name) + "'");
  const FeatureSpec& f = features_[static_cast<std::size_t>(idx)];
  if (f.kind == FeatureKind::categorical)
    throw DataError("with_bounds: cannot restrict categorical feature '" + f.name + "'");
  if (!f.lower.is_constant() || !f.upper.is_constant())
    throw DataError("with_bounds: feature '" + f.name + "' has dependent bounds");
  const double cur_lo = f.lower.eval({});
  const double cur_hi = f.upper.eval({});
  if (lo > hi || lo < cur_lo - 1e-12 || hi > cur_hi + 1e-12)
    throw DataError("with_bounds: [" + std::to_string(lo) + ", " + std::to_string(hi) +
                    "] is not contained in the bounds of '" + f.name + "'");
  DesignSpace out = *this;
  auto& g = out.features_[static_cast<std::size_t>(idx)];
  g.lower = BoundExpr{};
  g.lower.value.constant = lo;
  g.upper = BoundExpr{};
  g.upper.value.constant = hi;
  return out;
}

}  // namespace dsgen
