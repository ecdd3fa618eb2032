#pragma once

// Declarative radial functions f(r), r >= 0, built from a small set of atoms
// so that first and second derivatives come out exactly.
//
// JSON form (each object has exactly one key):
//   1.5                        constant
//   {"const": 1.5}             constant
//   {"pow": 4}                 r^4, integer exponent >= 0
//   {"gauss": 0.5}             exp(-0.5 r^2)
//   {"sum": [f, g, ...]}
//   {"product": [f, g, ...]}
//   {"quotient": [f, g]}       f / g

#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "curlwave/errors.hpp"
#include "curlwave/jet.hpp"

namespace curlwave {

class RadialExpr {
 public:
  enum class Kind { Const, Power, Gauss, Sum, Product, Quotient };

  RadialExpr() : RadialExpr(constant(0.0)) {}

  static RadialExpr constant(double c) { return RadialExpr(Node{Kind::Const, c, 0, {}}); }

  static RadialExpr power(int n) {
    if (n < 0) throw ConfigError("pow exponent must be a non-negative integer");
    return RadialExpr(Node{Kind::Power, 0.0, n, {}});
  }

  static RadialExpr gauss(double beta) {
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("gauss rate must be >= 0");
    return RadialExpr(Node{Kind::Gauss, beta, 0, {}});
  }

  static RadialExpr sum(std::vector<RadialExpr> terms) {
    if (terms.empty()) throw ConfigError("sum needs at least one term");
    return RadialExpr(Node{Kind::Sum, 0.0, 0, std::move(terms)});
  }

  static RadialExpr product(std::vector<RadialExpr> factors) {
    if (factors.empty()) throw ConfigError("product needs at least one factor");
    return RadialExpr(Node{Kind::Product, 0.0, 0, std::move(factors)});
  }

  static RadialExpr quotient(RadialExpr num, RadialExpr den) {
    return RadialExpr(Node{Kind::Quotient, 0.0, 0, {std::move(num), std::move(den)}});
  }

  Kind kind() const noexcept { return node_->kind; }

  /// f, f', f'' at r.
  Jet<double> jet(double r) const { return eval(Jet<double>::variable(r)); }
  double operator()(double r) const { return jet(r).v; }

  static RadialExpr from_json(const nlohmann::json& j) {
    if (j.is_number()) return constant(j.get<double>());
    if (!j.is_object() || j.size() != 1) {
      throw ConfigError("radial expression must be a number or a single-key object: " + j.dump());
    }
    const auto& [key, val] = *j.items().begin();
    auto list = [&](std::size_t min_size) {
      if (!val.is_array() || val.size() < min_size) {
        throw ConfigError("'" + key + "' expects an array of expressions");
      }
      std::vector<RadialExpr> out;
      for (const auto& e : val) out.push_back(from_json(e));
      return out;
    };
    if (key == "const") return constant(number(val, key));
    if (key == "pow") {
      if (!val.is_number_integer()) throw ConfigError("'pow' expects an integer exponent");
      return power(val.get<int>());
    }
    if (key == "gauss") return gauss(number(val, key));
    if (key == "sum") return sum(list(1));
    if (key == "product") return product(list(1));
    if (key == "quotient") {
      auto parts = list(2);
      if (parts.size() != 2) throw ConfigError("'quotient' expects exactly [numerator, denominator]");
      return quotient(parts[0], parts[1]);
    }
    throw ConfigError("unknown radial expression atom '" + key + "'");
  }

  nlohmann::json to_json() const {
    const Node& n = *node_;
    auto list = [&] {
      auto a = nlohmann::json::array();
      for (const auto& c : n.children) a.push_back(c.to_json());
      return a;
    };
    switch (n.kind) {
      case Kind::Const: return n.value;
      case Kind::Power: return {{"pow", n.n}};
      case Kind::Gauss: return {{"gauss", n.value}};
      case Kind::Sum: return {{"sum", list()}};
      case Kind::Product: return {{"product", list()}};
      case Kind::Quotient: return {{"quotient", list()}};
    }
    return nullptr;
  }

 private:
  struct Node {
    Kind kind;
    double value;
    int n;
    std::vector<RadialExpr> children;
  };

  explicit RadialExpr(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}

  static double number(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError("'" + key + "' expects a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError("'" + key + "' must be finite");
    return x;
  }

  Jet<double> eval(const Jet<double>& r) const {
    const Node& n = *node_;
    switch (n.kind) {
      case Kind::Const: return Jet<double>(n.value);
      case Kind::Power: return ipow(r, n.n);
      case Kind::Gauss: return exp(-n.value * r * r);
      case Kind::Sum: {
        Jet<double> acc(0.0);
        for (const auto& c : n.children) acc += c.eval(r);
        return acc;
      }
      case Kind::Product: {
        Jet<double> acc(1.0);
        for (const auto& c : n.children) acc *= c.eval(r);
        return acc;
      }
      case Kind::Quotient: return n.children[0].eval(r) / n.children[1].eval(r);
    }
    return Jet<double>(0.0);
  }

  std::shared_ptr<const Node> node_;
};

inline RadialExpr operator+(const RadialExpr& a, const RadialExpr& b) {
  return RadialExpr::sum({a, b});
}
inline RadialExpr operator*(const RadialExpr& a, const RadialExpr& b) {
  return RadialExpr::product({a, b});
}
inline RadialExpr operator/(const RadialExpr& a, const RadialExpr& b) {
  return RadialExpr::quotient(a, b);
}

}  // namespace curlwave
