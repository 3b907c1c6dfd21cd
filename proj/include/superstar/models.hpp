#pragma once

// Model specifications, the built-in super twistor models, fibration
// pullbacks, anti-chiral coordinates, Calabi-Yau indices and the end-to-end
// verifier.

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "superstar/atlas.hpp"
#include "superstar/expression.hpp"
#include "superstar/moyal.hpp"
#include "superstar/render.hpp"
#include "superstar/report.hpp"

namespace superstar {

/// Expected [a, b]_* (hbar included).
struct Relation {
  VarRef a;
  VarRef b;
  GradedPoly value;
  friend bool operator==(const Relation&, const Relation&) = default;
};

/// Lookup in a relation list; pairs given in the other order use graded
/// antisymmetry, missing pairs are zero.
inline GradedPoly relation_value(const std::vector<Relation>& rel, VarRef a, VarRef b) {
  for (const auto& r : rel) {
    if (r.a == a && r.b == b) return r.value;
    if (r.a == b && r.b == a) return r.value * Rational(-koszul_sign(a.parity, b.parity));
  }
  return {};
}

struct Fibration {
  std::vector<VarRef> base_variables;
  /// Bivector on the correspondence space; zero when the fibration is a map only.
  SuperBivector base_bivector;
  /// model variable -> polynomial in base variables (unmapped variables are shared)
  Substitution map;
  /// Expected supercommutators of mapped variables under the base star product.
  std::vector<Relation> relations;
  /// Fiber coordinate groups; group g measures the g-th weight component.
  std::vector<std::vector<VarRef>> fiber_groups;

  const GradedPoly* image(VarRef v) const {
    for (const auto& [w, p] : map)
      if (w == v) return &p;
    return nullptr;
  }
  friend bool operator==(const Fibration&, const Fibration&) = default;
};

/// x^mu -> x_R^mu + sum a^mu_{A Bdot} Theta^A Theta^Bdot.
struct AntiChiral {
  struct Shift {
    VarRef x;
    VarRef x_r;
    friend bool operator==(const Shift&, const Shift&) = default;
  };
  struct Coefficient {
    VarRef x;
    VarRef chiral;
    VarRef antichiral;
    Rational value;
    friend bool operator==(const Coefficient&, const Coefficient&) = default;
  };
  std::vector<Shift> shifts;
  std::vector<Coefficient> coefficients;
  friend bool operator==(const AntiChiral&, const AntiChiral&) = default;
};

/// Named polynomial that must vanish after the fibration map.
struct Identity {
  std::string name;
  GradedPoly expr;
  friend bool operator==(const Identity&, const Identity&) = default;
};

struct CYWeights {
  enum class Kind { projective, weighted, ambitwistor };
  Kind kind = Kind::projective;
  int n = 0;           // projective dimension
  int N = 0;           // odd dimension (projective, ambitwistor)
  std::vector<int> k;  // even weights (weighted)
  std::vector<int> l;  // odd weights (weighted)
  friend bool operator==(const CYWeights&, const CYWeights&) = default;
};

/// First Chern class coefficient(s); all zero iff Calabi-Yau.
inline std::vector<int> calabi_yau_index(const CYWeights& w) {
  switch (w.kind) {
    case CYWeights::Kind::projective:
      if (w.n < 0 || w.N < 0) throw Error("projective dimensions must be non-negative");
      return {w.n + 1 - w.N};
    case CYWeights::Kind::weighted: {
      if (w.k.empty()) throw Error("weighted projective space needs even weights");
      int s = 0;
      for (int x : w.k) s += x;
      for (int x : w.l) s -= x;
      return {s};
    }
    case CYWeights::Kind::ambitwistor:
      if (w.N < 0) throw Error("odd dimension must be non-negative");
      return {3 - w.N, 3 - w.N};
  }
  return {};
}

inline bool is_calabi_yau(const CYWeights& w) {
  const auto idx = calabi_yau_index(w);
  return std::all_of(idx.begin(), idx.end(), [](int x) { return x == 0; });
}

enum class Role { model, constant, base, chart, aux };

struct ModelSpec {
  std::string name;
  VariableTable table;
  /// Role of each table entry, indexed by VarIndex.
  std::vector<Role> roles;
  SuperBivector bivector;
  /// Non-empty lists are complete: unlisted generator pairs must commute.
  std::vector<Relation> relations;
  std::optional<Fibration> fibration;
  Atlas atlas;
  std::optional<AntiChiral> antichiral;
  std::vector<Identity> identities;
  std::optional<CYWeights> cy;
  DisplayAliases aliases;
  unsigned order = StarEngine::default_max_order;

  std::vector<VarRef> with_role(Role r) const {
    std::vector<VarRef> out;
    for (VarIndex i = 0; i < table.size(); ++i)
      if (roles.at(i) == r) out.push_back(table[i].ref());
    return out;
  }
  std::vector<VarRef> variables() const { return with_role(Role::model); }

  VarRef declare(const std::string& name, Parity p, Role role, bool invertible = false,
                 std::vector<int> weight = {}) {
    const VarRef v = table.add(name, p, invertible, std::move(weight));
    roles.push_back(role);
    return v;
  }

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

// ---------------------------------------------------------------------------
// Fibration pullback and anti-chiral coordinates

/// Supercommutators of all pairs of mapped variables, computed with the base
/// star product on the images.
inline std::vector<Relation> fibration_pullback(const ModelSpec& model, StarCache* cache = nullptr) {
  if (!model.fibration) throw MissingFibration("model '" + model.name + "' has no fibration");
  const Fibration& fib = *model.fibration;
  const StarEngine engine(fib.base_bivector, model.order);
  std::vector<Relation> out;
  for (std::size_t i = 0; i < fib.map.size(); ++i)
    for (std::size_t j = i; j < fib.map.size(); ++j) {
      const auto& [a, fa] = fib.map[i];
      const auto& [b, fb] = fib.map[j];
      out.push_back({a, b, supercommutator(engine, fa, fb, cache)});
    }
  return out;
}

/// Total degree of every term of `p` in `group`, or nullopt if not homogeneous.
inline std::optional<int> group_degree(const GradedPoly& p, const std::vector<VarRef>& group) {
  std::optional<int> deg;
  for (const auto& [m, c] : p.terms()) {
    int d = 0;
    for (const auto& v : group) d += is_odd(v.parity) ? m.has_odd(v.index) : m.exponent(v.index);
    if (deg && *deg != d) return std::nullopt;
    deg = d;
  }
  return deg.value_or(0);
}

/// f(x | Theta) with x -> x_R + a Theta Theta (direction +1) or the inverse
/// shift x_R -> x - a Theta Theta (direction -1).
inline GradedPoly anti_chiral_substitution(const AntiChiral& ac, const GradedPoly& f,
                                           const VariableTable& table, int direction = +1) {
  Substitution map;
  for (const auto& s : ac.shifts) {
    GradedPoly image = GradedPoly::var(direction > 0 ? s.x_r : s.x);
    for (const auto& c : ac.coefficients) {
      if (c.x != s.x) continue;
      image += GradedPoly::var(c.chiral) * GradedPoly::var(c.antichiral) *
               (direction > 0 ? c.value : Rational(-c.value));
    }
    map.emplace_back(direction > 0 ? s.x : s.x_r, image);
  }
  return substitute(f, map, table);
}

// ---------------------------------------------------------------------------
// Built-in models

namespace detail {

inline std::string idx(int a) { return std::to_string(a); }

/// Canonical name of the generic symmetric constant C^{i a, j b}, identified
/// under (i a, j b) ~ (j b, i a) ~ (i b, j a).
inline std::string c_name(int i, int a, int j, int b) {
  if (i > j) std::swap(i, j);
  if (a > b) std::swap(a, b);
  return "C" + idx(i) + idx(j) + "_" + idx(a) + idx(b);
}

struct Builder {
  ModelSpec m;

  explicit Builder(std::string name) { m.name = std::move(name); }

  VarRef var(const std::string& name, Parity p, Role role = Role::model, bool invertible = false,
             std::vector<int> weight = {}) {
    return m.declare(name, p, role, invertible, std::move(weight));
  }
  VarRef ref(const std::string& name) const { return m.table.ref(name); }
  GradedPoly expr(const std::string& text) const { return parse_expression(text, m.table); }

  void start_bivector() { m.bivector = SuperBivector(m.variables()); }
  void pi(const std::string& a, const std::string& b, const std::string& e) {
    m.bivector.set(ref(a), ref(b), expr(e));
  }
  void rel(const std::string& a, const std::string& b, const std::string& e) {
    m.relations.push_back({ref(a), ref(b), expr(e)});
  }
  VarRef constant(const std::string& name) {
    if (auto v = m.table.find(name)) return *v;
    return var(name, Parity::even, Role::constant);
  }
};

inline std::string ll_form(const std::string& c11, const std::string& c12, const std::string& c22,
                           const std::string& u, const std::string& w) {
  return c11 + "*" + u + "^2 + 2*" + c12 + "*" + u + "*" + w + " + " + c22 + "*" + w + "^2";
}

inline void cotangent_variables(Builder& b) {
  for (int al = 1; al <= 2; ++al)
    for (int a = 1; a <= 2; ++a) b.var("x" + idx(al) + idx(a), Parity::even);
  b.var("l1", Parity::even, Role::model, true);
  b.var("l2", Parity::even, Role::model, true);
  for (int i = 1; i <= 2; ++i)
    for (int a = 1; a <= 2; ++a) b.var("t" + idx(i) + idx(a), Parity::odd);
}

inline ModelSpec t0_cotangent() {
  Builder b("T0-cotangent");
  cotangent_variables(b);
  std::vector<std::string> xs{"11", "12", "21", "22"};
  for (std::size_t p = 0; p < xs.size(); ++p)
    for (std::size_t q = p + 1; q < xs.size(); ++q) b.constant("W" + xs[p] + "_" + xs[q]);
  for (std::size_t p = 0; p < xs.size(); ++p)
    for (std::size_t q = p; q < xs.size(); ++q) b.constant("O" + xs[p] + "_" + xs[q]);
  b.start_bivector();
  for (std::size_t p = 0; p < xs.size(); ++p)
    for (std::size_t q = p + 1; q < xs.size(); ++q) {
      const std::string w = "W" + xs[p] + "_" + xs[q];
      b.pi("x" + xs[p], "x" + xs[q], w);
      b.rel("x" + xs[p], "x" + xs[q], "hbar*" + w);
    }
  for (std::size_t p = 0; p < xs.size(); ++p)
    for (std::size_t q = p; q < xs.size(); ++q) {
      const std::string o = "O" + xs[p] + "_" + xs[q];
      b.pi("t" + xs[p], "t" + xs[q], o);
      b.rel("t" + xs[p], "t" + xs[q], "hbar*" + o);
    }
  return std::move(b.m);
}

inline ModelSpec t1_cotangent() {
  Builder b("T1-cotangent");
  cotangent_variables(b);
  std::vector<std::string> xs{"11", "12", "21", "22"};
  for (const auto& p : xs)
    for (const auto& q : xs) b.constant("M" + p + "_" + q);
  b.start_bivector();
  for (const auto& p : xs)
    for (const auto& q : xs) {
      b.pi("x" + p, "t" + q, "M" + p + "_" + q);
      b.rel("x" + p, "t" + q, "hbar*M" + p + "_" + q);
    }
  return std::move(b.m);
}

/// Chart pair U+ (divide by l1) and U- (divide by l2) over homogeneous
/// coordinates; `odd_weights` are the weights of the odd coordinates.
struct PlusMinusCharts {
  std::vector<std::string> even_plus, even_minus;  // w+^alpha, w-^alpha
  std::vector<std::string> odd_plus, odd_minus;    // xi+_i, xi-_i
};

inline void plus_minus_transitions(Builder& b, const PlusMinusCharts& c,
                                   const std::vector<int>& odd_weights) {
  auto build = [&](const std::string& from, const std::string& to, const std::string& ls,
                   const std::string& lt, const std::vector<std::string>& ef,
                   const std::vector<std::string>& et, const std::vector<std::string>& of,
                   const std::vector<std::string>& ot) {
    TransitionMap t;
    t.from = from;
    t.to = to;
    auto scaled = [](const std::string& v, const std::string& l, int w) {
      if (w == 0) return v;
      return v + "*" + l + "^-" + std::to_string(w);
    };
    for (std::size_t a = 0; a < ef.size(); ++a) t.rules.emplace_back(b.ref(et[a]), b.expr(scaled(ef[a], ls, 1)));
    t.rules.emplace_back(b.ref(lt), b.expr(ls + "^-1"));
    for (std::size_t i = 0; i < of.size(); ++i)
      t.rules.emplace_back(b.ref(ot[i]), b.expr(scaled(of[i], ls, odd_weights[i])));
    for (std::size_t a = 0; a < ef.size(); ++a) t.inverse.emplace_back(b.ref(ef[a]), b.expr(scaled(et[a], lt, 1)));
    t.inverse.emplace_back(b.ref(ls), b.expr(lt + "^-1"));
    for (std::size_t i = 0; i < of.size(); ++i)
      t.inverse.emplace_back(b.ref(of[i]), b.expr(scaled(ot[i], lt, odd_weights[i])));
    t.scale = b.ref(ls);
    b.m.atlas.transitions.push_back(std::move(t));
    // Weight laws: even pair and every odd pair.
    auto law = [&](const std::string& fa, const std::string& fb, const std::string& ta,
                   const std::string& tb, int w) {
      b.m.atlas.laws.push_back({from, to, b.ref(fa), b.ref(fb), b.ref(ta), b.ref(tb),
                                w == 0 ? GradedPoly(1) : b.expr(ls + "^-" + std::to_string(w))});
    };
    for (std::size_t a = 0; a < ef.size(); ++a)
      for (std::size_t a2 = a + 1; a2 < ef.size(); ++a2) law(ef[a], ef[a2], et[a], et[a2], 2);
    for (std::size_t i = 0; i < of.size(); ++i)
      for (std::size_t j = i; j < of.size(); ++j)
        law(of[i], of[j], ot[i], ot[j], odd_weights[i] + odd_weights[j]);
  };
  build("Uplus", "Uminus", "lp", "lm", c.even_plus, c.even_minus, c.odd_plus, c.odd_minus);
  build("Uminus", "Uplus", "lm", "lp", c.even_minus, c.even_plus, c.odd_minus, c.odd_plus);
  b.m.atlas.cycles.push_back({"Uplus", "Uminus"});
}

inline ModelSpec p3_4() {
  Builder b("P3|4");
  b.var("z1", Parity::even, Role::model, false, {1});
  b.var("z2", Parity::even, Role::model, false, {1});
  b.var("l1", Parity::even, Role::model, true);
  b.var("l2", Parity::even, Role::model, true);
  for (int i = 1; i <= 4; ++i) b.var("xi" + idx(i), Parity::odd, Role::model, false, {1});
  const std::vector<std::string> xs{"11", "12", "21", "22"};
  std::vector<std::string> dnames;
  for (std::size_t p = 0; p < xs.size(); ++p)
    for (std::size_t q = p + 1; q < xs.size(); ++q) {
      dnames.push_back("D" + xs[p] + "_" + xs[q]);
      b.constant(dnames.back());
    }
  for (int i = 1; i <= 4; ++i)
    for (int j = i; j <= 4; ++j)
      for (auto ab : {"11", "12", "22"}) b.constant("C" + idx(i) + idx(j) + "_" + ab);

  b.start_bivector();
  b.pi("z1", "z2", "2*l1*l2");
  for (int i = 1; i <= 4; ++i) b.pi("xi" + idx(i), "xi" + idx(i), "l1^2 + l2^2");
  b.rel("z1", "z2", "2*hbar*l1*l2");
  for (int i = 1; i <= 4; ++i) b.rel("xi" + idx(i), "xi" + idx(i), "hbar*(l1^2 + l2^2)");

  // Correspondence space (x, l | t) with generic constant brackets D and C.
  Fibration fib;
  for (const auto& x : xs) fib.base_variables.push_back(b.var("x" + x, Parity::even, Role::base));
  for (int i = 1; i <= 4; ++i)
    for (int a = 1; a <= 2; ++a)
      fib.base_variables.push_back(b.var("t" + idx(i) + idx(a), Parity::odd, Role::base));
  fib.base_bivector = SuperBivector(fib.base_variables);
  for (std::size_t p = 0; p < xs.size(); ++p)
    for (std::size_t q = p + 1; q < xs.size(); ++q)
      fib.base_bivector.set(b.ref("x" + xs[p]), b.ref("x" + xs[q]), b.expr("D" + xs[p] + "_" + xs[q]));
  for (int i = 1; i <= 4; ++i)
    for (int a = 1; a <= 2; ++a)
      for (int j = 1; j <= 4; ++j)
        for (int c = 1; c <= 2; ++c) {
          if (std::make_pair(i, a) > std::make_pair(j, c)) continue;
          fib.base_bivector.set(b.ref("t" + idx(i) + idx(a)), b.ref("t" + idx(j) + idx(c)),
                                b.expr(c_name(i, a, j, c)));
        }
  fib.map.emplace_back(b.ref("z1"), b.expr("x11*l1 + x12*l2"));
  fib.map.emplace_back(b.ref("z2"), b.expr("x21*l1 + x22*l2"));
  for (int i = 1; i <= 4; ++i)
    fib.map.emplace_back(b.ref("xi" + idx(i)),
                         b.expr("t" + idx(i) + "1*l1 + t" + idx(i) + "2*l2"));
  fib.relations.push_back({b.ref("z1"), b.ref("z2"),
                           b.expr("hbar*(D11_21*l1^2 + D11_22*l1*l2 + D12_21*l1*l2 + D12_22*l2^2)")});
  for (int i = 1; i <= 4; ++i)
    for (int j = i; j <= 4; ++j) {
      const std::string c = "C" + idx(i) + idx(j) + "_";
      fib.relations.push_back({b.ref("xi" + idx(i)), b.ref("xi" + idx(j)),
                               b.expr("hbar*(" + ll_form(c + "11", c + "12", c + "22", "l1", "l2") + ")")});
    }
  fib.fiber_groups.push_back({b.ref("l1"), b.ref("l2")});
  b.m.fibration = std::move(fib);

  // Two charts of the P^1 base.
  PlusMinusCharts names;
  for (const char* side : {"p", "m"}) {
    Chart ch;
    ch.name = side[0] == 'p' ? "Uplus" : "Uminus";
    const std::string s(side);
    const std::string l = "l" + s;
    const std::string div = side[0] == 'p' ? "l1" : "l2";
    auto& ev = side[0] == 'p' ? names.even_plus : names.even_minus;
    auto& od = side[0] == 'p' ? names.odd_plus : names.odd_minus;
    for (int al = 1; al <= 2; ++al) {
      ev.push_back("w" + s + idx(al));
      ch.variables.push_back(b.var(ev.back(), Parity::even, Role::chart, false, {1}));
    }
    ch.variables.push_back(b.var(l, Parity::even, Role::chart, true));
    for (int i = 1; i <= 4; ++i) {
      od.push_back("x" + s + idx(i));
      ch.variables.push_back(b.var(od.back(), Parity::odd, Role::chart, false, {1}));
    }
    // Affine coordinate u: lp on U+ multiplies l2-components, lm on U- the l1 ones.
    const std::string u1 = side[0] == 'p' ? "1" : l;
    const std::string u2 = side[0] == 'p' ? l : "1";
    auto form = [&](const std::string& c11, const std::string& c12, const std::string& c22,
                    bool doubled) {
      const std::string two = doubled ? "2*" : "";
      return c11 + "*" + u1 + "^2 + " + two + c12 + "*" + u1 + "*" + u2 + " + " + c22 + "*" + u2 + "^2";
    };
    ch.table.set(b.ref(ev[0]), b.ref(ev[1]),
                 b.expr(form("D11_21", "(D11_22 + D12_21)", "D12_22", false)));
    for (int i = 1; i <= 4; ++i)
      for (int j = i; j <= 4; ++j) {
        const std::string c = "C" + idx(i) + idx(j) + "_";
        ch.table.set(b.ref(od[i - 1]), b.ref(od[j - 1]), b.expr(form(c + "11", c + "12", c + "22", true)));
      }
    for (int al = 1; al <= 2; ++al)
      ch.embedding.emplace_back(b.ref(ev[al - 1]),
                                b.expr("(x" + idx(al) + "1*l1 + x" + idx(al) + "2*l2)*" + div + "^-1"));
    ch.embedding.emplace_back(b.ref(l), b.expr(side[0] == 'p' ? "l2*l1^-1" : "l1*l2^-1"));
    for (int i = 1; i <= 4; ++i)
      ch.embedding.emplace_back(b.ref(od[i - 1]),
                                b.expr("(t" + idx(i) + "1*l1 + t" + idx(i) + "2*l2)*" + div + "^-1"));
    b.m.atlas.charts.push_back(std::move(ch));
  }
  plus_minus_transitions(b, names, {1, 1, 1, 1});
  b.m.cy = CYWeights{CYWeights::Kind::projective, 3, 4, {}, {}};
  b.m.aliases = {{b.ref("l1").index, "λ1"}, {b.ref("l2").index, "λ2"}};
  for (int i = 1; i <= 4; ++i) b.m.aliases[b.ref("xi" + idx(i)).index] = "ξ" + idx(i);
  return std::move(b.m);
}

/// All index words of length n over {1, 2}.
inline std::vector<std::string> index_words(int n) {
  std::vector<std::string> out{""};
  for (int k = 0; k < n; ++k) {
    std::vector<std::string> next;
    for (const auto& w : out) {
      next.push_back(w + "1");
      next.push_back(w + "2");
    }
    out = std::move(next);
  }
  return out;
}

inline ModelSpec weighted(int p, int q) {
  Builder b("WP[" + idx(p) + "," + idx(q) + "]");
  const std::vector<int> w{p, q};
  b.var("z1", Parity::even, Role::model, false, {1});
  b.var("z2", Parity::even, Role::model, false, {1});
  b.var("l1", Parity::even, Role::model, true);
  b.var("l2", Parity::even, Role::model, true);
  b.var("xi1", Parity::odd, Role::model, false, {p});
  b.var("xi2", Parity::odd, Role::model, false, {q});
  b.start_bivector();
  b.pi("z1", "z2", "2*l1*l2");
  b.rel("z1", "z2", "2*hbar*l1*l2");
  for (int i = 1; i <= 2; ++i) {
    const std::string k = w[i - 1] == 0 ? "1" : "(l1^2 + l2^2)^" + idx(w[i - 1]);
    b.pi("xi" + idx(i), "xi" + idx(i), k);
    b.rel("xi" + idx(i), "xi" + idx(i), "hbar*" + k);
  }

  // Correspondence space: xi_i = theta_i^{a_1..a_w} l_{a_1}..l_{a_w}.
  Fibration fib;
  for (int al = 1; al <= 2; ++al)
    for (int a = 1; a <= 2; ++a)
      fib.base_variables.push_back(b.var("x" + idx(al) + idx(a), Parity::even, Role::base));
  for (int i = 1; i <= 2; ++i)
    for (const auto& word : index_words(w[i - 1]))
      fib.base_variables.push_back(
          b.var("th" + idx(i) + (word.empty() ? "" : "_" + word), Parity::odd, Role::base));
  fib.base_bivector = SuperBivector(fib.base_variables);
  fib.map.emplace_back(b.ref("z1"), b.expr("x11*l1 + x12*l2"));
  fib.map.emplace_back(b.ref("z2"), b.expr("x21*l1 + x22*l2"));
  for (int i = 1; i <= 2; ++i) {
    std::string image;
    for (const auto& word : index_words(w[i - 1])) {
      if (!image.empty()) image += " + ";
      image += "th" + idx(i) + (word.empty() ? "" : "_" + word);
      for (char c : word) image += std::string("*l") + c;
    }
    fib.map.emplace_back(b.ref("xi" + idx(i)), b.expr(image));
  }
  fib.fiber_groups.push_back({b.ref("l1"), b.ref("l2")});
  b.m.fibration = std::move(fib);

  PlusMinusCharts names;
  for (const char* side : {"p", "m"}) {
    Chart ch;
    const bool plus = side[0] == 'p';
    ch.name = plus ? "Uplus" : "Uminus";
    const std::string s(side);
    const std::string l = "l" + s;
    const std::string div = plus ? "l1" : "l2";
    auto& ev = plus ? names.even_plus : names.even_minus;
    auto& od = plus ? names.odd_plus : names.odd_minus;
    for (int al = 1; al <= 2; ++al) {
      ev.push_back("w" + s + idx(al));
      ch.variables.push_back(b.var(ev.back(), Parity::even, Role::chart, false, {1}));
    }
    ch.variables.push_back(b.var(l, Parity::even, Role::chart, true));
    for (int i = 1; i <= 2; ++i) {
      od.push_back("x" + s + idx(i));
      ch.variables.push_back(b.var(od.back(), Parity::odd, Role::chart, false, {w[i - 1]}));
    }
    ch.table.set(b.ref(ev[0]), b.ref(ev[1]), b.expr("2*" + l));
    for (int i = 1; i <= 2; ++i) {
      const std::string k = w[i - 1] == 0 ? "1" : "(1 + " + l + "^2)^" + idx(w[i - 1]);
      ch.table.set(b.ref(od[i - 1]), b.ref(od[i - 1]), b.expr(k));
    }
    for (int al = 1; al <= 2; ++al)
      ch.embedding.emplace_back(b.ref(ev[al - 1]), b.expr("z" + idx(al) + "*" + div + "^-1"));
    ch.embedding.emplace_back(b.ref(l), b.expr(plus ? "l2*l1^-1" : "l1*l2^-1"));
    for (int i = 1; i <= 2; ++i)
      ch.embedding.emplace_back(
          b.ref(od[i - 1]),
          b.expr(w[i - 1] == 0 ? "xi" + idx(i) : "xi" + idx(i) + "*" + div + "^-" + idx(w[i - 1])));
    b.m.atlas.charts.push_back(std::move(ch));
  }
  plus_minus_transitions(b, names, w);
  b.m.cy = CYWeights{CYWeights::Kind::weighted, 0, 0, {1, 1, 1, 1}, {p, q}};
  b.m.aliases = {{b.ref("l1").index, "λ1"}, {b.ref("l2").index, "λ2"},
                 {b.ref("xi1").index, "ξ1"}, {b.ref("xi2").index, "ξ2"}};
  return std::move(b.m);
}

inline ModelSpec l5_6() {
  Builder b("L5|6");
  b.var("X1", Parity::even, Role::model, false, {1, 0});
  b.var("X2", Parity::even, Role::model, false, {1, 0});
  b.var("l1", Parity::even, Role::model, true);
  b.var("l2", Parity::even, Role::model, true);
  b.var("Y1", Parity::even, Role::model, false, {0, 1});
  b.var("Y2", Parity::even, Role::model, false, {0, 1});
  b.var("mu1", Parity::even, Role::model, true);
  b.var("mu2", Parity::even, Role::model, true);
  for (int i = 1; i <= 3; ++i) b.var("xi" + idx(i), Parity::odd, Role::model, false, {1, 0});
  for (int i = 1; i <= 3; ++i) b.var("zeta" + idx(i), Parity::odd, Role::model, false, {0, 1});

  b.start_bivector();
  b.pi("X1", "X2", "2*l1*l2");
  b.pi("X1", "Y1", "l2*mu2");
  b.pi("X1", "Y2", "l1*mu2");
  b.pi("X2", "Y1", "-l2*mu1");
  b.pi("X2", "Y2", "-l1*mu1");
  for (int i = 1; i <= 3; ++i) {
    b.pi("xi" + idx(i), "xi" + idx(i), "l1^2 + l2^2");
    b.pi("zeta" + idx(i), "zeta" + idx(i), "mu1^2 + mu2^2");
  }
  b.rel("X1", "Y1", "hbar*l2*mu2");
  b.rel("X1", "Y2", "hbar*l1*mu2");
  b.rel("X2", "Y1", "-hbar*l2*mu1");
  b.rel("X2", "Y2", "-hbar*l1*mu1");
  for (int i = 1; i <= 3; ++i) b.rel("xi" + idx(i), "xi" + idx(i), "hbar*(l1^2 + l2^2)");
  for (int i = 1; i <= 3; ++i) b.rel("zeta" + idx(i), "zeta" + idx(i), "hbar*(mu1^2 + mu2^2)");
  b.rel("X1", "X2", "2*hbar*l1*l2");
  b.rel("Y1", "Y2", "0");

  // Correspondence space (x, l, mu | theta, eta).
  Fibration fib;
  for (int al = 1; al <= 2; ++al)
    for (int a = 1; a <= 2; ++a)
      fib.base_variables.push_back(b.var("x" + idx(al) + idx(a), Parity::even, Role::base));
  for (int i = 1; i <= 3; ++i)
    for (int a = 1; a <= 2; ++a)
      fib.base_variables.push_back(b.var("th" + idx(i) + idx(a), Parity::odd, Role::base));
  for (int i = 1; i <= 3; ++i)
    for (int al = 1; al <= 2; ++al)
      fib.base_variables.push_back(b.var("et" + idx(i) + idx(al), Parity::odd, Role::base));
  fib.base_bivector = SuperBivector(fib.base_variables);
  for (int al = 1; al <= 2; ++al) {
    std::string e;
    for (int a = 1; a <= 2; ++a) {
      e += (a > 1 ? " + (x" : "(x") + idx(al) + idx(a);
      for (int i = 1; i <= 3; ++i) e += " - et" + idx(i) + idx(al) + "*th" + idx(i) + idx(a);
      e += ")*l" + idx(a);
    }
    fib.map.emplace_back(b.ref("X" + idx(al)), b.expr(e));
  }
  for (int a = 1; a <= 2; ++a) {
    std::string e;
    for (int al = 1; al <= 2; ++al) {
      e += (al > 1 ? " + (x" : "(x") + idx(al) + idx(a);
      for (int i = 1; i <= 3; ++i) e += " + th" + idx(i) + idx(a) + "*et" + idx(i) + idx(al);
      e += ")*mu" + idx(al);
    }
    fib.map.emplace_back(b.ref("Y" + idx(a)), b.expr(e));
  }
  for (int i = 1; i <= 3; ++i)
    fib.map.emplace_back(b.ref("xi" + idx(i)),
                         b.expr("th" + idx(i) + "1*l1 + th" + idx(i) + "2*l2"));
  for (int i = 1; i <= 3; ++i)
    fib.map.emplace_back(b.ref("zeta" + idx(i)),
                         b.expr("et" + idx(i) + "1*mu1 + et" + idx(i) + "2*mu2"));
  fib.fiber_groups.push_back({b.ref("l1"), b.ref("l2")});
  fib.fiber_groups.push_back({b.ref("mu1"), b.ref("mu2")});
  b.m.fibration = std::move(fib);
  b.m.identities.push_back(
      {"ideal", b.expr("X1*mu1 + X2*mu2 - Y1*l1 - Y2*l2 + 2*(xi1*zeta1 + xi2*zeta2 + xi3*zeta3)")});

  // Anti-chiral coordinates: x_R = x - sum ka*th - sum kb*et.
  AntiChiral ac;
  for (int al = 1; al <= 2; ++al)
    for (int a = 1; a <= 2; ++a) {
      const VarRef xu = b.var("xu" + idx(al) + idx(a), Parity::even, Role::aux);
      ac.shifts.push_back({xu, b.ref("x" + idx(al) + idx(a))});
    }
  for (int i = 1; i <= 3; ++i)
    for (int al = 1; al <= 2; ++al) b.var("ka" + idx(i) + idx(al), Parity::odd, Role::aux);
  for (int i = 1; i <= 3; ++i)
    for (int a = 1; a <= 2; ++a) b.var("kb" + idx(i) + idx(a), Parity::odd, Role::aux);
  for (int al = 1; al <= 2; ++al)
    for (int a = 1; a <= 2; ++a) {
      const VarRef xu = b.ref("xu" + idx(al) + idx(a));
      for (int i = 1; i <= 3; ++i) {
        ac.coefficients.push_back(
            {xu, b.ref("ka" + idx(i) + idx(al)), b.ref("th" + idx(i) + idx(a)), Rational(1)});
        ac.coefficients.push_back(
            {xu, b.ref("kb" + idx(i) + idx(a)), b.ref("et" + idx(i) + idx(al)), Rational(1)});
      }
    }
  b.m.antichiral = std::move(ac);
  b.m.cy = CYWeights{CYWeights::Kind::ambitwistor, 0, 3, {}, {}};
  b.m.aliases = {{b.ref("l1").index, "λ1"}, {b.ref("l2").index, "λ2"},
                 {b.ref("mu1").index, "μ1"}, {b.ref("mu2").index, "μ2"}};
  for (int i = 1; i <= 3; ++i) {
    b.m.aliases[b.ref("xi" + idx(i)).index] = "ξ" + idx(i);
    b.m.aliases[b.ref("zeta" + idx(i)).index] = "ζ" + idx(i);
  }
  return std::move(b.m);
}

inline ModelSpec p3_n(int n) {
  if (n < 1) throw UnknownModel("P3|N needs N >= 1");
  Builder b("P3|N=" + idx(n));
  for (int k = 1; k <= 4; ++k) b.var("z" + idx(k), Parity::even, Role::model, true, {1});
  for (int i = 1; i <= n; ++i) b.var("xi" + idx(i), Parity::odd, Role::model, false, {1});
  for (int i = 1; i <= n; ++i)
    for (int j = i; j <= n; ++j)
      for (auto ab : {"11", "12", "22"}) b.constant("C" + idx(i) + idx(j) + "_" + ab);
  auto cform = [&](int i, int j, const std::string& u, const std::string& w) {
    const std::string c = "C" + idx(i) + idx(j) + "_";
    return ll_form(c + "11", c + "12", c + "22", u, w);
  };
  b.start_bivector();
  for (int i = 1; i <= n; ++i)
    for (int j = i; j <= n; ++j) {
      b.pi("xi" + idx(i), "xi" + idx(j), cform(i, j, "z3", "z4"));
      b.rel("xi" + idx(i), "xi" + idx(j), "hbar*(" + cform(i, j, "z3", "z4") + ")");
    }

  // Correspondence space with z3, z4 as the fiber coordinates.
  Fibration fib;
  for (int al = 1; al <= 2; ++al)
    for (int a = 1; a <= 2; ++a)
      fib.base_variables.push_back(b.var("x" + idx(al) + idx(a), Parity::even, Role::base));
  for (int i = 1; i <= n; ++i)
    for (int a = 1; a <= 2; ++a)
      fib.base_variables.push_back(b.var("t" + idx(i) + idx(a), Parity::odd, Role::base));
  fib.base_bivector = SuperBivector(fib.base_variables);
  for (int i = 1; i <= n; ++i)
    for (int a = 1; a <= 2; ++a)
      for (int j = 1; j <= n; ++j)
        for (int c = 1; c <= 2; ++c) {
          if (std::make_pair(i, a) > std::make_pair(j, c)) continue;
          fib.base_bivector.set(b.ref("t" + idx(i) + idx(a)), b.ref("t" + idx(j) + idx(c)),
                                b.expr(c_name(i, a, j, c)));
        }
  fib.map.emplace_back(b.ref("z1"), b.expr("x11*z3 + x12*z4"));
  fib.map.emplace_back(b.ref("z2"), b.expr("x21*z3 + x22*z4"));
  for (int i = 1; i <= n; ++i)
    fib.map.emplace_back(b.ref("xi" + idx(i)), b.expr("t" + idx(i) + "1*z3 + t" + idx(i) + "2*z4"));
  for (int i = 1; i <= n; ++i)
    for (int j = i; j <= n; ++j)
      fib.relations.push_back(
          {b.ref("xi" + idx(i)), b.ref("xi" + idx(j)), b.expr("hbar*(" + cform(i, j, "z3", "z4") + ")")});
  fib.fiber_groups.push_back({b.ref("z3"), b.ref("z4")});
  b.m.fibration = std::move(fib);

  // Affine charts U_k: z_k^m = z_m / z_k, xi_k^i = xi_i / z_k.
  auto zn = [](int k, int m) { return "z" + idx(k) + "_" + idx(m); };
  auto xn = [](int k, int i) { return "xi" + idx(k) + "_" + idx(i); };
  for (int k = 1; k <= 4; ++k) {
    Chart ch;
    ch.name = "U" + idx(k);
    for (int m = 1; m <= 4; ++m)
      if (m != k) ch.variables.push_back(b.var(zn(k, m), Parity::even, Role::chart, true, {0}));
    for (int i = 1; i <= n; ++i)
      ch.variables.push_back(b.var(xn(k, i), Parity::odd, Role::chart, false, {1}));
    const std::string r3 = k == 3 ? "1" : zn(k, 3);
    const std::string r4 = k == 4 ? "1" : zn(k, 4);
    for (int i = 1; i <= n; ++i)
      for (int j = i; j <= n; ++j) ch.table.set(b.ref(xn(k, i)), b.ref(xn(k, j)), b.expr(cform(i, j, r3, r4)));
    for (int m = 1; m <= 4; ++m)
      if (m != k) ch.embedding.emplace_back(b.ref(zn(k, m)), b.expr("z" + idx(m) + "*z" + idx(k) + "^-1"));
    for (int i = 1; i <= n; ++i)
      ch.embedding.emplace_back(b.ref(xn(k, i)), b.expr("xi" + idx(i) + "*z" + idx(k) + "^-1"));
    b.m.atlas.charts.push_back(std::move(ch));
  }
  for (int l = 1; l <= 4; ++l)
    for (int k = 1; k <= 4; ++k) {
      if (k == l) continue;
      // U_l -> U_k, scale z_l^k.
      TransitionMap t;
      t.from = "U" + idx(l);
      t.to = "U" + idx(k);
      for (int m = 1; m <= 4; ++m) {
        if (m == k) continue;
        if (m == l)
          t.rules.emplace_back(b.ref(zn(k, l)), b.expr(zn(l, k) + "^-1"));
        else
          t.rules.emplace_back(b.ref(zn(k, m)), b.expr(zn(l, m) + "*" + zn(l, k) + "^-1"));
      }
      for (int i = 1; i <= n; ++i)
        t.rules.emplace_back(b.ref(xn(k, i)), b.expr(xn(l, i) + "*" + zn(l, k) + "^-1"));
      for (int m = 1; m <= 4; ++m) {
        if (m == l) continue;
        if (m == k)
          t.inverse.emplace_back(b.ref(zn(l, k)), b.expr(zn(k, l) + "^-1"));
        else
          t.inverse.emplace_back(b.ref(zn(l, m)), b.expr(zn(k, m) + "*" + zn(k, l) + "^-1"));
      }
      for (int i = 1; i <= n; ++i)
        t.inverse.emplace_back(b.ref(xn(l, i)), b.expr(xn(k, i) + "*" + zn(k, l) + "^-1"));
      t.scale = b.ref(zn(l, k));
      b.m.atlas.transitions.push_back(std::move(t));
    }
  for (int k = 1; k <= 4; ++k)
    for (int l = k + 1; l <= 4; ++l)
      for (int i = 1; i <= n; ++i)
        for (int j = i; j <= n; ++j)
          b.m.atlas.laws.push_back({"U" + idx(l), "U" + idx(k), b.ref(xn(l, i)), b.ref(xn(l, j)),
                                    b.ref(xn(k, i)), b.ref(xn(k, j)), b.expr(zn(l, k) + "^-2")});
  for (int a = 1; a <= 4; ++a)
    for (int c = a + 1; c <= 4; ++c)
      for (int d = c + 1; d <= 4; ++d) {
        b.m.atlas.cycles.push_back({"U" + idx(a), "U" + idx(c), "U" + idx(d)});
        b.m.atlas.cycles.push_back({"U" + idx(a), "U" + idx(d), "U" + idx(c)});
      }
  b.m.cy = CYWeights{CYWeights::Kind::projective, 3, n, {}, {}};
  return std::move(b.m);
}

}  // namespace detail

inline std::vector<std::string> builtin_names() {
  return {"T0-cotangent", "T1-cotangent", "P3|4",  "WP[1,3]",
          "WP[2,2]",      "WP[4,0]",      "L5|6",  "P3|N"};
}

/// Built-in model by name; "P3|N" is N = 4, "P3|N=k" selects N = k.
inline ModelSpec builtin(const std::string& name) {
  if (name == "T0-cotangent") return detail::t0_cotangent();
  if (name == "T1-cotangent") return detail::t1_cotangent();
  if (name == "P3|4") return detail::p3_4();
  if (name == "WP[1,3]") return detail::weighted(1, 3);
  if (name == "WP[2,2]") return detail::weighted(2, 2);
  if (name == "WP[4,0]") return detail::weighted(4, 0);
  if (name == "L5|6") return detail::l5_6();
  if (name == "P3|N") return detail::p3_n(4);
  if (name.rfind("P3|N=", 0) == 0) {
    const std::string digits = name.substr(5);
    if (!digits.empty() && digits.size() <= 2 &&
        std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
      return detail::p3_n(std::stoi(digits));
  }
  throw UnknownModel("unknown built-in model '" + name + "'");
}

// ---------------------------------------------------------------------------
// Verification

struct VerifyOptions {
  ContractOptions contract;
  /// Sign conventions of every star engine the verifier builds.
  KoszulConvention convention;
  bool use_aliases = false;
};

struct BracketProperty {
  std::string name;
  bool passed = true;
  std::size_t cases = 0;
  std::string detail{};
};

/// Graded antisymmetry, Jacobi and Leibniz of the bracket of `pi` (parity p)
/// on all coordinate pairs and triples:
///   {a,b} = -(-1)^{(|a|+p)(|b|+p)} {b,a}
///   {a,{b,c}} = {{a,b},c} + (-1)^{(|a|+p)(|b|+p)} {b,{a,c}}
///   {a,bc} = {a,b}c + (-1)^{(|a|+p)|b|} b{a,c}
inline std::vector<BracketProperty> check_bracket_properties(const SuperBivector& pi,
                                                             const std::vector<VarRef>& coords,
                                                             const VariableTable& table) {
  const Parity p = pi.parity();
  auto B = [&](const GradedPoly& f, const GradedPoly& g) { return poisson_bracket(pi, f, g); };
  auto sign = [](Parity x, Parity y) { return Rational(koszul_sign(x, y)); };
  BracketProperty anti{.name = "antisymmetry"}, jacobi{.name = "jacobi"}, leibniz{.name = "leibniz"};
  auto name = [&](VarRef v) { return table.name(v.index); };
  for (const auto& a : coords) {
    const GradedPoly A = GradedPoly::var(a);
    for (const auto& b : coords) {
      const GradedPoly Bv = GradedPoly::var(b);
      ++anti.cases;
      if (anti.passed && !(B(A, Bv) == B(Bv, A) * -sign(a.parity + p, b.parity + p))) {
        anti.passed = false;
        anti.detail = "fails for (" + name(a) + ", " + name(b) + ")";
      }
      const GradedPoly ab = B(A, Bv);
      for (const auto& c : coords) {
        const GradedPoly C = GradedPoly::var(c);
        ++jacobi.cases;
        ++leibniz.cases;
        const Rational s = sign(a.parity + p, b.parity + p);
        if (jacobi.passed && !(B(A, B(Bv, C)) == B(ab, C) + B(Bv, B(A, C)) * s)) {
          jacobi.passed = false;
          jacobi.detail = "fails for (" + name(a) + ", " + name(b) + ", " + name(c) + ")";
        }
        const Rational t = sign(a.parity + p, b.parity);
        if (leibniz.passed && !(B(A, Bv * C) == ab * C + Bv * B(A, C) * t)) {
          leibniz.passed = false;
          leibniz.detail = "fails for (" + name(a) + ", " + name(b) + ", " + name(c) + ")";
        }
      }
    }
  }
  return {anti, jacobi, leibniz};
}

namespace detail {

class Verifier {
 public:
  Verifier(const ModelSpec& m, const VerifyOptions& opt) : m_(m), opt_(opt) {
    report_.model = m.name;
  }

  VerificationReport run() {
    poisson_and_relations();
    bracket_properties();
    fibration();
    atlas();
    antichiral();
    calabi_yau();
    return std::move(report_);
  }

 private:
  std::string R(const GradedPoly& p) const {
    return render(p, m_.table, opt_.use_aliases ? &m_.aliases : nullptr);
  }
  std::string N(VarRef v) const {
    if (opt_.use_aliases)
      if (auto it = m_.aliases.find(v.index); it != m_.aliases.end()) return it->second;
    return m_.table.name(v.index);
  }
  std::string pair_label(VarRef a, VarRef b) const {
    return std::string(is_odd(a.parity) && is_odd(b.parity) ? "anti " : "comm ") + N(a) + " " + N(b);
  }
  void add(std::string id, std::string cat, Status s, std::string lhs, std::string rhs,
           std::string detail = {}) {
    report_.records.push_back(
        {std::move(id), std::move(cat), s, std::move(lhs), std::move(rhs), std::move(detail)});
  }
  void add(std::string id, std::string cat, bool ok, std::string lhs, std::string rhs,
           std::string detail = {}) {
    add(std::move(id), std::move(cat), ok ? Status::pass : Status::fail, std::move(lhs),
        std::move(rhs), ok ? std::string{} : std::move(detail));
  }

  /// Compares [a, b]_* with the expectation, or records the error.
  void relation_check(const std::string& id, const std::string& cat, const StarEngine& engine,
                      StarCache& cache, VarRef a, VarRef b, const GradedPoly& fa,
                      const GradedPoly& fb, const GradedPoly& expected,
                      const std::string& prefix = {}) {
    try {
      const GradedPoly got = supercommutator(engine, fa, fb, &cache);
      add(id, cat, got == expected, prefix + pair_label(a, b), R(expected), "got " + R(got));
    } catch (const Error& e) {
      add(id, cat, Status::fail, prefix + pair_label(a, b), R(expected), e.what());
    }
  }

  void poisson_and_relations() {
    const auto vars = m_.variables();
    try {
      const SuperTrivector t = schouten_bracket(m_.bivector, m_.bivector);
      add("poisson", "poisson", t.is_zero(), "[pi,pi]", "0",
          std::to_string(t.entries().size()) + " nonzero trivector components");
    } catch (const Error& e) {
      add("poisson", "poisson", Status::fail, "[pi,pi]", "0", e.what());
    }
    std::optional<StarEngine> engine;
    try {
      engine.emplace(m_.bivector, m_.order, opt_.convention);
      add("engine", "engine", Status::pass, "star engine", "central");
    } catch (const Error& e) {
      add("engine", "engine", Status::fail, "star engine", "central", e.what());
    }
    engine_ = std::move(engine);
    if (!m_.relations.empty()) {
      for (std::size_t i = 0; i < vars.size(); ++i)
        for (std::size_t j = i; j < vars.size(); ++j) {
          const VarRef a = vars[i], b = vars[j];
          const std::string id = "relation:" + m_.table.name(a.index) + "," + m_.table.name(b.index);
          const GradedPoly expected = relation_value(m_.relations, a, b);
          if (!engine_) {
            add(id, "relation", Status::skip, pair_label(a, b), R(expected), "no star engine");
            continue;
          }
          relation_check(id, "relation", *engine_, cache_, a, b, GradedPoly::var(a),
                         GradedPoly::var(b), expected);
        }
    }
    if (!engine_) {
      for (const char* n : {"bilinearity", "associativity", "first-order"})
        add(std::string("contract:") + n, "contract", Status::skip, std::string("contract ") + n,
            "holds", "no star engine");
      return;
    }
    const ContractReport c = check_quantization_contract(*engine_, opt_.contract, &m_.table);
    for (const auto& check : c.checks)
      add("contract:" + check.name, "contract", check.passed ? Status::pass : Status::fail,
          "contract " + check.name, "holds",
          std::to_string(check.cases) + " cases" + (check.detail.empty() ? "" : "; " + check.detail));
  }

  void bracket_properties() {
    for (const auto& p : check_bracket_properties(m_.bivector, m_.variables(), m_.table))
      add("bracket:" + p.name, "bracket", p.passed, "bracket " + p.name, "holds", p.detail);
  }

  void fibration() {
    if (!m_.fibration) return;
    const Fibration& fib = *m_.fibration;
    if (!fib.base_bivector.is_zero()) {
      std::optional<StarEngine> base;
      try {
        base.emplace(fib.base_bivector, m_.order, opt_.convention);
      } catch (const Error& e) {
        add("fibration:engine", "fibration", Status::fail, "base star engine", "central", e.what());
      }
      if (base) {
        StarCache cache;
        for (std::size_t i = 0; i < fib.map.size(); ++i)
          for (std::size_t j = i; j < fib.map.size(); ++j) {
            const auto& [a, fa] = fib.map[i];
            const auto& [b, fb] = fib.map[j];
            relation_check("fibration:" + m_.table.name(a.index) + "," + m_.table.name(b.index),
                           "fibration", *base, cache, a, b, fa, fb,
                           relation_value(fib.relations, a, b), "pullback ");
          }
      }
    }
    for (const auto& [v, image] : fib.map) {
      const auto& w = m_.table[v.index].weight;
      if (w.empty() || fib.fiber_groups.empty()) continue;
      bool ok = w.size() == fib.fiber_groups.size();
      std::string got;
      for (std::size_t g = 0; g < fib.fiber_groups.size(); ++g) {
        const auto d = group_degree(image, fib.fiber_groups[g]);
        if (!got.empty()) got += ",";
        got += d ? std::to_string(*d) : "inhomogeneous";
        ok = ok && d && g < w.size() && *d == w[g];
      }
      std::string want;
      for (int x : w) want += (want.empty() ? "" : ",") + std::to_string(x);
      add("fiber-degree:" + m_.table.name(v.index), "fibration", ok, "fiber degree " + N(v), want,
          "got " + got);
    }
    for (const auto& id : m_.identities) {
      const GradedPoly r = substitute(id.expr, fib.map, m_.table);
      add("identity:" + id.name, "identity", r.is_zero(), "identity " + id.name, "0",
          "residual " + R(r));
    }
  }

  const StarEngine* engine_for(const Substitution& embedding, std::optional<StarEngine>& base) {
    std::set<VarIndex> used;
    for (const auto& [v, p] : embedding)
      for (auto x : p.variables()) used.insert(x);
    bool all_base = m_.fibration.has_value();
    bool any_base = false;
    for (auto x : used) {
      const Role r = m_.roles.at(x);
      if (r == Role::base) any_base = true;
      if (r == Role::chart || r == Role::aux) all_base = false;
    }
    if (!any_base) return engine_ ? &*engine_ : nullptr;
    if (!all_base) return nullptr;
    if (!base) base.emplace(m_.fibration->base_bivector, m_.order, opt_.convention);
    return &*base;
  }

  void atlas() {
    const Atlas& at = m_.atlas;
    if (at.empty()) return;
    std::optional<StarEngine> base;
    StarCache base_cache, model_cache;
    for (const auto& ch : at.charts) {
      if (ch.embedding.empty()) continue;
      const StarEngine* engine = nullptr;
      try {
        engine = engine_for(ch.embedding, base);
      } catch (const Error&) {
      }
      StarCache& cache = engine && engine != &*engine_ ? base_cache : model_cache;
      auto image = [&](VarRef v) -> const GradedPoly* {
        for (const auto& [w, p] : ch.embedding)
          if (w == v) return &p;
        return nullptr;
      };
      for (std::size_t i = 0; i < ch.variables.size(); ++i)
        for (std::size_t j = i; j < ch.variables.size(); ++j) {
          const VarRef a = ch.variables[i], b = ch.variables[j];
          const std::string id = "embed:" + ch.name + ":" + m_.table.name(a.index) + "," +
                                 m_.table.name(b.index);
          const GradedPoly expected = GradedPoly::hbar() * ch.table.at(a, b);
          const GradedPoly *fa = image(a), *fb = image(b);
          if (!engine || !fa || !fb) {
            add(id, "chart", Status::skip, "chart " + ch.name + " " + pair_label(a, b), R(expected), "no embedding engine");
            continue;
          }
          try {
            const GradedPoly got = supercommutator(*engine, *fa, *fb, &cache);
            const GradedPoly want = substitute(expected, ch.embedding, m_.table);
            add(id, "chart", got == want, "chart " + ch.name + " " + pair_label(a, b), R(expected), "got " + R(got));
          } catch (const Error& e) {
            add(id, "chart", Status::fail, "chart " + ch.name + " " + pair_label(a, b), R(expected), e.what());
          }
        }
    }
    for (const auto& t : at.transitions) {
      const std::string label = t.from + ">" + t.to;
      try {
        const Chart& from = at.chart(t.from);
        const Chart& to = at.chart(t.to);
        bool ok = true;
        std::string detail;
        for (const auto& [v, r] : t.rules)
          if (!(substitute(r, t.inverse, m_.table) == GradedPoly::var(v))) {
            ok = false;
            detail = "inverse rules do not undo the rule for " + N(v);
          }
        add("inverse:" + label, "transition", ok, "inverse " + label, "identity", detail);
        const BracketTable moved = transport_table(t, from.table, from.variables, to.variables, m_.table);
        add("transport:" + label, "transition", moved == to.table, "transport " + label,
            "table " + t.to, "transported table differs");
      } catch (const Error& e) {
        add("transport:" + label, "transition", Status::fail, "transport " + label, "table " + t.to,
            e.what());
      }
    }
    for (const auto& law : at.laws) {
      const std::string label = law.from + ">" + law.to + ":" + m_.table.name(law.to_a.index) +
                                "," + m_.table.name(law.to_b.index);
      const std::string lhs = "weight " + law.to + " " + N(law.to_a) + " " + N(law.to_b);
      try {
        const Chart& from = at.chart(law.from);
        const Chart& to = at.chart(law.to);
        const TransitionMap& t = at.transition(law.from, law.to);
        add("weight:" + label, "weight", check_weight_law(from, to, t, law, m_.table), lhs,
            R(law.factor), "table ratio differs from the factor");
        const auto why = weight_law_inconsistency(t, law, m_.table);
        add("weight-consistency:" + label, "weight", !why, "scales " + law.to + " " + N(law.to_a) +
            " " + N(law.to_b), R(law.factor), why.value_or(""));
      } catch (const Error& e) {
        add("weight:" + label, "weight", Status::fail, lhs, R(law.factor), e.what());
      }
    }
    for (const auto& cycle : at.cycles) {
      std::string label;
      for (const auto& c : cycle) label += (label.empty() ? "" : ">") + c;
      label += ">" + cycle.front();
      try {
        const bool ok = check_cocycle(cycle_maps(at, cycle), at, m_.table);
        add("cocycle:" + label, "cocycle", ok, "cocycle " + label, "identity",
            "composition is not the identity");
      } catch (const Error& e) {
        add("cocycle:" + label, "cocycle", Status::fail, "cocycle " + label, "identity", e.what());
      }
    }
  }

  void antichiral() {
    if (!m_.antichiral) return;
    const AntiChiral& ac = *m_.antichiral;
    std::vector<VarRef> vars;
    auto push = [&](VarRef v) {
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    };
    for (const auto& s : ac.shifts) push(s.x);
    for (const auto& c : ac.coefficients) {
      push(c.chiral);
      push(c.antichiral);
    }
    const auto basis = monomial_basis(vars, 2);
    bool ok = true;
    std::string detail;
    for (const auto& f : basis) {
      const GradedPoly back =
          anti_chiral_substitution(ac, anti_chiral_substitution(ac, f, m_.table, +1), m_.table, -1);
      if (!(back == f)) {
        ok = false;
        detail = "round trip changes " + R(f);
        break;
      }
    }
    add("antichiral:roundtrip", "antichiral", ok, "antichiral round trip",
        "identity on " + std::to_string(basis.size()) + " monomials", detail);
  }

  void calabi_yau() {
    if (!m_.cy) return;
    const auto idx = calabi_yau_index(*m_.cy);
    std::string s;
    for (int x : idx) s += (s.empty() ? "" : ",") + std::to_string(x);
    std::string zero;
    for (std::size_t i = 0; i < idx.size(); ++i) zero += i ? ",0" : "0";
    add("cy", "cy", is_calabi_yau(*m_.cy), "c1 index", zero, "got " + s);
  }

  const ModelSpec& m_;
  VerifyOptions opt_;
  VerificationReport report_;
  std::optional<StarEngine> engine_;
  StarCache cache_;
};

}  // namespace detail

/// Runs every check for one model in a fixed order: Poisson condition, star
/// engine, relation table, quantization contract, bracket identities,
/// fibration, atlas, anti-chiral coordinates, Calabi-Yau index.
inline VerificationReport verify_model(const ModelSpec& model, const VerifyOptions& opt = {}) {
  return detail::Verifier(model, opt).run();
}

}  // namespace superstar
