#pragma once

// Moyal-type star product
//   f * g = f exp[(hbar/2) sum <-d_A E^{AB} ->d_B] g
// for superbivectors whose coefficients are central, together with
// supercommutators and the deformation-quantization contract checks.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string_view>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "superstar/poisson.hpp"
#include "superstar/render.hpp"

namespace superstar {

class StarEngine {
 public:
  static constexpr unsigned default_max_order = 8;

  explicit StarEngine(SuperBivector pi, unsigned max_order = default_max_order,
                      KoszulConvention convention = {})
      : pi_(std::move(pi)), max_order_(max_order), convention_(convention) {
    if (max_order_ == 0) throw Error("max_order must be positive");
    if (!pi_.is_central())
      throw NonCentralBivector("bivector coefficients depend on differentiated variables");
    for (const auto* e : pi_.entries()) rows_[e->a.index].push_back(e);
    active_ = pi_.active_variables();
  }

  const SuperBivector& bivector() const { return pi_; }
  unsigned max_order() const { return max_order_; }
  const KoszulConvention& convention() const { return convention_; }
  bool differentiates(VarIndex v) const { return active_.count(v) != 0; }

  const std::vector<const SuperBivector::Entry*>* row(VarIndex v) const {
    auto it = rows_.find(v);
    return it == rows_.end() ? nullptr : &it->second;
  }

 private:
  SuperBivector pi_;
  unsigned max_order_;
  KoszulConvention convention_;
  std::unordered_map<VarIndex, std::vector<const SuperBivector::Entry*>> rows_;
  std::set<VarIndex> active_;
};

namespace detail {

struct MonomialPairLess {
  bool operator()(const std::pair<Monomial, Monomial>& x,
                  const std::pair<Monomial, Monomial>& y) const {
    MonomialOrder less;
    if (less(x.first, y.first)) return true;
    if (less(y.first, x.first)) return false;
    return less(x.second, y.second);
  }
};

struct MonomialPairHash {
  std::size_t operator()(const std::pair<Monomial, Monomial>& p) const noexcept {
    MonomialHash h;
    return h(p.first) * 1000003u ^ h(p.second);
  }
};

/// Star product of two monomials: the kernel is applied level by level to the
/// tensor pair (left, right) with equal pairs merged.
inline GradedPoly star_monomials(const StarEngine& engine, const Monomial& f, const Monomial& g) {
  GradedPoly result;
  {
    Monomial fg;
    const int s = multiply(f, g, fg);
    if (s != 0) result.add_term(fg, s);
  }
  using Key = std::pair<Monomial, Monomial>;
  std::map<Key, GradedPoly, MonomialPairLess> level;
  level.emplace(Key{f, g}, GradedPoly(1));
  const auto& conv = engine.convention();
  Rational factor = 1;
  Monomial left, right, prod;
  for (unsigned n = 1;; ++n) {
    std::map<Key, GradedPoly, MonomialPairLess> next;
    for (const auto& [slots, coeff] : level) {
      const auto& [l, r] = slots;
      auto visit = [&](VarIndex v) {
        const auto* row = engine.row(v);
        if (!row) return;
        for (const auto* e : *row) {
          const long sl = derive_monomial(e->a, l, Side::right, left, conv);
          if (sl == 0) continue;
          const long sr = derive_monomial(e->b, r, Side::left, right, conv);
          if (sr == 0) continue;
          const int ts = tensor_sign(e->b.parity, left.parity(), conv);
          next[Key{left, right}].add_product(coeff, e->value, Rational(sl * sr * ts));
        }
      };
      for (const auto& [v, exp] : l.even) visit(v);
      for (auto v : l.odd) visit(v);
    }
    for (auto it = next.begin(); it != next.end();) {
      it = it->second.is_zero() ? next.erase(it) : std::next(it);
    }
    if (next.empty()) break;
    if (n > engine.max_order())
      throw TruncationExceeded("star product did not terminate by hbar order " +
                               std::to_string(engine.max_order()));
    factor /= Rational(2 * n);
    Monomial hb;
    hb.hbar = n;
    for (const auto& [slots, coeff] : next) {
      const int s = multiply(slots.first, slots.second, prod);
      if (s == 0) continue;
      Monomial with_hbar;
      multiply(prod, hb, with_hbar);
      result.add_product(GradedPoly::monomial(with_hbar, factor * s), coeff);
    }
    level = std::move(next);
  }
  return result;
}

}  // namespace detail

/// Memo of monomial-pair products for repeated evaluation against one engine.
/// Not thread-safe; use one cache per thread.
class StarCache {
 public:
  const GradedPoly* find(const Monomial& a, const Monomial& b) const {
    auto it = map_.find({a, b});
    return it == map_.end() ? nullptr : &it->second;
  }
  const GradedPoly& insert(const Monomial& a, const Monomial& b, GradedPoly v) {
    return map_.emplace(std::make_pair(a, b), std::move(v)).first->second;
  }
  std::size_t size() const { return map_.size(); }

 private:
  std::unordered_map<std::pair<Monomial, Monomial>, GradedPoly, detail::MonomialPairHash> map_;
};

/// f * g. Throws TruncationExceeded if the series has not terminated by the
/// engine's max order.
inline GradedPoly star(const StarEngine& engine, const GradedPoly& f, const GradedPoly& g,
                       StarCache* cache = nullptr) {
  // Even factors the bivector never differentiates (and hbar) are central and
  // are pulled out of each monomial before the kernel runs.
  auto split = [&engine](const Monomial& m, Monomial& central, Monomial& active) {
    central = Monomial{};
    active = Monomial{};
    central.hbar = m.hbar;
    active.odd = m.odd;
    for (const auto& p : m.even) (engine.differentiates(p.first) ? active : central).even.push_back(p);
  };
  GradedPoly result;
  Monomial cf, af, cg, ag, central;
  for (const auto& [mf, xf] : f.terms()) {
    split(mf, cf, af);
    for (const auto& [mg, xg] : g.terms()) {
      split(mg, cg, ag);
      multiply(cf, cg, central);
      const GradedPoly* core = cache ? cache->find(af, ag) : nullptr;
      GradedPoly local;
      if (!core) {
        local = detail::star_monomials(engine, af, ag);
        core = cache ? &cache->insert(af, ag, std::move(local)) : &local;
      }
      result.add_product(GradedPoly::monomial(central, xf * xg), *core);
    }
  }
  return result;
}

/// f * g - (-1)^{|f||g|} g * f.
inline GradedPoly supercommutator(const StarEngine& engine, const GradedPoly& f,
                                  const GradedPoly& g, StarCache* cache = nullptr) {
  const Parity pf = require_homogeneous(f, "first argument");
  const Parity pg = require_homogeneous(g, "second argument");
  return star(engine, f, g, cache) - star(engine, g, f, cache) * Rational(koszul_sign(pf, pg));
}

struct ContractCheck {
  std::string name;
  bool passed = true;
  std::size_t cases = 0;
  std::string detail{};
};

struct ContractReport {
  std::vector<ContractCheck> checks;
  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
  const ContractCheck* find(std::string_view name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

struct ContractOptions {
  unsigned max_even = 2;
  unsigned max_odd = 4;
  int max_degree = 3;
  bool exhaustive_associativity = true;
  unsigned random_triples = 30;
  unsigned random_pairs = 200;
  unsigned linearity_samples = 20;
  std::uint64_t seed = 0x5eed;
};

/// Chooses the small variable set the contract checks range over: up to
/// `max_even` differentiated even variables (preferring a coupled pair) and up
/// to `max_odd` differentiated odd variables.
inline std::vector<VarRef> contract_variables(const StarEngine& engine, unsigned max_even,
                                              unsigned max_odd) {
  std::vector<VarRef> evens, odds, active;
  for (const auto& v : engine.bivector().variables())
    if (engine.differentiates(v.index)) active.push_back(v);
  for (const auto& v : active) {
    if (is_odd(v.parity)) {
      if (odds.size() < max_odd) odds.push_back(v);
      continue;
    }
    if (evens.size() >= max_even) continue;
    if (evens.size() + 1 == max_even && !evens.empty()) {
      // Prefer a partner of the first chosen even variable.
      bool coupled = false;
      for (const auto& w : active)
        if (!is_odd(w.parity) && w != evens.front() &&
            !engine.bivector().at(evens.front(), w).is_zero()) {
          evens.push_back(w);
          coupled = true;
          break;
        }
      if (coupled) continue;
    }
    evens.push_back(v);
  }
  std::vector<VarRef> r = evens;
  r.insert(r.end(), odds.begin(), odds.end());
  return r;
}

/// All monomials (coefficient 1) in `vars` with total degree <= max_degree.
inline std::vector<GradedPoly> monomial_basis(const std::vector<VarRef>& vars, int max_degree) {
  std::vector<Monomial> out{Monomial{}};
  for (const auto& v : vars) {
    std::vector<Monomial> grown;
    for (const auto& m : out) {
      const int limit = is_odd(v.parity) ? 1 : max_degree;
      for (int e = 0; e <= limit && m.degree() + e <= max_degree; ++e) {
        if (e == 0) {
          grown.push_back(m);
          continue;
        }
        Monomial x;
        multiply(m, Monomial::variable(v, e), x);
        grown.push_back(x);
      }
    }
    out = std::move(grown);
  }
  std::vector<GradedPoly> basis;
  basis.reserve(out.size());
  for (const auto& m : out) basis.push_back(GradedPoly::monomial(m, 1));
  return basis;
}

namespace detail {

inline GradedPoly random_poly(const std::vector<GradedPoly>& basis, std::mt19937_64& rng,
                              unsigned max_terms, std::optional<Parity> parity = std::nullopt) {
  std::vector<const GradedPoly*> pool;
  for (const auto& b : basis)
    if (!parity || homogeneous_parity(b) == parity) pool.push_back(&b);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::uniform_int_distribution<int> terms(1, static_cast<int>(max_terms));
  std::uniform_int_distribution<int> num(-5, 5), den(1, 4);
  GradedPoly p;
  const int n = terms(rng);
  for (int i = 0; i < n; ++i) {
    int a = num(rng);
    if (a == 0) a = 1;
    p += *pool[pick(rng)] * make_rational(a, den(rng));
  }
  if (p.is_zero()) p = *pool[pick(rng)];
  return p;
}

inline std::string describe(const VariableTable* table, std::initializer_list<const GradedPoly*> ps) {
  if (!table) return {};
  std::string s;
  for (const auto* p : ps) {
    if (!s.empty()) s += ", ";
    s += render(*p, *table);
  }
  return s;
}

}  // namespace detail

/// Runs bilinearity / hbar-linearity, associativity (exhaustive on a small
/// monomial basis plus random polynomials) and first-order = 1/2 bracket.
inline ContractReport check_quantization_contract(const StarEngine& engine,
                                                  const ContractOptions& opt = {},
                                                  const VariableTable* table = nullptr) {
  ContractReport report;
  std::mt19937_64 rng(opt.seed);
  StarCache cache;
  const auto vars = contract_variables(engine, opt.max_even, opt.max_odd);
  const auto basis = monomial_basis(vars, opt.max_degree);
  auto S = [&](const GradedPoly& f, const GradedPoly& g) { return star(engine, f, g, &cache); };

  ContractCheck lin{.name = "bilinearity"};
  for (unsigned i = 0; i < opt.linearity_samples && lin.passed; ++i) {
    const auto f1 = detail::random_poly(basis, rng, 3), f2 = detail::random_poly(basis, rng, 3);
    const auto g = detail::random_poly(basis, rng, 3);
    const Rational a = make_rational(static_cast<long>(rng() % 7) - 3, 2);
    const Rational b = make_rational(static_cast<long>(rng() % 5) + 1, 3);
    const GradedPoly h = GradedPoly::hbar();
    const bool ok = S(f1 * a + f2 * b, g) == S(f1, g) * a + S(f2, g) * b &&
                    S(g, f1 * a + f2 * b) == S(g, f1) * a + S(g, f2) * b &&
                    S(h * f1, g) == h * S(f1, g) && S(f1, h * g) == h * S(f1, g);
    ++lin.cases;
    if (!ok) {
      lin.passed = false;
      lin.detail = "linearity fails for " + detail::describe(table, {&f1, &f2, &g});
    }
  }
  report.checks.push_back(std::move(lin));

  ContractCheck assoc{.name = "associativity"};
  auto check_triple = [&](const GradedPoly& f, const GradedPoly& g, const GradedPoly& h,
                          const GradedPoly& fg) {
    ++assoc.cases;
    if (S(fg, h) == S(f, S(g, h))) return true;
    assoc.passed = false;
    assoc.detail = "(f*g)*h != f*(g*h) for " + detail::describe(table, {&f, &g, &h});
    return false;
  };
  if (opt.exhaustive_associativity) {
    std::vector<GradedPoly> right(basis.size());
    for (std::size_t i = 0; i < basis.size() && assoc.passed; ++i) {
      for (std::size_t j = 0; j < basis.size(); ++j) right[j] = S(basis[i], basis[j]);
      for (std::size_t j = 0; j < basis.size() && assoc.passed; ++j)
        for (std::size_t k = 0; k < basis.size(); ++k)
          if (!check_triple(basis[i], basis[j], basis[k], right[j])) break;
    }
  }
  for (unsigned t = 0; t < opt.random_triples && assoc.passed; ++t) {
    const auto f = detail::random_poly(basis, rng, 4), g = detail::random_poly(basis, rng, 4),
               h = detail::random_poly(basis, rng, 4);
    check_triple(f, g, h, S(f, g));
  }
  report.checks.push_back(std::move(assoc));

  ContractCheck first{.name = "first-order"};
  auto check_pair = [&](const GradedPoly& f, const GradedPoly& g) {
    ++first.cases;
    const GradedPoly lhs = S(f, g).hbar_coefficient(1);
    const GradedPoly rhs = poisson_bracket(engine.bivector(), f, g, engine.convention()) *
                           Rational(1, 2);
    if (lhs == rhs) return true;
    first.passed = false;
    first.detail = "pi_1(f,g) != {f,g}/2 for " + detail::describe(table, {&f, &g});
    return false;
  };
  for (std::size_t i = 0; i < basis.size() && first.passed; ++i)
    for (std::size_t j = 0; j < basis.size(); ++j)
      if (!check_pair(basis[i], basis[j])) break;
  for (unsigned t = 0; t < opt.random_pairs && first.passed; ++t) {
    const Parity pf = rng() % 2 ? Parity::odd : Parity::even;
    const Parity pg = rng() % 2 ? Parity::odd : Parity::even;
    bool has_odd = false;
    for (const auto& v : vars) has_odd = has_odd || is_odd(v.parity);
    const auto f = detail::random_poly(basis, rng, 4, has_odd ? std::optional(pf) : std::nullopt);
    const auto g = detail::random_poly(basis, rng, 4, has_odd ? std::optional(pg) : std::nullopt);
    check_pair(f, g);
  }
  report.checks.push_back(std::move(first));
  return report;
}

}  // namespace superstar
