#pragma once

// Sectioned text format for ModelSpec. One declaration per line, `#` starts a
// comment. Sections are collected first and then applied in a fixed order, so
// every identifier is declared before an expression refers to it.
//
//   [model]              name NAME
//   [options]            order K
//   [variables]          NAME even|odd [invertible] [weight=W[,W]] [constant|base|chart|aux]
//   [aliases]            NAME DISPLAY
//   [bivector]           A B := EXPR
//   [relations]          comm|anti A B = EXPR
//   [fibration.bivector] A B := EXPR
//   [fibration.map]      V := EXPR
//   [fibration.relations] comm|anti A B = EXPR
//   [fibration.fiber]    group V...
//   [chart NAME]         vars V... | bracket A B = EXPR | embed V := EXPR
//   [transition FROM TO] V := EXPR | inverse V := EXPR | scale V
//   [weights]            law FROM TO A B A' B' := EXPR
//   [cocycles]           cycle C...
//   [identities]         NAME := EXPR
//   [antichiral]         shift X XR | a X CHIRAL ANTICHIRAL := RATIONAL
//   [cy]                 projective n N | weighted k... ; l... | ambitwistor N

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "superstar/models.hpp"

namespace superstar {

namespace detail {

struct FileLine {
  std::size_t number = 0;  // 1-based
  std::string text;        // comment stripped, original columns kept
};

struct FileSection {
  std::string name;
  std::vector<std::string> args;
  std::size_t header_line = 0;
  std::vector<FileLine> lines;
};

struct Token {
  std::string text;
  std::size_t column = 0;  // 1-based
};

inline std::vector<Token> tokenize(std::string_view s, std::size_t offset = 0) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i == s.size()) break;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    out.push_back({std::string(s.substr(start, i - start)), offset + start + 1});
  }
  return out;
}

class ModelFileParser {
 public:
  ModelFileParser(std::string_view text, std::string file) : file_(std::move(file)) { split(text); }

  ModelSpec parse() {
    static const std::vector<std::string> single = {
        "model", "options", "variables", "aliases", "bivector", "relations",
        "fibration.bivector", "fibration.map", "fibration.relations", "fibration.fiber",
        "weights", "cocycles", "identities", "antichiral", "cy"};
    std::map<std::string, const FileSection*> by_name;
    std::vector<const FileSection*> charts, transitions;
    for (const auto& s : sections_) {
      if (s.name == "chart") {
        if (s.args.size() != 1) fail(s.header_line, 1, "[chart] takes one name");
        charts.push_back(&s);
      } else if (s.name == "transition") {
        if (s.args.size() != 2) fail(s.header_line, 1, "[transition] takes two chart names");
        transitions.push_back(&s);
      } else if (std::find(single.begin(), single.end(), s.name) != single.end()) {
        if (!s.args.empty()) fail(s.header_line, 1, "[" + s.name + "] takes no arguments");
        if (!by_name.emplace(s.name, &s).second)
          fail(s.header_line, 1, "duplicate section [" + s.name + "]");
      } else {
        fail(s.header_line, 1, "unknown section [" + s.name + "]");
      }
    }
    auto section = [&](const std::string& n) -> const FileSection* {
      auto it = by_name.find(n);
      return it == by_name.end() ? nullptr : it->second;
    };
    if (auto s = section("model")) model_section(*s);
    if (m_.name.empty()) fail(1, 1, "missing model name");
    if (auto s = section("options")) options_section(*s);
    if (auto s = section("variables")) variables_section(*s);
    if (auto s = section("aliases")) aliases_section(*s);
    m_.bivector = SuperBivector(m_.variables());
    if (auto s = section("bivector")) bivector_section(*s, m_.bivector);
    if (auto s = section("relations")) relations_section(*s, m_.relations);
    const bool has_fibration = section("fibration.bivector") || section("fibration.map") ||
                               section("fibration.relations") || section("fibration.fiber");
    if (has_fibration) {
      Fibration fib;
      fib.base_variables = m_.with_role(Role::base);
      fib.base_bivector = SuperBivector(fib.base_variables);
      if (auto s = section("fibration.bivector")) bivector_section(*s, fib.base_bivector);
      if (auto s = section("fibration.map")) map_section(*s, fib.map);
      if (auto s = section("fibration.relations")) relations_section(*s, fib.relations);
      if (auto s = section("fibration.fiber")) fiber_section(*s, fib);
      m_.fibration = std::move(fib);
    }
    for (const auto* s : charts) chart_section(*s);
    for (const auto* s : transitions) transition_section(*s);
    if (auto s = section("weights")) weights_section(*s);
    if (auto s = section("cocycles")) cocycles_section(*s);
    if (auto s = section("identities")) identities_section(*s);
    if (auto s = section("antichiral")) antichiral_section(*s);
    if (auto s = section("cy")) cy_section(*s);
    return std::move(m_);
  }

 private:
  [[noreturn]] void fail(std::size_t line, std::size_t col, const std::string& what) const {
    throw ModelFileError(file_, line, col, what);
  }

  void split(std::string_view text) {
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t end = std::min(text.find('\n', pos), text.size());
      std::string line(text.substr(pos, end - pos));
      ++number;
      pos = end + 1;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
      const auto toks = tokenize(line);
      if (toks.empty()) {
        if (end == text.size()) break;
        continue;
      }
      if (line[toks[0].column - 1] == '[') {
        const auto open = toks[0].column - 1;
        const auto close = line.find(']', open);
        if (close == std::string::npos) fail(number, open + 1, "unterminated section header");
        for (const auto& t : tokenize(std::string_view(line).substr(close + 1), close + 1))
          fail(number, t.column, "unexpected text after section header");
        const auto parts = tokenize(std::string_view(line).substr(open + 1, close - open - 1));
        if (parts.empty()) fail(number, open + 1, "empty section header");
        FileSection s;
        s.name = parts[0].text;
        for (std::size_t i = 1; i < parts.size(); ++i) s.args.push_back(parts[i].text);
        s.header_line = number;
        sections_.push_back(std::move(s));
      } else {
        if (sections_.empty()) fail(number, toks[0].column, "declaration outside a section");
        sections_.back().lines.push_back({number, std::move(line)});
      }
      if (end == text.size()) break;
    }
  }

  VarRef var(const FileLine& l, const Token& t) const {
    if (auto v = m_.table.find(t.text)) return *v;
    fail(l.number, t.column, "unknown identifier '" + t.text + "'");
  }

  GradedPoly expr(const FileLine& l, std::size_t start) const {
    const std::string_view text = std::string_view(l.text).substr(start);
    try {
      return parse_expression(text, m_.table);
    } catch (const SyntaxError& e) {
      fail(l.number, start + e.position() + 1, e.what());
    } catch (const UnknownIdentifier& e) {
      const std::string what = e.what();
      fail(l.number, start + e.position().value_or(0) + 1, what.substr(0, what.rfind(" at column")));
    } catch (const Error& e) {
      fail(l.number, start + 1, e.what());
    }
  }

  /// Tokens before `delim` and the column where the expression after it starts.
  std::pair<std::vector<Token>, std::size_t> head(const FileLine& l, std::string_view delim) const {
    const auto at = l.text.find(delim);
    if (at == std::string::npos)
      fail(l.number, 1, "expected '" + std::string(delim) + "'");
    return {tokenize(std::string_view(l.text).substr(0, at)), at + delim.size()};
  }

  void expect_count(const FileLine& l, const std::vector<Token>& t, std::size_t n,
                    const std::string& what) const {
    if (t.size() != n) fail(l.number, t.empty() ? 1 : t.front().column, "expected " + what);
  }

  int integer(const FileLine& l, const Token& t) const {
    const std::string& s = t.text;
    std::size_t i = (s.size() > 1 && s[0] == '-') ? 1 : 0;
    if (i == s.size() || s.size() > 9 ||
        !std::all_of(s.begin() + static_cast<long>(i), s.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      fail(l.number, t.column, "expected an integer, got '" + s + "'");
    return std::stoi(s);
  }

  void model_section(const FileSection& s) {
    for (const auto& l : s.lines) {
      const auto t = tokenize(l.text);
      if (t[0].text != "name" || t.size() != 2) fail(l.number, t[0].column, "expected 'name NAME'");
      m_.name = t[1].text;
    }
  }

  void options_section(const FileSection& s) {
    for (const auto& l : s.lines) {
      const auto t = tokenize(l.text);
      if (t[0].text != "order" || t.size() != 2) fail(l.number, t[0].column, "expected 'order K'");
      const int k = integer(l, t[1]);
      if (k < 1) fail(l.number, t[1].column, "order must be positive");
      m_.order = static_cast<unsigned>(k);
    }
  }

  void variables_section(const FileSection& s) {
    for (const auto& l : s.lines) {
      const auto t = tokenize(l.text);
      if (t.size() < 2) fail(l.number, t[0].column, "expected 'NAME even|odd ...'");
      Parity p;
      if (t[1].text == "even")
        p = Parity::even;
      else if (t[1].text == "odd")
        p = Parity::odd;
      else
        fail(l.number, t[1].column, "expected 'even' or 'odd'");
      bool invertible = false;
      std::vector<int> weight;
      Role role = Role::model;
      for (std::size_t i = 2; i < t.size(); ++i) {
        const std::string& f = t[i].text;
        if (f == "invertible") {
          invertible = true;
        } else if (f.rfind("weight=", 0) == 0) {
          std::stringstream ss(f.substr(7));
          std::string part;
          while (std::getline(ss, part, ','))
            weight.push_back(integer(l, Token{part, t[i].column + 7}));
          if (weight.empty() || weight.size() > 2)
            fail(l.number, t[i].column, "weight takes one or two integers");
        } else if (f == "constant") {
          role = Role::constant;
        } else if (f == "base") {
          role = Role::base;
        } else if (f == "chart") {
          role = Role::chart;
        } else if (f == "aux") {
          role = Role::aux;
        } else {
          fail(l.number, t[i].column, "unknown variable flag '" + f + "'");
        }
      }
      try {
        m_.declare(t[0].text, p, role, invertible, std::move(weight));
      } catch (const Error& e) {
        fail(l.number, t[0].column, e.what());
      }
    }
  }

  void aliases_section(const FileSection& s) {
    for (const auto& l : s.lines) {
      const auto t = tokenize(l.text);
      expect_count(l, t, 2, "'NAME DISPLAY'");
      m_.aliases[var(l, t[0]).index] = t[1].text;
    }
  }

  void bivector_section(const FileSection& s, SuperBivector& pi) {
    for (const auto& l : s.lines) {
      const auto [t, start] = head(l, ":=");
      expect_count(l, t, 2, "'A B := EXPR'");
      const VarRef a = var(l, t[0]), b = var(l, t[1]);
      const GradedPoly e = expr(l, start);
      try {
        pi.set(a, b, e);
      } catch (const Error& err) {
        fail(l.number, t[0].column, err.what());
      }
    }
  }

  void relations_section(const FileSection& s, std::vector<Relation>& out) {
    for (const auto& l : s.lines) {
      const auto [t, start] = head(l, "=");
      expect_count(l, t, 3, "'comm|anti A B = EXPR'");
      const VarRef a = var(l, t[1]), b = var(l, t[2]);
      const bool anti = is_odd(a.parity) && is_odd(b.parity);
      if (t[0].text != (anti ? "anti" : "comm"))
        fail(l.number, t[0].column, std::string("expected '") + (anti ? "anti" : "comm") + "' for this pair");
      out.push_back({a, b, expr(l, start)});
    }
  }

  void map_section(const FileSection& s, Substitution& out) {
    for (const auto& l : s.lines) {
      const auto [t, start] = head(l, ":=");
      expect_count(l, t, 1, "'V := EXPR'");
      out.emplace_back(var(l, t[0]), expr(l, start));
    }
  }

  void fiber_section(const FileSection& s, Fibration& fib) {
    for (const auto& l : s.lines) {
      const auto t = tokenize(l.text);
      if (t[0].text != "group" || t.size() < 2) fail(l.number, t[0].column, "expected 'group V...'");
      std::vector<VarRef> g;
      for (std::size_t i = 1; i < t.size(); ++i) g.push_back(var(l, t[i]));
      fib.fiber_groups.push_back(std::move(g));
    }
  }

  void chart_section(const FileSection& s) {
    Chart ch;
    ch.name = s.args[0];
    for (const auto& c : m_.atlas.charts)
      if (c.name == ch.name) fail(s.header_line, 1, "duplicate chart '" + ch.name + "'");
    for (const auto& l : s.lines) {
      const auto t = tokenize(l.text);
      if (t[0].text == "vars") {
        for (std::size_t i = 1; i < t.size(); ++i) ch.variables.push_back(var(l, t[i]));
      } else if (t[0].text == "bracket") {
        const auto [h, start] = head(l, "=");
        expect_count(l, h, 3, "'bracket A B = EXPR'");
        const VarRef a = var(l, h[1]), b = var(l, h[2]);
        if (!ch.has(a) || !ch.has(b)) fail(l.number, h[1].column, "bracket pair is not in the chart");
        try {
          ch.table.set(a, b, expr(l, start));
        } catch (const ModelFileError&) {
          throw;
        } catch (const Error& e) {
          fail(l.number, start + 1, e.what());
        }
      } else if (t[0].text == "embed") {
        const auto [h, start] = head(l, ":=");
        expect_count(l, h, 2, "'embed V := EXPR'");
        ch.embedding.emplace_back(var(l, h[1]), expr(l, start));
      } else {
        fail(l.number, t[0].column, "expected 'vars', 'bracket' or 'embed'");
      }
    }
    m_.atlas.charts.push_back(std::move(ch));
  }

  void transition_section(const FileSection& s) {
    TransitionMap t;
    t.from = s.args[0];
    t.to = s.args[1];
    for (const auto& l : s.lines) {
      const auto toks = tokenize(l.text);
      if (toks[0].text == "scale") {
        expect_count(l, toks, 2, "'scale V'");
        t.scale = var(l, toks[1]);
      } else if (toks[0].text == "inverse") {
        const auto [h, start] = head(l, ":=");
        expect_count(l, h, 2, "'inverse V := EXPR'");
        t.inverse.emplace_back(var(l, h[1]), expr(l, start));
      } else {
        const auto [h, start] = head(l, ":=");
        expect_count(l, h, 1, "'V := EXPR'");
        t.rules.emplace_back(var(l, h[0]), expr(l, start));
      }
    }
    m_.atlas.transitions.push_back(std::move(t));
  }

  void weights_section(const FileSection& s) {
    for (const auto& l : s.lines) {
      const auto [t, start] = head(l, ":=");
      if (t.size() != 7 || t[0].text != "law") fail(l.number, 1, "expected 'law FROM TO A B A' B' := EXPR'");
      m_.atlas.laws.push_back({t[1].text, t[2].text, var(l, t[3]), var(l, t[4]), var(l, t[5]),
                               var(l, t[6]), expr(l, start)});
    }
  }

  void cocycles_section(const FileSection& s) {
    for (const auto& l : s.lines) {
      const auto t = tokenize(l.text);
      if (t[0].text != "cycle" || t.size() < 3) fail(l.number, t[0].column, "expected 'cycle C1 C2 ...'");
      std::vector<std::string> c;
      for (std::size_t i = 1; i < t.size(); ++i) c.push_back(t[i].text);
      m_.atlas.cycles.push_back(std::move(c));
    }
  }

  void identities_section(const FileSection& s) {
    for (const auto& l : s.lines) {
      const auto [t, start] = head(l, ":=");
      expect_count(l, t, 1, "'NAME := EXPR'");
      m_.identities.push_back({t[0].text, expr(l, start)});
    }
  }

  void antichiral_section(const FileSection& s) {
    AntiChiral ac;
    for (const auto& l : s.lines) {
      const auto t = tokenize(l.text);
      if (t[0].text == "shift") {
        expect_count(l, t, 3, "'shift X XR'");
        ac.shifts.push_back({var(l, t[1]), var(l, t[2])});
      } else if (t[0].text == "a") {
        const auto [h, start] = head(l, ":=");
        expect_count(l, h, 4, "'a X CHIRAL ANTICHIRAL := RATIONAL'");
        const GradedPoly c = expr(l, start);
        if (c.size() > 1 || (c.size() == 1 && !(c.terms().begin()->first == Monomial{})))
          fail(l.number, start + 1, "coefficient must be a rational constant");
        const Rational value = c.is_zero() ? Rational(0) : c.terms().begin()->second;
        ac.coefficients.push_back({var(l, h[1]), var(l, h[2]), var(l, h[3]), value});
      } else {
        fail(l.number, t[0].column, "expected 'shift' or 'a'");
      }
    }
    m_.antichiral = std::move(ac);
  }

  void cy_section(const FileSection& s) {
    if (s.lines.size() != 1) fail(s.header_line, 1, "[cy] takes exactly one line");
    const auto& l = s.lines.front();
    const auto t = tokenize(l.text);
    CYWeights w;
    if (t[0].text == "projective") {
      expect_count(l, t, 3, "'projective n N'");
      w.kind = CYWeights::Kind::projective;
      w.n = integer(l, t[1]);
      w.N = integer(l, t[2]);
    } else if (t[0].text == "ambitwistor") {
      expect_count(l, t, 2, "'ambitwistor N'");
      w.kind = CYWeights::Kind::ambitwistor;
      w.N = integer(l, t[1]);
    } else if (t[0].text == "weighted") {
      w.kind = CYWeights::Kind::weighted;
      bool odd = false;
      for (std::size_t i = 1; i < t.size(); ++i) {
        if (t[i].text == ";") {
          if (odd) fail(l.number, t[i].column, "second ';'");
          odd = true;
          continue;
        }
        (odd ? w.l : w.k).push_back(integer(l, t[i]));
      }
      if (w.k.empty()) fail(l.number, t[0].column, "weighted needs even weights");
    } else {
      fail(l.number, t[0].column, "expected 'projective', 'weighted' or 'ambitwistor'");
    }
    m_.cy = std::move(w);
  }

  std::string file_;
  std::vector<FileSection> sections_;
  ModelSpec m_;
};

inline const char* role_flag(Role r) {
  switch (r) {
    case Role::model:
      return "";
    case Role::constant:
      return " constant";
    case Role::base:
      return " base";
    case Role::chart:
      return " chart";
    case Role::aux:
      return " aux";
  }
  return "";
}

}  // namespace detail

inline ModelSpec parse_model_text(std::string_view text, const std::string& file = "<input>") {
  return detail::ModelFileParser(text, file).parse();
}

inline ModelSpec parse_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFileError(path, 0, 0, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model_text(ss.str(), path);
}

/// Canonical text of a model; parse_model_text(serialize_model(m)) == m.
inline std::string serialize_model(const ModelSpec& m) {
  const VariableTable& T = m.table;
  auto R = [&](const GradedPoly& p) { return render(p, T); };
  auto N = [&](VarRef v) { return T.name(v.index); };
  std::ostringstream o;
  auto bivector = [&](const SuperBivector& pi) {
    for (const auto* e : pi.entries())
      if (e->a.index <= e->b.index) o << N(e->a) << ' ' << N(e->b) << " := " << R(e->value) << '\n';
  };
  auto relations = [&](const std::vector<Relation>& rel) {
    for (const auto& r : rel)
      o << (is_odd(r.a.parity) && is_odd(r.b.parity) ? "anti " : "comm ") << N(r.a) << ' ' << N(r.b)
        << " = " << R(r.value) << '\n';
  };

  o << "[model]\nname " << m.name << "\n\n[options]\norder " << m.order << "\n\n[variables]\n";
  for (VarIndex i = 0; i < T.size(); ++i) {
    const VarSpec& v = T[i];
    o << v.name << (is_odd(v.parity) ? " odd" : " even");
    if (v.invertible) o << " invertible";
    if (!v.weight.empty()) {
      o << " weight=";
      for (std::size_t k = 0; k < v.weight.size(); ++k) o << (k ? "," : "") << v.weight[k];
    }
    o << detail::role_flag(m.roles.at(i)) << '\n';
  }
  if (!m.aliases.empty()) {
    o << "\n[aliases]\n";
    for (const auto& [i, a] : m.aliases) o << T.name(i) << ' ' << a << '\n';
  }
  o << "\n[bivector]\n";
  bivector(m.bivector);
  if (!m.relations.empty()) {
    o << "\n[relations]\n";
    relations(m.relations);
  }
  if (m.fibration) {
    const Fibration& f = *m.fibration;
    o << "\n[fibration.bivector]\n";
    bivector(f.base_bivector);
    o << "\n[fibration.map]\n";
    for (const auto& [v, p] : f.map) o << N(v) << " := " << R(p) << '\n';
    if (!f.relations.empty()) {
      o << "\n[fibration.relations]\n";
      relations(f.relations);
    }
    if (!f.fiber_groups.empty()) {
      o << "\n[fibration.fiber]\n";
      for (const auto& g : f.fiber_groups) {
        o << "group";
        for (const auto& v : g) o << ' ' << N(v);
        o << '\n';
      }
    }
  }
  for (const auto& c : m.atlas.charts) {
    o << "\n[chart " << c.name << "]\nvars";
    for (const auto& v : c.variables) o << ' ' << N(v);
    o << '\n';
    for (const auto* e : c.table.entries())
      o << "bracket " << N(e->a) << ' ' << N(e->b) << " = " << R(e->value) << '\n';
    for (const auto& [v, p] : c.embedding) o << "embed " << N(v) << " := " << R(p) << '\n';
  }
  for (const auto& t : m.atlas.transitions) {
    o << "\n[transition " << t.from << ' ' << t.to << "]\n";
    for (const auto& [v, p] : t.rules) o << N(v) << " := " << R(p) << '\n';
    for (const auto& [v, p] : t.inverse) o << "inverse " << N(v) << " := " << R(p) << '\n';
    if (t.scale) o << "scale " << N(*t.scale) << '\n';
  }
  if (!m.atlas.laws.empty()) {
    o << "\n[weights]\n";
    for (const auto& w : m.atlas.laws)
      o << "law " << w.from << ' ' << w.to << ' ' << N(w.from_a) << ' ' << N(w.from_b) << ' '
        << N(w.to_a) << ' ' << N(w.to_b) << " := " << R(w.factor) << '\n';
  }
  if (!m.atlas.cycles.empty()) {
    o << "\n[cocycles]\n";
    for (const auto& c : m.atlas.cycles) {
      o << "cycle";
      for (const auto& n : c) o << ' ' << n;
      o << '\n';
    }
  }
  if (!m.identities.empty()) {
    o << "\n[identities]\n";
    for (const auto& id : m.identities) o << id.name << " := " << R(id.expr) << '\n';
  }
  if (m.antichiral) {
    o << "\n[antichiral]\n";
    for (const auto& s : m.antichiral->shifts) o << "shift " << N(s.x) << ' ' << N(s.x_r) << '\n';
    for (const auto& c : m.antichiral->coefficients)
      o << "a " << N(c.x) << ' ' << N(c.chiral) << ' ' << N(c.antichiral) << " := "
        << c.value.get_str() << '\n';
  }
  if (m.cy) {
    const CYWeights& w = *m.cy;
    o << "\n[cy]\n";
    switch (w.kind) {
      case CYWeights::Kind::projective:
        o << "projective " << w.n << ' ' << w.N << '\n';
        break;
      case CYWeights::Kind::ambitwistor:
        o << "ambitwistor " << w.N << '\n';
        break;
      case CYWeights::Kind::weighted:
        o << "weighted";
        for (int k : w.k) o << ' ' << k;
        o << " ;";
        for (int l : w.l) o << ' ' << l;
        o << '\n';
        break;
    }
  }
  return o.str();
}

}  // namespace superstar
