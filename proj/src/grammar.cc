#include "ensemble/grammar.h"

#include <algorithm>
#include <limits>
#include <random>

#include "ensemble/error.h"

namespace ensemble::grammar {

Nonterminal ContextFreeGrammar::Add(std::string name) {
  names.push_back(std::move(name));
  return Nonterminal{static_cast<int>(names.size()) - 1};
}

void ContextFreeGrammar::Rule(Nonterminal lhs, std::vector<Symbol> rhs) {
  productions.push_back({lhs, std::move(rhs)});
}

const ContextFreeGrammar& InteractionGrammar() {
  static const ContextFreeGrammar grammar = [] {
    ContextFreeGrammar g;
    Nonterminal s = g.Add("S");
    Nonterminal o = g.Add("O");
    Nonterminal a = g.Add("A");
    Nonterminal d = g.Add("D");
    g.start = s;
    g.Rule(s, {o, a});
    g.Rule(s, {a, o});
    for (Terminal t : {Terminal::kDeixis, Terminal::kStaticIconic,
                       Terminal::kNoun}) {
      g.Rule(o, {t});
      g.Rule(o, {t, d});
    }
    for (Terminal t : {Terminal::kDynamicIconic, Terminal::kVerb,
                       Terminal::kPrep}) {
      g.Rule(a, {t});
      g.Rule(a, {t, d});
    }
    for (Terminal t : {Terminal::kDeixis, Terminal::kPrep, Terminal::kNoun,
                       Terminal::kYes, Terminal::kNo}) {
      g.Rule(d, {t});
      g.Rule(d, {t, d});
    }
    return g;
  }();
  return grammar;
}

namespace {

int Index(Terminal t) { return static_cast<int>(t); }

}  // namespace

CnfGrammar::CnfGrammar(const ContextFreeGrammar& grammar) {
  // Working copy with every symbol as a nonterminal id or terminal.
  int count = static_cast<int>(grammar.names.size());
  int preterminal[kTerminalCount];
  std::fill(std::begin(preterminal), std::end(preterminal), -1);

  std::vector<std::pair<int, int>> units;  // A -> B
  std::vector<std::pair<int, Terminal>> lexical;
  std::vector<Binary> binary;

  auto as_nonterminal = [&](const Symbol& s) {
    if (const auto* n = std::get_if<Nonterminal>(&s)) return n->id;
    Terminal t = std::get<Terminal>(s);
    int& p = preterminal[Index(t)];
    if (p < 0) {
      p = count++;
      lexical.emplace_back(p, t);
    }
    return p;
  };

  for (const auto& production : grammar.productions) {
    const auto& rhs = production.rhs;
    if (rhs.empty()) {
      throw Error(ErrorKind::kGrammar, "epsilon production for " +
                                           grammar.names.at(production.lhs.id));
    }
    if (rhs.size() == 1) {
      if (const auto* t = std::get_if<Terminal>(&rhs[0])) {
        lexical.emplace_back(production.lhs.id, *t);
      } else {
        units.emplace_back(production.lhs.id, std::get<Nonterminal>(rhs[0]).id);
      }
      continue;
    }
    // A -> X1 X2 ... Xk  ==>  A -> X1 A1, A1 -> X2 A2, ..., A(k-2) -> X(k-1) Xk
    int lhs = production.lhs.id;
    for (std::size_t i = 0; i + 2 < rhs.size(); ++i) {
      int rest = count++;
      binary.push_back({lhs, as_nonterminal(rhs[i]), rest});
      lhs = rest;
    }
    binary.push_back({lhs, as_nonterminal(rhs[rhs.size() - 2]),
                      as_nonterminal(rhs.back())});
  }
  if (count > 64) {
    throw Error(ErrorKind::kGrammar, "grammar too large for the recognizer");
  }

  // Unit closure: reach[a] has bit b iff a =>* b through unit rules.
  std::vector<std::uint64_t> reach(count);
  for (int a = 0; a < count; ++a) reach[a] = std::uint64_t{1} << a;
  for (bool changed = true; changed;) {
    changed = false;
    for (auto [a, b] : units) {
      std::uint64_t next = reach[a] | reach[b];
      if (next != reach[a]) {
        reach[a] = next;
        changed = true;
      }
    }
  }
  for (int a = 0; a < count; ++a) {
    for (int b = 0; b < count; ++b) {
      if (!(reach[a] >> b & 1)) continue;
      for (auto [lhs, t] : lexical) {
        if (lhs == b) lexical_[Index(t)] |= std::uint64_t{1} << a;
      }
      for (const Binary& rule : binary) {
        if (rule.lhs == b) binary_.push_back({a, rule.left, rule.right});
      }
    }
  }
  count_ = static_cast<std::size_t>(count);
  start_ = grammar.start.id;
}

bool CnfGrammar::Accepts(const std::vector<Terminal>& sequence) const {
  const std::size_t n = sequence.size();
  if (n == 0) return false;
  // table[i * n + (len - 1)] : nonterminals deriving sequence[i, i+len)
  std::vector<std::uint64_t> table(n * n, 0);
  auto cell = [&](std::size_t i, std::size_t len) -> std::uint64_t& {
    return table[i * n + len - 1];
  };
  for (std::size_t i = 0; i < n; ++i) cell(i, 1) = lexical_[Index(sequence[i])];
  for (std::size_t len = 2; len <= n; ++len) {
    for (std::size_t i = 0; i + len <= n; ++i) {
      std::uint64_t mask = 0;
      for (std::size_t split = 1; split < len; ++split) {
        std::uint64_t left = cell(i, split);
        std::uint64_t right = cell(i + split, len - split);
        if (left == 0 || right == 0) continue;
        for (const Binary& rule : binary_) {
          if ((left >> rule.left & 1) && (right >> rule.right & 1)) {
            mask |= std::uint64_t{1} << rule.lhs;
          }
        }
      }
      cell(i, len) = mask;
    }
  }
  return cell(0, n) >> start_ & 1;
}

bool Accepts(const std::vector<Terminal>& sequence) {
  static const CnfGrammar cnf(InteractionGrammar());
  return cnf.Accepts(sequence);
}

namespace {

constexpr int kUnbounded = std::numeric_limits<int>::max() / 4;

class Sampler {
 public:
  Sampler(const ContextFreeGrammar& grammar, std::uint64_t seed)
      : grammar_(grammar), rng_(seed) {
    by_lhs_.resize(grammar.names.size());
    for (const auto& p : grammar.productions) by_lhs_[p.lhs.id].push_back(&p);
    min_.assign(grammar.names.size(), kUnbounded);
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& p : grammar.productions) {
        int m = MinLength(p);
        if (m < min_[p.lhs.id]) {
          min_[p.lhs.id] = m;
          changed = true;
        }
      }
    }
  }

  int MinLength(const Symbol& s) const {
    if (std::holds_alternative<Terminal>(s)) return 1;
    return min_[std::get<Nonterminal>(s).id];
  }

  int MinLength(const Production& p) const {
    int total = 0;
    for (const auto& s : p.rhs) total = std::min(kUnbounded, total + MinLength(s));
    return total;
  }

  // Appends a yield of 'symbol' of length <= budget to 'out'.
  void Expand(const Symbol& symbol, int budget, std::vector<Terminal>& out) {
    if (const auto* t = std::get_if<Terminal>(&symbol)) {
      out.push_back(*t);
      return;
    }
    std::vector<const Production*> fitting;
    for (const Production* p : by_lhs_[std::get<Nonterminal>(symbol).id]) {
      if (MinLength(*p) <= budget) fitting.push_back(p);
    }
    if (fitting.empty()) {
      throw Error(ErrorKind::kGrammar, "no derivation fits the length budget");
    }
    const Production& chosen = *fitting[rng_() % fitting.size()];
    int reserved = MinLength(chosen);
    std::size_t used = out.size();
    for (const auto& s : chosen.rhs) {
      reserved -= MinLength(s);
      std::size_t before = out.size();
      Expand(s, budget - static_cast<int>(before - used) - reserved, out);
    }
  }

  int StartMin() const { return min_[grammar_.start.id]; }

 private:
  const ContextFreeGrammar& grammar_;
  std::mt19937_64 rng_;
  std::vector<std::vector<const Production*>> by_lhs_;
  std::vector<int> min_;
};

}  // namespace

std::vector<std::vector<Terminal>> Generate(const ContextFreeGrammar& grammar,
                                            int max_len, int count,
                                            std::uint64_t seed) {
  if (max_len < 2) {
    throw Error(ErrorKind::kGrammar, "max_len must be at least 2");
  }
  if (count < 1) throw Error(ErrorKind::kGrammar, "count must be positive");
  Sampler sampler(grammar, seed);
  if (sampler.StartMin() > max_len) {
    throw Error(ErrorKind::kGrammar, "no sentence fits within max_len");
  }
  std::vector<std::vector<Terminal>> sentences;
  sentences.reserve(count);
  for (int i = 0; i < count; ++i) {
    std::vector<Terminal> sentence;
    sampler.Expand(grammar.start, max_len, sentence);
    sentences.push_back(std::move(sentence));
  }
  return sentences;
}

std::vector<std::vector<Terminal>> Generate(int max_len, int count,
                                            std::uint64_t seed) {
  return Generate(InteractionGrammar(), max_len, count, seed);
}

}  // namespace ensemble::grammar
