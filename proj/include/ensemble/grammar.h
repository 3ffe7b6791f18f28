#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ensemble/terminal.h"

namespace ensemble::grammar {

struct Nonterminal {
  int id = 0;
  friend bool operator==(const Nonterminal&, const Nonterminal&) = default;
};

using Symbol = std::variant<Terminal, Nonterminal>;

struct Production {
  Nonterminal lhs;
  std::vector<Symbol> rhs;
};

// A context-free grammar over the terminal alphabet. Nonterminals are
// numbered densely; 'names' gives their display names.
struct ContextFreeGrammar {
  std::vector<std::string> names;
  Nonterminal start;
  std::vector<Production> productions;

  Nonterminal Add(std::string name);
  void Rule(Nonterminal lhs, std::vector<Symbol> rhs);
};

// The interaction grammar:
//   S -> O A | A O
//   O -> δ | δD | ω | ωD | N | ND
//   A -> α | αD | V | VD | P | PD
//   D -> δ | δD | P | PD | N | ND | y | yD | n | nD
const ContextFreeGrammar& InteractionGrammar();

// Chomsky normal form used by the recognizer: binary rules A -> B C and
// lexical rules A -> t. Construction rejects epsilon productions.
class CnfGrammar {
 public:
  explicit CnfGrammar(const ContextFreeGrammar& grammar);

  // CYK recognition.
  bool Accepts(const std::vector<Terminal>& sequence) const;

  std::size_t nonterminal_count() const { return count_; }

 private:
  struct Binary {
    int lhs, left, right;
  };
  std::size_t count_ = 0;
  int start_ = 0;
  std::vector<Binary> binary_;
  // lexical_[t] = bitmask of nonterminals deriving terminal t
  std::uint64_t lexical_[kTerminalCount] = {};
};

// True iff 'sequence' is in the interaction language.
bool Accepts(const std::vector<Terminal>& sequence);

// Samples 'count' sentences of length <= max_len, reproducible from 'seed'.
// Each nonterminal expands by a uniform choice among the productions that
// can still complete within the remaining length budget. Throws
// Error(kGrammar) when max_len < 2 or count < 1.
std::vector<std::vector<Terminal>> Generate(int max_len, int count,
                                            std::uint64_t seed);

// Same sampler over an arbitrary grammar.
std::vector<std::vector<Terminal>> Generate(const ContextFreeGrammar& grammar,
                                            int max_len, int count,
                                            std::uint64_t seed);

}  // namespace ensemble::grammar
