#pragma once
// Nondeterministic single-tape Turing machines with bounded-time acceptance.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tilepeps/errors.hpp"

namespace tilepeps {

enum class Move { left, stay, right };

struct Quintuple {
  std::string state;
  std::string symbol;
  std::string next_state;
  std::string write;
  Move move = Move::stay;

  friend bool operator==(const Quintuple&, const Quintuple&) = default;
};

struct TuringMachine {
  std::vector<std::string> states;
  std::vector<std::string> alphabet;
  std::string blank = "#";
  std::string initial;
  std::string accepting;
  std::vector<Quintuple> program;

  bool has_state(const std::string& q) const { return std::find(states.begin(), states.end(), q) != states.end(); }
  bool has_symbol(const std::string& s) const {
    return std::find(alphabet.begin(), alphabet.end(), s) != alphabet.end();
  }

  /// True iff no two quintuples share the same (state, symbol) prefix.
  bool deterministic() const {
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& q : program)
      if (!seen.insert({q.state, q.symbol}).second) return false;
    return true;
  }
};

/// Tape contents, head cell and state. Cells beyond the tape are blank.
struct InstantDescription {
  std::vector<std::string> tape;
  std::size_t head = 0;
  std::string state;

  friend auto operator<=>(const InstantDescription&, const InstantDescription&) = default;
};

/// Every violated well-formedness rule; empty means valid.
inline std::vector<std::string> validate_tm(const TuringMachine& tm) {
  std::vector<std::string> out;
  auto duplicates = [&](const std::vector<std::string>& v, const char* what) {
    std::set<std::string> seen;
    for (const auto& x : v)
      if (!seen.insert(x).second) out.push_back(std::string("duplicate ") + what + " '" + x + "'");
  };
  if (tm.states.empty()) out.push_back("state set is empty");
  duplicates(tm.states, "state");
  duplicates(tm.alphabet, "symbol");
  if (!tm.has_symbol(tm.blank)) out.push_back("blank symbol '" + tm.blank + "' is not in the alphabet");
  if (!tm.has_state(tm.initial)) out.push_back("initial state '" + tm.initial + "' is not in the state set");
  if (!tm.has_state(tm.accepting)) out.push_back("accepting state '" + tm.accepting + "' is not in the state set");
  for (std::size_t i = 0; i < tm.program.size(); ++i) {
    const auto& q = tm.program[i];
    const std::string at = "quintuple " + std::to_string(i) + ": ";
    if (!tm.has_state(q.state)) out.push_back(at + "state '" + q.state + "' is not in the state set");
    if (!tm.has_symbol(q.symbol)) out.push_back(at + "symbol '" + q.symbol + "' is not in the alphabet");
    if (!tm.has_state(q.next_state)) out.push_back(at + "state '" + q.next_state + "' is not in the state set");
    if (!tm.has_symbol(q.write)) out.push_back(at + "symbol '" + q.write + "' is not in the alphabet");
  }
  return out;
}

inline void require_valid(const TuringMachine& tm) {
  const auto v = validate_tm(tm);
  if (!v.empty()) throw InvalidInput("invalid Turing machine: " + v.front());
}

/// One successor per applicable quintuple, in program order. The tape grows
/// by one blank cell when the head walks off either end.
inline std::vector<InstantDescription> step(const TuringMachine& tm, const InstantDescription& id) {
  if (id.head >= id.tape.size()) throw InvalidInput("head index outside the tape");
  std::vector<InstantDescription> out;
  for (const auto& q : tm.program) {
    if (q.state != id.state || q.symbol != id.tape[id.head]) continue;
    InstantDescription next = id;
    next.state = q.next_state;
    next.tape[next.head] = q.write;
    if (q.move == Move::left) {
      if (next.head == 0)
        next.tape.insert(next.tape.begin(), tm.blank);
      else
        --next.head;
    } else if (q.move == Move::right) {
      ++next.head;
      if (next.head == next.tape.size()) next.tape.push_back(tm.blank);
    }
    out.push_back(std::move(next));
  }
  return out;
}

/// Tape of exactly `cells` cells: the word, then blanks. An empty word is
/// the all-blank tape.
inline InstantDescription initial_id(const TuringMachine& tm, const std::vector<std::string>& word,
                                     std::size_t cells) {
  if (cells < std::max<std::size_t>(word.size(), 1)) throw InvalidInput("tape bound shorter than the input");
  for (const auto& s : word)
    if (!tm.has_symbol(s) || s == tm.blank) throw InvalidInput("input symbol '" + s + "' is not a non-blank symbol");
  InstantDescription id{std::vector<std::string>(cells, tm.blank), 0, tm.initial};
  std::copy(word.begin(), word.end(), id.tape.begin());
  return id;
}

struct AcceptResult {
  bool accepted = false;
  std::vector<InstantDescription> witness;  // initial ID .. accepting ID
};

/// Strict mode demands the normalized accepting ID: accepting state, head on
/// cell 0, every cell blank.
inline bool is_accepting(const TuringMachine& tm, const InstantDescription& id, bool strict_halt) {
  if (id.state != tm.accepting) return false;
  if (!strict_halt) return true;
  return id.head == 0 && std::all_of(id.tape.begin(), id.tape.end(), [&](const auto& s) { return s == tm.blank; });
}

/// Depth-first search for a computation of at most `max_steps` steps that
/// keeps the head within the first `tape_bound` cells.
inline AcceptResult accepts_within(const TuringMachine& tm, const std::vector<std::string>& word,
                                   std::size_t max_steps, std::size_t tape_bound, bool strict_halt = false) {
  require_valid(tm);
  const InstantDescription start = initial_id(tm, word, tape_bound);

  std::map<InstantDescription, std::size_t> best_depth;  // shallowest depth an ID was expanded at
  std::vector<InstantDescription> path{start};
  auto dfs = [&](auto&& self, std::size_t depth) -> bool {
    const InstantDescription& id = path.back();
    if (is_accepting(tm, id, strict_halt)) return true;
    if (depth == max_steps) return false;
    auto [it, inserted] = best_depth.try_emplace(id, depth);
    if (!inserted) {
      if (it->second <= depth) return false;
      it->second = depth;
    }
    for (auto& next : step(tm, id)) {
      if (next.tape.size() != tape_bound) continue;  // head left the bounded region
      path.push_back(std::move(next));
      if (self(self, depth + 1)) return true;
      path.pop_back();
    }
    return false;
  };
  AcceptResult r;
  r.accepted = dfs(dfs, 0);
  if (r.accepted) r.witness = std::move(path);
  return r;
}

}  // namespace tilepeps
