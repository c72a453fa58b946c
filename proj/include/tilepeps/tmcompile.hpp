#pragma once
// Compiles a Turing machine and input word into a bounded tiling instance.
//
// One tile row performs one machine step: the bottom colours of a row spell
// the current ID and the top colours the next one. The head cell carries a
// SymbolState colour; a head that moves hands its new state sideways as a
// State colour to the neighbour, which becomes the new head cell. Unlabelled
// sides are Blank, and so are the left/right lattice boundaries, which keeps
// the head on the tape.
//
// The top row is reserved for the accepting ID: its left boundary link is
// fixed to sq(#,qF), which only the accept-anchor tile carries on a side.
// Hence an h-row instance is solvable iff the machine reaches the normalized
// accepting ID (qF, head on cell 0, blank tape) within h-1 steps. Computations
// that finish early idle on the identity tile of sq(#,qF).

#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "tilepeps/errors.hpp"
#include "tilepeps/tiling.hpp"
#include "tilepeps/turing.hpp"

namespace tilepeps {

struct SymbolColor {
  std::string symbol;
  friend auto operator<=>(const SymbolColor&, const SymbolColor&) = default;
};
struct SymbolStateColor {
  std::string symbol;
  std::string state;
  friend auto operator<=>(const SymbolStateColor&, const SymbolStateColor&) = default;
};
struct StateColor {
  std::string state;
  friend auto operator<=>(const StateColor&, const StateColor&) = default;
};
struct BlankColor {
  friend auto operator<=>(const BlankColor&, const BlankColor&) = default;
};

using CompiledColor = std::variant<SymbolColor, SymbolStateColor, StateColor, BlankColor>;

inline std::string color_name(const CompiledColor& c) {
  struct {
    std::string operator()(const SymbolColor& x) const { return "s:" + x.symbol; }
    std::string operator()(const SymbolStateColor& x) const { return "sq:" + x.symbol + "," + x.state; }
    std::string operator()(const StateColor& x) const { return "q:" + x.state; }
    std::string operator()(const BlankColor&) const { return "blank"; }
  } visitor;
  return std::visit(visitor, c);
}

/// |Sigma| + |Sigma||K| + |K| + 1.
inline std::size_t color_count_formula(const TuringMachine& tm) {
  const std::size_t k = tm.states.size(), s = tm.alphabet.size();
  return s + s * k + k + 1;
}

/// Colour order: symbols, symbol-states (symbol-major), states, blank.
inline std::vector<CompiledColor> compiled_colors(const TuringMachine& tm) {
  std::vector<CompiledColor> out;
  for (const auto& s : tm.alphabet) out.emplace_back(SymbolColor{s});
  for (const auto& s : tm.alphabet)
    for (const auto& q : tm.states) out.emplace_back(SymbolStateColor{s, q});
  for (const auto& q : tm.states) out.emplace_back(StateColor{q});
  out.emplace_back(BlankColor{});
  return out;
}

/// States entered both by a Left move and by a Right move. The side colours
/// carry only the state, so for such a state a left-receiver next to a
/// right-receiver would conjure two heads out of nothing.
inline std::vector<std::string> entry_direction_conflicts(const TuringMachine& tm) {
  std::set<std::string> by_left, by_right;
  for (const auto& q : tm.program) {
    if (q.move == Move::left) by_left.insert(q.next_state);
    if (q.move == Move::right) by_right.insert(q.next_state);
  }
  std::vector<std::string> out;
  for (const auto& q : tm.states)
    if (by_left.contains(q) && by_right.contains(q)) out.push_back(q);
  return out;
}

namespace detail {

class ColorTable {
 public:
  explicit ColorTable(const TuringMachine& tm) : colors_(compiled_colors(tm)) {
    for (std::size_t i = 0; i < colors_.size(); ++i) index_.emplace(colors_[i], static_cast<Color>(i));
  }
  Color operator()(const CompiledColor& c) const { return index_.at(c); }
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& c : colors_) out.push_back(color_name(c));
    return out;
  }

 private:
  std::vector<CompiledColor> colors_;
  std::map<CompiledColor, Color> index_;
};

/// Tile emission without the entry-direction check.
inline TileSet emit_tiles(const TuringMachine& tm) {
  require_valid(tm);
  const ColorTable col(tm);
  const Color blank = col(BlankColor{});
  std::vector<Tile> tiles;
  std::set<Tile> seen;
  auto add = [&](Tile t) {
    if (seen.insert(t).second) tiles.push_back(t);
  };
  auto sym = [&](const std::string& s) { return col(SymbolColor{s}); };
  auto head = [&](const std::string& s, const std::string& q) { return col(SymbolStateColor{s, q}); };
  auto state = [&](const std::string& q) { return col(StateColor{q}); };

  for (const auto& q : tm.program) {
    const Color bottom = head(q.symbol, q.state);
    switch (q.move) {
      case Move::stay:
        add({head(q.write, q.next_state), bottom, blank, blank});
        break;
      case Move::left:
        add({sym(q.write), bottom, state(q.next_state), blank});
        for (const auto& s : tm.alphabet) add({head(s, q.next_state), sym(s), blank, state(q.next_state)});
        break;
      case Move::right:
        add({sym(q.write), bottom, blank, state(q.next_state)});
        for (const auto& s : tm.alphabet) add({head(s, q.next_state), sym(s), state(q.next_state), blank});
        break;
    }
  }
  for (const auto& s : tm.alphabet) add({sym(s), sym(s), blank, blank});
  const Color accept = head(tm.blank, tm.accepting);
  add({accept, accept, blank, blank});   // idle
  add({accept, accept, accept, blank});  // accept anchor, top row only
  add({blank, blank, blank, blank});     // empty tile
  return TileSet(col.names(), std::move(tiles));
}

}  // namespace detail

inline TileSet compile_tiles(const TuringMachine& tm) {
  require_valid(tm);
  if (const auto bad = entry_direction_conflicts(tm); !bad.empty())
    throw InvalidInput("state '" + bad.front() + "' is entered by both Left and Right moves; split it first");
  return detail::emit_tiles(tm);
}

/// Asserts that the formula matches the emitted colour set.
inline std::size_t color_count(const TuringMachine& tm) {
  const std::size_t n = color_count_formula(tm);
  if (detail::emit_tiles(tm).num_colors() != n) throw std::logic_error("compiled colour set disagrees with formula");
  return n;
}

/// Instance with `rows` x `cols` plaquettes: the initial ID on the bottom
/// boundary and the normalized accepting ID on the top boundary.
inline BTInstance compile_instance(const TuringMachine& tm, const std::vector<std::string>& word, std::size_t rows,
                                   std::size_t cols) {
  if (rows < 2) throw InvalidInput("compiled instances need at least 2 rows");
  if (cols < word.size() + 1) throw InvalidInput("need at least |w|+1 columns for the input word");
  TileSet ts = compile_tiles(tm);
  const InstantDescription start = initial_id(tm, word, cols);
  const detail::ColorTable col(tm);
  const Color blank = col(BlankColor{});
  const Color accept = col(SymbolStateColor{tm.blank, tm.accepting});

  BTInstance inst;
  inst.rows = rows;
  inst.cols = cols;
  inst.tileset = std::move(ts);
  for (std::size_t c = 0; c < cols; ++c) {
    inst.boundary.bottom.push_back(c == 0 ? col(SymbolStateColor{start.tape[0], tm.initial})
                                          : col(SymbolColor{start.tape[c]}));
    inst.boundary.top.push_back(c == 0 ? accept : col(SymbolColor{tm.blank}));
  }
  inst.boundary.left.assign(rows, blank);
  inst.boundary.left.back() = accept;
  inst.boundary.right.assign(rows, blank);
  return inst;
}

}  // namespace tilepeps
