#pragma once
// JSON encodings of machines, instances, configurations, tilings, PEPS grids
// and operators.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tilepeps/errors.hpp"
#include "tilepeps/hamiltonian.hpp"
#include "tilepeps/parent.hpp"
#include "tilepeps/tensor.hpp"
#include "tilepeps/tiling.hpp"
#include "tilepeps/turing.hpp"

namespace tilepeps::io {

using nlohmann::json;

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidInput("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << j.dump(1) << '\n';
}

namespace detail {

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidInput(std::string("missing key '") + key + "'");
  return j.at(key);
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("bad value for '") + key + "': " + e.what());
  }
}

inline Color color_of(const TileSet& ts, const std::vector<std::string>& colors, const json& v) {
  if (v.is_number_unsigned()) {
    const auto c = v.get<std::uint64_t>();
    if (c >= colors.size()) throw InvalidInput("colour index out of range");
    return static_cast<Color>(c);
  }
  if (v.is_string()) {
    for (std::size_t i = 0; i < colors.size(); ++i)
      if (colors[i] == v.get<std::string>()) return static_cast<Color>(i);
    throw InvalidInput("unknown colour '" + v.get<std::string>() + "'");
  }
  (void)ts;
  throw InvalidInput("colours are names or indices");
}

}  // namespace detail

// ---- Turing machines ----

inline Move move_from_string(const std::string& s) {
  if (s == "L" || s == "Left" || s == "left") return Move::left;
  if (s == "S" || s == "Stay" || s == "stay") return Move::stay;
  if (s == "R" || s == "Right" || s == "right") return Move::right;
  throw InvalidInput("unknown move '" + s + "'");
}

inline const char* move_to_string(Move m) { return m == Move::left ? "L" : m == Move::right ? "R" : "S"; }

inline TuringMachine tm_from_json(const json& j) {
  TuringMachine tm;
  tm.states = detail::get<std::vector<std::string>>(j, "states");
  tm.alphabet = detail::get<std::vector<std::string>>(j, "alphabet");
  tm.blank = detail::get<std::string>(j, "blank");
  tm.initial = detail::get<std::string>(j, "initial");
  tm.accepting = detail::get<std::string>(j, "accepting");
  for (const auto& q : detail::field(j, "program")) {
    if (!q.is_array() || q.size() != 5) throw InvalidInput("program entries are 5-element lists");
    for (const auto& x : q)
      if (!x.is_string()) throw InvalidInput("program entries hold strings");
    tm.program.push_back({q[0].get<std::string>(), q[1].get<std::string>(), q[2].get<std::string>(),
                          q[3].get<std::string>(), move_from_string(q[4].get<std::string>())});
  }
  require_valid(tm);
  return tm;
}

inline json tm_to_json(const TuringMachine& tm) {
  json prog = json::array();
  for (const auto& q : tm.program) prog.push_back({q.state, q.symbol, q.next_state, q.write, move_to_string(q.move)});
  return {{"states", tm.states}, {"alphabet", tm.alphabet}, {"blank", tm.blank},
          {"initial", tm.initial}, {"accepting", tm.accepting}, {"program", prog}};
}

/// "a,b,c" splits on commas; otherwise one symbol per character.
inline std::vector<std::string> parse_word(const std::string& w) {
  std::vector<std::string> out;
  if (w.find(',') != std::string::npos) {
    std::stringstream ss(w);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) throw InvalidInput("empty symbol in word");
      out.push_back(item);
    }
  } else {
    for (char c : w) out.emplace_back(1, c);
  }
  return out;
}

// ---- tile sets and instances ----

inline TileSet tileset_from_json(const json& j) {
  const auto colors = detail::get<std::vector<std::string>>(j, "colors");
  std::vector<Tile> tiles;
  TileSet empty;
  for (const auto& t : detail::field(j, "tiles")) {
    if (!t.is_array() || t.size() != 4) throw InvalidInput("tiles are [up, down, left, right] lists");
    tiles.push_back({detail::color_of(empty, colors, t[0]), detail::color_of(empty, colors, t[1]),
                     detail::color_of(empty, colors, t[2]), detail::color_of(empty, colors, t[3])});
  }
  return TileSet(colors, std::move(tiles));
}

inline json tileset_to_json(const TileSet& ts) {
  const auto& c = ts.colors();
  json tiles = json::array();
  for (const Tile& t : ts.tiles()) tiles.push_back({c[t.up], c[t.down], c[t.left], c[t.right]});
  return {{"colors", c}, {"tiles", tiles}};
}

inline BTInstance instance_from_json(const json& j) {
  BTInstance inst;
  inst.tileset = tileset_from_json(j);
  inst.rows = detail::get<std::size_t>(j, "rows");
  inst.cols = detail::get<std::size_t>(j, "cols");
  const json& b = detail::field(j, "boundary");
  auto side = [&](const char* key) {
    std::vector<Color> out;
    const json& v = detail::field(b, key);
    if (!v.is_array()) throw InvalidInput(std::string("boundary '") + key + "' must be a list");
    for (const auto& x : v) out.push_back(detail::color_of(inst.tileset, inst.tileset.colors(), x));
    return out;
  };
  inst.boundary = {side("top"), side("bottom"), side("left"), side("right")};
  inst.validate();
  return inst;
}

inline json instance_to_json(const BTInstance& inst) {
  json j = tileset_to_json(inst.tileset);
  const auto& c = inst.tileset.colors();
  auto names = [&](const std::vector<Color>& v) {
    json a = json::array();
    for (Color x : v) a.push_back(c[x]);
    return a;
  };
  j["rows"] = inst.rows;
  j["cols"] = inst.cols;
  j["boundary"] = {{"top", names(inst.boundary.top)},
                   {"bottom", names(inst.boundary.bottom)},
                   {"left", names(inst.boundary.left)},
                   {"right", names(inst.boundary.right)}};
  return j;
}

// ---- configurations and tilings ----

inline PlaquetteConfig config_from_json(const json& j, const TileSet& ts) {
  PlaquetteConfig cfg;
  cfg.rows = detail::get<std::size_t>(j, "rows");
  cfg.cols = detail::get<std::size_t>(j, "cols");
  for (const auto& p : detail::field(j, "plaquettes")) {
    if (!p.is_array() || p.size() != 4) throw InvalidInput("plaquettes are [up, down, left, right] lists");
    cfg.plaquettes.push_back({detail::color_of(ts, ts.colors(), p[0]), detail::color_of(ts, ts.colors(), p[1]),
                              detail::color_of(ts, ts.colors(), p[2]), detail::color_of(ts, ts.colors(), p[3])});
  }
  if (cfg.plaquettes.size() != cfg.rows * cfg.cols) throw InvalidInput("plaquette count must be rows*cols");
  return cfg;
}

inline json config_to_json(const PlaquetteConfig& cfg, const TileSet& ts) {
  json p = json::array();
  const auto& c = ts.colors();
  for (const Tile& t : cfg.plaquettes) p.push_back({c[t.up], c[t.down], c[t.left], c[t.right]});
  return {{"rows", cfg.rows}, {"cols", cfg.cols}, {"plaquettes", p}};
}

/// Textual dump, top row first: each plaquette as u/d/l/r colour names.
inline std::string render_tiling(const BTInstance& inst, const Tiling& t) {
  std::ostringstream out;
  const auto& c = inst.tileset.colors();
  for (std::size_t r = t.rows; r-- > 0;) {
    for (std::size_t col = 0; col < t.cols; ++col) {
      const Tile& w = inst.tileset.tiles()[t.at(r, col)];
      out << (col ? "  " : "") << '(' << c[w.up] << ' ' << c[w.down] << ' ' << c[w.left] << ' ' << c[w.right] << ')';
    }
    out << '\n';
  }
  return out.str();
}

// ---- tensors and grids ----

inline constexpr std::uint64_t kDenseEntryLimit = 65536;

template <class Scalar>
json scalar_to_json(const Scalar& v) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return v;
  } else {
    if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
      return v.template convert_to<std::int64_t>();
    return v.str();
  }
}

template <class Scalar>
Scalar scalar_from_json(const json& v) {
  if constexpr (std::is_same_v<Scalar, double>) {
    if (!v.is_number()) throw InvalidInput("float entries must be numbers");
    return v.get<double>();
  } else {
    if (v.is_number_integer()) return Scalar(v.get<std::int64_t>());
    if (v.is_string()) {
      try {
        return Scalar(v.get<std::string>());
      } catch (const std::exception&) {
      }
    }
    throw InvalidInput("integer entries must be integers or decimal strings");
  }
}

/// Dense row-major "entries" for small tensors, [flat, value] "nonzeros"
/// otherwise.
template <class Scalar>
json tensor_to_json(const Tensor<Scalar>& t) {
  json legs = json::array();
  for (const auto& l : t.legs()) legs.push_back({{"label", leg_name(l.label)}, {"dim", l.dim}});
  json j{{"legs", legs}};
  if (t.size() <= kDenseEntryLimit) {
    json e = json::array();
    for (const auto& v : t.dense()) e.push_back(scalar_to_json(v));
    j["entries"] = e;
  } else {
    json nz = json::array();
    for (const auto& [i, v] : t.nonzeros()) nz.push_back({i, scalar_to_json(v)});
    j["nonzeros"] = nz;
  }
  return j;
}

template <class Scalar>
Tensor<Scalar> tensor_from_json(const json& j) {
  std::vector<LegSpec> legs;
  for (const auto& l : detail::field(j, "legs"))
    legs.push_back({leg_from_name(detail::get<std::string>(l, "label")), detail::get<std::uint64_t>(l, "dim")});
  if (j.contains("entries")) {
    std::vector<Scalar> values;
    for (const auto& v : j.at("entries")) values.push_back(scalar_from_json<Scalar>(v));
    return Tensor<Scalar>::from_dense(std::move(legs), values);
  }
  std::vector<std::pair<std::uint64_t, Scalar>> entries;
  for (const auto& e : detail::field(j, "nonzeros")) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned())
      throw InvalidInput("nonzeros are [flat index, value] pairs");
    entries.emplace_back(e[0].get<std::uint64_t>(), scalar_from_json<Scalar>(e[1]));
  }
  return Tensor<Scalar>(std::move(legs), std::move(entries));
}

template <class Scalar>
json grid_to_json(const PepsGrid<Scalar>& g) {
  json sites = json::array();
  for (const auto& t : g.sites) sites.push_back(tensor_to_json(t));
  return {{"mode", std::is_same_v<Scalar, double> ? "float" : "integer"},
          {"rows", g.rows},
          {"cols", g.cols},
          {"periodic", g.periodic},
          {"tensors", sites}};
}

template <class Scalar>
PepsGrid<Scalar> grid_from_json(const json& j) {
  PepsGrid<Scalar> g;
  g.rows = detail::get<std::size_t>(j, "rows");
  g.cols = detail::get<std::size_t>(j, "cols");
  g.periodic = j.contains("periodic") ? detail::get<bool>(j, "periodic") : false;
  for (const auto& t : detail::field(j, "tensors")) g.sites.push_back(tensor_from_json<Scalar>(t));
  g.validate();
  return g;
}

inline std::string grid_mode(const json& j) {
  const std::string mode = j.contains("mode") ? detail::get<std::string>(j, "mode") : "integer";
  if (mode != "integer" && mode != "float") throw InvalidInput("grid mode must be 'integer' or 'float'");
  return mode;
}

// ---- operators ----

inline constexpr std::uint64_t kDenseOperatorLimit = 1024;

/// Dense row-major "entries" with "dim" for small operators; larger ones keep
/// the support block and the identity weight elsewhere.
inline json operator_to_json(const OperatorMatrix& h) {
  if (h.dim <= kDenseOperatorLimit) {
    const Eigen::MatrixXd m = h.to_dense();
    json e = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) e.push_back(m(r, c));
    return {{"dim", h.dim}, {"entries", e}};
  }
  json block = json::array();
  for (Eigen::Index r = 0; r < h.block.rows(); ++r)
    for (Eigen::Index c = 0; c < h.block.cols(); ++c) block.push_back(h.block(r, c));
  return {{"dim", h.dim}, {"support", h.support}, {"block", block}, {"identity_weight", h.identity_weight}};
}

inline OperatorMatrix operator_from_json(const json& j) {
  const auto dim = detail::get<std::uint64_t>(j, "dim");
  auto values = [&](const char* key, std::uint64_t n) {
    const auto v = detail::get<std::vector<double>>(j, key);
    if (v.size() != n * n) throw InvalidInput(std::string("'") + key + "' must hold a square row-major matrix");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::uint64_t r = 0; r < n; ++r)
      for (std::uint64_t c = 0; c < n; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v[r * n + c];
    return m;
  };
  OperatorMatrix h;
  if (j.contains("entries")) {
    if (dim > 8192) throw BudgetExceeded("dense operator too large");
    h = OperatorMatrix::dense(values("entries", dim));
  } else {
    h.dim = dim;
    h.support = detail::get<std::vector<std::uint64_t>>(j, "support");
    h.block = values("block", h.support.size());
    h.identity_weight = detail::get<double>(j, "identity_weight");
  }
  h.validate();
  if (h.hermiticity_defect() > 1e-12) throw InvalidInput("operator is not Hermitian");
  return h;
}

}  // namespace tilepeps::io
