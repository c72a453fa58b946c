// tilepeps: command-line front end for the reduction pipeline.
//
// Every run ends with one "RESULT: <value>" line on stdout. Exit codes:
// 0 decisive answer, 1 malformed input or usage error, 2 budget refusal.

#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tilepeps/io.hpp"
#include "tilepeps/tilepeps.hpp"

namespace {

using namespace tilepeps;
using nlohmann::json;

void result(const std::string& value) { std::cout << "RESULT: " << value << std::endl; }

Orientation parse_orientation(const std::string& s) {
  if (s == "horizontal" || s == "h") return Orientation::horizontal;
  if (s == "vertical" || s == "v") return Orientation::vertical;
  throw InvalidInput("orientation must be 'horizontal' or 'vertical'");
}

ContractionOrder parse_order(const std::string& s) {
  if (s == "rows") return ContractionOrder::rows;
  if (s == "columns") return ContractionOrder::columns;
  throw InvalidInput("order must be 'rows' or 'columns'");
}

struct Options {
  PipelineConfig cfg;
  std::string machine, word, instance, tileset, config, grid, out, h1, h2, op;
  std::string orientation = "horizontal";
  std::string order = "rows";
  std::size_t rows = 0, cols = 0, lx = 0, ly = 0;
  bool show = false;
};

void emit(const Options& o, const json& j) {
  if (o.out.empty())
    std::cout << j.dump(1) << '\n';
  else
    io::write_json_file(o.out, j);
}

int run(int argc, char** argv) {
  Options o;
  o.cfg = PipelineConfig::from_environment();

  CLI::App app{"tilepeps: Turing machines, tilings, commuting Hamiltonians and PEPS"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--threads", o.cfg.threads, "worker threads for counting (env TILEPEPS_THREADS)");
  app.add_option("--budget-cells", o.cfg.max_energy_cells, "plaquette budget for exhaustive energy minimization");
  app.add_option("--budget-row-states", o.cfg.max_row_states, "boundary-state budget for contraction");
  app.add_option("--budget-nodes", o.cfg.max_search_nodes, "search-node budget for solve and count");
  app.add_option("--rank-tol", o.cfg.rank_tol, "relative singular-value cutoff");
  app.add_option("--zero-tol", o.cfg.zero_tol, "relative float zero threshold");

  std::function<void()> action;
  auto sub = [&](const char* name, const char* help, std::function<void()> f) {
    auto* s = app.add_subcommand(name, help);
    s->callback([&action, f] { action = f; });
    return s;
  };
  auto instance_of = [&] { return io::instance_from_json(io::read_json_file(o.instance)); };
  auto tileset_of = [&] { return io::tileset_from_json(io::read_json_file(o.tileset)); };

  auto* compile = sub("compile-tm", "compile a machine and word into a tiling instance", [&] {
    const TuringMachine tm = io::tm_from_json(io::read_json_file(o.machine));
    const BTInstance inst = compile_instance(tm, io::parse_word(o.word), o.rows, o.cols);
    emit(o, io::instance_to_json(inst));
    result("colors=" + std::to_string(inst.tileset.num_colors()) + " tiles=" + std::to_string(inst.tileset.size()));
  });
  compile->add_option("--machine", o.machine)->required();
  compile->add_option("--word", o.word, "input word; comma-separated when symbols are longer than one character");
  compile->add_option("--rows", o.rows)->required();
  compile->add_option("--cols", o.cols)->required();
  compile->add_option("--out", o.out);

  auto* solve_cmd = sub("solve", "find a tiling", [&] {
    const BTInstance inst = instance_of();
    const auto t = solve(inst, o.cfg.max_search_nodes);
    if (t && o.show) std::cout << io::render_tiling(inst, *t);
    result(t ? "solvable" : "unsolvable");
  });
  solve_cmd->add_option("--instance", o.instance)->required();
  solve_cmd->add_flag("--show", o.show, "print the tiling, top row first");

  auto* count_cmd = sub("count", "count tilings", [&] {
    result(count(instance_of(), o.cfg.max_search_nodes, o.cfg.threads).str());
  });
  count_cmd->add_option("--instance", o.instance)->required();

  auto* torus = sub("torus-count", "count periodic tilings", [&] {
    result(torus_count(tileset_of(), o.lx, o.ly, o.cfg.threads, o.cfg.max_search_nodes).str());
  });
  torus->add_option("--tileset", o.tileset)->required();
  torus->add_option("--lx", o.lx)->required();
  torus->add_option("--ly", o.ly)->required();

  auto* energy = sub("energy", "energy of a plaquette configuration", [&] {
    const BTInstance inst = instance_of();
    result(std::to_string(total_energy(inst, io::config_from_json(io::read_json_file(o.config), inst.tileset))));
  });
  energy->add_option("--instance", o.instance)->required();
  energy->add_option("--config", o.config)->required();

  auto* ground = sub("ground-energy", "exact ground energy", [&] {
    result(std::to_string(ground_energy(instance_of(), o.cfg.max_energy_cells)));
  });
  ground->add_option("--instance", o.instance)->required();

  auto* clh = sub("clh", "commuting-Hamiltonian decision with thresholds 2/3 and 1/3", [&] {
    result(clh_decide(instance_of(), {2, 3}, {1, 3}, o.cfg.max_energy_cells) == ClhAnswer::yes ? "YES" : "NO");
  });
  clh->add_option("--instance", o.instance)->required();

  auto* build = sub("build-peps", "assemble the tiling PEPS", [&] {
    const auto g = assemble_peps(instance_of());
    emit(o, io::grid_to_json(g));
    result("grid " + std::to_string(g.rows) + "x" + std::to_string(g.cols));
  });
  build->add_option("--instance", o.instance)->required();
  build->add_option("--out", o.out);

  auto* zero = sub("zero-test", "decide whether a PEPS is the zero vector", [&] {
    const json j = io::read_json_file(o.grid);
    const auto order = parse_order(o.order);
    bool is_zero;
    if (io::grid_mode(j) == "integer") {
      const auto g = io::grid_from_json<BigInt>(j);
      is_zero = norm_squared(g, o.cfg.max_row_states, order) == 0;
    } else {
      const auto g = io::grid_from_json<double>(j);
      is_zero = is_zero_norm(g, norm_squared(g, o.cfg.max_row_states, order), o.cfg.zero_tol);
    }
    result(is_zero ? "zero" : "nonzero");
  });
  zero->add_option("--grid", o.grid)->required();
  zero->add_option("--order", o.order, "contraction order: rows or columns");

  auto* zero_torus = sub("zero-test-torus", "zero test of the tile PEPS on a torus", [&] {
    result(zero_test_torus(tileset_of(), o.lx, o.ly, o.cfg.max_row_states) ? "zero" : "nonzero");
  });
  zero_torus->add_option("--tileset", o.tileset)->required();
  zero_torus->add_option("--lx", o.lx)->required();
  zero_torus->add_option("--ly", o.ly)->required();

  auto* parent = sub("parent-term", "projector parent term on a plaquette pair", [&] {
    const auto a = bulk_tensor<double>(tileset_of());
    const auto h = parent_term(a, Region::pair(parse_orientation(o.orientation)), o.cfg.rank_tol);
    emit(o, io::operator_to_json(h));
    result("dim=" + std::to_string(h.dim) + " kernel=" + std::to_string(kernel(h, o.cfg.rank_tol).rank()));
  });
  parent->add_option("--tileset", o.tileset)->required();
  parent->add_option("--orientation", o.orientation, "horizontal or vertical");
  parent->add_option("--out", o.out);

  auto* check = sub("check-parent", "check Ker h = Im chi on a plaquette pair", [&] {
    const TileSet ts = tileset_of();
    const auto a = bulk_tensor<double>(ts);
    const Region region = Region::pair(parse_orientation(o.orientation));
    const OperatorMatrix h =
        o.op.empty() ? parent_term(a, region, o.cfg.rank_tol) : io::operator_from_json(io::read_json_file(o.op));
    result(check_parent_property(h, a, region, o.cfg.rank_tol) ? "true" : "false");
  });
  check->add_option("--tileset", o.tileset)->required();
  check->add_option("--orientation", o.orientation, "horizontal or vertical");
  check->add_option("--operator", o.op, "operator to check; defaults to the projector parent term");

  auto* dom = sub("dominates", "decide h1 >= h2", [&] {
    const auto a = io::operator_from_json(io::read_json_file(o.h1));
    const auto b = io::operator_from_json(io::read_json_file(o.h2));
    result(dominates(a, b) ? "true" : "false");
  });
  dom->add_option("--h1", o.h1)->required();
  dom->add_option("--h2", o.h2)->required();

  auto* verify = sub("verify-pipeline", "cross-check acceptance, tiling, energy and PEPS verdicts", [&] {
    const TuringMachine tm = io::tm_from_json(io::read_json_file(o.machine));
    const auto r = pipeline_verify(tm, io::parse_word(o.word), o.rows, o.cols, o.cfg);
    std::cout << "accepts: " << r.accepts << "\ntiling: " << r.tiling_exists << "\nzero-energy: " << r.zero_energy
              << "\nnonzero-state: " << r.state_nonzero << '\n';
    result(r.verdict());
  });
  verify->add_option("--machine", o.machine)->required();
  verify->add_option("--word", o.word);
  verify->add_option("--rows", o.rows, "h: lattice rows")->required();
  verify->add_option("--cols", o.cols, "l: tape cells")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    result("usage");
    return 1;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    result("error");
    return 1;
  }

  try {
    o.cfg.validate();
    action();
    return 0;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    result("budget-exceeded");
    return 2;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    result("error");
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    result("error");
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
