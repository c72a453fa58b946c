#pragma once
// The full reduction chain on one compiled instance: machine acceptance,
// tiling existence, zero ground energy and a nonzero PEPS must agree.

#include <string>
#include <vector>

#include "tilepeps/config.hpp"
#include "tilepeps/errors.hpp"
#include "tilepeps/hamiltonian.hpp"
#include "tilepeps/tensor.hpp"
#include "tilepeps/tiling.hpp"
#include "tilepeps/tmcompile.hpp"
#include "tilepeps/turing.hpp"

namespace tilepeps {

struct PipelineReport {
  bool accepts = false;
  bool tiling_exists = false;
  bool zero_energy = false;
  bool state_nonzero = false;

  bool all_agree() const {
    return accepts == tiling_exists && tiling_exists == zero_energy && zero_energy == state_nonzero;
  }
  /// "positive", "negative" or "disagree".
  std::string verdict() const {
    if (!all_agree()) return "disagree";
    return accepts ? "positive" : "negative";
  }
};

namespace detail {

template <class F>
auto run_stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const BudgetExceeded& e) {
    throw BudgetExceeded(std::string(name) + ": " + e.what());
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string(name) + ": " + e.what());
  }
}

}  // namespace detail

/// h rows (h-1 machine steps) over l tape cells, strict acceptance.
inline PipelineReport pipeline_verify(const TuringMachine& tm, const std::vector<std::string>& word, std::size_t h,
                                      std::size_t l, const PipelineConfig& cfg = {}) {
  cfg.validate();
  const BTInstance inst = detail::run_stage("compile", [&] { return compile_instance(tm, word, h, l); });
  PipelineReport r;
  r.accepts = detail::run_stage("accepts_within", [&] { return accepts_within(tm, word, h - 1, l, true).accepted; });
  r.tiling_exists = detail::run_stage("solve", [&] { return solve(inst, cfg.max_search_nodes).has_value(); });
  r.zero_energy = detail::run_stage("ground_energy", [&] { return ground_energy(inst, cfg.max_energy_cells) == 0; });
  r.state_nonzero =
      detail::run_stage("zero_test_open", [&] { return !zero_test_open(assemble_peps(inst), cfg.max_row_states); });
  return r;
}

}  // namespace tilepeps
