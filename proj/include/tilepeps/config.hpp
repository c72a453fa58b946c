#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>

#include "tilepeps/errors.hpp"

namespace tilepeps {

enum class ArithmeticMode { integer, floating };

/// Size budgets and tolerances shared by the pipeline stages.
struct PipelineConfig {
  std::size_t max_energy_cells = 12;        // exhaustive ground-energy minimization
  std::size_t max_row_states = 4096;        // double-layer boundary state (4^6)
  std::uint64_t max_search_nodes = 50'000'000;
  double rank_tol = 1e-10;
  double zero_tol = 1e-20;
  unsigned threads = 1;
  ArithmeticMode mode = ArithmeticMode::integer;

  void validate() const {
    if (max_energy_cells == 0 || max_row_states == 0 || max_search_nodes == 0 || threads == 0)
      throw InvalidInput("budgets must be positive");
    if (!(rank_tol > 0.0 && rank_tol < 1e-3) || !(zero_tol > 0.0 && zero_tol < 1e-3))
      throw InvalidInput("tolerances must lie in (0, 1e-3)");
  }

  /// Defaults overridden by TILEPEPS_BUDGET_CELLS and TILEPEPS_THREADS.
  static PipelineConfig from_environment() {
    PipelineConfig cfg;
    if (const char* cells = std::getenv("TILEPEPS_BUDGET_CELLS")) cfg.max_energy_cells = parse_positive(cells, "TILEPEPS_BUDGET_CELLS");
    if (const char* threads = std::getenv("TILEPEPS_THREADS"))
      cfg.threads = static_cast<unsigned>(parse_positive(threads, "TILEPEPS_THREADS"));
    return cfg;
  }

 private:
  static std::size_t parse_positive(const std::string& text, const char* name) {
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(text, &pos);
      if (pos == text.size() && v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw InvalidInput(std::string(name) + " must be a positive integer");
  }
};

}  // namespace tilepeps
