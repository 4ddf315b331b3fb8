#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "gscpm/mcts.hpp"
#include "gscpm/rng.hpp"
#include "gscpm/scheduler.hpp"

namespace gscpm {

// Iteration counts, one per task.
struct ChunkPlan {
  std::vector<std::uint64_t> per_task;
};

// Floor division; the first (n_playouts mod n_tasks) tasks get one extra
// iteration so the plan sums to n_playouts exactly.
inline ChunkPlan partition_playouts(std::uint64_t n_playouts, std::uint64_t n_tasks) {
  if (n_tasks == 0) throw std::invalid_argument("partition_playouts: n_tasks must be >= 1");
  if (n_playouts == 0) throw std::invalid_argument("partition_playouts: n_playouts must be >= 1");
  const std::uint64_t base = n_playouts / n_tasks;
  const std::uint64_t extra = n_playouts % n_tasks;
  ChunkPlan plan;
  plan.per_task.assign(n_tasks, base);
  std::fill_n(plan.per_task.begin(), extra, base + 1);
  return plan;
}

template <SearchGame Game>
struct SearchResult {
  typename Game::move_type best;
  std::unique_ptr<TreeNode<Game>> root;
};

/// Grain-size controlled parallel search.
///
/// Splits the playout budget into `config.n_tasks` chunks (clamped to the
/// budget), submits one uct_search task per chunk against a shared root, waits
/// for the batch and returns the most visited root move together with the tree.
/// Task t draws from stream_for_task(config.seed, t).
template <SearchGame Game>
SearchResult<Game> gscpm_search_tree(const Game& board, const SearchConfig& config,
                                     Scheduler& scheduler) {
  config.validate();
  if (board.winner()) throw std::invalid_argument("gscpm_search: position is already decided");
  if (board.legal_move_count() == 0) throw std::invalid_argument("gscpm_search: no legal moves");

  auto root = TreeNode<Game>::make_root(board);
  const auto plan =
      partition_playouts(config.n_playouts, std::min(config.n_tasks, config.n_playouts));

  TreeNode<Game>& shared_root = *root;
  for (std::uint64_t t = 0; t < plan.per_task.size(); ++t) {
    scheduler.submit([&shared_root, &board, &config, t, iterations = plan.per_task[t]] {
      RngStream rng(config.seed, t);
      uct_search(shared_root, board, iterations, rng, config.cp);
    });
  }
  scheduler.wait();

  auto best = best_child(*root);
  return {best, std::move(root)};
}

template <SearchGame Game>
typename Game::move_type gscpm_search(const Game& board, const SearchConfig& config,
                                      Scheduler& scheduler) {
  return gscpm_search_tree(board, config, scheduler).best;
}

}  // namespace gscpm
