#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gscpm/rng.hpp"

namespace gscpm {

// What the search needs from a two-player game position.
template <class G>
concept SearchGame = std::copyable<G> && requires(G g, const G cg, RngStream& rng,
                                                  typename G::move_type m,
                                                  std::vector<typename G::move_type>& out) {
  typename G::move_type;
  typename G::player_type;
  { cg.to_move() } -> std::same_as<typename G::player_type>;
  { cg.winner() } -> std::same_as<std::optional<typename G::player_type>>;
  { cg.legal_move_count() } -> std::convertible_to<std::size_t>;
  cg.legal_moves(out);
  g.play(m);
  { g.playout(rng) } -> std::same_as<typename G::player_type>;
};

namespace detail {

// Same value as uct_score with ln(n_parent) supplied by the caller.
inline double uct_from_log(std::uint64_t wins, std::uint64_t visits, double log_parent,
                           double cp) noexcept {
  const double n = static_cast<double>(visits);
  return static_cast<double>(wins) / n + cp * std::sqrt(log_parent / n);
}

}  // namespace detail

/// UCT value of a child: w/n + cp * sqrt(ln(n_parent) / n).
inline double uct_score(std::uint64_t wins, std::uint64_t visits, std::uint64_t parent_visits,
                        double cp) {
  if (visits == 0) throw std::invalid_argument("uct_score: child has no visits");
  if (parent_visits == 0) throw std::invalid_argument("uct_score: parent has no visits");
  return detail::uct_from_log(wins, visits, std::log(static_cast<double>(parent_visits)), cp);
}

struct SearchConfig {
  std::uint64_t n_playouts = std::uint64_t{1} << 17;
  std::uint64_t n_tasks = 1;
  double cp = 1.0;
  std::uint64_t seed = 0;
  std::size_t board_size = 11;

  void validate() const {
    if (n_playouts < 1) throw std::invalid_argument("SearchConfig: n_playouts must be >= 1");
    if (n_tasks < 1) throw std::invalid_argument("SearchConfig: n_tasks must be >= 1");
    if (!(cp >= 0.0)) throw std::invalid_argument("SearchConfig: cp must be >= 0");
  }
};

/// Node of the shared search tree.
///
/// Counters are atomics updated without locks. Children live in a contiguous
/// slot array sized to the number of legal moves in the node's position; slots
/// are constructed in order under `guard_` and published by a release store to
/// `child_count_`, so a reader that loads `child_count_` with acquire sees fully
/// built children in every slot below it. Slots never move once built. The
/// slot and untried-move arrays are allocated the first time the node is
/// expanded (root: at construction), which keeps never-expanded leaves small.
template <SearchGame Game>
class TreeNode {
public:
  using move_type = typename Game::move_type;
  using player_type = typename Game::player_type;

  TreeNode(TreeNode* parent, std::optional<move_type> move, player_type player_just_moved,
           std::uint32_t n_legal)
      : parent_(parent),
        move_(move),
        player_just_moved_(player_just_moved),
        capacity_(n_legal),
        untried_left_(n_legal) {}

  TreeNode(const TreeNode&) = delete;
  TreeNode& operator=(const TreeNode&) = delete;

  ~TreeNode() {
    if (slots_ == nullptr) return;
    const std::uint32_t built = child_count_.load(std::memory_order_acquire);
    for (std::uint32_t i = 0; i < built; ++i) std::destroy_at(slots_ + i);
    std::allocator<TreeNode>{}.deallocate(slots_, capacity_);
  }

  static std::unique_ptr<TreeNode> make_root(const Game& board) {
    const auto n_legal =
        board.winner() ? 0u : static_cast<std::uint32_t>(board.legal_move_count());
    auto root = std::make_unique<TreeNode>(nullptr, std::nullopt, opponent(board.to_move()), n_legal);
    root->allocate_slots(board);
    return root;
  }

  TreeNode* parent() const noexcept { return parent_; }
  const std::optional<move_type>& move() const noexcept { return move_; }
  player_type player_just_moved() const noexcept { return player_just_moved_; }

  std::uint64_t wins() const noexcept { return wins_.load(std::memory_order_relaxed); }
  std::uint64_t visits() const noexcept { return visits_.load(std::memory_order_relaxed); }
  std::uint32_t capacity() const noexcept { return capacity_; }
  std::uint32_t child_count() const noexcept { return child_count_.load(std::memory_order_acquire); }
  std::uint32_t untried_count() const noexcept { return untried_left_.load(std::memory_order_acquire); }
  bool fully_expanded() const noexcept { return untried_count() == 0; }

  // Valid for i < child_count().
  TreeNode& child(std::uint32_t i) const noexcept { return slots_[i]; }

  // Overwrites the counters; only for building fixtures while no search runs.
  void set_counters(std::uint64_t wins, std::uint64_t visits) noexcept {
    wins_.store(static_cast<std::uint32_t>(wins), std::memory_order_relaxed);
    visits_.store(static_cast<std::uint32_t>(visits), std::memory_order_relaxed);
  }

  void record(player_type winner) noexcept {
    visits_.fetch_add(1, std::memory_order_relaxed);
    if (winner == player_just_moved_) wins_.fetch_add(1, std::memory_order_relaxed);
  }

  // Claims one random untried move, plays it on `board` and returns the new
  // child. Returns nullptr if nothing is left to expand.
  TreeNode* expand_one(Game& board, RngStream& rng) {
    if (untried_left_.load(std::memory_order_acquire) == 0) return nullptr;
    std::lock_guard lock(guard_);
    const std::uint32_t left = untried_left_.load(std::memory_order_relaxed);
    if (left == 0) return nullptr;
    if (!untried_) allocate_slots(board);

    const auto pick = static_cast<std::uint32_t>(rng.next_below(left));
    const move_type m = untried_[pick];
    std::swap(untried_[pick], untried_[left - 1]);

    const player_type mover = board.to_move();
    board.play(m);
    const auto n_legal =
        board.winner() ? 0u : static_cast<std::uint32_t>(board.legal_move_count());
    const std::uint32_t slot = child_count_.load(std::memory_order_relaxed);
    TreeNode* child = std::construct_at(slots_ + slot, this, m, mover, n_legal);
    child_count_.store(slot + 1, std::memory_order_release);
    untried_left_.store(left - 1, std::memory_order_release);
    return child;
  }

private:
  // Caller holds guard_ (or owns the node exclusively). `board` is this node's position.
  void allocate_slots(const Game& board) {
    untried_ = std::make_unique<move_type[]>(capacity_);
    if (capacity_ == 0) return;
    slots_ = std::allocator<TreeNode>{}.allocate(capacity_);
    std::vector<move_type> moves;
    board.legal_moves(moves);
    if (moves.size() != capacity_)
      throw std::logic_error("TreeNode: position does not match the node");
    std::copy(moves.begin(), moves.end(), untried_.get());
  }

  TreeNode* parent_;
  std::optional<move_type> move_;
  player_type player_just_moved_;
  std::atomic<std::uint32_t> wins_{0};
  std::atomic<std::uint32_t> visits_{0};
  std::uint32_t capacity_;
  std::atomic<std::uint32_t> child_count_{0};
  std::atomic<std::uint32_t> untried_left_;
  TreeNode* slots_ = nullptr;  // raw storage for capacity_ children
  std::unique_ptr<move_type[]> untried_;
  std::mutex guard_;
};

// Descends through fully expanded nodes by maximal UCT value, replaying the
// moves on `board`. Children seen with zero visits (mid-backup in another
// task) are taken first; ties go to the lowest slot.
template <SearchGame Game>
TreeNode<Game>* select(TreeNode<Game>& root, Game& board, double cp) {
  TreeNode<Game>* node = &root;
  for (;;) {
    if (!node->fully_expanded()) return node;
    const std::uint32_t count = node->child_count();
    if (count == 0) return node;
    const std::uint64_t parent_visits = std::max<std::uint64_t>(node->visits(), 1);
    const double log_parent = std::log(static_cast<double>(parent_visits));
    TreeNode<Game>* best = nullptr;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::uint32_t i = 0; i < count; ++i) {
      TreeNode<Game>& c = node->child(i);
      const std::uint64_t n = c.visits();
      const double score = n == 0 ? std::numeric_limits<double>::infinity()
                                  : detail::uct_from_log(std::min(c.wins(), n), n, log_parent, cp);
      if (score > best_score) {
        best_score = score;
        best = &c;
      }
    }
    board.play(*best->move());
    node = best;
  }
}

template <SearchGame Game>
TreeNode<Game>* expand(TreeNode<Game>& node, Game& board, RngStream& rng) {
  if (auto* child = node.expand_one(board, rng)) return child;
  return &node;
}

// Credits one playout result to `node` and every ancestor.
template <SearchGame Game>
void backup(TreeNode<Game>& node, typename Game::player_type winner) {
  for (TreeNode<Game>* n = &node; n != nullptr; n = n->parent()) n->record(winner);
}

// Runs `iterations` select/expand/playout/backup rounds on the shared tree.
// Safe to call concurrently on the same root.
template <SearchGame Game>
void uct_search(TreeNode<Game>& root, const Game& root_board, std::uint64_t iterations,
                RngStream& rng, double cp) {
  Game board = root_board;
  for (std::uint64_t i = 0; i < iterations; ++i) {
    board = root_board;
    TreeNode<Game>* leaf = select(root, board, cp);
    leaf = expand(*leaf, board, rng);
    const auto winner = board.playout(rng);
    backup(*leaf, winner);
  }
}

// Robust child: maximal visits, lowest slot on ties.
template <SearchGame Game>
typename Game::move_type best_child(const TreeNode<Game>& root) {
  const std::uint32_t count = root.child_count();
  if (count == 0) throw std::logic_error("best_child: root has no children");
  std::uint32_t best = 0;
  for (std::uint32_t i = 1; i < count; ++i)
    if (root.child(i).visits() > root.child(best).visits()) best = i;
  return *root.child(best).move();
}

template <SearchGame Game, class Visitor>
void for_each_node(const TreeNode<Game>& root, Visitor&& visit) {
  struct Frame {
    const TreeNode<Game>* node;
    std::size_t depth;
  };
  std::vector<Frame> stack{{&root, 0}};
  while (!stack.empty()) {
    const auto [node, depth] = stack.back();
    stack.pop_back();
    visit(*node, depth);
    for (std::uint32_t i = node->child_count(); i-- > 0;)
      stack.push_back({&node->child(i), depth + 1});
  }
}

// Depth-first dump, one node per line: "<indent><move> <wins> <visits>",
// two spaces of indent per level, children in slot order, root move "root".
template <SearchGame Game>
std::string dump_tree(const TreeNode<Game>& root) {
  std::ostringstream out;
  for_each_node(root, [&](const TreeNode<Game>& n, std::size_t depth) {
    out << std::string(2 * depth, ' ');
    if (n.move())
      out << *n.move();
    else
      out << "root";
    out << ' ' << n.wins() << ' ' << n.visits() << '\n';
  });
  return out.str();
}

template <SearchGame Game>
std::size_t node_count(const TreeNode<Game>& root) {
  std::size_t count = 0;
  for_each_node(root, [&](const TreeNode<Game>&, std::size_t) { ++count; });
  return count;
}

}  // namespace gscpm
