#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gscpm/disjoint_set.hpp"
#include "gscpm/rng.hpp"

namespace gscpm {

enum class Player : std::uint8_t { Black, White };

constexpr Player opponent(Player p) noexcept {
  return p == Player::Black ? Player::White : Player::Black;
}

inline const char* to_string(Player p) noexcept {
  return p == Player::Black ? "black" : "white";
}

enum class Cell : std::uint8_t { Empty, Black, White };

constexpr Cell stone_of(Player p) noexcept {
  return p == Player::Black ? Cell::Black : Cell::White;
}

struct Move {
  std::uint32_t cell = 0;

  friend constexpr auto operator<=>(const Move&, const Move&) = default;
};

inline std::ostream& operator<<(std::ostream& os, Move m) { return os << m.cell; }

/// Hex position on a size x size rhombus.
///
/// Black connects the top and bottom rows, White the left and right columns,
/// Black moves first. Cell (r, c) has index r * size + c and neighbours
/// (r, c-1), (r, c+1), (r-1, c), (r+1, c), (r-1, c+1), (r+1, c-1).
/// Connectivity is tracked incrementally in a disjoint set holding one element
/// per cell plus four virtual edge nodes.
class HexBoard {
public:
  using move_type = Move;
  using player_type = Player;

  static constexpr std::size_t max_size = 255;

  explicit HexBoard(std::size_t size) : size_(check_size(size)) {
    const auto n = size_ * size_;
    cells_.assign(n, Cell::Empty);
    dsu_ = DisjointSet(n + 4);
    empty_count_ = n;
  }

  std::size_t size() const noexcept { return size_; }
  std::size_t cell_count() const noexcept { return cells_.size(); }
  std::size_t empty_count() const noexcept { return empty_count_; }
  std::size_t legal_move_count() const noexcept { return empty_count_; }
  Player to_move() const noexcept { return to_move_; }
  Cell at(Move m) const { return cells_.at(m.cell); }
  Cell at(std::size_t row, std::size_t col) const { return cells_.at(row * size_ + col); }

  std::size_t dsu_size() const noexcept { return dsu_.size(); }

  // Virtual edge node indices inside the disjoint set.
  std::uint32_t black_top() const noexcept { return edge_base(); }
  std::uint32_t black_bottom() const noexcept { return edge_base() + 1; }
  std::uint32_t white_left() const noexcept { return edge_base() + 2; }
  std::uint32_t white_right() const noexcept { return edge_base() + 3; }

  std::vector<Move> legal_moves() const {
    std::vector<Move> out;
    legal_moves(out);
    return out;
  }

  // Empty cells in ascending index order.
  void legal_moves(std::vector<Move>& out) const {
    out.clear();
    out.reserve(empty_count_);
    for (std::uint32_t i = 0; i < cells_.size(); ++i)
      if (cells_[i] == Cell::Empty) out.push_back(Move{i});
  }

  // Places a stone for the side to move and passes the turn.
  void play(Move m) {
    place_stone(m, to_move_);
    to_move_ = opponent(to_move_);
  }

  // Places a stone of an arbitrary colour without changing the side to move.
  // Used for position setup; throws on an occupied or out-of-range cell.
  void place_stone(Move m, Player p) {
    if (m.cell >= cells_.size())
      throw std::out_of_range("HexBoard: cell " + std::to_string(m.cell) + " out of range");
    if (cells_[m.cell] != Cell::Empty)
      throw std::logic_error("HexBoard: cell " + std::to_string(m.cell) + " is occupied");
    put(m.cell, p);
  }

  void set_to_move(Player p) noexcept { to_move_ = p; }

  std::optional<Player> winner() const noexcept {
    if (dsu_.connected(black_top(), black_bottom())) return Player::Black;
    if (dsu_.connected(white_left(), white_right())) return Player::White;
    return std::nullopt;
  }

  bool has_won(Player p) const noexcept {
    return p == Player::Black ? dsu_.connected(black_top(), black_bottom())
                              : dsu_.connected(white_left(), white_right());
  }

  // Finishes the game in place with uniformly random moves, stopping at the
  // first win. Returns the winner.
  Player playout(RngStream& rng) {
    if (auto w = winner()) return *w;
    thread_local std::vector<std::uint32_t> empties;
    empties.clear();
    for (std::uint32_t i = 0; i < cells_.size(); ++i)
      if (cells_[i] == Cell::Empty) empties.push_back(i);
    std::size_t remaining = empties.size();
    while (remaining > 0) {
      const auto pick = static_cast<std::size_t>(rng.next_below(remaining));
      const auto cell = empties[pick];
      empties[pick] = empties[--remaining];
      const Player mover = to_move_;
      put(cell, mover);
      to_move_ = opponent(mover);
      if (has_won(mover)) return mover;
    }
    // A filled Hex board always has a winner.
    throw std::logic_error("HexBoard: playout filled the board without a winner");
  }

  friend bool operator==(const HexBoard& a, const HexBoard& b) noexcept {
    return a.size_ == b.size_ && a.to_move_ == b.to_move_ && a.cells_ == b.cells_;
  }

private:
  static std::size_t check_size(std::size_t size) {
    if (size == 0) throw std::invalid_argument("HexBoard: size must be >= 1");
    if (size > max_size) throw std::invalid_argument("HexBoard: size too large");
    return size;
  }

  std::uint32_t edge_base() const noexcept { return static_cast<std::uint32_t>(cells_.size()); }

  void put(std::uint32_t cell, Player p) {
    const Cell stone = stone_of(p);
    cells_[cell] = stone;
    --empty_count_;

    const auto n = static_cast<std::int64_t>(size_);
    const auto r = static_cast<std::int64_t>(cell / size_);
    const auto c = static_cast<std::int64_t>(cell % size_);
    static constexpr std::array<std::array<int, 2>, 6> offsets{
        {{0, -1}, {0, 1}, {-1, 0}, {1, 0}, {-1, 1}, {1, -1}}};
    for (const auto& [dr, dc] : offsets) {
      const auto nr = r + dr;
      const auto nc = c + dc;
      if (nr < 0 || nr >= n || nc < 0 || nc >= n) continue;
      const auto other = static_cast<std::uint32_t>(nr * n + nc);
      if (cells_[other] == stone) dsu_.unite(cell, other);
    }

    if (p == Player::Black) {
      if (r == 0) dsu_.unite(cell, black_top());
      if (r == n - 1) dsu_.unite(cell, black_bottom());
    } else {
      if (c == 0) dsu_.unite(cell, white_left());
      if (c == n - 1) dsu_.unite(cell, white_right());
    }
  }

  std::size_t size_;
  std::vector<Cell> cells_;
  mutable DisjointSet dsu_;
  std::size_t empty_count_ = 0;
  Player to_move_ = Player::Black;
};

inline HexBoard new_board(std::size_t size) { return HexBoard(size); }

// Plays a random game out on a copy of `board`.
inline Player random_playout(HexBoard board, RngStream& rng) { return board.playout(rng); }

}  // namespace gscpm
