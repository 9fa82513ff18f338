#pragma once

#include <optional>
#include <ostream>
#include <sstream>
#include <tuple>
#include <vector>

#include "position.hpp"

namespace battlesheep {

// Split `count` tokens off the stack at `from` and slide them along `dir`.
// The destination is not stored; see slide_destination.
struct Move {
    HexCoord from;
    Direction dir;
    int count = 1;

    friend constexpr bool operator==(const Move&, const Move&) = default;
    friend constexpr auto operator<=>(const Move& a, const Move& b) {
        return std::tuple(a.from.q, a.from.r, a.dir.index(), a.count) <=>
               std::tuple(b.from.q, b.from.r, b.dir.index(), b.count);
    }

    friend std::ostream& operator<<(std::ostream& os, const Move& m) {
        return os << m.from.q << ' ' << m.from.r << ' ' << m.dir.index() << ' ' << m.count;
    }
};

// Farthest empty cell reachable by sliding from `from` along `dir`, or nothing
// when the adjacent cell is not empty. Requires a stack at `from`.
inline std::optional<HexCoord> slide_destination(const Position& p, HexCoord from, Direction dir) {
    if (!p.at(from).is_stack()) throw PreconditionError("slide_destination: no stack at source");
    HexCoord cur = from;
    HexCoord next = neighbor(cur, dir);
    if (!p.at(next).is_empty()) return std::nullopt;
    while (p.at(next).is_empty()) {
        cur = next;
        next = neighbor(cur, dir);
    }
    return cur;
}

// Sorted by (from.q, from.r, direction index, count).
inline std::vector<Move> legal_moves(const Position& p) {
    std::vector<Move> moves;
    const Owner mover = owner_of(p.to_move());
    for (const auto& [at, cell] : p.cells()) {
        if (!cell.is_movable_by(mover)) continue;
        for (Direction d : Direction::all()) {
            if (!p.at(neighbor(at, d)).is_empty()) continue;
            for (int k = 1; k < cell.count(); ++k) moves.push_back({at, d, k});
        }
    }
    return moves;
}

inline bool is_legal(const Position& p, const Move& m) {
    const Cell src = p.at(m.from);
    if (!src.is_movable_by(owner_of(p.to_move()))) return false;
    if (m.count < 1 || m.count > src.count() - 1) return false;
    return p.at(neighbor(m.from, m.dir)).is_empty();
}

inline Position apply_move(const Position& p, const Move& m) {
    if (!is_legal(p, m)) {
        std::ostringstream msg;
        msg << "illegal move " << m;
        throw IllegalMove(msg.str());
    }
    const Cell src = p.at(m.from);
    const HexCoord dest = *slide_destination(p, m.from, m.dir);
    return p.with_cell(m.from, Cell::stack(src.owner(), src.count() - m.count))
        .with_cell(dest, Cell::stack(src.owner(), m.count))
        .with_to_move(opponent(p.to_move()));
}

// Normal play: the player to move loses when they have no move.
inline bool is_loss(const Position& p) {
    const Owner mover = owner_of(p.to_move());
    for (const auto& [at, cell] : p.cells()) {
        if (!cell.is_movable_by(mover)) continue;
        for (Direction d : Direction::all())
            if (p.at(neighbor(at, d)).is_empty()) return false;
    }
    return true;
}

}  // namespace battlesheep
