#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "hex.hpp"

namespace battlesheep {

enum class Player : std::uint8_t { Blue, Red };

enum class Owner : std::uint8_t { Blue, Red, Neutral };

constexpr Player opponent(Player p) { return p == Player::Blue ? Player::Red : Player::Blue; }

constexpr Owner owner_of(Player p) { return p == Player::Blue ? Owner::Blue : Owner::Red; }

constexpr char player_char(Player p) { return p == Player::Blue ? 'B' : 'R'; }

constexpr char owner_char(Owner o) {
    switch (o) {
        case Owner::Blue: return 'B';
        case Owner::Red: return 'R';
        case Owner::Neutral: return 'N';
    }
    return '?';
}

enum class CellKind : std::uint8_t { Blocked, Empty, Stack };

class Cell {
public:
    constexpr Cell() = default;

    static constexpr Cell blocked() { return Cell(CellKind::Blocked, Owner::Neutral, 0); }
    static constexpr Cell empty() { return Cell(CellKind::Empty, Owner::Neutral, 0); }
    // Unchecked; Position validates stack invariants on construction.
    static constexpr Cell stack(Owner owner, int count) { return Cell(CellKind::Stack, owner, count); }

    constexpr CellKind kind() const { return kind_; }
    constexpr Owner owner() const { return owner_; }
    constexpr int count() const { return count_; }

    constexpr bool is_blocked() const { return kind_ == CellKind::Blocked; }
    constexpr bool is_empty() const { return kind_ == CellKind::Empty; }
    constexpr bool is_stack() const { return kind_ == CellKind::Stack; }
    constexpr bool is_movable_by(Owner o) const { return is_stack() && owner_ == o && count_ >= 2; }

    friend constexpr bool operator==(const Cell&, const Cell&) = default;

    friend std::ostream& operator<<(std::ostream& os, const Cell& c) {
        switch (c.kind_) {
            case CellKind::Blocked: return os << 'X';
            case CellKind::Empty: return os << '.';
            case CellKind::Stack: return os << owner_char(c.owner_) << ' ' << c.count_;
        }
        return os;
    }

private:
    constexpr Cell(CellKind kind, Owner owner, int count) : kind_(kind), owner_(owner), count_(count) {}

    CellKind kind_ = CellKind::Blocked;
    Owner owner_ = Owner::Neutral;
    int count_ = 0;
};

inline void check_cell(HexCoord at, const Cell& c) {
    if (!c.is_stack()) return;
    if (c.count() < 1)
        throw InvalidPosition("stack at (" + std::to_string(at.q) + "," + std::to_string(at.r) +
                              ") has count " + std::to_string(c.count()));
    if (c.owner() == Owner::Neutral && c.count() != 1)
        throw InvalidPosition("neutral stack at (" + std::to_string(at.q) + "," + std::to_string(at.r) +
                              ") must hold exactly one token");
}

// A finite board plus the player to move. Coordinates absent from the map are
// off-board and behave exactly like Blocked cells. Immutable value type: cells
// are kept sorted by (q, r) so iteration order is canonical.
class Position {
public:
    using Entry = std::pair<HexCoord, Cell>;

    Position(std::vector<Entry> cells, Player to_move) : cells_(std::move(cells)), to_move_(to_move) {
        if (cells_.empty()) throw InvalidPosition("a position needs at least one cell");
        std::sort(cells_.begin(), cells_.end(),
                  [](const Entry& a, const Entry& b) { return a.first < b.first; });
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            if (i > 0 && cells_[i - 1].first == cells_[i].first)
                throw InvalidPosition("duplicate coordinate (" + std::to_string(cells_[i].first.q) + "," +
                                      std::to_string(cells_[i].first.r) + ")");
            check_cell(cells_[i].first, cells_[i].second);
        }
    }

    std::span<const Entry> cells() const { return cells_; }
    std::size_t size() const { return cells_.size(); }
    Player to_move() const { return to_move_; }

    const Cell* find(HexCoord c) const {
        auto it = std::lower_bound(cells_.begin(), cells_.end(), c,
                                   [](const Entry& e, HexCoord k) { return e.first < k; });
        if (it == cells_.end() || it->first != c) return nullptr;
        return &it->second;
    }

    bool contains(HexCoord c) const { return find(c) != nullptr; }

    Cell at(HexCoord c) const {
        const Cell* cell = find(c);
        return cell ? *cell : Cell::blocked();
    }

    Position with_to_move(Player p) const {
        Position copy = *this;
        copy.to_move_ = p;
        return copy;
    }

    // Replaces the cell at an existing coordinate or inserts a new one.
    Position with_cell(HexCoord at, Cell cell) const {
        check_cell(at, cell);
        Position copy = *this;
        auto it = std::lower_bound(copy.cells_.begin(), copy.cells_.end(), at,
                                   [](const Entry& e, HexCoord k) { return e.first < k; });
        if (it != copy.cells_.end() && it->first == at)
            it->second = cell;
        else
            copy.cells_.insert(it, {at, cell});
        return copy;
    }

    int tokens(Owner o) const {
        int n = 0;
        for (const auto& [at, c] : cells_)
            if (c.is_stack() && c.owner() == o) n += c.count();
        return n;
    }

    int total_tokens() const {
        int n = 0;
        for (const auto& [at, c] : cells_)
            if (c.is_stack()) n += c.count();
        return n;
    }

    int count_kind(CellKind k) const {
        return static_cast<int>(std::count_if(cells_.begin(), cells_.end(),
                                              [k](const Entry& e) { return e.second.kind() == k; }));
    }

    int empty_cells() const { return count_kind(CellKind::Empty); }
    int stack_cells() const { return count_kind(CellKind::Stack); }
    int open_cells() const { return static_cast<int>(cells_.size()) - count_kind(CellKind::Blocked); }

    friend bool operator==(const Position&, const Position&) = default;

private:
    std::vector<Entry> cells_;
    Player to_move_ = Player::Blue;
};

// Byte encoding of a position: player to move, then every cell in (q, r)
// order with zigzag varint coordinates and contents. Injective.
inline std::string canonical_key(const Position& p) {
    std::string key;
    key.reserve(p.size() * 4 + 1);
    auto varint = [&key](std::uint64_t v) {
        while (v >= 0x80) {
            key.push_back(static_cast<char>((v & 0x7f) | 0x80));
            v >>= 7;
        }
        key.push_back(static_cast<char>(v));
    };
    auto zigzag = [](int v) -> std::uint64_t {
        return (static_cast<std::uint32_t>(v) << 1) ^ static_cast<std::uint32_t>(v >> 31);
    };
    key.push_back(player_char(p.to_move()));
    for (const auto& [at, c] : p.cells()) {
        varint(zigzag(at.q));
        varint(zigzag(at.r));
        switch (c.kind()) {
            case CellKind::Blocked: key.push_back('X'); break;
            case CellKind::Empty: key.push_back('.'); break;
            case CellKind::Stack:
                key.push_back(owner_char(c.owner()));
                varint(static_cast<std::uint64_t>(c.count()));
                break;
        }
    }
    return key;
}

}  // namespace battlesheep
