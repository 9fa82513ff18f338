#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>

namespace battlesheep {

// Axial hex coordinates. With x = 1.5 q and y = 0.875 (2 r + q) the six
// neighbours of a cell sit at angles 30, 90, 150, 210, 270 and 330 degrees.
struct HexCoord {
    int q{};
    int r{};

    friend constexpr bool operator==(HexCoord, HexCoord) = default;
    friend constexpr auto operator<=>(HexCoord, HexCoord) = default;

    constexpr HexCoord operator+(HexCoord o) const { return {q + o.q, r + o.r}; }
    constexpr HexCoord operator-(HexCoord o) const { return {q - o.q, r - o.r}; }
    constexpr HexCoord operator-() const { return {-q, -r}; }
    constexpr HexCoord operator*(int k) const { return {q * k, r * k}; }

    friend std::ostream& operator<<(std::ostream& os, HexCoord c) {
        return os << '(' << c.q << ',' << c.r << ')';
    }
};

struct HexCoordHash {
    std::size_t operator()(HexCoord c) const noexcept {
        auto q = static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.q));
        auto r = static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.r));
        return std::hash<std::uint64_t>{}((q << 32) | r);
    }
};

constexpr int hex_distance(HexCoord a, HexCoord b) {
    int dq = a.q - b.q;
    int dr = a.r - b.r;
    int ds = -dq - dr;
    auto abs = [](int v) { return v < 0 ? -v : v; };
    int m = abs(dq) > abs(dr) ? abs(dq) : abs(dr);
    return m > abs(ds) ? m : abs(ds);
}

// One of the six unit offsets. The index order is part of the wire format
// (CLI and HTTP service): 0=(+1,0) 1=(+1,-1) 2=(0,-1) 3=(-1,0) 4=(-1,+1) 5=(0,+1).
class Direction {
public:
    static constexpr int count = 6;

    constexpr Direction() = default;
    constexpr explicit Direction(int index) : index_(((index % count) + count) % count) {}

    static constexpr Direction from_offset(HexCoord d, bool* ok = nullptr) {
        for (int i = 0; i < count; ++i) {
            if (offsets_[i] == d) {
                if (ok) *ok = true;
                return Direction(i);
            }
        }
        if (ok) *ok = false;
        return Direction(0);
    }

    constexpr int index() const { return index_; }
    constexpr HexCoord offset() const { return offsets_[index_]; }
    constexpr Direction negated() const { return Direction(index_ + 3); }

    // Rotation by +60 degrees (counter-clockwise in the drawing frame above).
    constexpr Direction rotated_ccw(int steps = 1) const { return Direction(index_ - steps); }
    // Reflection across the vertical drawing axis: (q, r) -> (-q, q + r).
    constexpr Direction mirrored() const { return Direction(4 - index_); }

    friend constexpr bool operator==(Direction, Direction) = default;
    friend constexpr auto operator<=>(Direction, Direction) = default;

    static constexpr std::array<Direction, count> all() {
        return {Direction(0), Direction(1), Direction(2), Direction(3), Direction(4), Direction(5)};
    }

private:
    static constexpr std::array<HexCoord, count> offsets_{
        HexCoord{1, 0}, HexCoord{1, -1}, HexCoord{0, -1},
        HexCoord{-1, 0}, HexCoord{-1, 1}, HexCoord{0, 1}};
    int index_ = 0;
};

constexpr HexCoord neighbor(HexCoord c, Direction d) { return c + d.offset(); }

// +60 degree rotation about the origin.
constexpr HexCoord rotate_ccw(HexCoord c, int steps = 1) {
    steps = ((steps % 6) + 6) % 6;
    for (int i = 0; i < steps; ++i) c = {-c.r, c.q + c.r};
    return c;
}

constexpr HexCoord mirror(HexCoord c) { return {-c.q, c.q + c.r}; }

}  // namespace battlesheep
