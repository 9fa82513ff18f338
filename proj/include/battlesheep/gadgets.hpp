#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <battlesheep/fixture_data.hpp>

#include "board_io.hpp"
#include "rules.hpp"

namespace battlesheep {

enum class GadgetType : std::uint8_t {
    WireStraight,
    Turn30L,
    Turn30R,
    Turn60L,
    Turn60R,
    Goal,
    Variable,
    Or,
    And,
    Choice,
    Fanout,
    Makeup,
};

// A gadget type plus its size parameter (wire length or Makeup size).
struct GadgetKind {
    GadgetType type = GadgetType::Goal;
    int param = 0;

    static constexpr GadgetKind of(GadgetType t) { return {t, 0}; }
    static constexpr GadgetKind wire(int length) { return {GadgetType::WireStraight, length}; }
    static constexpr GadgetKind makeup(int k) { return {GadgetType::Makeup, k}; }

    friend constexpr bool operator==(const GadgetKind&, const GadgetKind&) = default;
};

inline std::string_view type_name(GadgetType t) {
    switch (t) {
        case GadgetType::WireStraight: return "WireStraight";
        case GadgetType::Turn30L: return "Turn30L";
        case GadgetType::Turn30R: return "Turn30R";
        case GadgetType::Turn60L: return "Turn60L";
        case GadgetType::Turn60R: return "Turn60R";
        case GadgetType::Goal: return "Goal";
        case GadgetType::Variable: return "Variable";
        case GadgetType::Or: return "Or";
        case GadgetType::And: return "And";
        case GadgetType::Choice: return "Choice";
        case GadgetType::Fanout: return "Fanout";
        case GadgetType::Makeup: return "Makeup";
    }
    return "?";
}

inline std::string kind_name(GadgetKind k) {
    std::string s(type_name(k.type));
    if (k.type == GadgetType::WireStraight || k.type == GadgetType::Makeup) s += "(" + std::to_string(k.param) + ")";
    return s;
}

inline constexpr GadgetType kAllTypes[] = {
    GadgetType::WireStraight, GadgetType::Turn30L, GadgetType::Turn30R, GadgetType::Turn60L,
    GadgetType::Turn60R,      GadgetType::Goal,    GadgetType::Variable, GadgetType::Or,
    GadgetType::And,          GadgetType::Choice,  GadgetType::Fanout,   GadgetType::Makeup,
};

inline std::optional<GadgetType> parse_type_name(std::string_view name) {
    for (GadgetType t : kAllTypes)
        if (type_name(t) == name) return t;
    return std::nullopt;
}

enum class Polarity : std::uint8_t { In, Out };

// `outward` points from the port cell away from the gadget body: for an In
// port it faces the incoming wire, for an Out port the outgoing one.
struct Port {
    std::string name;
    HexCoord at;
    Polarity polarity = Polarity::In;
    Direction outward;
};

struct Gadget {
    GadgetKind kind;
    std::vector<Position::Entry> footprint;  // sorted by coordinate
    std::vector<Port> ports;
    int blue_budget = 0;
    int red_budget = 0;

    std::vector<const Port*> ports_of(Polarity p) const {
        std::vector<const Port*> out;
        for (const auto& port : ports)
            if (port.polarity == p) out.push_back(&port);
        return out;
    }

    const Port& port(std::string_view name) const {
        for (const auto& p : ports)
            if (p.name == name) return p;
        throw InvalidParameter("gadget " + kind_name(kind) + " has no port '" + std::string(name) + "'");
    }

    Cell at(HexCoord c) const {
        for (const auto& [at, cell] : footprint)
            if (at == c) return cell;
        return Cell::blocked();
    }
};

// Mirror across the vertical axis, then rotate by 60 degree steps, then translate.
struct Pose {
    HexCoord translation{};
    int rotation = 0;
    bool mirrored = false;

    friend constexpr bool operator==(const Pose&, const Pose&) = default;

    HexCoord apply(HexCoord c) const { return rotate_ccw(mirrored ? mirror(c) : c, rotation) + translation; }
    Direction apply(Direction d) const { return (mirrored ? d.mirrored() : d).rotated_ccw(rotation); }

    Pose inverse() const {
        int rot = ((rotation % 6) + 6) % 6;
        if (mirrored) return {-rotate_ccw(mirror(translation), rot), rot, true};
        return {-rotate_ccw(translation, 6 - rot), (6 - rot) % 6, false};
    }
};

struct PlacedGadget {
    std::vector<Position::Entry> cells;
    std::vector<Port> ports;
};

inline PlacedGadget instantiate(const std::vector<Position::Entry>& footprint, const std::vector<Port>& ports,
                                const Pose& pose) {
    PlacedGadget out;
    for (const auto& [at, cell] : footprint) out.cells.push_back({pose.apply(at), cell});
    std::sort(out.cells.begin(), out.cells.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& p : ports) out.ports.push_back({p.name, pose.apply(p.at), p.polarity, pose.apply(p.outward)});
    return out;
}

inline PlacedGadget instantiate(const Gadget& g, const Pose& pose) { return instantiate(g.footprint, g.ports, pose); }

inline std::string_view fixture_text(std::string_view name) {
    for (const auto& f : fixtures::all)
        if (f.name == name) return f.text;
    throw Error("no embedded fixture named '" + std::string(name) + "'");
}

inline Position fixture_position(std::string_view name) { return parse_board(fixture_text(name)); }

namespace detail {

inline std::vector<Position::Entry> fixture_cells(std::string_view name) {
    Position p = fixture_position(name);
    return {p.cells().begin(), p.cells().end()};
}

inline void add_sheathed_run(std::vector<Position::Entry>& cells, HexCoord start, Direction dir, int length) {
    std::map<HexCoord, Cell> out;
    std::vector<HexCoord> run;
    for (int i = 0; i < length; ++i) run.push_back(start + dir.offset() * i);
    for (HexCoord c : run) out[c] = Cell::empty();
    const HexCoord before = start - dir.offset();
    const HexCoord after = start + dir.offset() * length;
    for (HexCoord c : run)
        for (Direction d : Direction::all()) {
            HexCoord n = neighbor(c, d);
            if (n != before && n != after && !out.count(n)) out[n] = Cell::blocked();
        }
    for (const auto& e : out) cells.push_back(e);
}

inline Gadget mirrored_gadget(Gadget g, GadgetKind kind) {
    Pose m{{0, 0}, 0, true};
    PlacedGadget p = instantiate(g, m);
    g.kind = kind;
    g.footprint = std::move(p.cells);
    g.ports = std::move(p.ports);
    return g;
}

}  // namespace detail

inline int excess_tokens(const std::vector<Position::Entry>& cells) {
    int n = 0;
    for (const auto& [at, c] : cells)
        if (c.is_stack()) n += c.count() - 1;
    return n;
}

// Catalog template. Budgets are the excess tokens each side holds in the
// footprint; wires own no stacks.
inline Gadget make_template(GadgetKind kind) {
    using enum GadgetType;
    using P = Polarity;
    Gadget g;
    g.kind = kind;
    switch (kind.type) {
        case WireStraight: {
            if (kind.param < 1) throw InvalidParameter("WireStraight length must be at least 1");
            detail::add_sheathed_run(g.footprint, {0, 0}, Direction(5), kind.param);
            g.ports = {{"In", {0, 0}, P::In, Direction(2)}, {"Out", {0, kind.param - 1}, P::Out, Direction(5)}};
            break;
        }
        case Makeup: {
            if (kind.param < 1) throw InvalidParameter("Makeup size must be at least 1");
            std::map<HexCoord, Cell> cells;
            for (int i = 0; i <= kind.param; ++i) cells[{0, i}] = i == 0 ? Cell::stack(Owner::Red, kind.param + 1) : Cell::empty();
            for (int i = 0; i <= kind.param; ++i)
                for (Direction d : Direction::all()) cells.try_emplace(neighbor({0, i}, d), Cell::blocked());
            g.footprint.assign(cells.begin(), cells.end());
            break;
        }
        case Turn30R:
        case Turn30L: {
            g.footprint = detail::fixture_cells("fig4a");
            g.ports = {{"In", {0, -1}, P::In, Direction(2)}, {"Out", {1, 0}, P::Out, Direction(0)}};
            if (kind.type == Turn30L) g = detail::mirrored_gadget(g, kind);
            break;
        }
        case Turn60R:
        case Turn60L: {
            g.footprint = detail::fixture_cells("fig4b");
            g.ports = {{"In", {0, -1}, P::In, Direction(2)}, {"Out", {1, -1}, P::Out, Direction(1)}};
            if (kind.type == Turn60L) g = detail::mirrored_gadget(g, kind);
            break;
        }
        case Goal:
            g.footprint = detail::fixture_cells("fig5");
            g.ports = {{"In", {0, -1}, P::In, Direction(2)}};
            break;
        case Variable:
            g.footprint = detail::fixture_cells("fig6");
            g.ports = {{"Out", {1, 1}, P::Out, Direction(5)}};
            break;
        case Or:
            g.footprint = detail::fixture_cells("fig8");
            g.ports = {{"In1", {-1, 0}, P::In, Direction(3)},
                       {"In2", {1, -1}, P::In, Direction(1)},
                       {"Out", {0, 1}, P::Out, Direction(5)}};
            break;
        case And:
            g.footprint = detail::fixture_cells("fig9");
            g.ports = {{"In1", {-3, 0}, P::In, Direction(3)},
                       {"In2", {3, -3}, P::In, Direction(1)},
                       {"Out", {0, 4}, P::Out, Direction(5)}};
            break;
        case Choice:
            g.footprint = detail::fixture_cells("fig10");
            g.ports = {{"In", {0, -1}, P::In, Direction(2)},
                       {"Out1", {-3, 2}, P::Out, Direction(4)},
                       {"Out2", {3, -1}, P::Out, Direction(0)}};
            break;
        case Fanout:
            g.footprint = detail::fixture_cells("fig11");
            g.ports = {{"In", {0, -4}, P::In, Direction(2)},
                       {"Out1", {-3, 3}, P::Out, Direction(4)},
                       {"Out2", {3, 0}, P::Out, Direction(0)}};
            break;
    }
    for (const auto& [at, c] : g.footprint) {
        if (!c.is_stack() || c.count() < 2) continue;
        (c.owner() == Owner::Red ? g.red_budget : g.blue_budget) += c.count() - 1;
    }
    return g;
}

// Merges footprints into one board. Blocked may overlap Blocked; any other
// overlap is a conflict.
class BoardBuilder {
public:
    // Returns the first conflicting coordinate, if any; nothing is added then.
    std::optional<HexCoord> add(const std::vector<Position::Entry>& cells) {
        for (const auto& [at, c] : cells) {
            auto it = cells_.find(at);
            if (it != cells_.end() && !(it->second.is_blocked() && c.is_blocked())) return at;
        }
        for (const auto& [at, c] : cells) cells_.emplace(at, c);
        return std::nullopt;
    }

    void add_or_throw(const std::vector<Position::Entry>& cells, const std::string& what) {
        if (auto bad = add(cells))
            throw Error(what + " overlaps an occupied cell at (" + std::to_string(bad->q) + "," +
                        std::to_string(bad->r) + ")");
    }

    const std::map<HexCoord, Cell>& cells() const { return cells_; }
    bool contains(HexCoord c) const { return cells_.count(c) != 0; }

    Position build(Player to_move) const {
        return Position(std::vector<Position::Entry>(cells_.begin(), cells_.end()), to_move);
    }

private:
    std::map<HexCoord, Cell> cells_;
};

struct HarnessBoard {
    Position board;
    Gadget gadget;
    // Out cell plus its sink cells, per Out port in declaration order.
    std::vector<std::vector<HexCoord>> out_watch;
    int inactive_inputs = 0;
};

namespace detail {

inline constexpr int kStubLength = 2;

// Gadget plus drivers and sinks, without the Red parity strip.
inline HarnessBoard build_harness(GadgetKind kind, const std::vector<bool>& inputs) {
    HarnessBoard h{Position({{{0, 0}, Cell::blocked()}}, Player::Blue), make_template(kind), {}, 0};
    const Gadget& g = h.gadget;
    auto ins = g.ports_of(Polarity::In);
    if (inputs.size() != ins.size())
        throw InvalidParameter(kind_name(kind) + " has " + std::to_string(ins.size()) + " inputs, pattern has " +
                               std::to_string(inputs.size()));
    BoardBuilder b;
    b.add_or_throw(g.footprint, kind_name(kind));
    for (std::size_t i = 0; i < ins.size(); ++i) {
        const Port& p = *ins[i];
        const HexCoord h1 = neighbor(p.at, p.outward);
        std::vector<Position::Entry> stub;
        add_sheathed_run(stub, h1, p.outward, kStubLength + 1);
        const HexCoord driver = p.at + p.outward.offset() * (kStubLength + 1);
        for (auto& [at, c] : stub)
            if (at == driver) c = inputs[i] ? Cell::stack(Owner::Blue, 1) : Cell::stack(Owner::Blue, 2);
        stub.push_back({neighbor(driver, p.outward), Cell::blocked()});
        b.add_or_throw(stub, "driver for " + p.name);
        if (!inputs[i]) ++h.inactive_inputs;
    }
    for (const Port* p : g.ports_of(Polarity::Out)) {
        const HexCoord h1 = neighbor(p->at, p->outward);
        std::vector<Position::Entry> sink;
        add_sheathed_run(sink, h1, p->outward, kStubLength);
        sink.push_back({p->at + p->outward.offset() * (kStubLength + 1), Cell::blocked()});
        b.add_or_throw(sink, "sink for " + p->name);
        std::vector<HexCoord> watch{p->at};
        for (int s = 1; s <= kStubLength; ++s) watch.push_back(p->at + p->outward.offset() * s);
        h.out_watch.push_back(std::move(watch));
    }
    h.board = b.build(Player::Blue);
    return h;
}

}  // namespace detail

// Closed test board for a gadget: active inputs get an open stub whose feeding
// token is a spent 1-stack; inactive inputs get a Blue 2-stack whose only
// outlet is the stub. Each Out port feeds an empty sink. A Red Makeup strip
// sized to the gadget's Blue budget sits apart from the gadget. Blue to move.
inline Position harness(GadgetKind kind, const std::vector<bool>& inputs) {
    HarnessBoard h = detail::build_harness(kind, inputs);
    const int budget = h.gadget.blue_budget;
    if (budget < 1) return h.board;
    BoardBuilder b;
    b.add_or_throw({h.board.cells().begin(), h.board.cells().end()}, "harness");
    int max_q = 0, min_r = 0;
    for (const auto& [at, c] : h.board.cells()) {
        max_q = std::max(max_q, at.q);
        min_r = std::min(min_r, at.r);
    }
    Gadget m = make_template(GadgetKind::makeup(budget));
    b.add_or_throw(instantiate(m, Pose{{max_q + 3, min_r - (max_q + 3) / 2}, 0, false}).cells, "makeup strip");
    return b.build(Player::Blue);
}

struct GadgetBehavior {
    std::vector<bool> input_pattern;
    bool blue_first = true;
    std::vector<bool> output_activatable;  // per Out port
    bool joint_activatable = false;         // every Out port at once
    bool budget_reachable = false;          // Blue can make exactly its target move count
    int blue_moves_used = 0;                // most in-gadget Blue moves over all lines
    int target_moves = 0;
    bool verified = false;
};

namespace detail {

// Two-player harness game where either side may pass; it ends after two
// consecutive passes. Red only moves inside the gadget (Variable).
class HarnessGame {
public:
    HarnessGame(const HarnessBoard& h, int target) : h_(h), target_(target) {
        for (const auto& [at, c] : h.board.cells())
            if (c.is_stack() && c.owner() == Owner::Blue) ++initial_blue_stacks_;
    }

    // Blue can force a final state with exactly `target` Blue moves and every
    // cell in `clear` still Empty.
    bool can_force(const Position& start, const std::vector<HexCoord>& clear) {
        clear_ = clear;
        memo_.clear();
        return force(start, false);
    }

    // Longest Blue move count over all interleavings.
    int max_blue_moves(const Position& start) {
        max_memo_.clear();
        return max_blue(start, false);
    }

private:
    int blue_moves(const Position& p) const {
        int n = 0;
        for (const auto& [at, c] : p.cells())
            if (c.is_stack() && c.owner() == Owner::Blue) ++n;
        return n - initial_blue_stacks_;
    }

    bool force(const Position& p, bool passed) {
        std::string key = canonical_key(p);
        key.push_back(passed ? 'p' : '-');
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        const bool blue = p.to_move() == Player::Blue;
        bool result;
        if (passed) {
            result = terminal_ok(p);
        } else {
            result = force(p.with_to_move(opponent(p.to_move())), true);
        }
        // Blue looks for any success, Red for any refutation.
        if (result != blue) {
            for (const Move& m : legal_moves(p)) {
                bool r = force(apply_move(p, m), false);
                if (r == blue) {
                    result = blue;
                    break;
                }
            }
        }
        memo_.emplace(std::move(key), result);
        return result;
    }

    bool terminal_ok(const Position& p) const {
        if (blue_moves(p) != target_) return false;
        for (HexCoord c : clear_)
            if (!p.at(c).is_empty()) return false;
        return true;
    }

    int max_blue(const Position& p, bool passed) {
        std::string key = canonical_key(p);
        key.push_back(passed ? 'p' : '-');
        if (auto it = max_memo_.find(key); it != max_memo_.end()) return it->second;
        int best = passed ? blue_moves(p) : max_blue(p.with_to_move(opponent(p.to_move())), true);
        for (const Move& m : legal_moves(p)) best = std::max(best, max_blue(apply_move(p, m), false));
        max_memo_.emplace(std::move(key), best);
        return best;
    }

    const HarnessBoard& h_;
    int target_;
    int initial_blue_stacks_ = 0;
    std::vector<HexCoord> clear_;
    std::unordered_map<std::string, bool> memo_;
    std::unordered_map<std::string, int> max_memo_;
};

inline GadgetBehavior evaluate_pattern(GadgetKind kind, const std::vector<bool>& inputs, bool blue_first) {
    HarnessBoard h = build_harness(kind, inputs);
    const int target = h.gadget.blue_budget + h.inactive_inputs;
    HarnessGame game(h, target);
    Position start = h.board.with_to_move(blue_first ? Player::Blue : Player::Red);
    GadgetBehavior b;
    b.input_pattern = inputs;
    b.blue_first = blue_first;
    b.target_moves = target;
    std::vector<HexCoord> all;
    for (const auto& w : h.out_watch) {
        b.output_activatable.push_back(game.can_force(start, w));
        all.insert(all.end(), w.begin(), w.end());
    }
    b.joint_activatable = game.can_force(start, all);
    b.budget_reachable = game.can_force(start, {});
    b.blue_moves_used = game.max_blue_moves(start) - h.inactive_inputs;
    return b;
}

inline bool expected_behavior(GadgetType t, const GadgetBehavior& b) {
    using enum GadgetType;
    const auto& in = b.input_pattern;
    const auto& out = b.output_activatable;
    switch (t) {
        case WireStraight:
        case Turn30L:
        case Turn30R:
        case Turn60L:
        case Turn60R: return out[0] == in[0];
        case Or: return out[0] == (in[0] || in[1]);
        case And: return out[0] == (in[0] && in[1]);
        case Choice: return out[0] == in[0] && out[1] == in[0] && !b.joint_activatable;
        case Fanout: return out[0] == in[0] && out[1] == in[0] && b.joint_activatable == in[0];
        case Variable: return out[0] == b.blue_first;
        case Goal: return b.budget_reachable == in[0];
        case Makeup: return false;
    }
    return false;
}

}  // namespace detail

// Exhaustive check of every input pattern against the expected truth table,
// plus budget tightness: no line gives Blue more than its target moves.
inline std::vector<GadgetBehavior> verify_gadget(GadgetKind kind) {
    if (kind.type == GadgetType::Makeup) throw InvalidParameter("use verify_makeup for Makeup");
    Gadget g = make_template(kind);
    const std::size_t n = g.ports_of(Polarity::In).size();
    std::vector<GadgetBehavior> out;
    auto record = [&](const std::vector<bool>& pattern, bool blue_first) {
        GadgetBehavior b = detail::evaluate_pattern(kind, pattern, blue_first);
        const bool tight = b.blue_moves_used <= g.blue_budget;
        const bool reach = kind.type == GadgetType::Goal || b.budget_reachable;
        b.verified = detail::expected_behavior(kind.type, b) && tight && reach;
        out.push_back(std::move(b));
    };
    if (kind.type == GadgetType::Variable) {
        record({}, true);
        record({}, false);
        return out;
    }
    for (std::size_t mask = (std::size_t{1} << n); mask-- > 0;) {
        std::vector<bool> pattern(n);
        for (std::size_t i = 0; i < n; ++i) pattern[i] = (mask >> (n - 1 - i)) & 1;
        record(pattern, true);
    }
    return out;
}

// Longest Red play on an isolated board with Red to move throughout.
inline int max_red_moves(const Position& p) {
    std::unordered_map<std::string, int> memo;
    auto rec = [&](auto& self, const Position& q) -> int {
        std::string key = canonical_key(q);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        int best = 0;
        for (const Move& m : legal_moves(q))
            best = std::max(best, 1 + self(self, apply_move(q, m).with_to_move(Player::Red)));
        memo.emplace(std::move(key), best);
        return best;
    };
    return rec(rec, p.with_to_move(Player::Red));
}

// Number of moves Red makes by always moving one token off the largest stack.
inline int peel_one_moves(Position p) {
    p = p.with_to_move(Player::Red);
    int n = 0;
    for (;;) {
        std::optional<Move> pick;
        int best = 0;
        for (const Move& m : legal_moves(p))
            if (m.count == 1 && p.at(m.from).count() > best) {
                best = p.at(m.from).count();
                pick = m;
            }
        if (!pick) return n;
        p = apply_move(p, *pick).with_to_move(Player::Red);
        ++n;
    }
}

inline bool verify_makeup_board(const Position& board, int k) {
    return max_red_moves(board) == k && peel_one_moves(board) == k;
}

inline bool verify_makeup(int k) {
    if (k < 1 || k > 6) throw InvalidParameter("verify_makeup supports 1 <= k <= 6");
    Gadget g = make_template(GadgetKind::makeup(k));
    return verify_makeup_board(Position(g.footprint, Player::Red), k);
}

}  // namespace battlesheep
