#pragma once

#include <algorithm>
#include <array>
#include <cstdlib>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "circuit.hpp"
#include "gadgets.hpp"

namespace battlesheep {

// Blue moves owed to each gadget type when sizing the Red Makeup strip.
struct BudgetTable {
    int turn = 1;
    int or_gate = 1;
    int and_gate = 4;
    int choice = 4;
    int fanout = 5;

    // The per-gadget counts 1, 1, 4, 4, 5 of the published construction.
    static constexpr BudgetTable published() { return {}; }

    // Excess Blue tokens actually present in the catalog templates.
    static BudgetTable catalog() {
        auto blue = [](GadgetType t) { return make_template(GadgetKind::of(t)).blue_budget; };
        return {blue(GadgetType::Turn30R), blue(GadgetType::Or), blue(GadgetType::And), blue(GadgetType::Choice),
                blue(GadgetType::Fanout)};
    }

    friend constexpr bool operator==(const BudgetTable&, const BudgetTable&) = default;
};

struct LayoutStats {
    int a = 0;  // turns
    int b = 0;  // Or
    int c = 0;  // And
    int d = 0;  // Choice
    int e = 0;  // Fanout
    int k = 0;  // Makeup size

    friend constexpr bool operator==(const LayoutStats&, const LayoutStats&) = default;
};

constexpr int makeup_size(const LayoutStats& s, const BudgetTable& t = BudgetTable::published()) {
    return s.a * t.turn + s.b * t.or_gate + s.c * t.and_gate + s.d * t.choice + s.e * t.fanout;
}

inline int makeup_size(const Circuit& c, int turns, const BudgetTable& t = BudgetTable::published()) {
    LayoutStats s{turns, c.count(NodeKind::Or), c.count(NodeKind::And), c.count(NodeKind::Choice),
                  c.count(NodeKind::Fanout), 0};
    return makeup_size(s, t);
}

struct Placement {
    std::string label;  // node id, or "<edge>/wireN", "<edge>/turnN", "makeup"
    GadgetKind kind;
    Pose pose;
};

// Pieces realizing one circuit edge, from the source port to the target port.
struct RouteRecord {
    Edge edge;
    std::vector<int> pieces;  // indices into Layout::placements
};

struct Layout {
    std::vector<Placement> placements;
    std::vector<int> node_placement;  // circuit node -> placement index
    std::vector<RouteRecord> routes;
    Position board{{{{0, 0}, Cell::blocked()}}, Player::Blue};
    LayoutStats stats;
    BudgetTable budgets;
};

class RoutingFailure : public Error {
public:
    using Error::Error;
};

class LayoutViolation : public Error {
public:
    using Error::Error;
};

namespace detail {

constexpr int kHeadingU = 5;
constexpr int kHeadingUR = 0;
constexpr int kHeadingUL = 4;

inline bool upward(Direction d) {
    return d.index() == kHeadingU || d.index() == kHeadingUR || d.index() == kHeadingUL;
}

// Vertical planning coordinate: 2r + q grows by 2 per U step and 1 per UR/UL step.
constexpr int plan_y(HexCoord c) { return 2 * c.r + c.q; }

constexpr HexCoord from_plan(int x, int y) { return {x, (y - x) / 2}; }

inline bool ports_joined(const Port& up, const Port& down) {
    return down.at == up.at + up.outward.offset() && up.at == down.at + down.outward.offset();
}

struct TurnFit {
    GadgetType type;
    Pose pose;  // translation relative to the In cell at the origin
};

// Turn gadget and orientation taking heading `in` to heading `out`.
inline std::optional<TurnFit> fit_turn(Direction in, Direction out) {
    for (GadgetType t : {GadgetType::Turn30R, GadgetType::Turn30L, GadgetType::Turn60R, GadgetType::Turn60L}) {
        Gadget g = make_template(GadgetKind::of(t));
        const Port& pin = g.port("In");
        const Port& pout = g.port("Out");
        for (bool m : {false, true})
            for (int rot = 0; rot < 6; ++rot) {
                Pose pose{{0, 0}, rot, m};
                if (pose.apply(pin.outward) != in.negated() || pose.apply(pout.outward) != out) continue;
                pose.translation = -pose.apply(pin.at);
                return TurnFit{t, pose};
            }
    }
    return std::nullopt;
}

inline Pose wire_pose(HexCoord first, Direction heading) {
    return Pose{first, ((kHeadingU - heading.index()) % 6 + 6) % 6, false};
}

struct RoutePlan {
    std::vector<Direction> headings;
    std::vector<int> lengths;  // wire length per segment
    int total() const {
        int n = 0;
        for (int l : lengths) n += l;
        return n;
    }
};

// Solves a*u + b*v = rhs for integers, u and v independent unit offsets.
inline std::optional<std::pair<int, int>> solve2(HexCoord u, HexCoord v, HexCoord rhs) {
    int det = u.q * v.r - u.r * v.q;
    if (det == 0) return std::nullopt;
    int a = rhs.q * v.r - rhs.r * v.q;
    int b = u.q * rhs.r - u.r * rhs.q;
    if (a % det || b % det) return std::nullopt;
    return std::pair{a / det, b / det};
}

// Every polyline from port `from` (leaving along `out`) to port `to`
// (entered along `arrive`) with up to three corners, cheapest first.
inline std::vector<RoutePlan> route_plans(HexCoord from, Direction out, HexCoord to, Direction arrive,
                                          int max_len = 40) {
    const std::array<Direction, 3> heads{Direction(kHeadingU), Direction(kHeadingUR), Direction(kHeadingUL)};
    std::vector<RoutePlan> plans;
    const HexCoord delta = to - from;
    std::vector<Direction> seq{out};
    auto emit = [&](const std::vector<Direction>& hs) {
        const int m = static_cast<int>(hs.size()) - 1;
        HexCoord base{0, 0};
        for (int i = 0; i < m; ++i) base = base + hs[i].offset() * 2 + hs[i + 1].offset();
        base = base + hs[m].offset();
        const HexCoord rest = delta - base;
        if (m == 0) {
            auto o = hs[0].offset();
            int len = o.q != 0 ? rest.q / o.q : rest.r / o.r;
            if (len >= 1 && o * len == rest) plans.push_back({hs, {len}});
            return;
        }
        std::vector<int> lens(static_cast<std::size_t>(m + 1), 1);
        auto rec = [&](auto& self, int i, HexCoord left) -> void {
            if (i == m - 1) {
                auto sol = solve2(hs[m - 1].offset(), hs[m].offset(), left);
                if (!sol || sol->first < 1 || sol->second < 1 || sol->first > max_len || sol->second > max_len) return;
                lens[static_cast<std::size_t>(m - 1)] = sol->first;
                lens[static_cast<std::size_t>(m)] = sol->second;
                plans.push_back({hs, lens});
                return;
            }
            for (int l = 1; l <= max_len; ++l) {
                lens[static_cast<std::size_t>(i)] = l;
                self(self, i + 1, left - hs[static_cast<std::size_t>(i)].offset() * l);
            }
        };
        rec(rec, 0, rest);
    };
    auto grow = [&](auto& self) -> void {
        if (seq.back() == arrive) emit(seq);
        if (seq.size() == 4) return;
        for (Direction h : heads) {
            if (h == seq.back()) continue;
            seq.push_back(h);
            self(self);
            seq.pop_back();
        }
    };
    grow(grow);
    std::stable_sort(plans.begin(), plans.end(), [](const RoutePlan& x, const RoutePlan& y) {
        if (x.headings.size() != y.headings.size()) return x.headings.size() < y.headings.size();
        return x.total() < y.total();
    });
    return plans;
}

// Cell map with piece ownership. Open cells of distinct pieces may touch only
// across declared port joints.
class Canvas {
public:
    struct Info {
        Cell cell;
        int piece;
    };

    bool try_add(const PlacedGadget& g, int piece, const std::set<std::pair<HexCoord, HexCoord>>& joints) {
        for (const auto& [at, c] : g.cells) {
            auto it = cells_.find(at);
            if (it != cells_.end() && !(it->second.cell.is_blocked() && c.is_blocked())) return false;
        }
        for (const auto& [at, c] : g.cells) {
            if (c.is_blocked()) continue;
            for (Direction d : Direction::all()) {
                HexCoord n = neighbor(at, d);
                auto it = cells_.find(n);
                if (it == cells_.end() || it->second.cell.is_blocked() || it->second.piece == piece) continue;
                if (!joints.count({at, n}) && !joints.count({n, at})) return false;
            }
        }
        std::vector<HexCoord> added;
        for (const auto& [at, c] : g.cells)
            if (cells_.emplace(at, Info{c, piece}).second) added.push_back(at);
        log_.push_back(std::move(added));
        return true;
    }

    void pop() {
        for (HexCoord c : log_.back()) cells_.erase(c);
        log_.pop_back();
    }

    std::size_t depth() const { return log_.size(); }
    const std::map<HexCoord, Info>& cells() const { return cells_; }

private:
    std::map<HexCoord, Info> cells_;
    std::vector<std::vector<HexCoord>> log_;
};

class Planner {
public:
    Planner(const Circuit& c, BudgetTable budgets) : c_(c) {
        layout_.budgets = budgets;
        layout_.node_placement.assign(c.nodes.size(), -1);
    }

    Layout run() {
        const auto layer = c_.layers();
        std::vector<int> order(c_.nodes.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return layer[x] < layer[y]; });
        int var_index = 0;
        for (int n : order) {
            if (c_.nodes[n].kind == NodeKind::Variable)
                place_variable(n, var_index++);
            else
                place_gate(n);
        }
        place_makeup();
        BoardBuilder b;
        for (const auto& [at, info] : canvas_.cells()) b.add({{at, info.cell}});
        layout_.board = b.build(Player::Blue);
        return layout_;
    }

private:
    static GadgetType node_type(NodeKind k) {
        switch (k) {
            case NodeKind::Variable: return GadgetType::Variable;
            case NodeKind::Or: return GadgetType::Or;
            case NodeKind::And: return GadgetType::And;
            case NodeKind::Choice: return GadgetType::Choice;
            case NodeKind::Fanout: return GadgetType::Fanout;
            case NodeKind::Goal: return GadgetType::Goal;
        }
        return GadgetType::Goal;
    }

    int add_piece(const std::string& label, GadgetKind kind, const Pose& pose, const PlacedGadget& placed,
                  const std::set<std::pair<HexCoord, HexCoord>>& joints) {
        const int id = static_cast<int>(layout_.placements.size());
        if (!canvas_.try_add(placed, id, joints)) return -1;
        layout_.placements.push_back({label, kind, pose});
        placed_.push_back(placed);
        return id;
    }

    void pop_piece() {
        canvas_.pop();
        layout_.placements.pop_back();
        placed_.pop_back();
    }

    void place_variable(int n, int index) {
        const Gadget g = make_template(GadgetKind::of(GadgetType::Variable));
        const Pose pose{from_plan(kVariablePitch * index, 0), 0, false};
        const int id = add_piece(c_.nodes[n].id, g.kind, pose, instantiate(g, pose), {});
        if (id < 0) throw RoutingFailure("cannot place variable '" + c_.nodes[n].id + "'");
        layout_.node_placement[static_cast<std::size_t>(n)] = id;
    }

    const Port& out_port(const Source& s) const {
        const auto& ports = placed_[static_cast<std::size_t>(layout_.node_placement[static_cast<std::size_t>(s.node)])].ports;
        int seen = 0;
        for (const Port& p : ports)
            if (p.polarity == Polarity::Out && seen++ == s.port) return p;
        throw RoutingFailure("missing output port");
    }

    std::string edge_label(const Edge& e) const {
        std::string src = c_.nodes[e.from.node].id;
        if (output_arity(c_.nodes[e.from.node].kind) == 2) src += "." + std::to_string(e.from.port + 1);
        return src + "->" + c_.nodes[e.to].id + ".in" + std::to_string(e.to_port + 1);
    }

    // Places wires and turns for one edge; on failure leaves nothing behind.
    bool route(const Edge& e, const Port& from, const Port& to, std::vector<int>& pieces) {
        if (!upward(from.outward) || !upward(to.outward.negated())) return false;
        const std::string label = edge_label(e);
        for (const RoutePlan& plan : route_plans(from.at, from.outward, to.at, to.outward.negated())) {
            const std::size_t mark = canvas_.depth();
            pieces.clear();
            bool ok = true;
            Port prev = from;
            const std::size_t segs = plan.headings.size();
            for (std::size_t i = 0; i < segs && ok; ++i) {
                const Direction h = plan.headings[i];
                const HexCoord first = prev.at + prev.outward.offset();
                const GadgetKind wk = GadgetKind::wire(plan.lengths[i]);
                const Pose wp = wire_pose(first, h);
                PlacedGadget w = instantiate(make_template(wk), wp);
                std::set<std::pair<HexCoord, HexCoord>> joints{{prev.at, first}};
                const HexCoord last = w.ports[1].at;
                Port next_in;
                std::optional<TurnFit> fit;
                PlacedGadget turn;
                if (i + 1 < segs) {
                    fit = fit_turn(h, plan.headings[i + 1]);
                    if (!fit) {
                        ok = false;
                        break;
                    }
                    fit->pose.translation = fit->pose.translation + last + h.offset();
                    turn = instantiate(make_template(GadgetKind::of(fit->type)), fit->pose);
                    next_in = turn.ports[0];
                } else {
                    next_in = to;
                }
                joints.insert({last, next_in.at});
                if (!ports_joined(w.ports[1], next_in) || !ports_joined(prev, w.ports[0])) {
                    ok = false;
                    break;
                }
                int id = add_piece(label + "/wire" + std::to_string(i), wk, wp, w, joints);
                if (id < 0) {
                    ok = false;
                    break;
                }
                pieces.push_back(id);
                if (fit) {
                    std::set<std::pair<HexCoord, HexCoord>> tj{{last, next_in.at}};
                    int tid = add_piece(label + "/turn" + std::to_string(i), GadgetKind::of(fit->type), fit->pose, turn, tj);
                    if (tid < 0) {
                        ok = false;
                        break;
                    }
                    pieces.push_back(tid);
                    prev = turn.ports[1];
                }
            }
            if (ok) return true;
            while (canvas_.depth() > mark) pop_piece();
        }
        pieces.clear();
        return false;
    }

    void place_gate(int n) {
        const CircuitNode& node = c_.nodes[n];
        const Gadget g = make_template(GadgetKind::of(node_type(node.kind)));
        const auto ins = g.ports_of(Polarity::In);
        int src_x = 0, src_y = std::numeric_limits<int>::min();
        for (const Source& s : node.inputs) {
            const Port& p = out_port(s);
            src_x += p.at.q;
            src_y = std::max(src_y, plan_y(p.at));
        }
        src_x /= static_cast<int>(node.inputs.size());
        int in_x = 0, in_y = std::numeric_limits<int>::max();
        for (const Port* p : ins) {
            in_x += p->at.q;
            in_y = std::min(in_y, plan_y(p->at));
        }
        in_x /= static_cast<int>(ins.size());
        const int base_x = src_x - in_x;
        const int base_y = src_y - in_y + 2;

        std::vector<std::vector<int>> assignments{{0, 1}};
        if (node.inputs.size() == 2) assignments.push_back({1, 0});
        else assignments = {{0}};

        for (int dy = 0; dy <= kMaxRise; ++dy)
            for (int step = 0; step <= 2 * kMaxShift; ++step) {
                const int dx = step % 2 ? (step + 1) / 2 : -(step / 2);
                const int x = base_x + dx;
                const int y = base_y + dy;
                if (((y - x) % 2 + 2) % 2) continue;
                const Pose pose{from_plan(x, y), 0, false};
                const PlacedGadget placed = instantiate(g, pose);
                const std::size_t mark = canvas_.depth();
                std::set<std::pair<HexCoord, HexCoord>> none;
                const int id = add_piece(node.id, g.kind, pose, placed, none);
                if (id < 0) continue;
                for (const auto& assign : assignments) {
                    std::vector<RouteRecord> records;
                    bool ok = true;
                    for (std::size_t i = 0; i < node.inputs.size() && ok; ++i) {
                        Edge e{node.inputs[i], n, static_cast<int>(i)};
                        const Port& to = placed.ports[static_cast<std::size_t>(assign[i])];
                        RouteRecord rec{e, {}};
                        ok = route(e, out_port(e.from), to, rec.pieces);
                        if (ok) records.push_back(std::move(rec));
                    }
                    if (ok) {
                        layout_.node_placement[static_cast<std::size_t>(n)] = id;
                        for (auto& r : records) layout_.routes.push_back(std::move(r));
                        return;
                    }
                    while (canvas_.depth() > mark + 1) pop_piece();
                }
                pop_piece();
            }
        throw RoutingFailure("cannot place and route '" + node.id + "'");
    }

    void place_makeup() {
        LayoutStats& s = layout_.stats;
        s = {};
        for (const Placement& p : layout_.placements) {
            switch (p.kind.type) {
                case GadgetType::Turn30L:
                case GadgetType::Turn30R:
                case GadgetType::Turn60L:
                case GadgetType::Turn60R: ++s.a; break;
                case GadgetType::Or: ++s.b; break;
                case GadgetType::And: ++s.c; break;
                case GadgetType::Choice: ++s.d; break;
                case GadgetType::Fanout: ++s.e; break;
                default: break;
            }
        }
        s.k = makeup_size(s, layout_.budgets);
        if (s.k < 1) return;
        int max_x = 0, min_y = 0;
        for (const auto& [at, info] : canvas_.cells()) {
            max_x = std::max(max_x, at.q);
            min_y = std::min(min_y, plan_y(at));
        }
        int x = max_x + 4;
        int y = min_y + ((min_y - x) % 2 != 0 ? 1 : 0);
        const GadgetKind mk = GadgetKind::makeup(s.k);
        const Pose pose{from_plan(x, y), 0, false};
        if (add_piece("makeup", mk, pose, instantiate(make_template(mk), pose), {}) < 0)
            throw RoutingFailure("cannot place the Makeup strip");
    }

    static constexpr int kVariablePitch = 16;
    static constexpr int kMaxRise = 40;
    static constexpr int kMaxShift = 12;

    const Circuit& c_;
    Layout layout_;
    Canvas canvas_;
    std::vector<PlacedGadget> placed_;
};

}  // namespace detail

// Deterministic placement: nodes by longest-path layer, each gate placed at
// the nearest spot above its sources from which every input can be routed.
inline Layout layout(const Circuit& c, const BudgetTable& budgets = BudgetTable::catalog()) {
    return detail::Planner(c, budgets).run();
}

// Rebuilds the board from the placements and re-checks every invariant.
// Throws LayoutViolation describing the first failure.
inline void check_layout(const Circuit& c, const Layout& l) {
    std::map<HexCoord, std::pair<Cell, int>> cells;
    std::vector<PlacedGadget> placed;
    for (std::size_t i = 0; i < l.placements.size(); ++i) {
        const Placement& p = l.placements[i];
        placed.push_back(instantiate(make_template(p.kind), p.pose));
        for (const auto& [at, cell] : placed.back().cells) {
            auto [it, fresh] = cells.emplace(at, std::pair{cell, static_cast<int>(i)});
            if (!fresh && !(it->second.first.is_blocked() && cell.is_blocked()))
                throw LayoutViolation("overlap at (" + std::to_string(at.q) + "," + std::to_string(at.r) + ") between " +
                                      l.placements[static_cast<std::size_t>(it->second.second)].label + " and " + p.label);
        }
    }
    std::set<std::pair<HexCoord, HexCoord>> joints;
    for (const RouteRecord& r : l.routes) {
        std::vector<Port> chain;
        const PlacedGadget& src = placed[static_cast<std::size_t>(l.node_placement[static_cast<std::size_t>(r.edge.from.node)])];
        int seen = 0;
        for (const Port& p : src.ports)
            if (p.polarity == Polarity::Out && seen++ == r.edge.from.port) chain.push_back(p);
        for (int piece : r.pieces) {
            const auto& ports = placed[static_cast<std::size_t>(piece)].ports;
            chain.push_back(ports[0]);
            chain.push_back(ports[1]);
        }
        const PlacedGadget& dst = placed[static_cast<std::size_t>(l.node_placement[static_cast<std::size_t>(r.edge.to)])];
        bool found = false;
        for (const Port& p : dst.ports)
            if (p.polarity == Polarity::In && detail::ports_joined(chain.back(), p)) {
                chain.push_back(p);
                found = true;
                break;
            }
        if (!found || chain.size() % 2) throw LayoutViolation("edge route does not reach its target port");
        for (std::size_t i = 0; i + 1 < chain.size(); i += 2) {
            if (!detail::ports_joined(chain[i], chain[i + 1])) throw LayoutViolation("edge route has a gap");
            joints.insert({chain[i].at, chain[i + 1].at});
            joints.insert({chain[i + 1].at, chain[i].at});
        }
    }
    // Open cells of different pieces touch only across joints.
    for (const auto& [at, info] : cells) {
        if (info.first.is_blocked()) continue;
        for (Direction d : Direction::all()) {
            auto it = cells.find(neighbor(at, d));
            if (it == cells.end() || it->second.first.is_blocked() || it->second.second == info.second) continue;
            if (!joints.count({at, it->first}))
                throw LayoutViolation("pieces " + l.placements[static_cast<std::size_t>(info.second)].label + " and " +
                                      l.placements[static_cast<std::size_t>(it->second.second)].label + " touch");
        }
    }
    // Every port of every node is joined to a route.
    for (std::size_t n = 0; n < c.nodes.size(); ++n)
        for (const Port& p : placed[static_cast<std::size_t>(l.node_placement[n])].ports) {
            bool joined = false;
            for (Direction d : Direction::all()) joined = joined || joints.count({p.at, neighbor(p.at, d)});
            if (!joined) throw LayoutViolation("port " + p.name + " of " + c.nodes[n].id + " is unconnected");
        }
    LayoutStats s{};
    for (const Placement& p : l.placements) {
        switch (p.kind.type) {
            case GadgetType::Turn30L:
            case GadgetType::Turn30R:
            case GadgetType::Turn60L:
            case GadgetType::Turn60R: ++s.a; break;
            case GadgetType::Or: ++s.b; break;
            case GadgetType::And: ++s.c; break;
            case GadgetType::Choice: ++s.d; break;
            case GadgetType::Fanout: ++s.e; break;
            case GadgetType::Makeup: s.k = p.kind.param; break;
            default: break;
        }
    }
    if (s != l.stats) throw LayoutViolation("recorded stats do not match the placements");
    if (s.k != makeup_size(s, l.budgets)) throw LayoutViolation("Makeup size does not match the budgets");
    if (s.b != c.count(NodeKind::Or) || s.c != c.count(NodeKind::And) || s.d != c.count(NodeKind::Choice) ||
        s.e != c.count(NodeKind::Fanout))
        throw LayoutViolation("gate counts differ from the circuit");
    std::vector<Position::Entry> entries;
    for (const auto& [at, info] : cells) entries.push_back({at, info.first});
    if (Position(entries, Player::Blue) != l.board) throw LayoutViolation("board differs from the placements");
    if (l.board.total_tokens() > l.board.open_cells()) throw LayoutViolation("more tokens than open cells");
    if (l.board.to_move() != Player::Blue) throw LayoutViolation("Blue must move first");
}

inline Layout compile_layout(std::string_view circuit_text, const BudgetTable& budgets = BudgetTable::catalog()) {
    Circuit c = parse_circuit(circuit_text);
    Layout l = layout(c, budgets);
    check_layout(c, l);
    return l;
}

inline Position compile(std::string_view circuit_text, const BudgetTable& budgets = BudgetTable::catalog()) {
    return compile_layout(circuit_text, budgets).board;
}

}  // namespace battlesheep
