#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rules.hpp"

namespace battlesheep {

// Result for the player to move.
enum class Outcome : std::uint8_t { Win, Loss };

constexpr Outcome flip(Outcome o) { return o == Outcome::Win ? Outcome::Loss : Outcome::Win; }

enum class SolveStatus : std::uint8_t { Decided, BudgetExceeded, Cancelled };

struct SolveBudget {
    std::uint64_t max_nodes = 100'000'000;
    std::chrono::duration<double> max_time = std::chrono::seconds(600);
};

struct SolveOptions {
    SolveBudget budget{};
    bool memoize = true;
    // Collapse regions where only one player can ever move into an integer
    // move count, which is exact for normal-play sums.
    bool decompose = true;
    const std::atomic<bool>* cancel = nullptr;
};

struct SolveReport {
    SolveStatus status = SolveStatus::Decided;
    std::optional<Outcome> outcome;  // set iff status == Decided
    std::optional<Move> best_move;   // set iff outcome == Win
    std::uint64_t nodes_visited = 0;
    std::uint64_t table_entries = 0;
    int max_depth = 0;
    std::chrono::duration<double> elapsed{};

    bool decided() const { return status == SolveStatus::Decided; }
};

class OracleTooLarge : public Error {
public:
    using Error::Error;
};

namespace detail {

class BudgetExhausted {};
class SearchCancelled {};

// Indexed copy of the non-blocked cells of a position. Blocked and off-board
// coordinates are walls (-1 neighbours). Cell indices follow the position's
// (q, r) order, so iterating indices reproduces the public move order.
class SearchBoard {
public:
    explicit SearchBoard(const Position& p) {
        std::unordered_map<HexCoord, int, HexCoordHash> index;
        for (const auto& [at, cell] : p.cells()) {
            if (cell.is_blocked()) continue;
            index.emplace(at, static_cast<int>(coords_.size()));
            coords_.push_back(at);
            owner_.push_back(static_cast<std::uint8_t>(cell.owner()));
            count_.push_back(cell.is_stack() ? cell.count() : 0);
        }
        nbr_.resize(coords_.size());
        for (std::size_t i = 0; i < coords_.size(); ++i)
            for (Direction d : Direction::all()) {
                auto it = index.find(neighbor(coords_[i], d));
                nbr_[i][d.index()] = it == index.end() ? -1 : it->second;
            }
        for (std::size_t i = 0; i < coords_.size(); ++i)
            if (count_[i] != 1) dynamic_.push_back(static_cast<int>(i));
    }

    int size() const { return static_cast<int>(coords_.size()); }
    HexCoord coord(int i) const { return coords_[i]; }
    int next(int i, int dir) const { return nbr_[i][dir]; }
    bool empty(int i) const { return i >= 0 && count_[i] == 0; }
    int count(int i) const { return count_[i]; }
    Owner owner(int i) const { return static_cast<Owner>(owner_[i]); }
    bool movable(int i, Owner o) const { return count_[i] >= 2 && owner(i) == o; }
    bool live(int i) const { return count_[i] == 0 || (count_[i] >= 2 && owner(i) != Owner::Neutral); }
    const std::vector<int>& dynamic_cells() const { return dynamic_; }

    int destination(int from, int dir) const {
        int cur = -1;
        int nxt = nbr_[from][dir];
        while (empty(nxt)) {
            cur = nxt;
            nxt = nbr_[cur][dir];
        }
        return cur;
    }

    struct Undo {
        int from, dest, taken;
    };

    Undo play(int from, int dir, int taken) {
        int dest = destination(from, dir);
        count_[from] -= taken;
        count_[dest] = taken;
        owner_[dest] = owner_[from];
        return {from, dest, taken};
    }

    void undo(const Undo& u) {
        count_[u.dest] = 0;
        owner_[u.dest] = static_cast<std::uint8_t>(Owner::Neutral);
        count_[u.from] += u.taken;
    }

    void append_cell(std::string& key, int i) const {
        int c = count_[i];
        if (c == 0) {
            key.push_back('\0');
            return;
        }
        auto tag = static_cast<unsigned>(owner_[i] + 1) << 6;
        if (c < 63) {
            key.push_back(static_cast<char>(tag | static_cast<unsigned>(c)));
            return;
        }
        key.push_back(static_cast<char>(tag | 63u));
        auto v = static_cast<std::uint32_t>(c);
        while (v >= 0x80) {
            key.push_back(static_cast<char>((v & 0x7f) | 0x80));
            v >>= 7;
        }
        key.push_back(static_cast<char>(v));
    }

private:
    std::vector<HexCoord> coords_;
    std::vector<std::array<int, 6>> nbr_;
    std::vector<std::uint8_t> owner_;
    std::vector<int> count_;
    std::vector<int> dynamic_;
};

inline void append_varint(std::string& key, std::uint64_t v) {
    while (v >= 0x80) {
        key.push_back(static_cast<char>((v & 0x7f) | 0x80));
        v >>= 7;
    }
    key.push_back(static_cast<char>(v));
}

class Search {
public:
    Search(const Position& p, const SolveOptions& opt)
        : board_(p), opt_(opt), start_(std::chrono::steady_clock::now()), component_(board_.size(), -1) {}

    std::uint64_t nodes() const { return nodes_; }
    std::uint64_t entries() const { return game_memo_.size() + solo_memo_.size(); }
    int max_depth() const { return max_depth_; }
    SearchBoard& board() { return board_; }

    // Exact outcome for `mover` to move in the current board state.
    bool wins(Owner mover, int depth) {
        return opt_.decompose ? wins_decomposed(mover, 0, depth) : wins_plain(mover, depth);
    }

private:
    void tick(int depth) {
        ++nodes_;
        max_depth_ = std::max(max_depth_, depth);
        if (nodes_ > opt_.budget.max_nodes) throw BudgetExhausted{};
        if ((nodes_ & 1023) == 0) {
            if (opt_.cancel && opt_.cancel->load(std::memory_order_relaxed)) throw SearchCancelled{};
            if (std::chrono::steady_clock::now() - start_ > opt_.budget.max_time) throw BudgetExhausted{};
        }
    }

    bool wins_plain(Owner mover, int depth) {
        tick(depth);
        std::string key;
        if (opt_.memoize) {
            key.push_back(owner_char(mover));
            for (int i : board_.dynamic_cells()) board_.append_cell(key, i);
            if (auto it = game_memo_.find(key); it != game_memo_.end()) return it->second;
        }
        const Owner other = mover == Owner::Blue ? Owner::Red : Owner::Blue;
        bool result = false;
        for (int i = 0; i < board_.size() && !result; ++i) {
            if (!board_.movable(i, mover)) continue;
            for (int d = 0; d < 6 && !result; ++d) {
                if (!board_.empty(board_.next(i, d))) continue;
                for (int k = 1; k < board_.count(i) && !result; ++k) {
                    auto u = board_.play(i, d, k);
                    result = !wins_plain(other, depth + 1);
                    board_.undo(u);
                }
            }
        }
        if (opt_.memoize) game_memo_.emplace(std::move(key), result);
        return result;
    }

    // Labels live cells (empty or movable) into connected components and
    // classifies each by which players own movable stacks in it.
    struct Component {
        std::vector<int> cells;
        bool blue = false;
        bool red = false;
    };

    std::vector<Component> components(const std::vector<int>* restrict_to = nullptr) {
        std::vector<Component> out;
        std::vector<int> seeds;
        if (restrict_to)
            seeds = *restrict_to;
        else
            seeds = board_.dynamic_cells();
        for (int s : seeds) component_[s] = -1;
        std::vector<int> stack;
        for (int s : seeds) {
            if (component_[s] != -1 || !board_.live(s)) continue;
            Component comp;
            int id = static_cast<int>(out.size());
            component_[s] = id;
            stack.push_back(s);
            while (!stack.empty()) {
                int c = stack.back();
                stack.pop_back();
                comp.cells.push_back(c);
                if (board_.movable(c, Owner::Blue)) comp.blue = true;
                if (board_.movable(c, Owner::Red)) comp.red = true;
                for (int d = 0; d < 6; ++d) {
                    int n = board_.next(c, d);
                    if (n < 0 || component_[n] == id || !board_.live(n)) continue;
                    component_[n] = id;
                    stack.push_back(n);
                }
            }
            std::sort(comp.cells.begin(), comp.cells.end());
            out.push_back(std::move(comp));
        }
        // Reset labels of everything we touched so later calls start clean.
        for (const auto& comp : out)
            for (int c : comp.cells) component_[c] = -1;
        return out;
    }

    // Longest play available to `who` inside a region nobody else can enter.
    int solo_max(const std::vector<int>& cells, Owner who, int depth) {
        tick(depth);
        std::string key;
        if (opt_.memoize) {
            key.push_back(owner_char(who));
            for (int c : cells) {
                append_varint(key, static_cast<std::uint64_t>(c));
                board_.append_cell(key, c);
            }
            if (auto it = solo_memo_.find(key); it != solo_memo_.end()) return it->second;
        }
        int best = 0;
        for (int i : cells) {
            if (!board_.movable(i, who)) continue;
            for (int d = 0; d < 6; ++d) {
                if (!board_.empty(board_.next(i, d))) continue;
                for (int k = 1; k < board_.count(i); ++k) {
                    auto u = board_.play(i, d, k);
                    int sum = 1;
                    for (const auto& sub : components(&cells))
                        if ((who == Owner::Blue && sub.blue) || (who == Owner::Red && sub.red))
                            sum += solo_max(sub.cells, who, depth + 1);
                    board_.undo(u);
                    best = std::max(best, sum);
                }
            }
        }
        if (opt_.memoize) solo_memo_.emplace(std::move(key), best);
        return best;
    }

    // One-sided regions collapse to their longest solo play; `spent` is the
    // net number of those spare moves already used (Blue positive).
    bool wins_decomposed(Owner mover, long long spent, int depth) {
        tick(depth);
        auto comps = components();
        std::vector<const Component*> mixed;
        long long tally = -spent;
        for (const auto& c : comps) {
            if (c.blue && c.red)
                mixed.push_back(&c);
            else if (c.blue)
                tally += solo_max(c.cells, Owner::Blue, depth);
            else if (c.red)
                tally -= solo_max(c.cells, Owner::Red, depth);
        }
        if (mixed.empty()) return mover == Owner::Blue ? tally > 0 : tally < 0;

        std::string key;
        if (opt_.memoize) {
            std::vector<char> in_mixed(static_cast<std::size_t>(board_.size()), 0);
            for (const auto* c : mixed)
                for (int i : c->cells) in_mixed[static_cast<std::size_t>(i)] = 1;
            key.push_back(owner_char(mover));
            append_varint(key, static_cast<std::uint64_t>(tally < 0 ? -2 * tally - 1 : 2 * tally));
            for (int i : board_.dynamic_cells()) {
                if (in_mixed[static_cast<std::size_t>(i)])
                    board_.append_cell(key, i);
                else
                    key.push_back('\xff');
            }
            if (auto it = game_memo_.find(key); it != game_memo_.end()) return it->second;
        }

        const Owner other = mover == Owner::Blue ? Owner::Red : Owner::Blue;
        std::vector<int> cells;
        for (const auto* c : mixed) cells.insert(cells.end(), c->cells.begin(), c->cells.end());
        std::sort(cells.begin(), cells.end());

        bool result = false;
        for (std::size_t n = 0; n < cells.size() && !result; ++n) {
            int i = cells[n];
            if (!board_.movable(i, mover)) continue;
            for (int d = 0; d < 6 && !result; ++d) {
                if (!board_.empty(board_.next(i, d))) continue;
                for (int k = 1; k < board_.count(i) && !result; ++k) {
                    auto u = board_.play(i, d, k);
                    result = !wins_decomposed(other, spent, depth + 1);
                    board_.undo(u);
                }
            }
        }
        if (!result && mover == Owner::Blue && tally > 0) result = !wins_decomposed(other, spent + 1, depth + 1);
        if (!result && mover == Owner::Red && tally < 0) result = !wins_decomposed(other, spent - 1, depth + 1);
        if (opt_.memoize) game_memo_.emplace(std::move(key), result);
        return result;
    }

    SearchBoard board_;
    SolveOptions opt_;
    std::chrono::steady_clock::time_point start_;
    std::vector<int> component_;
    std::unordered_map<std::string, bool> game_memo_;
    std::unordered_map<std::string, int> solo_memo_;
    std::uint64_t nodes_ = 0;
    int max_depth_ = 0;
};

}  // namespace detail

// Exact negamax. best_move is the first winning move in legal_moves order.
inline SolveReport solve(const Position& p, const SolveOptions& opt = {}) {
    const auto start = std::chrono::steady_clock::now();
    SolveReport report;
    detail::Search search(p, opt);
    auto& board = search.board();
    const Owner mover = owner_of(p.to_move());
    const Owner other = owner_of(opponent(p.to_move()));
    try {
        bool win = false;
        for (int i = 0; i < board.size() && !win; ++i) {
            if (!board.movable(i, mover)) continue;
            for (int d = 0; d < 6 && !win; ++d) {
                if (!board.empty(board.next(i, d))) continue;
                for (int k = 1; k < board.count(i) && !win; ++k) {
                    auto u = board.play(i, d, k);
                    bool child = search.wins(other, 1);
                    board.undo(u);
                    if (!child) {
                        win = true;
                        report.best_move = Move{board.coord(i), Direction(d), k};
                    }
                }
            }
        }
        report.outcome = win ? Outcome::Win : Outcome::Loss;
    } catch (const detail::BudgetExhausted&) {
        report.status = SolveStatus::BudgetExceeded;
        report.best_move.reset();
    } catch (const detail::SearchCancelled&) {
        report.status = SolveStatus::Cancelled;
        report.best_move.reset();
    }
    report.nodes_visited = search.nodes() + 1;
    report.table_entries = search.entries();
    report.max_depth = search.max_depth();
    report.elapsed = std::chrono::steady_clock::now() - start;
    return report;
}

inline constexpr int kReferenceMaxEmpty = 12;

// Plain recursion over the public rules API with no tables.
inline Outcome solve_reference(const Position& p) {
    if (p.empty_cells() > kReferenceMaxEmpty)
        throw OracleTooLarge("reference solver limited to " + std::to_string(kReferenceMaxEmpty) + " empty cells");
    struct Rec {
        static bool wins(const Position& q) {
            for (const Move& m : legal_moves(q))
                if (!wins(apply_move(q, m))) return true;
            return false;
        }
    };
    return Rec::wins(p) ? Outcome::Win : Outcome::Loss;
}

// Number of move sequences of exactly `depth` plies.
inline std::uint64_t perft(const Position& p, int depth) {
    if (depth < 0) throw InvalidParameter("perft depth must be non-negative");
    if (depth == 0) return 1;
    std::uint64_t n = 0;
    for (const Move& m : legal_moves(p)) n += perft(apply_move(p, m), depth - 1);
    return n;
}

inline const char* to_string(Outcome o) { return o == Outcome::Win ? "WIN" : "LOSS"; }

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Decided: return "decided";
        case SolveStatus::BudgetExceeded: return "budget-exceeded";
        case SolveStatus::Cancelled: return "cancelled";
    }
    return "?";
}

}  // namespace battlesheep
