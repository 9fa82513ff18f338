#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "board_io.hpp"
#include "errors.hpp"

namespace battlesheep {

enum class NodeKind : std::uint8_t { Variable, Or, And, Choice, Fanout, Goal };

inline std::string_view node_keyword(NodeKind k) {
    switch (k) {
        case NodeKind::Variable: return "var";
        case NodeKind::Or: return "or";
        case NodeKind::And: return "and";
        case NodeKind::Choice: return "choice";
        case NodeKind::Fanout: return "fanout";
        case NodeKind::Goal: return "goal";
    }
    return "?";
}

constexpr int input_arity(NodeKind k) {
    switch (k) {
        case NodeKind::Variable: return 0;
        case NodeKind::Or:
        case NodeKind::And: return 2;
        default: return 1;
    }
}

constexpr int output_arity(NodeKind k) {
    switch (k) {
        case NodeKind::Goal: return 0;
        case NodeKind::Choice:
        case NodeKind::Fanout: return 2;
        default: return 1;
    }
}

class CircuitError : public Error {
public:
    enum class Kind { Syntax, Arity, MultipleGoals, MissingGoal, DanglingPort, PortReused, Cycle, Disconnected };

    CircuitError(Kind kind, int line, const std::string& what)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), kind_(kind), line_(line) {}

    Kind kind() const { return kind_; }
    int line() const { return line_; }

private:
    Kind kind_;
    int line_;
};

// Output `port` (0-based) of node `node`.
struct Source {
    int node = 0;
    int port = 0;

    friend constexpr bool operator==(const Source&, const Source&) = default;
    friend constexpr auto operator<=>(const Source&, const Source&) = default;
};

struct CircuitNode {
    std::string id;
    NodeKind kind = NodeKind::Variable;
    std::vector<Source> inputs;  // input port i is fed by inputs[i]
    int line = 0;
};

struct Edge {
    Source from;
    int to = 0;
    int to_port = 0;
};

struct Circuit {
    std::vector<CircuitNode> nodes;  // in file order

    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        for (int n = 0; n < static_cast<int>(nodes.size()); ++n)
            for (int i = 0; i < static_cast<int>(nodes[n].inputs.size()); ++i) out.push_back({nodes[n].inputs[i], n, i});
        return out;
    }

    int count(NodeKind k) const {
        return static_cast<int>(std::count_if(nodes.begin(), nodes.end(), [k](const auto& n) { return n.kind == k; }));
    }

    int goal() const {
        for (int i = 0; i < static_cast<int>(nodes.size()); ++i)
            if (nodes[i].kind == NodeKind::Goal) return i;
        return -1;
    }

    // Longest-path depth from the Variables.
    std::vector<int> layers() const {
        std::vector<int> depth(nodes.size(), -1);
        auto rec = [&](auto& self, int n) -> int {
            if (depth[n] >= 0) return depth[n];
            int d = 0;
            for (const Source& s : nodes[n].inputs) d = std::max(d, self(self, s.node) + 1);
            return depth[n] = d;
        };
        for (int n = 0; n < static_cast<int>(nodes.size()); ++n) rec(rec, n);
        return depth;
    }
};

namespace detail {

inline bool valid_id(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_')) return false;
    return true;
}

}  // namespace detail

// Line-based circuit text:
//   var <id> | or <id> <src> <src> | and <id> <src> <src>
//   choice <id> <src> | fanout <id> <src> | goal <id> <src>
// where <src> is <id> or <id>.1 / <id>.2 for two-output nodes.
inline Circuit parse_circuit(std::string_view text) {
    using K = CircuitError::Kind;
    struct RawSource {
        std::string id;
        int port;  // -1 when unqualified
    };
    struct Raw {
        std::string id;
        NodeKind kind;
        std::vector<RawSource> srcs;
        int line;
    };
    std::vector<Raw> raws;
    std::map<std::string, int> index;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        auto tok = detail::split_ws(line);
        if (tok.empty()) continue;
        std::optional<NodeKind> kind;
        for (NodeKind k : {NodeKind::Variable, NodeKind::Or, NodeKind::And, NodeKind::Choice, NodeKind::Fanout,
                           NodeKind::Goal})
            if (tok[0] == node_keyword(k)) kind = k;
        if (!kind) throw CircuitError(K::Syntax, line_no, "unknown node kind '" + std::string(tok[0]) + "'");
        if (tok.size() < 2 || !detail::valid_id(tok[1]))
            throw CircuitError(K::Syntax, line_no, "expected an identifier after '" + std::string(tok[0]) + "'");
        const int want = input_arity(*kind);
        if (static_cast<int>(tok.size()) - 2 != want)
            throw CircuitError(K::Arity, line_no,
                               std::string(tok[0]) + " takes " + std::to_string(want) + " source(s), got " +
                                   std::to_string(tok.size() - 2));
        Raw raw{std::string(tok[1]), *kind, {}, line_no};
        for (std::size_t i = 2; i < tok.size(); ++i) {
            std::string_view s = tok[i];
            int port = -1;
            if (auto dot = s.find('.'); dot != std::string_view::npos) {
                std::string_view suffix = s.substr(dot + 1);
                if (suffix != "1" && suffix != "2")
                    throw CircuitError(K::Syntax, line_no, "bad port suffix in '" + std::string(s) + "'");
                port = suffix == "1" ? 0 : 1;
                s = s.substr(0, dot);
            }
            if (!detail::valid_id(s)) throw CircuitError(K::Syntax, line_no, "bad source '" + std::string(tok[i]) + "'");
            raw.srcs.push_back({std::string(s), port});
        }
        if (!index.emplace(raw.id, static_cast<int>(raws.size())).second)
            throw CircuitError(K::Syntax, line_no, "duplicate id '" + raw.id + "'");
        raws.push_back(std::move(raw));
    }

    Circuit c;
    int goals = 0;
    for (const Raw& r : raws) {
        if (r.kind == NodeKind::Goal && ++goals > 1) throw CircuitError(K::MultipleGoals, r.line, "more than one goal");
        c.nodes.push_back({r.id, r.kind, {}, r.line});
    }
    std::map<Source, int> used;  // source -> line of first use
    for (std::size_t n = 0; n < raws.size(); ++n) {
        for (const RawSource& s : raws[n].srcs) {
            auto it = index.find(s.id);
            if (it == index.end())
                throw CircuitError(K::DanglingPort, raws[n].line, "unknown source node '" + s.id + "'");
            const NodeKind from = raws[it->second].kind;
            const int outs = output_arity(from);
            if (outs == 0) throw CircuitError(K::Arity, raws[n].line, "'" + s.id + "' has no output");
            if (outs == 1 && s.port >= 0)
                throw CircuitError(K::Syntax, raws[n].line, "'" + s.id + "' has a single output; drop the suffix");
            if (outs == 2 && s.port < 0)
                throw CircuitError(K::Syntax, raws[n].line, "'" + s.id + "' has two outputs; use .1 or .2");
            Source src{it->second, std::max(s.port, 0)};
            if (auto [u, fresh] = used.emplace(src, raws[n].line); !fresh)
                throw CircuitError(K::PortReused, raws[n].line,
                                   "output of '" + s.id + "' already used on line " + std::to_string(u->second));
            c.nodes[n].inputs.push_back(src);
        }
    }
    for (int n = 0; n < static_cast<int>(c.nodes.size()); ++n)
        for (int p = 0; p < output_arity(c.nodes[n].kind); ++p)
            if (!used.count({n, p}))
                throw CircuitError(K::DanglingPort, c.nodes[n].line,
                                   "output " + std::to_string(p + 1) + " of '" + c.nodes[n].id + "' is unused");

    if (goals == 0) throw CircuitError(K::MissingGoal, 0, "circuit has no goal");

    // Cycle check by depth-first colouring.
    std::vector<int> colour(c.nodes.size(), 0);
    auto visit = [&](auto& self, int n) -> void {
        colour[n] = 1;
        for (const Source& s : c.nodes[n].inputs) {
            if (colour[s.node] == 1)
                throw CircuitError(K::Cycle, c.nodes[n].line, "cycle through '" + c.nodes[n].id + "'");
            if (colour[s.node] == 0) self(self, s.node);
        }
        colour[n] = 2;
    };
    for (int n = 0; n < static_cast<int>(c.nodes.size()); ++n)
        if (colour[n] == 0) visit(visit, n);

    // Undirected connectivity.
    std::vector<std::vector<int>> adj(c.nodes.size());
    for (const Edge& e : c.edges()) {
        adj[e.from.node].push_back(e.to);
        adj[e.to].push_back(e.from.node);
    }
    std::vector<char> seen(c.nodes.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        int n = stack.back();
        stack.pop_back();
        for (int m : adj[n])
            if (!seen[m]) {
                seen[m] = 1;
                stack.push_back(m);
            }
    }
    for (int n = 0; n < static_cast<int>(c.nodes.size()); ++n)
        if (!seen[n]) throw CircuitError(K::Disconnected, c.nodes[n].line, "'" + c.nodes[n].id + "' is disconnected");
    return c;
}

}  // namespace battlesheep
