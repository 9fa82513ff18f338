#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "board_io.hpp"
#include "gadgets.hpp"
#include "rules.hpp"
#include "solver.hpp"

namespace battlesheep::service {

using json = nlohmann::json;

// Thrown for requests that conflict with the session state (HTTP 409).
class Conflict : public Error {
public:
    using Error::Error;
};

// Malformed request bodies (HTTP 400).
class BadRequest : public Error {
public:
    using Error::Error;
};

inline json coord_json(HexCoord c) { return {{"q", c.q}, {"r", c.r}}; }

inline json move_json(const Move& m) {
    return {{"from", coord_json(m.from)}, {"dir", m.dir.index()}, {"count", m.count}};
}

inline json move_json(const Position& p, const Move& m) {
    json j = move_json(m);
    if (auto dest = slide_destination(p, m.from, m.dir)) j["dest"] = coord_json(*dest);
    return j;
}

inline Move move_from_json(const json& j) {
    try {
        const json& from = j.at("from");
        return {{from.at("q").get<int>(), from.at("r").get<int>()}, Direction(j.at("dir").get<int>()),
                j.at("count").get<int>()};
    } catch (const json::exception& e) {
        throw BadRequest(std::string("bad move: ") + e.what());
    }
}

inline json cells_json(const Position& p) {
    json cells = json::array();
    for (const auto& [at, c] : p.cells()) {
        json cell = coord_json(at);
        if (c.is_blocked()) {
            cell["kind"] = "blocked";
        } else if (c.is_empty()) {
            cell["kind"] = "empty";
        } else {
            cell["kind"] = "stack";
            cell["owner"] = std::string(1, owner_char(c.owner()));
            cell["count"] = c.count();
        }
        cells.push_back(std::move(cell));
    }
    return cells;
}

inline json moves_json(const Position& p) {
    json moves = json::array();
    for (const Move& m : legal_moves(p)) moves.push_back(move_json(p, m));
    return {{"moves", moves}};
}

// One game: the board it started from and the moves played since.
class Session {
public:
    explicit Session(std::string id, Position initial)
        : id_(std::move(id)), initial_(initial), current_(std::move(initial)) {}

    const std::string& id() const { return id_; }

    json state() const {
        std::shared_lock lock(mutex_);
        return state_locked();
    }

    Position current() const {
        std::shared_lock lock(mutex_);
        return current_;
    }

    std::vector<Move> history() const {
        std::shared_lock lock(mutex_);
        return history_;
    }

    Position initial() const {
        std::shared_lock lock(mutex_);
        return initial_;
    }

    json reset(Position p) {
        std::unique_lock lock(mutex_);
        initial_ = p;
        current_ = std::move(p);
        history_.clear();
        return state_locked();
    }

    json play(const Move& m) {
        std::unique_lock lock(mutex_);
        play_locked(m);
        return state_locked();
    }

    // Plays `m`, then answers with the solver's move for the other side: its
    // winning move when one is found, otherwise the first legal move.
    json play_with_reply(const Move& m, const SolveOptions& opt) {
        std::unique_lock lock(mutex_);
        play_locked(m);
        if (!legal_moves(current_).empty()) {
            SolveReport r = solve(current_, opt);
            play_locked(r.best_move ? *r.best_move : legal_moves(current_).front());
        }
        return state_locked();
    }

    json undo() {
        std::unique_lock lock(mutex_);
        if (history_.empty()) throw Conflict("nothing to undo");
        history_.pop_back();
        Position p = initial_;
        for (const Move& m : history_) p = apply_move(p, m);
        current_ = std::move(p);
        return state_locked();
    }

    // Solves a snapshot without holding the session lock.
    json hint(const SolveOptions& base) {
        Position p = current();
        cancel_ = false;
        SolveOptions opt = base;
        opt.cancel = &cancel_;
        SolveReport r = solve(p, opt);
        json j{{"outcome", r.decided() ? (*r.outcome == Outcome::Win ? "win" : "loss") : "unknown"},
               {"status", to_string(r.status)},
               {"nodes", r.nodes_visited},
               {"seconds", r.elapsed.count()}};
        if (r.best_move) j["bestMove"] = move_json(p, *r.best_move);
        return j;
    }

    void cancel() { cancel_ = true; }

private:
    void play_locked(const Move& m) {
        if (!is_legal(current_, m)) throw Conflict("illegal move");
        current_ = apply_move(current_, m);
        history_.push_back(m);
    }

    json state_locked() const {
        json hist = json::array();
        for (const Move& m : history_) hist.push_back(move_json(m));
        return {{"sessionId", id_},
                {"cells", cells_json(current_)},
                {"toMove", std::string(1, player_char(current_.to_move()))},
                {"history", hist},
                {"gameOver", is_loss(current_)}};
    }

    std::string id_;
    mutable std::shared_mutex mutex_;
    Position initial_;
    Position current_;
    std::vector<Move> history_;
    std::atomic<bool> cancel_{false};
};

struct ServiceOptions {
    bool multi = false;
    std::uint64_t hint_nodes = 10'000'000;
    double hint_seconds = 30.0;
};

// Session registry plus the HTTP routes. In single mode every request goes to
// one session; with `multi` the `session` query parameter or the X-Session-Id
// header picks one, and POST /api/new without either opens a new session.
class Service {
public:
    explicit Service(Position initial, ServiceOptions opt = {}) : opt_(opt) {
        sessions_.emplace("default", std::make_shared<Session>("default", std::move(initial)));
    }

    std::shared_ptr<Session> session(const std::string& id) const {
        std::lock_guard lock(mutex_);
        auto it = sessions_.find(opt_.multi ? id : "default");
        if (it == sessions_.end()) return nullptr;
        return it->second;
    }

    std::shared_ptr<Session> open(Position p) {
        std::lock_guard lock(mutex_);
        std::string id = "s" + std::to_string(++next_id_);
        auto s = std::make_shared<Session>(id, std::move(p));
        sessions_.emplace(id, s);
        return s;
    }

    SolveOptions hint_options(const json& body) const {
        SolveOptions o;
        o.budget.max_nodes = body.value("nodes", opt_.hint_nodes);
        o.budget.max_time = std::chrono::duration<double>(body.value("seconds", opt_.hint_seconds));
        return o;
    }

    void mount(httplib::Server& server) {
        server.Get("/api/state", [this](const auto& req, auto& res) {
            handle(req, res, [&](Session& s) { return s.state(); });
        });
        server.Get("/api/moves", [this](const auto& req, auto& res) {
            handle(req, res, [&](Session& s) { return moves_json(s.current()); });
        });
        server.Post("/api/move", [this](const auto& req, auto& res) {
            handle(req, res, [&](Session& s) {
                json body = parse_body(req);
                Move m = move_from_json(body);
                if (body.value("reply", false)) return s.play_with_reply(m, hint_options(body));
                return s.play(m);
            });
        });
        server.Post("/api/solve", [this](const auto& req, auto& res) {
            handle(req, res, [&](Session& s) { return s.hint(hint_options(parse_body(req))); });
        });
        server.Post("/api/solve/cancel", [this](const auto& req, auto& res) {
            handle(req, res, [&](Session& s) {
                s.cancel();
                return json{{"cancelled", true}};
            });
        });
        server.Post("/api/undo", [this](const auto& req, auto& res) {
            handle(req, res, [&](Session& s) { return s.undo(); });
        });
        server.Post("/api/new", [this](const auto& req, auto& res) {
            try {
                json body = parse_body(req);
                Position p = board_from_body(body);
                std::string id = session_id(req);
                if (opt_.multi && id.empty()) return reply(res, 200, open(std::move(p))->state());
                auto s = session(id);
                if (!s) return reply(res, 404, json{{"error", "unknown session"}});
                reply(res, 200, s->reset(std::move(p)));
            } catch (const std::exception& e) {
                reply(res, 400, json{{"error", e.what()}});
            }
        });
        server.Get("/api/gadgets", [](const auto&, auto& res) {
            json names = json::array();
            for (const auto& f : fixtures::all) names.push_back(f.name);
            reply(res, 200, names);
        });
        server.Get(R"(/api/gadgets/([A-Za-z0-9_]+))", [](const auto& req, auto& res) {
            const std::string name = req.matches[1];
            for (const auto& f : fixtures::all)
                if (f.name == name) return res.set_content(std::string(f.text), "text/plain");
            reply(res, 404, json{{"error", "no fixture named '" + name + "'"}});
        });
    }

private:
    static void reply(httplib::Response& res, int status, const json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    static json parse_body(const httplib::Request& req) {
        if (req.body.empty()) return json::object();
        json j = json::parse(req.body, nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw BadRequest("body is not a JSON object");
        return j;
    }

    static Position board_from_body(const json& body) {
        if (body.contains("board")) return parse_board(body.at("board").get<std::string>());
        if (body.contains("gadget")) return fixture_position(body.at("gadget").get<std::string>());
        throw BadRequest("expected 'board' or 'gadget'");
    }

    static std::string session_id(const httplib::Request& req) {
        if (req.has_param("session")) return req.get_param_value("session");
        return req.get_header_value("X-Session-Id");
    }

    template <class F>
    void handle(const httplib::Request& req, httplib::Response& res, F&& f) {
        auto s = session(session_id(req));
        if (!s) return reply(res, 404, json{{"error", "unknown session"}});
        try {
            reply(res, 200, f(*s));
        } catch (const Conflict& e) {
            reply(res, 409, json{{"error", e.what()}});
        } catch (const IllegalMove& e) {
            reply(res, 409, json{{"error", e.what()}});
        } catch (const std::exception& e) {
            reply(res, 400, json{{"error", e.what()}});
        }
    }

    ServiceOptions opt_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    int next_id_ = 0;
};

}  // namespace battlesheep::service
