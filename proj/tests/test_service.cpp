#include <gtest/gtest.h>

#include <set>
#include <thread>

#include <battlesheep/service.hpp>

#include "test_util.hpp"

using namespace battlesheep;
using service::json;

namespace {

class ServiceTest : public ::testing::Test {
protected:
    void start(bool multi) {
        svc_ = std::make_unique<service::Service>(fixture_position("fig5"), service::ServiceOptions{.multi = multi});
        svc_->mount(server_);
        port_ = server_.bind_to_any_port("127.0.0.1");
        ASSERT_GT(port_, 0);
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
        client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    }

    void SetUp() override { start(false); }

    void TearDown() override {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    json get(const std::string& path, int want = 200) {
        auto res = client_->Get(path);
        EXPECT_TRUE(res);
        if (!res) return {};
        EXPECT_EQ(res->status, want) << path << ": " << res->body;
        return json::parse(res->body);
    }

    json post(const std::string& path, const json& body, int want = 200) {
        auto res = client_->Post(path, body.dump(), "application/json");
        EXPECT_TRUE(res);
        if (!res) return {};
        EXPECT_EQ(res->status, want) << path << ": " << res->body;
        return json::parse(res->body);
    }

    std::unique_ptr<service::Service> svc_;
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::unique_ptr<httplib::Client> client_;
};

Position state_position(const json& state) {
    std::vector<Position::Entry> cells;
    for (const json& c : state.at("cells")) {
        HexCoord at{c.at("q").get<int>(), c.at("r").get<int>()};
        const std::string kind = c.at("kind");
        if (kind == "blocked") {
            cells.push_back({at, Cell::blocked()});
        } else if (kind == "empty") {
            cells.push_back({at, Cell::empty()});
        } else {
            const std::string o = c.at("owner");
            Owner owner = o == "B" ? Owner::Blue : o == "R" ? Owner::Red : Owner::Neutral;
            cells.push_back({at, Cell::stack(owner, c.at("count").get<int>())});
        }
    }
    return Position(cells, state.at("toMove") == "B" ? Player::Blue : Player::Red);
}

}  // namespace

TEST_F(ServiceTest, StateEchoesLoadedBoard) {
    json s = get("/api/state");
    EXPECT_EQ(state_position(s), fixture_position("fig5"));
    EXPECT_EQ(s["toMove"], "B");
    EXPECT_TRUE(s["history"].empty());
}

TEST_F(ServiceTest, UiFlow) {
    json s = post("/api/new", {{"board", testutil::read_file(testutil::fixture_path("fig2"))}});
    Position fig2 = testutil::fixture("fig2");
    EXPECT_EQ(state_position(s), fig2);

    json moves = get("/api/moves")["moves"];
    ASSERT_EQ(moves.size(), 12u);
    std::set<std::pair<int, int>> targets;
    for (const json& m : moves) targets.insert({m["dest"]["q"].get<int>(), m["dest"]["r"].get<int>()});
    EXPECT_EQ(targets.size(), 3u);

    json move = moves[3];
    json after = post("/api/move", {{"from", move["from"]}, {"dir", move["dir"]}, {"count", move["count"]}});
    ASSERT_EQ(after["history"].size(), 1u);
    Move m = service::move_from_json(move);
    EXPECT_EQ(state_position(after), apply_move(fig2, m));
    EXPECT_EQ(state_position(get("/api/state")), apply_move(fig2, m));

    json undone = post("/api/undo", json::object());
    EXPECT_EQ(state_position(undone), fig2);
    EXPECT_TRUE(undone["history"].empty());

    post("/api/new", {{"board", std::string(fixture_text("fig5"))}});
    json hint = post("/api/solve", json::object());
    EXPECT_EQ(hint["outcome"], "win");
    EXPECT_EQ(hint["bestMove"]["from"], (json{{"q", 0}, {"r", 0}}));
    EXPECT_EQ(hint["bestMove"]["dir"], 2);
}

TEST_F(ServiceTest, RejectsIllegalMoveWithoutChangingState) {
    json before = get("/api/state");
    json err = post("/api/move", {{"from", {{"q", 0}, {"r", 0}}}, {"dir", 0}, {"count", 1}}, 409);
    EXPECT_TRUE(err.contains("error"));
    EXPECT_EQ(get("/api/state"), before);
    post("/api/undo", json::object(), 409);
    post("/api/move", {{"dir", 0}}, 400);
    post("/api/new", {{"board", "cell 0 0 X 3"}}, 400);
    EXPECT_EQ(get("/api/state"), before);
}

TEST_F(ServiceTest, HistoryReplayReproducesState) {
    post("/api/new", {{"board", testutil::read_file(testutil::fixture_path("fig2"))}});
    std::mt19937 rng(7);
    for (int ply = 0; ply < 6; ++ply) {
        json moves = get("/api/moves")["moves"];
        if (moves.empty()) break;
        json m = moves[rng() % moves.size()];
        post("/api/move", {{"from", m["from"]}, {"dir", m["dir"]}, {"count", m["count"]}});
    }
    json s = get("/api/state");
    Position p = testutil::fixture("fig2");
    for (const json& m : s["history"]) p = apply_move(p, service::move_from_json(m));
    EXPECT_EQ(state_position(s), p);
}

TEST_F(ServiceTest, SolverReply) {
    post("/api/new", {{"board", testutil::read_file(testutil::fixture_path("fig2"))}});
    json s = post("/api/move", {{"from", {{"q", -1}, {"r", 0}}}, {"dir", 0}, {"count", 1}, {"reply", true}});
    EXPECT_EQ(s["history"].size(), 2u);
    EXPECT_EQ(s["toMove"], "B");
}

TEST_F(ServiceTest, BudgetExhaustionIsReportedAsUnknown) {
    post("/api/new", {{"board", testutil::read_file(testutil::fixture_path("fig6"))}});
    json hint = post("/api/solve", {{"nodes", 1}});
    EXPECT_EQ(hint["outcome"], "unknown");
    EXPECT_FALSE(hint.contains("bestMove"));
}

TEST_F(ServiceTest, Gadgets) {
    json names = get("/api/gadgets");
    ASSERT_EQ(names.size(), 14u);
    EXPECT_EQ(names[0], "fig10");
    auto res = client_->Get("/api/gadgets/fig9");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(parse_board(res->body), testutil::fixture("fig9"));
    get("/api/gadgets/nope", 404);
    post("/api/new", {{"gadget", "fig3a"}});
    EXPECT_EQ(state_position(get("/api/state")), testutil::fixture("fig3a"));
}

class MultiServiceTest : public ServiceTest {
protected:
    void SetUp() override { start(true); }
};

TEST_F(MultiServiceTest, SessionRouting) {
    json a = post("/api/new", {{"gadget", "fig2"}});
    json b = post("/api/new", {{"gadget", "fig5"}});
    std::string ida = a["sessionId"], idb = b["sessionId"];
    EXPECT_NE(ida, idb);
    json m = get("/api/moves?session=" + ida)["moves"][0];
    post("/api/move?session=" + ida, {{"from", m["from"]}, {"dir", m["dir"]}, {"count", m["count"]}});
    EXPECT_EQ(get("/api/state?session=" + ida)["history"].size(), 1u);
    EXPECT_EQ(get("/api/state?session=" + idb)["history"].size(), 0u);
    get("/api/state?session=zzz", 404);
}
