#include <gtest/gtest.h>

#include <battlesheep/solver.hpp>

#include "test_util.hpp"

using namespace battlesheep;
using testutil::fixture;

namespace {

SolveOptions options(bool memoize, bool decompose) {
    SolveOptions o;
    o.memoize = memoize;
    o.decompose = decompose;
    return o;
}

}  // namespace

TEST(Perft, SampleBoards) {
    EXPECT_EQ(perft(fixture("fig2"), 0), 1u);
    EXPECT_EQ(perft(fixture("fig2"), 1), 12u);
    EXPECT_EQ(perft(fixture("fig5"), 1), 1u);
    EXPECT_EQ(perft(fixture("fig5"), 2), 0u);
    EXPECT_THROW(perft(fixture("fig5"), -1), InvalidParameter);
}

TEST(Reference, GuardsLargeBoards) {
    std::vector<Position::Entry> cells;
    for (int q = 0; q < 13; ++q) cells.push_back({{q, 0}, Cell::empty()});
    EXPECT_THROW(solve_reference(Position(cells, Player::Blue)), OracleTooLarge);
}

TEST(Solve, GoalIsWinWithItsOnlyMove) {
    auto r = solve(fixture("fig5"));
    ASSERT_TRUE(r.decided());
    EXPECT_EQ(*r.outcome, Outcome::Win);
    EXPECT_EQ(*r.best_move, (Move{{0, 0}, Direction(2), 1}));
    auto loss = solve(fixture("fig5").with_to_move(Player::Red));
    EXPECT_EQ(*loss.outcome, Outcome::Loss);
    EXPECT_FALSE(loss.best_move);
}

TEST(Solve, IsolatedVariableFavoursSecondPlayer) {
    for (Player p : {Player::Blue, Player::Red}) {
        Position v = fixture("fig6").with_to_move(p);
        EXPECT_EQ(solve_reference(v), Outcome::Loss);
        EXPECT_EQ(*solve(v).outcome, Outcome::Loss);
    }
}

TEST(Solve, MatchesReferenceOnRandomBoards) {
    std::mt19937 rng(2024);
    for (int i = 0; i < 300; ++i) {
        Position p = testutil::random_blob(rng, 10, 6);
        Outcome expected = solve_reference(p);
        for (bool memo : {false, true})
            for (bool dec : {false, true}) {
                auto r = solve(p, options(memo, dec));
                ASSERT_TRUE(r.decided());
                ASSERT_EQ(*r.outcome, expected) << p << " memo=" << memo << " dec=" << dec;
                if (expected == Outcome::Win) {
                    ASSERT_TRUE(r.best_move);
                    EXPECT_EQ(solve_reference(apply_move(p, *r.best_move)), Outcome::Loss);
                }
            }
    }
}

TEST(Solve, BestMoveIsFirstWinningMove) {
    std::mt19937 rng(5);
    for (int i = 0; i < 200; ++i) {
        Position p = testutil::random_blob(rng, 10, 6);
        std::optional<Move> first;
        for (const Move& m : legal_moves(p))
            if (solve_reference(apply_move(p, m)) == Outcome::Loss) {
                first = m;
                break;
            }
        EXPECT_EQ(solve(p).best_move, first);
    }
}

TEST(Solve, BudgetExceededIsReported) {
    std::vector<Position::Entry> cells;
    for (int q = -3; q <= 3; ++q)
        for (int r = -3; r <= 3; ++r)
            if (hex_distance({q, r}, {0, 0}) <= 3) cells.push_back({{q, r}, Cell::empty()});
    Position p(cells, Player::Blue);
    p = p.with_cell({0, 0}, Cell::stack(Owner::Blue, 8)).with_cell({3, 0}, Cell::stack(Owner::Red, 8));
    SolveOptions o;
    o.budget.max_nodes = 500;
    auto r = solve(p, o);
    EXPECT_EQ(r.status, SolveStatus::BudgetExceeded);
    EXPECT_FALSE(r.outcome);
    EXPECT_FALSE(r.best_move);
}

TEST(Solve, DecompositionAgreesOnLargerBoards) {
    std::mt19937 rng(99);
    int checked = 0;
    for (int i = 0; i < 300; ++i) {
        Position p = testutil::random_blob(rng, 22, 6);
        auto plain = solve(p, options(true, false));
        auto dec = solve(p, options(true, true));
        ASSERT_TRUE(plain.decided() && dec.decided());
        ASSERT_EQ(*plain.outcome, *dec.outcome) << p;
        EXPECT_EQ(plain.best_move, dec.best_move);
        if (p.empty_cells() <= 9) {
            EXPECT_EQ(solve_reference(p), *dec.outcome);
            ++checked;
        }
    }
    EXPECT_GT(checked, 50);
}
