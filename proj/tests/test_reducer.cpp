#include <gtest/gtest.h>

#include <battlesheep/board_io.hpp>
#include <battlesheep/layout.hpp>
#include <battlesheep/solver.hpp>

#include "test_util.hpp"

using namespace battlesheep;

namespace {

std::string circuit_text(const std::string& name) {
    return testutil::read_file(std::string(BATTLESHEEP_SOURCE_DIR) + "/circuits/" + name + ".circ");
}

struct Expected {
    const char* name;
    Outcome outcome;
};

const Expected kMicroSuite[] = {
    {"var_goal", Outcome::Win}, {"and", Outcome::Loss}, {"choice_or", Outcome::Win},
    {"fanout_and", Outcome::Win}, {"or", Outcome::Win}, {"choice_and", Outcome::Loss},
};

}  // namespace

TEST(Makeup, PublishedFormula) {
    EXPECT_EQ(makeup_size(LayoutStats{2, 1, 1, 0, 1, 0}), 12);
    EXPECT_EQ(makeup_size(LayoutStats{0, 0, 0, 0, 0, 0}), 0);
    EXPECT_EQ(makeup_size(LayoutStats{1, 0, 0, 1, 0, 0}), 5);
}

TEST(Makeup, CatalogBudgets) {
    BudgetTable t = BudgetTable::catalog();
    EXPECT_EQ(t, (BudgetTable{1, 1, 5, 4, 5}));
    EXPECT_EQ(makeup_size(LayoutStats{0, 0, 1, 0, 0, 0}, t), 5);
}

TEST(Reducer, EveryCircuitPassesLayoutCheck) {
    for (const auto& [name, _] : kMicroSuite) {
        SCOPED_TRACE(name);
        std::string text = circuit_text(name);
        Circuit c = parse_circuit(text);
        Layout l = layout(c);
        EXPECT_NO_THROW(check_layout(c, l));
        EXPECT_EQ(l.stats.k, makeup_size(l.stats, BudgetTable::catalog()));
        EXPECT_EQ(l.board.to_move(), Player::Blue);
        EXPECT_LE(l.board.total_tokens(), l.board.open_cells());
        EXPECT_EQ(parse_board(serialize_board(l.board)), l.board);
    }
}

TEST(Reducer, Deterministic) {
    for (const auto& [name, _] : kMicroSuite) {
        std::string text = circuit_text(name);
        EXPECT_EQ(serialize_board(compile(text)), serialize_board(compile(text))) << name;
    }
}

TEST(Reducer, MinimalCircuit) {
    Layout l = compile_layout(circuit_text("var_goal"));
    EXPECT_EQ(l.stats, (LayoutStats{}));
    int vars = 0, goals = 0, makeups = 0;
    for (const Placement& p : l.placements) {
        vars += p.kind.type == GadgetType::Variable;
        goals += p.kind.type == GadgetType::Goal;
        makeups += p.kind.type == GadgetType::Makeup;
    }
    EXPECT_EQ(vars, 1);
    EXPECT_EQ(goals, 1);
    EXPECT_EQ(makeups, 0);
}

TEST(Reducer, AndCircuitStats) {
    Layout l = compile_layout(circuit_text("and"));
    EXPECT_EQ(l.stats.c, 1);
    EXPECT_GE(l.stats.k, 4);
    EXPECT_EQ(l.stats, (LayoutStats{2, 0, 1, 0, 0, 7}));
}

TEST(Reducer, TamperedBoardRejected) {
    Circuit c = parse_circuit(circuit_text("and"));
    Layout l = layout(c);
    const auto& [at, cell] = l.board.cells()[l.board.size() / 2];
    Layout bad = l;
    bad.board = l.board.with_cell(at, cell.is_blocked() ? Cell::empty() : Cell::blocked());
    EXPECT_THROW(check_layout(c, bad), LayoutViolation);
    bad = l;
    bad.stats.k += 1;
    EXPECT_THROW(check_layout(c, bad), LayoutViolation);
}

TEST(Reducer, MicroSuiteOutcomes) {
    for (const auto& [name, want] : kMicroSuite) {
        SCOPED_TRACE(name);
        SolveReport r = solve(compile(circuit_text(name)));
        ASSERT_TRUE(r.decided());
        EXPECT_EQ(*r.outcome, want);
    }
}

// With the published And budget of 4 the strip is one move short and the
// unsatisfiable (x AND y) circuit becomes a Blue win.
TEST(Reducer, PublishedAndBudgetIsTooSmall) {
    Layout l = compile_layout(circuit_text("and"), BudgetTable::published());
    EXPECT_EQ(l.stats.k, 6);
    SolveReport r = solve(l.board);
    ASSERT_TRUE(r.decided());
    EXPECT_EQ(*r.outcome, Outcome::Win);
}

TEST(Reducer, ParseErrorsPropagate) {
    EXPECT_THROW(compile("var x\n"), CircuitError);
}
