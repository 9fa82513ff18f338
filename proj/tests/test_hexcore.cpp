#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <battlesheep/board_io.hpp>
#include <battlesheep/fixture_data.hpp>
#include <battlesheep/rules.hpp>

#include "test_util.hpp"

using namespace battlesheep;
using testutil::fixture;

namespace {

Position transform(const Position& p, int rot, bool mirrored, HexCoord shift) {
    std::vector<Position::Entry> cells;
    for (const auto& [at, c] : p.cells()) {
        HexCoord x = mirrored ? mirror(at) : at;
        cells.push_back({rotate_ccw(x, rot) + shift, c});
    }
    return Position(std::move(cells), p.to_move());
}

}  // namespace

TEST(Direction, OffsetsInIndexOrder) {
    const HexCoord expected[6] = {{1, 0}, {1, -1}, {0, -1}, {-1, 0}, {-1, 1}, {0, 1}};
    for (int i = 0; i < 6; ++i) {
        EXPECT_EQ(Direction(i).offset(), expected[i]);
        bool ok = false;
        EXPECT_EQ(Direction::from_offset(expected[i], &ok).index(), i);
        EXPECT_TRUE(ok);
    }
    bool ok = true;
    Direction::from_offset({2, 0}, &ok);
    EXPECT_FALSE(ok);
}

TEST(Direction, NegationRotationMirror) {
    for (Direction d : Direction::all()) {
        EXPECT_EQ(d.negated().offset(), -d.offset());
        EXPECT_EQ(d.rotated_ccw(6), d);
        EXPECT_EQ(rotate_ccw(d.offset(), 1), d.rotated_ccw().offset());
        EXPECT_EQ(mirror(d.offset()), d.mirrored().offset());
        EXPECT_EQ(d.mirrored().mirrored(), d);
    }
    EXPECT_EQ(hex_distance({0, 0}, {2, -1}), 2);
    EXPECT_EQ(hex_distance({-3, 2}, {1, 0}), 4);
}

TEST(Rules, SlideStopsAtFarthestEmpty) {
    Position p = fixture("fig2");
    EXPECT_EQ(slide_destination(p, {-1, 0}, Direction(4)), (HexCoord{-3, 2}));
    EXPECT_EQ(slide_destination(p, {-1, 0}, Direction(1)), (HexCoord{0, -1}));
    EXPECT_EQ(slide_destination(p, {-1, 0}, Direction(0)), (HexCoord{1, 0}));
    EXPECT_FALSE(slide_destination(p, {-1, 0}, Direction(5)));
    EXPECT_THROW(slide_destination(p, {0, 0}, Direction(0)), PreconditionError);
}

TEST(Rules, LegalMovesOnSampleBoard) {
    Position p = fixture("fig2");
    auto moves = legal_moves(p);
    ASSERT_EQ(moves.size(), 12u);
    EXPECT_TRUE(std::is_sorted(moves.begin(), moves.end()));
    std::set<HexCoord> dests;
    std::set<int> sizes;
    for (const Move& m : moves) {
        EXPECT_EQ(m.from, (HexCoord{-1, 0}));
        dests.insert(*slide_destination(p, m.from, m.dir));
        sizes.insert(m.count);
    }
    EXPECT_EQ(dests, (std::set<HexCoord>{{-3, 2}, {0, -1}, {1, 0}}));
    EXPECT_EQ(sizes, (std::set<int>{1, 2, 3, 4}));
    EXPECT_FALSE(is_loss(p));
}

TEST(Rules, GoalHasSingleMove) {
    auto moves = legal_moves(fixture("fig5"));
    ASSERT_EQ(moves.size(), 1u);
    EXPECT_EQ(moves[0], (Move{{0, 0}, Direction(2), 1}));
}

TEST(Rules, VariableTransitions) {
    Position v = fixture("fig6");
    Position a = apply_move(apply_move(v, {{1, 0}, Direction(2), 1}), {{0, 0}, Direction(2), 1});
    EXPECT_EQ(a, fixture("fig7a"));
    EXPECT_TRUE(a.at({1, 1}).is_empty());
    Position b = apply_move(v.with_to_move(Player::Red), {{0, 0}, Direction(1), 1});
    EXPECT_EQ(b, fixture("fig7b"));
    Position forced = apply_move(b, {{1, 0}, Direction(5), 1});
    EXPECT_TRUE(is_loss(forced));
}

TEST(Rules, WireSignals) {
    Position wire = fixture("fig3a");
    Position active = apply_move(wire.with_cell({0, -4}, Cell::stack(Owner::Blue, 1)), {{0, 0}, Direction(2), 1});
    EXPECT_EQ(active, fixture("fig3b"));
    Position inactive = apply_move(wire, {{0, -4}, Direction(5), 1});
    EXPECT_EQ(inactive, fixture("fig3c"));
}

TEST(Rules, IllegalMovesRejected) {
    Position p = fixture("fig2");
    EXPECT_THROW(apply_move(p, {{-1, 0}, Direction(5), 1}), IllegalMove);
    EXPECT_THROW(apply_move(p, {{-1, 0}, Direction(0), 5}), IllegalMove);
    EXPECT_THROW(apply_move(p, {{-1, 0}, Direction(0), 0}), IllegalMove);
    EXPECT_THROW(apply_move(p, {{2, 0}, Direction(3), 1}), IllegalMove);
    EXPECT_THROW(apply_move(p, {{-1, 1}, Direction(3), 1}), IllegalMove);
    EXPECT_THROW(apply_move(p, {{9, 9}, Direction(0), 1}), IllegalMove);
}

TEST(Position, RejectsInvalidStacks) {
    EXPECT_THROW(Position({{{0, 0}, Cell::stack(Owner::Neutral, 2)}}, Player::Blue), InvalidPosition);
    EXPECT_THROW(Position({{{0, 0}, Cell::stack(Owner::Blue, 0)}}, Player::Blue), InvalidPosition);
    EXPECT_THROW(Position({{{0, 0}, Cell::empty()}, {{0, 0}, Cell::blocked()}}, Player::Blue), InvalidPosition);
    EXPECT_THROW(Position({}, Player::Blue), InvalidPosition);
    Position p({{{0, 0}, Cell::empty()}}, Player::Blue);
    EXPECT_TRUE(p.at({5, 5}).is_blocked());
    EXPECT_TRUE(is_loss(p));
}

TEST(BoardIo, ParseErrorsCarryKindAndLine) {
    auto expect_error = [](const std::string& text, ParseError::Kind kind, int line) {
        try {
            parse_board(text);
            ADD_FAILURE() << "no error for:\n" << text;
        } catch (const ParseError& e) {
            EXPECT_EQ(e.kind(), kind) << e.what();
            EXPECT_EQ(e.line(), line) << e.what();
        }
    };
    expect_error("turn B\ncell 0 0 N 2\n", ParseError::Kind::NeutralOverfull, 2);
    expect_error("turn B\ncell 0 0 .\n# c\ncell 0 0 X\n", ParseError::Kind::DuplicateCoordinate, 4);
    expect_error("cell 0 0 .\n", ParseError::Kind::MissingTurn, 0);
    expect_error("turn B\ncell 0 0 B 0\n", ParseError::Kind::InvalidStack, 2);
    expect_error("turn B\ncell 0 0 B -1\n", ParseError::Kind::InvalidStack, 2);
    expect_error("turn B\ncell 0 zero .\n", ParseError::Kind::Syntax, 2);
    expect_error("turn Q\n", ParseError::Kind::Syntax, 1);
    expect_error("turn B\nturn R\ncell 0 0 .\n", ParseError::Kind::Syntax, 2);
    expect_error("turn B\nboard 1\n", ParseError::Kind::Syntax, 2);
    expect_error("turn B\ncell 0 0 B 2 7\n", ParseError::Kind::Syntax, 2);
    try {
        parse_board("turn B\ncell 0 0 N 3\n");
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("neutral-overfull"), std::string::npos);
    }
}

TEST(BoardIo, RoundTripFixtures) {
    for (const auto& f : fixtures::all) {
        Position p = parse_board(f.text);
        EXPECT_EQ(parse_board(serialize_board(p)), p) << f.name;
        EXPECT_EQ(serialize_board(parse_board(serialize_board(p))), serialize_board(p));
    }
}

TEST(BoardIo, EmbeddedFixturesMatchFiles) {
    EXPECT_EQ(fixtures::all.size(), 14u);
    for (const auto& f : fixtures::all) {
        std::ifstream in(testutil::fixture_path(std::string(f.name)), std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        EXPECT_EQ(buf.str(), f.text) << f.name;
    }
}

TEST(BoardIo, RoundTripRandom) {
    std::mt19937 rng(7);
    for (int i = 0; i < 300; ++i) {
        Position p = testutil::random_position(rng);
        Position back = parse_board(serialize_board(p));
        EXPECT_EQ(back, p);
        EXPECT_EQ(canonical_key(back), canonical_key(p));
    }
}

TEST(Properties, MoveInvariants) {
    std::mt19937 rng(11);
    for (int i = 0; i < 500; ++i) {
        Position p = testutil::random_position(rng);
        auto moves = legal_moves(p);
        EXPECT_EQ(is_loss(p), moves.empty());
        for (const Move& m : moves) {
            Position q = apply_move(p, m);
            EXPECT_EQ(q.total_tokens(), p.total_tokens());
            EXPECT_EQ(q.tokens(Owner::Blue), p.tokens(Owner::Blue));
            EXPECT_EQ(q.stack_cells(), p.stack_cells() + 1);
            EXPECT_EQ(q.empty_cells(), p.empty_cells() - 1);
            EXPECT_EQ(q.to_move(), opponent(p.to_move()));
            EXPECT_NE(canonical_key(q), canonical_key(p));
        }
    }
}

TEST(Properties, SymmetryPreservesMoveCount) {
    std::mt19937 rng(13);
    for (int i = 0; i < 200; ++i) {
        Position p = testutil::random_position(rng);
        std::size_t n = legal_moves(p).size();
        for (int rot = 0; rot < 6; ++rot)
            for (bool m : {false, true}) EXPECT_EQ(legal_moves(transform(p, rot, m, {3, -7})).size(), n);
    }
}
