#pragma once

#include <charconv>
#include <optional>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "position.hpp"

namespace battlesheep {

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

inline bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

inline bool parse_positive(std::string_view s, int& out) {
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return parse_int(s, out) && out > 0;
}

}  // namespace detail

// Line-based board text:
//   # comment
//   turn B|R
//   cell <q> <r> X | . | <B|R|N> <count>
inline Position parse_board(std::string_view text) {
    using detail::split_ws;
    std::vector<Position::Entry> cells;
    std::unordered_map<HexCoord, int, HexCoordHash> first_line;
    std::optional<Player> turn;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        auto tok = split_ws(line);
        if (tok.empty() || tok[0].front() == '#') continue;
        if (tok[0] == "turn") {
            if (tok.size() != 2 || (tok[1] != "B" && tok[1] != "R"))
                throw ParseError(ParseError::Kind::Syntax, line_no, "expected 'turn B' or 'turn R'");
            if (turn) throw ParseError(ParseError::Kind::Syntax, line_no, "duplicate turn line");
            turn = tok[1] == "B" ? Player::Blue : Player::Red;
        } else if (tok[0] == "cell") {
            int q = 0, r = 0;
            if (tok.size() < 4 || !detail::parse_int(tok[1], q) || !detail::parse_int(tok[2], r))
                throw ParseError(ParseError::Kind::Syntax, line_no, "expected 'cell <q> <r> <content>'");
            Cell cell;
            if (tok.size() == 4 && tok[3] == "X") {
                cell = Cell::blocked();
            } else if (tok.size() == 4 && tok[3] == ".") {
                cell = Cell::empty();
            } else if (tok.size() == 5 && (tok[3] == "B" || tok[3] == "R" || tok[3] == "N")) {
                int count = 0;
                if (!detail::parse_positive(tok[4], count))
                    throw ParseError(ParseError::Kind::InvalidStack, line_no, "stack count must be a positive integer");
                Owner owner = tok[3] == "B" ? Owner::Blue : tok[3] == "R" ? Owner::Red : Owner::Neutral;
                if (owner == Owner::Neutral && count != 1)
                    throw ParseError(ParseError::Kind::NeutralOverfull, line_no,
                                     "neutral-overfull: neutral stacks hold exactly one token");
                cell = Cell::stack(owner, count);
            } else {
                throw ParseError(ParseError::Kind::Syntax, line_no, "bad cell content");
            }
            auto [it, fresh] = first_line.emplace(HexCoord{q, r}, line_no);
            if (!fresh)
                throw ParseError(ParseError::Kind::DuplicateCoordinate, line_no,
                                 "duplicate coordinate, first seen on line " + std::to_string(it->second));
            cells.push_back({{q, r}, cell});
        } else {
            throw ParseError(ParseError::Kind::Syntax, line_no, "unknown directive '" + std::string(tok[0]) + "'");
        }
    }
    if (!turn) throw ParseError(ParseError::Kind::MissingTurn, 0, "missing turn line");
    if (cells.empty()) throw ParseError(ParseError::Kind::Syntax, 0, "board has no cells");
    return Position(std::move(cells), *turn);
}

inline std::string serialize_board(const Position& p) {
    std::ostringstream out;
    out << "turn " << player_char(p.to_move()) << '\n';
    for (const auto& [at, cell] : p.cells()) out << "cell " << at.q << ' ' << at.r << ' ' << cell << '\n';
    return out.str();
}

inline std::ostream& operator<<(std::ostream& os, const Position& p) { return os << serialize_board(p); }

inline Position load_board(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open board file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_board(buf.str());
}

}  // namespace battlesheep
