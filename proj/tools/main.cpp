#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <battlesheep/board_io.hpp>
#include <battlesheep/circuit.hpp>
#include <battlesheep/gadgets.hpp>
#include <battlesheep/layout.hpp>
#include <battlesheep/rules.hpp>
#include <battlesheep/service.hpp>
#include <battlesheep/solver.hpp>

using namespace battlesheep;

namespace {

enum Exit { kOk = 0, kFailure = 1, kInputError = 2, kBudgetExceeded = 3, kCircuitError = 4, kRoutingError = 5 };

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print_moves(const Position& p) {
    for (const Move& m : legal_moves(p)) {
        HexCoord d = *slide_destination(p, m.from, m.dir);
        std::cout << m << " -> " << d.q << ' ' << d.r << '\n';
    }
}

int cmd_moves(const std::string& path) {
    Position p = load_board(path);
    print_moves(p);
    return kOk;
}

int cmd_solve(const std::string& path, std::uint64_t nodes, double seconds) {
    Position p = load_board(path);
    SolveOptions opt;
    opt.budget.max_nodes = nodes;
    opt.budget.max_time = std::chrono::duration<double>(seconds);
    SolveReport r = solve(p, opt);
    if (!r.decided())
        std::cout << "UNKNOWN " << to_string(r.status) << '\n';
    else if (*r.outcome == Outcome::Win)
        std::cout << "WIN " << *r.best_move << '\n';
    else
        std::cout << "LOSS\n";
    std::cout << "nodes=" << r.nodes_visited << " table=" << r.table_entries << " depth=" << r.max_depth << '\n';
    std::cout << "elapsed=" << std::fixed << std::setprecision(3) << r.elapsed.count() << "s\n";
    return r.decided() ? kOk : kBudgetExceeded;
}

int cmd_compile(const std::string& circuit_path, const std::string& out_path, bool published) {
    Layout l = compile_layout(read_text(circuit_path), published ? BudgetTable::published() : BudgetTable::catalog());
    const LayoutStats& s = l.stats;
    std::cout << "a=" << s.a << " b=" << s.b << " c=" << s.c << " d=" << s.d << " e=" << s.e << " k=" << s.k
              << " gadgets=" << l.placements.size() << " cells=" << l.board.size() << '\n';
    if (out_path.empty()) {
        std::cout << serialize_board(l.board);
    } else {
        std::ofstream out(out_path);
        if (!out) throw Error("cannot write '" + out_path + "'");
        out << serialize_board(l.board);
    }
    return kOk;
}

std::string pattern_label(const GadgetBehavior& b, GadgetType t) {
    if (t == GadgetType::Variable) return b.blue_first ? "B-first" : "R-first";
    std::string s;
    for (bool v : b.input_pattern) s += v ? 'T' : 'F';
    return s;
}

int cmd_verify_gadgets() {
    bool all = true;
    auto row = [&](GadgetKind kind) {
        std::vector<GadgetBehavior> rows = verify_gadget(kind);
        bool ok = true;
        std::cout << std::left << std::setw(16) << kind_name(kind) << " budget=" << make_template(kind).blue_budget;
        for (const GadgetBehavior& b : rows) {
            std::cout << "  " << pattern_label(b, kind.type) << ':' << (b.verified ? "PASS" : "FAIL");
            ok = ok && b.verified;
        }
        std::cout << "  " << (ok ? "PASS" : "FAIL") << '\n';
        all = all && ok;
    };
    for (int n = 1; n <= 4; ++n) row(GadgetKind::wire(n));
    for (GadgetType t : kAllTypes)
        if (t != GadgetType::WireStraight && t != GadgetType::Makeup) row(GadgetKind::of(t));
    for (int k = 1; k <= 5; ++k) {
        bool ok = verify_makeup(k);
        std::cout << std::left << std::setw(16) << kind_name(GadgetKind::makeup(k)) << " red-moves=" << k << "  "
                  << (ok ? "PASS" : "FAIL") << '\n';
        all = all && ok;
    }
    std::cout << (all ? "ALL PASS" : "SOME FAILED") << '\n';
    return all ? kOk : kFailure;
}

int cmd_play(const std::string& path, bool vs_solver) {
    Position initial = load_board(path);
    Position p = initial;
    std::vector<Move> history;
    const Player human = initial.to_move();
    std::cout << "commands: <q> <r> <dir> <count> | moves | hint | undo | board | quit\n";
    auto show = [&] {
        std::cout << serialize_board(p);
        if (is_loss(p)) std::cout << player_char(p.to_move()) << " cannot move and loses\n";
    };
    show();
    std::string line;
    while (!is_loss(p) && std::cout << player_char(p.to_move()) << "> " && std::getline(std::cin, line)) {
        std::istringstream in(line);
        std::string word;
        if (!(in >> word)) continue;
        if (word == "quit") break;
        if (word == "board") {
            show();
            continue;
        }
        if (word == "moves") {
            print_moves(p);
            continue;
        }
        if (word == "hint") {
            SolveOptions opt;
            opt.budget.max_nodes = 10'000'000;
            SolveReport r = solve(p, opt);
            if (!r.decided())
                std::cout << "unknown\n";
            else if (r.best_move)
                std::cout << "win " << *r.best_move << '\n';
            else
                std::cout << "loss\n";
            continue;
        }
        if (word == "undo") {
            if (history.empty()) {
                std::cout << "nothing to undo\n";
                continue;
            }
            history.pop_back();
            if (vs_solver && !history.empty() && initial.to_move() != human) history.pop_back();
            p = initial;
            for (const Move& m : history) p = apply_move(p, m);
            show();
            continue;
        }
        std::istringstream nums(line);
        int q, r, dir, count;
        if (!(nums >> q >> r >> dir >> count) || dir < 0 || dir > 5) {
            std::cout << "expected: <q> <r> <dir> <count>\n";
            continue;
        }
        Move m{{q, r}, Direction(dir), count};
        if (!is_legal(p, m)) {
            std::cout << "illegal move\n";
            continue;
        }
        p = apply_move(p, m);
        history.push_back(m);
        if (vs_solver && !is_loss(p)) {
            SolveReport r = solve(p);
            Move reply = r.best_move ? *r.best_move : legal_moves(p).front();
            std::cout << "solver plays " << reply << '\n';
            p = apply_move(p, reply);
            history.push_back(reply);
        }
        show();
    }
    return kOk;
}

int cmd_serve(int port, const std::string& board_path, bool multi) {
    Position initial = board_path.empty() ? fixture_position("fig2") : load_board(board_path);
    service::Service svc(initial, {.multi = multi});
    httplib::Server server;
    svc.mount(server);
    std::cout << "listening on http://127.0.0.1:" << port << std::endl;
    if (!server.listen("127.0.0.1", port)) throw Error("cannot listen on port " + std::to_string(port));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Battle Sheep engine, solver, gadget verifier and reduction compiler"};
    app.require_subcommand(1);

    std::string board, circuit, out;
    std::uint64_t nodes = 100'000'000;
    double seconds = 600;
    bool published = false, vs_solver = false, multi = false;
    int port = 8080;

    auto* moves = app.add_subcommand("moves", "List legal moves");
    moves->add_option("board", board, "Board file")->required();

    auto* solve_cmd = app.add_subcommand("solve", "Solve a position");
    solve_cmd->add_option("board", board, "Board file")->required();
    solve_cmd->add_option("--nodes", nodes, "Node budget");
    solve_cmd->add_option("--seconds", seconds, "Time budget");

    auto* compile_cmd = app.add_subcommand("compile", "Compile a circuit to a board");
    compile_cmd->add_option("circuit", circuit, "Circuit file")->required();
    compile_cmd->add_option("-o,--out", out, "Output board file (stdout when omitted)");
    compile_cmd->add_flag("--published-budgets", published, "Size the Makeup strip with budgets 1,1,4,4,5");

    auto* verify = app.add_subcommand("verify-gadgets", "Run the gadget truth-table suite");

    auto* play = app.add_subcommand("play", "Play interactively in the terminal");
    play->add_option("board", board, "Board file")->required();
    play->add_flag("--vs-solver", vs_solver, "Let the solver answer each move");

    auto* serve = app.add_subcommand("serve", "Start the HTTP-JSON service");
    serve->add_option("--port", port, "Port");
    serve->add_option("--board", board, "Initial board file");
    serve->add_flag("--multi", multi, "Route requests by session id");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*moves) return cmd_moves(board);
        if (*solve_cmd) return cmd_solve(board, nodes, seconds);
        if (*compile_cmd) return cmd_compile(circuit, out, published);
        if (*verify) return cmd_verify_gadgets();
        if (*play) return cmd_play(board, vs_solver);
        if (*serve) return cmd_serve(port, board, multi);
    } catch (const CircuitError& e) {
        std::cerr << "circuit error: " << e.what() << '\n';
        return kCircuitError;
    } catch (const RoutingFailure& e) {
        std::cerr << "routing failure: " << e.what() << '\n';
        return kRoutingError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kOk;
}
