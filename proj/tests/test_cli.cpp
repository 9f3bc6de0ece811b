#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "copro/cli.hpp"
#include "copro/solver.hpp"
#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

using namespace copro;
using namespace testkit;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string file(const std::string& name) { return corpus_dir() + "/" + name + ".copro"; }

std::string temp_file(const std::string& name, const std::string& text) {
    auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p.string();
}

}  // namespace

TEST_CASE("toplevel forms parse") {
    cli::Program p;
    p.load("(cotype stream (prod (const nat) self))");
    const CotypeDef* s = p.env.cotypes.find("stream");
    REQUIRE(s);
    CHECK(s->self_ctt == Ctt::product(Ctt::constant(ConstType::nat()), Ctt::leaf(s)));
    cli::Program q;
    q.load("(cotype stream (prod (const nat) self) (ctor cons) (dtors head tail))");
    q.load("(def zeros : stream (fix (comp cons (fpair (cconst (nat 0)) id))))");
    q.load("(cofun mapS : stream -> stream expect (uz 0) (so-comp (lift cons) (so-fpair (lift (comp (prim succ) "
           "head)) (so-comp sfself (lift tail)))))");
    REQUIRE(q.reports.size() == 2);
    CHECK(q.reports[0].outcome.status == Status::Accepted);
    CHECK(q.reports[1].outcome.status == Status::Accepted);
}

TEST_CASE("s-expressions keep their source positions") {
    auto xs = cli::read_sexps("; note\n(a (b c)\n   d)");
    REQUIRE(xs.size() == 1);
    CHECK(xs[0].loc.line == 2);
    CHECK(xs[0].loc.col == 1);
    CHECK(xs[0].items[2].loc.line == 3);
    CHECK(xs[0].items[2].loc.col == 4);
    CHECK(xs[0].str() == "(a (b c) d)");
}

TEST_CASE("check exit codes on the corpus") {
    auto ok = run({"check", file("intro")});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("s5: accepted") != std::string::npos);

    auto bad = run({"check", file("s4")});
    CHECK(bad.code == 1);
    CHECK(bad.out.find("counterexample: (nI, nO) = (1, 1)") != std::string::npos);

    CHECK(run({"check", file("s0")}).code == 1);
    for (auto& name : {"zeros", "map", "growing", "zip", "fib", "pingpong", "bintree", "bmap", "sbt", "bfs", "lang",
                       "lplus", "adds", "roundrobin", "nkth", "distribute"}) {
        INFO(name);
        CHECK(run({"check", file(name)}).code == 0);
    }
}

TEST_CASE("check reports are deterministic") {
    for (auto& name : {"intro", "s4", "bfs", "distribute"}) {
        auto a = run({"check", file(name)});
        auto b = run({"check", file(name), "--json"});
        auto c = run({"check", file(name)});
        auto d2 = run({"check", file(name), "--json"});
        CHECK(a.out == c.out);
        CHECK(b.out == d2.out);
    }
}

TEST_CASE("json reports") {
    auto r = run({"check", file("s4"), "--json"});
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["exit"] == 1);
    REQUIRE(j["definitions"].size() == 1);
    auto& d0 = j["definitions"][0];
    CHECK(d0["name"] == "s4");
    CHECK(d0["status"] == "rejected");
    CHECK(d0["verdict"]["verdict"] == "counterexample");
    CHECK(d0["verdict"]["counterexample"]["nI"] == 1);
    CHECK(d0["verdict"]["counterexample"]["nO"] == 1);
}

TEST_CASE("prefix, eval, bisim and prod commands") {
    auto g = run({"prefix", file("growing"), "growing", "--n", "6"});
    CHECK(g.code == 0);
    CHECK(g.out == "0 1 2 3 4 5\n");

    auto b = run({"bisim", file("zeros"), "zeros", "s5", "--depth", "10"});
    CHECK(b.code == 0);
    CHECK(b.out.find("equal up to depth 10") != std::string::npos);
    auto nb = run({"bisim", file("zip"), "ones", "nats", "--depth", "10"});
    CHECK(nb.code == 1);
    CHECK(nb.out.find("differ at depth 1") != std::string::npos);

    auto p = run({"prod", file("zeros"), "tail-alias"});
    CHECK(p.code == 0);
    CHECK(p.out == "nI = nO + 1 & nO > 0\n");

    auto e = run({"eval", file("sbt"), "sbt", "--depth", "1"});
    CHECK(e.out == "((1,1), …, …)\n");
}

TEST_CASE("unchecked definitions are not evaluated by default") {
    auto r = run({"prefix", file("s4"), "s4", "--n", "3"});
    CHECK(r.code == 3);
    auto s0 = run({"prefix", file("s0"), "s0", "--n", "3", "--unchecked", "--fuel", "200"});
    CHECK(s0.code == 3);
    CHECK(s0.err.find("s0") != std::string::npos);
}

TEST_CASE("errors carry line and column") {
    auto path = temp_file("copro_bad.copro", "(cotype stream (prod (const nat) self))\n(def x : stream\n  (fix (comp nope id)))\n");
    auto r = run({"check", path});
    CHECK(r.code == 3);
    CHECK(r.err.find("copro_bad.copro:3:") != std::string::npos);

    auto dup = temp_file("copro_dup.copro", "(cotype s (prod (const nat) self))\n(cotype s (prod (const nat) self))\n");
    CHECK(run({"check", dup}).code == 3);
    auto unclosed = temp_file("copro_open.copro", "(cotype s (prod (const nat) self)\n");
    CHECK(run({"check", unclosed}).code == 3);
    CHECK(run({"check", "/nonexistent/x.copro"}).code == 3);
    CHECK(run({"frobnicate", file("intro")}).code == 3);
}

TEST_CASE("displayed constraints parse back to equivalent relations") {
    int checked = 0;
    for (auto& entry : std::filesystem::directory_iterator(corpus_dir())) {
        cli::Program p;
        p.load_file(entry.path().string());
        for (auto& name : p.env.order()) {
            Ctt dom, cod;
            if (const FunEntry* f = p.env.fun(name)) {
                dom = f->dom;
                cod = f->cod;
            } else if (const ValEntry* v = p.env.val(name)) {
                dom = cod = v->ctt;
            } else {
                continue;
            }
            if (dom.node_count() + cod.node_count() > 8) continue;
            INFO(entry.path().filename().string() << " " << name);
            Productivity internal = p.derived(name);
            std::string text = simplify_for_display(internal);
            Productivity back = cli::parse_constraint(text, dom, cod);
            CHECK(bounded_oracle(internal, back, 4));
            CHECK(bounded_oracle(back, internal, 4));
            ++checked;
        }
    }
    CHECK(checked >= 20);
}

TEST_CASE("constraint syntax") {
    CotypeRegistry reg;
    Ctt S = Ctt::leaf(&stream_def(reg));
    auto p = cli::parse_constraint("(nI = 1 & nO = 3) \\/ (nI > 1 & nO = nI + 1)", S, S);
    CHECK(check_member(p, d(1), d(3)));
    CHECK(check_member(p, d(4), d(5)));
    CHECK_FALSE(check_member(p, d(1), d(2)));
    CHECK_FALSE(check_member(p, d(0), d(1)));
    auto q = cli::parse_constraint("exists k . nI = 2*k & nO = k", S, S);
    CHECK(check_member(q, d(4), d(2)));
    CHECK_FALSE(check_member(q, d(3), d(1)));
    CHECK(check_member(cli::parse_constraint("true", S, S), d(9), d(0)));
    CHECK_FALSE(check_member(cli::parse_constraint("false", S, S), d(0), d(0)));
    CHECK_THROWS(cli::parse_constraint("nI = = 2", S, S));
}

TEST_CASE("the installed binary honours the exit code contract") {
    const char* bin = std::getenv("COPRO_BIN");
    if (!bin) return;
    auto status = [&](const std::string& args) {
        std::string cmd = std::string(bin) + " " + args + " > /dev/null 2>&1";
        int s = std::system(cmd.c_str());
        return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
    };
    CHECK(status("check " + file("intro")) == 0);
    CHECK(status("check " + file("s4")) == 1);
    CHECK(status("check /nonexistent.copro") == 3);

    std::string cmd = std::string(bin) + " prefix " + file("fib") + " fib --n 8";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe);
    char buf[256] = {};
    std::string got;
    while (fgets(buf, sizeof buf, pipe)) got += buf;
    pclose(pipe);
    CHECK(got == "0 1 1 2 3 5 8 13\n");
}
