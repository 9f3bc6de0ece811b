#include <random>

#include "builders.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace copro;
using namespace build;

namespace {

struct World {
    Env env;
    const CotypeDef& s = stream(env);
    Ctt S = Ctt::leaf(&s);
    CombP cons = named(env, "cons");
    CombP head = named(env, "head");
    CombP tail = named(env, "tail");

    CombP f_s3() { return cmp({cons, fp(cnat(0), cmp({cons, fp(cnat(1), tail)}))}); }
    CombP f_s4() { return cmp({cons, fp(head, cmp({cons, fp(cnat(1), tail)}))}); }
    CombP f_s5() { return cmp({cons, fp(cnat(0), cmp({cons, fp(head, tail)}))}); }
    CombP f_zeros() { return cmp({cons, fp(cnat(0), id())}); }

    void add_map(const std::string& name, const std::string& g) {
        auto out = define_fix_second_order(env, name, S, S, map_gen(env, prim(g)), prod_uz(0, S, S));
        REQUIRE(out.status == Status::Accepted);
    }

    std::vector<std::uint64_t> prefix(const std::string& name, std::size_t n) {
        const ValEntry* v = env.val(name);
        REQUIRE(v);
        REQUIRE(v->built);
        FuelScope fuel(env.opts.fuel, true);
        std::vector<std::uint64_t> out;
        for (auto& x : stream_prefix(v->value.as_co(), n)) out.push_back(x.as_nat());
        return out;
    }
};

using U = std::vector<std::uint64_t>;

// nat-stream values built directly, independent of the combinator evaluator
Val stream_from(const CotypeDef& def, std::function<std::uint64_t(std::uint64_t)> at, std::uint64_t i = 0) {
    return Val::co(CoVal::make(&def, [&def, at, i]() {
        return Val::pair(Val::nat(at(i)), stream_from(def, at, i + 1));
    }, "test"));
}

}  // namespace

TEST_CASE("typecheck of basic combinators") {
    World w;
    CombP t = typecheck(w.f_zeros(), w.S, w.env);
    CHECK(*t->dom == w.S);
    CHECK(*t->cod == w.S);

    Ctt pair = Ctt::product(w.S, Ctt::constant(ConstType::boolean()));
    CombP p = typecheck(fp(fst(), snd()), pair, w.env);
    CHECK(*p->cod == pair);

    CHECK_THROWS_AS(typecheck(cmp({w.tail, w.cons}), w.S, w.env), CombError);
    CHECK_THROWS_AS(typecheck(w.head, pair, w.env), CombError);
}

TEST_CASE("evaluation follows the defining equations") {
    World w;
    Ctt nn = Ctt::product(Ctt::constant(ConstType::nat()), Ctt::constant(ConstType::boolean()));
    auto f = evaluate(typecheck(comm(), nn, w.env), w.env);
    Val r = f(Val::pair(Val::nat(3), Val::boolean(true)));
    CHECK(r.first().as_bool());
    CHECK(r.second().as_nat() == 3);

    Ctt dom = Ctt::product(Ctt::exp(ConstType::nat(), Ctt::constant(ConstType::nat())), Ctt::constant(ConstType::nat()));
    auto g = evaluate(typecheck(cgeapp("succ"), dom, w.env), w.env);
    Val sq = Val::fn([](const Val& x) { return Val::nat(x.as_nat() * x.as_nat()); });
    CHECK(g(Val::pair(sq, Val::nat(4))).as_nat() == 25);

    FuelScope fuel(w.env.opts.fuel, true);
    Val ones = stream_from(w.s, [](std::uint64_t) { return std::uint64_t{1}; });
    auto z = evaluate(typecheck(w.f_zeros(), w.S, w.env), w.env);
    U got;
    for (auto& x : stream_prefix(z(ones).as_co(), 3)) got.push_back(x.as_nat());
    CHECK(got == U{0, 1, 1});
}

TEST_CASE("constructor and destructor productivities") {
    World w;
    auto cons = derive(typecheck(w.cons, w.s.self_ctt, w.env), w.env);
    auto head = derive(typecheck(w.head, w.S, w.env), w.env);
    auto tail = derive(typecheck(w.tail, w.S, w.env), w.env);
    CHECK(subset(cons, prod_uz(1, w.s.self_ctt, w.S)).proved());
    CHECK(subset(head, prod_uz(-1, w.S, head.cod)).proved());
    CHECK(subset(tail, prod_uz(-1, w.S, w.S)).proved());
    CHECK_FALSE(subset(tail, prod_uz(0, w.S, w.S)).proved());
    // tail relates n+1 to n for n > 0
    CHECK(check_member(tail, testkit::d(3), testkit::d(2)));
    CHECK_FALSE(check_member(tail, testkit::d(1), testkit::d(0)));

    Env env;
    const CotypeDef& b = bintree(env);
    Ctt B = Ctt::leaf(&b);
    for (std::string n : {"bhead", "bleft", "bright"}) {
        auto p = derive(typecheck(named(env, n), B, env), env);
        CHECK(subset(p, prod_uz(-1, B, p.cod)).proved());
    }
    auto bc = derive(typecheck(named(env, "bcons"), b.self_ctt, env), env);
    CHECK(subset(bc, prod_uz(1, b.self_ctt, B)).proved());
}

TEST_CASE("first-order verdicts of the introductory streams") {
    World w;
    auto s5 = define_fix_first_order(w.env, "s5", w.S, w.f_s5());
    CHECK(s5.status == Status::Accepted);
    CHECK(s5.cert.kind == Certificate::Kind::OneProductive);

    auto s3 = define_fix_first_order(w.env, "s3", w.S, w.f_s3());
    CHECK(s3.status == Status::Accepted);

    auto s4 = define_fix_first_order(w.env, "s4", w.S, w.f_s4());
    CHECK(s4.status == Status::Rejected);
    CHECK_FALSE(w.env.val("s4")->built);

    auto zeros = define_fix_first_order(w.env, "zeros", w.S, w.f_zeros());
    CHECK(zeros.status == Status::Accepted);

    auto s0 = define_fix_first_order(w.env, "s0", w.S, id());
    CHECK(s0.status == Status::Rejected);

    CHECK(w.prefix("s5", 4) == U{0, 0, 0, 0});
    CHECK(w.prefix("s3", 5) == U{0, 1, 1, 1, 1});
    CHECK(w.prefix("zeros", 6) == U(6, 0));
}

TEST_CASE("second-order map registers and growing uses it") {
    World w;
    w.add_map("mapS", "succ");
    CHECK(w.env.fun("mapS")->cert.obligations.size() == 2);
    auto g = define_fix_first_order(w.env, "growing", w.S, cmp({w.cons, fp(cnat(0), named(w.env, "mapS"))}));
    CHECK(g.status == Status::Accepted);
    CHECK(w.prefix("growing", 6) == U{0, 1, 2, 3, 4, 5});

    auto s2 = define_fix_first_order(
        w.env, "s2", w.S, cmp({w.cons, fp(cnat(0), cmp({named(w.env, "mapS"), named(w.env, "mapS")}))}));
    CHECK(s2.status == Status::Accepted);
    CHECK(w.prefix("s2", 5) == U{0, 2, 4, 6, 8});
}

TEST_CASE("duplicate and cyclic definitions are refused") {
    World w;
    define_fix_first_order(w.env, "zeros", w.S, w.f_zeros());
    CHECK_THROWS_AS(define_fix_first_order(w.env, "zeros", w.S, w.f_zeros()), TypeError);
    CHECK_THROWS_AS(define_fix_first_order(w.env, "cyc", w.S, named(w.env, "cyc")), CombError);
}

TEST_CASE("registered types are inhabited") {
    World w;
    CHECK(inhabited(w.S));
    const CotypeDef& b = bintree(w.env);
    CHECK(inhabited(Ctt::leaf(&b)));
    CHECK(inhabited(Ctt::exp(ConstType::boolean(), Ctt::sum(w.S, Ctt::list(w.S)))));
    CHECK_THROWS_AS(ConstType::enumeration(0), TypeError);
}

// ---- properties over the example corpus

#include <filesystem>

#include "copro/cli.hpp"
#include "gen.hpp"

namespace {

std::vector<std::string> corpus_files() {
    std::vector<std::string> out;
    for (auto& e : std::filesystem::directory_iterator(testkit::corpus_dir()))
        if (e.path().extension() == ".copro") out.push_back(e.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

std::unique_ptr<cli::Program> load(const std::string& path) {
    auto p = std::make_unique<cli::Program>();
    p->load_file(path);
    return p;
}

int size_of(const CombP& c) {
    int n = 1;
    for (auto& k : c->kids) n += size_of(k);
    return n;
}

}  // namespace

TEST_CASE("accepted values satisfy their fixed-point equation") {
    int checked = 0;
    for (auto& path : corpus_files()) {
        auto p = load(path);
        for (auto& name : p->env.order()) {
            const ValEntry* v = p->env.val(name);
            if (!v || v->status != Status::Accepted) continue;
            INFO(path << " " << name);
            FuelScope fuel(kDefaultFuel * 10, true);
            Val again = apply_generator(p->env, *v, v->value);
            CHECK(eq_upto_level(v->ctt, again, v->value, level_each(v->ctt, 12)));
            ++checked;
        }
    }
    CHECK(checked >= 15);
}

TEST_CASE("accepted functions satisfy their fixed-point equation") {
    int checked = 0;
    for (auto& path : corpus_files()) {
        auto p = load(path);
        for (auto& name : p->env.order()) {
            const FunEntry* f = p->env.fun(name);
            if (!f || !f->so_generator || f->status != Status::Accepted) continue;
            INFO(path << " " << name);
            auto unrolled = so_evaluate(f->so_generator, p->env)(f->fn);
            for (std::uint64_t i = 0; i < 20; ++i) {
                FuelScope fuel(kDefaultFuel * 10, true);
                Val x = gen::random_value(f->dom, gen::mix(i));
                CHECK(eq_upto_level(f->cod, f->fn.apply(x), unrolled(x), level_each(f->cod, 6)));
            }
            ++checked;
        }
    }
    CHECK(checked >= 10);
}

TEST_CASE("derived productivities are semantically sound on random inputs") {
    std::mt19937_64 rng(20261015);
    int functions = 0;
    for (auto& path : corpus_files()) {
        auto p = load(path);
        for (auto& name : p->env.order()) {
            Productivity prod;
            Val::Fun fn;
            Ctt dom, cod;
            if (const FunEntry* f = p->env.fun(name); f && f->status == Status::Accepted) {
                prod = f->prod;
                Val v = f->fn;
                fn = [v](const Val& x) { return v.apply(x); };
                dom = f->dom;
                cod = f->cod;
            } else if (const ValEntry* v = p->env.val(name); v && v->status == Status::Accepted) {
                prod = *v->cert.derived;
                fn = evaluate(v->generator, p->env);
                dom = cod = v->ctt;
            } else {
                continue;
            }
            INFO(path << " " << name);
            // inputs go deeper so the join covers every related level
            auto ins = enumerate_levels(dom, 10);
            auto outs = enumerate_levels(cod, 4);
            int tried = 0;
            for (int trial = 0; trial < 100; ++trial) {
                const Level& l2 = outs[rng() % outs.size()];
                std::vector<const Level*> related;
                for (auto& l1 : ins)
                    if (check_member(prod, l1, l2)) related.push_back(&l1);
                // nothing related means the output at l2 ignores the input
                Level l1 = related.empty() ? bottom(dom) : *related[0];
                for (auto* r : related) l1 = gen::join(dom, l1, *r);
                FuelScope fuel(kDefaultFuel * 10, true);
                Val x1 = gen::random_value(dom, rng());
                Val x2 = gen::mutate(dom, x1, l1, rng());
                REQUIRE(eq_upto_level(dom, x1, x2, l1));
                INFO("levels " << l1.str() << " -> " << l2.str());
                CHECK(eq_upto_level(cod, fn(x1), fn(x2), l2));
                ++tried;
            }
            CHECK(tried > 0);
            ++functions;
        }
    }
    CHECK(functions >= 25);
}

TEST_CASE("composition evaluates like sequential application") {
    World w;
    const CotypeDef& b = bintree(w.env);
    gen::TermGen g{w.env, std::mt19937_64(7), &w.s, &b};
    for (int i = 0; i < 200; ++i) {
        CombP f = g.term(w.S, 4);
        CombP h = g.term(*f->cod, 4);
        CombP both = typecheck(mk(Comb::Kind::Comp, {h, f}), w.S, w.env);
        FuelScope fuel(kDefaultFuel, true);
        Val x = gen::random_value(w.S, gen::mix(i));
        Val a = evaluate(both, w.env)(x);
        Val c = evaluate(h, w.env)(evaluate(f, w.env)(x));
        INFO(both->str());
        CHECK(eq_upto_level(*both->cod, a, c, level_each(*both->cod, 8)));
    }
}

TEST_CASE("registered map gives the same growing stream as an inlined map") {
    World w;
    w.add_map("mapS", "succ");
    define_fix_first_order(w.env, "growing", w.S, cmp({w.cons, fp(cnat(0), named(w.env, "mapS"))}));

    const CotypeDef* def = &w.s;
    std::function<Val(const Val&)> map_direct = [def, &map_direct](const Val& x) -> Val {
        return Val::co(CoVal::make(def, [def, x, &map_direct]() {
            const Val& layer = unfold(x.as_co());
            return Val::pair(Val::nat(layer.first().as_nat() + 1), map_direct(layer.second()));
        }, "map"));
    };
    Val inlined = fix_value(w.S, [def, &map_direct](const Val& x) {
        return fold(*def, Val::pair(Val::nat(0), map_direct(x)));
    }, "inlined");

    FuelScope fuel(kDefaultFuel * 10, true);
    CHECK(eq_upto_nat(w.env.val("growing")->value.as_co(), inlined.as_co(), 16));
    U expect;
    for (std::uint64_t i = 0; i < 16; ++i) expect.push_back(i);
    CHECK(w.prefix("growing", 16) == expect);
}

TEST_CASE("solver verdicts agree with the bounded oracle on random terms") {
    World w;
    const CotypeDef& b = bintree(w.env);
    gen::TermGen g{w.env, std::mt19937_64(99), &w.s, &b};
    std::vector<Ctt> doms{w.S, Ctt::leaf(&b), Ctt::product(w.S, w.S)};
    int proved = 0, refuted = 0;
    for (int i = 0; i < 100; ++i) {
        const Ctt& dom = doms[static_cast<std::size_t>(i) % doms.size()];
        CombP t = g.term(dom, 8);
        if (size_of(t) > 8 || t->cod->node_count() > 5) {
            --i;
            continue;
        }
        INFO(t->str());
        Productivity p = derive(t, w.env);
        Productivity target = prod_uz(1, dom, *t->cod);
        Verdict v = subset(p, target);
        bool oracle = bounded_oracle(p, target, 6);
        if (v.kind == Verdict::Kind::Proved) {
            CHECK(oracle);
            ++proved;
        } else if (v.kind == Verdict::Kind::Counterexample) {
            REQUIRE(v.levels);
            CHECK(check_member(p, v.levels->first, v.levels->second));
            CHECK_FALSE(check_member(target, v.levels->first, v.levels->second));
            ++refuted;
        }
    }
    CHECK(proved > 5);
    CHECK(refuted > 5);
}
