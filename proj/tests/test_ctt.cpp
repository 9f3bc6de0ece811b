#include <set>

#include "doctest.h"
#include "support.hpp"

using namespace copro;
using namespace testkit;

namespace {

struct Types {
    CotypeRegistry reg;
    const CotypeDef& s = stream_def(reg);
    const CotypeDef& b = bintree_def(reg);
    const CotypeDef& lang = reg.elaborate(
        "lang",
        Stt::node(Spf::product(), {Stt::node(Spf::constant(ConstType::boolean()), {}),
                                   Stt::node(Spf::exp(ConstType::enumeration(2)), {Stt::slot()})}),
        "mklang", {"accepts", "step"});
    Ctt S = Ctt::leaf(&s);
    Ctt natc = Ctt::constant(ConstType::nat());
    Ctt nat_s = Ctt::product(natc, S);
    Ctt s_s = Ctt::product(S, S);
    Ctt s_or_s = Ctt::sum(S, S);

    std::vector<Ctt> corpus() const {
        return {S, nat_s, s_s, s_or_s, b.self_ctt, lang.self_ctt, Ctt::list(S), Ctt::exp(ConstType::boolean(), S),
                Ctt::ident(S)};
    }
};

// the order on levels, by direct application of its four rules
bool rules_le(const Ctt& c, const Level& a, const Level& b) {
    if (c.is_leaf()) return a.n() <= b.n();
    if (a.kind() == Level::Kind::None) return true;
    if (b.kind() == Level::Kind::Some) {
        for (std::size_t i = 0; i < a.children().size(); ++i) {
            const Ctt& sub = c.spf().arity() == 2 ? c.child(i) : c.child(0);
            if (!rules_le(sub, a.child(i), b.child(i))) return false;
        }
        return true;
    }
    // b is None: only collapsible when the container has a single shape
    if (!c.spf().shape_one()) return false;
    for (std::size_t i = 0; i < a.children().size(); ++i) {
        const Ctt& sub = c.spf().arity() == 2 ? c.child(i) : c.child(0);
        if (!rules_le(sub, a.child(i), bottom(sub))) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("bottom and level_each") {
    Types t;
    CHECK(bottom(t.S) == d(0));
    CHECK(bottom(t.nat_s) == none());
    CHECK(bottom(t.s_s) == none());
    CHECK(level_each(t.S, 3) == d(3));
    CHECK(level_each(t.nat_s, 2) == some({some({}), d(2)}));
    CHECK(level_each(t.s_s, 0) == some({d(0), d(0)}));
}

TEST_CASE("level order examples") {
    Types t;
    Ctt prod_inner = Ctt::product(t.S, t.nat_s);
    CHECK(level_le(prod_inner, some({d(0), none()}), none()));
    CHECK_FALSE(level_le(t.s_or_s, some({d(0), d(0)}), none()));
    CHECK_FALSE(rules_le(t.s_or_s, some({d(0), d(0)}), none()));
    CHECK(level_le(t.S, d(2), d(5)));
    CHECK_FALSE(level_le(t.S, d(5), d(2)));
}

TEST_CASE("shape counts follow the container of each functor") {
    CHECK(Spf::product().shape_one());
    CHECK_FALSE(Spf::sum().shape_one());
    CHECK_FALSE(Spf::list().shape_one());
    CHECK(Spf::exp(ConstType::nat()).shape_one());
    CHECK(Spf::ident().shape_one());
    CHECK(Spf::constant(ConstType::unit()).shape_one());
    CHECK(Spf::constant(ConstType::enumeration(1)).shape_one());
    CHECK_FALSE(Spf::constant(ConstType::boolean()).shape_one());
    CHECK_FALSE(Spf::constant(ConstType::nat()).shape_one());
    CHECK(Spf::product().arity() == 2);
    CHECK(Spf::sum().arity() == 2);
    CHECK(Spf::list().arity() == 1);
    CHECK(Spf::exp(ConstType::boolean()).arity() == 1);
    CHECK(Spf::ident().arity() == 1);
    CHECK(Spf::constant(ConstType::nat()).arity() == 0);
}

TEST_CASE("level functions and dimensions") {
    Types t;
    auto f = level_fun(t.S, d(7));
    CHECK(f.size() == 1);
    CHECK(f.at({}) == 7);
    auto g = level_fun(t.nat_s, none());
    CHECK(g.size() == 1);
    CHECK(g.at({1}) == 0);
    auto h = level_fun(t.s_s, some({d(1), d(4)}));
    CHECK(h.at({0}) == 1);
    CHECK(h.at({1}) == 4);

    CHECK(dims(t.S) == std::vector<DimPath>{{}});
    CHECK(dims(t.s_s) == std::vector<DimPath>{{0}, {1}});
    CHECK(dims(t.nat_s) == std::vector<DimPath>{{1}});
}

TEST_CASE("elaboration replaces slots by the cotype itself") {
    Types t;
    CHECK(t.s.self_ctt == Ctt::product(t.natc, t.S));
    const CotypeDef& bt = t.reg.elaborate(
        "bt", Stt::node(Spf::product(), {Stt::node(Spf::product(), {Stt::node(Spf::constant(ConstType::nat()), {}),
                                                                    Stt::slot()}),
                                         Stt::slot()}));
    Ctt B = Ctt::leaf(&bt);
    CHECK(bt.self_ctt == Ctt::product(Ctt::product(t.natc, B), B));
    Ctt L = Ctt::leaf(&t.lang);
    CHECK(t.lang.self_ctt ==
          Ctt::product(Ctt::constant(ConstType::boolean()), Ctt::exp(ConstType::enumeration(2), L)));
    CHECK(t.s.ident_ctt == t.S);
    CHECK(t.s.positions.size() == 2);
    CHECK(t.b.positions.size() == 3);
    CHECK(t.reg.find("stream") == &t.s);
    CHECK(t.reg.find("nope") == nullptr);
    CHECK_THROWS_AS(t.reg.elaborate("stream", Stt::slot()), Error);
    CHECK_THROWS(ConstType::enumeration(0));
}

TEST_CASE("the level order agrees with its defining rules") {
    Types t;
    for (auto& c : t.corpus()) {
        auto ls = enumerate_levels(c, 3);
        INFO(c.str());
        for (auto& a : ls)
            for (auto& b : ls) CHECK(level_le(c, a, b) == rules_le(c, a, b));
    }
}

TEST_CASE("the level order is a preorder with bottom as least element") {
    Types t;
    for (auto& c : t.corpus()) {
        auto ls = enumerate_levels(c, 4);
        INFO(c.str());
        std::size_t fails = 0;
        for (auto& a : ls) {
            if (!level_le(c, a, a)) ++fails;
            if (!level_le(c, bottom(c), a)) ++fails;
        }
        if (ls.size() <= 40) {
            for (auto& a : ls)
                for (auto& b : ls) {
                    if (!level_le(c, a, b)) continue;
                    for (auto& x : ls)
                        if (level_le(c, b, x) && !level_le(c, a, x)) ++fails;
                }
        }
        CHECK(fails == 0);
    }
}

TEST_CASE("level_each is monotone and its level function is constant") {
    Types t;
    for (auto& c : t.corpus()) {
        INFO(c.str());
        for (std::uint64_t n = 0; n <= 5; ++n) {
            for (std::uint64_t m = n; m <= 5; ++m) CHECK(level_le(c, level_each(c, n), level_each(c, m)));
            auto f = level_fun(c, level_each(c, n));
            std::set<DimPath> keys;
            for (auto& [k, v] : f) {
                keys.insert(k);
                CHECK(v == n);
            }
            auto ds = dims(c);
            CHECK(keys == std::set<DimPath>(ds.begin(), ds.end()));
        }
    }
}

TEST_CASE("malformed levels are rejected") {
    Types t;
    CHECK_THROWS(check_level(t.s_s, d(2)));
    CHECK_THROWS(check_level(t.S, none()));
    CHECK_THROWS(check_level(t.s_s, some({d(1)})));
    CHECK_NOTHROW(check_level(t.s_s, some({d(1), d(0)})));
}
