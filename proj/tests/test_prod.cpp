#include <functional>

#include "copro/linear.hpp"
#include "copro/prod.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace copro;
using namespace testkit;

namespace {

struct Streams {
    CotypeRegistry reg;
    const CotypeDef& s = stream_def(reg);
    Ctt S = Ctt::leaf(&s);
    Ctt self = s.self_ctt;
    Productivity tail = rel_dtor(s, s.positions.at(1));
    Productivity head = rel_dtor(s, s.positions.at(0));
    Productivity cons = rel_ctor(s);
};

// the three defining conditions of the uniform productivity, read directly off the levels
bool u_oracle(const std::function<std::optional<std::int64_t>(std::int64_t)>& f, bool bounded, std::int64_t sup,
              const Ctt& dom, const Ctt& cod, const Level& l1, const Level& l2) {
    for (std::int64_t n = 0; n <= 40; ++n) {
        if (!level_le(cod, l2, level_each(cod, n))) continue;
        auto fn = f(n);
        if (!fn) return false;
        if (!level_le(dom, l1, level_each(dom, static_cast<std::uint64_t>(*fn)))) return false;
    }
    if (bounded && !level_le(dom, l1, level_each(dom, static_cast<std::uint64_t>(sup)))) return false;
    return true;
}

std::optional<std::int64_t> shift_fn(std::int64_t m, std::int64_t n) {
    if (n < m) return std::nullopt;
    return n - m;
}

}  // namespace

TEST_CASE("stream destructor and constructor relations") {
    Streams st;
    CHECK(check_member(st.tail, d(3), d(2)));
    CHECK_FALSE(check_member(st.tail, d(2), d(2)));
    CHECK_FALSE(check_member(st.tail, d(1), d(0)));
    CHECK(check_member(st.cons, some({some({}), d(1)}), d(2)));
    CHECK_FALSE(check_member(st.cons, some({none(), d(1)}), d(2)));
    CHECK_FALSE(check_member(st.cons, some({some({}), d(1)}), d(0)));
    CHECK(check_member(st.head, d(1), some({})));
    CHECK_FALSE(check_member(st.head, d(2), some({})));
    CHECK_FALSE(check_member(st.head, d(1), none()));
}

TEST_CASE("uniform productivity agrees with its definition") {
    Streams st;
    Ctt SS = Ctt::product(st.S, st.S);
    Ctt SplusS = Ctt::sum(st.S, st.S);
    std::vector<std::pair<Ctt, Ctt>> shapes{{st.S, st.S}, {st.self, st.S}, {SS, st.S}, {st.S, SS}, {SplusS, st.self}};
    for (auto& [dom, cod] : shapes) {
        auto ins = enumerate_levels(dom, 5);
        auto outs = enumerate_levels(cod, 5);
        for (std::int64_t m = -2; m <= 2; ++m) {
            Productivity p = prod_uz(m, dom, cod);
            for (auto& a : ins)
                for (auto& b : outs) {
                    bool want = u_oracle([m](std::int64_t n) { return shift_fn(m, n); }, false, 0, dom, cod, a, b);
                    INFO(dom.str() << " " << cod.str() << " m=" << m << " " << a.str() << " " << b.str());
                    CHECK(check_member(p, a, b) == want);
                }
        }
    }
}

TEST_CASE("affine productivity agrees with its definition") {
    Streams st;
    std::vector<AffineSpec> specs{{1, 2, 3, 0}, {2, 0, 1, 0}, {2, 1, 1, 0}, {0, 3, 1, 0}, {0, 5, 2, 2}, {1, -1, 2, 1}};
    Ctt SS = Ctt::product(st.S, st.S);
    for (auto& f : specs) {
        auto fn = [f](std::int64_t n) -> std::optional<std::int64_t> {
            if (n < f.tau) return std::nullopt;
            std::int64_t v = f.alpha * n + f.beta;
            return v <= 0 ? 0 : v / f.gamma;
        };
        std::int64_t sup = f.beta <= 0 ? 0 : f.beta / f.gamma;
        for (auto& [dom, cod] : std::vector<std::pair<Ctt, Ctt>>{{st.S, st.S}, {SS, st.S}, {st.S, SS}}) {
            Productivity p = prod_u(f, dom, cod);
            for (auto& a : enumerate_levels(dom, 6))
                for (auto& b : enumerate_levels(cod, 6)) {
                    INFO(f.str() << " " << a.str() << " " << b.str());
                    CHECK(check_member(p, a, b) == u_oracle(fn, f.alpha == 0, sup, dom, cod, a, b));
                }
        }
    }
}

TEST_CASE("uz(1) over streams is n_I + 1 <= n_O with n_O >= 1") {
    Streams st;
    Productivity p = prod_uz(1, st.S, st.S);
    for (std::uint64_t i = 0; i <= 8; ++i)
        for (std::uint64_t o = 0; o <= 8; ++o) CHECK(check_member(p, d(i), d(o)) == (i + 1 <= o && o >= 1));
}

TEST_CASE("uz(-1) contains (n+1, n)") {
    Streams st;
    Productivity p = prod_uz(-1, st.S, st.S);
    for (std::uint64_t n = 0; n <= 10; ++n) CHECK(check_member(p, d(n + 1), d(n)));
}

TEST_CASE("uz(0) contains the diagonal of all-active levels") {
    Streams st;
    Ctt c = Ctt::product(st.self, st.S);
    Productivity p = prod_uz(0, c, c);
    for (std::uint64_t n = 0; n <= 6; ++n) {
        Level l = level_each(c, n);
        CHECK(check_member(p, l, l));
    }
}

TEST_CASE("affine forms reject malformed parameters") {
    Streams st;
    CHECK_THROWS(prod_u(AffineSpec{1, 0, 0, 0}, st.S, st.S));
    CHECK_THROWS(prod_u(AffineSpec{-1, 0, 1, 0}, st.S, st.S));
    CHECK(AffineSpec::shift(3).tau == 3);
    CHECK(AffineSpec::shift(-2).beta == 2);
}

TEST_CASE("case, trivial and empty productivities") {
    Streams st;
    Productivity u1 = prod_uz(1, st.S, st.S);
    Productivity c = prod_case(u1, u1);
    CHECK(check_member(c, some({d(2), d(2)}), d(3)));
    CHECK(check_member(c, some({d(0), d(2)}), d(3)));
    CHECK_FALSE(check_member(c, some({d(3), d(2)}), d(3)));
    CHECK_FALSE(check_member(c, none(), d(3)));
    Productivity e = prod_empty(st.S, st.S);
    Productivity ce = prod_case(e, e);
    CHECK(check_member(ce, some({d(0), d(0)}), d(4)));
    CHECK_FALSE(check_member(ce, some({d(1), d(0)}), d(4)));
    for (std::uint64_t i = 0; i < 4; ++i) {
        CHECK(check_member(prod_trivial(st.S, st.S), d(i), d(i + 3)));
        CHECK_FALSE(check_member(e, d(i), d(i)));
    }
}

namespace {

using Member = std::function<bool(const Level&, const Level&)>;

Member mem(const Productivity& p) {
    return [p](const Level& a, const Level& b) { return check_member(p, a, b); };
}

bool is_bot(const Level& l) { return l.kind() == Level::Kind::None || (l.kind() == Level::Kind::Depth && l.n() == 0); }

void agree(const Productivity& got, const std::function<bool(const Level&, const Level&)>& want, std::uint64_t depth) {
    for (auto& a : enumerate_levels(got.dom, depth))
        for (auto& b : enumerate_levels(got.cod, depth)) {
            INFO(got.dom.str() << " -> " << got.cod.str() << " at " << a.str() << " " << b.str());
            CHECK(check_member(got, a, b) == want(a, b));
        }
}

}  // namespace

TEST_CASE("relation algebra agrees with set-level combination") {
    Streams st;
    std::vector<Productivity> ops{st.tail, prod_empty(st.S, st.S), prod_trivial(st.S, st.S)};
    for (std::int64_t m = -2; m <= 2; ++m) ops.push_back(prod_uz(m, st.S, st.S));
    const std::uint64_t D = 6;
    const auto mids = enumerate_levels(st.S, D + 16);

    for (std::size_t i = 0; i < ops.size(); ++i) {
        for (std::size_t j = 0; j < ops.size(); ++j) {
            auto& p1 = ops[i];
            auto& p2 = ops[j];
            Member m1 = mem(p1), m2 = mem(p2);
            agree(rel_compose(p1, p2),
                  [&](const Level& a, const Level& c) {
                      for (auto& b : mids)
                          if (m1(a, b) && m2(b, c)) return true;
                      return false;
                  },
                  D);
            agree(rel_fpair(p1, p2),
                  [&](const Level& a, const Level& o) {
                      if (o.kind() != Level::Kind::Some) return false;
                      return m1(a, o.child(0)) || m2(a, o.child(1));
                  },
                  D);
            agree(rel_fproduct(p1, p2),
                  [&](const Level& a, const Level& o) {
                      if (a.kind() != Level::Kind::Some || o.kind() != Level::Kind::Some) return false;
                      return (m1(a.child(0), o.child(0)) && is_bot(a.child(1))) ||
                             (m2(a.child(1), o.child(1)) && is_bot(a.child(0)));
                  },
                  D);
            agree(rel_fcopair(p1, p2),
                  [&](const Level& a, const Level& o) {
                      if (a.kind() != Level::Kind::Some) return false;
                      bool b0 = is_bot(a.child(0)), b1 = is_bot(a.child(1));
                      return (m1(a.child(0), o) && b1) || (m2(a.child(1), o) && b0) || (b0 && b1);
                  },
                  D);
            agree(rel_fcoproduct(p1, p2),
                  [&](const Level& a, const Level& o) {
                      if (a.kind() != Level::Kind::Some || o.kind() != Level::Kind::Some) return false;
                      bool b0 = is_bot(a.child(0)), b1 = is_bot(a.child(1));
                      return (m1(a.child(0), o.child(0)) && b1) || (m2(a.child(1), o.child(1)) && b0) || (b0 && b1);
                  },
                  D);
            agree(prod_case(p1, p2),
                  [&](const Level& a, const Level& o) {
                      if (a.kind() != Level::Kind::Some) return false;
                      return (m1(a.child(0), o) || is_bot(a.child(0))) && (m2(a.child(1), o) || is_bot(a.child(1)));
                  },
                  D);
            agree(rel_union(p1, p2), [&](const Level& a, const Level& o) { return m1(a, o) || m2(a, o); }, D);
        }
    }
}

TEST_CASE("cross-type compositions with head and cons") {
    Streams st;
    // cons then tail recovers the tail component shifted
    Productivity ct = rel_compose(st.cons, st.tail);
    Member mc = mem(st.cons), mt = mem(st.tail);
    auto mids = enumerate_levels(st.S, 22);
    agree(ct,
          [&](const Level& a, const Level& c) {
              for (auto& b : mids)
                  if (mc(a, b) && mt(b, c)) return true;
              return false;
          },
          4);
    Productivity ch = rel_compose(st.cons, st.head);
    Member mh = mem(st.head);
    agree(ch,
          [&](const Level& a, const Level& c) {
              for (auto& b : mids)
                  if (mc(a, b) && mh(b, c)) return true;
              return false;
          },
          4);
}

TEST_CASE("tail composed with itself") {
    Streams st;
    Productivity tt = rel_compose(st.tail, st.tail);
    Productivity t2 = rel_power(st.tail, 2);
    for (std::uint64_t i = 0; i <= 8; ++i)
        for (std::uint64_t o = 0; o <= 8; ++o) {
            bool want = i == o + 2 && o > 0;
            CHECK(check_member(tt, d(i), d(o)) == want);
            CHECK(check_member(t2, d(i), d(o)) == want);
        }
}

TEST_CASE("structural relations") {
    Streams st;
    Ctt SS = Ctt::product(st.S, st.S);
    Productivity f = rel_fst(SS);
    CHECK(check_member(f, some({d(3), d(0)}), d(3)));
    CHECK_FALSE(check_member(f, some({d(3), d(1)}), d(3)));
    CHECK_FALSE(check_member(f, none(), d(0)));
    Productivity s = rel_snd(SS);
    CHECK(check_member(s, some({d(0), d(4)}), d(4)));

    Productivity c = rel_comm(Ctt::product(st.self, st.S));
    CHECK(check_member(c, some({some({some({}), d(2)}), d(5)}), some({d(5), some({some({}), d(2)})})));
    CHECK_FALSE(check_member(c, some({some({some({}), d(2)}), d(5)}), some({d(2), some({some({}), d(5)})})));

    Ctt abc = Ctt::product(Ctt::product(st.S, st.self), st.S);
    Productivity as = rel_assoc(abc);
    Level l1 = some({some({d(1), some({none(), d(2)})}), d(3)});
    Level l2 = some({d(1), some({some({none(), d(2)}), d(3)})});
    CHECK(check_member(as, l1, l2));
    Productivity an = rel_antiassoc(as.cod);
    CHECK(check_member(an, l2, l1));
    CHECK_FALSE(check_member(an, l2, some({some({d(1), some({none(), d(2)})}), d(2)})));

    Productivity pl = rel_pair_l(st.self, st.S);
    CHECK(check_member(pl, d(4), some({none(), d(4)})));
    CHECK(check_member(pl, d(4), some({some({some({}), d(9)}), d(4)})));
    CHECK_FALSE(check_member(pl, d(4), none()));
    Productivity pr = rel_pair_r(st.S, st.self);
    CHECK(check_member(pr, d(2), some({d(2), none()})));

    Productivity il = rel_inl(st.S, st.self);
    CHECK(check_member(il, d(2), some({d(2), none()})));
    Productivity ir = rel_inr(st.S, st.self);
    CHECK(check_member(ir, some({some({}), d(1)}), some({d(7), some({some({}), d(1)})})));

    Productivity id = rel_ident(st.self);
    CHECK(check_member(id, none(), none()));
    CHECK(check_member(id, some({none(), d(3)}), some({none(), d(3)})));
    CHECK_FALSE(check_member(id, some({none(), d(3)}), some({some({}), d(3)})));
}

TEST_CASE("fproduct and fpair examples") {
    Streams st;
    Productivity u1 = prod_uz(1, st.S, st.S);
    CHECK_FALSE(check_member(rel_fproduct(u1, u1), some({d(1), d(1)}), some({d(2), d(2)})));
    Productivity fp = rel_fpair(prod_empty(st.S, st.S), rel_ident(st.S));
    for (std::uint64_t n = 0; n < 5; ++n)
        for (std::uint64_t k = 0; k < 5; ++k) CHECK(check_member(fp, d(n), some({d(k), d(n)})));
}

TEST_CASE("map on a list functor with uz(0)") {
    Streams st;
    Productivity p = rel_fmap(Spf::list(), prod_uz(0, st.S, st.S));
    for (std::uint64_t n = 0; n < 6; ++n) CHECK(check_member(p, some({d(n)}), some({d(n)})));
    CHECK_FALSE(check_member(p, some({d(3)}), some({d(2)})));
    CHECK(check_member(p, some({d(0)}), some({d(5)})));
}

TEST_CASE("curry and uncurry") {
    Streams st;
    Ctt SS = Ctt::product(st.S, st.S);
    Productivity s = rel_snd(SS);
    Productivity c = rel_curry(s);
    for (std::uint64_t n = 0; n < 5; ++n) CHECK(check_member(c, d(n), d(n)));
    CHECK_FALSE(check_member(c, d(1), d(2)));
    Productivity u = rel_uncurry(st.tail, st.S);
    CHECK(check_member(u, some({d(0), d(3)}), d(2)));
    CHECK(check_member(u, some({d(5), d(0)}), d(7)));
    CHECK_FALSE(check_member(u, some({d(1), d(3)}), d(2)));
}

TEST_CASE("exponent relations") {
    Streams st;
    ConstType two = ConstType::enumeration(2);
    Ctt fn = Ctt::exp(two, st.S);
    Productivity pj = rel_ceproj(fn);
    CHECK(check_member(pj, some({d(3)}), d(3)));
    CHECK_FALSE(check_member(pj, some({d(3)}), d(2)));
    CHECK_FALSE(check_member(pj, none(), d(0)));

    Productivity ap = rel_ceapp(Ctt::product(fn, Ctt::constant(two)));
    CHECK(check_member(ap, some({some({d(4)}), some({})}), d(4)));
    CHECK(check_member(ap, some({some({d(4)}), none()}), d(4)));

    Productivity ga = rel_cgeapp(Ctt::product(Ctt::exp(ConstType::nat(), st.S), Ctt::constant(ConstType::boolean())));
    CHECK(check_member(ga, some({some({d(2)}), none()}), d(2)));

    Productivity cp = rel_cepair(Ctt::product(fn, fn));
    CHECK(check_member(cp, some({some({d(1)}), some({d(2)})}), some({some({d(1), d(2)})})));
    CHECK_FALSE(check_member(cp, some({some({d(1)}), some({d(2)})}), some({some({d(2), d(1)})})));

    Ctt dom = Ctt::product(st.S, Ctt::constant(two));
    Productivity inner = rel_fst(dom);
    Productivity cc = rel_cecurry(inner);
    CHECK(check_member(cc, d(3), some({d(3)})));
    CHECK_FALSE(check_member(cc, d(3), none()));

    Ctt inner_dom = Ctt::product(st.S, Ctt::constant(two));
    Productivity body = rel_compose(rel_snd(Ctt::product(Ctt::constant(two), inner_dom)), rel_fst(inner_dom));
    Productivity gc = rel_cgecurry(body);
    CHECK(check_member(gc, d(2), some({d(2)})));
    CHECK_FALSE(check_member(gc, d(2), some({d(3)})));

    Productivity sw = rel_ceswap(two, {st.tail, rel_ident(st.S)});
    CHECK(check_member(sw, d(3), some({d(2)})));
    CHECK(check_member(sw, d(3), some({d(3)})));
    CHECK_FALSE(check_member(sw, d(3), some({d(4)})));

    Productivity ni = rel_cnif(ConstType::boolean(), st.tail, prod_uz(0, st.S, st.S));
    CHECK(check_member(ni, some({some({}), d(3)}), d(2)));
    CHECK(check_member(ni, some({some({}), d(0)}), d(9)));
    CHECK_FALSE(check_member(ni, some({none(), d(3)}), d(2)));
}

TEST_CASE("prune removes bottom-equivalent ends") {
    Streams st;
    Productivity p = rel_prune(prod_trivial(st.self, st.S));
    CHECK_FALSE(check_member(p, none(), d(2)));
    CHECK_FALSE(check_member(p, some({none(), d(0)}), d(2)));
    CHECK(check_member(p, some({some({}), d(0)}), d(2)));
    CHECK_FALSE(check_member(p, some({some({}), d(0)}), d(0)));
}

TEST_CASE("asc check always holds") {
    Streams st;
    CotypeRegistry reg;
    const CotypeDef& bt = bintree_def(reg);
    auto r = asc_check(st.S);
    CHECK(r.holds);
    CHECK(r.justification == "finite dimension set");
    CHECK(asc_check(Ctt::product(Ctt::leaf(&bt), st.S)).holds);
}

TEST_CASE("bintree destructors") {
    CotypeRegistry reg;
    const CotypeDef& bt = bintree_def(reg);
    REQUIRE(bt.positions.size() == 3);
    Productivity l = rel_dtor(bt, bt.positions[1]);
    CHECK(check_member(l, d(4), d(3)));
    CHECK_FALSE(check_member(l, d(3), d(3)));
    Productivity root = rel_dtor(bt, Position{{}, bt.self_ctt, "unfold"});
    CHECK(check_member(root, d(3), some({some({}), some({d(2), d(1)})})));
    CHECK(check_member(root, d(1), some({some({}), none()})));
    CHECK_FALSE(check_member(root, d(3), none()));
}

TEST_CASE("integer search and projection") {
    // 2x = y + 1, y <= 4 has models x=1,y=1 / x=2,y=3
    Var x = fresh_var(), y = fresh_var();
    std::vector<Atom> sys{Atom{LinExpr::var(x, 2) - LinExpr::var(y) - LinExpr(1), true},
                          Atom{LinExpr::var(y) - LinExpr(4), false}};
    auto m = int_model(sys, 10);
    REQUIRE(m);
    CHECK(2 * (*m)[x] == (*m)[y] + 1);
    // 2x = 2y + 1 is rationally feasible but not over the integers
    std::vector<Atom> odd{Atom{LinExpr::var(x, 2) - LinExpr::var(y, 2) - LinExpr(1), true}};
    CHECK(fm_check(odd) == Sat::Infeasible);
    CHECK_FALSE(int_model(odd, 20));
    // 1 <= 3x - 3y <= 2 has no integer solution; the search must exhaust
    std::vector<Atom> gap{Atom{LinExpr(1) - LinExpr::var(x, 3) + LinExpr::var(y, 3), false},
                          Atom{LinExpr::var(x, 3) - LinExpr::var(y, 3) - LinExpr(2), false}};
    CHECK_FALSE(int_model(gap, 6));
    auto r = fm_range({Atom{LinExpr(2) - LinExpr::var(x), false}, Atom{LinExpr::var(x) - LinExpr(5), false}}, x, 100);
    REQUIRE(r);
    CHECK(r->first == 2);
    CHECK(r->second == 5);
}

TEST_CASE("formula printing") {
    Streams st;
    auto names = layout_names(st.tail.in, "I");
    auto on = layout_names(st.tail.out, "O");
    names.insert(on.begin(), on.end());
    Var i = st.tail.in.var, o = st.tail.out.var;
    CHECK(print_atom(Atom{LinExpr::var(i) - LinExpr::var(o) - LinExpr(1), true}, names) == "nI = nO + 1");
    CHECK(print_atom(Atom{LinExpr(1) - LinExpr::var(o), false}, names) == "nO > 0");
    CHECK(print_atom(Atom{LinExpr::var(i) - LinExpr(3), false}, names) == "nI <= 3");
    CHECK(print_atom(Atom{LinExpr::var(i) + LinExpr(1) - LinExpr::var(o), false}, names) == "nO > nI");
    auto self_names = layout_names(Layout::fresh(st.self), "I");
    CHECK(self_names.size() == 3);
}
