#include "copro/prod.hpp"

#include <algorithm>
#include <mutex>
#include <set>

#include "copro/linear.hpp"

namespace copro {

struct DnfCache {
    std::mutex m;
    bool done = false;
    bool too_large = false;
    std::vector<Conj> dnf;
};

Layout Layout::fresh(const Ctt& c) {
    Layout l;
    l.ctt = c;
    l.var = fresh_var();
    if (!c.is_leaf())
        for (auto& ch : c.children()) l.children.push_back(fresh(ch));
    return l;
}

void Layout::vars(std::vector<Var>& out) const {
    out.push_back(var);
    for (auto& c : children) c.vars(out);
}

void Layout::nat_vars(std::vector<Var>& out) const {
    if (is_leaf()) out.push_back(var);
    for (auto& c : children) c.nat_vars(out);
}

void Layout::bool_vars(std::vector<Var>& out) const {
    if (!is_leaf()) out.push_back(var);
    for (auto& c : children) c.bool_vars(out);
}

namespace {

void map_rec(const Layout& a, const Layout& b, std::map<Var, Var>& m) {
    if (a.children.size() != b.children.size() || a.is_leaf() != b.is_leaf())
        throw TypeError("layout mismatch between " + a.ctt.str() + " and " + b.ctt.str());
    m[a.var] = b.var;
    for (std::size_t i = 0; i < a.children.size(); ++i) map_rec(a.children[i], b.children[i], m);
}

void require_same(const Ctt& a, const Ctt& b, const char* what) {
    if (a != b) throw TypeError(std::string(what) + ": " + a.str() + " does not match " + b.str());
}

const Ctt& expect_node(const Ctt& c, Spf::Kind k, const char* what) {
    if (c.is_leaf() || c.spf().kind != k) throw TypeError(std::string(what) + ": unexpected type " + c.str());
    return c;
}

Formula present(const Layout& l) { return Formula::boolean(l.var, true); }
Formula absent(const Layout& l) { return Formula::boolean(l.var, false); }
LinExpr nat(const Layout& l) { return LinExpr::var(l.var); }

std::vector<Var> exist_vars(const Layout& l) {
    std::vector<Var> v;
    l.vars(v);
    return v;
}

}  // namespace

std::map<Var, Var> layout_map(const Layout& from, const Layout& to) {
    std::map<Var, Var> m;
    map_rec(from, to, m);
    return m;
}

std::string AffineSpec::str() const {
    return "u(a=" + std::to_string(alpha) + ", b=" + std::to_string(beta) + ", g=" + std::to_string(gamma) +
           ", t=" + std::to_string(tau) + ")";
}

AffineSpec AffineSpec::shift(std::int64_t m) { return AffineSpec{1, -m, 1, std::max<std::int64_t>(0, m)}; }

std::optional<std::int64_t> AffineSpec::apply(std::int64_t n) const {
    if (n < tau) return std::nullopt;
    std::int64_t num = alpha * n + beta;
    if (num <= 0) return 0;
    return num / gamma;
}

Formula Productivity::at(const Layout& i, const Layout& o) const {
    auto m = layout_map(in, i);
    for (auto& [k, v] : layout_map(out, o)) m[k] = v;
    return body.instantiate(m);
}

Productivity make_prod(const Ctt& dom, const Ctt& cod,
                       const std::function<Formula(const Layout&, const Layout&)>& build, ProdTag tag) {
    Productivity p;
    p.dom = dom;
    p.cod = cod;
    p.in = Layout::fresh(dom);
    p.out = Layout::fresh(cod);
    p.body = build(p.in, p.out);
    p.tag = tag;
    p.cache = std::make_shared<DnfCache>();
    return p;
}

Formula enc_eq(const Layout& a, const Layout& b) {
    if (a.is_leaf()) return Formula::eq(nat(a), nat(b));
    std::vector<Formula> both{present(a), present(b)};
    for (std::size_t i = 0; i < a.children.size(); ++i) both.push_back(enc_eq(a.child(i), b.child(i)));
    return (absent(a) && absent(b)) || Formula::conj(std::move(both));
}

Formula enc_is_bot(const Layout& a) {
    if (a.is_leaf()) return Formula::eq(nat(a), 0);
    return absent(a);
}

Formula enc_le_bot(const Layout& a) {
    if (a.is_leaf()) return Formula::eq(nat(a), 0);
    if (!a.ctt.spf().shape_one()) return absent(a);
    std::vector<Formula> xs{present(a)};
    for (auto& c : a.children) xs.push_back(enc_le_bot(c));
    return absent(a) || Formula::conj(std::move(xs));
}

Formula enc_each(const Layout& a, const LinExpr& n) {
    if (a.is_leaf()) return Formula::eq(nat(a), n);
    std::vector<Formula> xs{present(a)};
    for (auto& c : a.children) xs.push_back(enc_each(c, n));
    return Formula::conj(std::move(xs));
}

Formula enc_inactive(const std::vector<Var>& guards) {
    std::vector<Formula> xs;
    for (Var g : guards) xs.push_back(Formula::boolean(g, false));
    return Formula::disj(std::move(xs));
}

namespace {

void leaves_rec(const Layout& l, std::vector<Var>& guards, std::vector<LeafVar>& out) {
    if (l.is_leaf()) {
        out.push_back({l.var, guards});
        return;
    }
    guards.push_back(l.var);
    for (auto& c : l.children) leaves_rec(c, guards, out);
    guards.pop_back();
}

Formula active(const LeafVar& x) {
    std::vector<Formula> xs;
    for (Var g : x.guards) xs.push_back(Formula::boolean(g, true));
    return Formula::conj(std::move(xs));
}

}  // namespace

std::vector<LeafVar> leaf_vars(const Layout& l) {
    std::vector<LeafVar> out;
    std::vector<Var> g;
    leaves_rec(l, g, out);
    return out;
}

Formula enc_max_cases(const Layout& l, const std::function<Formula(const LinExpr&)>& k) {
    auto ys = leaf_vars(l);
    std::vector<Formula> cases;
    {
        std::vector<Formula> xs;
        for (auto& y : ys) xs.push_back(enc_inactive(y.guards) || Formula::le(LinExpr::var(y.var), 0));
        xs.push_back(k(LinExpr(0)));
        cases.push_back(Formula::conj(std::move(xs)));
    }
    for (std::size_t j = 0; j < ys.size(); ++j) {
        LinExpr n = LinExpr::var(ys[j].var);
        std::vector<Formula> xs{active(ys[j]), Formula::ge(n, 1)};
        for (std::size_t i = 0; i < ys.size(); ++i) {
            if (i == j) continue;
            LinExpr y = LinExpr::var(ys[i].var);
            Formula cmp = i < j ? Formula::lt(y, n) : Formula::le(y, n);
            xs.push_back(enc_inactive(ys[i].guards) || cmp);
        }
        xs.push_back(k(n));
        cases.push_back(Formula::conj(std::move(xs)));
    }
    return Formula::disj(std::move(cases));
}

Productivity prod_u(const AffineSpec& f, const Ctt& dom, const Ctt& cod) {
    if (f.gamma < 1) throw Error("affine productivity needs a divisor of at least 1");
    if (f.alpha < 0) throw Error("affine productivity needs a nonnegative slope");
    if (f.tau < 0) throw Error("affine productivity needs a nonnegative threshold");
    ProdTag tag{ProdTag::Kind::U, 0, f};
    return make_prod(
        dom, cod,
        [&](const Layout& in, const Layout& out) {
            auto xs = leaf_vars(in);
            return enc_max_cases(out, [&](const LinExpr& N) {
                std::vector<Formula> cs{Formula::ge(N, f.tau)};
                LinExpr bound = N * f.alpha + LinExpr(f.beta);
                for (auto& x : xs) {
                    LinExpr v = LinExpr::var(x.var);
                    cs.push_back(Formula::disj(
                        {enc_inactive(x.guards), Formula::eq(v, 0), Formula::le(v * f.gamma, bound)}));
                    if (f.alpha == 0) {
                        std::int64_t top = f.beta <= 0 ? 0 : f.beta / f.gamma;
                        cs.push_back(enc_inactive(x.guards) || Formula::le(v, top));
                    }
                }
                return Formula::conj(std::move(cs));
            });
        },
        tag);
}

Productivity prod_uz(std::int64_t m, const Ctt& dom, const Ctt& cod) {
    Productivity p = prod_u(AffineSpec::shift(m), dom, cod);
    p.tag.kind = ProdTag::Kind::UZ;
    p.tag.m = m;
    return p;
}

Productivity prod_case(const Productivity& p1, const Productivity& p2) {
    require_same(p1.cod, p2.cod, "case productivity");
    return make_prod(
        Ctt::product(p1.dom, p2.dom), p1.cod,
        [&](const Layout& in, const Layout& out) {
            return Formula::conj({present(in), p1.at(in.child(0), out) || enc_is_bot(in.child(0)),
                                  p2.at(in.child(1), out) || enc_is_bot(in.child(1))});
        },
        ProdTag{ProdTag::Kind::Case, 0, {}});
}

Productivity prod_trivial(const Ctt& dom, const Ctt& cod) {
    return make_prod(
        dom, cod, [](const Layout&, const Layout&) { return Formula::truth(); },
        ProdTag{ProdTag::Kind::Trivial, 0, {}});
}

Productivity prod_empty(const Ctt& dom, const Ctt& cod) {
    return make_prod(
        dom, cod, [](const Layout&, const Layout&) { return Formula::falsity(); },
        ProdTag{ProdTag::Kind::Empty, 0, {}});
}

Productivity rel_ident(const Ctt& c) {
    return make_prod(c, c, [](const Layout& in, const Layout& out) { return enc_eq(in, out); });
}

Productivity rel_compose(const Productivity& p1, const Productivity& p2) {
    require_same(p1.cod, p2.dom, "composition");
    return make_prod(p1.dom, p2.cod, [&](const Layout& in, const Layout& out) {
        Layout mid = Layout::fresh(p1.cod);
        return Formula::exists(exist_vars(mid), p1.at(in, mid) && p2.at(mid, out));
    });
}

Productivity rel_power(const Productivity& p, int n) {
    if (n < 1) throw Error("power of a productivity needs n >= 1");
    require_same(p.dom, p.cod, "power");
    Productivity r = p;
    for (int i = 1; i < n; ++i) r = rel_compose(r, p);
    return r;
}

Productivity rel_union(const Productivity& p1, const Productivity& p2) {
    require_same(p1.dom, p2.dom, "union");
    require_same(p1.cod, p2.cod, "union");
    return make_prod(p1.dom, p1.cod,
                     [&](const Layout& in, const Layout& out) { return p1.at(in, out) || p2.at(in, out); });
}

Productivity rel_fpair(const Productivity& p1, const Productivity& p2) {
    require_same(p1.dom, p2.dom, "fpair");
    return make_prod(p1.dom, Ctt::product(p1.cod, p2.cod), [&](const Layout& in, const Layout& out) {
        return present(out) && (p1.at(in, out.child(0)) || p2.at(in, out.child(1)));
    });
}

Productivity rel_fproduct(const Productivity& p1, const Productivity& p2) {
    return make_prod(Ctt::product(p1.dom, p2.dom), Ctt::product(p1.cod, p2.cod),
                     [&](const Layout& in, const Layout& out) {
                         auto& i0 = in.child(0);
                         auto& i1 = in.child(1);
                         return Formula::conj({present(in), present(out),
                                               (p1.at(i0, out.child(0)) && enc_is_bot(i1)) ||
                                                   (p2.at(i1, out.child(1)) && enc_is_bot(i0))});
                     });
}

Productivity rel_fcopair(const Productivity& p1, const Productivity& p2) {
    require_same(p1.cod, p2.cod, "fcopair");
    return make_prod(Ctt::sum(p1.dom, p2.dom), p1.cod, [&](const Layout& in, const Layout& out) {
        auto& i0 = in.child(0);
        auto& i1 = in.child(1);
        return present(in) && Formula::disj({p1.at(i0, out) && enc_is_bot(i1), p2.at(i1, out) && enc_is_bot(i0),
                                             enc_is_bot(i0) && enc_is_bot(i1)});
    });
}

Productivity rel_fcoproduct(const Productivity& p1, const Productivity& p2) {
    return make_prod(Ctt::sum(p1.dom, p2.dom), Ctt::sum(p1.cod, p2.cod), [&](const Layout& in, const Layout& out) {
        auto& i0 = in.child(0);
        auto& i1 = in.child(1);
        return Formula::conj({present(in), present(out),
                              Formula::disj({p1.at(i0, out.child(0)) && enc_is_bot(i1),
                                             p2.at(i1, out.child(1)) && enc_is_bot(i0),
                                             enc_is_bot(i0) && enc_is_bot(i1)})});
    });
}

Productivity rel_if(bool b, const Productivity& p1, const Productivity& p2) {
    require_same(p1.dom, p2.dom, "if");
    require_same(p1.cod, p2.cod, "if");
    return b ? p1 : p2;
}

Productivity rel_fst(const Ctt& dom) {
    expect_node(dom, Spf::Kind::Product, "fst");
    return make_prod(dom, dom.child(0), [](const Layout& in, const Layout& out) {
        return Formula::conj({present(in), enc_eq(in.child(0), out), enc_is_bot(in.child(1))});
    });
}

Productivity rel_snd(const Ctt& dom) {
    expect_node(dom, Spf::Kind::Product, "snd");
    return make_prod(dom, dom.child(1), [](const Layout& in, const Layout& out) {
        return Formula::conj({present(in), enc_eq(in.child(1), out), enc_is_bot(in.child(0))});
    });
}

Productivity rel_pair_l(const Ctt& left, const Ctt& right) {
    return make_prod(right, Ctt::product(left, right), [](const Layout& in, const Layout& out) {
        return present(out) && enc_eq(out.child(1), in);
    });
}

Productivity rel_pair_r(const Ctt& left, const Ctt& right) {
    return make_prod(left, Ctt::product(left, right), [](const Layout& in, const Layout& out) {
        return present(out) && enc_eq(out.child(0), in);
    });
}

Productivity rel_inl(const Ctt& left, const Ctt& right) {
    return make_prod(left, Ctt::sum(left, right), [](const Layout& in, const Layout& out) {
        return present(out) && enc_eq(out.child(0), in);
    });
}

Productivity rel_inr(const Ctt& left, const Ctt& right) {
    return make_prod(right, Ctt::sum(left, right), [](const Layout& in, const Layout& out) {
        return present(out) && enc_eq(out.child(1), in);
    });
}

Productivity rel_comm(const Ctt& dom) {
    expect_node(dom, Spf::Kind::Product, "comm");
    return make_prod(dom, Ctt::product(dom.child(1), dom.child(0)), [](const Layout& in, const Layout& out) {
        return Formula::conj(
            {present(in), present(out), enc_eq(in.child(0), out.child(1)), enc_eq(in.child(1), out.child(0))});
    });
}

Productivity rel_assoc(const Ctt& dom) {
    expect_node(dom, Spf::Kind::Product, "assoc");
    expect_node(dom.child(0), Spf::Kind::Product, "assoc");
    auto& ab = dom.child(0);
    Ctt cod = Ctt::product(ab.child(0), Ctt::product(ab.child(1), dom.child(1)));
    return make_prod(dom, cod, [](const Layout& in, const Layout& out) {
        return Formula::conj({present(in), present(in.child(0)), present(out), present(out.child(1)),
                              enc_eq(in.child(0).child(0), out.child(0)),
                              enc_eq(in.child(0).child(1), out.child(1).child(0)),
                              enc_eq(in.child(1), out.child(1).child(1))});
    });
}

Productivity rel_antiassoc(const Ctt& dom) {
    expect_node(dom, Spf::Kind::Product, "antiassoc");
    expect_node(dom.child(1), Spf::Kind::Product, "antiassoc");
    auto& bc = dom.child(1);
    Ctt cod = Ctt::product(Ctt::product(dom.child(0), bc.child(0)), bc.child(1));
    return make_prod(dom, cod, [](const Layout& in, const Layout& out) {
        return Formula::conj({present(in), present(in.child(1)), present(out), present(out.child(0)),
                              enc_eq(in.child(0), out.child(0).child(0)),
                              enc_eq(in.child(1).child(0), out.child(0).child(1)),
                              enc_eq(in.child(1).child(1), out.child(1))});
    });
}

Productivity rel_curry(const Productivity& p) {
    expect_node(p.dom, Spf::Kind::Product, "curry");
    return make_prod(p.dom.child(1), p.cod, [&](const Layout& in, const Layout& out) {
        Layout m = Layout::fresh(p.dom);
        return Formula::exists(exist_vars(m), Formula::conj({present(m), enc_eq(m.child(1), in), p.at(m, out)}));
    });
}

Productivity rel_uncurry(const Productivity& p, const Ctt& first) {
    return make_prod(Ctt::product(first, p.dom), p.cod, [&](const Layout& in, const Layout& out) {
        return present(in) &&
               ((p.at(in.child(1), out) && enc_is_bot(in.child(0))) || enc_is_bot(in.child(1)));
    });
}

Productivity rel_fmap(const Spf& spf, const Productivity& p) {
    if (spf.arity() != 1) throw TypeError("fmap needs a unary functor, got " + spf.str());
    return make_prod(Ctt::node(spf, {p.dom}), Ctt::node(spf, {p.cod}), [&](const Layout& in, const Layout& out) {
        return Formula::conj(
            {present(in), present(out), p.at(in.child(0), out.child(0)) || enc_is_bot(in.child(0))});
    });
}

Productivity rel_cnif(const ConstType& a, const Productivity& p1, const Productivity& p2) {
    require_same(p1.dom, p2.dom, "cnif");
    require_same(p1.cod, p2.cod, "cnif");
    return make_prod(Ctt::product(Ctt::constant(a), p1.dom), p1.cod, [&](const Layout& in, const Layout& out) {
        auto& x = in.child(1);
        return Formula::conj({present(in), present(in.child(0)),
                              Formula::disj({enc_is_bot(x), p1.at(x, out), p2.at(x, out)})});
    });
}

Productivity rel_ceapp(const Ctt& dom) {
    expect_node(dom, Spf::Kind::Product, "ceapp");
    auto& fn = expect_node(dom.child(0), Spf::Kind::Exp, "ceapp");
    const Ctt& arg = dom.child(1);
    if (!arg.is_const() || *arg.spf().type != *fn.spf().type)
        throw TypeError("ceapp: argument " + arg.str() + " does not match exponent " + fn.str());
    return make_prod(dom, fn.child(0), [](const Layout& in, const Layout& out) {
        return Formula::conj({present(in), present(in.child(0)), enc_eq(in.child(0).child(0), out)});
    });
}

Productivity rel_cgeapp(const Ctt& dom) {
    expect_node(dom, Spf::Kind::Product, "cgeapp");
    auto& fn = expect_node(dom.child(0), Spf::Kind::Exp, "cgeapp");
    if (!dom.child(1).is_const()) throw TypeError("cgeapp: argument must be a constant, got " + dom.child(1).str());
    return make_prod(dom, fn.child(0), [](const Layout& in, const Layout& out) {
        return Formula::conj({present(in), present(in.child(0)), enc_eq(in.child(0).child(0), out)});
    });
}

Productivity rel_cecurry(const Productivity& p) {
    expect_node(p.dom, Spf::Kind::Product, "cecurry");
    const Ctt& a = p.dom.child(1);
    if (!a.is_const()) throw TypeError("cecurry: second component must be a constant, got " + a.str());
    return make_prod(p.dom.child(0), Ctt::exp(*a.spf().type, p.cod), [&](const Layout& in, const Layout& out) {
        Layout m = Layout::fresh(p.dom);
        return present(out) &&
               Formula::exists(exist_vars(m),
                               Formula::conj({present(m), enc_eq(m.child(0), in), p.at(m, out.child(0))}));
    });
}

Productivity rel_cgecurry(const Productivity& p) {
    expect_node(p.dom, Spf::Kind::Product, "cgecurry");
    const Ctt& a = p.dom.child(0);
    expect_node(p.dom.child(1), Spf::Kind::Product, "cgecurry");
    if (!a.is_const()) throw TypeError("cgecurry: first component must be a constant, got " + a.str());
    const Ctt& c1 = p.dom.child(1).child(0);
    return make_prod(c1, Ctt::exp(*a.spf().type, p.cod), [&](const Layout& in, const Layout& out) {
        Layout m = Layout::fresh(p.dom);
        return present(out) &&
               Formula::exists(exist_vars(m), Formula::conj({present(m), present(m.child(1)),
                                                             enc_eq(m.child(1).child(0), in),
                                                             p.at(m, out.child(0))}));
    });
}

Productivity rel_ceswap(const ConstType& a, const std::vector<Productivity>& cases) {
    if (cases.empty()) throw TypeError("ceswap needs at least one case");
    for (auto& c : cases) {
        require_same(cases.front().dom, c.dom, "ceswap");
        require_same(cases.front().cod, c.cod, "ceswap");
    }
    return make_prod(cases.front().dom, Ctt::exp(a, cases.front().cod), [&](const Layout& in, const Layout& out) {
        std::vector<Formula> xs;
        for (auto& c : cases) xs.push_back(c.at(in, out.child(0)));
        return present(out) && Formula::disj(std::move(xs));
    });
}

Productivity rel_ceproj(const Ctt& dom) {
    auto& fn = expect_node(dom, Spf::Kind::Exp, "ceproj");
    return make_prod(dom, fn.child(0), [](const Layout& in, const Layout& out) {
        return present(in) && enc_eq(in.child(0), out);
    });
}

Productivity rel_cepair(const Ctt& dom) {
    expect_node(dom, Spf::Kind::Product, "cepair");
    auto& f1 = expect_node(dom.child(0), Spf::Kind::Exp, "cepair");
    auto& f2 = expect_node(dom.child(1), Spf::Kind::Exp, "cepair");
    if (*f1.spf().type != *f2.spf().type) throw TypeError("cepair: exponent arities differ");
    Ctt cod = Ctt::exp(*f1.spf().type, Ctt::product(f1.child(0), f2.child(0)));
    return make_prod(dom, cod, [](const Layout& in, const Layout& out) {
        auto& o = out.child(0);
        return Formula::conj({present(in), present(in.child(0)), present(in.child(1)), present(out), present(o),
                              enc_eq(in.child(0).child(0), o.child(0)),
                              enc_eq(in.child(1).child(0), o.child(1))});
    });
}

Productivity rel_ctor(const CotypeDef& def) {
    return make_prod(def.self_ctt, Ctt::leaf(&def), [](const Layout& in, const Layout& out) {
        LinExpr n = nat(out);
        return Formula::ge(n, 1) && enc_each(in, n - LinExpr(1));
    });
}

Productivity rel_dtor(const CotypeDef& def, const Position& pos) {
    return make_prod(Ctt::leaf(&def), pos.ctt, [](const Layout& in, const Layout& out) {
        return !enc_le_bot(out) &&
               enc_max_cases(out, [&](const LinExpr& N) { return Formula::eq(nat(in), N + LinExpr(1)); });
    });
}

Productivity rel_prune(const Productivity& p) {
    Productivity r = make_prod(p.dom, p.cod, [&](const Layout& in, const Layout& out) {
        return Formula::conj({p.at(in, out), !enc_le_bot(in), !enc_le_bot(out)});
    });
    return r;
}

void assign_level(const Layout& lay, const Level& l, Assignment& a) {
    if (lay.is_leaf()) {
        if (l.kind() != Level::Kind::Depth) throw TypeError("level " + l.str() + " does not mirror " + lay.ctt.str());
        a.nats[lay.var] = static_cast<std::int64_t>(l.n());
        return;
    }
    if (l.kind() == Level::Kind::Depth) throw TypeError("level " + l.str() + " does not mirror " + lay.ctt.str());
    bool some = l.kind() == Level::Kind::Some;
    a.bools[lay.var] = some;
    if (some && l.children().size() != lay.children.size())
        throw TypeError("level " + l.str() + " does not mirror " + lay.ctt.str());
    for (std::size_t i = 0; i < lay.children.size(); ++i)
        assign_level(lay.child(i), some ? l.child(i) : bottom(lay.child(i).ctt), a);
}

Level read_level(const Layout& lay, const Assignment& a) {
    if (lay.is_leaf()) {
        auto it = a.nats.find(lay.var);
        return Level::depth(it == a.nats.end() ? 0 : static_cast<std::uint64_t>(it->second));
    }
    auto it = a.bools.find(lay.var);
    if (it == a.bools.end() || !it->second) return Level::none();
    std::vector<Level> ch;
    for (auto& c : lay.children) ch.push_back(read_level(c, a));
    return Level::some(std::move(ch));
}

namespace {

std::uint64_t max_depth(const Level& l) {
    std::uint64_t m = l.kind() == Level::Kind::Depth ? l.n() : 0;
    for (auto& c : l.children()) m = std::max(m, max_depth(c));
    return m;
}

}  // namespace

bool check_member(const Productivity& p, const Level& l1, const Level& l2) {
    check_level(p.dom, l1);
    check_level(p.cod, l2);
    Assignment a;
    assign_level(p.in, l1, a);
    assign_level(p.out, l2, a);

    const std::vector<Conj>* dnf = nullptr;
    if (p.cache) {
        std::lock_guard<std::mutex> g(p.cache->m);
        if (!p.cache->done) {
            try {
                p.cache->dnf = to_dnf(p.body);
            } catch (const DnfTooLarge&) {
                p.cache->too_large = true;
            }
            p.cache->done = true;
        }
        if (!p.cache->too_large) dnf = &p.cache->dnf;
    }
    std::vector<Conj> local;
    if (!dnf) {
        // fall back to splitting on the end presence bits first
        local = to_dnf(p.body.subst_bools(a.bools), nullptr, 2000000);
        dnf = &local;
    }

    std::int64_t bound = static_cast<std::int64_t>(std::max(max_depth(l1), max_depth(l2))) + 16;
    return holds_dnf(*dnf, a, bound);
}

AscResult asc_check(const Ctt& cod) {
    (void)dims(cod);
    return {true, "finite dimension set"};
}

std::map<Var, std::string> layout_names(const Layout& lay, const std::string& side) {
    std::map<Var, std::string> out;
    auto rec = [&](auto&& self, const Layout& l, const std::string& path) -> void {
        out[l.var] = (l.is_leaf() ? "n" : "b") + side + (path.empty() ? "" : "." + path);
        for (std::size_t i = 0; i < l.children.size(); ++i)
            self(self, l.child(i), path.empty() ? std::to_string(i) : path + "." + std::to_string(i));
    };
    rec(rec, lay, "");
    return out;
}

namespace {

std::string term_str(std::int64_t k, const std::string& name) {
    return k == 1 ? name : std::to_string(k) + "*" + name;
}

std::string sum_str(const std::vector<std::pair<std::int64_t, std::string>>& ts, std::int64_t c) {
    std::string s;
    for (auto& [k, n] : ts) {
        if (!s.empty()) s += " + ";
        s += term_str(k, n);
    }
    if (s.empty()) return std::to_string(c);
    if (c > 0) s += " + " + std::to_string(c);
    if (c < 0) s += " - " + std::to_string(-c);
    return s;
}

std::string var_name(Var v, const std::map<Var, std::string>& names) {
    auto it = names.find(v);
    return it == names.end() ? "x" + std::to_string(v) : it->second;
}

}  // namespace

std::string print_atom(const Atom& raw, const std::map<Var, std::string>& names) {
    Atom a = tighten(raw);
    if (a.e.is_const()) return (a.eq ? a.e.constant() == 0 : a.e.constant() <= 0) ? "true" : "false";
    LinExpr e = a.e;
    if (a.eq) {
        bool flip = e.constant() > 0;
        if (e.constant() == 0) flip = e.terms().front().second < 0;
        if (flip) e = e * -1;
    }
    std::vector<std::pair<std::int64_t, std::string>> pos, neg;
    for (auto& [v, k] : e.terms()) (k > 0 ? pos : neg).push_back({std::abs(k), var_name(v, names)});
    std::int64_t c = e.constant();
    if (a.eq) {
        // pos + c = neg
        if (pos.empty()) return sum_str(neg, 0) + " = " + std::to_string(c);
        return sum_str(pos, 0) + " = " + sum_str(neg, -c);
    }
    // pos + c <= neg
    if (neg.empty()) return sum_str(pos, 0) + " <= " + std::to_string(-c);
    if (pos.empty()) return sum_str(neg, 0) + " > " + std::to_string(c - 1);
    return sum_str(neg, 0) + " > " + sum_str(pos, c - 1);
}

namespace {

std::string print_rec(const Formula& f, std::map<Var, std::string>& names, int& next_bound, bool nested) {
    switch (f.kind()) {
    case Formula::Kind::True: return "true";
    case Formula::Kind::False: return "false";
    case Formula::Kind::Bool: return var_name(f.var(), names) + (f.value() ? " = true" : " = false");
    case Formula::Kind::Lin: return print_atom(f.lin(), names);
    case Formula::Kind::And:
    case Formula::Kind::Or: {
        std::string sep = f.kind() == Formula::Kind::And ? " & " : " \\/ ";
        std::string s;
        for (auto& a : f.args()) {
            if (!s.empty()) s += sep;
            s += print_rec(a, names, next_bound, true);
        }
        return nested ? "(" + s + ")" : s;
    }
    case Formula::Kind::Exists: {
        std::string s = "exists";
        for (Var v : f.bound()) {
            names[v] = "v" + std::to_string(next_bound++);
            s += " " + names[v];
        }
        s += " . " + print_rec(f.body(), names, next_bound, false);
        return nested ? "(" + s + ")" : s;
    }
    }
    return "";
}

}  // namespace

std::string print_formula(const Formula& f, const std::map<Var, std::string>& names) {
    std::map<Var, std::string> copy = names;
    int next = 1;
    return print_rec(f, copy, next, false);
}

}  // namespace copro
