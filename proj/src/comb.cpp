#include "copro/comb.hpp"

#include <set>
#include <sstream>

namespace copro {

namespace {

std::optional<ConstType> arith_result(const ConstType& t) {
    if (t.kind() != ConstType::Kind::Pair) return std::nullopt;
    auto a = t.first().kind(), b = t.second().kind();
    if (a == ConstType::Kind::Nat && b == ConstType::Kind::Nat) return ConstType::nat();
    if (a == ConstType::Kind::Int && b == ConstType::Kind::Int) return ConstType::integer();
    return std::nullopt;
}

std::optional<ConstType> compare_result(const ConstType& t) {
    if (!arith_result(t)) return std::nullopt;
    return ConstType::boolean();
}

std::optional<ConstType> bool2_result(const ConstType& t) {
    if (t.kind() == ConstType::Kind::Pair && t.first().kind() == ConstType::Kind::Bool &&
        t.second().kind() == ConstType::Kind::Bool)
        return ConstType::boolean();
    return std::nullopt;
}

std::optional<ConstType> unary_num(const ConstType& t) {
    if (t.kind() == ConstType::Kind::Nat || t.kind() == ConstType::Kind::Int) return t;
    return std::nullopt;
}

using Arith = std::int64_t (*)(std::int64_t, std::int64_t);

Val arith(const Val& x, Arith op, bool monus) {
    const Val& a = x.first();
    const Val& b = x.second();
    if (a.kind() == Val::Kind::Nat) {
        auto u = static_cast<std::int64_t>(a.as_nat());
        auto v = static_cast<std::int64_t>(b.as_nat());
        std::int64_t r = op(u, v);
        if (monus && r < 0) r = 0;
        return Val::nat(static_cast<std::uint64_t>(r));
    }
    return Val::integer(op(a.as_int(), b.as_int()));
}

std::int64_t num_of(const Val& v) {
    switch (v.kind()) {
    case Val::Kind::Nat: return static_cast<std::int64_t>(v.as_nat());
    case Val::Kind::Int: return v.as_int();
    case Val::Kind::Enum: return v.enum_index();
    case Val::Kind::Bool: return v.as_bool() ? 1 : 0;
    default: throw TypeError("guard needs a numeric constant");
    }
}

std::map<std::string, PrimFn> build_prims() {
    std::map<std::string, PrimFn> m;
    auto add = [&](std::string name, std::function<std::optional<ConstType>(const ConstType&)> r,
                   std::function<Val(const Val&)> run) { m[name] = PrimFn{name, std::move(r), std::move(run)}; };

    add("succ", unary_num, [](const Val& x) {
        return x.kind() == Val::Kind::Nat ? Val::nat(x.as_nat() + 1) : Val::integer(x.as_int() + 1);
    });
    add("pred", unary_num, [](const Val& x) {
        if (x.kind() == Val::Kind::Nat) return Val::nat(x.as_nat() ? x.as_nat() - 1 : 0);
        return Val::integer(x.as_int() - 1);
    });
    add("add", arith_result, [](const Val& x) { return arith(x, [](std::int64_t a, std::int64_t b) { return a + b; }, false); });
    add("sub", arith_result, [](const Val& x) { return arith(x, [](std::int64_t a, std::int64_t b) { return a - b; }, true); });
    add("mul", arith_result, [](const Val& x) { return arith(x, [](std::int64_t a, std::int64_t b) { return a * b; }, false); });
    add("div", arith_result, [](const Val& x) {
        return arith(x, [](std::int64_t a, std::int64_t b) { return b == 0 ? std::int64_t{0} : a / b; }, false);
    });
    add("mod", arith_result, [](const Val& x) {
        return arith(x, [](std::int64_t a, std::int64_t b) { return b == 0 ? a : a % b; }, false);
    });
    add("eq",
        [](const ConstType& t) -> std::optional<ConstType> {
            if (t.kind() == ConstType::Kind::Pair && t.first() == t.second()) return ConstType::boolean();
            return std::nullopt;
        },
        [](const Val& x) { return Val::boolean(const_equal(x.first(), x.second())); });
    add("lt", compare_result, [](const Val& x) { return Val::boolean(num_of(x.first()) < num_of(x.second())); });
    add("and", bool2_result, [](const Val& x) { return Val::boolean(x.first().as_bool() && x.second().as_bool()); });
    add("or", bool2_result, [](const Val& x) { return Val::boolean(x.first().as_bool() || x.second().as_bool()); });
    add("not",
        [](const ConstType& t) -> std::optional<ConstType> {
            if (t.kind() == ConstType::Kind::Bool) return t;
            return std::nullopt;
        },
        [](const Val& x) { return Val::boolean(!x.as_bool()); });
    add("iszero",
        [](const ConstType& t) -> std::optional<ConstType> {
            if (t.kind() == ConstType::Kind::Nat) return ConstType::boolean();
            return std::nullopt;
        },
        [](const Val& x) { return Val::boolean(x.as_nat() == 0); });
    add("fst",
        [](const ConstType& t) -> std::optional<ConstType> {
            if (t.kind() == ConstType::Kind::Pair) return t.first();
            return std::nullopt;
        },
        [](const Val& x) { return x.first(); });
    add("snd",
        [](const ConstType& t) -> std::optional<ConstType> {
            if (t.kind() == ConstType::Kind::Pair) return t.second();
            return std::nullopt;
        },
        [](const Val& x) { return x.second(); });
    add("mkpair",
        [](const ConstType& t) -> std::optional<ConstType> {
            if (t.kind() == ConstType::Kind::Pair) return t;
            return std::nullopt;
        },
        [](const Val& x) { return Val::pair(x.first(), x.second()); });
    add("dup", [](const ConstType& t) -> std::optional<ConstType> { return ConstType::pair(t, t); },
        [](const Val& x) { return Val::pair(x, x); });
    add("swap",
        [](const ConstType& t) -> std::optional<ConstType> {
            if (t.kind() == ConstType::Kind::Pair) return ConstType::pair(t.second(), t.first());
            return std::nullopt;
        },
        [](const Val& x) { return Val::pair(x.second(), x.first()); });
    add("enum-next",
        [](const ConstType& t) -> std::optional<ConstType> {
            if (t.kind() == ConstType::Kind::Enum) return t;
            return std::nullopt;
        },
        [](const Val& x) { return Val::enumeration(x.enum_size(), (x.enum_index() + 1) % x.enum_size()); });
    add("enum-index",
        [](const ConstType& t) -> std::optional<ConstType> {
            if (t.kind() == ConstType::Kind::Enum) return ConstType::nat();
            return std::nullopt;
        },
        [](const Val& x) { return Val::nat(static_cast<std::uint64_t>(x.enum_index())); });
    return m;
}

const std::map<std::string, PrimFn>& prims() {
    static const std::map<std::string, PrimFn> m = build_prims();
    return m;
}

}  // namespace

const PrimFn* find_prim(const std::string& name) {
    auto it = prims().find(name);
    return it == prims().end() ? nullptr : &it->second;
}

std::vector<std::string> prim_names() {
    std::vector<std::string> out;
    for (auto& [k, v] : prims()) out.push_back(k);
    return out;
}

PrimFn literal_prim(const Val& v, const ConstType& t) {
    return PrimFn{"literal " + render_const(v),
                  [t](const ConstType&) -> std::optional<ConstType> { return t; },
                  [v](const Val&) { return v; }};
}

bool Guard::test(const Val& v) const {
    switch (kind) {
    case Kind::Eq: return num_of(v) == k;
    case Kind::Lt: return num_of(v) < k;
    case Kind::Ge: return num_of(v) >= k;
    case Kind::Prim: return find_prim(prim)->run(v).as_bool();
    case Kind::Else: return true;
    }
    return false;
}

std::string Guard::str() const {
    switch (kind) {
    case Kind::Eq: return "(eq " + std::to_string(k) + ")";
    case Kind::Lt: return "(lt " + std::to_string(k) + ")";
    case Kind::Ge: return "(ge " + std::to_string(k) + ")";
    case Kind::Prim: return "(prim " + prim + ")";
    case Kind::Else: return "else";
    }
    return "?";
}

namespace {

const char* kind_name(Comb::Kind k) {
    switch (k) {
    case Comb::Kind::Id: return "id";
    case Comb::Kind::Comp: return "comp";
    case Comb::Kind::Const: return "cconst";
    case Comb::Kind::Fst: return "fst";
    case Comb::Kind::Snd: return "snd";
    case Comb::Kind::PairL: return "pairl";
    case Comb::Kind::PairR: return "pairr";
    case Comb::Kind::Fpair: return "fpair";
    case Comb::Kind::Fproduct: return "fproduct";
    case Comb::Kind::Inl: return "inl";
    case Comb::Kind::Inr: return "inr";
    case Comb::Kind::Fcopair: return "fcopair";
    case Comb::Kind::Fcoproduct: return "fcoproduct";
    case Comb::Kind::Comm: return "comm";
    case Comb::Kind::Assoc: return "assoc";
    case Comb::Kind::Antiassoc: return "antiassoc";
    case Comb::Kind::Cuncurry: return "cuncurry";
    case Comb::Kind::Fmap: return "fmap";
    case Comb::Kind::Cnif: return "cnif";
    case Comb::Kind::If: return "if";
    case Comb::Kind::Ceapp: return "ceapp";
    case Comb::Kind::Cecurry: return "cecurry";
    case Comb::Kind::Cgeapp: return "cgeapp";
    case Comb::Kind::Cgecurry: return "cgecurry";
    case Comb::Kind::Ceswap: return "ceswap";
    case Comb::Kind::Ceproj: return "ceproj";
    case Comb::Kind::Cepair: return "cepair";
    case Comb::Kind::Prim: return "prim";
    case Comb::Kind::Opaque: return "opaque";
    case Comb::Kind::Fold: return "fold";
    case Comb::Kind::Unfold: return "unfold";
    case Comb::Kind::Dtor: return "dtor";
    case Comb::Kind::Call: return "call";
    case Comb::Kind::Adds: return "adds";
    }
    return "?";
}

}  // namespace

std::string Comb::str() const {
    switch (kind) {
    case Kind::Id:
    case Kind::Fst:
    case Kind::Snd:
    case Kind::Comm:
    case Kind::Assoc:
    case Kind::Antiassoc:
    case Kind::Ceapp:
    case Kind::Cepair:
        return kind_name(kind);
    case Kind::Fold:
    case Kind::Dtor:
        return name;
    case Kind::Unfold: return "(unfold " + name + ")";
    case Kind::Call: return name;
    case Kind::Prim: return "(prim " + name + ")";
    case Kind::Adds: return "(adds " + std::to_string(index) + ")";
    case Kind::Const:
    case Kind::Ceproj:
        return std::string("(") + kind_name(kind) + " " + render_const(lit->value) + ")";
    default: break;
    }
    std::string s = std::string("(") + kind_name(kind);
    if (kind == Kind::Cgeapp) s += " " + name;
    for (auto& k : kids) s += " " + k->str();
    return s + ")";
}

CombP mk(Comb c) { return std::make_shared<const Comb>(std::move(c)); }

CombP mk(Comb::Kind k, std::vector<CombP> kids, Loc loc) {
    Comb c;
    c.kind = k;
    c.kids = std::move(kids);
    c.loc = loc;
    return mk(std::move(c));
}

CombP comp(std::vector<CombP> fs, Loc loc) {
    if (fs.empty()) return mk(Comb::Kind::Id, {}, loc);
    CombP acc = fs.back();
    for (std::size_t i = fs.size() - 1; i-- > 0;) acc = mk(Comb::Kind::Comp, {fs[i], acc}, loc);
    return acc;
}

SoCombP mk_so(SoComb s) { return std::make_shared<const SoComb>(std::move(s)); }

std::string Certificate::kind_str() const {
    switch (kind) {
    case Kind::OneProductive: return "one-productive";
    case Kind::OneOverN: return "one-over-" + std::to_string(n);
    case Kind::SecondOrder: return "second-order";
    case Kind::Alias: return "alias";
    }
    return "?";
}

std::string status_str(Status s) {
    switch (s) {
    case Status::Accepted: return "accepted";
    case Status::Rejected: return "rejected";
    case Status::Unknown: return "unknown";
    }
    return "?";
}

// ---- environment

const CotypeDef& Env::add_cotype(const std::string& name, const Stt& stt, std::string ctor,
                                 std::vector<std::string> dtors) {
    if (defined(name)) throw TypeError("name " + name + " is already defined");
    const CotypeDef& def = cotypes.elaborate(name, stt, std::move(ctor), std::move(dtors));
    for (auto& [n, c] : builtin_ctors(def)) {
        if (defined(n)) throw TypeError("constructor or destructor name " + n + " is already defined");
        ctors_[n] = c;
    }
    return def;
}

std::map<std::string, CombP> Env::builtin_ctors(const CotypeDef& def) const {
    std::map<std::string, CombP> out;
    Comb f;
    f.kind = Comb::Kind::Fold;
    f.def = &def;
    f.name = def.ctor_name;
    out[def.ctor_name] = mk(f);
    for (std::size_t i = 0; i < def.positions.size(); ++i) {
        Comb d;
        d.kind = Comb::Kind::Dtor;
        d.def = &def;
        d.index = static_cast<int>(i);
        d.name = def.positions[i].name;
        out[d.name] = mk(d);
    }
    return out;
}

const FunEntry* Env::fun(const std::string& name) const {
    auto it = funs_.find(name);
    return it == funs_.end() ? nullptr : &it->second;
}

const ValEntry* Env::val(const std::string& name) const {
    auto it = vals_.find(name);
    return it == vals_.end() ? nullptr : &it->second;
}

CombP Env::ctor_or_dtor(const std::string& name) const {
    auto it = ctors_.find(name);
    return it == ctors_.end() ? nullptr : it->second;
}

bool Env::defined(const std::string& name) const {
    return funs_.count(name) || vals_.count(name) || ctors_.count(name) || cotypes.find(name);
}

void Env::register_fun(FunEntry e) {
    if (defined(e.name)) throw TypeError("name " + e.name + " is already defined");
    order_.push_back(e.name);
    std::string n = e.name;
    funs_.emplace(n, std::move(e));
}

void Env::register_val(ValEntry e) {
    if (defined(e.name)) throw TypeError("name " + e.name + " is already defined");
    order_.push_back(e.name);
    std::string n = e.name;
    vals_.emplace(n, std::move(e));
}

// ---- typing

namespace {

std::optional<ConstType> as_const(const Ctt& c) {
    if (c.is_leaf()) return ConstType::co(&c.def());
    if (c.is_const()) return *c.spf().type;
    if (c.spf().kind == Spf::Kind::Product) {
        auto a = as_const(c.child(0));
        auto b = as_const(c.child(1));
        if (a && b) return ConstType::pair(*a, *b);
    }
    return std::nullopt;
}

// prims accept constants and products of constants, but not coinductive leaves
std::optional<ConstType> prim_arg(const Ctt& c) {
    if (c.is_leaf()) return std::nullopt;
    if (c.is_const()) return *c.spf().type;
    if (c.spf().kind == Spf::Kind::Product) {
        auto a = prim_arg(c.child(0));
        auto b = prim_arg(c.child(1));
        if (a && b) return ConstType::pair(*a, *b);
    }
    return std::nullopt;
}

bool is_kind(const Ctt& c, Spf::Kind k) { return !c.is_leaf() && c.spf().kind == k; }

[[noreturn]] void fail(const Comb& t, const std::string& msg) { throw CombError(t.loc, std::string(kind_name(t.kind)) + ": " + msg); }

void need(const Comb& t, const Ctt& dom, Spf::Kind k, const char* what) {
    if (!is_kind(dom, k)) fail(t, std::string("expects ") + what + " input, got " + dom.str());
}

CombP expand_adds(const Comb& t, const Ctt& dom) {
    need(t, dom, Spf::Kind::Product, "an (exp nat T) x stream");
    const Ctt& s = dom.child(1);
    if (!s.is_leaf() || !stream_shaped(s.def())) fail(t, "second component must be a stream-shaped cotype");
    Comb fold;
    fold.kind = Comb::Kind::Fold;
    fold.def = &s.def();
    fold.name = s.def().ctor_name;
    fold.loc = t.loc;
    CombP cons = mk(fold);
    CombP fst = mk(Comb::Kind::Fst, {}, t.loc);
    CombP snd = mk(Comb::Kind::Snd, {}, t.loc);
    CombP h = snd;
    for (int k = 0; k < t.index; ++k) {
        Comb proj;
        proj.kind = Comb::Kind::Ceproj;
        proj.lit = Literal{Val::nat(static_cast<std::uint64_t>(k)), Ctt::constant(ConstType::nat())};
        proj.loc = t.loc;
        CombP step = mk(Comb::Kind::Fpair,
                        {fst, comp({cons, mk(Comb::Kind::Fpair, {comp({mk(proj), fst}, t.loc), snd}, t.loc)}, t.loc)},
                        t.loc);
        h = comp({h, step}, t.loc);
    }
    return h;
}

CombP tc(const CombP& tp, const Ctt& dom, const Env& env) {
    const Comb& t = *tp;
    Comb r = t;
    r.dom = dom;
    auto kid = [&](std::size_t i, const Ctt& d) { return tc(t.kids.at(i), d, env); };
    auto done = [&](std::vector<CombP> kids, Ctt cod) {
        r.kids = std::move(kids);
        r.cod = std::move(cod);
        return mk(r);
    };
    using K = Comb::Kind;
    switch (t.kind) {
    case K::Id: return done({}, dom);
    case K::Comp: {
        CombP g = kid(1, dom);
        CombP f = kid(0, *g->cod);
        Ctt cod = *f->cod;
        return done({f, g}, cod);
    }
    case K::Const: return done({}, t.lit->ctt);
    case K::Fst:
        need(t, dom, Spf::Kind::Product, "a product");
        return done({}, dom.child(0));
    case K::Snd:
        need(t, dom, Spf::Kind::Product, "a product");
        return done({}, dom.child(1));
    case K::PairL: return done({}, Ctt::product(t.lit->ctt, dom));
    case K::PairR: return done({}, Ctt::product(dom, t.lit->ctt));
    case K::Fpair: {
        CombP a = kid(0, dom), b = kid(1, dom);
        Ctt cod = Ctt::product(*a->cod, *b->cod);
        return done({a, b}, cod);
    }
    case K::Fproduct: {
        need(t, dom, Spf::Kind::Product, "a product");
        CombP a = kid(0, dom.child(0)), b = kid(1, dom.child(1));
        Ctt cod = Ctt::product(*a->cod, *b->cod);
        return done({a, b}, cod);
    }
    case K::Inl: return done({}, Ctt::sum(dom, *t.other));
    case K::Inr: return done({}, Ctt::sum(*t.other, dom));
    case K::Fcopair: {
        need(t, dom, Spf::Kind::Sum, "a sum");
        CombP a = kid(0, dom.child(0)), b = kid(1, dom.child(1));
        if (*a->cod != *b->cod) fail(t, "branches produce " + a->cod->str() + " and " + b->cod->str());
        Ctt cod = *a->cod;
        return done({a, b}, cod);
    }
    case K::Fcoproduct: {
        need(t, dom, Spf::Kind::Sum, "a sum");
        CombP a = kid(0, dom.child(0)), b = kid(1, dom.child(1));
        Ctt cod = Ctt::sum(*a->cod, *b->cod);
        return done({a, b}, cod);
    }
    case K::Comm:
        need(t, dom, Spf::Kind::Product, "a product");
        return done({}, Ctt::product(dom.child(1), dom.child(0)));
    case K::Assoc:
        need(t, dom, Spf::Kind::Product, "a product");
        if (!is_kind(dom.child(0), Spf::Kind::Product)) fail(t, "expects ((A x B) x C), got " + dom.str());
        return done({}, Ctt::product(dom.child(0).child(0), Ctt::product(dom.child(0).child(1), dom.child(1))));
    case K::Antiassoc:
        need(t, dom, Spf::Kind::Product, "a product");
        if (!is_kind(dom.child(1), Spf::Kind::Product)) fail(t, "expects (A x (B x C)), got " + dom.str());
        return done({}, Ctt::product(Ctt::product(dom.child(0), dom.child(1).child(0)), dom.child(1).child(1)));
    case K::Cuncurry: {
        need(t, dom, Spf::Kind::Product, "a product");
        CombP h = kid(0, dom);
        Ctt cod = *h->cod;
        return done({h}, cod);
    }
    case K::Fmap: {
        if (t.spf->arity() != 1) fail(t, "functor " + t.spf->str() + " is not unary");
        if (dom.is_leaf() || dom.spf() != *t.spf) fail(t, "expects " + t.spf->str() + " input, got " + dom.str());
        CombP f = kid(0, dom.child(0));
        Ctt cod = Ctt::node(*t.spf, {*f->cod});
        return done({f}, cod);
    }
    case K::Cnif: {
        need(t, dom, Spf::Kind::Product, "a (const A) x C");
        if (!dom.child(0).is_const()) fail(t, "guard component must be a constant, got " + dom.child(0).str());
        r.type = *dom.child(0).spf().type;
        CombP a = kid(0, dom.child(1)), b = kid(1, dom.child(1));
        if (*a->cod != *b->cod) fail(t, "branches produce " + a->cod->str() + " and " + b->cod->str());
        Ctt cod = *a->cod;
        return done({a, b}, cod);
    }
    case K::If: {
        CombP a = kid(0, dom), b = kid(1, dom);
        if (*a->cod != *b->cod) fail(t, "branches produce " + a->cod->str() + " and " + b->cod->str());
        Ctt cod = *a->cod;
        return done({a, b}, cod);
    }
    case K::Ceapp: {
        need(t, dom, Spf::Kind::Product, "an (exp A C) x (const A)");
        const Ctt& fn = dom.child(0);
        if (!is_kind(fn, Spf::Kind::Exp) || !dom.child(1).is_const() || *dom.child(1).spf().type != *fn.spf().type)
            fail(t, "expects (prod (exp A C) (const A)), got " + dom.str());
        return done({}, fn.child(0));
    }
    case K::Cecurry: {
        CombP f = kid(0, Ctt::product(dom, Ctt::constant(*t.type)));
        Ctt cod = Ctt::exp(*t.type, *f->cod);
        return done({f}, cod);
    }
    case K::Cgeapp: {
        need(t, dom, Spf::Kind::Product, "an (exp A2 C) x (const A1)");
        const Ctt& fn = dom.child(0);
        if (!is_kind(fn, Spf::Kind::Exp) || !dom.child(1).is_const())
            fail(t, "expects (prod (exp A2 C) (const A1)), got " + dom.str());
        auto out = t.prim->result(*dom.child(1).spf().type);
        if (!out || *out != *fn.spf().type)
            fail(t, "function " + t.prim->name + " does not map " + dom.child(1).spf().type->str() + " to " +
                        fn.spf().type->str());
        return done({}, fn.child(0));
    }
    case K::Cgecurry: {
        Ctt a = Ctt::constant(*t.type);
        CombP f = kid(0, Ctt::product(a, Ctt::product(dom, a)));
        Ctt cod = Ctt::exp(*t.type, *f->cod);
        return done({f}, cod);
    }
    case K::Ceswap: {
        std::vector<CombP> ks;
        for (std::size_t i = 0; i < t.kids.size(); ++i) {
            ks.push_back(kid(i, dom));
            if (*ks.back()->cod != *ks.front()->cod)
                fail(t, "cases produce " + ks.front()->cod->str() + " and " + ks.back()->cod->str());
        }
        if (ks.empty()) fail(t, "needs at least one case");
        Ctt cod = Ctt::exp(*t.type, *ks.front()->cod);
        return done(std::move(ks), cod);
    }
    case K::Ceproj: {
        need(t, dom, Spf::Kind::Exp, "an exponent");
        if (!const_has_type(t.lit->value, *dom.spf().type))
            fail(t, "index " + render_const(t.lit->value) + " is not in " + dom.spf().type->str());
        return done({}, dom.child(0));
    }
    case K::Cepair: {
        need(t, dom, Spf::Kind::Product, "a pair of exponents");
        const Ctt& a = dom.child(0);
        const Ctt& b = dom.child(1);
        if (!is_kind(a, Spf::Kind::Exp) || !is_kind(b, Spf::Kind::Exp) || *a.spf().type != *b.spf().type)
            fail(t, "expects (prod (exp A C1) (exp A C2)), got " + dom.str());
        return done({}, Ctt::exp(*a.spf().type, Ctt::product(a.child(0), b.child(0))));
    }
    case K::Prim: {
        auto arg = prim_arg(dom);
        if (!arg) fail(t, t.prim->name + " needs a constant input, got " + dom.str());
        auto out = t.prim->result(*arg);
        if (!out) fail(t, t.prim->name + " does not accept " + arg->str());
        return done({}, Ctt::constant(*out));
    }
    case K::Opaque: {
        if (!dom.is_const()) fail(t, "lifted functions take a constant input, got " + dom.str());
        const ConstType& a = *dom.spf().type;
        Ctt inner = a.kind() == ConstType::Kind::Co ? Ctt::leaf(a.co_def()) : dom;
        CombP f = kid(0, inner);
        auto out = as_const(*f->cod);
        if (!out) fail(t, "result " + f->cod->str() + " cannot be lifted to a constant");
        return done({f}, Ctt::constant(*out));
    }
    case K::Fold:
        if (dom != t.def->self_ctt) fail(t, t.name + " expects " + t.def->self_ctt.str() + ", got " + dom.str());
        return done({}, t.def->ident_ctt);
    case K::Unfold:
        if (dom != t.def->ident_ctt) fail(t, "expects " + t.def->name + ", got " + dom.str());
        return done({}, t.def->self_ctt);
    case K::Dtor:
        if (dom != t.def->ident_ctt) fail(t, t.name + " expects " + t.def->name + ", got " + dom.str());
        return done({}, t.def->positions.at(t.index).ctt);
    case K::Call: {
        const FunEntry* e = env.fun(t.name);
        if (!e) fail(t, "unknown function " + t.name);
        if (e->dom != dom) fail(t, t.name + " expects " + e->dom.str() + ", got " + dom.str());
        return done({}, e->cod);
    }
    case K::Adds: return tc(expand_adds(t, dom), dom, env);
    }
    fail(t, "unhandled combinator");
}

}  // namespace

CombP typecheck(const CombP& t, const Ctt& dom, const Env& env) { return tc(t, dom, env); }

std::optional<Ctt> infer_dom(const CombP& tp, const Env& env) {
    const Comb& t = *tp;
    using K = Comb::Kind;
    switch (t.kind) {
    case K::Comp: return infer_dom(t.kids[1], env);
    case K::Fpair:
    case K::If: {
        for (auto& k : t.kids)
            if (auto d = infer_dom(k, env)) return d;
        return std::nullopt;
    }
    case K::Ceswap:
        for (auto& k : t.kids)
            if (auto d = infer_dom(k, env)) return d;
        return std::nullopt;
    case K::Fproduct: {
        auto a = infer_dom(t.kids[0], env), b = infer_dom(t.kids[1], env);
        if (a && b) return Ctt::product(*a, *b);
        return std::nullopt;
    }
    case K::Fcopair:
    case K::Fcoproduct: {
        auto a = infer_dom(t.kids[0], env), b = infer_dom(t.kids[1], env);
        if (a && b) return Ctt::sum(*a, *b);
        return std::nullopt;
    }
    case K::Fmap: {
        auto a = infer_dom(t.kids[0], env);
        if (a) return Ctt::node(*t.spf, {*a});
        return std::nullopt;
    }
    case K::Cuncurry: return infer_dom(t.kids[0], env);
    case K::Fold: return t.def->self_ctt;
    case K::Unfold:
    case K::Dtor: return t.def->ident_ctt;
    case K::Call:
        if (auto* e = env.fun(t.name)) return e->dom;
        return std::nullopt;
    default: return std::nullopt;
    }
}

// ---- evaluation

namespace {

// a value of leaf type whose first layer is computed on demand
Val delay(const CotypeDef& def, std::function<Val()> thunk, const std::string& site) {
    return Val::co(CoVal::make(&def, [thunk = std::move(thunk)]() { return thunk().as_co()->force(); }, site));
}

Val::Fun guard_leaf(const Ctt& cod, Val::Fun f, const std::string& site) {
    if (!cod.is_leaf()) return f;
    const CotypeDef* def = &cod.def();
    return [def, f = std::move(f), site](const Val& x) { return delay(*def, [f, x]() { return f(x); }, site); };
}

Val follow(const Ctt& c, const Val& v, const std::vector<int>& path, std::size_t i) {
    if (i == path.size()) return v;
    return follow(c.child(path[i]), path[i] == 0 ? v.first() : v.second(), path, i + 1);
}

Val::Fun ev(const CombP& tp, const Env& env, const std::string& site) {
    const Comb& t = *tp;
    if (!t.cod) throw CombError(t.loc, "combinator evaluated before typechecking");
    using K = Comb::Kind;
    auto sub = [&](std::size_t i) { return ev(t.kids.at(i), env, site); };
    Val::Fun f;
    switch (t.kind) {
    case K::Id: return [](const Val& x) { return x; };
    case K::Comp: {
        auto a = sub(0), b = sub(1);
        f = [a, b](const Val& x) { return a(b(x)); };
        break;
    }
    case K::Const: {
        Val v = t.lit->value;
        return [v](const Val&) { return v; };
    }
    case K::Fst: f = [](const Val& x) { return x.first(); }; break;
    case K::Snd: f = [](const Val& x) { return x.second(); }; break;
    case K::PairL: {
        Val v = t.lit->value;
        return [v](const Val& x) { return Val::pair(v, x); };
    }
    case K::PairR: {
        Val v = t.lit->value;
        return [v](const Val& x) { return Val::pair(x, v); };
    }
    case K::Fpair: {
        auto a = sub(0), b = sub(1);
        return [a, b](const Val& x) { return Val::pair(a(x), b(x)); };
    }
    case K::Fproduct: {
        auto a = sub(0), b = sub(1);
        return [a, b](const Val& x) { return Val::pair(a(x.first()), b(x.second())); };
    }
    case K::Inl: return [](const Val& x) { return Val::inl(x); };
    case K::Inr: return [](const Val& x) { return Val::inr(x); };
    case K::Fcopair: {
        auto a = sub(0), b = sub(1);
        f = [a, b](const Val& x) { return x.kind() == Val::Kind::Inl ? a(x.payload()) : b(x.payload()); };
        break;
    }
    case K::Fcoproduct: {
        auto a = sub(0), b = sub(1);
        return [a, b](const Val& x) {
            return x.kind() == Val::Kind::Inl ? Val::inl(a(x.payload())) : Val::inr(b(x.payload()));
        };
    }
    case K::Comm: return [](const Val& x) { return Val::pair(x.second(), x.first()); };
    case K::Assoc:
        return [](const Val& x) { return Val::pair(x.first().first(), Val::pair(x.first().second(), x.second())); };
    case K::Antiassoc:
        return [](const Val& x) { return Val::pair(Val::pair(x.first(), x.second().first()), x.second().second()); };
    case K::Cuncurry: f = sub(0); break;
    case K::Fmap: {
        auto a = sub(0);
        switch (t.spf->kind) {
        case Spf::Kind::IdF: f = a; break;
        case Spf::Kind::ListF:
            return [a](const Val& x) {
                std::vector<Val> out;
                for (auto& v : x.items()) out.push_back(a(v));
                return Val::list(std::move(out));
            };
        case Spf::Kind::Exp:
            return [a](const Val& x) { return Val::fn([a, x](const Val& i) { return a(x.apply(i)); }); };
        default: throw CombError(t.loc, "fmap over " + t.spf->str());
        }
        break;
    }
    case K::Cnif: {
        auto a = sub(0), b = sub(1);
        Guard g = t.guards.at(0);
        f = [a, b, g](const Val& x) { return g.test(x.first()) ? a(x.second()) : b(x.second()); };
        break;
    }
    case K::If: f = t.flag ? sub(0) : sub(1); break;
    case K::Ceapp: f = [](const Val& x) { return x.first().apply(x.second()); }; break;
    case K::Cecurry: {
        auto a = sub(0);
        return [a](const Val& x) { return Val::fn([a, x](const Val& i) { return a(Val::pair(x, i)); }); };
    }
    case K::Cgeapp: {
        auto g = t.prim->run;
        f = [g](const Val& x) { return x.first().apply(g(x.second())); };
        break;
    }
    case K::Cgecurry: {
        auto a = sub(0);
        return [a](const Val& x) {
            return Val::fn([a, x](const Val& i) { return a(Val::pair(i, Val::pair(x, i))); });
        };
    }
    case K::Ceswap: {
        std::vector<Val::Fun> fs;
        for (std::size_t i = 0; i < t.kids.size(); ++i) fs.push_back(sub(i));
        auto guards = t.guards;
        Loc loc = t.loc;
        return [fs, guards, loc](const Val& x) {
            return Val::fn([fs, guards, loc, x](const Val& i) -> Val {
                for (std::size_t k = 0; k < fs.size(); ++k)
                    if (guards[k].test(i)) return fs[k](x);
                throw CombError(loc, "ceswap: no case matches " + render_const(i));
            });
        };
    }
    case K::Ceproj: {
        Val a = t.lit->value;
        f = [a](const Val& x) { return x.apply(a); };
        break;
    }
    case K::Cepair:
        return [](const Val& x) {
            return Val::fn([x](const Val& i) { return Val::pair(x.first().apply(i), x.second().apply(i)); });
        };
    case K::Prim: return t.prim->run;
    case K::Opaque: return sub(0);
    case K::Fold: {
        const CotypeDef* def = t.def;
        return [def](const Val& x) { return fold(*def, x); };
    }
    case K::Unfold: return [](const Val& x) { return unfold(x.as_co()); };
    case K::Dtor: {
        const CotypeDef* def = t.def;
        std::vector<int> path = def->positions.at(t.index).path;
        f = [def, path](const Val& x) { return follow(def->self_ctt, unfold(x.as_co()), path, 0); };
        break;
    }
    case K::Call: {
        const FunEntry* e = env.fun(t.name);
        if (!e || !e->built) throw CombError(t.loc, "function " + t.name + " has no value");
        Val fn = e->fn;
        std::string name = t.name;
        f = [fn, name](const Val& x) {
            charge_fuel(name);
            return fn.apply(x);
        };
        break;
    }
    case K::Adds: throw CombError(t.loc, "adds must be expanded by typecheck");
    }
    return guard_leaf(*t.cod, std::move(f), site);
}

}  // namespace

Val::Fun evaluate(const CombP& typed, const Env& env) { return ev(typed, env, "expression"); }

// ---- derivation

Productivity derive(const CombP& tp, const Env& env) {
    const Comb& t = *tp;
    if (!t.cod) throw CombError(t.loc, "combinator derived before typechecking");
    const Ctt& dom = *t.dom;
    const Ctt& cod = *t.cod;
    auto sub = [&](std::size_t i) { return derive(t.kids.at(i), env); };
    using K = Comb::Kind;
    switch (t.kind) {
    case K::Id: return rel_ident(dom);
    case K::Comp: return rel_compose(sub(1), sub(0));
    case K::Const: return prod_empty(dom, cod);
    case K::Fst: return rel_fst(dom);
    case K::Snd: return rel_snd(dom);
    case K::PairL: return rel_pair_l(t.lit->ctt, dom);
    case K::PairR: return rel_pair_r(dom, t.lit->ctt);
    case K::Fpair: return rel_fpair(sub(0), sub(1));
    case K::Fproduct: return rel_fproduct(sub(0), sub(1));
    case K::Inl: return rel_inl(dom, *t.other);
    case K::Inr: return rel_inr(*t.other, dom);
    case K::Fcopair: return rel_fcopair(sub(0), sub(1));
    case K::Fcoproduct: return rel_fcoproduct(sub(0), sub(1));
    case K::Comm: return rel_comm(dom);
    case K::Assoc: return rel_assoc(dom);
    case K::Antiassoc: return rel_antiassoc(dom);
    case K::Cuncurry: return rel_uncurry(rel_curry(sub(0)), dom.child(0));
    case K::Fmap: return rel_fmap(*t.spf, sub(0));
    case K::Cnif: return rel_cnif(*t.type, sub(0), sub(1));
    case K::If: return rel_if(t.flag, sub(0), sub(1));
    case K::Ceapp: return rel_ceapp(dom);
    case K::Cecurry: return rel_cecurry(sub(0));
    case K::Cgeapp: return rel_cgeapp(dom);
    case K::Cgecurry: return rel_cgecurry(sub(0));
    case K::Ceswap: {
        std::vector<Productivity> ps;
        for (std::size_t i = 0; i < t.kids.size(); ++i) ps.push_back(sub(i));
        return rel_ceswap(*t.type, ps);
    }
    case K::Ceproj: return rel_ceproj(dom);
    case K::Cepair: return rel_cepair(dom);
    case K::Prim:
    case K::Opaque: return prod_trivial(dom, cod);
    case K::Fold: return rel_ctor(*t.def);
    case K::Unfold: return rel_dtor(*t.def, Position{{}, t.def->self_ctt, "unfold"});
    case K::Dtor: return rel_dtor(*t.def, t.def->positions.at(t.index));
    case K::Call: {
        const FunEntry* e = env.fun(t.name);
        if (!e) throw CombError(t.loc, "unknown function " + t.name);
        return e->prod;
    }
    case K::Adds: throw CombError(t.loc, "adds must be expanded by typecheck");
    }
    throw CombError(t.loc, "unhandled combinator");
}

// ---- second order

namespace {

const char* so_name(SoComb::Kind k) {
    switch (k) {
    case SoComb::Kind::Lift: return "lift";
    case SoComb::Kind::SfSelf: return "sfself";
    case SoComb::Kind::SoComp: return "so-comp";
    case SoComb::Kind::SoFpair: return "so-fpair";
    case SoComb::Kind::SoFproduct: return "so-fproduct";
    case SoComb::Kind::SoFcopair: return "so-fcopair";
    case SoComb::Kind::SoFcoproduct: return "so-fcoproduct";
    case SoComb::Kind::SfMap: return "sfmap";
    case SoComb::Kind::SfEcurry: return "sfecurry";
    }
    return "?";
}

[[noreturn]] void so_fail(const SoComb& t, const std::string& msg) {
    throw CombError(t.loc, std::string(so_name(t.kind)) + ": " + msg);
}

// { (l, Some(l')) | q(l, l' tt) } over a unary functor
Productivity lift_some(const Spf& spf, const Productivity& q) {
    return make_prod(q.dom, Ctt::node(spf, {q.cod}), [&](const Layout& in, const Layout& out) {
        return Formula::boolean(out.var, true) && q.at(in, out.child(0));
    });
}

// the pairing rule's shape read over a sum codomain
Productivity pair_into_sum(const Productivity& q1, const Productivity& q2) {
    return make_prod(q1.dom, Ctt::sum(q1.cod, q2.cod), [&](const Layout& in, const Layout& out) {
        return Formula::boolean(out.var, true) && (q1.at(in, out.child(0)) || q2.at(in, out.child(1)));
    });
}

}  // namespace

SoCombP so_typecheck(const SoCombP& tp, const Ctt& c1, const Ctt& c2, const Ctt& dom, const Env& env) {
    const SoComb& t = *tp;
    SoComb r = t;
    r.dom = dom;
    auto kid = [&](std::size_t i, const Ctt& d) { return so_typecheck(t.kids.at(i), c1, c2, d, env); };
    auto done = [&](std::vector<SoCombP> kids, Ctt cod) {
        r.kids = std::move(kids);
        r.cod = std::move(cod);
        return mk_so(r);
    };
    using K = SoComb::Kind;
    switch (t.kind) {
    case K::Lift: {
        r.lifted = typecheck(t.lifted, dom, env);
        Ctt cod = *r.lifted->cod;
        return done({}, cod);
    }
    case K::SfSelf:
        if (dom != c1) so_fail(t, "self expects " + c1.str() + ", got " + dom.str());
        return done({}, c2);
    case K::SoComp: {
        SoCombP b = kid(1, dom);
        SoCombP a = kid(0, *b->cod);
        Ctt cod = *a->cod;
        return done({a, b}, cod);
    }
    case K::SoFpair: {
        SoCombP a = kid(0, dom), b = kid(1, dom);
        Ctt cod = Ctt::product(*a->cod, *b->cod);
        return done({a, b}, cod);
    }
    case K::SoFproduct: {
        if (!is_kind(dom, Spf::Kind::Product)) so_fail(t, "expects a product input, got " + dom.str());
        SoCombP a = kid(0, dom.child(0)), b = kid(1, dom.child(1));
        Ctt cod = Ctt::product(*a->cod, *b->cod);
        return done({a, b}, cod);
    }
    case K::SoFcopair: {
        if (!is_kind(dom, Spf::Kind::Sum)) so_fail(t, "expects a sum input, got " + dom.str());
        SoCombP a = kid(0, dom.child(0)), b = kid(1, dom.child(1));
        if (*a->cod != *b->cod) so_fail(t, "branches produce " + a->cod->str() + " and " + b->cod->str());
        Ctt cod = *a->cod;
        return done({a, b}, cod);
    }
    case K::SoFcoproduct: {
        if (!is_kind(dom, Spf::Kind::Sum)) so_fail(t, "expects a sum input, got " + dom.str());
        SoCombP a = kid(0, dom.child(0)), b = kid(1, dom.child(1));
        Ctt cod = Ctt::sum(*a->cod, *b->cod);
        return done({a, b}, cod);
    }
    case K::SfMap: {
        if (t.spf->arity() != 1) so_fail(t, "functor " + t.spf->str() + " is not unary");
        if (dom.is_leaf() || dom.spf() != *t.spf) so_fail(t, "expects " + t.spf->str() + " input, got " + dom.str());
        SoCombP a = kid(0, dom.child(0));
        Ctt cod = Ctt::node(*t.spf, {*a->cod});
        return done({a}, cod);
    }
    case K::SfEcurry: {
        SoCombP a = kid(0, Ctt::product(dom, Ctt::constant(*t.type)));
        Ctt cod = Ctt::exp(*t.type, *a->cod);
        return done({a}, cod);
    }
    }
    so_fail(t, "unhandled combinator");
}

namespace {

using SoFun = std::function<Val::Fun(const Val&)>;

SoFun so_ev(const SoCombP& tp, const Env& env, const std::string& site) {
    const SoComb& t = *tp;
    if (!t.cod) throw CombError(t.loc, "second-order combinator evaluated before typechecking");
    auto sub = [&](std::size_t i) { return so_ev(t.kids.at(i), env, site); };
    Ctt cod = *t.cod;
    using K = SoComb::Kind;
    switch (t.kind) {
    case K::Lift: {
        Val::Fun h = ev(t.lifted, env, site);
        return [h](const Val&) { return h; };
    }
    case K::SfSelf:
        return [cod, site](const Val& self) {
            return guard_leaf(cod, [self, site](const Val& x) {
                charge_fuel(site);
                return self.apply(x);
            }, site);
        };
    case K::SoComp: {
        auto a = sub(0), b = sub(1);
        return [a, b, cod, site](const Val& self) {
            auto fa = a(self), fb = b(self);
            return guard_leaf(cod, [fa, fb](const Val& x) { return fa(fb(x)); }, site);
        };
    }
    case K::SoFpair: {
        auto a = sub(0), b = sub(1);
        return [a, b](const Val& self) -> Val::Fun {
            auto fa = a(self), fb = b(self);
            return [fa, fb](const Val& x) { return Val::pair(fa(x), fb(x)); };
        };
    }
    case K::SoFproduct: {
        auto a = sub(0), b = sub(1);
        return [a, b](const Val& self) -> Val::Fun {
            auto fa = a(self), fb = b(self);
            return [fa, fb](const Val& x) { return Val::pair(fa(x.first()), fb(x.second())); };
        };
    }
    case K::SoFcopair: {
        auto a = sub(0), b = sub(1);
        return [a, b, cod, site](const Val& self) {
            auto fa = a(self), fb = b(self);
            return guard_leaf(cod, [fa, fb](const Val& x) {
                return x.kind() == Val::Kind::Inl ? fa(x.payload()) : fb(x.payload());
            }, site);
        };
    }
    case K::SoFcoproduct: {
        auto a = sub(0), b = sub(1);
        return [a, b](const Val& self) -> Val::Fun {
            auto fa = a(self), fb = b(self);
            return [fa, fb](const Val& x) {
                return x.kind() == Val::Kind::Inl ? Val::inl(fa(x.payload())) : Val::inr(fb(x.payload()));
            };
        };
    }
    case K::SfMap: {
        auto a = sub(0);
        Spf spf = *t.spf;
        return [a, spf, cod, site](const Val& self) -> Val::Fun {
            auto fa = a(self);
            switch (spf.kind) {
            case Spf::Kind::IdF: return fa;
            case Spf::Kind::ListF:
                return [fa](const Val& x) {
                    std::vector<Val> out;
                    for (auto& v : x.items()) out.push_back(fa(v));
                    return Val::list(std::move(out));
                };
            default:
                return [fa](const Val& x) { return Val::fn([fa, x](const Val& i) { return fa(x.apply(i)); }); };
            }
        };
    }
    case K::SfEcurry: {
        auto a = sub(0);
        return [a](const Val& self) -> Val::Fun {
            auto fa = a(self);
            return [fa](const Val& x) { return Val::fn([fa, x](const Val& i) { return fa(Val::pair(x, i)); }); };
        };
    }
    }
    throw CombError(t.loc, "unhandled combinator");
}

}  // namespace

std::function<Val::Fun(const Val&)> so_evaluate(const SoCombP& typed, const Env& env) {
    return so_ev(typed, env, "expression");
}

std::pair<Productivity, Productivity> so_derive(const SoCombP& tp, const Productivity& p0, const Env& env) {
    const SoComb& t = *tp;
    if (!t.cod) throw CombError(t.loc, "second-order combinator derived before typechecking");
    auto sub = [&](std::size_t i) { return so_derive(t.kids.at(i), p0, env); };
    using K = SoComb::Kind;
    switch (t.kind) {
    case K::Lift: {
        Productivity p = derive(t.lifted, env);
        return {p, prod_empty(p0.cod, p.cod)};
    }
    case K::SfSelf:
        if (p0.dom != *t.dom || p0.cod != *t.cod) so_fail(t, "expected productivity does not match the self type");
        return {p0, rel_ident(p0.cod)};
    case K::SoComp: {
        auto [p2, q2] = sub(0);
        auto [p1, q1] = sub(1);
        return {rel_compose(p1, p2), rel_union(rel_compose(q1, p2), q2)};
    }
    case K::SoFpair: {
        auto [p1, q1] = sub(0);
        auto [p2, q2] = sub(1);
        return {rel_fpair(p1, p2), rel_fpair(q1, q2)};
    }
    case K::SoFproduct: {
        auto [p1, q1] = sub(0);
        auto [p2, q2] = sub(1);
        return {rel_fproduct(p1, p2), rel_fpair(q1, q2)};
    }
    case K::SoFcopair: {
        auto [p1, q1] = sub(0);
        auto [p2, q2] = sub(1);
        return {rel_fcopair(p1, p2), rel_union(q1, q2)};
    }
    case K::SoFcoproduct: {
        auto [p1, q1] = sub(0);
        auto [p2, q2] = sub(1);
        return {rel_fcoproduct(p1, p2), pair_into_sum(q1, q2)};
    }
    case K::SfMap: {
        auto [p, q] = sub(0);
        return {rel_fmap(*t.spf, p), lift_some(*t.spf, q)};
    }
    case K::SfEcurry: {
        auto [p, q] = sub(0);
        return {rel_cecurry(p), lift_some(Spf::exp(*t.type), q)};
    }
    }
    so_fail(t, "unhandled combinator");
}

// ---- nonemptiness

namespace {

bool inhabited_rec(const Ctt& c, std::set<std::string>& assumed);

bool const_inhabited(const ConstType& t, std::set<std::string>& assumed) {
    switch (t.kind()) {
    case ConstType::Kind::Enum: return t.enum_size() > 0;
    case ConstType::Kind::Pair: return const_inhabited(t.first(), assumed) && const_inhabited(t.second(), assumed);
    case ConstType::Kind::Co: return inhabited_rec(t.co_def()->ident_ctt, assumed);
    default: return true;
    }
}

// greatest fixed point: a cotype under inspection is assumed inhabited
bool inhabited_rec(const Ctt& c, std::set<std::string>& assumed) {
    if (c.is_leaf()) {
        if (assumed.count(c.cotype())) return true;
        assumed.insert(c.cotype());
        bool r = inhabited_rec(c.def().self_ctt, assumed);
        assumed.erase(c.cotype());
        return r;
    }
    switch (c.spf().kind) {
    case Spf::Kind::Product: return inhabited_rec(c.child(0), assumed) && inhabited_rec(c.child(1), assumed);
    case Spf::Kind::Sum: return inhabited_rec(c.child(0), assumed) || inhabited_rec(c.child(1), assumed);
    case Spf::Kind::ListF: return true;
    case Spf::Kind::Exp: return !const_inhabited(*c.spf().type, assumed) || inhabited_rec(c.child(0), assumed);
    case Spf::Kind::ConstF: return const_inhabited(*c.spf().type, assumed);
    case Spf::Kind::IdF: return inhabited_rec(c.child(0), assumed);
    }
    return false;
}

Status status_of(const std::vector<Verdict>& vs) {
    bool unknown = false;
    for (auto& v : vs) {
        if (v.kind == Verdict::Kind::Counterexample) return Status::Rejected;
        if (v.kind == Verdict::Kind::Unknown) unknown = true;
    }
    return unknown ? Status::Unknown : Status::Accepted;
}

}  // namespace

bool inhabited(const Ctt& c) {
    std::set<std::string> assumed;
    return inhabited_rec(c, assumed);
}

// ---- fixed points

FixOutcome define_fix_first_order(Env& env, const std::string& name, const Ctt& c, const CombP& f) {
    if (env.defined(name)) throw CombError(f->loc, "name " + name + " is already defined");
    CombP typed = typecheck(f, c, env);
    if (*typed->cod != c) throw CombError(f->loc, "generator of " + name + " produces " + typed->cod->str() + ", not " + c.str());
    if (!inhabited(c)) throw CombError(f->loc, "type " + c.str() + " of " + name + " is empty");

    FixOutcome out;
    Productivity p = derive(typed, env);
    Productivity pp = rel_prune(p);
    out.simplified = simplify_for_display(p);
    out.cert.derived = p;

    Verdict first = check_one_productive(pp, env.opts.bound);
    first.simplified = out.simplified;
    out.verdict = first;
    out.cert.obligations.push_back({"p <= uz(1)", first});
    if (first.proved()) {
        out.cert.kind = Certificate::Kind::OneProductive;
        out.status = Status::Accepted;
    } else {
        out.status = first.kind == Verdict::Kind::Counterexample ? Status::Rejected : Status::Unknown;
        out.failed = "p <= uz(1)";
        for (int n = 2; n <= env.opts.n_max; ++n) {
            Verdict v = check_one_productive(rel_prune(rel_power(pp, n)), env.opts.bound);
            if (v.proved()) {
                out.cert.kind = Certificate::Kind::OneOverN;
                out.cert.n = n;
                out.cert.obligations.push_back({"p^" + std::to_string(n) + " <= uz(1)", v});
                v.simplified = out.simplified;
                out.verdict = v;
                out.status = Status::Accepted;
                out.failed.clear();
                break;
            }
        }
    }

    ValEntry e;
    e.name = name;
    e.ctt = c;
    e.cert = out.cert;
    e.status = out.status;
    e.generator = typed;
    if (out.status == Status::Accepted || env.opts.build_unchecked) {
        Val::Fun gen = ev(typed, env, name);
        e.value = fix_value(c, gen, name);
        e.built = true;
    }
    out.built = e.built;
    env.register_val(std::move(e));
    return out;
}

FixOutcome define_fix_second_order(Env& env, const std::string& name, const Ctt& c1, const Ctt& c2,
                                   const SoCombP& f, const Productivity& expected) {
    if (env.defined(name)) throw CombError(f->loc, "name " + name + " is already defined");
    if (expected.dom != c1 || expected.cod != c2)
        throw CombError(f->loc, "expected productivity of " + name + " is over " + expected.dom.str() + " -> " +
                                    expected.cod.str() + ", not " + c1.str() + " -> " + c2.str());
    SoCombP typed = so_typecheck(f, c1, c2, c1, env);
    if (*typed->cod != c2)
        throw CombError(f->loc, "generator of " + name + " produces " + typed->cod->str() + ", not " + c2.str());
    if (inhabited(c1) && !inhabited(c2)) throw CombError(f->loc, "function space of " + name + " is empty");

    FixOutcome out;
    auto [p2, q] = so_derive(typed, expected, env);
    out.simplified = simplify_for_display(p2);
    out.cert.kind = Certificate::Kind::SecondOrder;
    out.cert.derived = p2;
    out.cert.expected = expected;

    Verdict o1 = subset(rel_prune(p2), expected, env.opts.bound);
    o1.simplified = out.simplified;
    Verdict o2 = subset(rel_prune(q), prod_uz(1, c2, c2), env.opts.bound);
    AscResult asc = asc_check(c2);
    out.cert.asc = asc.justification;
    out.cert.obligations.push_back({"p <= expected", o1});
    out.cert.obligations.push_back({"q <= uz(1)", o2});
    out.status = status_of({o1, o2});
    out.verdict = o1;
    if (!o1.proved()) {
        out.failed = "p <= expected";
    } else if (!o2.proved()) {
        out.failed = "q <= uz(1)";
        out.verdict = o2;
    }

    FunEntry e;
    e.name = name;
    e.dom = c1;
    e.cod = c2;
    e.prod = expected;
    e.cert = out.cert;
    e.status = out.status;
    if (out.status == Status::Accepted || env.opts.build_unchecked) {
        SoFun gen = so_ev(typed, env, name);
        Val cell = Val::knot([gen](const Val& self) { return Val::fn(gen(self), false); }, name);
        e.fn = Val::fn([cell](const Val& x) { return cell.apply(x); });
        e.built = true;
    }
    e.so_generator = typed;
    out.built = e.built;
    env.register_fun(std::move(e));
    return out;
}

FixOutcome define_alias(Env& env, const std::string& name, const CombP& f, const Ctt& dom,
                        const std::optional<Productivity>& expected) {
    if (env.defined(name)) throw CombError(f->loc, "name " + name + " is already defined");
    CombP typed = typecheck(f, dom, env);
    FixOutcome out;
    Productivity p = derive(typed, env);
    out.simplified = simplify_for_display(p);
    out.cert.kind = Certificate::Kind::Alias;
    out.cert.derived = p;
    FunEntry e;
    e.name = name;
    e.dom = dom;
    e.cod = *typed->cod;
    e.prod = p;
    if (expected) {
        if (expected->dom != dom || expected->cod != e.cod)
            throw CombError(f->loc, "expected productivity of " + name + " is over " + expected->dom.str() + " -> " +
                                        expected->cod.str() + ", not " + dom.str() + " -> " + e.cod.str());
        out.cert.expected = expected;
        Verdict v = subset(rel_prune(p), *expected, env.opts.bound);
        v.simplified = out.simplified;
        out.verdict = v;
        out.cert.obligations.push_back({"p <= expected", v});
        out.status = status_of({v});
        if (!v.proved()) out.failed = "p <= expected";
        e.prod = *expected;
    } else {
        out.verdict.kind = Verdict::Kind::Proved;
        out.verdict.simplified = out.simplified;
        out.status = Status::Accepted;
    }
    e.cert = out.cert;
    e.status = out.status;
    if (out.status == Status::Accepted || env.opts.build_unchecked) {
        e.fn = Val::fn(ev(typed, env, name));
        e.built = true;
    }
    e.generator = typed;
    out.built = e.built;
    env.register_fun(std::move(e));
    return out;
}

Val apply_generator(const Env& env, const ValEntry& v, const Val& x) {
    if (!v.generator) throw Error(v.name + " has no generator");
    return ev(v.generator, env, v.name)(x);
}

}  // namespace copro
