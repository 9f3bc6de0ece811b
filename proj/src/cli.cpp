#include "copro/cli.hpp"

#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

namespace copro::cli {

namespace {

[[noreturn]] void fail_at(const Sexp& s, const std::string& msg) { throw CombError(s.loc, msg); }

const Sexp& item(const Sexp& s, std::size_t i) {
    if (!s.list || i >= s.items.size()) fail_at(s, "malformed form " + s.str());
    return s.items[i];
}

void arity(const Sexp& s, std::size_t n) {
    if (!s.list || s.items.size() != n)
        fail_at(s, "form " + s.str() + " expects " + std::to_string(n - 1) + " argument(s)");
}

const std::string& name_of(const Sexp& s) {
    if (s.list) fail_at(s, "expected a name, got " + s.str());
    return s.atom;
}

bool is_int(const std::string& a) {
    if (a.empty()) return false;
    std::size_t i = a[0] == '-' ? 1 : 0;
    if (i == a.size()) return false;
    for (; i < a.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(a[i]))) return false;
    return true;
}

std::int64_t int_of(const Sexp& s) {
    if (s.list || !is_int(s.atom)) fail_at(s, "expected an integer, got " + s.str());
    try {
        return std::stoll(s.atom);
    } catch (const std::out_of_range&) {
        fail_at(s, "integer out of range: " + s.atom);
    }
}

}  // namespace

std::string Sexp::str() const {
    if (!list) return atom;
    std::string s = "(";
    for (std::size_t i = 0; i < items.size(); ++i) s += (i ? " " : "") + items[i].str();
    return s + ")";
}

std::vector<Sexp> read_sexps(const std::string& text) {
    std::vector<Sexp> stack(1);
    stack[0].list = true;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&]() {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++i;
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == ';') {
            while (i < text.size() && text[i] != '\n') advance();
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            advance();
        } else if (c == '(') {
            Sexp s;
            s.list = true;
            s.loc = {line, col};
            stack.push_back(s);
            advance();
        } else if (c == ')') {
            if (stack.size() == 1) throw CombError({line, col}, "unbalanced ')'");
            Sexp done = std::move(stack.back());
            stack.pop_back();
            stack.back().items.push_back(std::move(done));
            advance();
        } else {
            Sexp s;
            s.loc = {line, col};
            while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '(' &&
                   text[i] != ')' && text[i] != ';') {
                s.atom += text[i];
                advance();
            }
            stack.back().items.push_back(std::move(s));
        }
    }
    if (stack.size() != 1) throw CombError(stack.back().loc, "unclosed '('");
    return std::move(stack[0].items);
}

// ---- program

Program::Program(Options opts) { env.opts = opts; }

void Program::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    load(ss.str());
}

void Program::load(const std::string& text) {
    for (auto& s : read_sexps(text)) toplevel(s);
}

ConstType Program::parse_const(const Sexp& s) const {
    if (!s.list) {
        if (s.atom == "nat") return ConstType::nat();
        if (s.atom == "int") return ConstType::integer();
        if (s.atom == "bool") return ConstType::boolean();
        if (s.atom == "unit") return ConstType::unit();
        if (auto* d = env.cotypes.find(s.atom)) return ConstType::co(d);
        fail_at(s, "unknown constant type " + s.atom);
    }
    if (s.head_is("enum")) {
        arity(s, 2);
        std::int64_t k = int_of(s.items[1]);
        if (k < 1) fail_at(s, "enum cardinality must be positive");
        return ConstType::enumeration(static_cast<int>(k));
    }
    if (s.head_is("pair")) {
        arity(s, 3);
        return ConstType::pair(parse_const(s.items[1]), parse_const(s.items[2]));
    }
    if (s.head_is("co")) {
        arity(s, 2);
        const std::string& n = name_of(s.items[1]);
        auto* d = env.cotypes.find(n);
        if (!d) fail_at(s.items[1], "unknown cotype " + n);
        return ConstType::co(d);
    }
    fail_at(s, "malformed constant type " + s.str());
}

namespace {

template <class T, class Leaf>
T parse_tree(const Program& p, const Sexp& s, Leaf leaf) {
    if (!s.list) {
        if (s.atom == "nat" || s.atom == "int" || s.atom == "bool" || s.atom == "unit")
            return T::node(Spf::constant(p.parse_const(s)), {});
        return leaf(s);
    }
    auto sub = [&](std::size_t i) { return parse_tree<T>(p, s.items.at(i), leaf); };
    const std::string& h = name_of(item(s, 0));
    if (h == "const") {
        arity(s, 2);
        return T::node(Spf::constant(p.parse_const(s.items[1])), {});
    }
    if (h == "enum" || h == "pair" || h == "co") return T::node(Spf::constant(p.parse_const(s)), {});
    if (h == "prod") {
        arity(s, 3);
        return T::node(Spf::product(), {sub(1), sub(2)});
    }
    if (h == "sum") {
        arity(s, 3);
        return T::node(Spf::sum(), {sub(1), sub(2)});
    }
    if (h == "list") {
        arity(s, 2);
        return T::node(Spf::list(), {sub(1)});
    }
    if (h == "exp") {
        arity(s, 3);
        return T::node(Spf::exp(p.parse_const(s.items[1])), {sub(2)});
    }
    if (h == "id") {
        arity(s, 2);
        return T::node(Spf::ident(), {sub(1)});
    }
    fail_at(s, "unknown type former " + h);
}

}  // namespace

Ctt Program::parse_ctt(const Sexp& s) const {
    return parse_tree<Ctt>(*this, s, [&](const Sexp& a) {
        auto* d = env.cotypes.find(a.atom);
        if (!d) fail_at(a, "unknown cotype " + a.atom);
        return Ctt::leaf(d);
    });
}

Stt Program::parse_stt(const Sexp& s) const {
    return parse_tree<Stt>(*this, s, [&](const Sexp& a) {
        if (a.atom == "self") return Stt::slot();
        if (auto* d = env.cotypes.find(a.atom)) return Stt::node(Spf::constant(ConstType::co(d)), {});
        fail_at(a, "unknown type " + a.atom);
    });
}

Literal Program::parse_literal(const Sexp& s) const {
    auto konst = [](Val v, ConstType t) { return Literal{std::move(v), Ctt::constant(std::move(t))}; };
    if (!s.list) {
        if (is_int(s.atom)) {
            std::int64_t k = int_of(s);
            if (k < 0) return konst(Val::integer(k), ConstType::integer());
            return konst(Val::nat(static_cast<std::uint64_t>(k)), ConstType::nat());
        }
        if (s.atom == "true" || s.atom == "false") return konst(Val::boolean(s.atom == "true"), ConstType::boolean());
        if (s.atom == "unit") return konst(Val::unit(), ConstType::unit());
        fail_at(s, "malformed literal " + s.atom);
    }
    const std::string& h = name_of(item(s, 0));
    if (h == "nat") {
        arity(s, 2);
        std::int64_t k = int_of(s.items[1]);
        if (k < 0) fail_at(s, "nat literal must be non-negative");
        return konst(Val::nat(static_cast<std::uint64_t>(k)), ConstType::nat());
    }
    if (h == "int") {
        arity(s, 2);
        return konst(Val::integer(int_of(s.items[1])), ConstType::integer());
    }
    if (h == "bool") {
        arity(s, 2);
        const std::string& b = name_of(s.items[1]);
        if (b != "true" && b != "false") fail_at(s, "bool literal must be true or false");
        return konst(Val::boolean(b == "true"), ConstType::boolean());
    }
    if (h == "enum") {
        arity(s, 3);
        std::int64_t k = int_of(s.items[1]), i = int_of(s.items[2]);
        if (k < 1 || i < 0 || i >= k) fail_at(s, "enum literal out of range");
        return konst(Val::enumeration(static_cast<int>(k), static_cast<int>(i)), ConstType::enumeration(static_cast<int>(k)));
    }
    if (h == "pair") {
        arity(s, 3);
        Literal a = parse_literal(s.items[1]), b = parse_literal(s.items[2]);
        auto ca = a.ctt.is_const() ? *a.ctt.spf().type : ConstType::co(&a.ctt.def());
        auto cb = b.ctt.is_const() ? *b.ctt.spf().type : ConstType::co(&b.ctt.def());
        return konst(Val::pair(a.value, b.value), ConstType::pair(ca, cb));
    }
    if (h == "co") {
        arity(s, 2);
        Literal l = parse_literal(s.items[1]);
        if (!l.ctt.is_leaf()) fail_at(s, "co literal needs a coinductive value");
        return konst(l.value, ConstType::co(&l.ctt.def()));
    }
    if (h == "val") {
        arity(s, 2);
        const std::string& n = name_of(s.items[1]);
        const ValEntry* v = env.val(n);
        if (!v) fail_at(s.items[1], "unknown value " + n);
        if (!v->built) fail_at(s.items[1], "value " + n + " was not accepted");
        return Literal{v->value, v->ctt};
    }
    fail_at(s, "malformed literal " + s.str());
}

const PrimFn& Program::prim_named(const Sexp& s) const {
    const PrimFn* p = find_prim(name_of(s));
    if (!p) fail_at(s, "unknown primitive " + s.atom);
    return *p;
}

Guard Program::parse_guard(const Sexp& s) const {
    Guard g;
    if (s.is("else")) return g;
    const std::string& h = name_of(item(s, 0));
    arity(s, 2);
    if (h == "prim") {
        g.kind = Guard::Kind::Prim;
        g.prim = prim_named(s.items[1]).name;
        return g;
    }
    if (h == "eq") g.kind = Guard::Kind::Eq;
    else if (h == "lt") g.kind = Guard::Kind::Lt;
    else if (h == "ge") g.kind = Guard::Kind::Ge;
    else fail_at(s, "unknown guard " + h);
    if (s.items[1].is("true") || s.items[1].is("false")) g.k = s.items[1].is("true") ? 1 : 0;
    else g.k = int_of(s.items[1]);
    return g;
}

Spf Program::parse_functor(const Sexp& s) const {
    if (s.is("id")) return Spf::ident();
    if (s.is("list")) return Spf::list();
    if (s.head_is("exp")) {
        arity(s, 2);
        return Spf::exp(parse_const(s.items[1]));
    }
    fail_at(s, "functor must be id, list or (exp T), got " + s.str());
}

CombP Program::parse_comb(const Sexp& s) const {
    using K = Comb::Kind;
    Comb c;
    c.loc = s.loc;
    auto sub = [&](std::size_t i) { return parse_comb(s.items.at(i)); };
    auto simple = [&](K k) {
        c.kind = k;
        return mk(c);
    };
    if (!s.list) {
        const std::string& a = s.atom;
        if (a == "id") return simple(K::Id);
        if (a == "fst") return simple(K::Fst);
        if (a == "snd") return simple(K::Snd);
        if (a == "comm") return simple(K::Comm);
        if (a == "assoc") return simple(K::Assoc);
        if (a == "antiassoc") return simple(K::Antiassoc);
        if (a == "ceapp") return simple(K::Ceapp);
        if (a == "cepair") return simple(K::Cepair);
        if (auto it = macros_.find(a); it != macros_.end()) return parse_comb(it->second);
        if (auto ctor = env.ctor_or_dtor(a)) {
            Comb k = *ctor;
            k.loc = s.loc;
            return mk(k);
        }
        if (env.fun(a)) {
            c.kind = K::Call;
            c.name = a;
            return mk(c);
        }
        if (env.val(a)) fail_at(s, a + " is a value; use (cconst (val " + a + "))");
        if (const PrimFn* p = find_prim(a)) {
            c.kind = K::Prim;
            c.name = a;
            c.prim = *p;
            return mk(c);
        }
        fail_at(s, "unknown identifier " + a);
    }
    const std::string& h = name_of(item(s, 0));
    auto binary = [&](K k) {
        arity(s, 3);
        c.kind = k;
        c.kids = {sub(1), sub(2)};
        return mk(c);
    };
    auto with_lit = [&](K k) {
        arity(s, 2);
        c.kind = k;
        c.lit = parse_literal(s.items[1]);
        return mk(c);
    };
    if (h == "comp") {
        if (s.items.size() < 2) fail_at(s, "comp needs at least one function");
        std::vector<CombP> fs;
        for (std::size_t i = 1; i < s.items.size(); ++i) fs.push_back(sub(i));
        return comp(std::move(fs), s.loc);
    }
    if (h == "cconst") return with_lit(K::Const);
    if (h == "pairl") return with_lit(K::PairL);
    if (h == "pairr") return with_lit(K::PairR);
    if (h == "ceproj") return with_lit(K::Ceproj);
    if (h == "fpair") return binary(K::Fpair);
    if (h == "fproduct") return binary(K::Fproduct);
    if (h == "fcopair") return binary(K::Fcopair);
    if (h == "fcoproduct") return binary(K::Fcoproduct);
    if (h == "inl" || h == "inr") {
        arity(s, 2);
        c.kind = h == "inl" ? K::Inl : K::Inr;
        c.other = parse_ctt(s.items[1]);
        return mk(c);
    }
    if (h == "cuncurry" || h == "opaque") {
        arity(s, 2);
        c.kind = h == "cuncurry" ? K::Cuncurry : K::Opaque;
        c.kids = {sub(1)};
        return mk(c);
    }
    if (h == "fmap") {
        arity(s, 3);
        c.kind = K::Fmap;
        c.spf = parse_functor(s.items[1]);
        c.kids = {sub(2)};
        return mk(c);
    }
    if (h == "cnif") {
        arity(s, 4);
        c.kind = K::Cnif;
        c.guards = {parse_guard(s.items[1])};
        c.kids = {sub(2), sub(3)};
        return mk(c);
    }
    if (h == "if") {
        arity(s, 4);
        const std::string& b = name_of(s.items[1]);
        if (b != "true" && b != "false") fail_at(s.items[1], "if needs a literal true or false");
        c.kind = K::If;
        c.flag = b == "true";
        c.kids = {sub(2), sub(3)};
        return mk(c);
    }
    if (h == "cecurry" || h == "cgecurry") {
        arity(s, 3);
        c.kind = h == "cecurry" ? K::Cecurry : K::Cgecurry;
        c.type = parse_const(s.items[1]);
        c.kids = {sub(2)};
        return mk(c);
    }
    if (h == "cgeapp") {
        arity(s, 2);
        c.kind = K::Cgeapp;
        c.prim = prim_named(s.items[1]);
        c.name = c.prim->name;
        return mk(c);
    }
    if (h == "ceswap") {
        if (s.items.size() < 3) fail_at(s, "ceswap needs an arity type and at least one case");
        c.kind = K::Ceswap;
        c.type = parse_const(s.items[1]);
        for (std::size_t i = 2; i < s.items.size(); ++i) {
            const Sexp& cs = s.items[i];
            arity(cs, 2);
            c.guards.push_back(parse_guard(cs.items[0]));
            c.kids.push_back(parse_comb(cs.items[1]));
        }
        return mk(c);
    }
    if (h == "prim") {
        arity(s, 2);
        c.kind = K::Prim;
        c.prim = prim_named(s.items[1]);
        c.name = c.prim->name;
        return mk(c);
    }
    if (h == "literal") {
        arity(s, 2);
        Literal l = parse_literal(s.items[1]);
        if (!l.ctt.is_const()) fail_at(s, "literal functions need a constant literal");
        c.kind = K::Prim;
        c.prim = literal_prim(l.value, *l.ctt.spf().type);
        c.name = c.prim->name;
        return mk(c);
    }
    if (h == "unfold") {
        arity(s, 2);
        auto* d = env.cotypes.find(name_of(s.items[1]));
        if (!d) fail_at(s.items[1], "unknown cotype " + s.items[1].atom);
        c.kind = K::Unfold;
        c.def = d;
        c.name = d->name;
        return mk(c);
    }
    if (h == "adds") {
        arity(s, 2);
        std::int64_t m = int_of(s.items[1]);
        if (m < 0) fail_at(s, "adds needs a non-negative count");
        c.kind = K::Adds;
        c.index = static_cast<int>(m);
        return mk(c);
    }
    fail_at(s, "unknown combinator " + h);
}

SoCombP Program::parse_so(const Sexp& s) const {
    using K = SoComb::Kind;
    SoComb c;
    c.loc = s.loc;
    auto sub = [&](std::size_t i) { return parse_so(s.items.at(i)); };
    if (s.is("sfself")) {
        c.kind = K::SfSelf;
        return mk_so(c);
    }
    const std::string& h = name_of(item(s, 0));
    auto binary = [&](K k) {
        arity(s, 3);
        c.kind = k;
        c.kids = {sub(1), sub(2)};
        return mk_so(c);
    };
    if (h == "lift") {
        arity(s, 2);
        c.kind = K::Lift;
        c.lifted = parse_comb(s.items[1]);
        return mk_so(c);
    }
    if (h == "so-comp") {
        if (s.items.size() < 2) fail_at(s, "so-comp needs at least one generator");
        SoCombP acc = sub(s.items.size() - 1);
        for (std::size_t i = s.items.size() - 1; i-- > 1;) {
            SoComb n;
            n.kind = K::SoComp;
            n.loc = s.loc;
            n.kids = {sub(i), acc};
            acc = mk_so(n);
        }
        return acc;
    }
    if (h == "so-fpair") return binary(K::SoFpair);
    if (h == "so-fproduct") return binary(K::SoFproduct);
    if (h == "so-fcopair") return binary(K::SoFcopair);
    if (h == "so-fcoproduct") return binary(K::SoFcoproduct);
    if (h == "sfmap") {
        arity(s, 3);
        c.kind = K::SfMap;
        c.spf = parse_functor(s.items[1]);
        c.kids = {sub(2)};
        return mk_so(c);
    }
    if (h == "sfecurry") {
        arity(s, 3);
        c.kind = K::SfEcurry;
        c.type = parse_const(s.items[1]);
        c.kids = {sub(2)};
        return mk_so(c);
    }
    fail_at(s, "unknown second-order combinator " + h);
}

Productivity Program::parse_prod(const Sexp& s, const Ctt& dom, const Ctt& cod) const {
    if (s.is("trivial")) return prod_trivial(dom, cod);
    if (s.is("empty")) return prod_empty(dom, cod);
    const std::string& h = name_of(item(s, 0));
    if (h == "uz") {
        arity(s, 2);
        return prod_uz(int_of(s.items[1]), dom, cod);
    }
    if (h == "u") {
        arity(s, 5);
        AffineSpec f{int_of(s.items[1]), int_of(s.items[2]), int_of(s.items[3]), int_of(s.items[4])};
        if (f.gamma < 1) fail_at(s, "divisor must be positive");
        return prod_u(f, dom, cod);
    }
    if (h == "case") {
        arity(s, 3);
        if (!dom.is_leaf() && dom.spf().kind == Spf::Kind::Product)
            return prod_case(parse_prod(s.items[1], dom.child(0), cod), parse_prod(s.items[2], dom.child(1), cod));
        fail_at(s, "case productivity needs a product domain");
    }
    fail_at(s, "unknown productivity " + h);
}

void Program::toplevel(const Sexp& s) {
    const std::string& h = name_of(item(s, 0));
    auto fresh_name = [&](const Sexp& n) -> const std::string& {
        const std::string& name = name_of(n);
        if (env.defined(name) || macros_.count(name)) fail_at(n, "name " + name + " is already defined");
        return name;
    };
    if (h == "cotype") {
        const std::string& name = fresh_name(item(s, 1));
        Stt stt = parse_stt(item(s, 2));
        std::string ctor;
        std::vector<std::string> dtors;
        for (std::size_t i = 3; i < s.items.size(); ++i) {
            const Sexp& o = s.items[i];
            if (o.head_is("ctor")) {
                arity(o, 2);
                ctor = name_of(o.items[1]);
            } else if (o.head_is("dtors")) {
                for (std::size_t k = 1; k < o.items.size(); ++k) dtors.push_back(name_of(o.items[k]));
            } else {
                fail_at(o, "unknown cotype option " + o.str());
            }
        }
        for (auto& n : dtors)
            if (macros_.count(n)) fail_at(s, "name " + n + " is already defined");
        try {
            env.add_cotype(name, stt, ctor, dtors);
        } catch (const CombError&) {
            throw;
        } catch (const TypeError& e) {
            fail_at(s, e.what());
        }
        return;
    }
    if (h == "def") {
        arity(s, 5);
        if (!s.items[2].is(":")) fail_at(s.items[2], "expected ':'");
        const std::string& name = fresh_name(s.items[1]);
        Ctt c = parse_ctt(s.items[3]);
        const Sexp& body = s.items[4];
        if (!body.head_is("fix")) fail_at(body, "def body must be (fix COMB)");
        arity(body, 2);
        reports.push_back({name, "def", define_fix_first_order(env, name, c, parse_comb(body.items[1]))});
        return;
    }
    if (h == "cofun") {
        // (cofun NAME : C1 -> C2 expect PROD SOCOMB)
        arity(s, 9);
        if (!s.items[2].is(":") || !s.items[4].is("->") || !s.items[6].is("expect"))
            fail_at(s, "expected (cofun NAME : C1 -> C2 expect PROD GENERATOR)");
        const std::string& name = fresh_name(s.items[1]);
        Ctt c1 = parse_ctt(s.items[3]), c2 = parse_ctt(s.items[5]);
        Productivity p = parse_prod(s.items[7], c1, c2);
        reports.push_back({name, "cofun", define_fix_second_order(env, name, c1, c2, parse_so(s.items[8]), p)});
        return;
    }
    if (h == "let") {
        const std::string& name = fresh_name(item(s, 1));
        if (s.items.size() == 3) {
            parse_comb(s.items[2]);  // resolves names now so later definitions cannot change its meaning
            macros_[name] = s.items[2];
            return;
        }
        // (let NAME : C1 -> C2 [expect PROD] COMB)
        if (s.items.size() != 7 && s.items.size() != 9) fail_at(s, "expected (let NAME COMB) or (let NAME : C1 -> C2 [expect PROD] COMB)");
        if (!s.items[2].is(":") || !s.items[4].is("->")) fail_at(s, "expected (let NAME : C1 -> C2 ...)");
        Ctt c1 = parse_ctt(s.items[3]), c2 = parse_ctt(s.items[5]);
        std::optional<Productivity> expected;
        if (s.items.size() == 9) {
            if (!s.items[6].is("expect")) fail_at(s.items[6], "expected 'expect'");
            expected = parse_prod(s.items[7], c1, c2);
        }
        CombP body = parse_comb(s.items.back());
        CombP typed = typecheck(body, c1, env);
        if (*typed->cod != c2) fail_at(s, name + " produces " + typed->cod->str() + ", not " + c2.str());
        reports.push_back({name, "let", define_alias(env, name, body, c1, expected)});
        return;
    }
    fail_at(s, "unknown toplevel form " + h);
}

Productivity Program::derived(const std::string& name) const {
    if (auto it = macros_.find(name); it != macros_.end()) {
        CombP c = parse_comb(it->second);
        auto dom = infer_dom(c, env);
        if (!dom) throw CombError(it->second.loc, "cannot infer the domain of " + name);
        return derive(typecheck(c, *dom, env), env);
    }
    if (const FunEntry* f = env.fun(name)) return f->cert.derived ? *f->cert.derived : f->prod;
    if (const ValEntry* v = env.val(name)) return *v->cert.derived;
    throw Error("unknown name " + name);
}

// ---- constraint syntax

namespace {

struct Tokens {
    std::vector<std::string> toks;
    std::size_t pos = 0;

    const std::string& peek() const {
        static const std::string end;
        return pos < toks.size() ? toks[pos] : end;
    }
    std::string next() {
        if (pos >= toks.size()) throw Error("constraint ends early");
        return toks[pos++];
    }
    void expect(const std::string& t) {
        std::string got = next();
        if (got != t) throw Error("constraint: expected '" + t + "', got '" + got + "'");
    }
};

Tokens tokenize(const std::string& s) {
    Tokens t;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '.' || s[j] == '_')) ++j;
            t.toks.push_back(s.substr(i, j - i));
            i = j;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            t.toks.push_back(s.substr(i, j - i));
            i = j;
        } else if (s.compare(i, 2, "\\/") == 0 || s.compare(i, 2, "<=") == 0 || s.compare(i, 2, ">=") == 0) {
            t.toks.push_back(s.substr(i, 2));
            i += 2;
        } else if (std::string("()=<>+-*&.").find(c) != std::string::npos) {
            t.toks.push_back(std::string(1, c));
            ++i;
        } else {
            throw Error(std::string("constraint: unexpected character '") + c + "'");
        }
    }
    return t;
}

struct ConstraintParser {
    Tokens t;
    std::map<std::string, Var> names;
    std::vector<Var> implicit;

    Var var(const std::string& n) {
        auto it = names.find(n);
        if (it != names.end()) return it->second;
        Var v = fresh_var();
        names[n] = v;
        implicit.push_back(v);
        return v;
    }

    static bool is_name(const std::string& s) { return !s.empty() && std::isalpha(static_cast<unsigned char>(s[0])); }

    LinExpr term() {
        std::string a = t.next();
        if (std::isdigit(static_cast<unsigned char>(a[0]))) {
            std::int64_t k = std::stoll(a);
            if (t.peek() == "*") {
                t.next();
                std::string n = t.next();
                if (!is_name(n)) throw Error("constraint: expected a variable after '*'");
                return LinExpr::var(var(n), k);
            }
            return LinExpr(k);
        }
        if (!is_name(a)) throw Error("constraint: unexpected '" + a + "'");
        return LinExpr::var(var(a));
    }

    LinExpr sum() {
        LinExpr e = term();
        while (t.peek() == "+" || t.peek() == "-") {
            bool minus = t.next() == "-";
            LinExpr r = term();
            e = minus ? e - r : e + r;
        }
        return e;
    }

    Formula atom() {
        const std::string& p = t.peek();
        if (p == "(") {
            t.next();
            Formula f = disj();
            t.expect(")");
            return f;
        }
        if (p == "exists") return exists();
        if (p == "true" || p == "false") {
            bool b = t.next() == "true";
            return b ? Formula::truth() : Formula::falsity();
        }
        // boolean presence atoms: NAME = true / NAME = false
        if (is_name(p) && t.pos + 2 < t.toks.size() + 0 && t.toks[t.pos + 1] == "=" &&
            (t.toks[t.pos + 2] == "true" || t.toks[t.pos + 2] == "false")) {
            Var v = var(t.next());
            t.next();
            return Formula::boolean(v, t.next() == "true");
        }
        LinExpr a = sum();
        std::string op = t.next();
        LinExpr b = sum();
        if (op == "=") return Formula::eq(a, b);
        if (op == "<=") return Formula::le(a, b);
        if (op == ">=") return Formula::ge(a, b);
        if (op == "<") return Formula::lt(a, b);
        if (op == ">") return Formula::gt(a, b);
        throw Error("constraint: unknown comparison '" + op + "'");
    }

    Formula conj() {
        std::vector<Formula> xs{atom()};
        while (t.peek() == "&") {
            t.next();
            xs.push_back(atom());
        }
        return xs.size() == 1 ? xs[0] : Formula::conj(std::move(xs));
    }

    Formula disj() {
        std::vector<Formula> xs{conj()};
        while (t.peek() == "\\/") {
            t.next();
            xs.push_back(conj());
        }
        return xs.size() == 1 ? xs[0] : Formula::disj(std::move(xs));
    }

    Formula exists() {
        t.expect("exists");
        std::vector<Var> bound;
        std::map<std::string, Var> saved;
        while (t.peek() != ".") {
            std::string n = t.next();
            if (!is_name(n)) throw Error("constraint: bad bound variable '" + n + "'");
            if (names.count(n)) saved[n] = names[n];
            Var v = fresh_var();
            names[n] = v;
            bound.push_back(v);
        }
        t.expect(".");
        Formula body = disj();
        for (auto& [n, v] : saved) names[n] = v;
        return Formula::exists(bound, body);
    }
};

}  // namespace

Productivity parse_constraint(const std::string& text, const Ctt& dom, const Ctt& cod) {
    return make_prod(dom, cod, [&](const Layout& in, const Layout& out) {
        ConstraintParser p{tokenize(text), {}, {}};
        for (auto& [v, n] : layout_names(in, "I")) p.names[n] = v;
        for (auto& [v, n] : layout_names(out, "O")) p.names[n] = v;
        Formula f = p.disj();
        if (p.t.pos != p.t.toks.size()) throw Error("constraint: trailing input at '" + p.t.peek() + "'");
        return p.implicit.empty() ? f : Formula::exists(p.implicit, f);
    });
}

// ---- commands

namespace {

struct Flags {
    std::string command;
    std::string file;
    std::vector<std::string> names;
    Options opts;
    bool json = false;
    std::uint64_t depth = 5;
    std::size_t n = 10;
};

std::string counterexample_str(const Verdict& v) {
    std::string keys, vals;
    for (auto& [k, x] : v.named) {
        if (!keys.empty()) {
            keys += ", ";
            vals += ", ";
        }
        keys += k;
        vals += std::to_string(x);
    }
    return "(" + keys + ") = (" + vals + ")";
}

int exit_code(const std::vector<Report>& rs) {
    bool unknown = false;
    for (auto& r : rs) {
        if (r.outcome.status == Status::Rejected) return 1;
        if (r.outcome.status == Status::Unknown) unknown = true;
    }
    return unknown ? 2 : 0;
}

nlohmann::json report_json(const Report& r) {
    nlohmann::json j;
    j["name"] = r.name;
    j["form"] = r.form;
    j["status"] = status_str(r.outcome.status);
    j["certificate"] = r.outcome.cert.kind_str();
    if (r.outcome.cert.kind == Certificate::Kind::OneOverN) j["n"] = r.outcome.cert.n;
    j["simplified"] = r.outcome.simplified;
    j["failed"] = r.outcome.failed.empty() ? nlohmann::json(nullptr) : nlohmann::json(r.outcome.failed);
    nlohmann::json obs = nlohmann::json::array();
    for (auto& [name, v] : r.outcome.cert.obligations) {
        nlohmann::json o = v.to_json();
        o["obligation"] = name;
        obs.push_back(o);
    }
    j["obligations"] = obs;
    j["verdict"] = r.outcome.verdict.to_json();
    return j;
}

int cmd_check(const Program& p, const Flags& fl, std::ostream& out) {
    int code = exit_code(p.reports);
    if (fl.json) {
        nlohmann::json j;
        j["definitions"] = nlohmann::json::array();
        for (auto& r : p.reports) j["definitions"].push_back(report_json(r));
        j["exit"] = code;
        out << j.dump(2) << "\n";
        return code;
    }
    for (auto& r : p.reports) {
        const FixOutcome& o = r.outcome;
        out << r.name << ": " << status_str(o.status);
        if (o.status == Status::Accepted) out << " (" << o.cert.kind_str() << ")";
        out << "\n";
        out << "  constraint: " << o.simplified << "\n";
        if (!o.failed.empty()) {
            out << "  failed: " << o.failed << " (" << o.verdict.kind_str() << ")\n";
            if (o.verdict.kind == Verdict::Kind::Counterexample)
                out << "  counterexample: " << counterexample_str(o.verdict) << "\n";
            if (o.verdict.kind == Verdict::Kind::Unknown && !o.verdict.reason.empty())
                out << "  reason: " << o.verdict.reason << "\n";
        }
    }
    return code;
}

const ValEntry& value_named(const Program& p, const std::string& name, const Flags& fl) {
    const ValEntry* v = p.env.val(name);
    if (!v) throw Error(name + " is not a value definition");
    if (!v->built) throw Error(name + " was " + status_str(v->status) + "; use --unchecked to evaluate it anyway");
    if (v->status != Status::Accepted && !fl.opts.build_unchecked)
        throw Error(name + " was " + status_str(v->status));
    return *v;
}

int cmd_eval(const Program& p, const Flags& fl, std::ostream& out) {
    if (fl.names.size() != 1) throw Error("eval takes one name");
    const ValEntry& v = value_named(p, fl.names[0], fl);
    FuelScope fuel(fl.opts.fuel, true);
    out << render_trunc(v.ctt, v.value, fl.depth) << "\n";
    return 0;
}

int cmd_prefix(const Program& p, const Flags& fl, std::ostream& out) {
    if (fl.names.size() != 1) throw Error("prefix takes one name");
    const ValEntry& v = value_named(p, fl.names[0], fl);
    if (!v.ctt.is_leaf() || !stream_shaped(v.ctt.def())) throw Error(v.name + " is not a stream");
    FuelScope fuel(fl.opts.fuel, true);
    std::string s;
    for (auto& x : stream_prefix(v.value.as_co(), fl.n)) s += (s.empty() ? "" : " ") + render_const(x);
    out << s << "\n";
    return 0;
}

int cmd_bisim(const Program& p, const Flags& fl, std::ostream& out) {
    if (fl.names.size() != 2) throw Error("bisim takes two names");
    const ValEntry& a = value_named(p, fl.names[0], fl);
    const ValEntry& b = value_named(p, fl.names[1], fl);
    if (a.ctt != b.ctt) throw Error(a.name + " and " + b.name + " have different types");
    FuelScope fuel(fl.opts.fuel, true);
    for (std::uint64_t d = 0; d <= fl.depth; ++d) {
        if (!eq_upto_level(a.ctt, a.value, b.value, level_each(a.ctt, d))) {
            out << "differ at depth " << d << "\n";
            return 1;
        }
    }
    out << "equal up to depth " << fl.depth << "\n";
    return 0;
}

int cmd_prod(const Program& p, const Flags& fl, std::ostream& out) {
    if (fl.names.size() != 1) throw Error("prod takes one name");
    out << simplify_for_display(p.derived(fl.names[0])) << "\n";
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Flags fl;
    CLI::App app{"copro: productivity checker for corecursive definitions"};
    app.add_option("command", fl.command, "check, eval, prefix, bisim or prod")
        ->required()
        ->check(CLI::IsMember({"check", "eval", "prefix", "bisim", "prod"}));
    app.add_option("file", fl.file, "definition file")->required();
    app.add_option("names", fl.names, "definition names");
    app.add_option("--bound", fl.opts.bound, "solver search bound");
    app.add_option("--fuel", fl.opts.fuel, "runtime evaluation budget");
    app.add_option("--nmax", fl.opts.n_max, "largest n tried for 1/n productivity");
    app.add_option("--depth", fl.depth, "depth for eval and bisim");
    app.add_option("--n", fl.n, "prefix length");
    app.add_flag("--json", fl.json, "emit JSON verdicts");
    app.add_flag("--unchecked", fl.opts.build_unchecked, "evaluate definitions that were not accepted");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "copro: " << e.what() << "\n";
        return 3;
    }

    try {
        Program p(fl.opts);
        p.load_file(fl.file);
        if (fl.command == "check") return cmd_check(p, fl, out);
        if (fl.command == "eval") return cmd_eval(p, fl, out);
        if (fl.command == "prefix") return cmd_prefix(p, fl, out);
        if (fl.command == "bisim") return cmd_bisim(p, fl, out);
        return cmd_prod(p, fl, out);
    } catch (const CombError& e) {
        err << fl.file << ":" << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        err << fl.file << ": " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "copro: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace copro::cli
