#include "copro/runtime.hpp"

#include <map>

namespace copro {

struct LazyCell {
    std::mutex m;
    std::condition_variable cv;
    int state = 0;  // 0 pending, 1 forcing, 2 done
    std::thread::id owner;
    std::function<Val()> thunk;
    std::shared_ptr<const Val::Node> result;
    std::string site;
};

struct FnBox {
    Val::Fun f;
    bool memo;
    std::mutex m;
    std::map<std::string, Val> cache;
};

struct Val::Node {
    Kind kind = Kind::Unit;
    std::uint64_t u = 0;
    std::int64_t i = 0;
    int k = 0;
    std::vector<Val> items;
    std::shared_ptr<FnBox> fn;
    CoRef co;
    std::shared_ptr<LazyCell> lazy;
};

namespace {

std::shared_ptr<const Val::Node> unit_node() {
    static const auto n = std::make_shared<const Val::Node>();
    return n;
}

[[noreturn]] void kind_error(const char* want) { throw TypeError(std::string("value is not ") + want); }

}  // namespace

Val::Val() : n_(unit_node()) {}

Val Val::unit() { return Val(); }

Val Val::boolean(bool b) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Bool;
    n->u = b;
    return Val(n);
}

Val Val::nat(std::uint64_t v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Nat;
    n->u = v;
    return Val(n);
}

Val Val::integer(std::int64_t v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Int;
    n->i = v;
    return Val(n);
}

Val Val::enumeration(int size, int index) {
    if (index < 0 || index >= size) throw TypeError("enum tag out of range");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Enum;
    n->k = size;
    n->u = static_cast<std::uint64_t>(index);
    return Val(n);
}

Val Val::pair(Val a, Val b) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Pair;
    n->items = {std::move(a), std::move(b)};
    return Val(n);
}

Val Val::inl(Val a) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Inl;
    n->items = {std::move(a)};
    return Val(n);
}

Val Val::inr(Val a) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Inr;
    n->items = {std::move(a)};
    return Val(n);
}

Val Val::list(std::vector<Val> xs) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::List;
    n->items = std::move(xs);
    return Val(n);
}

Val Val::fn(Fun f, bool memo) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Fn;
    n->fn = std::make_shared<FnBox>();
    n->fn->f = std::move(f);
    n->fn->memo = memo;
    return Val(n);
}

Val Val::co(CoRef c) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Co;
    n->co = std::move(c);
    return Val(n);
}

Val Val::lazy(std::function<Val()> thunk, std::string site) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Lazy;
    n->lazy = std::make_shared<LazyCell>();
    n->lazy->thunk = std::move(thunk);
    n->lazy->site = std::move(site);
    return Val(n);
}

Val Val::knot(std::function<Val(const Val&)> f, std::string site) {
    Val cell = lazy(nullptr, std::move(site));
    std::weak_ptr<const Node> weak = cell.n_;
    cell.n_->lazy->thunk = [f = std::move(f), weak]() -> Val {
        auto self = weak.lock();
        if (!self) throw Error("fixed point cell released during evaluation");
        return f(Val(self));
    };
    return cell;
}

bool Val::is_lazy() const { return n_->kind == Kind::Lazy; }

const Val::Node& Val::node() const {
    const Node* n = n_.get();
    while (n->kind == Kind::Lazy) {
        LazyCell& c = *n->lazy;
        std::unique_lock<std::mutex> lk(c.m);
        if (c.state == 2) {
            n = c.result.get();
            continue;
        }
        if (c.state == 1) {
            if (c.owner == std::this_thread::get_id())
                throw NonProductive("nonproductive evaluation: " + c.site +
                                    " is demanded before it produced a value");
            c.cv.wait(lk, [&] { return c.state != 1; });
            continue;
        }
        c.state = 1;
        c.owner = std::this_thread::get_id();
        auto thunk = c.thunk;
        lk.unlock();
        Val r;
        try {
            charge_fuel(c.site);
            r = thunk();
            r.node();
        } catch (...) {
            lk.lock();
            c.state = 0;
            c.cv.notify_all();
            throw;
        }
        lk.lock();
        auto res = r.n_;
        while (res->kind == Kind::Lazy) res = res->lazy->result;
        c.result = res;
        c.state = 2;
        c.thunk = nullptr;
        c.cv.notify_all();
        n = c.result.get();
    }
    return *n;
}

Val::Kind Val::kind() const { return node().kind; }

bool Val::as_bool() const {
    auto& n = node();
    if (n.kind != Kind::Bool) kind_error("a boolean");
    return n.u != 0;
}

std::uint64_t Val::as_nat() const {
    auto& n = node();
    if (n.kind != Kind::Nat) kind_error("a natural number");
    return n.u;
}

std::int64_t Val::as_int() const {
    auto& n = node();
    if (n.kind != Kind::Int) kind_error("an integer");
    return n.i;
}

int Val::enum_size() const {
    auto& n = node();
    if (n.kind != Kind::Enum) kind_error("an enum tag");
    return n.k;
}

int Val::enum_index() const {
    auto& n = node();
    if (n.kind != Kind::Enum) kind_error("an enum tag");
    return static_cast<int>(n.u);
}

const Val& Val::first() const {
    auto& n = node();
    if (n.kind != Kind::Pair) kind_error("a pair");
    return n.items[0];
}

const Val& Val::second() const {
    auto& n = node();
    if (n.kind != Kind::Pair) kind_error("a pair");
    return n.items[1];
}

const Val& Val::payload() const {
    auto& n = node();
    if (n.kind != Kind::Inl && n.kind != Kind::Inr) kind_error("a sum injection");
    return n.items[0];
}

const std::vector<Val>& Val::items() const {
    auto& n = node();
    if (n.kind != Kind::List) kind_error("a list");
    return n.items;
}

const CoRef& Val::as_co() const {
    auto& n = node();
    if (n.kind != Kind::Co) kind_error("a coinductive value");
    return n.co;
}

std::string Val::const_key() const {
    auto& n = node();
    switch (n.kind) {
    case Kind::Unit: return "u";
    case Kind::Bool: return n.u ? "T" : "F";
    case Kind::Nat: return "n" + std::to_string(n.u);
    case Kind::Int: return "i" + std::to_string(n.i);
    case Kind::Enum: return "e" + std::to_string(n.u);
    case Kind::Pair: {
        std::string a = n.items[0].const_key(), b = n.items[1].const_key();
        if (a.empty() || b.empty()) return {};
        return "(" + a + "," + b + ")";
    }
    default: return {};
    }
}

Val Val::apply(const Val& x) const {
    auto& n = node();
    if (n.kind != Kind::Fn) kind_error("a function");
    FnBox& box = *n.fn;
    if (!box.memo) return box.f(x);
    std::string key = x.const_key();
    if (key.empty()) return box.f(x);
    {
        std::lock_guard<std::mutex> lk(box.m);
        auto it = box.cache.find(key);
        if (it != box.cache.end()) return it->second;
    }
    Val r = box.f(x);
    std::lock_guard<std::mutex> lk(box.m);
    return box.cache.emplace(key, r).first->second;
}

CoRef CoVal::make(const CotypeDef* def, Step step, std::string site) {
    return CoRef(new CoVal(def, std::move(step), std::move(site)));
}

CoRef CoVal::ready(const CotypeDef* def, Val layer, std::string site) {
    CoRef c(new CoVal(def, nullptr, std::move(site)));
    c->layer_ = std::move(layer);
    c->state_ = State::Done;
    return c;
}

bool CoVal::forced() const {
    std::lock_guard<std::mutex> lk(m_);
    return state_ == State::Done;
}

const Val& CoVal::force() {
    std::unique_lock<std::mutex> lk(m_);
    for (;;) {
        if (state_ == State::Done) return layer_;
        if (state_ == State::Forcing) {
            if (owner_ == std::this_thread::get_id())
                throw NonProductive("nonproductive evaluation: " + site_ +
                                    " is unfolded while computing its own first layer");
            cv_.wait(lk, [&] { return state_ != State::Forcing; });
            continue;
        }
        break;
    }
    state_ = State::Forcing;
    owner_ = std::this_thread::get_id();
    auto step = step_;
    lk.unlock();
    Val r;
    try {
        charge_fuel(site_);
        r = step();
        r.kind();
    } catch (...) {
        lk.lock();
        state_ = State::Pending;
        cv_.notify_all();
        throw;
    }
    lk.lock();
    layer_ = std::move(r);
    ++evals_;
    state_ = State::Done;
    step_ = nullptr;
    cv_.notify_all();
    return layer_;
}

namespace {

struct FuelState {
    bool active = false;
    std::uint64_t remaining = 0;
};

thread_local FuelState fuel;

}  // namespace

FuelScope::FuelScope(std::uint64_t budget, bool fresh)
    : owner_(fresh || !fuel.active), prev_active_(fuel.active), prev_remaining_(fuel.remaining) {
    if (owner_) {
        fuel.active = true;
        fuel.remaining = budget;
    }
}

FuelScope::~FuelScope() {
    if (owner_) {
        fuel.active = prev_active_;
        fuel.remaining = prev_remaining_;
    }
}

std::uint64_t FuelScope::remaining() { return fuel.remaining; }
bool FuelScope::active() { return fuel.active; }

void charge_fuel(const std::string& site) {
    if (!fuel.active) return;
    if (fuel.remaining == 0)
        throw NonProductive("nonproductive evaluation: unroll budget exhausted while evaluating " + site);
    --fuel.remaining;
}

Val fold(const CotypeDef& def, Val layer) { return Val::co(CoVal::ready(&def, std::move(layer), def.name)); }

const Val& unfold(const CoRef& c) { return c->force(); }

namespace {

bool eq_layer(const Ctt& c, const Val& v1, const Val& v2, const Level* l, std::uint64_t each);

bool eq_children(const Ctt& c, const Val& v1, const Val& v2, const Level* l, std::uint64_t each) {
    auto sub = [&](std::size_t i) -> const Level* { return l ? &l->child(i) : nullptr; };
    switch (c.spf().kind) {
    case Spf::Kind::Product:
        return eq_layer(c.child(0), v1.first(), v2.first(), sub(0), each) &&
               eq_layer(c.child(1), v1.second(), v2.second(), sub(1), each);
    case Spf::Kind::Sum: {
        if (v1.kind() != v2.kind()) return false;
        std::size_t i = v1.kind() == Val::Kind::Inl ? 0 : 1;
        return eq_layer(c.child(i), v1.payload(), v2.payload(), sub(i), each);
    }
    case Spf::Kind::ListF: {
        auto& a = v1.items();
        auto& b = v2.items();
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!eq_layer(c.child(0), a[i], b[i], sub(0), each)) return false;
        return true;
    }
    case Spf::Kind::Exp: {
        auto args = c.spf().type->cardinality() ? const_values(*c.spf().type) : sample_args(*c.spf().type);
        for (auto& a : args)
            if (!eq_layer(c.child(0), v1.apply(a), v2.apply(a), sub(0), each)) return false;
        return true;
    }
    case Spf::Kind::ConstF:
        return const_equal(v1, v2);
    case Spf::Kind::IdF:
        return eq_layer(c.child(0), v1, v2, sub(0), each);
    }
    return false;
}

bool eq_layer(const Ctt& c, const Val& v1, const Val& v2, const Level* l, std::uint64_t each) {
    if (c.is_leaf()) return eq_upto_nat(v1.as_co(), v2.as_co(), l ? l->n() : each);
    if (l && l->kind() == Level::Kind::None) return true;
    return eq_children(c, v1, v2, l, each);
}

}  // namespace

bool eq_upto_nat(const CoRef& c1, const CoRef& c2, std::uint64_t n) {
    if (n == 0 || c1 == c2) return true;
    FuelScope scope(kDefaultFuel);
    const Ctt& self = c1->def().self_ctt;
    return eq_layer(self, c1->force(), c2->force(), nullptr, n - 1);
}

bool eq_upto_level(const Ctt& c, const Val& v1, const Val& v2, const Level& l) {
    check_level(c, l);
    FuelScope scope(kDefaultFuel);
    return eq_layer(c, v1, v2, &l, 0);
}

bool const_equal(const Val& a, const Val& b) {
    if (a.same(b)) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
    case Val::Kind::Unit: return true;
    case Val::Kind::Bool: return a.as_bool() == b.as_bool();
    case Val::Kind::Nat: return a.as_nat() == b.as_nat();
    case Val::Kind::Int: return a.as_int() == b.as_int();
    case Val::Kind::Enum: return a.enum_index() == b.enum_index();
    case Val::Kind::Pair: return const_equal(a.first(), b.first()) && const_equal(a.second(), b.second());
    case Val::Kind::Inl:
    case Val::Kind::Inr: return const_equal(a.payload(), b.payload());
    case Val::Kind::List: {
        auto& x = a.items();
        auto& y = b.items();
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (!const_equal(x[i], y[i])) return false;
        return true;
    }
    case Val::Kind::Co: return eq_upto_nat(a.as_co(), b.as_co(), kConstEqDepth);
    default: throw TypeError("functions have no decidable equality");
    }
}

Val fix_value(const Ctt& c, const std::function<Val(const Val&)>& f, const std::string& site) {
    if (!c.is_leaf() && c.spf().kind == Spf::Kind::Exp) {
        Val cell = Val::knot(f, site);
        return Val::fn([cell](const Val& x) { return cell.apply(x); });
    }
    return Val::knot(f, site);
}

bool stream_shaped(const CotypeDef& def) {
    const Ctt& s = def.self_ctt;
    return !s.is_leaf() && s.spf().kind == Spf::Kind::Product && s.child(0).is_const() &&
           s.child(1).is_leaf() && s.child(1).cotype() == def.name;
}

std::vector<Val> stream_prefix(const CoRef& c, std::size_t n) {
    if (!stream_shaped(c->def())) throw TypeError("cotype " + c->def().name + " is not stream shaped");
    FuelScope scope(kDefaultFuel);
    std::vector<Val> out;
    CoRef cur = c;
    for (std::size_t i = 0; i < n; ++i) {
        const Val& layer = cur->force();
        out.push_back(layer.first());
        if (i + 1 < n) cur = layer.second().as_co();
    }
    return out;
}

namespace {

std::string render_co(const CoRef& c, std::uint64_t depth);

void flatten_product(const Ctt& c, const Val& v, std::uint64_t depth, std::vector<std::string>& out);

std::string render(const Ctt& c, const Val& v, std::uint64_t depth) {
    if (c.is_leaf()) return render_co(v.as_co(), depth);
    switch (c.spf().kind) {
    case Spf::Kind::Product: {
        std::vector<std::string> parts;
        flatten_product(c, v, depth, parts);
        std::string s = "(";
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (i) s += ", ";
            s += parts[i];
        }
        return s + ")";
    }
    case Spf::Kind::Sum: {
        bool left = v.kind() == Val::Kind::Inl;
        std::string inner = render(c.child(left ? 0 : 1), v.payload(), depth);
        if (inner.find(' ') != std::string::npos && inner.front() != '(') inner = "(" + inner + ")";
        return (left ? "inl " : "inr ") + inner;
    }
    case Spf::Kind::ListF: {
        std::string s = "[";
        auto& xs = v.items();
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i) s += ", ";
            s += render(c.child(0), xs[i], depth);
        }
        return s + "]";
    }
    case Spf::Kind::Exp: {
        if (!c.spf().type->cardinality()) return "<fn>";
        std::string s = "{";
        bool firstp = true;
        for (auto& a : const_values(*c.spf().type)) {
            if (!firstp) s += ", ";
            firstp = false;
            s += render_const(a) + ": " + render(c.child(0), v.apply(a), depth);
        }
        return s + "}";
    }
    case Spf::Kind::ConstF:
        return render_const(v);
    case Spf::Kind::IdF:
        return render(c.child(0), v, depth);
    }
    return "?";
}

void flatten_product(const Ctt& c, const Val& v, std::uint64_t depth, std::vector<std::string>& out) {
    for (int i = 0; i < 2; ++i) {
        const Ctt& ch = c.child(i);
        const Val& x = i == 0 ? v.first() : v.second();
        if (!ch.is_leaf() && ch.spf().kind == Spf::Kind::Product)
            flatten_product(ch, x, depth, out);
        else
            out.push_back(render(ch, x, depth));
    }
}

std::string render_co(const CoRef& c, std::uint64_t depth) {
    if (depth == 0) return "…";
    const Val& layer = c->force();
    if (stream_shaped(c->def())) {
        const Ctt& hc = c->def().self_ctt.child(0);
        return render(hc, layer.first(), depth - 1) + " :: " + render_co(layer.second().as_co(), depth - 1);
    }
    return render(c->def().self_ctt, layer, depth - 1);
}

}  // namespace

std::string render_const(const Val& v) {
    switch (v.kind()) {
    case Val::Kind::Unit: return "()";
    case Val::Kind::Bool: return v.as_bool() ? "true" : "false";
    case Val::Kind::Nat: return std::to_string(v.as_nat());
    case Val::Kind::Int: return std::to_string(v.as_int());
    case Val::Kind::Enum: return "#" + std::to_string(v.enum_index());
    case Val::Kind::Pair: return "(" + render_const(v.first()) + "," + render_const(v.second()) + ")";
    case Val::Kind::Co: return "<" + render_co(v.as_co(), 3) + ">";
    default: return "?";
    }
}

std::string render_trunc(const Ctt& c, const Val& v, std::uint64_t depth) {
    FuelScope scope(kDefaultFuel);
    return render(c, v, depth);
}

std::vector<Val> const_values(const ConstType& t) {
    switch (t.kind()) {
    case ConstType::Kind::Unit: return {Val::unit()};
    case ConstType::Kind::Bool: return {Val::boolean(false), Val::boolean(true)};
    case ConstType::Kind::Enum: {
        std::vector<Val> out;
        for (int i = 0; i < t.enum_size(); ++i) out.push_back(Val::enumeration(t.enum_size(), i));
        return out;
    }
    case ConstType::Kind::Pair: {
        std::vector<Val> out;
        auto as = const_values(t.first());
        auto bs = const_values(t.second());
        for (auto& a : as)
            for (auto& b : bs) out.push_back(Val::pair(a, b));
        return out;
    }
    default:
        throw TypeError("type " + t.str() + " has infinitely many values");
    }
}

std::vector<Val> sample_args(const ConstType& t) {
    switch (t.kind()) {
    case ConstType::Kind::Nat: {
        std::vector<Val> out;
        for (std::uint64_t i = 0; i < 8; ++i) out.push_back(Val::nat(i));
        return out;
    }
    case ConstType::Kind::Int: {
        std::vector<Val> out;
        for (std::int64_t i = -4; i < 4; ++i) out.push_back(Val::integer(i));
        return out;
    }
    case ConstType::Kind::Pair: {
        std::vector<Val> out;
        auto as = sample_args(t.first());
        auto bs = sample_args(t.second());
        for (std::size_t i = 0; i < as.size(); ++i)
            for (std::size_t j = 0; j < bs.size() && j < 4; ++j) out.push_back(Val::pair(as[i], bs[j]));
        return out;
    }
    case ConstType::Kind::Co:
        throw TypeError("cannot sample coinductive arguments");
    default:
        return const_values(t);
    }
}

Val default_const(const ConstType& t) {
    switch (t.kind()) {
    case ConstType::Kind::Unit: return Val::unit();
    case ConstType::Kind::Bool: return Val::boolean(false);
    case ConstType::Kind::Nat: return Val::nat(0);
    case ConstType::Kind::Int: return Val::integer(0);
    case ConstType::Kind::Enum: return Val::enumeration(t.enum_size(), 0);
    case ConstType::Kind::Pair: return Val::pair(default_const(t.first()), default_const(t.second()));
    case ConstType::Kind::Co: return default_value(t.co_def()->ident_ctt);
    }
    return Val::unit();
}

namespace {

Val default_layer(const Ctt& c, const CotypeDef& self, const CoRef& knot) {
    if (c.is_leaf()) {
        if (c.cotype() == self.name) return Val::co(knot);
        return default_value(c);
    }
    switch (c.spf().kind) {
    case Spf::Kind::Product:
        return Val::pair(default_layer(c.child(0), self, knot), default_layer(c.child(1), self, knot));
    case Spf::Kind::Sum:
        return Val::inl(default_layer(c.child(0), self, knot));
    case Spf::Kind::ListF:
        return Val::list({});
    case Spf::Kind::Exp: {
        Val body = default_layer(c.child(0), self, knot);
        return Val::fn([body](const Val&) { return body; });
    }
    case Spf::Kind::ConstF: {
        const ConstType& t = *c.spf().type;
        if (t.kind() == ConstType::Kind::Co && t.cotype() == self.name) return Val::co(knot);
        return default_const(t);
    }
    case Spf::Kind::IdF:
        return default_layer(c.child(0), self, knot);
    }
    return Val::unit();
}

}  // namespace

Val default_value(const Ctt& c) {
    if (c.is_leaf()) {
        const CotypeDef& def = c.def();
        std::shared_ptr<CoRef> slot = std::make_shared<CoRef>();
        CoRef knot = CoVal::make(&def, [slot, &def]() { return default_layer(def.self_ctt, def, *slot); },
                                 def.name + " witness");
        *slot = knot;
        return Val::co(knot);
    }
    switch (c.spf().kind) {
    case Spf::Kind::Product: return Val::pair(default_value(c.child(0)), default_value(c.child(1)));
    case Spf::Kind::Sum: return Val::inl(default_value(c.child(0)));
    case Spf::Kind::ListF: return Val::list({});
    case Spf::Kind::Exp: {
        Val body = default_value(c.child(0));
        return Val::fn([body](const Val&) { return body; });
    }
    case Spf::Kind::ConstF: return default_const(*c.spf().type);
    case Spf::Kind::IdF: return default_value(c.child(0));
    }
    return Val::unit();
}

bool const_has_type(const Val& v, const ConstType& t) {
    switch (t.kind()) {
    case ConstType::Kind::Nat: return v.kind() == Val::Kind::Nat;
    case ConstType::Kind::Int: return v.kind() == Val::Kind::Int;
    case ConstType::Kind::Bool: return v.kind() == Val::Kind::Bool;
    case ConstType::Kind::Unit: return v.kind() == Val::Kind::Unit;
    case ConstType::Kind::Enum: return v.kind() == Val::Kind::Enum && v.enum_size() == t.enum_size();
    case ConstType::Kind::Pair:
        return v.kind() == Val::Kind::Pair && const_has_type(v.first(), t.first()) &&
               const_has_type(v.second(), t.second());
    case ConstType::Kind::Co: return v.kind() == Val::Kind::Co && v.as_co()->def().name == t.cotype();
    }
    return false;
}

}  // namespace copro
