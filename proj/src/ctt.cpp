#include "copro/ctt.hpp"

#include <sstream>

namespace copro {

namespace {

template <class R, class K>
R rep_of(K k) {
    R r;
    r.kind = k;
    return r;
}

}  // namespace

ConstType ConstType::nat() { return ConstType(std::make_shared<Rep>(rep_of<Rep>(Kind::Nat))); }
ConstType ConstType::integer() { return ConstType(std::make_shared<Rep>(rep_of<Rep>(Kind::Int))); }
ConstType ConstType::boolean() { return ConstType(std::make_shared<Rep>(rep_of<Rep>(Kind::Bool))); }
ConstType ConstType::unit() { return ConstType(std::make_shared<Rep>(rep_of<Rep>(Kind::Unit))); }

ConstType ConstType::enumeration(int k) {
    if (k < 1) throw TypeError("enum cardinality must be positive");
    auto r = rep_of<Rep>(Kind::Enum);
    r.k = k;
    return ConstType(std::make_shared<Rep>(std::move(r)));
}

ConstType ConstType::pair(ConstType a, ConstType b) {
    auto r = rep_of<Rep>(Kind::Pair);
    r.a = std::make_shared<ConstType>(std::move(a));
    r.b = std::make_shared<ConstType>(std::move(b));
    return ConstType(std::make_shared<Rep>(std::move(r)));
}

ConstType ConstType::co(const CotypeDef* def) {
    if (!def) throw TypeError("coinductive constant without cotype");
    auto r = rep_of<Rep>(Kind::Co);
    r.def = def;
    return ConstType(std::make_shared<Rep>(std::move(r)));
}

const std::string& ConstType::cotype() const { return rep_->def->name; }

std::optional<std::uint64_t> ConstType::cardinality() const {
    switch (kind()) {
    case Kind::Nat:
    case Kind::Int:
    case Kind::Co:
        return std::nullopt;
    case Kind::Bool:
        return 2;
    case Kind::Unit:
        return 1;
    case Kind::Enum:
        return static_cast<std::uint64_t>(enum_size());
    case Kind::Pair: {
        auto a = first().cardinality(), b = second().cardinality();
        if (!a || !b) return std::nullopt;
        return *a * *b;
    }
    }
    return std::nullopt;
}

std::string ConstType::str() const {
    switch (kind()) {
    case Kind::Nat: return "nat";
    case Kind::Int: return "int";
    case Kind::Bool: return "bool";
    case Kind::Unit: return "unit";
    case Kind::Enum: return "(enum " + std::to_string(enum_size()) + ")";
    case Kind::Pair: return "(pair " + first().str() + " " + second().str() + ")";
    case Kind::Co: return "(co " + cotype() + ")";
    }
    return "?";
}

bool operator==(const ConstType& x, const ConstType& y) {
    if (x.rep_ == y.rep_) return true;
    if (x.kind() != y.kind()) return false;
    switch (x.kind()) {
    case ConstType::Kind::Enum: return x.enum_size() == y.enum_size();
    case ConstType::Kind::Pair: return x.first() == y.first() && x.second() == y.second();
    case ConstType::Kind::Co: return x.cotype() == y.cotype();
    default: return true;
    }
}

int Spf::arity() const {
    switch (kind) {
    case Kind::Product:
    case Kind::Sum:
        return 2;
    case Kind::ConstF:
        return 0;
    default:
        return 1;
    }
}

bool Spf::shape_one() const {
    switch (kind) {
    case Kind::Product:
    case Kind::Exp:
    case Kind::IdF:
        return true;
    case Kind::Sum:
    case Kind::ListF:
        return false;
    case Kind::ConstF: {
        auto c = type->cardinality();
        return c && *c == 1;
    }
    }
    return false;
}

std::string Spf::str() const {
    switch (kind) {
    case Kind::Product: return "prod";
    case Kind::Sum: return "sum";
    case Kind::ListF: return "list";
    case Kind::Exp: return "(exp " + type->str() + ")";
    case Kind::ConstF: return "(const " + type->str() + ")";
    case Kind::IdF: return "id";
    }
    return "?";
}

Ctt::Ctt() : Ctt(node(Spf::constant(ConstType::unit()), {})) {}

Ctt Ctt::leaf(const CotypeDef* def) {
    if (!def) throw TypeError("leaf without cotype");
    Rep r;
    r.def = def;
    return Ctt(std::make_shared<Rep>(std::move(r)));
}

Ctt Ctt::node(Spf spf, std::vector<Ctt> children) {
    if (static_cast<int>(children.size()) != spf.arity())
        throw TypeError("node " + spf.str() + " expects " + std::to_string(spf.arity()) + " children");
    Rep r;
    r.spf = std::move(spf);
    r.children = std::move(children);
    return Ctt(std::make_shared<Rep>(std::move(r)));
}

const std::string& Ctt::cotype() const { return rep_->def->name; }

std::size_t Ctt::node_count() const {
    if (is_leaf()) return 0;
    std::size_t n = 1;
    for (auto& c : children()) n += c.node_count();
    return n;
}

std::string Ctt::str() const {
    if (is_leaf()) return cotype();
    switch (spf().kind) {
    case Spf::Kind::Product: return "(prod " + child(0).str() + " " + child(1).str() + ")";
    case Spf::Kind::Sum: return "(sum " + child(0).str() + " " + child(1).str() + ")";
    case Spf::Kind::ListF: return "(list " + child(0).str() + ")";
    case Spf::Kind::Exp: return "(exp " + spf().type->str() + " " + child(0).str() + ")";
    case Spf::Kind::ConstF: return "(const " + spf().type->str() + ")";
    case Spf::Kind::IdF: return "(id " + child(0).str() + ")";
    }
    return "?";
}

bool operator==(const Ctt& x, const Ctt& y) {
    if (x.rep_ == y.rep_) return true;
    if (x.is_leaf() != y.is_leaf()) return false;
    if (x.is_leaf()) return x.cotype() == y.cotype();
    return x.spf() == y.spf() && x.children() == y.children();
}

Stt Stt::slot() {
    Rep r;
    r.slot = true;
    return Stt(std::make_shared<Rep>(std::move(r)));
}

Stt Stt::node(Spf spf, std::vector<Stt> children) {
    if (spf.kind == Spf::Kind::IdF) throw TypeError("identity node is not allowed in a slot tree");
    if (static_cast<int>(children.size()) != spf.arity())
        throw TypeError("node " + spf.str() + " expects " + std::to_string(spf.arity()) + " children");
    Rep r;
    r.spf = std::move(spf);
    r.children = std::move(children);
    return Stt(std::make_shared<Rep>(std::move(r)));
}

namespace {

Ctt inner(const Stt& s, const CotypeDef* self) {
    if (s.is_slot()) return Ctt::leaf(self);
    std::vector<Ctt> ch;
    for (auto& c : s.children()) ch.push_back(inner(c, self));
    return Ctt::node(s.spf(), std::move(ch));
}

void check_finite_exp(const Ctt& c, const std::string& name) {
    if (c.is_leaf()) return;
    if (c.spf().kind == Spf::Kind::Exp && !c.spf().type->cardinality())
        throw TypeError("cotype " + name + ": exponent arity " + c.spf().type->str() +
                        " must be finite inside a cotype");
    for (auto& ch : c.children()) check_finite_exp(ch, name);
}

void collect_positions(const Ctt& c, std::vector<int>& path, std::vector<Position>& out) {
    if (!c.is_leaf() && c.spf().kind == Spf::Kind::Product) {
        for (int i = 0; i < 2; ++i) {
            path.push_back(i);
            collect_positions(c.child(i), path, out);
            path.pop_back();
        }
        return;
    }
    out.push_back(Position{path, c, {}});
}

}  // namespace

const CotypeDef& CotypeRegistry::elaborate(const std::string& name, const Stt& stt,
                                           std::string ctor_name,
                                           std::vector<std::string> dtor_names) {
    if (defs_.count(name)) throw TypeError("cotype " + name + " is already defined");
    if (stt.is_slot())
        throw TypeError("cotype " + name + " has no constructor node; its carrier would be degenerate");
    auto def = std::make_unique<CotypeDef>(CotypeDef{name, stt, Ctt::constant(ConstType::unit()),
                                                     Ctt::constant(ConstType::unit()), {}, {}});
    def->self_ctt = inner(stt, def.get());
    def->ident_ctt = Ctt::leaf(def.get());
    check_finite_exp(def->self_ctt, name);
    std::vector<int> path;
    collect_positions(def->self_ctt, path, def->positions);
    def->ctor_name = ctor_name.empty() ? "mk-" + name : std::move(ctor_name);
    if (!dtor_names.empty() && dtor_names.size() != def->positions.size())
        throw TypeError("cotype " + name + " has " + std::to_string(def->positions.size()) +
                        " positions but " + std::to_string(dtor_names.size()) + " destructor names");
    for (std::size_t i = 0; i < def->positions.size(); ++i)
        def->positions[i].name = dtor_names.empty() ? name + "." + std::to_string(i) : dtor_names[i];
    const CotypeDef& ref = *def;
    defs_[name] = std::move(def);
    order_.push_back(name);
    return ref;
}

const CotypeDef* CotypeRegistry::find(const std::string& name) const {
    auto it = defs_.find(name);
    return it == defs_.end() ? nullptr : it->second.get();
}

const CotypeDef& CotypeRegistry::get(const std::string& name) const {
    auto d = find(name);
    if (!d) throw TypeError("unknown cotype " + name);
    return *d;
}

std::string Level::str() const {
    switch (kind_) {
    case Kind::Depth: return std::to_string(n_);
    case Kind::None: return "None";
    case Kind::Some: {
        std::string s = "Some[";
        for (std::size_t i = 0; i < ch_.size(); ++i) {
            if (i) s += ", ";
            s += ch_[i].str();
        }
        return s + "]";
    }
    }
    return "?";
}

bool operator<(const Level& a, const Level& b) {
    if (a.kind_ != b.kind_) return a.kind_ < b.kind_;
    if (a.n_ != b.n_) return a.n_ < b.n_;
    return a.ch_ < b.ch_;
}

void check_level(const Ctt& c, const Level& l) {
    if (c.is_leaf()) {
        if (l.kind() != Level::Kind::Depth) throw TypeError("level " + l.str() + " does not mirror " + c.str());
        return;
    }
    if (l.kind() == Level::Kind::Depth) throw TypeError("level " + l.str() + " does not mirror " + c.str());
    if (l.kind() == Level::Kind::None) return;
    if (l.children().size() != c.children().size())
        throw TypeError("level " + l.str() + " does not mirror " + c.str());
    for (std::size_t i = 0; i < l.children().size(); ++i) check_level(c.child(i), l.child(i));
}

Level bottom(const Ctt& c) { return c.is_leaf() ? Level::depth(0) : Level::none(); }

Level level_each(const Ctt& c, std::uint64_t n) {
    if (c.is_leaf()) return Level::depth(n);
    std::vector<Level> ch;
    for (auto& x : c.children()) ch.push_back(level_each(x, n));
    return Level::some(std::move(ch));
}

bool level_le_bot(const Ctt& c, const Level& l) { return level_le(c, l, bottom(c)); }

bool level_le(const Ctt& c, const Level& l1, const Level& l2) {
    check_level(c, l1);
    check_level(c, l2);
    if (c.is_leaf()) return l1.n() <= l2.n();
    if (l1.kind() == Level::Kind::None) return true;
    if (l2.kind() == Level::Kind::Some) {
        for (std::size_t i = 0; i < c.children().size(); ++i)
            if (!level_le(c.child(i), l1.child(i), l2.child(i))) return false;
        return true;
    }
    if (!c.spf().shape_one()) return false;
    for (std::size_t i = 0; i < c.children().size(); ++i)
        if (!level_le_bot(c.child(i), l1.child(i))) return false;
    return true;
}

namespace {

void fun_rec(const Ctt& c, const Level* l, DimPath& path, std::map<DimPath, std::uint64_t>& out) {
    if (c.is_leaf()) {
        out[path] = l ? l->n() : 0;
        return;
    }
    const bool present = l && l->kind() == Level::Kind::Some;
    for (std::size_t i = 0; i < c.children().size(); ++i) {
        path.push_back(static_cast<int>(i));
        fun_rec(c.child(i), present ? &l->child(i) : nullptr, path, out);
        path.pop_back();
    }
}

void dims_rec(const Ctt& c, DimPath& path, std::vector<DimPath>& out) {
    if (c.is_leaf()) {
        out.push_back(path);
        return;
    }
    for (std::size_t i = 0; i < c.children().size(); ++i) {
        path.push_back(static_cast<int>(i));
        dims_rec(c.child(i), path, out);
        path.pop_back();
    }
}

}  // namespace

std::map<DimPath, std::uint64_t> level_fun(const Ctt& c, const Level& l) {
    check_level(c, l);
    std::map<DimPath, std::uint64_t> out;
    DimPath path;
    fun_rec(c, &l, path, out);
    return out;
}

std::vector<DimPath> dims(const Ctt& c) {
    std::vector<DimPath> out;
    DimPath path;
    dims_rec(c, path, out);
    return out;
}

std::vector<Level> enumerate_levels(const Ctt& c, std::uint64_t max_depth) {
    std::vector<Level> out;
    if (c.is_leaf()) {
        for (std::uint64_t n = 0; n <= max_depth; ++n) out.push_back(Level::depth(n));
        return out;
    }
    out.push_back(Level::none());
    std::vector<std::vector<Level>> per;
    for (auto& ch : c.children()) per.push_back(enumerate_levels(ch, max_depth));
    std::vector<Level> cur;
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == per.size()) {
            out.push_back(Level::some(cur));
            return;
        }
        for (auto& l : per[i]) {
            cur.push_back(l);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

std::string path_str(const DimPath& p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += ".";
        s += std::to_string(p[i]);
    }
    return s;
}

}  // namespace copro
