#include "copro/formula.hpp"

#include <algorithm>
#include <atomic>
#include <optional>

#include "copro/ctt.hpp"

namespace copro {

Var fresh_var() {
    static std::atomic<Var> next{1};
    return next.fetch_add(1);
}

LinExpr LinExpr::var(Var v, std::int64_t coeff) {
    LinExpr e;
    if (coeff != 0) e.terms_.push_back({v, coeff});
    return e;
}

LinExpr LinExpr::from(std::vector<std::pair<Var, std::int64_t>> terms, std::int64_t c) {
    std::sort(terms.begin(), terms.end());
    LinExpr e(c);
    for (auto& [v, k] : terms) {
        if (!e.terms_.empty() && e.terms_.back().first == v)
            e.terms_.back().second += k;
        else
            e.terms_.push_back({v, k});
        if (e.terms_.back().second == 0) e.terms_.pop_back();
    }
    return e;
}

std::int64_t LinExpr::coeff(Var v) const {
    for (auto& [x, k] : terms_)
        if (x == v) return k;
    return 0;
}

LinExpr LinExpr::operator+(const LinExpr& o) const {
    LinExpr r;
    r.c_ = c_ + o.c_;
    std::size_t i = 0, j = 0;
    while (i < terms_.size() || j < o.terms_.size()) {
        if (j == o.terms_.size() || (i < terms_.size() && terms_[i].first < o.terms_[j].first)) {
            r.terms_.push_back(terms_[i++]);
        } else if (i == terms_.size() || o.terms_[j].first < terms_[i].first) {
            r.terms_.push_back(o.terms_[j++]);
        } else {
            std::int64_t k = terms_[i].second + o.terms_[j].second;
            if (k != 0) r.terms_.push_back({terms_[i].first, k});
            ++i;
            ++j;
        }
    }
    return r;
}

LinExpr LinExpr::operator*(std::int64_t k) const {
    LinExpr r;
    if (k == 0) return r;
    r.c_ = c_ * k;
    for (auto& [v, c] : terms_) r.terms_.push_back({v, c * k});
    return r;
}

LinExpr LinExpr::operator-(const LinExpr& o) const { return *this + o * -1; }

LinExpr LinExpr::substitute(Var v, const LinExpr& e) const {
    std::int64_t k = coeff(v);
    if (k == 0) return *this;
    LinExpr rest = *this - LinExpr::var(v, k);
    return rest + e * k;
}

LinExpr LinExpr::rename(const std::map<Var, Var>& m) const {
    LinExpr r(c_);
    for (auto& [v, k] : terms_) {
        auto it = m.find(v);
        r = r + LinExpr::var(it == m.end() ? v : it->second, k);
    }
    return r;
}

namespace {

std::shared_ptr<const Formula::Node> const_node(Formula::Kind k) {
    auto n = std::make_shared<Formula::Node>();
    n->kind = k;
    return n;
}

}  // namespace

Formula::Formula() : n_(const_node(Kind::True)) {}

Formula Formula::truth() {
    static const auto n = const_node(Kind::True);
    return Formula(n);
}

Formula Formula::falsity() {
    static const auto n = const_node(Kind::False);
    return Formula(n);
}

Formula Formula::boolean(Var v, bool value) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Bool;
    n->var = v;
    n->value = value;
    return Formula(n);
}

Formula Formula::atom(Atom a) {
    if (a.e.is_const()) {
        std::int64_t c = a.e.constant();
        return (a.eq ? c == 0 : c <= 0) ? truth() : falsity();
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::Lin;
    n->atom = std::move(a);
    return Formula(n);
}

Formula Formula::le(const LinExpr& a, const LinExpr& b) { return atom(Atom{a - b, false}); }
Formula Formula::lt(const LinExpr& a, const LinExpr& b) { return atom(Atom{a - b + LinExpr(1), false}); }
Formula Formula::eq(const LinExpr& a, const LinExpr& b) { return atom(Atom{a - b, true}); }

Formula Formula::conj(std::vector<Formula> xs) {
    std::vector<Formula> out;
    for (auto& x : xs) {
        if (x.is_false()) return falsity();
        if (x.is_true()) continue;
        if (x.kind() == Kind::And)
            for (auto& y : x.args()) out.push_back(y);
        else
            out.push_back(std::move(x));
    }
    if (out.empty()) return truth();
    if (out.size() == 1) return out.front();
    auto n = std::make_shared<Node>();
    n->kind = Kind::And;
    n->args = std::move(out);
    return Formula(n);
}

Formula Formula::disj(std::vector<Formula> xs) {
    std::vector<Formula> out;
    for (auto& x : xs) {
        if (x.is_true()) return truth();
        if (x.is_false()) continue;
        if (x.kind() == Kind::Or)
            for (auto& y : x.args()) out.push_back(y);
        else
            out.push_back(std::move(x));
    }
    if (out.empty()) return falsity();
    if (out.size() == 1) return out.front();
    auto n = std::make_shared<Node>();
    n->kind = Kind::Or;
    n->args = std::move(out);
    return Formula(n);
}

Formula Formula::exists(std::vector<Var> vars, Formula body) {
    if (vars.empty() || body.is_true() || body.is_false()) return body;
    auto n = std::make_shared<Node>();
    n->kind = Kind::Exists;
    n->bound = std::move(vars);
    n->args = {std::move(body)};
    return Formula(n);
}

namespace {

Formula inst_rec(const Formula& f, std::map<Var, Var>& m) {
    switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False:
        return f;
    case Formula::Kind::Bool: {
        auto it = m.find(f.var());
        return it == m.end() ? f : Formula::boolean(it->second, f.value());
    }
    case Formula::Kind::Lin:
        return Formula::atom(Atom{f.lin().e.rename(m), f.lin().eq});
    case Formula::Kind::And:
    case Formula::Kind::Or: {
        std::vector<Formula> xs;
        for (auto& a : f.args()) xs.push_back(inst_rec(a, m));
        return f.kind() == Formula::Kind::And ? Formula::conj(std::move(xs)) : Formula::disj(std::move(xs));
    }
    case Formula::Kind::Exists: {
        std::vector<Var> fresh;
        std::vector<std::pair<Var, std::optional<Var>>> saved;
        for (Var v : f.bound()) {
            Var w = fresh_var();
            fresh.push_back(w);
            auto it = m.find(v);
            saved.push_back({v, it == m.end() ? std::nullopt : std::optional<Var>(it->second)});
            m[v] = w;
        }
        Formula body = inst_rec(f.body(), m);
        for (auto& [v, old] : saved) {
            if (old)
                m[v] = *old;
            else
                m.erase(v);
        }
        return Formula::exists(std::move(fresh), std::move(body));
    }
    }
    return f;
}

}  // namespace

Formula Formula::instantiate(const std::map<Var, Var>& m) const {
    std::map<Var, Var> copy = m;
    return inst_rec(*this, copy);
}

Formula Formula::subst_bools(const std::map<Var, bool>& m) const {
    switch (kind()) {
    case Kind::Bool: {
        auto it = m.find(var());
        if (it == m.end()) return *this;
        return it->second == value() ? truth() : falsity();
    }
    case Kind::And:
    case Kind::Or: {
        std::vector<Formula> xs;
        for (auto& a : args()) xs.push_back(a.subst_bools(m));
        return kind() == Kind::And ? conj(std::move(xs)) : disj(std::move(xs));
    }
    case Kind::Exists:
        return exists(bound(), body().subst_bools(m));
    default:
        return *this;
    }
}

Formula operator&&(const Formula& a, const Formula& b) { return Formula::conj({a, b}); }
Formula operator||(const Formula& a, const Formula& b) { return Formula::disj({a, b}); }

Formula operator!(const Formula& a) {
    switch (a.kind()) {
    case Formula::Kind::True: return Formula::falsity();
    case Formula::Kind::False: return Formula::truth();
    case Formula::Kind::Bool: return Formula::boolean(a.var(), !a.value());
    case Formula::Kind::Lin: {
        const Atom& t = a.lin();
        Formula gt = Formula::atom(Atom{t.e * -1 + LinExpr(1), false});
        if (!t.eq) return gt;
        return Formula::atom(Atom{t.e + LinExpr(1), false}) || gt;
    }
    case Formula::Kind::And: {
        std::vector<Formula> xs;
        for (auto& x : a.args()) xs.push_back(!x);
        return Formula::disj(std::move(xs));
    }
    case Formula::Kind::Or: {
        std::vector<Formula> xs;
        for (auto& x : a.args()) xs.push_back(!x);
        return Formula::conj(std::move(xs));
    }
    case Formula::Kind::Exists:
        throw Error("cannot negate an existential constraint");
    }
    return a;
}

std::int64_t eval_expr(const LinExpr& e, const std::map<Var, std::int64_t>& nats) {
    std::int64_t s = e.constant();
    for (auto& [v, k] : e.terms()) {
        auto it = nats.find(v);
        s += k * (it == nats.end() ? 0 : it->second);
    }
    return s;
}

bool eval_qf(const Formula& f, const Assignment& a) {
    switch (f.kind()) {
    case Formula::Kind::True: return true;
    case Formula::Kind::False: return false;
    case Formula::Kind::Bool: {
        auto it = a.bools.find(f.var());
        return (it != a.bools.end() && it->second) == f.value();
    }
    case Formula::Kind::Lin: {
        std::int64_t v = eval_expr(f.lin().e, a.nats);
        return f.lin().eq ? v == 0 : v <= 0;
    }
    case Formula::Kind::And:
        return std::all_of(f.args().begin(), f.args().end(), [&](const Formula& x) { return eval_qf(x, a); });
    case Formula::Kind::Or:
        return std::any_of(f.args().begin(), f.args().end(), [&](const Formula& x) { return eval_qf(x, a); });
    case Formula::Kind::Exists:
        throw Error("quantified formula needs the solver to evaluate");
    }
    return false;
}

}  // namespace copro
