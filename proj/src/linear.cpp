#include "copro/linear.hpp"

#include <algorithm>
#include <numeric>

namespace copro {

namespace {

using I64 = std::int64_t;

I64 floor_div(I64 a, I64 b) {
    I64 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

I64 ceil_div(I64 a, I64 b) { return -floor_div(-a, b); }

bool merge(Conj& into, const Conj& from) {
    for (auto& [v, b] : from.bools) {
        auto [it, fresh] = into.bools.emplace(v, b);
        if (!fresh && it->second != b) return false;
    }
    into.atoms.insert(into.atoms.end(), from.atoms.begin(), from.atoms.end());
    return true;
}

// single-variable interval propagation, cheap enough to run on every product step
bool quick_infeasible(const Conj& c) {
    std::map<Var, std::pair<I64, I64>> box;
    auto lo = [&](Var v) -> I64& { return box.try_emplace(v, 0, INT64_MAX).first->second.first; };
    auto hi = [&](Var v) -> I64& { return box.try_emplace(v, 0, INT64_MAX).first->second.second; };
    for (auto& a : c.atoms) {
        if (a.e.terms().size() != 1) continue;
        auto [v, k] = a.e.terms().front();
        I64 cst = a.e.constant();
        if (a.eq) {
            if (cst % k != 0) return true;
            I64 x = -cst / k;
            if (x < 0) return true;
            lo(v) = std::max(lo(v), x);
            hi(v) = std::min(hi(v), x);
        } else if (k > 0) {
            hi(v) = std::min(hi(v), floor_div(-cst, k));
        } else {
            lo(v) = std::max(lo(v), ceil_div(cst, -k));
        }
        if (lo(v) > hi(v)) return true;
    }
    return false;
}

void dedupe(Conj& c) {
    std::sort(c.atoms.begin(), c.atoms.end());
    c.atoms.erase(std::unique(c.atoms.begin(), c.atoms.end()), c.atoms.end());
}

std::vector<Conj> dnf_rec(const Formula& f, std::set<Var>* bound, std::size_t cap) {
    switch (f.kind()) {
    case Formula::Kind::True: return {Conj{}};
    case Formula::Kind::False: return {};
    case Formula::Kind::Bool: {
        Conj c;
        c.bools[f.var()] = f.value();
        return {c};
    }
    case Formula::Kind::Lin: {
        Atom t = tighten(f.lin());
        if (t.e.is_const()) return (t.eq ? t.e.constant() == 0 : t.e.constant() <= 0) ? std::vector<Conj>{Conj{}}
                                                                                      : std::vector<Conj>{};
        Conj c;
        c.atoms.push_back(t);
        if (quick_infeasible(c)) return {};
        return {c};
    }
    case Formula::Kind::Or: {
        std::vector<Conj> out;
        for (auto& a : f.args()) {
            auto d = dnf_rec(a, bound, cap);
            out.insert(out.end(), d.begin(), d.end());
            if (out.size() > cap) throw DnfTooLarge();
        }
        return out;
    }
    case Formula::Kind::And: {
        std::vector<const Formula*> order;
        for (auto& a : f.args()) order.push_back(&a);
        std::stable_sort(order.begin(), order.end(), [](const Formula* x, const Formula* y) {
            return (x->kind() == Formula::Kind::Or) < (y->kind() == Formula::Kind::Or);
        });
        std::vector<Conj> acc{Conj{}};
        for (auto* a : order) {
            auto d = dnf_rec(*a, bound, cap);
            std::vector<Conj> next;
            for (auto& x : acc) {
                for (auto& y : d) {
                    Conj z = x;
                    if (!merge(z, y)) continue;
                    if (!y.atoms.empty() && quick_infeasible(z)) continue;
                    next.push_back(std::move(z));
                    if (next.size() > cap) throw DnfTooLarge();
                }
            }
            acc = std::move(next);
            if (acc.empty()) break;
        }
        for (auto& c : acc) dedupe(c);
        return acc;
    }
    case Formula::Kind::Exists:
        if (bound) bound->insert(f.bound().begin(), f.bound().end());
        return dnf_rec(f.body(), bound, cap);
    }
    return {};
}

const Atom kFalseAtom{LinExpr(1), false};

bool ground_false(const Atom& a) {
    return a.e.is_const() && (a.eq ? a.e.constant() != 0 : a.e.constant() > 0);
}

bool mul_ok(I64 a, I64 b) {
    I64 r;
    return !__builtin_mul_overflow(a, b, &r) && r < (I64(1) << 40) && r > -(I64(1) << 40);
}

// a*x + b*y with overflow guard
std::optional<LinExpr> combine(const LinExpr& x, I64 a, const LinExpr& y, I64 b) {
    for (auto& [v, k] : x.terms())
        if (!mul_ok(k, a)) return std::nullopt;
    for (auto& [v, k] : y.terms())
        if (!mul_ok(k, b)) return std::nullopt;
    if (!mul_ok(x.constant(), a) || !mul_ok(y.constant(), b)) return std::nullopt;
    return x * a + y * b;
}

struct FmState {
    std::vector<Atom> eqs;
    std::map<std::vector<std::pair<Var, I64>>, I64> les;  // terms -> tightest constant
    bool infeasible = false;

    void add(const Atom& raw) {
        if (infeasible) return;
        Atom a = tighten(raw);
        if (a.e.is_const()) {
            if (ground_false(a)) infeasible = true;
            return;
        }
        if (a.eq) {
            eqs.push_back(a);
            return;
        }
        auto [it, fresh] = les.emplace(a.e.terms(), a.e.constant());
        if (!fresh) it->second = std::max(it->second, a.e.constant());
    }

    std::vector<Atom> rows() const {
        std::vector<Atom> out = eqs;
        for (auto& [t, c] : les) out.push_back(Atom{LinExpr::from(t, c), false});
        return out;
    }
};

constexpr std::size_t kFmCap = 4000;

// eliminates every variable outside keep; returns the remaining rows
std::optional<std::vector<Atom>> fm_eliminate(const std::vector<Atom>& atoms, const std::set<Var>& keep,
                                              bool& capped) {
    capped = false;
    FmState st;
    std::set<Var> vars;
    atom_vars(atoms, vars);
    for (auto& a : atoms) st.add(a);
    for (Var v : vars) st.add(Atom{LinExpr::var(v, -1), false});
    if (st.infeasible) return std::nullopt;

    while (true) {
        std::vector<Atom> rows = st.rows();
        std::set<Var> live;
        atom_vars(rows, live);
        std::vector<Var> elim;
        for (Var v : live)
            if (!keep.count(v)) elim.push_back(v);
        if (elim.empty()) return rows;

        // equality substitution first, preferring unit coefficients
        const Atom* best = nullptr;
        Var bv = 0;
        I64 bk = 0;
        for (auto& e : st.eqs) {
            for (auto& [v, k] : e.e.terms()) {
                if (keep.count(v)) continue;
                if (!best || std::llabs(k) < std::llabs(bk)) {
                    best = &e;
                    bv = v;
                    bk = k;
                }
            }
        }
        if (best) {
            Atom piv = *best;
            FmState nx;
            for (auto& r : rows) {
                if (r == piv) continue;
                I64 a = r.e.coeff(bv);
                if (a == 0) {
                    nx.add(r);
                    continue;
                }
                I64 s = bk > 0 ? 1 : -1;
                auto c = combine(r.e, std::llabs(bk), piv.e, -a * s);
                if (!c) {
                    capped = true;
                    continue;
                }
                nx.add(Atom{*c, r.eq});
            }
            if (nx.infeasible) return std::nullopt;
            st = std::move(nx);
            continue;
        }

        Var pick = elim.front();
        long best_cost = -1;
        for (Var v : elim) {
            long pos = 0, neg = 0;
            for (auto& r : rows) {
                I64 k = r.e.coeff(v);
                if (k > 0) ++pos;
                if (k < 0) ++neg;
            }
            long cost = pos * neg - pos - neg;
            if (best_cost < 0 || cost < best_cost) {
                best_cost = cost < 0 ? 0 : cost;
                pick = v;
                if (cost <= 0) break;
            }
        }
        std::vector<Atom> pos, neg;
        FmState nx;
        for (auto& r : rows) {
            I64 k = r.e.coeff(pick);
            if (k > 0)
                pos.push_back(r);
            else if (k < 0)
                neg.push_back(r);
            else
                nx.add(r);
        }
        for (auto& p : pos) {
            for (auto& n : neg) {
                I64 a = p.e.coeff(pick), b = -n.e.coeff(pick);
                auto c = combine(p.e, b, n.e, a);
                if (!c) {
                    capped = true;
                    continue;
                }
                nx.add(Atom{*c, false});
            }
        }
        if (nx.infeasible) return std::nullopt;
        if (nx.eqs.size() + nx.les.size() > kFmCap) {
            capped = true;
            return st.rows();
        }
        st = std::move(nx);
    }
}

}  // namespace

std::vector<Conj> to_dnf(const Formula& f, std::set<Var>* bound, std::size_t cap) {
    return dnf_rec(f, bound, cap);
}

Atom tighten(const Atom& a) {
    I64 g = 0;
    for (auto& [v, k] : a.e.terms()) g = std::gcd(g, std::llabs(k));
    if (g == 0) return a;
    I64 c = a.e.constant();
    std::vector<std::pair<Var, I64>> t;
    if (a.eq) {
        if (c % g != 0) return kFalseAtom;
        I64 s = a.e.terms().front().second > 0 ? 1 : -1;
        for (auto& [v, k] : a.e.terms()) t.push_back({v, s * k / g});
        return Atom{LinExpr::from(std::move(t), s * c / g), true};
    }
    if (g == 1) return a;
    for (auto& [v, k] : a.e.terms()) t.push_back({v, k / g});
    return Atom{LinExpr::from(std::move(t), ceil_div(c, g)), false};
}

Atom subst_atom(const Atom& a, const std::map<Var, I64>& values) {
    std::vector<std::pair<Var, I64>> t;
    I64 c = a.e.constant();
    for (auto& [v, k] : a.e.terms()) {
        auto it = values.find(v);
        if (it == values.end())
            t.push_back({v, k});
        else
            c += k * it->second;
    }
    return Atom{LinExpr::from(std::move(t), c), a.eq};
}

void atom_vars(const std::vector<Atom>& atoms, std::set<Var>& out) {
    for (auto& a : atoms)
        for (auto& [v, k] : a.e.terms()) out.insert(v);
}

Sat fm_check(const std::vector<Atom>& atoms) {
    bool capped = false;
    auto r = fm_eliminate(atoms, {}, capped);
    if (!r) return Sat::Infeasible;
    return capped ? Sat::Capped : Sat::Feasible;
}

std::optional<std::pair<I64, I64>> fm_range(const std::vector<Atom>& atoms, Var v, I64 cap) {
    bool capped = false;
    auto r = fm_eliminate(atoms, {v}, capped);
    if (!r) return std::nullopt;
    I64 lo = 0, hi = cap;
    if (capped) return std::make_pair(lo, hi);
    for (auto& a : *r) {
        I64 k = a.e.coeff(v);
        if (k == 0 || a.e.terms().size() != 1) continue;
        I64 c = a.e.constant();
        if (a.eq) {
            if (c % k != 0) return std::nullopt;
            lo = std::max(lo, -c / k);
            hi = std::min(hi, -c / k);
        } else if (k > 0) {
            hi = std::min(hi, floor_div(-c, k));
        } else {
            lo = std::max(lo, ceil_div(c, -k));
        }
    }
    if (lo > hi) return std::nullopt;
    return std::make_pair(lo, hi);
}

namespace {

struct Search {
    I64 bound;
    long budget = 200000;

    bool run(std::vector<Atom> atoms, std::map<Var, I64>& model) {
        if (--budget < 0) return false;
        std::vector<Atom> cur;
        for (auto& a : atoms) {
            Atom t = tighten(subst_atom(a, model));
            if (t.e.is_const()) {
                if (ground_false(t)) return false;
                continue;
            }
            cur.push_back(t);
        }
        if (cur.empty()) return true;

        for (auto& e : cur) {
            if (!e.eq) continue;
            for (auto& [v, k] : e.e.terms()) {
                if (k != 1 && k != -1) continue;
                // v = -(e - k v) / k
                LinExpr val = (e.e - LinExpr::var(v, k)) * (-k);
                std::vector<Atom> next;
                for (auto& a : cur)
                    if (!(a == e)) next.push_back(Atom{a.e.substitute(v, val), a.eq});
                next.push_back(Atom{val * -1, false});
                next.push_back(Atom{val - LinExpr(bound), false});
                std::map<Var, I64> inner = model;
                if (!run(next, inner)) return false;
                inner[v] = eval_expr(val, inner);
                model = std::move(inner);
                return true;
            }
        }

        if (fm_check(cur) == Sat::Infeasible) return false;
        std::set<Var> vars;
        atom_vars(cur, vars);
        std::map<Var, int> occ;
        for (auto& a : cur)
            for (auto& [v, k] : a.e.terms()) ++occ[v];
        Var x = *vars.begin();
        for (Var v : vars)
            if (occ[v] > occ[x]) x = v;
        auto r = fm_range(cur, x, bound);
        if (!r) return false;
        for (I64 val = r->first; val <= r->second; ++val) {
            std::map<Var, I64> inner = model;
            inner[x] = val;
            if (run(cur, inner)) {
                model = std::move(inner);
                return true;
            }
            if (budget < 0) return false;
        }
        return false;
    }
};

}  // namespace

std::optional<std::map<Var, I64>> int_model(const std::vector<Atom>& atoms, I64 bound) {
    std::set<Var> vars;
    atom_vars(atoms, vars);
    std::vector<Atom> all = atoms;
    for (Var v : vars) all.push_back(Atom{LinExpr::var(v) - LinExpr(bound), false});
    Search s{bound};
    std::map<Var, I64> model;
    if (!s.run(all, model)) return std::nullopt;
    for (Var v : vars) model.try_emplace(v, 0);
    return model;
}

bool holds_dnf(const std::vector<Conj>& dnf, const Assignment& a, I64 bound) {
    for (auto& c : dnf) {
        bool ok = true;
        for (auto& [v, b] : c.bools) {
            auto it = a.bools.find(v);
            if (it != a.bools.end() && it->second != b) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        std::vector<Atom> rest;
        for (auto& at : c.atoms) {
            Atom s = tighten(subst_atom(at, a.nats));
            if (s.e.is_const()) {
                if (ground_false(s)) {
                    ok = false;
                    break;
                }
                continue;
            }
            rest.push_back(s);
        }
        if (!ok) continue;
        if (rest.empty() || int_model(rest, bound)) return true;
    }
    return false;
}

bool entails(const std::vector<Atom>& atoms, const Atom& a) {
    std::vector<Atom> x = atoms;
    x.push_back(Atom{a.e * -1 + LinExpr(1), false});
    if (fm_check(x) != Sat::Infeasible) return false;
    if (!a.eq) return true;
    std::vector<Atom> y = atoms;
    y.push_back(Atom{a.e + LinExpr(1), false});
    return fm_check(y) == Sat::Infeasible;
}

}  // namespace copro
