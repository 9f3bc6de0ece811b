#include "copro/solver.hpp"

#include <algorithm>

namespace copro {

namespace {

using I64 = std::int64_t;

Var max_var(const Atom& a) {
    Var m = 0;
    for (auto& [v, k] : a.e.terms()) m = std::max(m, v);
    return m;
}

bool atom_less(const Atom& x, const Atom& y) {
    Var mx = max_var(x), my = max_var(y);
    if (mx != my) return mx < my;
    if (x.eq != y.eq) return x.eq;
    return x < y;
}

std::vector<Atom> negate_atom(const Atom& a) {
    std::vector<Atom> out{Atom{a.e * -1 + LinExpr(1), false}};
    if (a.eq) out.push_back(Atom{a.e + LinExpr(1), false});
    return out;
}

// exact integer projection of x, or nullopt when the shadow would not be exact
std::optional<std::vector<Atom>> project_exact(const std::vector<Atom>& atoms, Var x) {
    for (auto& a : atoms) {
        if (!a.eq) continue;
        I64 k = a.e.coeff(x);
        if (k == 0) continue;
        if (k != 1 && k != -1) return std::nullopt;
        LinExpr val = (a.e - LinExpr::var(x, k)) * (-k);
        std::vector<Atom> out;
        for (auto& b : atoms)
            if (!(b == a)) out.push_back(tighten(Atom{b.e.substitute(x, val), b.eq}));
        out.push_back(tighten(Atom{val * -1, false}));
        return out;
    }
    std::vector<Atom> uppers, lowers, rest;
    for (auto& a : atoms) {
        I64 k = a.e.coeff(x);
        if (k > 0)
            uppers.push_back(a);
        else if (k < 0)
            lowers.push_back(a);
        else
            rest.push_back(a);
    }
    lowers.push_back(Atom{LinExpr::var(x, -1), false});
    bool unit_up = std::all_of(uppers.begin(), uppers.end(), [&](const Atom& a) { return a.e.coeff(x) == 1; });
    bool unit_lo = std::all_of(lowers.begin(), lowers.end(), [&](const Atom& a) { return a.e.coeff(x) == -1; });
    if (!unit_up && !unit_lo) return std::nullopt;
    for (auto& u : uppers)
        for (auto& l : lowers) {
            I64 a = u.e.coeff(x), b = -l.e.coeff(x);
            rest.push_back(tighten(Atom{u.e * b + l.e * a, false}));
        }
    return rest;
}

bool ground_false(const Atom& a) { return a.e.is_const() && (a.eq ? a.e.constant() != 0 : a.e.constant() > 0); }

// projects the bound variables of one disjunct; nullopt when the disjunct is unsatisfiable
std::optional<std::vector<Atom>> project_conj(std::vector<Atom> atoms, const std::set<Var>& bound,
                                              std::set<Var>& residual, bool& capped) {
    std::set<Var> stuck;
    while (true) {
        std::vector<Atom> clean;
        for (auto& a : atoms) {
            Atom t = tighten(a);
            if (t.e.is_const()) {
                if (ground_false(t)) return std::nullopt;
                continue;
            }
            clean.push_back(t);
        }
        std::sort(clean.begin(), clean.end());
        clean.erase(std::unique(clean.begin(), clean.end()), clean.end());
        atoms = std::move(clean);
        if (atoms.size() > 600) {
            capped = true;
            break;
        }
        std::set<Var> live;
        atom_vars(atoms, live);
        // unit equalities first, then the cheapest exact shadow
        Var pick = 0;
        std::size_t best = SIZE_MAX;
        for (Var v : live) {
            if (!bound.count(v) || stuck.count(v)) continue;
            std::size_t up = 0, lo = 1;
            bool eq = false;
            for (auto& a : atoms) {
                I64 k = a.e.coeff(v);
                if (k == 0) continue;
                if (a.eq) eq = true;
                (k > 0 ? up : lo)++;
            }
            std::size_t cost = eq ? 0 : up * lo + 1;
            if (cost < best) {
                best = cost;
                pick = v;
            }
        }
        if (best == SIZE_MAX) break;
        auto r = project_exact(atoms, pick);
        if (!r) {
            stuck.insert(pick);
            continue;
        }
        atoms = std::move(*r);
    }
    if (fm_check(atoms) == Sat::Infeasible) return std::nullopt;
    std::set<Var> live;
    atom_vars(atoms, live);
    for (Var v : live)
        if (bound.count(v)) residual.insert(v);
    return atoms;
}

std::vector<Atom> drop_redundant(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(), atom_less);
    for (int pass = 0; pass < 2; ++pass) {
        bool eqs = pass == 1;
        for (std::size_t i = atoms.size(); i-- > 0;) {
            if (atoms[i].eq != eqs) continue;
            std::vector<Atom> others;
            for (std::size_t j = 0; j < atoms.size(); ++j)
                if (j != i) others.push_back(atoms[j]);
            if (entails(others, atoms[i])) atoms.erase(atoms.begin() + static_cast<long>(i));
        }
    }
    return atoms;
}

bool conj_implies(const Conj& a, const Conj& b) {
    for (auto& [v, val] : b.bools) {
        auto it = a.bools.find(v);
        if (it == a.bools.end() || it->second != val) return false;
    }
    for (auto& t : b.atoms)
        if (!entails(a.atoms, t)) return false;
    return true;
}

}  // namespace

Formula Normalized::to_formula() const {
    std::vector<Formula> ds;
    for (auto& c : disjuncts) {
        std::vector<Formula> xs;
        for (auto& [v, b] : c.bools) xs.push_back(Formula::boolean(v, b));
        for (auto& a : c.atoms) xs.push_back(Formula::atom(a));
        ds.push_back(Formula::conj(std::move(xs)));
    }
    return Formula::exists(residual, Formula::disj(std::move(ds)));
}

Normalized normalize(const Formula& f) {
    std::set<Var> bound;
    auto dnf = to_dnf(f, &bound);
    Normalized out;
    std::set<Var> residual;
    std::vector<Conj> kept;
    for (auto& c : dnf) {
        Conj n;
        for (auto& [v, b] : c.bools)
            if (!bound.count(v)) n.bools[v] = b;
        auto atoms = project_conj(c.atoms, bound, residual, out.capped);
        if (!atoms) continue;
        n.atoms = drop_redundant(std::move(*atoms));
        kept.push_back(std::move(n));
    }
    // drop disjuncts implied by another one
    std::vector<bool> gone(kept.size(), false);
    for (std::size_t i = 0; i < kept.size(); ++i) {
        for (std::size_t j = 0; j < kept.size() && !gone[i]; ++j) {
            if (i == j || gone[j]) continue;
            if (conj_implies(kept[i], kept[j]) && (!conj_implies(kept[j], kept[i]) || j < i)) gone[i] = true;
        }
    }
    for (std::size_t i = 0; i < kept.size(); ++i)
        if (!gone[i]) out.disjuncts.push_back(kept[i]);
    // a true disjunct absorbs the rest
    for (auto& c : out.disjuncts)
        if (c.bools.empty() && c.atoms.empty()) {
            out.disjuncts = {Conj{}};
            break;
        }
    out.residual.assign(residual.begin(), residual.end());
    return out;
}

std::string Verdict::kind_str() const {
    switch (kind) {
    case Kind::Proved: return "proved";
    case Kind::Counterexample: return "counterexample";
    case Kind::Unknown: return "unknown";
    }
    return "unknown";
}

nlohmann::json Verdict::to_json() const {
    nlohmann::json j;
    j["verdict"] = kind_str();
    if (kind == Kind::Counterexample) {
        nlohmann::json c = nlohmann::json::object();
        for (auto& [k, v] : named) c[k] = v;
        j["counterexample"] = c;
    } else {
        j["counterexample"] = nullptr;
    }
    j["bound"] = bound;
    j["simplified"] = simplified;
    return j;
}

namespace {

struct Search {
    const std::vector<Conj>& concl;  // quantifier-free disjuncts usable for negation
    I64 bound;
    std::vector<std::pair<std::map<Var, bool>, std::map<Var, I64>>> cexs;
    bool unresolved = false;
    long budget = 400000;

    std::map<Var, bool> bools;
    std::vector<Atom> atoms;

    void leaf() {
        Sat s = fm_check(atoms);
        if (s == Sat::Infeasible) return;
        auto m = int_model(atoms, bound);
        if (m)
            cexs.push_back({bools, *m});
        else
            unresolved = true;
    }

    void dfs(std::size_t j) {
        if (--budget < 0) {
            unresolved = true;
            return;
        }
        if (j == concl.size()) {
            leaf();
            return;
        }
        const Conj& c = concl[j];
        for (auto& [v, b] : c.bools) {
            auto it = bools.find(v);
            if (it != bools.end() && it->second != b) {
                dfs(j + 1);
                return;
            }
        }
        // already false in this case
        for (auto& a : c.atoms) {
            atoms.push_back(a);
            bool dead = fm_check(atoms) == Sat::Infeasible;
            atoms.pop_back();
            if (dead) {
                dfs(j + 1);
                return;
            }
        }
        // branch i negates literal i and keeps the earlier ones, so branches do not overlap
        std::vector<Var> fixed;
        std::size_t pushed = 0;
        bool open = true;
        for (auto& [v, b] : c.bools) {
            if (bools.count(v)) continue;
            bools[v] = !b;
            dfs(j + 1);
            bools[v] = b;
            fixed.push_back(v);
        }
        for (auto& a : c.atoms) {
            if (!open) break;
            for (auto& n : negate_atom(a)) {
                atoms.push_back(n);
                if (fm_check(atoms) != Sat::Infeasible) dfs(j + 1);
                atoms.pop_back();
            }
            atoms.push_back(a);
            ++pushed;
            open = fm_check(atoms) != Sat::Infeasible;
        }
        atoms.resize(atoms.size() - pushed);
        for (Var v : fixed) bools.erase(v);
    }
};

void free_vars(const std::vector<Conj>& dnf, const std::set<Var>& bound, std::set<Var>& nats, std::set<Var>& bls) {
    for (auto& c : dnf) {
        for (auto& [v, b] : c.bools)
            if (!bound.count(v)) bls.insert(v);
        for (auto& a : c.atoms)
            for (auto& [v, k] : a.e.terms())
                if (!bound.count(v)) nats.insert(v);
    }
}

void present_values(const Layout& l, const Assignment& a, const std::map<Var, std::string>& names,
                    std::map<std::string, I64>& out) {
    if (l.is_leaf()) {
        auto it = a.nats.find(l.var);
        out[names.at(l.var)] = it == a.nats.end() ? 0 : it->second;
        return;
    }
    auto it = a.bools.find(l.var);
    bool on = it != a.bools.end() && it->second;
    out[names.at(l.var)] = on ? 1 : 0;
    if (on)
        for (auto& c : l.children) present_values(c, a, names, out);
}

}  // namespace

Verdict implies(const Formula& hyp, const Formula& concl, I64 bound, Ends ends) {
    Verdict v;
    v.bound = bound;
    std::set<Var> hb, cb;
    std::vector<Conj> H, Craw;
    Normalized C;
    try {
        H = to_dnf(hyp, &hb);
        Craw = to_dnf(concl, &cb);
        C = normalize(concl);
    } catch (const DnfTooLarge& e) {
        v.kind = Verdict::Kind::Unknown;
        v.reason = e.what();
        return v;
    }
    std::set<Var> residual(C.residual.begin(), C.residual.end());
    std::vector<Conj> usable;
    for (auto& c : C.disjuncts) {
        std::set<Var> vs;
        atom_vars(c.atoms, vs);
        bool uses = std::any_of(vs.begin(), vs.end(), [&](Var x) { return residual.count(x) > 0; });
        if (!uses) usable.push_back(c);
    }
    const bool concl_exact = usable.size() == C.disjuncts.size() && !C.capped;
    std::stable_sort(usable.begin(), usable.end(), [](const Conj& a, const Conj& b) {
        return a.bools.size() + a.atoms.size() < b.bools.size() + b.atoms.size();
    });

    std::set<Var> fn, fb;
    free_vars(H, {}, fn, fb);
    free_vars(Craw, cb, fn, fb);

    bool unresolved = C.capped && !concl_exact;
    std::vector<Assignment> found;
    for (auto& D : H) {
        if (fm_check(D.atoms) == Sat::Infeasible) continue;
        Search s{usable, bound, {}, false, 400000, D.bools, D.atoms};
        s.dfs(0);
        unresolved = unresolved || s.unresolved;
        for (auto& [bs, ns] : s.cexs) {
            Assignment a;
            for (Var x : fn) a.nats[x] = 0;
            for (Var x : fb) a.bools[x] = false;
            for (auto& [x, val] : ns) a.nats[x] = val;
            for (auto& [x, val] : bs) a.bools[x] = val;
            // the conclusion must really fail, including any disjunct that kept quantifiers
            if (holds_dnf(Craw, a, bound + 16)) {
                unresolved = true;
                continue;
            }
            found.push_back(std::move(a));
        }
    }
    if (!found.empty()) {
        std::vector<Var> keyvars;
        if (ends.in) ends.in->vars(keyvars);
        if (ends.out) ends.out->vars(keyvars);
        if (keyvars.empty()) keyvars.assign(fn.begin(), fn.end());
        auto key = [&](const Assignment& a) {
            std::vector<I64> k;
            I64 mx = 0, sum = 0;
            for (Var x : keyvars) {
                I64 val = a.nats.count(x) ? a.nats.at(x) : (a.bools.count(x) && a.bools.at(x) ? 1 : 0);
                mx = std::max(mx, val);
                sum += val;
                k.push_back(val);
            }
            k.insert(k.begin(), {mx, sum});
            return k;
        };
        auto best = std::min_element(found.begin(), found.end(),
                                     [&](const Assignment& a, const Assignment& b) { return key(a) < key(b); });
        v.kind = Verdict::Kind::Counterexample;
        v.assignment = *best;
        if (ends.in && ends.out) {
            v.levels = std::make_pair(read_level(*ends.in, *best), read_level(*ends.out, *best));
            auto names = layout_names(*ends.in, "I");
            auto on = layout_names(*ends.out, "O");
            names.insert(on.begin(), on.end());
            present_values(*ends.in, *best, names, v.named);
            present_values(*ends.out, *best, names, v.named);
        } else {
            for (Var x : fn) v.named["x" + std::to_string(x)] = best->nats.at(x);
        }
        return v;
    }
    if (unresolved) {
        v.kind = Verdict::Kind::Unknown;
        v.reason = concl_exact ? "no counterexample within bound " + std::to_string(bound)
                               : "conclusion keeps quantifiers that could not be projected exactly";
        return v;
    }
    v.kind = Verdict::Kind::Proved;
    return v;
}

Verdict subset(const Productivity& p1, const Productivity& p2, I64 bound) {
    if (p1.dom != p2.dom || p1.cod != p2.cod)
        throw TypeError("subset: " + p1.dom.str() + " -> " + p1.cod.str() + " vs " + p2.dom.str() + " -> " +
                        p2.cod.str());
    Verdict v = implies(p1.body, p2.at(p1.in, p1.out), bound, Ends{&p1.in, &p1.out});
    try {
        v.simplified = simplify_for_display(p1);
    } catch (const DnfTooLarge&) {
        v.simplified = "<too large>";
    }
    return v;
}

Verdict check_one_productive(const Productivity& p, I64 bound) {
    if (p.dom != p.cod) throw TypeError("fixed point needs equal domain and codomain, got " + p.dom.str() + " -> " +
                                        p.cod.str());
    return subset(p, prod_uz(1, p.dom, p.cod), bound);
}

std::pair<int, Verdict> check_one_over_n(const Productivity& p, int n_max, I64 bound) {
    if (p.dom != p.cod) throw TypeError("fixed point needs equal domain and codomain, got " + p.dom.str() + " -> " +
                                        p.cod.str());
    Verdict last;
    Productivity target = prod_uz(1, p.dom, p.cod);
    for (int n = 1; n <= n_max; ++n) {
        last = subset(rel_power(p, n), target, bound);
        if (last.proved()) return {n, last};
    }
    return {n_max, last};
}

bool bounded_oracle(const Productivity& p1, const Productivity& p2, std::uint64_t depth_bound,
                    std::pair<Level, Level>* witness) {
    auto ins = enumerate_levels(p1.dom, depth_bound);
    auto outs = enumerate_levels(p1.cod, depth_bound);
    for (auto& a : ins)
        for (auto& b : outs)
            if (check_member(p1, a, b) && !check_member(p2, a, b)) {
                if (witness) *witness = {a, b};
                return false;
            }
    return true;
}

std::string print_normalized(const Normalized& n, const std::map<Var, std::string>& names) {
    std::map<Var, std::string> nm = names;
    std::string prefix;
    if (!n.residual.empty()) {
        prefix = "exists";
        int k = 1;
        for (Var v : n.residual) {
            nm[v] = "v" + std::to_string(k++);
            prefix += " " + nm[v];
        }
        prefix += " . ";
    }
    if (n.disjuncts.empty()) return prefix + "false";
    if (n.is_true()) return "true";
    std::vector<std::string> ds;
    for (auto& c : n.disjuncts) {
        std::vector<std::string> parts;
        for (auto& [v, b] : c.bools) parts.push_back(nm.count(v) ? nm.at(v) + (b ? " = true" : " = false")
                                                                 : "x" + std::to_string(v) + (b ? " = true" : " = false"));
        std::vector<Atom> atoms = c.atoms;
        std::sort(atoms.begin(), atoms.end(), atom_less);
        for (auto& a : atoms) parts.push_back(print_atom(a, nm));
        std::string s;
        for (auto& p : parts) s += (s.empty() ? "" : " & ") + p;
        if (s.empty()) s = "true";
        ds.push_back(s);
    }
    std::sort(ds.begin(), ds.end());
    if (ds.size() == 1) return prefix + ds[0];
    std::string s;
    for (auto& d : ds) s += (s.empty() ? "" : " \\/ ") + ("(" + d + ")");
    return prefix + s;
}

std::string simplify_for_display(const Productivity& p) {
    auto names = layout_names(p.in, "I");
    auto on = layout_names(p.out, "O");
    names.insert(on.begin(), on.end());
    return print_normalized(normalize(p.body), names);
}

}  // namespace copro
