#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "copro/ctt.hpp"
#include "copro/formula.hpp"

namespace copro {

// one nat variable per leaf path, one presence variable per node path
struct Layout {
    Ctt ctt;
    Var var = 0;
    std::vector<Layout> children;

    static Layout fresh(const Ctt& c);
    bool is_leaf() const { return ctt.is_leaf(); }
    const Layout& child(std::size_t i) const { return children.at(i); }
    void vars(std::vector<Var>& out) const;
    void nat_vars(std::vector<Var>& out) const;
    void bool_vars(std::vector<Var>& out) const;
};

std::map<Var, Var> layout_map(const Layout& from, const Layout& to);

struct AffineSpec {
    std::int64_t alpha = 1;
    std::int64_t beta = 0;
    std::int64_t gamma = 1;
    std::int64_t tau = 0;

    static AffineSpec shift(std::int64_t m);
    std::optional<std::int64_t> apply(std::int64_t n) const;
    std::string str() const;
};

struct ProdTag {
    enum class Kind { Untagged, UZ, U, Case, Trivial, Empty };
    Kind kind = Kind::Untagged;
    std::int64_t m = 0;
    AffineSpec f;
};

struct DnfCache;

struct Productivity {
    Ctt dom;
    Ctt cod;
    Layout in;
    Layout out;
    Formula body;
    ProdTag tag;
    std::shared_ptr<DnfCache> cache;

    // the body with the end layouts renamed to i and o and all bound variables fresh
    Formula at(const Layout& i, const Layout& o) const;
};

Productivity make_prod(const Ctt& dom, const Ctt& cod,
                       const std::function<Formula(const Layout&, const Layout&)>& build,
                       ProdTag tag = {});

// level-shaped helper encodings
Formula enc_eq(const Layout& a, const Layout& b);
Formula enc_is_bot(const Layout& a);
Formula enc_le_bot(const Layout& a);
Formula enc_each(const Layout& a, const LinExpr& n);
Formula enc_inactive(const std::vector<Var>& guards);

struct LeafVar {
    Var var;
    std::vector<Var> guards;
};
std::vector<LeafVar> leaf_vars(const Layout& l);

// N is the least n with l <= level_each(n); emits one disjunct per choice of maximal active leaf
Formula enc_max_cases(const Layout& l, const std::function<Formula(const LinExpr&)>& k);

Productivity prod_u(const AffineSpec& f, const Ctt& dom, const Ctt& cod);
Productivity prod_uz(std::int64_t m, const Ctt& dom, const Ctt& cod);
Productivity prod_case(const Productivity& p1, const Productivity& p2);
Productivity prod_trivial(const Ctt& dom, const Ctt& cod);
Productivity prod_empty(const Ctt& dom, const Ctt& cod);

Productivity rel_ident(const Ctt& c);
Productivity rel_compose(const Productivity& p1, const Productivity& p2);
Productivity rel_power(const Productivity& p, int n);
Productivity rel_union(const Productivity& p1, const Productivity& p2);
Productivity rel_fpair(const Productivity& p1, const Productivity& p2);
Productivity rel_fproduct(const Productivity& p1, const Productivity& p2);
Productivity rel_fcopair(const Productivity& p1, const Productivity& p2);
Productivity rel_fcoproduct(const Productivity& p1, const Productivity& p2);
Productivity rel_if(bool b, const Productivity& p1, const Productivity& p2);

Productivity rel_fst(const Ctt& dom);
Productivity rel_snd(const Ctt& dom);
Productivity rel_pair_l(const Ctt& left, const Ctt& right);
Productivity rel_pair_r(const Ctt& left, const Ctt& right);
Productivity rel_inl(const Ctt& left, const Ctt& right);
Productivity rel_inr(const Ctt& left, const Ctt& right);
Productivity rel_comm(const Ctt& dom);
Productivity rel_assoc(const Ctt& dom);
Productivity rel_antiassoc(const Ctt& dom);
Productivity rel_curry(const Productivity& p);
Productivity rel_uncurry(const Productivity& p, const Ctt& first);
Productivity rel_fmap(const Spf& spf, const Productivity& p);
Productivity rel_cnif(const ConstType& a, const Productivity& p1, const Productivity& p2);

Productivity rel_ceapp(const Ctt& dom);
Productivity rel_cgeapp(const Ctt& dom);
Productivity rel_cecurry(const Productivity& p);
Productivity rel_cgecurry(const Productivity& p);
Productivity rel_ceswap(const ConstType& a, const std::vector<Productivity>& cases);
Productivity rel_ceproj(const Ctt& dom);
Productivity rel_cepair(const Ctt& dom);

Productivity rel_ctor(const CotypeDef& def);
Productivity rel_dtor(const CotypeDef& def, const Position& pos);

// drops pairs whose input or output level is bottom-equivalent
Productivity rel_prune(const Productivity& p);

// level <-> variable assignment
void assign_level(const Layout& lay, const Level& l, Assignment& a);
Level read_level(const Layout& lay, const Assignment& a);

bool check_member(const Productivity& p, const Level& l1, const Level& l2);

struct AscResult {
    bool holds;
    std::string justification;
};
AscResult asc_check(const Ctt& cod);

// variable naming for display
std::map<Var, std::string> layout_names(const Layout& lay, const std::string& side);
std::string print_atom(const Atom& a, const std::map<Var, std::string>& names);
std::string print_formula(const Formula& f, const std::map<Var, std::string>& names);

}  // namespace copro
