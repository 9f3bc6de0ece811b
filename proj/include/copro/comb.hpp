#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "copro/prod.hpp"
#include "copro/runtime.hpp"
#include "copro/solver.hpp"

namespace copro {

// source location carried by AST nodes for error messages
struct Loc {
    int line = 0;
    int col = 0;
    std::string str() const { return std::to_string(line) + ":" + std::to_string(col); }
};

class CombError : public TypeError {
public:
    CombError(const Loc& loc, const std::string& msg)
        : TypeError(loc.line ? loc.str() + ": " + msg : msg), loc_(loc) {}
    const Loc& loc() const { return loc_; }

private:
    Loc loc_;
};

struct PrimFn {
    std::string name;
    // result type for a given argument type, nullopt when the prim does not apply
    std::function<std::optional<ConstType>(const ConstType&)> result;
    std::function<Val(const Val&)> run;
};

const PrimFn* find_prim(const std::string& name);
std::vector<std::string> prim_names();
PrimFn literal_prim(const Val& v, const ConstType& t);

struct Guard {
    enum class Kind { Eq, Lt, Ge, Prim, Else };
    Kind kind = Kind::Else;
    std::int64_t k = 0;
    std::string prim;

    bool test(const Val& v) const;
    std::string str() const;
};

struct Literal {
    Val value;
    Ctt ctt;
};

struct Comb;
using CombP = std::shared_ptr<const Comb>;

struct Comb {
    enum class Kind {
        Id, Comp, Const, Fst, Snd, PairL, PairR, Fpair, Fproduct, Inl, Inr, Fcopair, Fcoproduct,
        Comm, Assoc, Antiassoc, Cuncurry, Fmap, Cnif, If, Ceapp, Cecurry, Cgeapp, Cgecurry, Ceswap,
        Ceproj, Cepair, Prim, Opaque, Fold, Unfold, Dtor, Call, Adds
    };

    Kind kind = Kind::Id;
    std::vector<CombP> kids;
    Loc loc;

    std::optional<Literal> lit;           // Const, PairL, PairR, Ceproj
    std::optional<Ctt> other;             // the omitted side of Inl / Inr
    std::optional<Spf> spf;               // Fmap
    std::optional<ConstType> type;        // exponent arity or cnif guard type
    std::vector<Guard> guards;            // Cnif (one), Ceswap (one per kid)
    bool flag = false;                    // If
    std::string name;                     // Prim, Fold, Unfold, Dtor, Call
    int index = 0;                        // Dtor position, Adds count
    std::optional<PrimFn> prim;           // resolved Prim / Cgeapp
    const CotypeDef* def = nullptr;       // Fold, Unfold, Dtor

    // filled in by typecheck
    std::optional<Ctt> dom;
    std::optional<Ctt> cod;

    std::string str() const;
};

CombP mk(Comb c);
CombP mk(Comb::Kind k, std::vector<CombP> kids = {}, Loc loc = {});
CombP comp(std::vector<CombP> fs, Loc loc = {});

struct SoComb;
using SoCombP = std::shared_ptr<const SoComb>;

struct SoComb {
    enum class Kind { Lift, SfSelf, SoComp, SoFpair, SoFproduct, SoFcopair, SoFcoproduct, SfMap, SfEcurry };
    Kind kind = Kind::SfSelf;
    std::vector<SoCombP> kids;
    CombP lifted;
    std::optional<Spf> spf;
    std::optional<ConstType> type;
    Loc loc;

    std::optional<Ctt> dom;
    std::optional<Ctt> cod;
};

SoCombP mk_so(SoComb s);

struct Certificate {
    enum class Kind { OneProductive, OneOverN, SecondOrder, Alias };
    Kind kind = Kind::OneProductive;
    int n = 1;
    std::vector<std::pair<std::string, Verdict>> obligations;
    std::optional<Productivity> derived;
    std::optional<Productivity> expected;
    std::string asc;

    std::string kind_str() const;
};

enum class Status { Accepted, Rejected, Unknown };
std::string status_str(Status s);

struct FunEntry {
    std::string name;
    Ctt dom;
    Ctt cod;
    Productivity prod;
    Val fn;
    Certificate cert;
    Status status = Status::Accepted;
    bool built = false;
    CombP generator;          // alias body
    SoCombP so_generator;     // second-order generator
};

struct ValEntry {
    std::string name;
    Ctt ctt;
    Val value;
    Certificate cert;
    Status status = Status::Accepted;
    bool built = false;
    CombP generator;
};

struct Options {
    std::int64_t bound = kDefaultBound;
    int n_max = 4;
    std::uint64_t fuel = kDefaultFuel;
    bool build_unchecked = false;
};

struct FixOutcome {
    Status status = Status::Accepted;
    Certificate cert;
    Verdict verdict;          // the deciding verdict, the failing one on rejection
    std::string failed;       // which obligation failed
    std::string simplified;   // display form of the derived productivity
    bool built = false;
};

class Env {
public:
    Env() = default;
    Env(const Env&) = delete;
    Env& operator=(const Env&) = delete;

    CotypeRegistry cotypes;
    Options opts;

    const CotypeDef& add_cotype(const std::string& name, const Stt& stt, std::string ctor = {},
                                std::vector<std::string> dtors = {});
    // constructor and destructor combinators by name
    std::map<std::string, CombP> builtin_ctors(const CotypeDef& def) const;

    const FunEntry* fun(const std::string& name) const;
    const ValEntry* val(const std::string& name) const;
    CombP ctor_or_dtor(const std::string& name) const;
    bool defined(const std::string& name) const;

    void register_fun(FunEntry e);
    void register_val(ValEntry e);

    const std::vector<std::string>& order() const { return order_; }

private:
    std::map<std::string, FunEntry> funs_;
    std::map<std::string, ValEntry> vals_;
    std::map<std::string, CombP> ctors_;
    std::vector<std::string> order_;
};

// Comb with a known domain; returns a copy annotated with dom/cod at every node
CombP typecheck(const CombP& t, const Ctt& dom, const Env& env);
// domain implied by the comb itself, when it has one
std::optional<Ctt> infer_dom(const CombP& t, const Env& env);

Val::Fun evaluate(const CombP& typed, const Env& env);
Productivity derive(const CombP& typed, const Env& env);

// self type is (c1 -> c2); dom is the argument CTT of the produced function
SoCombP so_typecheck(const SoCombP& t, const Ctt& c1, const Ctt& c2, const Ctt& dom, const Env& env);
std::function<Val::Fun(const Val&)> so_evaluate(const SoCombP& typed, const Env& env);
std::pair<Productivity, Productivity> so_derive(const SoCombP& typed, const Productivity& p0, const Env& env);

bool inhabited(const Ctt& c);

FixOutcome define_fix_first_order(Env& env, const std::string& name, const Ctt& c, const CombP& f);
FixOutcome define_fix_second_order(Env& env, const std::string& name, const Ctt& c1, const Ctt& c2,
                                   const SoCombP& f, const Productivity& expected);
// a named combinator with a checked productivity claim
FixOutcome define_alias(Env& env, const std::string& name, const CombP& f, const Ctt& dom,
                        const std::optional<Productivity>& expected);

// applies a checked fixed-point value of a first-order definition's generator
Val apply_generator(const Env& env, const ValEntry& v, const Val& x);

}  // namespace copro
