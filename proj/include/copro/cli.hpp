#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "copro/comb.hpp"

namespace copro::cli {

struct Sexp {
    bool list = false;
    std::string atom;
    std::vector<Sexp> items;
    Loc loc;

    bool is(const std::string& a) const { return !list && atom == a; }
    bool head_is(const std::string& a) const { return list && !items.empty() && items[0].is(a); }
    std::string str() const;
};

std::vector<Sexp> read_sexps(const std::string& text);

struct Report {
    std::string name;
    std::string form;  // def, cofun or let
    FixOutcome outcome;
};

class Program {
public:
    explicit Program(Options opts = {});

    Env env;
    std::vector<Report> reports;

    // processes the toplevel forms in order; throws CombError on syntax and type errors
    void load(const std::string& text);
    void load_file(const std::string& path);

    ConstType parse_const(const Sexp& s) const;
    Ctt parse_ctt(const Sexp& s) const;
    Stt parse_stt(const Sexp& s) const;
    Literal parse_literal(const Sexp& s) const;
    CombP parse_comb(const Sexp& s) const;
    SoCombP parse_so(const Sexp& s) const;
    Productivity parse_prod(const Sexp& s, const Ctt& dom, const Ctt& cod) const;

    // the derived productivity shown by `prod`
    Productivity derived(const std::string& name) const;
    bool is_macro(const std::string& name) const { return macros_.count(name) > 0; }

private:
    void toplevel(const Sexp& s);
    Guard parse_guard(const Sexp& s) const;
    Spf parse_functor(const Sexp& s) const;
    const PrimFn& prim_named(const Sexp& s) const;

    std::map<std::string, Sexp> macros_;
};

// parses the display syntax of constraints back into a productivity over (dom, cod)
Productivity parse_constraint(const std::string& text, const Ctt& dom, const Ctt& cod);

// exit codes: 0 all accepted, 1 some rejected, 2 some unknown, 3 error
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace copro::cli
