#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "copro/formula.hpp"

namespace copro {

// one disjunct of a disjunctive normal form
struct Conj {
    std::map<Var, bool> bools;
    std::vector<Atom> atoms;
};

class DnfTooLarge : public std::exception {
public:
    const char* what() const noexcept override { return "disjunctive normal form exceeds the size cap"; }
};

// Existentials are lifted out; their variables are added to *bound when given.
std::vector<Conj> to_dnf(const Formula& f, std::set<Var>* bound = nullptr, std::size_t cap = 200000);

// gcd-normalized atom; ground atoms come back with an empty term list
Atom tighten(const Atom& a);
Atom subst_atom(const Atom& a, const std::map<Var, std::int64_t>& values);
void atom_vars(const std::vector<Atom>& atoms, std::set<Var>& out);

enum class Sat { Infeasible, Feasible, Capped };

// Fourier-Motzkin over nonnegative integer variables. Infeasible is sound for the integers,
// Feasible only claims a rational solution of the tightened system.
Sat fm_check(const std::vector<Atom>& atoms);

// interval of v over the rational projection, clipped to [0, cap]; nullopt when infeasible
std::optional<std::pair<std::int64_t, std::int64_t>> fm_range(const std::vector<Atom>& atoms, Var v,
                                                             std::int64_t cap);

// smallest-first search for a model with every variable in [0, bound]
std::optional<std::map<Var, std::int64_t>> int_model(const std::vector<Atom>& atoms, std::int64_t bound);

// some disjunct holds once the assigned variables are fixed; the others range over [0, bound]
bool holds_dnf(const std::vector<Conj>& dnf, const Assignment& a, std::int64_t bound);

// true when the conjunction of atoms entails a
bool entails(const std::vector<Atom>& atoms, const Atom& a);

}  // namespace copro
