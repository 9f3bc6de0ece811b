#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "copro/linear.hpp"
#include "copro/prod.hpp"
#include "json.hpp"

namespace copro {

constexpr std::int64_t kDefaultBound = 64;

struct Verdict {
    enum class Kind { Proved, Counterexample, Unknown };
    Kind kind = Kind::Unknown;
    Assignment assignment;                               // counterexample values
    std::optional<std::pair<Level, Level>> levels;       // counterexample rendered on the end layouts
    std::map<std::string, std::int64_t> named;           // counterexample keyed by display names
    std::int64_t bound = kDefaultBound;
    std::string reason;
    std::string simplified;

    bool proved() const { return kind == Kind::Proved; }
    std::string kind_str() const;
    nlohmann::json to_json() const;
};

// existential-free where exact elimination was possible; residual holds variables that stayed quantified
struct Normalized {
    std::vector<Conj> disjuncts;
    std::vector<Var> residual;
    bool capped = false;

    bool is_true() const { return disjuncts.size() == 1 && disjuncts[0].bools.empty() && disjuncts[0].atoms.empty(); }
    Formula to_formula() const;
};

Normalized normalize(const Formula& f);

struct Ends {
    const Layout* in = nullptr;
    const Layout* out = nullptr;
};

Verdict implies(const Formula& hyp, const Formula& concl, std::int64_t bound = kDefaultBound, Ends ends = {});
Verdict subset(const Productivity& p1, const Productivity& p2, std::int64_t bound = kDefaultBound);

Verdict check_one_productive(const Productivity& p, std::int64_t bound = kDefaultBound);
std::pair<int, Verdict> check_one_over_n(const Productivity& p, int n_max = 4, std::int64_t bound = kDefaultBound);

// brute-force inclusion over every level pair with leaf depths <= depth_bound
bool bounded_oracle(const Productivity& p1, const Productivity& p2, std::uint64_t depth_bound,
                    std::pair<Level, Level>* witness = nullptr);

std::string print_normalized(const Normalized& n, const std::map<Var, std::string>& names);
std::string simplify_for_display(const Productivity& p);

}  // namespace copro
