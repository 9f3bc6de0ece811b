#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace copro {

using Var = int;

Var fresh_var();

// sum of coeff * var plus constant
class LinExpr {
public:
    LinExpr() = default;
    LinExpr(std::int64_t c) : c_(c) {}
    static LinExpr var(Var v, std::int64_t coeff = 1);
    static LinExpr from(std::vector<std::pair<Var, std::int64_t>> terms, std::int64_t c);

    const std::vector<std::pair<Var, std::int64_t>>& terms() const { return terms_; }
    std::int64_t constant() const { return c_; }
    std::int64_t coeff(Var v) const;
    bool is_const() const { return terms_.empty(); }

    LinExpr operator+(const LinExpr& o) const;
    LinExpr operator-(const LinExpr& o) const;
    LinExpr operator*(std::int64_t k) const;
    LinExpr substitute(Var v, const LinExpr& e) const;
    LinExpr rename(const std::map<Var, Var>& m) const;

    friend bool operator==(const LinExpr& a, const LinExpr& b) { return a.c_ == b.c_ && a.terms_ == b.terms_; }
    friend bool operator<(const LinExpr& a, const LinExpr& b) {
        return a.terms_ != b.terms_ ? a.terms_ < b.terms_ : a.c_ < b.c_;
    }

private:
    std::vector<std::pair<Var, std::int64_t>> terms_;
    std::int64_t c_ = 0;
};

// e <= 0 or e = 0
struct Atom {
    LinExpr e;
    bool eq = false;

    friend bool operator==(const Atom& a, const Atom& b) { return a.eq == b.eq && a.e == b.e; }
    friend bool operator<(const Atom& a, const Atom& b) { return a.eq != b.eq ? a.eq > b.eq : a.e < b.e; }
};

class Formula {
public:
    enum class Kind { True, False, Bool, Lin, And, Or, Exists };

    Formula();
    static Formula truth();
    static Formula falsity();
    static Formula boolean(Var v, bool value);
    static Formula atom(Atom a);
    static Formula le(const LinExpr& a, const LinExpr& b);
    static Formula lt(const LinExpr& a, const LinExpr& b);
    static Formula ge(const LinExpr& a, const LinExpr& b) { return le(b, a); }
    static Formula gt(const LinExpr& a, const LinExpr& b) { return lt(b, a); }
    static Formula eq(const LinExpr& a, const LinExpr& b);
    static Formula conj(std::vector<Formula> xs);
    static Formula disj(std::vector<Formula> xs);
    static Formula exists(std::vector<Var> vars, Formula body);

    Kind kind() const;
    Var var() const;
    bool value() const;
    const Atom& lin() const;
    const std::vector<Formula>& args() const;
    const std::vector<Var>& bound() const;
    const Formula& body() const;

    bool is_true() const { return kind() == Kind::True; }
    bool is_false() const { return kind() == Kind::False; }

    // substitutes free variables by variables and renames every bound variable freshly
    Formula instantiate(const std::map<Var, Var>& m) const;
    Formula subst_bools(const std::map<Var, bool>& m) const;

    struct Node;

private:
    explicit Formula(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
    std::shared_ptr<const Node> n_;
};

struct Formula::Node {
    Kind kind = Kind::True;
    Var var = 0;
    bool value = false;
    Atom atom;
    std::vector<Formula> args;
    std::vector<Var> bound;
};

inline Formula::Kind Formula::kind() const { return n_->kind; }
inline Var Formula::var() const { return n_->var; }
inline bool Formula::value() const { return n_->value; }
inline const Atom& Formula::lin() const { return n_->atom; }
inline const std::vector<Formula>& Formula::args() const { return n_->args; }
inline const std::vector<Var>& Formula::bound() const { return n_->bound; }
inline const Formula& Formula::body() const { return n_->args.front(); }

Formula operator&&(const Formula& a, const Formula& b);
Formula operator||(const Formula& a, const Formula& b);
Formula operator!(const Formula& a);

struct Assignment {
    std::map<Var, std::int64_t> nats;
    std::map<Var, bool> bools;
};

// evaluates a quantifier-free formula; throws on quantifiers
bool eval_qf(const Formula& f, const Assignment& a);
std::int64_t eval_expr(const LinExpr& e, const std::map<Var, std::int64_t>& nats);

}  // namespace copro
