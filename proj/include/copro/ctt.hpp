#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace copro {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TypeError : public Error {
public:
    using Error::Error;
};

struct CotypeDef;

class ConstType {
public:
    enum class Kind { Nat, Int, Bool, Unit, Enum, Pair, Co };

    static ConstType nat();
    static ConstType integer();
    static ConstType boolean();
    static ConstType unit();
    static ConstType enumeration(int k);
    static ConstType pair(ConstType a, ConstType b);
    static ConstType co(const CotypeDef* def);

    Kind kind() const { return rep_->kind; }
    int enum_size() const { return rep_->k; }
    const ConstType& first() const { return *rep_->a; }
    const ConstType& second() const { return *rep_->b; }
    const std::string& cotype() const;
    const CotypeDef* co_def() const { return rep_->def; }

    // nullopt means infinite
    std::optional<std::uint64_t> cardinality() const;
    std::string str() const;

    friend bool operator==(const ConstType& x, const ConstType& y);
    friend bool operator!=(const ConstType& x, const ConstType& y) { return !(x == y); }

private:
    struct Rep {
        Kind kind = Kind::Unit;
        int k = 0;
        std::shared_ptr<const ConstType> a, b;
        const CotypeDef* def = nullptr;
    };
    explicit ConstType(std::shared_ptr<const Rep> r) : rep_(std::move(r)) {}
    std::shared_ptr<const Rep> rep_;
};

struct Spf {
    enum class Kind { Product, Sum, ListF, Exp, ConstF, IdF };
    Kind kind;
    std::optional<ConstType> type;  // arity for Exp, payload for ConstF

    static Spf product() { return {Kind::Product, std::nullopt}; }
    static Spf sum() { return {Kind::Sum, std::nullopt}; }
    static Spf list() { return {Kind::ListF, std::nullopt}; }
    static Spf exp(ConstType a) { return {Kind::Exp, std::move(a)}; }
    static Spf constant(ConstType a) { return {Kind::ConstF, std::move(a)}; }
    static Spf ident() { return {Kind::IdF, std::nullopt}; }

    int arity() const;
    bool shape_one() const;
    std::string str() const;

    friend bool operator==(const Spf& x, const Spf& y) { return x.kind == y.kind && x.type == y.type; }
    friend bool operator!=(const Spf& x, const Spf& y) { return !(x == y); }
};

class Ctt {
public:
    Ctt();  // the unit constant
    static Ctt leaf(const CotypeDef* def);
    static Ctt node(Spf spf, std::vector<Ctt> children);
    static Ctt product(Ctt a, Ctt b) { return node(Spf::product(), {std::move(a), std::move(b)}); }
    static Ctt sum(Ctt a, Ctt b) { return node(Spf::sum(), {std::move(a), std::move(b)}); }
    static Ctt list(Ctt a) { return node(Spf::list(), {std::move(a)}); }
    static Ctt exp(ConstType arity, Ctt a) { return node(Spf::exp(std::move(arity)), {std::move(a)}); }
    static Ctt constant(ConstType t) { return node(Spf::constant(std::move(t)), {}); }
    static Ctt ident(Ctt a) { return node(Spf::ident(), {std::move(a)}); }

    bool is_leaf() const { return rep_->def != nullptr; }
    const CotypeDef& def() const { return *rep_->def; }
    const std::string& cotype() const;
    const Spf& spf() const { return rep_->spf; }
    const std::vector<Ctt>& children() const { return rep_->children; }
    const Ctt& child(std::size_t i) const { return rep_->children.at(i); }

    bool is_const() const { return !is_leaf() && spf().kind == Spf::Kind::ConstF; }
    std::size_t node_count() const;
    std::string str() const;

    friend bool operator==(const Ctt& x, const Ctt& y);
    friend bool operator!=(const Ctt& x, const Ctt& y) { return !(x == y); }

private:
    struct Rep {
        const CotypeDef* def = nullptr;
        Spf spf{Spf::Kind::ConstF, std::nullopt};
        std::vector<Ctt> children;
    };
    explicit Ctt(std::shared_ptr<const Rep> r) : rep_(std::move(r)) {}
    std::shared_ptr<const Rep> rep_;
};

class Stt {
public:
    static Stt slot();
    static Stt node(Spf spf, std::vector<Stt> children);

    bool is_slot() const { return rep_->slot; }
    const Spf& spf() const { return rep_->spf; }
    const std::vector<Stt>& children() const { return rep_->children; }

private:
    struct Rep {
        bool slot = false;
        Spf spf{Spf::Kind::ConstF, std::nullopt};
        std::vector<Stt> children;
    };
    explicit Stt(std::shared_ptr<const Rep> r) : rep_(std::move(r)) {}
    std::shared_ptr<const Rep> rep_;
};

// A projection position of self_ctt: a maximal subtree reached through product nodes only.
struct Position {
    std::vector<int> path;
    Ctt ctt;
    std::string name;
};

struct CotypeDef {
    std::string name;
    Stt stt;
    Ctt self_ctt;
    Ctt ident_ctt;
    std::string ctor_name;
    std::vector<Position> positions;
};

class CotypeRegistry {
public:
    const CotypeDef& elaborate(const std::string& name, const Stt& stt,
                               std::string ctor_name = {},
                               std::vector<std::string> dtor_names = {});
    const CotypeDef* find(const std::string& name) const;
    const CotypeDef& get(const std::string& name) const;
    std::vector<std::string> names() const { return order_; }

private:
    std::map<std::string, std::unique_ptr<CotypeDef>> defs_;
    std::vector<std::string> order_;
};

class Level {
public:
    enum class Kind { Depth, None, Some };

    static Level depth(std::uint64_t n) { return Level(Kind::Depth, n, {}); }
    static Level none() { return Level(Kind::None, 0, {}); }
    static Level some(std::vector<Level> ch) { return Level(Kind::Some, 0, std::move(ch)); }

    Kind kind() const { return kind_; }
    std::uint64_t n() const { return n_; }
    const std::vector<Level>& children() const { return ch_; }
    const Level& child(std::size_t i) const { return ch_.at(i); }

    std::string str() const;
    friend bool operator==(const Level& a, const Level& b) {
        return a.kind_ == b.kind_ && a.n_ == b.n_ && a.ch_ == b.ch_;
    }
    friend bool operator!=(const Level& a, const Level& b) { return !(a == b); }
    friend bool operator<(const Level& a, const Level& b);

private:
    Level(Kind k, std::uint64_t n, std::vector<Level> ch) : kind_(k), n_(n), ch_(std::move(ch)) {}
    Kind kind_;
    std::uint64_t n_;
    std::vector<Level> ch_;
};

using DimPath = std::vector<int>;

Level bottom(const Ctt& c);
Level level_each(const Ctt& c, std::uint64_t n);
bool level_le(const Ctt& c, const Level& l1, const Level& l2);
bool level_le_bot(const Ctt& c, const Level& l);
std::map<DimPath, std::uint64_t> level_fun(const Ctt& c, const Level& l);
std::vector<DimPath> dims(const Ctt& c);
void check_level(const Ctt& c, const Level& l);

// every level mirroring c with leaf depths <= max_depth
std::vector<Level> enumerate_levels(const Ctt& c, std::uint64_t max_depth);

std::string path_str(const DimPath& p);

}  // namespace copro
