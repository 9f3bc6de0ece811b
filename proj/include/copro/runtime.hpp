#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "copro/ctt.hpp"

namespace copro {

class NonProductive : public Error {
public:
    using Error::Error;
};

class CoVal;
using CoRef = std::shared_ptr<CoVal>;

class Val {
public:
    enum class Kind { Unit, Bool, Nat, Int, Enum, Pair, Inl, Inr, List, Fn, Co, Lazy };
    using Fun = std::function<Val(const Val&)>;

    Val();
    static Val unit();
    static Val boolean(bool b);
    static Val nat(std::uint64_t n);
    static Val integer(std::int64_t i);
    static Val enumeration(int size, int index);
    static Val pair(Val a, Val b);
    static Val inl(Val a);
    static Val inr(Val a);
    static Val list(std::vector<Val> xs);
    static Val fn(Fun f, bool memo = true);
    static Val co(CoRef c);
    static Val lazy(std::function<Val()> thunk, std::string site);
    // a lazy cell whose thunk receives the cell itself
    static Val knot(std::function<Val(const Val&)> f, std::string site);

    Kind kind() const;
    bool is_lazy() const;
    bool as_bool() const;
    std::uint64_t as_nat() const;
    std::int64_t as_int() const;
    int enum_size() const;
    int enum_index() const;
    const Val& first() const;
    const Val& second() const;
    const Val& payload() const;
    const std::vector<Val>& items() const;
    const CoRef& as_co() const;
    Val apply(const Val& x) const;

    bool same(const Val& o) const { return n_ == o.n_; }
    std::string const_key() const;

    struct Node;

private:
    explicit Val(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
    const Node& node() const;
    std::shared_ptr<const Node> n_;
};

class CoVal : public std::enable_shared_from_this<CoVal> {
public:
    using Step = std::function<Val()>;

    static CoRef make(const CotypeDef* def, Step step, std::string site);
    static CoRef ready(const CotypeDef* def, Val layer, std::string site = {});

    const Val& force();
    const CotypeDef& def() const { return *def_; }
    const std::string& site() const { return site_; }
    bool forced() const;
    std::uint64_t evaluations() const { return evals_; }

private:
    CoVal(const CotypeDef* def, Step step, std::string site)
        : def_(def), step_(std::move(step)), site_(std::move(site)) {}

    enum class State { Pending, Forcing, Done };
    const CotypeDef* def_;
    Step step_;
    std::string site_;
    mutable std::mutex m_;
    std::condition_variable cv_;
    State state_ = State::Pending;
    std::thread::id owner_;
    Val layer_;
    std::uint64_t evals_ = 0;
};

constexpr std::uint64_t kDefaultFuel = 10000;

class FuelScope {
public:
    explicit FuelScope(std::uint64_t budget, bool fresh = false);
    ~FuelScope();
    FuelScope(const FuelScope&) = delete;
    FuelScope& operator=(const FuelScope&) = delete;

    static std::uint64_t remaining();
    static bool active();

private:
    bool owner_;
    bool prev_active_;
    std::uint64_t prev_remaining_;
};

void charge_fuel(const std::string& site);

// the depth used when comparing coinductive constants for equality
constexpr std::uint64_t kConstEqDepth = 32;

Val fold(const CotypeDef& def, Val layer);
const Val& unfold(const CoRef& c);

bool eq_upto_nat(const CoRef& c1, const CoRef& c2, std::uint64_t n);
bool eq_upto_level(const Ctt& c, const Val& v1, const Val& v2, const Level& l);
bool const_equal(const Val& a, const Val& b);

Val fix_value(const Ctt& c, const std::function<Val(const Val&)>& f, const std::string& site);

std::vector<Val> stream_prefix(const CoRef& c, std::size_t n);
bool stream_shaped(const CotypeDef& def);

std::string render_const(const Val& v);
std::string render_trunc(const Ctt& c, const Val& v, std::uint64_t depth);

std::vector<Val> const_values(const ConstType& t);
Val default_const(const ConstType& t);
Val default_value(const Ctt& c);
bool const_has_type(const Val& v, const ConstType& t);

// arguments used to compare functions over infinite arities
std::vector<Val> sample_args(const ConstType& t);

}  // namespace copro
