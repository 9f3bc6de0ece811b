#pragma once

#include <cstdlib>
#include <string>

#include "copro/ctt.hpp"

namespace testkit {

using namespace copro;

// stream A = A x self
inline const CotypeDef& stream_def(CotypeRegistry& reg, const std::string& name = "stream") {
    if (auto* d = reg.find(name)) return *d;
    Stt s = Stt::node(Spf::product(), {Stt::node(Spf::constant(ConstType::nat()), {}), Stt::slot()});
    return reg.elaborate(name, s, "cons", {"head", "tail"});
}

// bintree = nat x (self x self)
inline const CotypeDef& bintree_def(CotypeRegistry& reg) {
    if (auto* d = reg.find("bintree")) return *d;
    Stt s = Stt::node(Spf::product(), {Stt::node(Spf::constant(ConstType::nat()), {}),
                                       Stt::node(Spf::product(), {Stt::slot(), Stt::slot()})});
    return reg.elaborate("bintree", s, "node", {"label", "bleft", "bright"});
}

inline std::string corpus_dir() {
    const char* c = std::getenv("COPRO_CORPUS");
    return c ? c : "corpus";
}

inline Level d(std::uint64_t n) { return Level::depth(n); }
inline Level none() { return Level::none(); }
inline Level some(std::vector<Level> ch) { return Level::some(std::move(ch)); }

}  // namespace testkit
