#ifndef POTKERN_TESTS_SUPPORT_HPP
#define POTKERN_TESTS_SUPPORT_HPP

#include <map>
#include <string>

#include "potkern/potkern.hpp"

namespace potkern::testing {

/// Fixture assemblies at their recommended N, built once per test binary.
inline const Assembly& fixture_assembly(const std::string& name) {
    static std::map<std::string, Assembly> cache;
    auto it = cache.find(name);
    if (it == cache.end()) {
        const auto& f = reference::fixture(name);
        it = cache.emplace(name, assemble_all(f.domain, f.n, f.base_point)).first;
    }
    return it->second;
}

inline std::vector<std::string> fixture_names() {
    std::vector<std::string> out;
    for (const auto& f : reference::fixtures()) out.push_back(f.name);
    return out;
}

inline double rel_err(cplx got, cplx want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

} // namespace potkern::testing

#endif // POTKERN_TESTS_SUPPORT_HPP
