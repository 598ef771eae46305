#pragma once

#include <thread>

#include "doctest.h"
#include "gshe/checks.hpp"

namespace testsupport {

inline int jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

inline void require_all(const std::vector<gshe::Claim>& cs) {
    REQUIRE_FALSE(cs.empty());
    for (const auto& c : cs) {
        INFO(c.name << ": expected " << c.expected << ", got " << c.got);
        CHECK(c.pass);
    }
}

inline gshe::checks::Options suite_options() {
    gshe::checks::Options o;
    o.seed = 20240611;
    o.cases = 500;
    o.jobs = jobs();
    return o;
}

}  // namespace testsupport
