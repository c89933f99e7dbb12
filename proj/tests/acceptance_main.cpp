// Runs every acceptance criterion and prints one PASS/FAIL line each.
#include <cstdio>

#include "vcdl/acceptance.hpp"

int main() {
    int failed = 0;
    for (const auto& suite : vcdl::acceptance::suites()) {
        const auto r = suite.run();
        std::printf("%s\n", vcdl::acceptance::format_result(r).c_str());
        std::fflush(stdout);
        failed += r.passed ? 0 : 1;
    }
    std::printf("%d of %zu criteria failed\n", failed, vcdl::acceptance::suites().size());
    return failed == 0 ? 0 : 1;
}
