#include <cstdio>

#include "vtube/checks.hpp"

int main() {
    auto results = vtube::checks::run_all();
    int failed = 0;
    for (const auto& r : results) {
        if (!r.pass) ++failed;
        std::printf("%s  %-28s %s\n", r.pass ? "PASS" : "FAIL",
                    r.name.c_str(), r.detail.c_str());
    }
    std::printf("%zu checks, %d failed\n", results.size(), failed);
    return failed == 0 ? 0 : 1;
}
