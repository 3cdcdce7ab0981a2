// verify.hpp -- named verification suites over the shipped corpus of sources.
// Each check pins its tolerance in code; the CLI and the acceptance tests
// both run through this module.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace smren {

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

struct SuiteResult {
    std::string suite;
    std::vector<Check> checks;
    bool pass = true;
    double seconds = 0.0;
};

const std::vector<std::string>& suite_names();

// quick trims grids and trial counts without touching any tolerance.
SuiteResult run_suite(const std::string& name, bool quick = false,
                      std::uint64_t seed = 20240817);

std::vector<SuiteResult> run_all(bool quick = false, std::uint64_t seed = 20240817);

}  // namespace smren
