#pragma once

#include <string>
#include <vector>

#include "krein/core.hpp"

namespace krein::acceptance {

// Sampled inputs shared by the criteria. Loaded from CSVs when a directory is given.
struct Fixtures {
    SampledFunction A_one;          // A = 1 on [0, 1], step 1e-3
    SampledFunction H_half;         // H = 1/2 on [0, 4], step 1e-3
    SampledFunction A_pair;         // A = 1/(2 + r) on [0, 4], step 1e-3
    std::vector<SampledFunction> A_random;  // three smooth complex coefficients on [0, 2]
    SampledFunction A_gauss;        // real Gaussian bump on [0, 4], step 1e-3
    SampledFunction l_bump;         // log-density supported in [-1, 1]

    static Fixtures generate();
    static Fixtures load(const std::string& dir);
    void save(const std::string& dir) const;
};

struct Outcome {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

enum class Suite { core, identities, bridges, all };
Suite parse_suite(const std::string& s);  // usage error on anything else
bool in_suite(int id, Suite s);

std::vector<Outcome> run(const Fixtures& f, Suite s);
// PASS/FAIL line per outcome.
std::string format_line(const Outcome& o);

}  // namespace krein::acceptance
