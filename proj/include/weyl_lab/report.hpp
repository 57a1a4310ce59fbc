#pragma once

// Result record shared by the growth-trend verifiers. A bound of the form
// f = O(g) is tested by sampling f/g on log-spaced radii, taking the running
// supremum and fitting its log-log slope over the upper half of the range.

#include <string>

#include "json.hpp"

namespace weyl_lab {

struct SlopeReport {
    std::string check;
    int n = 0;
    long samples = 0;
    double sup = 0;
    double slope = 0;
    double threshold = 0.02;
    bool pass = false;
};

inline nlohmann::json to_json(const SlopeReport& r) {
    return {{"check", r.check}, {"n", r.n},         {"samples", r.samples}, {"sup", r.sup},
            {"slope", r.slope}, {"threshold", r.threshold}, {"pass", r.pass}};
}

}  // namespace weyl_lab
