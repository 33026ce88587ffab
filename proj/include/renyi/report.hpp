#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace renyi {

struct VerdictReport {
    std::string inequality_id;
    std::string anchor;  // human-readable name of the inequality
    std::map<std::string, double> inputs;
    std::map<std::string, std::string> labels;  // non-numeric inputs, e.g. the density description
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // lhs - rhs, or the normalized minimum eigenvalue for matrix inequalities
    bool pass = false;
    double tolerance = 0.0;
    bool equality_expected = false;
    std::vector<double> eigenvalues;
    std::map<std::string, double> details;
    std::vector<std::string> notes;

    // pass <=> margin >= -tolerance
    void settle() { pass = margin >= -tolerance; }
    // equality_expected => |margin| <= tolerance
    bool equality_met() const { return !equality_expected || std::abs(margin) <= tolerance; }
};

} // namespace renyi
