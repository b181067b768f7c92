#pragma once

// Line-oriented check records: "name: PASS|FAIL: value: tolerance [note]".
// Diffable and greppable; the CLI verify command aggregates these.

#include <string>
#include <vector>

namespace fatou {

struct Check {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double tol = 0.0;
    std::string note;
};

struct Report {
    std::vector<Check> checks;

    void add(const std::string& name, bool pass, double value, double tol,
             const std::string& note = "");
    // Convenience: pass iff value <= tol.
    void add_bound(const std::string& name, double value, double tol, const std::string& note = "");
    bool all_pass() const;
    int failures() const;
    std::string to_text() const;
    void merge(const Report& other);
};

}  // namespace fatou
