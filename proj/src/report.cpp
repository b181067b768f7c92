#include "fatou/report.hpp"

#include "fatou/types.hpp"

namespace fatou {

void Report::add(const std::string& name, bool pass, double value, double tol,
                 const std::string& note) {
    checks.push_back({name, pass, value, tol, note});
}

void Report::add_bound(const std::string& name, double value, double tol,
                       const std::string& note) {
    checks.push_back({name, value <= tol, value, tol, note});
}

bool Report::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

int Report::failures() const {
    int n = 0;
    for (const auto& c : checks)
        if (!c.pass) ++n;
    return n;
}

std::string Report::to_text() const {
    std::string out;
    for (const auto& c : checks) {
        out += c.name;
        out += c.pass ? ": PASS: " : ": FAIL: ";
        out += format_double(c.value);
        out += ": ";
        out += format_double(c.tol);
        if (!c.note.empty()) {
            out += ": ";
            out += c.note;
        }
        out += "\n";
    }
    return out;
}

void Report::merge(const Report& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

}  // namespace fatou
