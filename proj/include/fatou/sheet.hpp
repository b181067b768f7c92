#pragma once

// Branch indices for multivalued inverse branches: one integer per generator,
// cyclic generators reduced mod n.

#include <string>
#include <vector>

#include "fatou/errors.hpp"

namespace fatou {

struct SheetId {
    std::vector<int> idx;

    SheetId() = default;
    explicit SheetId(std::vector<int> v) : idx(std::move(v)) {}
    static SheetId trivial(int gens = 0) { return SheetId(std::vector<int>(gens, 0)); }

    bool operator==(const SheetId& o) const { return idx == o.idx; }
    bool is_trivial() const {
        for (int v : idx)
            if (v != 0) return false;
        return true;
    }
    std::string str() const;
};

struct BranchGenerator {
    enum class Kind { integral, cyclic };
    Kind kind = Kind::integral;
    int modulus = 0;  // cyclic only
    std::string name;
};

struct BranchStructure {
    std::vector<BranchGenerator> gens;

    int count() const { return int(gens.size()); }

    SheetId reduce(SheetId s) const {
        if (int(s.idx.size()) != count())
            throw PreconditionError("SheetId size does not match branch structure");
        for (int g = 0; g < count(); ++g) {
            if (gens[g].kind == BranchGenerator::Kind::cyclic) {
                int n = gens[g].modulus;
                s.idx[g] = ((s.idx[g] % n) + n) % n;
            }
        }
        return s;
    }

    SheetId delta(const SheetId& after, const SheetId& before) const {
        SheetId d = after;
        for (size_t g = 0; g < d.idx.size(); ++g) d.idx[g] -= before.idx[g];
        return reduce(d);
    }

    SheetId add(const SheetId& a, const SheetId& b) const {
        SheetId s = a;
        for (size_t g = 0; g < s.idx.size(); ++g) s.idx[g] += b.idx[g];
        return reduce(s);
    }

    SheetId trivial() const { return SheetId::trivial(count()); }
};

}  // namespace fatou
