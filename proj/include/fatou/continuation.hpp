#pragma once

// Elements of holomorphic maps, analytic continuation along polylines, sheet
// bookkeeping and monodromy.  A germ family supplies the re-centering rule;
// chains of overlapping elements transport values, and obstruction shows up
// as step underflow.

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "fatou/dynamics.hpp"
#include "fatou/sheet.hpp"
#include "fatou/types.hpp"

namespace fatou {

struct GermFamily;

struct MapElement {
    CVec center;
    double radius = 0.0;
    std::function<CVec(const CVec&)> eval;
    SheetId branch_state;
    std::shared_ptr<const GermFamily> family;
};

// Re-centering rule of one analytic family.  recenter(c, prev) produces the
// element at c matching prev on the overlap; prev == nullptr seeds the
// principal branch.  classify reads exact branch indices off an element.
struct GermFamily {
    int dim = 0;
    BranchStructure branches;
    std::function<MapElement(const CVec&, const MapElement*)> recenter;
    std::function<SheetId(const MapElement&)> classify;
};

struct GermPath {
    std::vector<CVec> path;
    std::vector<MapElement> elements;
    SheetId start_sheet, end_sheet;
    bool obstructed = false;
    CVec obstruction_location;
};

struct ContinuationOptions {
    double max_step = 0.25;
    double agreement_tol = 1e-9;
    double min_step = 1e-8;
    int overlap_samples = 8;
};

GermPath continue_along_path(const MapElement& start, const std::vector<CVec>& path,
                             const ContinuationOptions& opt = {});

// SheetId change around a closed loop (loop.front() == loop.back() within
// roundoff; the start element must contain the base point).
SheetId monodromy(const MapElement& start, const std::vector<CVec>& loop,
                  const ContinuationOptions& opt = {});

// A point of the Riemann domain: base in the basin, branch indices of the
// inverse chain, and the value of the second projection there.  level and
// witness record the chain: h^level(witness) = base with witness in R.
struct RiemannPoint {
    CVec base;
    SheetId sheet;
    CVec psi_value;
    int level = 0;
    CVec witness;
};

// psi on a chain endpoint: (level, witness in R, original coords) -> value.
using SheetPsi = std::function<CVec(int, const CVec&)>;
// Branch indices of the first pullback: (base p, preimage q with h(q) = p).
using SheetClassify = std::function<SheetId(const CVec&, const CVec&)>;

// Distinct points over p indexed by generator branches up to `depth` (cyclic
// generators enumerate all residues).  Branches whose pullback chain fails to
// reach R within k_max are skipped.
std::vector<RiemannPoint> fiber_enumerate(const HoloMap& h, const RegularityNbhd& r,
                                          const CVec& p, int depth, const SheetPsi& psi,
                                          const SheetClassify& classify, int k_max = 60);

// Continuous lift of gamma starting at `start`: the witness is transported by
// Newton on h^level, bumping the level whenever it drifts toward the edge of
// R.  Every gamma vertex must be a basin point.
std::vector<RiemannPoint> lift_path(const HoloMap& h, const RegularityNbhd& r,
                                    const std::vector<CVec>& gamma, const RiemannPoint& start,
                                    const SheetPsi& psi, const SheetClassify& classify,
                                    double continuity_tol = 1e-6);

struct CompatReport {
    double psi_dist = 0.0;
    double base_dist = 0.0;
    bool applicable = false;  // psi values within tol
    bool pass = true;
};

// Checks the fiber-compatibility implication: psi values within tol force
// bases within 10*tol.
CompatReport compatibility_check(const RiemannPoint& x1, const RiemannPoint& x2, double tol);

// Stock scalar families used by tests and the gallery.
std::shared_ptr<const GermFamily> log_family();        // germ of log(1+x), C^1
std::shared_ptr<const GermFamily> nth_root_family(int n);  // germ of x^{1/n}, C^1

MapElement seed_element(const std::shared_ptr<const GermFamily>& family, const CVec& center);

}  // namespace fatou
