#pragma once

// Configured pipelines: the 1-D Koenigs germ, a resonant triangular pair, a
// quadratic basin automorphism, the exponential construction with a proper
// multi-sheeted basin, and the n-fold power covering.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fatou/continuation.hpp"
#include "fatou/dynamics.hpp"
#include "fatou/fb_map.hpp"
#include "fatou/report.hpp"

namespace fatou {

struct ExampleSpec {
    std::string name;
    int dim = 0;
    HoloMap map;
    PipelineOptions opts;
    std::vector<std::string> expected;  // property flags run by verify_example
    SliceSpec default_slice;

    SheetClassify sheet_classify;  // branch indices of a first pullback; may be null
    // Germ family of the inverse branch for path continuation; null when the
    // inverse is entire (single sheet).
    std::function<std::shared_ptr<const GermFamily>()> inverse_family;
    // Closed loop around the branch locus (positive orientation, `turns`
    // windings); null when there is none.
    std::function<std::vector<CVec>(int turns, int segments)> branch_loop;
};

std::vector<std::string> example_names();
ExampleSpec get_example(const std::string& name);

// Memoized pipeline per example (construction is deterministic).
std::shared_ptr<const FBPipeline> example_pipeline(const std::string& name);

// Runs every expected-property check of the spec; failures are report rows.
Report verify_example(const ExampleSpec& spec);

// The quadratic automorphism family used by henon_fb and, with a gentler
// nonlinearity, as the carrier biholomorphism of the exponential and power
// examples: f(x, y) = (a x + b y + eta x^2, x), presented as the repelling
// inverse with its attracting branch.
HoloMap make_quadratic_basin_map(double a, double b, double eta, const std::string& name,
                                 int germ_trunc = 8);

}  // namespace fatou
