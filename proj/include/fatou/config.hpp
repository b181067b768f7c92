#pragma once

// Run configuration: a JSON file with nested sections, overridable by CLI
// flags (flags win).  Fixed seed and config imply byte-identical outputs.

#include <cstdint>
#include <string>

#include "fatou/dynamics.hpp"

namespace fatou {

struct RunConfig {
    std::string command;
    std::string example = "koenigs1d";
    int m = 8;
    int k_max = 60;
    double newton_tol = 1e-9;
    double psi_tol = 1e-11;
    double res_tol = 1e-8;
    double margin = 0.05;
    SliceSpec slice;
    bool slice_set = false;  // when false, the example's default slice is used
    std::string out_dir = ".";
    uint64_t seed = 1;
    int threads = 0;  // 0: hardware parallelism (or FATOU_THREADS)
    int depth = 2;    // fiber enumeration depth
    int turns = 1;    // monodromy windings
    std::string point;
    std::string checks;  // comma-separated subset for verify; empty = all
    std::string inject;  // defect injection for verify ("t2")

    void validate() const;  // throws PreconditionError
};

RunConfig load_config(const std::string& path);  // JSON

int resolve_threads(int flag_value);  // flag > env FATOU_THREADS > hardware

}  // namespace fatou
