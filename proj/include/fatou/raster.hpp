#pragma once

// Binary P6 output of grid classifications plus a sidecar text file with the
// slice geometry and palette.  Byte-identical for identical inputs.

#include <cstdint>
#include <string>

#include "fatou/dynamics.hpp"

namespace fatou {

struct Rgb {
    uint8_t r = 0, g = 0, b = 0;
};

// Members cycle a 16-entry gradient by minimal k; non-members are near-black;
// unknown pixels are magenta.
Rgb cell_color(const GridCell& cell);

void write_ppm(const std::string& path, const GridResult& grid);
void write_grid_metadata(const std::string& path, const std::string& example,
                         const SliceSpec& slice, const GridResult& grid, int threads,
                         uint64_t seed);

}  // namespace fatou
