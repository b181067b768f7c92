#include "fatou/raster.hpp"

#include <fstream>

#include "fatou/errors.hpp"

namespace fatou {

namespace {

constexpr Rgb kPalette[16] = {
    {230, 240, 255}, {190, 220, 252}, {150, 198, 248}, {112, 174, 240},
    {80, 148, 226},  {56, 122, 206},  {40, 98, 182},   {32, 76, 156},
    {30, 58, 130},   {34, 44, 106},   {44, 36, 88},    {60, 32, 76},
    {80, 32, 66},    {102, 36, 58},   {126, 44, 52},   {150, 56, 48},
};

}  // namespace

Rgb cell_color(const GridCell& cell) {
    switch (cell.status) {
        case Membership::member:
            return kPalette[cell.k >= 0 ? cell.k % 16 : 0];
        case Membership::non_member:
            return {8, 8, 20};
        case Membership::unknown:
        default:
            return {255, 0, 255};
    }
}

void write_ppm(const std::string& path, const GridResult& grid) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw PreconditionError("write_ppm: cannot open " + path);
    os << "P6\n" << grid.resolution << " " << grid.resolution << "\n255\n";
    std::string buf;
    buf.reserve(size_t(grid.resolution) * grid.resolution * 3);
    for (const auto& cell : grid.cells) {
        Rgb c = cell_color(cell);
        buf.push_back(char(c.r));
        buf.push_back(char(c.g));
        buf.push_back(char(c.b));
    }
    os.write(buf.data(), std::streamsize(buf.size()));
}

void write_grid_metadata(const std::string& path, const std::string& example,
                         const SliceSpec& slice, const GridResult& grid, int threads,
                         uint64_t seed) {
    std::ofstream os(path);
    if (!os) throw PreconditionError("write_grid_metadata: cannot open " + path);
    os << "example: " << example << "\n";
    os << "origin: " << format_point(slice.origin) << "\n";
    os << "span_u: " << format_point(slice.span_u) << "\n";
    os << "span_v: " << format_point(slice.span_v) << "\n";
    os << "window: " << format_double(slice.umin) << " " << format_double(slice.umax) << " "
       << format_double(slice.vmin) << " " << format_double(slice.vmax) << "\n";
    os << "resolution: " << grid.resolution << "\n";
    os << "k_max: " << grid.k_max << "\n";
    os << "threads: " << threads << "\n";
    os << "seed: " << seed << "\n";
    os << "palette_non_member: 8 8 20\n";
    os << "palette_unknown: 255 0 255\n";
    for (int k = 0; k < 16; ++k) {
        GridCell c{Membership::member, k};
        Rgb rgb = cell_color(c);
        os << "palette_k" << k << ": " << int(rgb.r) << " " << int(rgb.g) << " " << int(rgb.b)
           << "\n";
    }
}

}  // namespace fatou
