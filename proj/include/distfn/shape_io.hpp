#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "distfn/grid.hpp"

namespace distfn {

enum class FieldFileFormat { kCsvGrid, kPgm16 };

// P2 (ASCII) or P5 (binary, 1 or 2 bytes per sample, big-endian) greymap.
// A pixel is inside iff value >= (maxval + 1) / 2. The result is validated.
BinaryMask read_mask_pgm(std::string_view bytes, double spacing = 1.0);

// P5, maxval 255; inside pixels 255.
std::string write_mask_pgm(const BinaryMask& mask);

// "width height\n" then one comma-separated row per line, 9 significant
// digits, "nan" for undefined nodes.
std::string write_field_csv(const ScalarField& field);
ScalarField read_field_csv(std::string_view text);

// P5 with maxval 65535; value v maps to round(v / scale_max * 65535),
// clamped. Undefined nodes are written as 0.
std::string write_field_pgm16(const ScalarField& field,
                              std::optional<double> scale_max = std::nullopt);
// Inverse of write_field_pgm16 for the same scale_max.
ScalarField read_field_pgm16(std::string_view bytes, double scale_max);

// Blue (0) -> green (scale_max / 2) -> red (>= scale_max), linear in between.
std::array<std::uint8_t, 3> heat_color(double value, double scale_max);

// P6 heatmap; undefined nodes are black. Without scale_max the field maximum
// is used (1 when the field has no positive value).
std::string write_heatmap_ppm(const ScalarField& field,
                              std::optional<double> scale_max = std::nullopt);

struct Disk {
  double radius = 0.0;
};
struct Strip {
  int width = 0;  // number of inside rows; rows span the canvas minus margin
};
struct Rectangle {
  int width = 0;
  int height = 0;
};
struct Annulus {
  double r_in = 0.0;
  double r_out = 0.0;
};
// Union of a vertical and a horizontal bar of the given thickness inside a
// centred size x size square (bars on the left and bottom).
struct LShape {
  int size = 0;
  int thickness = 0;
};

using Shape = std::variant<Disk, Strip, Rectangle, Annulus, LShape>;

struct Canvas {
  int width = 64;
  int height = 64;
  double spacing = 1.0;
};

// Inside iff the node centre satisfies the shape's inclusion predicate.
// Round shapes are centred at ((W-1)/2, (H-1)/2); Strip, Rectangle and
// LShape are placed at offset (W - w)/2, (H - h)/2 in integer arithmetic.
// Throws kDoesNotFit when the shape reaches the image border.
BinaryMask make_shape(const Shape& shape, const Canvas& canvas);

struct ShapeRequest {
  Shape shape;
  Canvas canvas;
};

// "disk:r=20,canvas=64", "strip:width=31,canvas=200x40",
// "rect:w=40,h=20", "annulus:rin=5,rout=10", "lshape:size=108,thickness=40".
// canvas is WxH or a single side; optional spacing=<h>.
ShapeRequest parse_shape_spec(std::string_view spec);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace distfn
