#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ganduf/errors.hpp"
#include "ganduf/rng.hpp"

namespace ganduf {

using Point2 = std::array<double, 2>;

// Ordered surface point loop in dimensionless chord units.
struct AirfoilShape {
  std::vector<Point2> points;

  std::size_t n_points() const { return points.size(); }
  void validate() const;  // n >= 8, finite, positive bbox width
  // (x_min, x_max, y_min, y_max)
  std::array<double, 4> bounding_box() const;
};

// Signed-distance grid, negative inside material, cell spacing 1 pixel.
struct SDFField {
  std::size_t rows = 0, cols = 0;
  std::vector<double> values;  // row-major

  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  void validate() const;  // rows, cols >= 8, finite
};

// FFD control lattice; l indexes columns (x direction), m rows (y direction).
struct ControlGrid {
  std::size_t cols = 0, rows = 0;
  std::vector<Point2> pts;  // column-major over (l, m): pts[l * rows + m]

  Point2& at(std::size_t l, std::size_t m) { return pts[l * rows + m]; }
  const Point2& at(std::size_t l, std::size_t m) const { return pts[l * rows + m]; }
};

struct ParametricCoords {
  std::vector<Point2> uv;  // each coordinate in [0, 1]
};

// Axis-aligned uniform lattice over the shape's bounding box:
//   P[l,m] = (x_min + l/(cols-1) * (x_max-x_min), y_min + m/(rows-1) * (y_max-y_min))
ControlGrid make_control_grid(const AirfoilShape& shape, std::size_t cols, std::size_t rows);

// C(n,i) t^i (1-t)^(n-i)
double bernstein(int i, int n, double t);

// (u, v) = normalized position of each surface point inside the bounding box.
ParametricCoords parametric_coords(const AirfoilShape& shape);

// i.i.d. N(0, sigma_y^2) on the y coordinate of every control point except
// the leftmost and rightmost columns, which stay fixed.
ControlGrid perturb_control_grid(const ControlGrid& grid, double sigma_y, Rng& rng);

// x(u,v) = sum_l sum_m B_l(u) B_m(v) P[l,m]
AirfoilShape ffd_deform(const ParametricCoords& coords, const ControlGrid& grid);

enum class MotifKind { i_beam, cross, square_ring };

// Sizes as fractions of the cell span. extent is the overall footprint
// (documented range 0.5-0.9), bar the arm/flange/wall width (0.1-0.3).
struct MotifParams {
  double extent = 0.7;
  double bar = 0.2;
};

// Exact signed distance (pixel units) to the motif boundary, sampled at
// integer pixel coordinates of a res x res grid, negative inside material.
SDFField sdf_motif(MotifKind kind, const MotifParams& params, std::size_t res);

// Pointwise convex combination; weights nonnegative, summing to 1.
SDFField sdf_interpolate(std::span<const SDFField> fields, std::span<const double> weights);

// Warps pixel coordinates through a grid_cols x grid_rows FFD lattice whose
// control points are jittered by N(0, sigma_px^2) in both directions, then
// resamples the field bilinearly (clamp-to-edge) at the warped locations.
SDFField distort_field(const SDFField& field, std::size_t grid_cols,
                       std::size_t grid_rows, double sigma_px, Rng& rng);

// Separable Gaussian blur, kernel truncated at 4 sigma, reflect padding.
SDFField gaussian_smooth(const SDFField& field, double sigma);

// 1 = material (value <= 0).
std::vector<std::uint8_t> threshold_field(const SDFField& field);

// Plain-text "x y" coordinate file, optional non-numeric header line; points
// are reordered to a single trailing-edge-first traversal on import.
AirfoilShape import_airfoil_file(const std::filesystem::path& path);

// Flattened design-vector views: airfoils as [x0, y0, x1, y1, ...], fields
// row-major.
std::vector<double> flatten(const AirfoilShape& shape);
AirfoilShape airfoil_from_flat(std::span<const double> flat);
std::vector<double> flatten(const SDFField& field);
SDFField field_from_flat(std::span<const double> flat, std::size_t rows, std::size_t cols);

}  // namespace ganduf
