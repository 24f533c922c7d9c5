#include "ganduf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

namespace ganduf {

namespace {

constexpr double kBoxSlack = 1e-12;

double binomial(int n, int i) {
  double c = 1.0;
  for (int k = 1; k <= i; ++k) c = c * static_cast<double>(n - i + k) / k;
  return c;
}

// Bernstein basis of degree n evaluated at t for all i = 0..n.
std::vector<double> bernstein_row(int n, double t) {
  std::vector<double> row(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) row[i] = bernstein(i, n, t);
  return row;
}

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const double dx = b[0] - a[0], dy = b[1] - a[1];
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2;
    t = std::clamp(t, 0.0, 1.0);
  }
  const double ex = p[0] - (a[0] + t * dx), ey = p[1] - (a[1] + t * dy);
  return std::sqrt(ex * ex + ey * ey);
}

// Polygon set: one or more closed loops; inside defined by even-odd rule.
struct PolygonSet {
  std::vector<std::vector<Point2>> loops;

  bool inside(const Point2& p) const {
    bool in = false;
    for (const auto& loop : loops) {
      const std::size_t n = loop.size();
      for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point2& a = loop[i];
        const Point2& b = loop[j];
        if ((a[1] > p[1]) != (b[1] > p[1]) &&
            p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0]) {
          in = !in;
        }
      }
    }
    return in;
  }

  double boundary_distance(const Point2& p) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& loop : loops) {
      const std::size_t n = loop.size();
      for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        d = std::min(d, point_segment_distance(p, loop[i], loop[j]));
      }
    }
    return d;
  }

  double signed_distance(const Point2& p) const {
    const double d = boundary_distance(p);
    return inside(p) ? -d : d;
  }
};

PolygonSet motif_outline(MotifKind kind, const MotifParams& mp, double span) {
  const double c = span / 2.0;            // cell center
  const double he = mp.extent * span / 2.0;  // half extent
  const double bw = mp.bar * span;        // full bar width

  PolygonSet ps;
  switch (kind) {
    case MotifKind::cross: {
      const double hb = bw / 2.0;
      ps.loops.push_back({{c - he, c - hb}, {c - hb, c - hb}, {c - hb, c - he},
                          {c + hb, c - he}, {c + hb, c - hb}, {c + he, c - hb},
                          {c + he, c + hb}, {c + hb, c + hb}, {c + hb, c + he},
                          {c - hb, c + he}, {c - hb, c + hb}, {c - he, c + hb}});
      break;
    }
    case MotifKind::i_beam: {
      if (2.0 * he < 2.0 * bw - kBoxSlack)
        throw GeometryError("sdf_motif: i_beam flanges overlap (extent < 2*bar)");
      const double ww = bw / 2.0;  // web half width
      const double fb = c - he + bw;  // top of bottom flange
      const double ft = c + he - bw;  // bottom of top flange
      ps.loops.push_back({{c - he, c - he}, {c + he, c - he}, {c + he, fb},
                          {c + ww, fb},     {c + ww, ft},     {c + he, ft},
                          {c + he, c + he}, {c - he, c + he}, {c - he, ft},
                          {c - ww, ft},     {c - ww, fb},     {c - he, fb}});
      break;
    }
    case MotifKind::square_ring: {
      const double hi = he - bw;  // inner half extent
      if (hi <= 0.0)
        throw GeometryError("sdf_motif: square_ring wall too thick (extent <= 2*bar)");
      ps.loops.push_back(
          {{c - he, c - he}, {c + he, c - he}, {c + he, c + he}, {c - he, c + he}});
      ps.loops.push_back(
          {{c - hi, c - hi}, {c + hi, c - hi}, {c + hi, c + hi}, {c - hi, c + hi}});
      break;
    }
  }
  return ps;
}

double reflect_index(long i, long n) {
  // symmetric reflection: -1 -> 0, -2 -> 1, n -> n-1, ...
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return static_cast<double>(i);
}

}  // namespace

void AirfoilShape::validate() const {
  if (points.size() < 8)
    throw GeometryError("airfoil: needs at least 8 surface points, got " +
                        std::to_string(points.size()));
  for (const Point2& p : points) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1]))
      throw GeometryError("airfoil: non-finite coordinate");
  }
  const auto bb = bounding_box();
  if (bb[1] - bb[0] <= kBoxSlack)
    throw GeometryError("airfoil: bounding box has zero width");
}

std::array<double, 4> AirfoilShape::bounding_box() const {
  double x0 = points[0][0], x1 = points[0][0];
  double y0 = points[0][1], y1 = points[0][1];
  for (const Point2& p : points) {
    x0 = std::min(x0, p[0]);
    x1 = std::max(x1, p[0]);
    y0 = std::min(y0, p[1]);
    y1 = std::max(y1, p[1]);
  }
  return {x0, x1, y0, y1};
}

void SDFField::validate() const {
  if (rows < 8 || cols < 8)
    throw GeometryError("field: resolution must be at least 8x8");
  if (values.size() != rows * cols)
    throw GeometryError("field: value count does not match resolution");
  for (double v : values) {
    if (!std::isfinite(v)) throw GeometryError("field: non-finite value");
  }
}

ControlGrid make_control_grid(const AirfoilShape& shape, std::size_t cols,
                              std::size_t rows) {
  if (cols < 2 || rows < 2)
    throw ContractError("make_control_grid: grid must be at least 2x2");
  const auto bb = shape.bounding_box();
  const double w = bb[1] - bb[0], h = bb[3] - bb[2];
  if (w <= kBoxSlack || h <= kBoxSlack)
    throw GeometryError("make_control_grid: degenerate bounding box");
  ControlGrid g;
  g.cols = cols;
  g.rows = rows;
  g.pts.resize(cols * rows);
  for (std::size_t l = 0; l < cols; ++l) {
    for (std::size_t m = 0; m < rows; ++m) {
      g.at(l, m) = {bb[0] + static_cast<double>(l) / (cols - 1) * w,
                    bb[2] + static_cast<double>(m) / (rows - 1) * h};
    }
  }
  return g;
}

double bernstein(int i, int n, double t) {
  if (i < 0 || i > n)
    throw ContractError("bernstein: index " + std::to_string(i) +
                        " out of range for degree " + std::to_string(n));
  // pow(0, 0) = 1 at the endpoints
  const double ti = i == 0 ? 1.0 : std::pow(t, i);
  const double si = i == n ? 1.0 : std::pow(1.0 - t, n - i);
  return binomial(n, i) * ti * si;
}

ParametricCoords parametric_coords(const AirfoilShape& shape) {
  const auto bb = shape.bounding_box();
  const double w = bb[1] - bb[0], h = bb[3] - bb[2];
  if (w <= kBoxSlack || h <= kBoxSlack)
    throw GeometryError("parametric_coords: degenerate bounding box");
  ParametricCoords pc;
  pc.uv.reserve(shape.points.size());
  for (const Point2& p : shape.points) {
    pc.uv.push_back({(p[0] - bb[0]) / w, (p[1] - bb[2]) / h});
  }
  return pc;
}

ControlGrid perturb_control_grid(const ControlGrid& grid, double sigma_y, Rng& rng) {
  if (sigma_y < 0.0) throw ContractError("perturb_control_grid: sigma_y < 0");
  ControlGrid out = grid;
  for (std::size_t l = 1; l + 1 < grid.cols; ++l) {
    for (std::size_t m = 0; m < grid.rows; ++m) {
      out.at(l, m)[1] += rng.normal(0.0, sigma_y);
    }
  }
  return out;
}

AirfoilShape ffd_deform(const ParametricCoords& coords, const ControlGrid& grid) {
  const int L = static_cast<int>(grid.cols) - 1;
  const int M = static_cast<int>(grid.rows) - 1;
  AirfoilShape out;
  out.points.reserve(coords.uv.size());
  for (const Point2& uv : coords.uv) {
    const auto bu = bernstein_row(L, uv[0]);
    const auto bv = bernstein_row(M, uv[1]);
    double x = 0.0, y = 0.0;
    for (int l = 0; l <= L; ++l) {
      for (int m = 0; m <= M; ++m) {
        const double w = bu[l] * bv[m];
        const Point2& p = grid.at(l, m);
        x += w * p[0];
        y += w * p[1];
      }
    }
    out.points.push_back({x, y});
  }
  return out;
}

SDFField sdf_motif(MotifKind kind, const MotifParams& mp, std::size_t res) {
  if (res < 8) throw ContractError("sdf_motif: res must be at least 8");
  if (!(mp.extent > 0.0) || mp.extent > 1.0 || !(mp.bar > 0.0) || mp.bar > 1.0 ||
      mp.bar > mp.extent)
    throw GeometryError("sdf_motif: params out of range (need 0 < bar <= extent <= 1)");
  const double span = static_cast<double>(res - 1);
  const PolygonSet ps = motif_outline(kind, mp, span);
  SDFField f;
  f.rows = f.cols = res;
  f.values.resize(res * res);
  for (std::size_t r = 0; r < res; ++r) {
    for (std::size_t c = 0; c < res; ++c) {
      f.at(r, c) = ps.signed_distance({static_cast<double>(c), static_cast<double>(r)});
    }
  }
  return f;
}

SDFField sdf_interpolate(std::span<const SDFField> fields, std::span<const double> weights) {
  if (fields.empty() || fields.size() != weights.size())
    throw ContractError("sdf_interpolate: need one weight per field");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw ContractError("sdf_interpolate: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw ContractError("sdf_interpolate: weights must sum to 1");
  const std::size_t rows = fields[0].rows, cols = fields[0].cols;
  for (const SDFField& f : fields) {
    if (f.rows != rows || f.cols != cols)
      throw GeometryError("sdf_interpolate: resolution mismatch");
  }
  SDFField out;
  out.rows = rows;
  out.cols = cols;
  out.values.assign(rows * cols, 0.0);
  for (std::size_t k = 0; k < fields.size(); ++k) {
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      out.values[i] += weights[k] * fields[k].values[i];
    }
  }
  return out;
}

SDFField distort_field(const SDFField& field, std::size_t grid_cols,
                       std::size_t grid_rows, double sigma_px, Rng& rng) {
  if (grid_cols < 2 || grid_rows < 2)
    throw ContractError("distort_field: lattice must be at least 2x2");
  if (sigma_px < 0.0) throw ContractError("distort_field: sigma_px < 0");
  const std::size_t H = field.rows, W = field.cols;
  const double sx = static_cast<double>(W - 1), sy = static_cast<double>(H - 1);

  // Identity lattice over the pixel box, jittered in both directions.
  std::vector<Point2> lattice(grid_cols * grid_rows);
  for (std::size_t l = 0; l < grid_cols; ++l) {
    for (std::size_t m = 0; m < grid_rows; ++m) {
      lattice[l * grid_rows + m] = {
          static_cast<double>(l) / (grid_cols - 1) * sx + rng.normal(0.0, sigma_px),
          static_cast<double>(m) / (grid_rows - 1) * sy + rng.normal(0.0, sigma_px)};
    }
  }

  const int L = static_cast<int>(grid_cols) - 1;
  const int M = static_cast<int>(grid_rows) - 1;
  // Per-column / per-row basis tables.
  std::vector<std::vector<double>> bu(W), bv(H);
  for (std::size_t x = 0; x < W; ++x) bu[x] = bernstein_row(L, x / sx);
  for (std::size_t y = 0; y < H; ++y) bv[y] = bernstein_row(M, y / sy);

  SDFField out;
  out.rows = H;
  out.cols = W;
  out.values.resize(H * W);
  for (std::size_t y = 0; y < H; ++y) {
    for (std::size_t x = 0; x < W; ++x) {
      double wx = 0.0, wy = 0.0;
      for (int l = 0; l <= L; ++l) {
        for (int m = 0; m <= M; ++m) {
          const double w = bu[x][l] * bv[y][m];
          const Point2& p = lattice[static_cast<std::size_t>(l) * grid_rows + m];
          wx += w * p[0];
          wy += w * p[1];
        }
      }
      // bilinear, clamp-to-edge
      wx = std::clamp(wx, 0.0, sx);
      wy = std::clamp(wy, 0.0, sy);
      const std::size_t x0 = static_cast<std::size_t>(wx);
      const std::size_t y0 = static_cast<std::size_t>(wy);
      const std::size_t x1 = std::min(x0 + 1, W - 1);
      const std::size_t y1 = std::min(y0 + 1, H - 1);
      const double fx = wx - static_cast<double>(x0);
      const double fy = wy - static_cast<double>(y0);
      const double v00 = field.at(y0, x0), v01 = field.at(y0, x1);
      const double v10 = field.at(y1, x0), v11 = field.at(y1, x1);
      out.at(y, x) = (1.0 - fy) * ((1.0 - fx) * v00 + fx * v01) +
                     fy * ((1.0 - fx) * v10 + fx * v11);
    }
  }
  return out;
}

SDFField gaussian_smooth(const SDFField& field, double sigma) {
  if (sigma < 0.0) throw ContractError("gaussian_smooth: sigma < 0");
  const long radius = static_cast<long>(std::ceil(4.0 * sigma));
  if (radius == 0) return field;

  std::vector<double> kernel(2 * radius + 1);
  double norm = 0.0;
  for (long k = -radius; k <= radius; ++k) {
    kernel[k + radius] = std::exp(-static_cast<double>(k * k) / (2.0 * sigma * sigma));
    norm += kernel[k + radius];
  }
  for (double& w : kernel) w /= norm;

  const long H = static_cast<long>(field.rows), W = static_cast<long>(field.cols);
  SDFField tmp = field, out = field;
  // horizontal pass
  for (long y = 0; y < H; ++y) {
    for (long x = 0; x < W; ++x) {
      double acc = 0.0;
      for (long k = -radius; k <= radius; ++k) {
        const long xi = static_cast<long>(reflect_index(x + k, W));
        acc += kernel[k + radius] * field.values[y * W + xi];
      }
      tmp.values[y * W + x] = acc;
    }
  }
  // vertical pass
  for (long y = 0; y < H; ++y) {
    for (long x = 0; x < W; ++x) {
      double acc = 0.0;
      for (long k = -radius; k <= radius; ++k) {
        const long yi = static_cast<long>(reflect_index(y + k, H));
        acc += kernel[k + radius] * tmp.values[yi * W + x];
      }
      out.values[y * W + x] = acc;
    }
  }
  return out;
}

std::vector<std::uint8_t> threshold_field(const SDFField& field) {
  std::vector<std::uint8_t> mask(field.values.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    mask[i] = field.values[i] <= 0.0 ? 1 : 0;
  }
  return mask;
}

AirfoilShape import_airfoil_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open airfoil file: " + path.string());
  std::vector<Point2> pts;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    double x, y;
    if (ls >> x >> y) {
      pts.push_back({x, y});
    } else if (!first && line.find_first_not_of(" \t\r\n") != std::string::npos) {
      throw IoError("malformed line in airfoil file " + path.string() + ": " + line);
    }
    first = false;
  }
  if (pts.size() < 8)
    throw IoError("airfoil file " + path.string() + " has fewer than 8 points");

  // Two-block files list upper then lower surface, both nose to tail, with a
  // large backwards jump in x at the block boundary. Stitch them into one
  // tail-first loop; single-block files are kept as-is.
  std::size_t split = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i][0] < pts[i - 1][0] - 0.5) {
      split = i;
      break;
    }
  }
  AirfoilShape shape;
  if (split > 0 && pts[0][0] < 0.25) {
    shape.points.assign(pts.rend() - split, pts.rend());  // upper, reversed
    shape.points.insert(shape.points.end(), pts.begin() + split + 1, pts.end());
  } else {
    shape.points = std::move(pts);
  }
  try {
    shape.validate();
  } catch (const GeometryError& e) {
    throw IoError("airfoil file " + path.string() + ": " + e.what());
  }
  return shape;
}

std::vector<double> flatten(const AirfoilShape& shape) {
  std::vector<double> flat;
  flat.reserve(shape.points.size() * 2);
  for (const Point2& p : shape.points) {
    flat.push_back(p[0]);
    flat.push_back(p[1]);
  }
  return flat;
}

AirfoilShape airfoil_from_flat(std::span<const double> flat) {
  if (flat.size() % 2 != 0)
    throw ContractError("airfoil_from_flat: odd number of values");
  AirfoilShape s;
  s.points.reserve(flat.size() / 2);
  for (std::size_t i = 0; i < flat.size(); i += 2) {
    s.points.push_back({flat[i], flat[i + 1]});
  }
  return s;
}

std::vector<double> flatten(const SDFField& field) { return field.values; }

SDFField field_from_flat(std::span<const double> flat, std::size_t rows, std::size_t cols) {
  if (flat.size() != rows * cols)
    throw ContractError("field_from_flat: size mismatch");
  SDFField f;
  f.rows = rows;
  f.cols = cols;
  f.values.assign(flat.begin(), flat.end());
  return f;
}

}  // namespace ganduf
