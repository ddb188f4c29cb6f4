#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gpsing/errors.hpp"

namespace gpsing {

/// Graded radial grid r_i = rmax (i/(n-1))^grading with r_0 = 0.
///
/// grading > 1 clusters nodes near the origin, where profiles carry an
/// r^{2-b} cusp. For N = 1 fields are even extensions of half-line samples
/// and surface_const = 2.
struct RadialGrid {
  int N = 1;
  double rmax = 20.0;
  double grading = 2.0;
  double surface_const = 2.0;  ///< area of the unit sphere in dimension N
  std::vector<double> r;

  std::size_t nodes() const { return r.size(); }
  bool same_as(const RadialGrid& other) const;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

double unit_sphere_area(int N);

/// Throws BadGridSpec unless nodes >= 3, rmax > 0 and grading >= 1.
GridPtr build_grid(int N, double rmax, std::size_t nodes, double grading);

/// Radial function sampled on a shared grid.
struct RadialField {
  GridPtr grid;
  std::vector<double> values;

  RadialField() = default;
  RadialField(GridPtr g, std::vector<double> v);

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

RadialField make_field(const GridPtr& grid, const std::function<double(double)>& fn);
RadialField zero_field(const GridPtr& grid);
bool all_finite(const RadialField& f);

/// surface_const * int_0^rmax f(r) r^{N-1+gamma} dr.
///
/// The weight power is integrated in closed form on every cell. The field
/// factor is linearly interpolated, except on the first cell under a
/// singular weight (gamma < 0) where it is frozen at its value entering
/// from the r_1 side, so the weight is never evaluated at r = 0.
/// Throws WeightNotIntegrable when gamma <= -N.
double integrate(const RadialField& f, double weight_shift = 0.0);

/// Same quadrature applied to raw samples living on a grid.
double integrate_values(const RadialGrid& g, const std::vector<double>& values,
                        double weight_shift = 0.0);

double l2_norm_sq(const RadialField& f);

/// Quadrature of (u')^2 with u' by centered second-order differences on the
/// non-uniform grid (one-sided at the endpoints).
double h1_seminorm_sq(const RadialField& f);

std::vector<double> derivative(const RadialField& f);

/// max_i |f_i - g_i|; throws GridMismatch when the grids differ.
double sup_distance(const RadialField& f, const RadialField& g);
double sup_norm(const RadialField& f);

/// Monotone piecewise-cubic interpolant of a sampled field.
/// Evaluates to 0 beyond rmax.
class FieldInterpolant {
 public:
  explicit FieldInterpolant(const RadialField& f);
  double operator()(double r) const;

 private:
  std::vector<double> x_, y_, d_;
};

double interp_eval(const RadialField& f, double r);

/// v(r) = eps^{N/2} u(eps r) on the same grid; 0 beyond rmax/eps.
RadialField rescale(const RadialField& u, double eps);

void write_field_txt(const RadialField& f, const std::string& path);
std::string field_to_json_string(const RadialField& f);
RadialField field_from_json_string(const std::string& text);

}  // namespace gpsing
