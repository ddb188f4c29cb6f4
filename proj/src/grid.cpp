#include "gpsing/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"

namespace gpsing {

double unit_sphere_area(int N) {
  switch (N) {
    case 1: return 2.0;                 // even-extension convention
    case 2: return 2.0 * M_PI;
    case 3: return 4.0 * M_PI;
    default:
      return 2.0 * std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N);
  }
}

bool RadialGrid::same_as(const RadialGrid& other) const {
  if (this == &other) return true;
  return N == other.N && r == other.r;
}

GridPtr build_grid(int N, double rmax, std::size_t nodes, double grading) {
  if (N < 1) throw BadGridSpec("grid dimension must be >= 1");
  if (!(rmax > 0.0)) throw BadGridSpec("rmax must be positive");
  if (nodes < 3) throw BadGridSpec("need at least 3 nodes");
  if (!(grading >= 1.0)) throw BadGridSpec("grading must be >= 1");

  auto g = std::make_shared<RadialGrid>();
  g->N = N;
  g->rmax = rmax;
  g->grading = grading;
  g->surface_const = unit_sphere_area(N);
  g->r.resize(nodes);
  const double n1 = static_cast<double>(nodes - 1);
  for (std::size_t i = 0; i < nodes; ++i)
    g->r[i] = rmax * std::pow(static_cast<double>(i) / n1, grading);
  g->r.front() = 0.0;
  g->r.back() = rmax;
  return g;
}

RadialField::RadialField(GridPtr g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
  if (!grid) throw BadGridSpec("field needs a grid");
  if (values.size() != grid->nodes())
    throw BadGridSpec("field length does not match the grid");
}

RadialField make_field(const GridPtr& grid, const std::function<double(double)>& fn) {
  std::vector<double> v(grid->nodes());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid->r[i]);
  return RadialField(grid, std::move(v));
}

RadialField zero_field(const GridPtr& grid) {
  return RadialField(grid, std::vector<double>(grid->nodes(), 0.0));
}

bool all_finite(const RadialField& f) {
  return std::all_of(f.values.begin(), f.values.end(),
                     [](double x) { return std::isfinite(x); });
}

double integrate_values(const RadialGrid& g, const std::vector<double>& v,
                        double weight_shift) {
  const double gamma = weight_shift;
  if (!(gamma > -static_cast<double>(g.N)))
    throw WeightNotIntegrable("weight shift must exceed -N");
  const std::size_t n = g.r.size();
  const double q = g.N - 1.0 + gamma;  // weight r^q, q > -1

  // Antiderivative node values r^{q+1} and r^{q+2}; both powers positive.
  double acc = 0.0;
  double pa1 = 0.0, pa2 = 0.0;  // at r_0 = 0
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double rb = g.r[i + 1];
    const double pb1 = std::pow(rb, q + 1.0);
    const double pb2 = std::pow(rb, q + 2.0);
    const double I0 = (pb1 - pa1) / (q + 1.0);   // int r^q
    const double I1 = (pb2 - pa2) / (q + 2.0);   // int r^{q+1}
    if (i == 0 && gamma < 0.0) {
      acc += v[1] * I0;  // frozen field factor on the singular first cell
    } else {
      const double h = g.r[i + 1] - g.r[i];
      const double slope = (v[i + 1] - v[i]) / h;
      acc += v[i] * I0 + slope * (I1 - g.r[i] * I0);
    }
    pa1 = pb1;
    pa2 = pb2;
  }
  return g.surface_const * acc;
}

double integrate(const RadialField& f, double weight_shift) {
  return integrate_values(*f.grid, f.values, weight_shift);
}

double l2_norm_sq(const RadialField& f) {
  std::vector<double> sq(f.values.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = f.values[i] * f.values[i];
  return integrate_values(*f.grid, sq, 0.0);
}

std::vector<double> derivative(const RadialField& f) {
  const auto& r = f.grid->r;
  const auto& u = f.values;
  const std::size_t n = u.size();
  std::vector<double> d(n);

  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hm = r[i] - r[i - 1];
    const double hp = r[i + 1] - r[i];
    d[i] = -hp / (hm * (hm + hp)) * u[i - 1] + (hp - hm) / (hm * hp) * u[i] +
           hm / (hp * (hm + hp)) * u[i + 1];
  }
  {
    const double h1 = r[1] - r[0], h2 = r[2] - r[1];
    d[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * u[0] +
           (h1 + h2) / (h1 * h2) * u[1] - h1 / (h2 * (h1 + h2)) * u[2];
  }
  {
    const double h1 = r[n - 1] - r[n - 2], h2 = r[n - 2] - r[n - 3];
    d[n - 1] = (2.0 * h1 + h2) / (h1 * (h1 + h2)) * u[n - 1] -
               (h1 + h2) / (h1 * h2) * u[n - 2] + h1 / (h2 * (h1 + h2)) * u[n - 3];
  }
  return d;
}

double h1_seminorm_sq(const RadialField& f) {
  std::vector<double> d = derivative(f);
  for (double& x : d) x *= x;
  return integrate_values(*f.grid, d, 0.0);
}

double sup_distance(const RadialField& f, const RadialField& g) {
  if (!f.grid || !g.grid || !f.grid->same_as(*g.grid)) throw GridMismatch();
  double m = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    m = std::max(m, std::abs(f.values[i] - g.values[i]));
  return m;
}

double sup_norm(const RadialField& f) {
  double m = 0.0;
  for (double x : f.values) m = std::max(m, std::abs(x));
  return m;
}

namespace {

double sign_of(double x) { return (x > 0.0) - (x < 0.0); }

// Shape-limited endpoint slope (Fritsch-Carlson).
double pchip_end_slope(double h0, double h1, double s0, double s1) {
  double d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
  if (sign_of(d) != sign_of(s0)) return 0.0;
  if (sign_of(s0) != sign_of(s1) && std::abs(d) > 3.0 * std::abs(s0))
    return 3.0 * s0;
  return d;
}

}  // namespace

FieldInterpolant::FieldInterpolant(const RadialField& f)
    : x_(f.grid->r), y_(f.values) {
  const std::size_t n = x_.size();
  d_.assign(n, 0.0);
  std::vector<double> h(n - 1), s(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    s[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (s[i - 1] * s[i] <= 0.0) {
      d_[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d_[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
    }
  }
  d_[0] = pchip_end_slope(h[0], h[1], s[0], s[1]);
  d_[n - 1] = pchip_end_slope(h[n - 2], h[n - 3], s[n - 2], s[n - 3]);
}

double FieldInterpolant::operator()(double r) const {
  if (r <= x_.front()) return y_.front();
  if (r >= x_.back()) return (r > x_.back()) ? 0.0 : y_.back();
  const auto it = std::upper_bound(x_.begin(), x_.end(), r);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double h = x_[i + 1] - x_[i];
  const double t = (r - x_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return y_[i] * (2.0 * t3 - 3.0 * t2 + 1.0) + h * d_[i] * (t3 - 2.0 * t2 + t) +
         y_[i + 1] * (-2.0 * t3 + 3.0 * t2) + h * d_[i + 1] * (t3 - t2);
}

double interp_eval(const RadialField& f, double r) {
  return FieldInterpolant(f)(r);
}

RadialField rescale(const RadialField& u, double eps) {
  if (!(eps > 0.0)) throw BadGridSpec("rescale factor must be positive");
  const FieldInterpolant interp(u);
  const double amp = std::pow(eps, 0.5 * u.grid->N);
  std::vector<double> v(u.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double q = eps * u.grid->r[i];
    v[i] = (q > u.grid->rmax) ? 0.0 : amp * interp(q);
  }
  return RadialField(u.grid, std::move(v));
}

void write_field_txt(const RadialField& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IOFailure("cannot open " + path);
  char line[80];
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.17g %.17g\n", f.grid->r[i], f.values[i]);
    out << line;
  }
  if (!out) throw IOFailure("write failed for " + path);
}

std::string field_to_json_string(const RadialField& f) {
  nlohmann::json j;
  j["grid"] = {{"N", f.grid->N},
               {"rmax", f.grid->rmax},
               {"nodes", f.grid->nodes()},
               {"grading", f.grid->grading}};
  j["values"] = f.values;
  return j.dump();
}

RadialField field_from_json_string(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const auto& jg = j.at("grid");
  GridPtr g = build_grid(jg.at("N").get<int>(), jg.at("rmax").get<double>(),
                         jg.at("nodes").get<std::size_t>(),
                         jg.at("grading").get<double>());
  return RadialField(g, j.at("values").get<std::vector<double>>());
}

}  // namespace gpsing
