#include "chb/spectral_bases.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

namespace chb {

namespace {

constexpr double kPi = std::numbers::pi;

struct Line {
  std::vector<double> nodes;
  std::vector<double> weights;
};

Line gauss_legendre(int n, double length) {
  // boost returns the non-negative roots only
  const std::vector<double> roots = boost::math::legendre_p_zeros<double>(n);
  std::vector<double> xi;
  xi.reserve(n);
  for (double r : roots) {
    xi.push_back(r);
    if (r > 0.0) xi.push_back(-r);
  }
  std::sort(xi.begin(), xi.end());
  Line line;
  for (double s : xi) {
    const double dp = boost::math::legendre_p_prime(n, s);
    const double w = 2.0 / ((1.0 - s * s) * dp * dp);
    line.nodes.push_back(0.5 * length * (1.0 + s));
    line.weights.push_back(0.5 * length * w);
  }
  return line;
}

bool eigen_tie(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({a, b, 1.0}); }

double cos_factor(int m, double len, double x) {
  if (m == 0) return 1.0 / std::sqrt(len);
  return std::sqrt(2.0 / len) * std::cos(m * kPi * x / len);
}

double cos_factor_prime(int m, double len, double x) {
  if (m == 0) return 0.0;
  return -std::sqrt(2.0 / len) * (m * kPi / len) * std::sin(m * kPi * x / len);
}

double sin_factor(int m, double len, double x) { return std::sqrt(2.0 / len) * std::sin(m * kPi * x / len); }

double sin_factor_prime(int m, double len, double x) {
  return std::sqrt(2.0 / len) * (m * kPi / len) * std::cos(m * kPi * x / len);
}

void check_floor(const RectDomain& d, int max_mx, int max_my) {
  if (d.lx <= 0.0 || d.ly <= 0.0) throw ConfigError("domain side lengths must be positive");
  if (d.nq_x < quadrature_floor(max_mx) || d.nq_y < quadrature_floor(max_my)) {
    throw ConfigError("quadrature resolution below the anti-aliasing floor 2*max_mode+2");
  }
}

}  // namespace

int quadrature_floor(int max_mode) { return 2 * max_mode + 2; }

int default_quadrature_points(int max_mode) { return 4 * max_mode + 8; }

Quadrature make_quadrature(const RectDomain& domain) {
  const Line lx = gauss_legendre(domain.nq_x, domain.lx);
  const Line ly = gauss_legendre(domain.nq_y, domain.ly);
  Quadrature q;
  q.nx = domain.nq_x;
  q.ny = domain.nq_y;
  const int n = q.nx * q.ny;
  q.x.resize(n);
  q.y.resize(n);
  q.w.resize(n);
  for (int iy = 0; iy < q.ny; ++iy) {
    for (int ix = 0; ix < q.nx; ++ix) {
      const int k = iy * q.nx + ix;
      q.x[k] = lx.nodes[ix];
      q.y[k] = ly.nodes[iy];
      q.w[k] = lx.weights[ix] * ly.weights[iy];
    }
  }
  return q;
}

double neumann_eigenvalue(const RectDomain& domain, int mx, int my) {
  const double kx = mx * kPi / domain.lx;
  const double ky = my * kPi / domain.ly;
  return kx * kx + ky * ky;
}

std::vector<ScalarMode> scalar_modes(const RectDomain& domain, int k) {
  if (k < 1) throw ConfigError("mode count must be positive");
  std::vector<std::tuple<double, int, int>> all;
  for (int mx = 0; mx <= k; ++mx)
    for (int my = 0; my <= k; ++my) all.emplace_back(neumann_eigenvalue(domain, mx, my), mx, my);
  std::sort(all.begin(), all.end(), [](const auto& p, const auto& q) {
    if (!eigen_tie(std::get<0>(p), std::get<0>(q))) return std::get<0>(p) < std::get<0>(q);
    return std::tie(std::get<1>(p), std::get<2>(p)) < std::tie(std::get<1>(q), std::get<2>(q));
  });
  std::vector<ScalarMode> out;
  for (int i = 0; i < k; ++i) out.push_back({std::get<1>(all[i]), std::get<2>(all[i])});
  return out;
}

std::vector<VectorMode> vector_modes(const RectDomain& domain, int k) {
  if (k < 1) throw ConfigError("mode count must be positive");
  std::vector<std::tuple<double, int, int, int>> all;
  const int mmax = k / 2 + 1;
  for (int mx = 1; mx <= mmax; ++mx)
    for (int my = 1; my <= mmax; ++my)
      for (int c = 0; c < 2; ++c) all.emplace_back(neumann_eigenvalue(domain, mx, my), mx, my, c);
  std::sort(all.begin(), all.end(), [](const auto& p, const auto& q) {
    if (!eigen_tie(std::get<0>(p), std::get<0>(q))) return std::get<0>(p) < std::get<0>(q);
    return std::tie(std::get<1>(p), std::get<2>(p), std::get<3>(p)) <
           std::tie(std::get<1>(q), std::get<2>(q), std::get<3>(q));
  });
  std::vector<VectorMode> out;
  for (int i = 0; i < k; ++i) out.push_back({std::get<1>(all[i]), std::get<2>(all[i]), std::get<3>(all[i])});
  return out;
}

RectDomain resolve_quadrature(const RectDomain& domain, int max_mx, int max_my) {
  RectDomain d = domain;
  if (d.nq_x == 0) d.nq_x = default_quadrature_points(max_mx);
  if (d.nq_y == 0) d.nq_y = default_quadrature_points(max_my);
  check_floor(d, max_mx, max_my);
  return d;
}

namespace {

ScalarBasis scalar_on(const RectDomain& d, const Quadrature& quad, const std::vector<ScalarMode>& modes) {
  ScalarBasis b;
  b.domain = d;
  b.quad = quad;
  b.modes = modes;
  const int k = static_cast<int>(modes.size());
  const int n = quad.size();
  b.lambda.resize(k);
  b.scale.resize(k);
  b.value.resize(n, k);
  b.grad_x.resize(n, k);
  b.grad_y.resize(n, k);
  for (int i = 0; i < k; ++i) {
    const auto [mx, my] = modes[i];
    b.lambda[i] = neumann_eigenvalue(d, mx, my);
    for (int q = 0; q < n; ++q) {
      const double fx = cos_factor(mx, d.lx, quad.x[q]);
      const double fy = cos_factor(my, d.ly, quad.y[q]);
      b.value(q, i) = fx * fy;
      b.grad_x(q, i) = cos_factor_prime(mx, d.lx, quad.x[q]) * fy;
      b.grad_y(q, i) = fx * cos_factor_prime(my, d.ly, quad.y[q]);
    }
    const double nrm = std::sqrt(integrate(quad.w, b.value.col(i).cwiseProduct(b.value.col(i))));
    b.scale[i] = 1.0 / nrm;
    b.value.col(i) /= nrm;
    b.grad_x.col(i) /= nrm;
    b.grad_y.col(i) /= nrm;
  }
  return b;
}

VectorBasis vector_on(const RectDomain& d, const Quadrature& quad, const std::vector<VectorMode>& modes) {
  VectorBasis b;
  b.domain = d;
  b.quad = quad;
  b.modes = modes;
  const int k = static_cast<int>(modes.size());
  const int n = quad.size();
  b.lambda.resize(k);
  b.scale.resize(k);
  for (Mat* m : {&b.ux, &b.uy, &b.exx, &b.eyy, &b.exy, &b.div}) m->setZero(n, k);
  for (int i = 0; i < k; ++i) {
    const VectorMode& md = modes[i];
    b.lambda[i] = neumann_eigenvalue(d, md.mx, md.my);
    Vec s(n), sx(n), sy(n);
    for (int q = 0; q < n; ++q) {
      const double fx = sin_factor(md.mx, d.lx, quad.x[q]);
      const double fy = sin_factor(md.my, d.ly, quad.y[q]);
      s[q] = fx * fy;
      sx[q] = sin_factor_prime(md.mx, d.lx, quad.x[q]) * fy;
      sy[q] = fx * sin_factor_prime(md.my, d.ly, quad.y[q]);
    }
    const double nrm = std::sqrt(integrate(quad.w, s.cwiseProduct(s)));
    b.scale[i] = 1.0 / nrm;
    s /= nrm;
    sx /= nrm;
    sy /= nrm;
    if (md.component == 0) {
      b.ux.col(i) = s;
      b.exx.col(i) = sx;
      b.exy.col(i) = 0.5 * sy;
      b.div.col(i) = sx;
    } else {
      b.uy.col(i) = s;
      b.eyy.col(i) = sy;
      b.exy.col(i) = 0.5 * sx;
      b.div.col(i) = sy;
    }
  }
  return b;
}

int max_scalar_x(const std::vector<ScalarMode>& m) {
  int r = 0;
  for (auto& s : m) r = std::max(r, s.mx);
  return r;
}
int max_scalar_y(const std::vector<ScalarMode>& m) {
  int r = 0;
  for (auto& s : m) r = std::max(r, s.my);
  return r;
}

}  // namespace

double ScalarBasis::evaluate(int i, double x, double y) const {
  const auto [mx, my] = modes[i];
  return scale[i] * cos_factor(mx, domain.lx, x) * cos_factor(my, domain.ly, y);
}

std::pair<double, double> ScalarBasis::gradient(int i, double x, double y) const {
  const auto [mx, my] = modes[i];
  return {scale[i] * cos_factor_prime(mx, domain.lx, x) * cos_factor(my, domain.ly, y),
          scale[i] * cos_factor(mx, domain.lx, x) * cos_factor_prime(my, domain.ly, y)};
}

std::pair<double, double> VectorBasis::evaluate(int i, double x, double y) const {
  const VectorMode& md = modes[i];
  const double s = scale[i] * sin_factor(md.mx, domain.lx, x) * sin_factor(md.my, domain.ly, y);
  return md.component == 0 ? std::pair{s, 0.0} : std::pair{0.0, s};
}

ScalarBasis build_scalar_basis(const RectDomain& domain, int k) {
  const auto modes = scalar_modes(domain, k);
  const RectDomain d = resolve_quadrature(domain, max_scalar_x(modes), max_scalar_y(modes));
  return scalar_on(d, make_quadrature(d), modes);
}

VectorBasis build_vector_basis(const RectDomain& domain, int k) {
  const auto modes = vector_modes(domain, k);
  int mx = 0, my = 0;
  for (auto& m : modes) {
    mx = std::max(mx, m.mx);
    my = std::max(my, m.my);
  }
  const RectDomain d = resolve_quadrature(domain, mx, my);
  return vector_on(d, make_quadrature(d), modes);
}

FluxBasis build_flux_basis(const ScalarBasis& scalar) {
  FluxBasis f;
  const int k = scalar.size();
  const int n = scalar.quad.size();
  f.lambda = scalar.lambda;
  f.qx.setZero(n, k);
  f.qy.setZero(n, k);
  f.div.setZero(n, k);
  for (int i = 0; i < k; ++i) {
    if (scalar.lambda[i] == 0.0) continue;
    f.qx.col(i) = -scalar.grad_x.col(i) / scalar.lambda[i];
    f.qy.col(i) = -scalar.grad_y.col(i) / scalar.lambda[i];
    f.div.col(i) = scalar.value.col(i);
  }
  return f;
}

SpectralBasisSet build_bases(const RectDomain& domain, int k) {
  const auto smodes = scalar_modes(domain, k);
  const auto vmodes = vector_modes(domain, k);
  int mx = max_scalar_x(smodes), my = max_scalar_y(smodes);
  for (auto& m : vmodes) {
    mx = std::max(mx, m.mx);
    my = std::max(my, m.my);
  }
  const RectDomain d = resolve_quadrature(domain, mx, my);
  const Quadrature quad = make_quadrature(d);
  SpectralBasisSet set;
  set.scalar = scalar_on(d, quad, smodes);
  set.vector = vector_on(d, quad, vmodes);
  set.flux = build_flux_basis(set.scalar);
  return set;
}

Vec project_scalar(const Vec& f, const ScalarBasis& basis) {
  if (f.size() != basis.quad.size()) throw ConfigError("grid function size does not match the quadrature grid");
  const Vec wf = basis.quad.w.cwiseProduct(f);
  return basis.value.transpose() * wf;
}

Mat weighted_gram(const Mat& x, const Vec& weight) {
  const Mat g = x.transpose() * (weight.asDiagonal() * x);
  return 0.5 * (g + g.transpose());
}

Mat weighted_cross(const Mat& x, const Vec& weight, const Mat& y) {
  return x.transpose() * (weight.asDiagonal() * y);
}

Mat scalar_gram(const ScalarBasis& basis) { return weighted_gram(basis.value, basis.quad.w); }

Mat scalar_stiffness(const ScalarBasis& basis) {
  return weighted_gram(basis.grad_x, basis.quad.w) + weighted_gram(basis.grad_y, basis.quad.w);
}

}  // namespace chb
