#include "hessmc/mesh.hpp"

#include "hessmc/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hessmc {

Mesh2D::Mesh2D(int nx, int ny, double lx, double ly)
    : nx_(nx), ny_(ny), lx_(lx), ly_(ly) {
  if (nx < 1) throw NonPositiveParameter("nx");
  if (ny < 1) throw NonPositiveParameter("ny");
  if (!(lx > 0.0)) throw NonPositiveParameter("lx");
  if (!(ly > 0.0)) throw NonPositiveParameter("ly");
}

Eigen::Vector2d Mesh2D::coord(Eigen::Index node) const noexcept {
  const auto i = node % (nx_ + 1);
  const auto j = node / (nx_ + 1);
  return {static_cast<double>(i) * hx(), static_cast<double>(j) * hy()};
}

std::array<Eigen::Index, 4> Mesh2D::cell_nodes(int cx, int cy) const noexcept {
  return {node(cx, cy), node(cx + 1, cy), node(cx + 1, cy + 1),
          node(cx, cy + 1)};
}

Eigen::Index Mesh2D::nearest_node(double x, double y) const noexcept {
  const int i = std::clamp(static_cast<int>(std::lround(x / hx())), 0, nx_);
  const int j = std::clamp(static_cast<int>(std::lround(y / hy())), 0, ny_);
  return node(i, j);
}

bool Mesh2D::contains(double x, double y, double tol) const noexcept {
  const double ex = tol * lx_, ey = tol * ly_;
  return x >= -ex && x <= lx_ + ex && y >= -ey && y <= ly_ + ey;
}

std::optional<Mesh2D::Location> Mesh2D::locate(double x,
                                               double y) const noexcept {
  if (!contains(x, y)) return std::nullopt;
  const double sx = std::clamp(x / hx(), 0.0, static_cast<double>(nx_));
  const double sy = std::clamp(y / hy(), 0.0, static_cast<double>(ny_));
  const int cx = std::min(static_cast<int>(std::floor(sx)), nx_ - 1);
  const int cy = std::min(static_cast<int>(std::floor(sy)), ny_ - 1);
  return Location{cx, cy, sx - cx, sy - cy};
}

std::array<double, 4> Mesh2D::shape(double xi, double eta) noexcept {
  return {(1.0 - xi) * (1.0 - eta), xi * (1.0 - eta), xi * eta,
          (1.0 - xi) * eta};
}

std::array<QuadPoint, 4> cell_quadrature(const Mesh2D& mesh) {
  const double hx = mesh.hx();
  const double hy = mesh.hy();
  const double g = 0.5 / std::sqrt(3.0);
  const std::array<double, 2> pts{0.5 - g, 0.5 + g};

  std::array<QuadPoint, 4> out{};
  int q = 0;
  for (double eta : pts) {
    for (double xi : pts) {
      QuadPoint& p = out[q++];
      p.weight = 0.25 * hx * hy;
      p.phi = Mesh2D::shape(xi, eta);
      p.grad[0] = {-(1.0 - eta) / hx, -(1.0 - xi) / hy};
      p.grad[1] = {(1.0 - eta) / hx, -xi / hy};
      p.grad[2] = {eta / hx, xi / hy};
      p.grad[3] = {-eta / hx, (1.0 - xi) / hy};
    }
  }
  return out;
}

}  // namespace hessmc
