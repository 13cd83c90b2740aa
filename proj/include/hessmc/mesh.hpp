#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>

namespace hessmc {

/// Uniform structured quadrilateral mesh on [0, lx] x [0, ly] with bilinear
/// Lagrange elements. Node (i, j) has index j * (nx + 1) + i.
class Mesh2D {
 public:
  Mesh2D(int nx, int ny, double lx, double ly);

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  double lx() const noexcept { return lx_; }
  double ly() const noexcept { return ly_; }
  double hx() const noexcept { return lx_ / nx_; }
  double hy() const noexcept { return ly_ / ny_; }

  Eigen::Index num_nodes() const noexcept {
    return static_cast<Eigen::Index>(nx_ + 1) * (ny_ + 1);
  }
  int num_cells() const noexcept { return nx_ * ny_; }

  Eigen::Index node(int i, int j) const noexcept {
    return static_cast<Eigen::Index>(j) * (nx_ + 1) + i;
  }
  Eigen::Vector2d coord(Eigen::Index node) const noexcept;

  /// Node indices of cell (cx, cy), counter-clockwise from the lower left.
  std::array<Eigen::Index, 4> cell_nodes(int cx, int cy) const noexcept;

  /// Same topology with extents multiplied by `factor`.
  Mesh2D scaled(double factor) const { return {nx_, ny_, lx_ * factor, ly_ * factor}; }

  /// Index of the node closest to (x, y).
  Eigen::Index nearest_node(double x, double y) const noexcept;

  bool contains(double x, double y, double tol = 1e-12) const noexcept;

  /// Containing cell and reference coordinates in [0,1]^2, or nullopt when
  /// the point lies outside the domain.
  struct Location {
    int cx, cy;
    double xi, eta;
  };
  std::optional<Location> locate(double x, double y) const noexcept;

  /// Bilinear shape function values at reference coordinates (xi, eta),
  /// ordered like cell_nodes().
  static std::array<double, 4> shape(double xi, double eta) noexcept;

 private:
  int nx_, ny_;
  double lx_, ly_;
};

/// One 2x2 Gauss point on a (uniform) cell with physical shape gradients.
struct QuadPoint {
  double weight;  // includes the cell Jacobian
  std::array<double, 4> phi;
  std::array<Eigen::Vector2d, 4> grad;
};

/// 2x2 Gauss rule shared by every cell of a uniform mesh.
std::array<QuadPoint, 4> cell_quadrature(const Mesh2D& mesh);

}  // namespace hessmc
