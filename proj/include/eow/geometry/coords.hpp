#ifndef EOW_GEOMETRY_COORDS_HPP
#define EOW_GEOMETRY_COORDS_HPP

#include <string>
#include <vector>

#include "eow/error.hpp"
#include "eow/series/truncated_poly.hpp"

namespace eow {

/// Real coordinates of C^{n+1} with (z_1..z_n, w) = (x + iy, u + iv), ordered
/// x_1..x_n, y_1..y_n, u, v.
struct Coords {
  int n = 2;

  explicit Coords(int n_) : n(n_) {
    if (n < 1) throw PreconditionError("dimension n must be at least 1");
  }

  std::size_t dim() const { return static_cast<std::size_t>(2 * n + 2); }
  std::size_t x(int k) const { return static_cast<std::size_t>(k); }
  std::size_t y(int k) const { return static_cast<std::size_t>(n + k); }
  std::size_t u() const { return static_cast<std::size_t>(2 * n); }
  std::size_t v() const { return static_cast<std::size_t>(2 * n + 1); }

  /// Real-part index of complex coordinate k (k == n is w).
  std::size_t re(int k) const { return k < n ? x(k) : u(); }
  std::size_t im(int k) const { return k < n ? y(k) : v(); }

  Vars ambient() const {
    Vars v;
    for (int k = 1; k <= n; ++k) v.push_back("x" + std::to_string(k));
    for (int k = 1; k <= n; ++k) v.push_back("y" + std::to_string(k));
    v.push_back("u");
    v.push_back("v");
    return v;
  }

  /// Parameters of the edge graph: x_1..x_n, u.
  Vars edge() const {
    Vars v;
    for (int k = 1; k <= n; ++k) v.push_back("x" + std::to_string(k));
    v.push_back("u");
    return v;
  }

  /// Variables of the hypersurface graph v = h(x, y, u).
  Vars graph() const {
    Vars v = ambient();
    v.pop_back();
    return v;
  }

  /// Multiplication by i on real tangent vectors: dx -> dy, dy -> -dx.
  template <class T>
  std::vector<T> J(const std::vector<T>& a) const {
    std::vector<T> r(dim(), T(0));
    for (int k = 0; k <= n; ++k) {
      r[im(k)] = a[re(k)];
      r[re(k)] = -a[im(k)];
    }
    return r;
  }
};

}  // namespace eow

#endif  // EOW_GEOMETRY_COORDS_HPP
