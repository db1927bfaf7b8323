#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "calderon/geometry.hpp"

namespace calderon {

using Complex = std::complex<double>;

enum class Parity : std::uint8_t { None = 0, EvenInX3 = 1, ZeroExtended = 2 };

/// Complex-valued samples of a function on the nodes of a BoxDomain lattice.
class GridField {
 public:
  GridField() = default;
  explicit GridField(const BoxDomain& box, Parity parity = Parity::None)
      : box_(box), parity_(parity), values_(box.total_nodes(), Complex(0.0, 0.0)) {}

  static GridField sample(const BoxDomain& box,
                          const std::function<Complex(const Vec3&)>& f,
                          Parity parity = Parity::None);

  const BoxDomain& box() const { return box_; }
  Parity parity() const { return parity_; }
  void set_parity(Parity p) { parity_ = p; }

  Complex& at(int i, int j, int k) { return values_[box_.linear_index(i, j, k)]; }
  const Complex& at(int i, int j, int k) const {
    return values_[box_.linear_index(i, j, k)];
  }
  Complex& operator[](std::int64_t lin) { return values_[lin]; }
  const Complex& operator[](std::int64_t lin) const { return values_[lin]; }

  std::vector<Complex>& values() { return values_; }
  const std::vector<Complex>& values() const { return values_; }

  bool is_real(double tol = 0.0) const;
  double max_abs() const;
  double max_abs_imag() const;

  /// Trapezoid-quadrature volume norms over the field's own box.
  double norm_l1() const;
  double norm_l2() const;
  double norm_linf() const { return max_abs(); }

  /// Checks h(x',x3) = h(x',-x3) on a lattice symmetric about {x3=0}.
  bool even_in_x3(double tol = 1e-12) const;

 private:
  BoxDomain box_;
  Parity parity_ = Parity::None;
  std::vector<Complex> values_;
};

/// Copies values on the source lattice and fills the rest of `target` with
/// exact zeros. The target lattice must contain the source lattice exactly.
GridField zero_extend(const GridField& q, const BoxDomain& target);

/// Even extension in x3 of a field whose box is flush with {x3=0} from above:
/// output lives on the box doubled across the plane and satisfies
/// q(x',x3) = q(x',-x3). The shared plane nodes are copied once.
GridField even_reflect(const GridField& q);

/// Pointwise reflection h*(x1,x2,x3) = h(x1,x2,-x3) on a lattice symmetric
/// about {x3=0}. An exact involution.
GridField reflect_field(const GridField& h);

/// Binary serialization: magic "CGF1", three little-endian uint64 node counts,
/// one parity byte, one real/complex byte, then row-major little-endian
/// doubles (re/im interleaved when complex).
void save_grid_field(const GridField& f, const std::string& path);
GridField load_grid_field(const std::string& path, const BoxDomain& box);

/// FNV-1a hash of the raw sample bytes; used to fingerprint potentials.
std::uint64_t fingerprint(const GridField& f);

}  // namespace calderon
