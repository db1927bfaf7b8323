#include "calderon/grid_field.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace calderon {

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

GridField GridField::sample(const BoxDomain& box,
                            const std::function<Complex(const Vec3&)>& f,
                            Parity parity) {
  GridField out(box, parity);
  for (int i = 0; i < box.nodes(0); ++i)
    for (int j = 0; j < box.nodes(1); ++j)
      for (int k = 0; k < box.nodes(2); ++k)
        out.at(i, j, k) = f(box.node(i, j, k));
  return out;
}

bool GridField::is_real(double tol) const {
  for (const auto& v : values_)
    if (std::abs(v.imag()) > tol) return false;
  return true;
}

double GridField::max_abs() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

double GridField::max_abs_imag() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v.imag()));
  return m;
}

double GridField::norm_l1() const {
  double s = 0.0;
  const double h3 = std::pow(box_.spacing(), 3);
  for (int i = 0; i < box_.nodes(0); ++i)
    for (int j = 0; j < box_.nodes(1); ++j)
      for (int k = 0; k < box_.nodes(2); ++k)
        s += box_.quad_weight(i, j, k) * std::abs(at(i, j, k));
  return s * h3;
}

double GridField::norm_l2() const {
  double s = 0.0;
  const double h3 = std::pow(box_.spacing(), 3);
  for (int i = 0; i < box_.nodes(0); ++i)
    for (int j = 0; j < box_.nodes(1); ++j)
      for (int k = 0; k < box_.nodes(2); ++k)
        s += box_.quad_weight(i, j, k) * std::norm(at(i, j, k));
  return std::sqrt(s * h3);
}

bool GridField::even_in_x3(double tol) const {
  if (!box_.symmetric_in_x3()) return false;
  const int nz = box_.nodes(2);
  for (int i = 0; i < box_.nodes(0); ++i)
    for (int j = 0; j < box_.nodes(1); ++j)
      for (int k = 0; k < nz; ++k) {
        if (std::abs(at(i, j, k) - at(i, j, nz - 1 - k)) > tol) return false;
      }
  return true;
}

GridField zero_extend(const GridField& q, const BoxDomain& target) {
  if (!target.contains_lattice(q.box()))
    throw DomainError("zero_extend: target lattice does not contain the source");
  const auto off = target.offset_of(q.box());
  GridField out(target, Parity::ZeroExtended);
  for (int i = 0; i < q.box().nodes(0); ++i)
    for (int j = 0; j < q.box().nodes(1); ++j)
      for (int k = 0; k < q.box().nodes(2); ++k)
        out.at(i + off[0], j + off[1], k + off[2]) = q.at(i, j, k);
  return out;
}

GridField even_reflect(const GridField& q) {
  const BoxDomain& src = q.box();
  if (!src.top_face_on_plane())
    throw DomainError("even_reflect: source box must be flush with {x3=0}");
  Vec3 upper = src.upper();
  upper[2] = -src.lower()[2];
  const BoxDomain doubled = BoxDomain::make(src.lower(), upper, src.nodes(0) - 1);
  GridField out(doubled, Parity::EvenInX3);
  const int nz = src.nodes(2);
  for (int i = 0; i < src.nodes(0); ++i)
    for (int j = 0; j < src.nodes(1); ++j)
      for (int k = 0; k < doubled.nodes(2); ++k) {
        const int ks = (k <= nz - 1) ? k : 2 * (nz - 1) - k;
        out.at(i, j, k) = q.at(i, j, ks);
      }
  return out;
}

GridField reflect_field(const GridField& h) {
  if (!h.box().symmetric_in_x3())
    throw DomainError("reflect_field: box must be symmetric about {x3=0}");
  GridField out(h.box(), h.parity());
  const int nz = h.box().nodes(2);
  for (int i = 0; i < h.box().nodes(0); ++i)
    for (int j = 0; j < h.box().nodes(1); ++j)
      for (int k = 0; k < nz; ++k) out.at(i, j, k) = h.at(i, j, nz - 1 - k);
  return out;
}

void save_grid_field(const GridField& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("save_grid_field: cannot open " + path);
  os.write("CGF1", 4);
  for (int d = 0; d < 3; ++d) {
    const std::uint64_t n = std::uint64_t(f.box().nodes(d));
    os.write(reinterpret_cast<const char*>(&n), 8);
  }
  const std::uint8_t parity = std::uint8_t(f.parity());
  const std::uint8_t complex_flag = f.is_real() ? 0 : 1;
  os.write(reinterpret_cast<const char*>(&parity), 1);
  os.write(reinterpret_cast<const char*>(&complex_flag), 1);
  if (complex_flag) {
    os.write(reinterpret_cast<const char*>(f.values().data()),
             std::streamsize(f.values().size() * sizeof(Complex)));
  } else {
    for (const auto& v : f.values()) {
      const double re = v.real();
      os.write(reinterpret_cast<const char*>(&re), 8);
    }
  }
  if (!os) throw Error("save_grid_field: write failed for " + path);
}

GridField load_grid_field(const std::string& path, const BoxDomain& box) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("load_grid_field: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "CGF1", 4) != 0)
    throw Error("load_grid_field: bad magic in " + path);
  std::array<std::uint64_t, 3> counts{};
  for (auto& c : counts) is.read(reinterpret_cast<char*>(&c), 8);
  for (int d = 0; d < 3; ++d)
    if (counts[d] != std::uint64_t(box.nodes(d)))
      throw Error("load_grid_field: node counts do not match the given box");
  std::uint8_t parity = 0, complex_flag = 0;
  is.read(reinterpret_cast<char*>(&parity), 1);
  is.read(reinterpret_cast<char*>(&complex_flag), 1);
  GridField out(box, Parity(parity));
  if (complex_flag) {
    is.read(reinterpret_cast<char*>(out.values().data()),
            std::streamsize(out.values().size() * sizeof(Complex)));
  } else {
    for (auto& v : out.values()) {
      double re = 0.0;
      is.read(reinterpret_cast<char*>(&re), 8);
      v = Complex(re, 0.0);
    }
  }
  if (!is) throw Error("load_grid_field: truncated payload in " + path);
  return out;
}

std::uint64_t fingerprint(const GridField& f) {
  std::uint64_t hash = 1469598103934665603ull;
  const auto* bytes = reinterpret_cast<const unsigned char*>(f.values().data());
  const std::size_t n = f.values().size() * sizeof(Complex);
  for (std::size_t b = 0; b < n; ++b) {
    hash ^= bytes[b];
    hash *= 1099511628211ull;
  }
  return hash;
}

}  // namespace calderon
