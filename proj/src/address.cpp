#include "dnp/address.hpp"

#include <sstream>

namespace dnp {

bool Coord::operator==(const Coord& o) const {
  if (dims != o.dims) return false;
  for (int i = 0; i < dims; ++i) {
    if ((*this)[i] != o[i]) return false;
  }
  return true;
}

std::string Coord::str() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < dims; ++i) {
    if (i) os << ',';
    os << (*this)[i];
  }
  os << ')';
  return os.str();
}

AddressLayout::AddressLayout(int dims, std::array<int, 4> sizes, std::array<int, 4> bits)
    : dims_(dims), sizes_(sizes), bits_(bits) {
  for (int d = 0; d < dims_; ++d) {
    const int s = sizes_[static_cast<std::size_t>(d)];
    if (s < 1 || s > (1 << bits_[static_cast<std::size_t>(d)])) {
      throw RangeError("dimension " + std::to_string(d) + " size " + std::to_string(s) +
                       " does not fit its " + std::to_string(bits_[static_cast<std::size_t>(d)]) +
                       "-bit field");
    }
  }
}

AddressLayout AddressLayout::torus3d(std::array<int, 3> sizes) {
  return AddressLayout(3, {sizes[0], sizes[1], sizes[2], 1}, {6, 6, 6, 0});
}

AddressLayout AddressLayout::torus3d_tiles(std::array<int, 3> sizes, int tiles) {
  return AddressLayout(4, {sizes[0], sizes[1], sizes[2], tiles}, {5, 5, 5, 3});
}

std::size_t AddressLayout::node_count() const {
  std::size_t n = 1;
  for (int d = 0; d < dims_; ++d) n *= static_cast<std::size_t>(size(d));
  return n;
}

DnpId AddressLayout::encode(const Coord& c) const {
  if (c.dims != dims_) throw RangeError("coordinate arity does not match address layout");
  std::uint32_t raw = 0;
  int shift = 0;
  for (int d = 0; d < dims_; ++d) {
    if (c[d] < 0 || c[d] >= size(d)) {
      throw RangeError("coordinate " + c.str() + " outside lattice in dimension " + std::to_string(d));
    }
    raw |= static_cast<std::uint32_t>(c[d]) << shift;
    shift += bits(d);
  }
  return DnpId(raw);
}

Coord AddressLayout::decode(DnpId id) const {
  if (!contains(id)) throw RangeError("DnpId " + std::to_string(id.raw()) + " not in lattice");
  Coord c;
  c.dims = dims_;
  std::uint32_t raw = id.raw();
  for (int d = 0; d < dims_; ++d) {
    c[d] = static_cast<int>(raw & ((1u << bits(d)) - 1));
    raw >>= bits(d);
  }
  return c;
}

bool AddressLayout::contains(DnpId id) const {
  std::uint32_t raw = id.raw();
  for (int d = 0; d < dims_; ++d) {
    if (static_cast<int>(raw & ((1u << bits(d)) - 1)) >= size(d)) return false;
    raw >>= bits(d);
  }
  return raw == 0;
}

std::size_t AddressLayout::index_of(const Coord& c) const {
  std::size_t idx = 0;
  std::size_t stride = 1;
  for (int d = 0; d < dims_; ++d) {
    if (c[d] < 0 || c[d] >= size(d)) throw RangeError("coordinate " + c.str() + " outside lattice");
    idx += static_cast<std::size_t>(c[d]) * stride;
    stride *= static_cast<std::size_t>(size(d));
  }
  return idx;
}

Coord AddressLayout::coord_at(std::size_t index) const {
  if (index >= node_count()) throw RangeError("node index out of range");
  Coord c;
  c.dims = dims_;
  for (int d = 0; d < dims_; ++d) {
    c[d] = static_cast<int>(index % static_cast<std::size_t>(size(d)));
    index /= static_cast<std::size_t>(size(d));
  }
  return c;
}

}  // namespace dnp
