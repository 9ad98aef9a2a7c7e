#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>

#include "dnp/types.hpp"

namespace dnp {

inline constexpr int kDnpIdBits = 18;
inline constexpr std::uint32_t kDnpIdMask = (1u << kDnpIdBits) - 1;

class DnpId {
 public:
  constexpr DnpId() = default;
  constexpr explicit DnpId(std::uint32_t raw) : raw_(raw) {
    if (raw >= (1u << kDnpIdBits)) throw RangeError("DnpId exceeds 18 bits");
  }
  constexpr std::uint32_t raw() const { return raw_; }
  auto operator<=>(const DnpId&) const = default;

 private:
  std::uint32_t raw_ = 0;
};

// Up to four coordinates: (x, y, z) for the lattice, w for the tile on chip.
struct Coord {
  std::array<int, 4> v{0, 0, 0, 0};
  int dims = 3;

  int operator[](int i) const { return v[static_cast<std::size_t>(i)]; }
  int& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
  bool operator==(const Coord& o) const;
  std::string str() const;
};

// Bit packing of a coordinate tuple into the 18-bit id. x occupies the low bits.
class AddressLayout {
 public:
  // 6/6/6 packing of an (x, y, z) lattice.
  static AddressLayout torus3d(std::array<int, 3> sizes);
  // 5/5/5/3 packing of (x, y, z, w) with w the tile index within a chip.
  static AddressLayout torus3d_tiles(std::array<int, 3> sizes, int tiles);

  int dims() const { return dims_; }
  int size(int d) const { return sizes_[static_cast<std::size_t>(d)]; }
  int bits(int d) const { return bits_[static_cast<std::size_t>(d)]; }
  std::size_t node_count() const;

  DnpId encode(const Coord& c) const;
  Coord decode(DnpId id) const;
  bool contains(DnpId id) const;

  // Dense index 0..node_count-1, x fastest.
  std::size_t index_of(const Coord& c) const;
  Coord coord_at(std::size_t index) const;

 private:
  AddressLayout(int dims, std::array<int, 4> sizes, std::array<int, 4> bits);
  int dims_;
  std::array<int, 4> sizes_;
  std::array<int, 4> bits_;
};

}  // namespace dnp

template <>
struct std::hash<dnp::DnpId> {
  std::size_t operator()(const dnp::DnpId& id) const noexcept { return id.raw(); }
};
