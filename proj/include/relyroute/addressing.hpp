#ifndef RELYROUTE_ADDRESSING_HPP
#define RELYROUTE_ADDRESSING_HPP

#include "relyroute/graph.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace relyroute {

/// Leaf of the binary address tree. Bit 0 is the most significant bit, i.e.
/// the branch taken right below the root.
class Address {
public:
  static constexpr std::size_t max_bits = 63;

  Address() = default;
  Address(std::uint64_t value, std::size_t bits);

  static Address zeros(std::size_t bits) { return Address(0, bits); }
  static Address from_string(std::string_view bits);

  std::size_t length() const noexcept { return bits_; }
  std::uint64_t value() const noexcept { return value_; }
  bool bit(std::size_t index) const;

  Address with_flipped(std::size_t index) const;
  /// Keeps bits [0, length) and zeroes the rest.
  Address truncated(std::size_t length) const;
  bool shares_prefix(const Address& other, std::size_t length) const;

  std::string to_string() const;

  friend bool operator==(const Address&, const Address&) = default;

private:
  std::uint64_t value_ = 0;
  std::size_t bits_ = 0;
};

/// Index of the first differing bit, or the address length when equal.
std::size_t level_of_divergence(const Address& a, const Address& b);

class AllocationError : public std::runtime_error {
public:
  AllocationError(const std::string& what, std::optional<Vertex> node)
      : std::runtime_error(what), node_(node) {}
  std::optional<Vertex> node() const noexcept { return node_; }

private:
  std::optional<Vertex> node_;
};

/// node id -> address, injective over the addressed nodes.
class AddressMap {
public:
  AddressMap(std::size_t bits, Vertex root, std::vector<std::optional<Address>> assignment);

  std::size_t bits() const noexcept { return bits_; }
  Vertex root() const noexcept { return root_; }
  std::size_t node_count() const noexcept { return assignment_.size(); }

  bool has(Vertex v) const { return v < assignment_.size() && assignment_[v].has_value(); }
  const Address& at(Vertex v) const;
  bool complete() const;

  friend bool operator==(const AddressMap&, const AddressMap&) = default;

private:
  std::size_t bits_;
  Vertex root_;
  std::vector<std::optional<Address>> assignment_;
};

/// ceil(log2(n)) + 2.
std::size_t default_address_bits(std::size_t n);

/// Centralized allocation over a connected undirected graph. Nodes join in
/// BFS order from root (ascending id among siblings). A joining node asks its
/// BFS parent, then its other addressed neighbours by ascending id; a giver u
/// offers, for k = l-1 down to 0, addr(u) with bit k flipped and deeper bits
/// cleared, accepted when no assigned address has that (k+1)-bit prefix.
AddressMap allocate_addresses(const Graph& g, Vertex root, std::size_t bits);

std::string serialize_address_map(const AddressMap& map);
AddressMap parse_address_map(std::string_view text);

/// FNV-1a over the serialized map.
std::uint64_t address_map_digest(const AddressMap& map);

} // namespace relyroute

#endif // RELYROUTE_ADDRESSING_HPP
