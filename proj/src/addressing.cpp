#include "relyroute/addressing.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <queue>

namespace relyroute {

Address::Address(std::uint64_t value, std::size_t bits) : value_(value), bits_(bits)
{
  if (bits > max_bits)
    throw std::invalid_argument("address length " + std::to_string(bits) + " exceeds " + std::to_string(max_bits));
  if (bits < 64 && (value >> bits) != 0)
    throw std::invalid_argument("address value does not fit in " + std::to_string(bits) + " bits");
}

Address Address::from_string(std::string_view bits)
{
  if (bits.size() > max_bits)
    throw std::invalid_argument("address string too long");
  std::uint64_t value = 0;
  for (char c : bits) {
    if (c != '0' && c != '1')
      throw std::invalid_argument("address string may only contain 0 and 1");
    value = (value << 1) | static_cast<std::uint64_t>(c - '0');
  }
  return Address(value, bits.size());
}

bool Address::bit(std::size_t index) const
{
  if (index >= bits_)
    throw std::out_of_range("address bit index out of range");
  return (value_ >> (bits_ - 1 - index)) & 1u;
}

Address Address::with_flipped(std::size_t index) const
{
  if (index >= bits_)
    throw std::out_of_range("address bit index out of range");
  return Address(value_ ^ (std::uint64_t{1} << (bits_ - 1 - index)), bits_);
}

Address Address::truncated(std::size_t length) const
{
  if (length >= bits_)
    return *this;
  std::uint64_t keep = ~std::uint64_t{0} << (bits_ - length);
  return Address(value_ & keep & ((std::uint64_t{1} << bits_) - 1), bits_);
}

bool Address::shares_prefix(const Address& other, std::size_t length) const
{
  return level_of_divergence(*this, other) >= length;
}

std::string Address::to_string() const
{
  std::string out(bits_, '0');
  for (std::size_t i = 0; i < bits_; ++i)
    if (bit(i))
      out[i] = '1';
  return out;
}

std::size_t level_of_divergence(const Address& a, const Address& b)
{
  if (a.length() != b.length())
    throw std::invalid_argument("addresses of different lengths");
  std::uint64_t diff = a.value() ^ b.value();
  if (diff == 0)
    return a.length();
  // Highest differing bit, counted from the most significant address bit.
  std::size_t highest = 63 - static_cast<std::size_t>(std::countl_zero(diff));
  return a.length() - 1 - highest;
}

AddressMap::AddressMap(std::size_t bits, Vertex root, std::vector<std::optional<Address>> assignment)
    : bits_(bits), root_(root), assignment_(std::move(assignment))
{
  std::vector<std::uint64_t> seen;
  for (const auto& a : assignment_) {
    if (!a)
      continue;
    if (a->length() != bits_)
      throw std::invalid_argument("address length differs from map bit length");
    seen.push_back(a->value());
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw std::invalid_argument("address map assigns the same address twice");
}

const Address& AddressMap::at(Vertex v) const
{
  if (!has(v))
    throw std::out_of_range("node " + std::to_string(v) + " has no address");
  return *assignment_[v];
}

bool AddressMap::complete() const
{
  return std::all_of(assignment_.begin(), assignment_.end(), [](const auto& a) { return a.has_value(); });
}

std::size_t default_address_bits(std::size_t n)
{
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n)
    ++bits;
  return bits + 2;
}

namespace {

bool prefix_free(const std::vector<std::optional<Address>>& assigned, const Address& candidate, std::size_t length)
{
  for (const auto& a : assigned)
    if (a && a->shares_prefix(candidate, length))
      return false;
  return true;
}

std::optional<Address> offer_from(const std::vector<std::optional<Address>>& assigned, const Address& giver,
                                  std::size_t bits)
{
  for (std::size_t k = bits; k-- > 0;) {
    Address candidate = giver.with_flipped(k).truncated(k + 1);
    if (prefix_free(assigned, candidate, k + 1))
      return candidate;
  }
  return std::nullopt;
}

} // namespace

AddressMap allocate_addresses(const Graph& g, Vertex root, std::size_t bits)
{
  const std::size_t n = g.vertex_count();
  if (g.directed())
    throw GraphError("address allocation needs an undirected graph");
  if (root >= n)
    throw GraphError("root " + std::to_string(root) + " out of range");
  if (bits > Address::max_bits || (bits < 64 && (std::uint64_t{1} << bits) < n))
    throw AllocationError("address space of " + std::to_string(bits) + " bits cannot hold " + std::to_string(n) +
                              " nodes",
                          std::nullopt);

  std::vector<std::optional<Address>> assigned(n);
  std::vector<Vertex> parent(n, n);
  std::vector<Vertex> order;
  order.reserve(n);

  std::queue<Vertex> queue;
  queue.push(root);
  parent[root] = root;
  while (!queue.empty()) {
    Vertex u = queue.front();
    queue.pop();
    order.push_back(u);
    for (Vertex w : g.out_neighbors(u))
      if (parent[w] == n) {
        parent[w] = u;
        queue.push(w);
      }
  }
  if (order.size() != n) {
    Vertex missing = 0;
    while (parent[missing] != n)
      ++missing;
    throw AllocationError("graph is disconnected: node " + std::to_string(missing) + " unreachable from root " +
                              std::to_string(root),
                          missing);
  }

  assigned[root] = Address::zeros(bits);
  for (std::size_t i = 1; i < order.size(); ++i) {
    Vertex v = order[i];
    std::vector<Vertex> givers{parent[v]};
    for (Vertex w : g.out_neighbors(v))
      if (w != parent[v] && assigned[w])
        givers.push_back(w);

    std::optional<Address> got;
    for (Vertex u : givers)
      if ((got = offer_from(assigned, *assigned[u], bits)))
        break;
    if (!got)
      throw AllocationError("address space exhausted while allocating node " + std::to_string(v), v);
    assigned[v] = *got;
  }
  return AddressMap(bits, root, std::move(assigned));
}

std::string serialize_address_map(const AddressMap& map)
{
  std::string out = "l=" + std::to_string(map.bits()) + " root=" + std::to_string(map.root()) + "\n";
  for (Vertex v = 0; v < map.node_count(); ++v)
    if (map.has(v))
      out += std::to_string(v) + " " + map.at(v).to_string() + "\n";
  return out;
}

AddressMap parse_address_map(std::string_view text)
{
  auto parse_number = [](std::string_view s) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
      throw std::invalid_argument("bad number '" + std::string(s) + "' in address map");
    return value;
  };

  std::size_t pos = 0;
  bool have_header = false;
  std::size_t bits = 0;
  Vertex root = 0;
  std::vector<std::pair<Vertex, Address>> entries;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos)
      end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty() || line.front() == '#')
      continue;
    std::size_t space = line.find(' ');
    if (space == std::string_view::npos)
      throw std::invalid_argument("address map line '" + std::string(line) + "' lacks a separator");
    std::string_view first = line.substr(0, space);
    std::string_view second = line.substr(space + 1);
    if (!have_header) {
      if (first.substr(0, 2) != "l=" || second.substr(0, 5) != "root=")
        throw std::invalid_argument("address map header must be 'l=<bits> root=<id>'");
      bits = parse_number(first.substr(2));
      root = parse_number(second.substr(5));
      have_header = true;
      continue;
    }
    Address a = Address::from_string(second);
    if (a.length() != bits)
      throw std::invalid_argument("address '" + std::string(second) + "' does not have " + std::to_string(bits) + " bits");
    entries.emplace_back(parse_number(first), a);
  }
  if (!have_header)
    throw std::invalid_argument("address map is empty");
  std::size_t n = 0;
  for (const auto& [v, a] : entries)
    n = std::max(n, v + 1);
  std::vector<std::optional<Address>> assignment(n);
  for (const auto& [v, a] : entries) {
    if (assignment[v])
      throw std::invalid_argument("node " + std::to_string(v) + " listed twice in address map");
    assignment[v] = a;
  }
  return AddressMap(bits, root, std::move(assignment));
}

std::uint64_t address_map_digest(const AddressMap& map)
{
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : serialize_address_map(map)) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

} // namespace relyroute
