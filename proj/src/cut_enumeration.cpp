// Recursive-merge enumeration of s-t supersource sets and their expansion to
// exact cut-set counts.
//
// A supersource set SS contains s, excludes t, and is closed under
// absorption: every node that cannot reach t without entering SS belongs to
// SS. Each such set is the source side of exactly one minimal cut, the arcs
// leaving SS. Growing SS one frontier node at a time from closure({s}) and
// memoizing visited sets yields the whole family.
//
// For a failure state let R be the nodes reachable from s; then closure(R) is
// a family member and the arcs leaving it are all down. Writing B(SS) for the
// probability, over the arcs inside SS only, that closure(R) equals SS:
//
//   B(SS) = 1 - sum_{SS' in family, SS' strict subset of SS} B(SS') q^e(SS' -> SS \ SS')
//   1 - R_st = sum_{SS in family} B(SS) q^|cut(SS)|
//
// Both are carried either as polynomials in q (modulo several 62-bit primes,
// recombined by CRT) or as plain numbers at fixed p.

#include "relyroute/reliability.hpp"

#include "modular.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <unordered_map>
#include <unordered_set>

namespace relyroute {

namespace {

using Mask = std::uint64_t;
using Clock = std::chrono::steady_clock;

constexpr Mask bit_of(Vertex v)
{
  return Mask{1} << v;
}

template <typename F>
void for_each_bit(Mask mask, F&& f)
{
  while (mask) {
    f(static_cast<Vertex>(std::countr_zero(mask)));
    mask &= mask - 1;
  }
}

struct BitGraph {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<Mask> out;
  std::vector<Mask> in;

  explicit BitGraph(const Graph& g) : n(g.vertex_count()), m(g.arc_count()), out(n, 0), in(n, 0)
  {
    if (n > 64)
      throw GraphError("cut enumeration supports at most 64 vertices, got " + std::to_string(n));
    for (auto [u, v] : g.arcs()) {
      out[u] |= bit_of(v);
      in[v] |= bit_of(u);
    }
  }

  Mask all() const { return n == 64 ? ~Mask{0} : bit_of(n) - 1; }

  std::size_t arcs_between(Mask from, Mask to) const
  {
    std::size_t count = 0;
    for_each_bit(from, [&](Vertex u) { count += static_cast<std::size_t>(std::popcount(out[u] & to)); });
    return count;
  }
};

class Deadline {
public:
  Deadline(std::chrono::milliseconds budget, Vertex s, Vertex t)
      : budget_(budget), end_(Clock::now() + budget), s_(s), t_(t)
  {
  }

  void tick(std::size_t progress)
  {
    if (++calls_ % 1024 == 0 && Clock::now() > end_)
      throw BudgetExceeded(s_, t_, progress, budget_);
  }

private:
  std::chrono::milliseconds budget_;
  Clock::time_point end_;
  Vertex s_;
  Vertex t_;
  std::size_t calls_ = 0;
};

struct Family {
  std::vector<Mask> visit_order;
  // Sorted by (size, mask); sets[0] is closure({s}), contained in all others.
  std::vector<Mask> sets;
  std::vector<std::size_t> cut_size;
  std::vector<std::size_t> internal_arcs;
};

class RecursiveMerge {
public:
  RecursiveMerge(const BitGraph& g, Vertex t, FrontierOrder order, Deadline& deadline)
      : g_(g), t_(t), order_(order), deadline_(deadline)
  {
  }

  std::vector<Mask> run(Vertex s)
  {
    recurse(0, s);
    return std::move(visited_order_);
  }

private:
  // Nodes that still reach t when every node of ss is removed.
  Mask live_nodes(Mask ss) const
  {
    Mask seen = bit_of(t_);
    Mask frontier = seen;
    while (frontier) {
      Mask next = 0;
      for_each_bit(frontier, [&](Vertex v) { next |= g_.in[v]; });
      next &= ~ss & ~seen;
      seen |= next;
      frontier = next;
    }
    return seen;
  }

  void recurse(Mask previous, Vertex joining)
  {
    Mask ss = previous | bit_of(joining);        // merge
    ss |= g_.all() & ~live_nodes(ss);             // absorb
    if (!visited_.insert(ss).second)
      return;
    visited_order_.push_back(ss);
    deadline_.tick(visited_order_.size());

    Mask frontier = 0;
    for_each_bit(ss, [&](Vertex u) { frontier |= g_.out[u]; });
    frontier &= ~ss & ~bit_of(t_);

    if (order_ == FrontierOrder::Ascending) {
      for_each_bit(frontier, [&](Vertex w) { recurse(ss, w); });
    } else {
      while (frontier) {
        Vertex w = static_cast<Vertex>(63 - std::countl_zero(frontier));
        frontier &= ~bit_of(w);
        recurse(ss, w);
      }
    }
  }

  const BitGraph& g_;
  Vertex t_;
  FrontierOrder order_;
  Deadline& deadline_;
  std::unordered_set<Mask> visited_;
  std::vector<Mask> visited_order_;
};

void check_terminals(const Graph& g, Vertex s, Vertex t)
{
  if (s >= g.vertex_count() || t >= g.vertex_count())
    throw GraphError("terminal out of range");
  if (s == t)
    throw GraphError("cut enumeration needs distinct terminals");
}

Family build_family(const BitGraph& g, Vertex s, Vertex t, const EnumerationOptions& options, Deadline& deadline)
{
  Family family;
  family.visit_order = RecursiveMerge(g, t, options.frontier_order, deadline).run(s);
  family.sets = family.visit_order;
  std::sort(family.sets.begin(), family.sets.end(), [](Mask a, Mask b) {
    int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  for (Mask ss : family.sets) {
    family.cut_size.push_back(g.arcs_between(ss, ~ss & g.all()));
    family.internal_arcs.push_back(g.arcs_between(ss, ss));
  }
  return family;
}

#if defined(__x86_64__) && defined(__GNUC__) && !defined(__clang__)
#define RELYROUTE_WIDE_KERNEL __attribute__((target_clones("avx2", "default")))
#else
#define RELYROUTE_WIDE_KERNEL
#endif

RELYROUTE_WIDE_KERNEL
void subtract_into(std::int64_t* dst, const std::uint32_t* src, std::size_t count)
{
  for (std::size_t x = 0; x < count; ++x)
    dst[x] -= src[x];
}

RELYROUTE_WIDE_KERNEL
void subtract_product(double* dst, const double* src, const double* factor, std::size_t count)
{
  for (std::size_t x = 0; x < count; ++x)
    dst[x] -= src[x] * factor[x];
}

// Parallel bit extract: the bits of `value` selected by `mask`, packed low.
Mask compress(Mask value, Mask mask)
{
  Mask out = 0;
  Mask bit = 1;
  for_each_bit(mask, [&](Vertex v) {
    if (value & bit_of(v))
      out |= bit;
    bit <<= 1;
  });
  return out;
}

// Calls visit(i, e) for every family member i strictly inside member j, with
// e the number of arcs from set i to set j minus set i.
template <typename Visit>
class ContainmentWalker {
public:
  static constexpr int dense_limit = 24;

  ContainmentWalker(const BitGraph& g, const Family& family) : g_(g), family_(family)
  {
    const auto& sets = family_.sets;
    Mask span = 0;
    for (Mask ss : sets)
      span |= ss;
    span_ = span & ~sets[0];
    if (std::popcount(span_) <= dense_limit) {
      dense_.assign(std::size_t{1} << std::popcount(span_), -1);
      for (std::size_t i = 0; i < sets.size(); ++i)
        dense_[compress(sets[i], span_)] = static_cast<std::int32_t>(i);
    } else {
      for (std::size_t i = 0; i < sets.size(); ++i)
        index_.emplace(sets[i], static_cast<std::uint32_t>(i));
    }
    // first index of each set size
    group_start_.assign(66, sets.size());
    for (std::size_t i = sets.size(); i-- > 0;)
      group_start_[static_cast<std::size_t>(std::popcount(sets[i]))] = i;
    for (std::size_t size = 65; size-- > 0;)
      group_start_[size] = std::min(group_start_[size], group_start_[size + 1]);
  }

  void walk(std::size_t j, Deadline& deadline, Visit& visit) const
  {
    const auto& sets = family_.sets;
    const Mask target = sets[j];
    const Mask base = sets[0];
    const std::size_t candidates = group_start_[static_cast<std::size_t>(std::popcount(target))];
    const Mask free = target & ~base;
    const int free_bits = std::popcount(free);

    if (free_bits < 40 && (std::size_t{1} << free_bits) < candidates) {
      if (!dense_.empty()) {
        const Mask packed = compress(free, span_);
        for (Mask sub = (packed - 1) & packed;; sub = (sub - 1) & packed) {
          if (std::int32_t i = dense_[sub]; i >= 0)
            apply(static_cast<std::size_t>(i), target, deadline, visit);
          if (sub == 0)
            break;
        }
        deadline.tick(j);
        return;
      }
      // strict submasks of `free`, including the empty one
      for (Mask sub = (free - 1) & free;; sub = (sub - 1) & free) {
        auto it = index_.find(base | sub);
        if (it != index_.end())
          apply(it->second, target, deadline, visit);
        else
          deadline.tick(j);
        if (sub == 0)
          break;
      }
    } else {
      for (std::size_t i = 0; i < candidates; ++i)
        if ((sets[i] & ~target) == 0)
          apply(i, target, deadline, visit);
    }
  }

private:
  void apply(std::size_t i, Mask target, Deadline& deadline, Visit& visit) const
  {
    const Mask inner = family_.sets[i];
    const Mask rest = target & ~inner;
    // count arcs from whichever side has fewer nodes
    std::size_t e = 0;
    if (std::popcount(rest) < std::popcount(inner))
      for_each_bit(rest, [&](Vertex v) { e += static_cast<std::size_t>(std::popcount(g_.in[v] & inner)); });
    else
      e = g_.arcs_between(inner, rest);
    visit(i, e);
    deadline.tick(i);
  }

  const BitGraph& g_;
  const Family& family_;
  Mask span_ = 0;
  std::vector<std::int32_t> dense_;
  std::unordered_map<Mask, std::uint32_t> index_;
  std::vector<std::size_t> group_start_;
};

// Polynomials in q modulo several primes below 2^31. Coefficients are stored
// coefficient-major (all residues of q^0, then of q^1, ...) so that one
// subtraction loop covers every prime. The set being built accumulates in
// 64-bit lanes and is reduced once when it is finished.
class ModularExpansion {
public:
  ModularExpansion(const Family& family, std::size_t m, std::span<const std::uint64_t> primes)
      : family_(family), primes_(primes), width_(primes.size())
  {
    offset_.reserve(family.sets.size() + 1);
    std::size_t total = 0;
    for (std::size_t j = 0; j < family.sets.size(); ++j) {
      offset_.push_back(total);
      total += width_ * length(j);
    }
    offset_.push_back(total);
    data_.assign(total, 0);
    unreliability_.assign(width_ * (m + 1), 0);
  }

  std::size_t length(std::size_t j) const { return family_.internal_arcs[j] + 1; }

  void start(std::size_t j)
  {
    pending_ = 0;
    acc_.assign(width_ * length(j), 0);
    std::fill_n(acc_.begin(), width_, 1);
  }

  void operator()(std::size_t i, std::size_t shift)
  {
    const std::uint32_t* src = data_.data() + offset_[i];
    std::int64_t* dst = acc_.data() + shift * width_;
    const std::size_t count = width_ * length(i);
    subtract_into(dst, src, count);
    if (++pending_ == reduce_every)
      reduce();
  }

  void finish(std::size_t j)
  {
    reduce();
    std::uint32_t* dst = data_.data() + offset_[j];
    for (std::size_t x = 0; x < acc_.size(); ++x)
      dst[x] = static_cast<std::uint32_t>(acc_[x]);
    std::int64_t* total = unreliability_.data() + family_.cut_size[j] * width_;
    for (std::size_t x = 0; x < acc_.size(); ++x) {
      std::int64_t sum = total[x] + acc_[x];
      const auto p = static_cast<std::int64_t>(primes_[x % width_]);
      total[x] = sum >= p ? sum - p : sum;
    }
  }

  // Coefficient of q^k in 1 - R, modulo prime r.
  std::uint64_t unreliability(std::size_t k, std::size_t r) const
  {
    return static_cast<std::uint64_t>(unreliability_[k * width_ + r]);
  }

private:
  // Residues are below 2^31, so 2^31 subtractions cannot overflow 64 bits.
  static constexpr std::size_t reduce_every = std::size_t{1} << 31;

  void reduce()
  {
    for (std::size_t x = 0; x < acc_.size(); ++x) {
      const auto p = static_cast<std::int64_t>(primes_[x % width_]);
      std::int64_t v = acc_[x] % p;
      acc_[x] = v < 0 ? v + p : v;
    }
    pending_ = 0;
  }

  const Family& family_;
  std::span<const std::uint64_t> primes_;
  std::size_t width_;
  std::vector<std::size_t> offset_;
  std::vector<std::uint32_t> data_;
  std::vector<std::int64_t> acc_;
  std::vector<std::int64_t> unreliability_;
  std::size_t pending_ = 0;
};

class NumericExpansion {
public:
  NumericExpansion(const Family& family, std::size_t m, std::span<const double> p_values)
      : family_(family), width_(p_values.size()), q_power_(width_ * (m + 1)),
        data_(family.sets.size() * width_), unreliability_(width_, 0.0)
  {
    for (std::size_t x = 0; x < width_; ++x) {
      double q = 1.0 - p_values[x];
      double power = 1.0;
      for (std::size_t e = 0; e <= m; ++e) {
        q_power_[e * width_ + x] = power;
        power *= q;
      }
    }
  }

  void start(std::size_t j)
  {
    current_ = j;
    std::fill_n(data_.begin() + static_cast<std::ptrdiff_t>(j * width_), width_, 1.0);
  }

  void operator()(std::size_t i, std::size_t shift)
  {
    const double* src = data_.data() + i * width_;
    const double* factor = q_power_.data() + shift * width_;
    double* dst = data_.data() + current_ * width_;
    subtract_product(dst, src, factor, width_);
  }

  void finish(std::size_t j)
  {
    const double* src = data_.data() + j * width_;
    const double* factor = q_power_.data() + family_.cut_size[j] * width_;
    for (std::size_t x = 0; x < width_; ++x)
      unreliability_[x] += src[x] * factor[x];
  }

  std::vector<double> result() const
  {
    std::vector<double> out(unreliability_);
    for (double& u : out)
      u = std::clamp(u, 0.0, 1.0);
    return out;
  }

private:
  const Family& family_;
  std::size_t width_;
  std::vector<double> q_power_;
  std::vector<double> data_;
  std::vector<double> unreliability_;
  std::size_t current_ = 0;
};

template <typename Expansion>
void expand(const BitGraph& g, const Family& family, Expansion& expansion, Deadline& deadline)
{
  ContainmentWalker<Expansion> walker(g, family);
  for (std::size_t j = 0; j < family.sets.size(); ++j) {
    expansion.start(j);
    if (j > 0)
      walker.walk(j, deadline, expansion);
    expansion.finish(j);
  }
}

} // namespace

BudgetExceeded::BudgetExceeded(Vertex s, Vertex t, std::size_t sets_visited, std::chrono::milliseconds budget)
    : std::runtime_error("pair (" + std::to_string(s) + "," + std::to_string(t) + ") exceeded its " +
                         std::to_string(budget.count()) + " ms budget"),
      s_(s), t_(t), sets_visited_(sets_visited)
{
}

std::chrono::milliseconds time_budget_from_environment()
{
  const char* value = std::getenv("RELYROUTE_TIME_BUDGET_MS");
  if (!value || !*value)
    return default_time_budget;
  char* end = nullptr;
  long long ms = std::strtoll(value, &end, 10);
  if (*end != '\0' || ms <= 0)
    throw std::invalid_argument("RELYROUTE_TIME_BUDGET_MS must be a positive integer");
  return std::chrono::milliseconds(ms);
}

CutSetCounts enumerate_cut_counts(const Graph& g, Vertex s, Vertex t, const EnumerationOptions& options)
{
  check_terminals(g, s, t);
  const BitGraph bits(g);
  const std::size_t m = bits.m;
  Deadline deadline(options.time_budget, s, t);
  const Family family = build_family(bits, s, t, options, deadline);

  const std::vector<std::uint64_t> primes = detail::residue_primes(detail::primes_for_bits(m));
  ModularExpansion expansion(family, m, primes);
  expand(bits, family, expansion, deadline);

  // 1 - R = sum_k u_k q^k; substituting p = 1/(1+x), q = x/(1+x) gives
  // C_i = sum_{k <= i} u_k binom(m - k, i - k).
  std::vector<std::vector<std::uint64_t>> residues(m + 1, std::vector<std::uint64_t>(primes.size()));
  for (std::size_t r = 0; r < primes.size(); ++r) {
    const std::uint64_t p = primes[r];
    std::vector<std::vector<std::uint64_t>> binom(m + 1);
    for (std::size_t a = 0; a <= m; ++a) {
      binom[a].assign(a + 1, 1);
      for (std::size_t b = 1; b < a; ++b) {
        std::uint64_t sum = binom[a - 1][b - 1] + binom[a - 1][b];
        binom[a][b] = sum >= p ? sum - p : sum;
      }
    }
    for (std::size_t i = 0; i <= m; ++i) {
      std::uint64_t acc = 0;
      for (std::size_t k = 0; k <= i; ++k)
        acc = (acc + detail::mul_mod(expansion.unreliability(k, r), binom[m - k][i - k], p)) % p;
      residues[i][r] = acc;
    }
  }

  CutSetCounts out;
  out.m = m;
  out.supersource_sets = family.sets.size();
  out.arc_bound_exceeded = m > options.arc_bound;
  out.counts.reserve(m + 1);
  for (std::size_t i = 0; i <= m; ++i)
    out.counts.push_back(detail::crt(residues[i], primes));
  out.c = 0;
  while (out.c <= m && out.counts[out.c] == 0)
    ++out.c;
  return out;
}

std::vector<double> unreliability_numeric(const Graph& g, Vertex s, Vertex t, std::span<const double> p_values,
                                          const EnumerationOptions& options)
{
  check_terminals(g, s, t);
  for (double p : p_values)
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("link success probability must lie in [0, 1]");
  const BitGraph bits(g);
  Deadline deadline(options.time_budget, s, t);
  const Family family = build_family(bits, s, t, options, deadline);
  NumericExpansion expansion(family, bits.m, p_values);
  expand(bits, family, expansion, deadline);
  return expansion.result();
}

std::vector<std::vector<Arc>> minimal_cut_sets(const Graph& g, Vertex s, Vertex t, const EnumerationOptions& options)
{
  check_terminals(g, s, t);
  const BitGraph bits(g);
  Deadline deadline(options.time_budget, s, t);
  const Family family = build_family(bits, s, t, options, deadline);
  std::vector<std::vector<Arc>> cuts;
  cuts.reserve(family.visit_order.size());
  for (Mask ss : family.visit_order) {
    std::vector<Arc> cut;
    for_each_bit(ss, [&](Vertex u) { for_each_bit(bits.out[u] & ~ss, [&](Vertex v) { cut.emplace_back(u, v); }); });
    cuts.push_back(std::move(cut));
  }
  return cuts;
}

} // namespace relyroute
