#ifndef RELYROUTE_RELIABILITY_HPP
#define RELYROUTE_RELIABILITY_HPP

#include "relyroute/graph.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <chrono>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace relyroute {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Thrown when one terminal pair exceeds its compute budget. The counts
/// gathered so far are meaningless, so only progress figures are kept.
class BudgetExceeded : public std::runtime_error {
public:
  BudgetExceeded(Vertex s, Vertex t, std::size_t sets_visited, std::chrono::milliseconds budget);
  Vertex source() const noexcept { return s_; }
  Vertex target() const noexcept { return t_; }
  std::size_t sets_visited() const noexcept { return sets_visited_; }

private:
  Vertex s_;
  Vertex t_;
  std::size_t sets_visited_;
};

inline constexpr std::chrono::milliseconds default_time_budget{60000};
inline constexpr std::size_t default_arc_bound = 64;

/// Reads RELYROUTE_TIME_BUDGET_MS, falling back to default_time_budget.
std::chrono::milliseconds time_budget_from_environment();

enum class FrontierOrder { Ascending, Descending };

struct EnumerationOptions {
  /// Above this many arcs enumeration still runs but the result is flagged.
  std::size_t arc_bound = default_arc_bound;
  std::chrono::milliseconds time_budget = default_time_budget;
  FrontierOrder frontier_order = FrontierOrder::Ascending;
};

/// C_i = number of arc subsets of size i whose failure leaves t unreachable
/// from s, for i = 0..m. Entries below the minimum cut c are zero.
struct CutSetCounts {
  std::size_t m = 0;
  std::size_t c = 0;
  std::vector<BigInt> counts;
  /// Number of supersource sets (equivalently minimal cuts) visited.
  std::size_t supersource_sets = 0;
  bool arc_bound_exceeded = false;

  const BigInt& count(std::size_t i) const { return counts.at(i); }
  bool connected() const { return counts.empty() || counts[0] == 0; }

  friend bool operator==(const CutSetCounts& a, const CutSetCounts& b)
  {
    return a.m == b.m && a.c == b.c && a.counts == b.counts;
  }
};

/// Exact R_st(p) = sum_j a_j p^j.
class ReliabilityPolynomial {
public:
  ReliabilityPolynomial() = default;
  explicit ReliabilityPolynomial(std::vector<BigInt> coefficients);

  const std::vector<BigInt>& coefficients() const noexcept { return coefficients_; }
  std::size_t degree() const;

  Rational evaluate_exact(const Rational& p) const;
  /// Exact evaluation at the binary value of p, rounded once to double.
  double evaluate(double p) const;

  /// Descending powers, e.g. "-1*p^4 + 2*p^2"; "0" for the zero polynomial.
  std::string to_string() const;

  friend bool operator==(const ReliabilityPolynomial&, const ReliabilityPolynomial&) = default;

private:
  std::vector<BigInt> coefficients_;
};

/// Weight z_st of each ordered pair; pairs not set explicitly weigh 1.
class FlowWeights {
public:
  FlowWeights() = default;
  void set(Vertex s, Vertex t, double z);
  double at(Vertex s, Vertex t) const;
  bool uniform() const noexcept { return weights_.empty(); }

  /// Lines of `s t z`; '#' comments allowed.
  static FlowWeights parse(std::string_view text);

private:
  std::map<std::pair<Vertex, Vertex>, double> weights_;
};

struct PairReliability {
  Vertex s;
  Vertex t;
  bool connected = false;
  bool budget_exceeded = false;
  std::vector<double> values; // R_st at each requested p
};

struct ReliabilityReport {
  std::vector<double> p_values;
  std::vector<PairReliability> per_pair; // sorted by (s, t)
  std::vector<double> mean;
  std::vector<double> std_dev;
  std::size_t pairs_connected = 0;
  std::size_t pairs_total = 0;
  bool budget_exceeded = false;
};

struct ReportOptions {
  EnumerationOptions enumeration;
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

/// Recursive-merge enumeration of the supersource sets between s and t and
/// their expansion into complete cut-set counts (exact integers).
CutSetCounts enumerate_cut_counts(const Graph& g, Vertex s, Vertex t, const EnumerationOptions& options = {});

/// The same enumeration evaluated numerically: 1 - R_st at each p.
std::vector<double> unreliability_numeric(const Graph& g, Vertex s, Vertex t, std::span<const double> p_values,
                                          const EnumerationOptions& options = {});

/// Minimal s-t cuts as arc lists, one per supersource set, in visiting order.
std::vector<std::vector<Arc>> minimal_cut_sets(const Graph& g, Vertex s, Vertex t,
                                               const EnumerationOptions& options = {});

/// 1 - sum_i C_i p^(m-i) (1-p)^i evaluated in floating point.
double terminal_pair_reliability(const CutSetCounts& counts, double p);

ReliabilityPolynomial symbolic_polynomial(const CutSetCounts& counts);

/// Mean over ordered pairs of z_st R_st, divided by n(n-1), and the standard
/// deviation of z_st R_st around it, at each p.
ReliabilityReport mean_reliability(const Graph& g, std::span<const double> p_values, const FlowWeights& weights = {},
                                   const ReportOptions& options = {});

inline constexpr std::size_t brute_force_arc_limit = 20;

/// Sums the probability of every arc state in which t is reachable from s.
double brute_force_reliability(const Graph& g, Vertex s, Vertex t, double p);

struct MonteCarloEstimate {
  double estimate;
  double std_error;
};

MonteCarloEstimate monte_carlo_reliability(const Graph& g, Vertex s, Vertex t, double p, std::size_t trials,
                                           std::uint64_t seed);

} // namespace relyroute

#endif // RELYROUTE_RELIABILITY_HPP
