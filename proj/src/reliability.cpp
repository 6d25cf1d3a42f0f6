#include "relyroute/reliability.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace relyroute {

namespace {

void check_probability(double p)
{
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("link success probability must lie in [0, 1]");
}

double to_double(const Rational& value)
{
  using Float = boost::multiprecision::cpp_bin_float_50;
  Float num(boost::multiprecision::numerator(value));
  Float den(boost::multiprecision::denominator(value));
  return static_cast<double>(num / den);
}

Rational exact_rational(double p)
{
  int exponent = 0;
  double mantissa = std::frexp(p, &exponent);
  // p = mantissa * 2^exponent with 53-bit mantissa.
  BigInt scaled = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
  exponent -= 53;
  if (exponent >= 0)
    return Rational(scaled << exponent);
  return Rational(scaled, BigInt(1) << -exponent);
}

// Reachability of t from s when only arcs with up[index] set are usable.
class StateReachability {
public:
  explicit StateReachability(const Graph& g) : n_(g.vertex_count()), out_(n_), seen_(n_), stack_()
  {
    std::size_t index = 0;
    for (auto [u, v] : g.arcs())
      out_[u].push_back({v, index++});
    stack_.reserve(n_);
  }

  template <typename Up>
  bool reaches(Vertex s, Vertex t, Up&& up)
  {
    if (s == t)
      return true;
    std::fill(seen_.begin(), seen_.end(), 0);
    stack_.clear();
    stack_.push_back(s);
    seen_[s] = 1;
    while (!stack_.empty()) {
      Vertex u = stack_.back();
      stack_.pop_back();
      for (auto [v, index] : out_[u]) {
        if (seen_[v] || !up(index))
          continue;
        if (v == t)
          return true;
        seen_[v] = 1;
        stack_.push_back(v);
      }
    }
    return false;
  }

private:
  struct OutArc {
    Vertex to;
    std::size_t index;
  };
  std::size_t n_;
  std::vector<std::vector<OutArc>> out_;
  std::vector<char> seen_;
  std::vector<Vertex> stack_;
};

} // namespace

ReliabilityPolynomial::ReliabilityPolynomial(std::vector<BigInt> coefficients) : coefficients_(std::move(coefficients))
{
  while (!coefficients_.empty() && coefficients_.back() == 0)
    coefficients_.pop_back();
}

std::size_t ReliabilityPolynomial::degree() const
{
  return coefficients_.empty() ? 0 : coefficients_.size() - 1;
}

Rational ReliabilityPolynomial::evaluate_exact(const Rational& p) const
{
  Rational acc = 0;
  for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it)
    acc = acc * p + Rational(*it);
  return acc;
}

double ReliabilityPolynomial::evaluate(double p) const
{
  return to_double(evaluate_exact(exact_rational(p)));
}

std::string ReliabilityPolynomial::to_string() const
{
  std::ostringstream out;
  bool first = true;
  for (std::size_t j = coefficients_.size(); j-- > 0;) {
    const BigInt& a = coefficients_[j];
    if (a == 0)
      continue;
    if (first)
      out << a;
    else if (a < 0)
      out << " - " << -a;
    else
      out << " + " << a;
    if (j == 1)
      out << "*p";
    else if (j > 1)
      out << "*p^" << j;
    first = false;
  }
  return first ? "0" : out.str();
}

void FlowWeights::set(Vertex s, Vertex t, double z)
{
  if (!(z >= 0.0 && z <= 1.0))
    throw std::invalid_argument("flow weight must lie in [0, 1]");
  weights_[{s, t}] = z;
}

double FlowWeights::at(Vertex s, Vertex t) const
{
  auto it = weights_.find({s, t});
  return it == weights_.end() ? 1.0 : it->second;
}

FlowWeights FlowWeights::parse(std::string_view text)
{
  FlowWeights weights;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#')
      continue;
    std::istringstream fields(line);
    Vertex s = 0, t = 0;
    double z = 0.0;
    if (!(fields >> s >> t >> z))
      throw std::invalid_argument("weights line " + std::to_string(line_no) + " must read 's t z'");
    weights.set(s, t, z);
  }
  return weights;
}

double terminal_pair_reliability(const CutSetCounts& counts, double p)
{
  check_probability(p);
  const long double success = p;
  const long double failure = 1.0L - success;
  long double unreliability = 0.0L;
  for (std::size_t i = counts.c; i < counts.counts.size(); ++i) {
    if (counts.counts[i] == 0)
      continue;
    long double term = counts.counts[i].convert_to<long double>();
    term *= std::pow(success, static_cast<long double>(counts.m - i));
    term *= std::pow(failure, static_cast<long double>(i));
    unreliability += term;
  }
  return static_cast<double>(std::clamp(1.0L - unreliability, 0.0L, 1.0L));
}

ReliabilityPolynomial symbolic_polynomial(const CutSetCounts& counts)
{
  const std::size_t m = counts.m;
  std::vector<BigInt> a(m + 1, 0);
  a[0] = 1;
  // C_i p^(m-i) (1-p)^i contributes C_i binom(i, r) (-1)^r to p^(m-i+r).
  for (std::size_t i = 0; i < counts.counts.size(); ++i) {
    const BigInt& ci = counts.counts[i];
    if (ci == 0)
      continue;
    BigInt binom = 1;
    for (std::size_t r = 0; r <= i; ++r) {
      if (r > 0)
        binom = binom * (i - r + 1) / r;
      BigInt term = ci * binom;
      if (r % 2 == 0)
        a[m - i + r] -= term;
      else
        a[m - i + r] += term;
    }
  }
  return ReliabilityPolynomial(std::move(a));
}

ReliabilityReport mean_reliability(const Graph& g, std::span<const double> p_values, const FlowWeights& weights,
                                   const ReportOptions& options)
{
  const std::size_t n = g.vertex_count();
  if (n < 2)
    throw GraphError("mean reliability needs at least two nodes");
  for (double p : p_values)
    check_probability(p);

  ReliabilityReport report;
  report.p_values.assign(p_values.begin(), p_values.end());
  for (Vertex s = 0; s < n; ++s)
    for (Vertex t = 0; t < n; ++t)
      if (s != t)
        report.per_pair.push_back({s, t, false, false, {}});
  report.pairs_total = report.per_pair.size();

  auto evaluate = [&](PairReliability& pair) {
    pair.connected = is_connected(g, pair.s, pair.t);
    if (!pair.connected) {
      pair.values.assign(p_values.size(), 0.0);
      return;
    }
    try {
      CutSetCounts counts = enumerate_cut_counts(g, pair.s, pair.t, options.enumeration);
      pair.values.reserve(p_values.size());
      for (double p : p_values)
        pair.values.push_back(terminal_pair_reliability(counts, p));
    } catch (const BudgetExceeded&) {
      pair.budget_exceeded = true;
      pair.values.assign(p_values.size(), std::nan(""));
    }
  };

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, report.per_pair.size()));
  if (threads <= 1) {
    for (auto& pair : report.per_pair)
      evaluate(pair);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < report.per_pair.size(); i = next++) {
          try {
            evaluate(report.per_pair[i]);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure)
              failure = std::current_exception();
          }
        }
      });
    for (auto& worker : pool)
      worker.join();
    if (failure)
      std::rethrow_exception(failure);
  }

  const double pairs = static_cast<double>(report.pairs_total);
  report.mean.assign(p_values.size(), 0.0);
  report.std_dev.assign(p_values.size(), 0.0);
  for (const auto& pair : report.per_pair) {
    report.pairs_connected += pair.connected ? 1 : 0;
    report.budget_exceeded = report.budget_exceeded || pair.budget_exceeded;
    for (std::size_t x = 0; x < p_values.size(); ++x)
      report.mean[x] += weights.at(pair.s, pair.t) * pair.values[x];
  }
  for (double& mean : report.mean)
    mean /= pairs;
  for (const auto& pair : report.per_pair)
    for (std::size_t x = 0; x < p_values.size(); ++x) {
      double d = weights.at(pair.s, pair.t) * pair.values[x] - report.mean[x];
      report.std_dev[x] += d * d;
    }
  for (double& sd : report.std_dev)
    sd = std::sqrt(sd / pairs);
  return report;
}

double brute_force_reliability(const Graph& g, Vertex s, Vertex t, double p)
{
  check_probability(p);
  if (s >= g.vertex_count() || t >= g.vertex_count())
    throw GraphError("terminal out of range");
  const std::size_t m = g.arc_count();
  if (m > brute_force_arc_limit)
    throw GraphError("brute force is limited to " + std::to_string(brute_force_arc_limit) + " arcs, graph has " +
                     std::to_string(m));

  std::vector<double> up_power(m + 1), down_power(m + 1);
  up_power[0] = down_power[0] = 1.0;
  for (std::size_t i = 1; i <= m; ++i) {
    up_power[i] = up_power[i - 1] * p;
    down_power[i] = down_power[i - 1] * (1.0 - p);
  }

  StateReachability reach(g);
  double total = 0.0;
  const std::uint32_t states = std::uint32_t{1} << m;
  for (std::uint32_t state = 0; state < states; ++state) {
    if (!reach.reaches(s, t, [state](std::size_t index) { return (state >> index) & 1u; }))
      continue;
    auto up = static_cast<std::size_t>(std::popcount(state));
    total += up_power[up] * down_power[m - up];
  }
  return total;
}

MonteCarloEstimate monte_carlo_reliability(const Graph& g, Vertex s, Vertex t, double p, std::size_t trials,
                                           std::uint64_t seed)
{
  check_probability(p);
  if (s >= g.vertex_count() || t >= g.vertex_count())
    throw GraphError("terminal out of range");
  if (trials == 0)
    throw std::invalid_argument("Monte Carlo needs at least one trial");

  std::mt19937_64 engine(seed);
  StateReachability reach(g);
  std::vector<char> up(g.arc_count());
  std::size_t hits = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    for (auto& arc : up)
      arc = static_cast<double>(engine() >> 11) * 0x1.0p-53 < p;
    if (reach.reaches(s, t, [&up](std::size_t index) { return up[index] != 0; }))
      ++hits;
  }
  double estimate = static_cast<double>(hits) / static_cast<double>(trials);
  return {estimate, std::sqrt(estimate * (1.0 - estimate) / static_cast<double>(trials))};
}

} // namespace relyroute
