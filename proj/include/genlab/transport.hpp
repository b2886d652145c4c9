#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "genlab/measures.hpp"
#include "genlab/rng.hpp"

namespace genlab {

// Finitely supported measure on R^d.
struct PointCloudMeasure {
  std::vector<std::vector<double>> points;
  std::vector<double> weights;

  PointCloudMeasure() = default;
  PointCloudMeasure(std::vector<std::vector<double>> pts, std::vector<double> w)
      : points(std::move(pts)), weights(std::move(w)) {
    if (points.empty() || points.size() != weights.size()) {
      throw std::invalid_argument("PointCloudMeasure: size mismatch");
    }
    const std::size_t d = points.front().size();
    for (const auto& p : points) {
      if (p.size() != d) throw std::invalid_argument("PointCloudMeasure: ragged points");
    }
    CompensatedSum s;
    for (double x : weights) {
      if (!(x >= 0.0)) throw std::invalid_argument("PointCloudMeasure: negative weight");
      s.add(x);
    }
    if (std::abs(s.value() - 1.0) > kSimplexTol) {
      throw std::invalid_argument("PointCloudMeasure: weights must sum to 1");
    }
  }

  static PointCloudMeasure dirac(std::vector<double> x) {
    return PointCloudMeasure({std::move(x)}, {1.0});
  }

  std::size_t size() const { return points.size(); }
  std::size_t dim() const { return points.front().size(); }
};

struct SmoothedEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

// Exact transportation-problem optimum by the transportation simplex:
// north-west-corner start, MODI potentials, stepping-stone pivots with
// Bland's rule on the entering cell.
class TransportSimplex {
 public:
  TransportSimplex(std::vector<double> supply, std::vector<double> demand,
                   std::vector<std::vector<double>> cost)
      : a_(std::move(supply)), b_(std::move(demand)), cost_(std::move(cost)),
        m_(a_.size()), n_(b_.size()), basic_(m_, std::vector<char>(n_, 0)),
        flow_(m_, std::vector<double>(n_, 0.0)) {}

  double solve() {
    northwest_corner();
    const std::size_t max_pivots = 2000 * (m_ + n_) * (m_ + n_);
    for (std::size_t it = 0; it < max_pivots; ++it) {
      compute_potentials();
      std::size_t ei = 0, ej = 0;
      if (!find_entering(&ei, &ej)) return objective();
      pivot(ei, ej);
    }
    throw std::runtime_error("transport: simplex failed to converge");
  }

 private:
  void northwest_corner() {
    std::vector<double> ra = a_, rb = b_;
    std::size_t i = 0, j = 0;
    std::size_t placed = 0;
    while (placed + 1 < m_ + n_) {
      const double q = std::min(ra[i], rb[j]);
      basic_[i][j] = 1;
      flow_[i][j] = q;
      ++placed;
      ra[i] -= q;
      rb[j] -= q;
      // Advance one index only; a degenerate zero cell keeps the basis a tree.
      if (ra[i] <= rb[j] && i + 1 < m_) {
        ++i;
      } else {
        ++j;
      }
    }
    if (!basic_[m_ - 1][n_ - 1]) {
      basic_[m_ - 1][n_ - 1] = 1;
      flow_[m_ - 1][n_ - 1] = std::min(ra[m_ - 1], rb[n_ - 1]);
    }
  }

  void compute_potentials() {
    u_.assign(m_, 0.0);
    v_.assign(n_, 0.0);
    std::vector<char> ur(m_, 0), vr(n_, 0);
    ur[0] = 1;
    // Basis cells form a spanning tree; propagate until all labeled.
    bool progress = true;
    std::size_t labeled = 1;
    while (progress && labeled < m_ + n_) {
      progress = false;
      for (std::size_t i = 0; i < m_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
          if (!basic_[i][j]) continue;
          if (ur[i] && !vr[j]) {
            v_[j] = cost_[i][j] - u_[i];
            vr[j] = 1;
            ++labeled;
            progress = true;
          } else if (vr[j] && !ur[i]) {
            u_[i] = cost_[i][j] - v_[j];
            ur[i] = 1;
            ++labeled;
            progress = true;
          }
        }
      }
    }
    if (labeled != m_ + n_) {
      throw std::runtime_error("transport: basis is not a spanning tree");
    }
  }

  bool find_entering(std::size_t* ei, std::size_t* ej) const {
    double scale = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        scale = std::max(scale, std::abs(cost_[i][j]));
      }
    }
    const double eps = 1e-13 * scale;
    // Bland: first cell in row-major order with negative reduced cost.
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (basic_[i][j]) continue;
        if (cost_[i][j] - u_[i] - v_[j] < -eps) {
          *ei = i;
          *ej = j;
          return true;
        }
      }
    }
    return false;
  }

  // Locate the unique alternating cycle created by the entering cell and
  // shift flow around it.
  void pivot(std::size_t ei, std::size_t ej) {
    std::vector<std::pair<std::size_t, std::size_t>> cycle;
    std::vector<char> row_seen(m_, 0), col_seen(n_, 0);
    if (!trace(ei, ej, ei, true, row_seen, col_seen, &cycle)) {
      throw std::runtime_error("transport: pivot cycle not found");
    }
    double theta = kInf;
    std::size_t leave = 1;
    for (std::size_t k = 1; k < cycle.size(); k += 2) {
      const auto [i, j] = cycle[k];
      if (flow_[i][j] < theta) {
        theta = flow_[i][j];
        leave = k;
      }
    }
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      const auto [i, j] = cycle[k];
      flow_[i][j] += (k % 2 == 0) ? theta : -theta;
    }
    basic_[ei][ej] = 1;
    const auto [li, lj] = cycle[leave];
    basic_[li][lj] = 0;
    flow_[li][lj] = 0.0;
  }

  // Depth-first walk over basic cells, alternating row/column moves, that
  // returns to the entering cell's row.
  bool trace(std::size_t i, std::size_t j, std::size_t home_row, bool move_in_col,
             std::vector<char>& row_seen, std::vector<char>& col_seen,
             std::vector<std::pair<std::size_t, std::size_t>>* cycle) const {
    cycle->emplace_back(i, j);
    if (move_in_col) {
      col_seen[j] = 1;
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == i || !basic_[r][j]) continue;
        if (r == home_row) {
          if (cycle->size() >= 3) {
            cycle->emplace_back(r, j);
            return true;
          }
          continue;
        }
        if (row_seen[r]) continue;
        if (trace(r, j, home_row, false, row_seen, col_seen, cycle)) return true;
      }
      col_seen[j] = 0;
    } else {
      row_seen[i] = 1;
      for (std::size_t c = 0; c < n_; ++c) {
        if (c == j || !basic_[i][c]) continue;
        if (trace(i, c, home_row, true, row_seen, col_seen, cycle)) return true;
      }
      row_seen[i] = 0;
    }
    cycle->pop_back();
    return false;
  }

  double objective() const {
    CompensatedSum s;
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (basic_[i][j]) s.add(flow_[i][j] * cost_[i][j]);
      }
    }
    return std::max(0.0, s.value());
  }

  std::vector<double> a_, b_;
  std::vector<std::vector<double>> cost_;
  std::size_t m_, n_;
  std::vector<std::vector<char>> basic_;
  std::vector<std::vector<double>> flow_;
  std::vector<double> u_, v_;
};

// log density of the gamma-smoothed mixture at x.
inline double smoothed_log_density(const PointCloudMeasure& p, double gamma,
                                   const std::vector<double>& x) {
  const std::size_t d = p.dim();
  double best = -kInf;
  std::vector<double> expo(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    expo[i] = p.weights[i] > 0.0
                  ? std::log(p.weights[i]) -
                        sq_dist(x, p.points[i]) / (2.0 * gamma * gamma)
                  : -kInf;
    best = std::max(best, expo[i]);
  }
  CompensatedSum s;
  for (double e : expo) {
    if (std::isfinite(e)) s.add(std::exp(e - best));
  }
  return best + std::log(s.value()) -
         0.5 * static_cast<double>(d) *
             std::log(2.0 * 3.14159265358979323846 * gamma * gamma);
}

inline std::size_t sample_component(const PointCloudMeasure& p, CounterRng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p.weights[i];
    if (u < acc) return i;
  }
  return p.size() - 1;
}

}  // namespace detail

inline constexpr std::size_t kMaxTransportSupport = 64;

// Exact squared Wasserstein-2 distance between finitely supported measures.
inline double wasserstein2_sq(const PointCloudMeasure& p, const PointCloudMeasure& q) {
  if (p.dim() != q.dim()) {
    throw std::invalid_argument("wasserstein2_sq: dimension mismatch");
  }
  if (p.size() > kMaxTransportSupport || q.size() > kMaxTransportSupport) {
    throw std::invalid_argument(
        "wasserstein2_sq: support too large for the exact solver; use the "
        "Monte-Carlo smoothed divergences instead");
  }
  std::vector<std::vector<double>> cost(p.size(), std::vector<double>(q.size()));
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) {
      cost[i][j] = detail::sq_dist(p.points[i], q.points[j]);
    }
  }
  detail::TransportSimplex solver(p.weights, q.weights, std::move(cost));
  return solver.solve();
}

// n i.i.d. draws from the Gaussian-smoothed mixture; pure in (inputs, seed).
inline std::vector<std::vector<double>> smooth_sample(const PointCloudMeasure& p,
                                                      double gamma, std::size_t n,
                                                      std::uint64_t seed) {
  if (!(gamma > 0.0)) throw std::invalid_argument("smooth_sample: gamma must be positive");
  CounterRng rng(derive_stream(seed, "smooth_sample"));
  std::vector<std::vector<double>> out;
  out.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t c = detail::sample_component(p, rng);
    std::vector<double> x = p.points[c];
    for (double& coord : x) coord += gamma * rng.normal();
    out.push_back(std::move(x));
  }
  return out;
}

// Monte-Carlo estimate of KL(G_gamma P || G_gamma Q) by sampling from G_gamma P.
inline SmoothedEstimate smoothed_kl_mc(const PointCloudMeasure& p,
                                       const PointCloudMeasure& q, double gamma,
                                       std::size_t n, std::uint64_t seed) {
  if (!(gamma > 0.0)) throw std::invalid_argument("smoothed_kl_mc: gamma must be positive");
  if (p.dim() != q.dim()) throw std::invalid_argument("smoothed_kl_mc: dimension mismatch");
  CounterRng rng(derive_stream(seed, "smoothed_kl"));
  CompensatedSum sum, sumsq;
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t c = detail::sample_component(p, rng);
    std::vector<double> x = p.points[c];
    for (double& coord : x) coord += gamma * rng.normal();
    const double v = detail::smoothed_log_density(p, gamma, x) -
                     detail::smoothed_log_density(q, gamma, x);
    sum.add(v);
    sumsq.add(v * v);
  }
  const double mean = sum.value() / static_cast<double>(n);
  const double var =
      std::max(0.0, sumsq.value() / static_cast<double>(n) - mean * mean);
  return {mean, std::sqrt(var / static_cast<double>(n)), n, seed};
}

// Monte-Carlo estimate of the smoothed total variation distance via
// importance sampling from the even mixture of the two smoothed densities.
inline SmoothedEstimate smoothed_tv_mc(const PointCloudMeasure& p,
                                       const PointCloudMeasure& q, double gamma,
                                       std::size_t n, std::uint64_t seed) {
  if (!(gamma > 0.0)) throw std::invalid_argument("smoothed_tv_mc: gamma must be positive");
  if (p.dim() != q.dim()) throw std::invalid_argument("smoothed_tv_mc: dimension mismatch");
  CounterRng rng(derive_stream(seed, "smoothed_tv"));
  CompensatedSum sum, sumsq;
  for (std::size_t s = 0; s < n; ++s) {
    const PointCloudMeasure& src = rng.uniform() < 0.5 ? p : q;
    const std::size_t c = detail::sample_component(src, rng);
    std::vector<double> x = src.points[c];
    for (double& coord : x) coord += gamma * rng.normal();
    const double la = detail::smoothed_log_density(p, gamma, x);
    const double lb = detail::smoothed_log_density(q, gamma, x);
    // |g_p - g_q| / (g_p + g_q), computed from the log densities.
    const double r = std::exp(-std::abs(la - lb));
    const double v = (1.0 - r) / (1.0 + r);
    sum.add(v);
    sumsq.add(v * v);
  }
  const double mean = sum.value() / static_cast<double>(n);
  const double var =
      std::max(0.0, sumsq.value() / static_cast<double>(n) - mean * mean);
  return {mean, std::sqrt(var / static_cast<double>(n)), n, seed};
}

// sum_j (gamma sqrt(d))^j beta_j over an explicitly supplied sequence.
inline double smoothing_series_bound(const std::vector<double>& betas, double gamma,
                                     std::size_t d) {
  const double x = gamma * std::sqrt(static_cast<double>(d));
  CompensatedSum s;
  double pow_x = 1.0;
  for (double beta : betas) {
    if (!(beta >= 0.0)) throw std::invalid_argument("smoothing_series_bound: negative beta");
    s.add(pow_x * beta);
    pow_x *= x;
    if (!std::isfinite(pow_x) || !std::isfinite(s.value())) return kInf;
  }
  return s.value();
}

// Constant-beta geometric form: beta / (1 - gamma sqrt(d)); +inf when divergent.
inline double smoothing_series_bound(double beta, double gamma, std::size_t d) {
  if (!(beta >= 0.0)) throw std::invalid_argument("smoothing_series_bound: negative beta");
  const double x = gamma * std::sqrt(static_cast<double>(d));
  if (beta == 0.0) return 0.0;
  if (x >= 1.0) return kInf;
  return beta / (1.0 - x);
}

}  // namespace genlab
