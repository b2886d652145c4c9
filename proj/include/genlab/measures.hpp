#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace genlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kSimplexTol = 1e-12;

// Kahan-Babuska-Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double csum(const std::vector<double>& xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

// Probability distribution over a finite hypothesis set.
struct ProbVector {
  std::vector<double> w;

  ProbVector() = default;
  explicit ProbVector(std::vector<double> weights) : w(std::move(weights)) {
    validate();
  }

  void validate() const {
    if (w.empty()) throw std::invalid_argument("ProbVector: empty");
    CompensatedSum s;
    for (double x : w) {
      if (!(x >= 0.0)) throw std::invalid_argument("ProbVector: negative entry");
      s.add(x);
    }
    if (std::abs(s.value() - 1.0) > kSimplexTol) {
      throw std::invalid_argument("ProbVector: weights sum to " +
                                  std::to_string(s.value()));
    }
  }

  std::size_t size() const { return w.size(); }
  double operator[](std::size_t i) const { return w[i]; }

  bool full_support() const {
    return std::all_of(w.begin(), w.end(), [](double x) { return x > 0.0; });
  }

  static ProbVector uniform(std::size_t k) {
    return ProbVector(std::vector<double>(k, 1.0 / static_cast<double>(k)));
  }

  static ProbVector point_mass(std::size_t i, std::size_t k) {
    std::vector<double> v(k, 0.0);
    v.at(i) = 1.0;
    return ProbVector(std::move(v));
  }
};

// Exact renormalization of a nonnegative vector.
inline ProbVector normalized(std::vector<double> v) {
  CompensatedSum s;
  for (double x : v) s.add(x);
  const double total = s.value();
  if (!(total > 0.0)) throw std::invalid_argument("normalized: zero mass");
  for (double& x : v) x /= total;
  return ProbVector(std::move(v));
}

// Element of the space of signed measures over the hypothesis set.
struct SignedVector {
  std::vector<double> v;

  SignedVector() = default;
  explicit SignedVector(std::vector<double> values) : v(std::move(values)) {
    for (double x : v) {
      if (!std::isfinite(x)) throw std::invalid_argument("SignedVector: non-finite");
    }
  }
  SignedVector(const ProbVector& p) : v(p.w) {}  // NOLINT(runtime/explicit)

  std::size_t size() const { return v.size(); }
  double operator[](std::size_t i) const { return v[i]; }
};

// Per-hypothesis cost (or loss, or hint) function.
struct CostVector {
  std::vector<double> v;

  CostVector() = default;
  explicit CostVector(std::vector<double> values) : v(std::move(values)) {
    for (double x : v) {
      if (!std::isfinite(x)) throw std::invalid_argument("CostVector: non-finite");
    }
  }

  static CostVector zeros(std::size_t k) {
    return CostVector(std::vector<double>(k, 0.0));
  }

  std::size_t size() const { return v.size(); }
  double operator[](std::size_t i) const { return v[i]; }

  double max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
};

enum class DivergenceKind { KL, Chi2, PNorm, TV };

inline std::string divergence_kind_name(DivergenceKind k) {
  switch (k) {
    case DivergenceKind::KL: return "KL";
    case DivergenceKind::Chi2: return "CHI2";
    case DivergenceKind::PNorm: return "PNORM";
    case DivergenceKind::TV: return "TV";
  }
  return "?";
}

// Regularizer / norm family selector with its reference measure.
struct DivergenceSpec {
  DivergenceKind kind = DivergenceKind::KL;
  double p = 2.0;  // PNorm only
  ProbVector base;

  DivergenceSpec() = default;
  DivergenceSpec(DivergenceKind k, ProbVector b, double p_value = 2.0)
      : kind(k), p(p_value), base(std::move(b)) {
    if (kind == DivergenceKind::PNorm && !(p > 1.0)) {
      throw std::invalid_argument("DivergenceSpec: PNORM requires p > 1");
    }
    if (kind != DivergenceKind::TV && !base.full_support()) {
      throw std::invalid_argument("DivergenceSpec: base must have full support");
    }
  }

  static DivergenceSpec kl(ProbVector b) {
    return DivergenceSpec(DivergenceKind::KL, std::move(b));
  }
  static DivergenceSpec chi2(ProbVector b) {
    return DivergenceSpec(DivergenceKind::Chi2, std::move(b));
  }
  static DivergenceSpec pnorm(ProbVector b, double p_value) {
    return DivergenceSpec(DivergenceKind::PNorm, std::move(b), p_value);
  }
};

namespace detail {
inline void check_dim(std::size_t a, std::size_t b, const char* where) {
  if (a != b) {
    throw std::invalid_argument(std::string(where) + ": dimension mismatch");
  }
}
}  // namespace detail

// <P, f> = sum_i P_i f_i.
template <typename Measure>
inline double inner(const Measure& p, const CostVector& f) {
  detail::check_dim(p.size(), f.size(), "inner");
  CompensatedSum s;
  for (std::size_t i = 0; i < f.size(); ++i) s.add(p[i] * f[i]);
  return s.value();
}

// Relative entropy; +inf on support mismatch, 0 log 0 = 0.
inline double kl(const ProbVector& p, const ProbVector& q) {
  detail::check_dim(p.size(), q.size(), "kl");
  CompensatedSum s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return kInf;
    s.add(p[i] * std::log(p[i] / q[i]));
  }
  return std::max(0.0, s.value());
}

// Pearson chi-squared divergence sum_i q_i (p_i/q_i - 1)^2.
inline double chi2(const ProbVector& p, const ProbVector& q) {
  detail::check_dim(p.size(), q.size(), "chi2");
  CompensatedSum s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (q[i] == 0.0) {
      if (p[i] == 0.0) continue;
      return kInf;
    }
    const double r = p[i] / q[i] - 1.0;
    s.add(q[i] * r * r);
  }
  return std::max(0.0, s.value());
}

// Weighted L_p distance between densities relative to `base`.
inline double pnorm_distance(const SignedVector& a, const SignedVector& b,
                             const ProbVector& base, double p) {
  detail::check_dim(a.size(), b.size(), "pnorm_distance");
  detail::check_dim(a.size(), base.size(), "pnorm_distance");
  if (!(p >= 1.0)) throw std::invalid_argument("pnorm_distance: p must be >= 1");
  if (!base.full_support()) {
    throw std::invalid_argument("pnorm_distance: base must have full support");
  }
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = std::abs(a[i] / base[i] - b[i] / base[i]);
    s.add(base[i] * std::pow(x, p));
  }
  return std::pow(std::max(0.0, s.value()), 1.0 / p);
}

// Dual L_q norm; q = +inf yields the sup norm.
inline double dual_q_norm(const CostVector& f, const ProbVector& base, double q) {
  detail::check_dim(f.size(), base.size(), "dual_q_norm");
  if (std::isinf(q)) return f.max_abs();
  if (!(q >= 1.0)) throw std::invalid_argument("dual_q_norm: q must be >= 1");
  CompensatedSum s;
  for (std::size_t i = 0; i < f.size(); ++i) {
    s.add(base[i] * std::pow(std::abs(f[i]), q));
  }
  return std::pow(std::max(0.0, s.value()), 1.0 / q);
}

// Regularizer value h(P) for the spec's family.  PNorm uses the squared norm
// for p in (1,2] and the p-th power for p > 2 (the two curvature regimes).
inline double regularizer_value(const DivergenceSpec& spec, const ProbVector& p) {
  switch (spec.kind) {
    case DivergenceKind::KL: return kl(p, spec.base);
    case DivergenceKind::Chi2: return chi2(p, spec.base);
    case DivergenceKind::PNorm: {
      const double n = pnorm_distance(p, spec.base, spec.base, spec.p);
      return spec.p <= 2.0 ? n * n : std::pow(n, spec.p);
    }
    case DivergenceKind::TV: {
      CompensatedSum s;
      for (std::size_t i = 0; i < p.size(); ++i) {
        s.add(std::abs(p[i] - spec.base[i]));
      }
      return 0.5 * s.value();
    }
  }
  return 0.0;
}

// Analytic gradient of the regularizer at an interior point.
inline std::vector<double> regularizer_gradient(const DivergenceSpec& spec,
                                                const ProbVector& p) {
  std::vector<double> g(p.size());
  switch (spec.kind) {
    case DivergenceKind::KL:
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) {
          throw std::domain_error("regularizer_gradient: KL gradient diverges at boundary");
        }
        g[i] = std::log(p[i] / spec.base[i]) + 1.0;
      }
      break;
    case DivergenceKind::Chi2:
      for (std::size_t i = 0; i < p.size(); ++i) {
        g[i] = 2.0 * (p[i] - spec.base[i]) / spec.base[i];
      }
      break;
    case DivergenceKind::PNorm: {
      const double pw = spec.p;
      std::vector<double> x(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) {
        x[i] = (p[i] - spec.base[i]) / spec.base[i];
      }
      if (pw <= 2.0) {
        // h = ||.||^2: grad_i = 2 N^{2-p} |x_i|^{p-1} sgn(x_i).
        CompensatedSum s;
        for (std::size_t i = 0; i < x.size(); ++i) {
          s.add(spec.base[i] * std::pow(std::abs(x[i]), pw));
        }
        const double norm = std::pow(std::max(0.0, s.value()), 1.0 / pw);
        for (std::size_t i = 0; i < x.size(); ++i) {
          const double mag = std::pow(std::abs(x[i]), pw - 1.0);
          g[i] = norm > 0.0 ? 2.0 * std::pow(norm, 2.0 - pw) * mag *
                                  (x[i] < 0.0 ? -1.0 : 1.0)
                            : 0.0;
        }
      } else {
        // h = ||.||^p: grad_i = p |x_i|^{p-1} sgn(x_i).
        for (std::size_t i = 0; i < x.size(); ++i) {
          g[i] = pw * std::pow(std::abs(x[i]), pw - 1.0) *
                 (x[i] < 0.0 ? -1.0 : 1.0);
        }
      }
      break;
    }
    case DivergenceKind::TV:
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p[i] - spec.base[i];
        if (d == 0.0) {
          throw std::domain_error("regularizer_gradient: TV gradient undefined at kink");
        }
        g[i] = d < 0.0 ? -0.5 : 0.5;
      }
      break;
  }
  return g;
}

// Bregman divergence h(P) - h(P') - <grad h(P'), P - P'>.
inline double bregman(const DivergenceSpec& spec, const ProbVector& p,
                      const ProbVector& q) {
  detail::check_dim(p.size(), q.size(), "bregman");
  const double hp = regularizer_value(spec, p);
  const double hq = regularizer_value(spec, q);
  if (std::isinf(hp) || std::isinf(hq)) return kInf;
  const std::vector<double> g = regularizer_gradient(spec, q);
  CompensatedSum s;
  s.add(hp);
  s.add(-hq);
  for (std::size_t i = 0; i < p.size(); ++i) s.add(-g[i] * (p[i] - q[i]));
  return std::max(0.0, s.value());
}

// Gibbs reweighting: normalized P1_i exp(-eta c_i), shifted for stability.
inline ProbVector gibbs(const ProbVector& p1, const CostVector& c, double eta) {
  detail::check_dim(p1.size(), c.size(), "gibbs");
  const double shift = *std::min_element(c.v.begin(), c.v.end());
  std::vector<double> v(p1.size());
  for (std::size_t i = 0; i < p1.size(); ++i) {
    v[i] = p1[i] * std::exp(-eta * (c[i] - shift));
  }
  return normalized(std::move(v));
}

// Phi(c) = (1/eta) log sum_i P1_i exp(-eta c_i).
inline double log_partition(const ProbVector& p1, const CostVector& c, double eta) {
  detail::check_dim(p1.size(), c.size(), "log_partition");
  if (!(eta > 0.0)) throw std::invalid_argument("log_partition: eta must be positive");
  const double shift = *std::min_element(c.v.begin(), c.v.end());
  CompensatedSum s;
  for (std::size_t i = 0; i < p1.size(); ++i) {
    s.add(p1[i] * std::exp(-eta * (c[i] - shift)));
  }
  return -shift + std::log(s.value()) / eta;
}

inline double l1_distance(const ProbVector& p, const ProbVector& q) {
  detail::check_dim(p.size(), q.size(), "l1_distance");
  CompensatedSum s;
  for (std::size_t i = 0; i < p.size(); ++i) s.add(std::abs(p[i] - q[i]));
  return s.value();
}

}  // namespace genlab
