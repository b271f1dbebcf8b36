#include <atomic>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "toral/dynamics/dynamics.hpp"
#include "toral/dynamics/parallel.hpp"
#include "toral/exact/linalg.hpp"
#include "toral/spectrum/spectrum.hpp"
#include "dynamics/detail.hpp"

namespace toral {

namespace {
std::atomic<unsigned> g_threads{0};
}

void set_thread_count(unsigned n) { g_threads.store(n); }

unsigned thread_count() {
  const unsigned n = g_threads.load();
  if (n != 0) return n;
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

bool solve_in_place(double* J, double* r, std::size_t d) {
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t piv = c;
    for (std::size_t i = c + 1; i < d; ++i)
      if (std::abs(J[i * d + c]) > std::abs(J[piv * d + c])) piv = i;
    if (J[piv * d + c] == 0) return false;
    if (piv != c) {
      for (std::size_t j = 0; j < d; ++j) std::swap(J[c * d + j], J[piv * d + j]);
      std::swap(r[c], r[piv]);
    }
    for (std::size_t i = c + 1; i < d; ++i) {
      const double f = J[i * d + c] / J[c * d + c];
      if (f == 0) continue;
      for (std::size_t j = c; j < d; ++j) J[i * d + j] -= f * J[c * d + j];
      r[i] -= f * r[c];
    }
  }
  for (std::size_t c = d; c-- > 0;) {
    double s = r[c];
    for (std::size_t j = c + 1; j < d; ++j) s -= J[c * d + j] * r[j];
    r[c] = s / J[c * d + c];
  }
  return true;
}

void reduce(double* x, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) x[i] -= std::nearbyint(x[i]);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

}  // namespace detail

TorusMap::TorusMap(const IntMatrix& L, std::vector<FourierMode> modes, double epsilon, bool normalize,
                   MarginPolicy policy)
    : d_(L.rows()), L_(L), Lp_(L), modes_(std::move(modes)), eps_(epsilon), normalize_(normalize) {
  if (!L.is_square() || d_ == 0) throw PreconditionError("linear part must be a nonempty square matrix");
  require_automorphism(L);
  if (!std::isfinite(epsilon)) throw PreconditionError("epsilon must be finite");
  Ld_ = to_double(L);
  Linvd_ = to_double(unimodular_inverse(L));
  Lpd_ = Ld_;
  table_.d = d_;
  table_.count = modes_.size();
  v0_.assign(d_, 0.0);
  double sup_v = 0;
  for (auto& m : modes_) {
    if (m.k.size() != d_) throw PreconditionError("mode frequency has the wrong dimension");
    if (m.a.empty()) m.a.assign(d_, 0.0);
    if (m.b.empty()) m.b.assign(d_, 0.0);
    if (m.a.size() != d_ || m.b.size() != d_) throw PreconditionError("mode coefficients have the wrong dimension");
    double kn = 0, an = 0, bn = 0, amax = 0;
    for (std::size_t i = 0; i < d_; ++i) {
      table_.k.push_back(static_cast<double>(m.k[i]));
      table_.a.push_back(m.a[i]);
      table_.b.push_back(m.b[i]);
      v0_[i] += m.a[i];
      kn += static_cast<double>(m.k[i]) * static_cast<double>(m.k[i]);
      an += m.a[i] * m.a[i];
      bn += m.b[i] * m.b[i];
      amax = std::max(amax, std::abs(m.a[i]) + std::abs(m.b[i]));
    }
    sup_dv_ += 2 * std::numbers::pi * std::sqrt(kn) * (std::sqrt(an) + std::sqrt(bn));
    sup_v += amax;
  }
  sup_u_ = std::abs(eps_) * (normalize_ ? 2 : 1) * sup_v;

  const auto s = classify(L);
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& c : s.lyapunov)
    if (!c.center) gap = std::min(gap, std::abs(std::expm1(c.value)));
  margin_ = 0.5 * gap;
  margin_ok_ = is_linear() || std::abs(eps_) * sup_dv_ < margin_;
  if (!margin_ok_ && policy == MarginPolicy::Enforce) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "invertibility margin violated: eps*sup|Dv| = " << std::abs(eps_) * sup_dv_ << " >= " << margin_;
    throw PreconditionError(msg.str());
  }
}

TorusMap TorusMap::power(int p) const {
  if (p == 0) throw PreconditionError("iterate must be nonzero");
  TorusMap out = *this;
  out.p_ = p_ * p;
  out.Lp_ = toral::power(L_, out.p_);
  out.Lpd_ = to_double(out.Lp_);
  return out;
}

bool TorusMap::same_base(const TorusMap& o) const {
  if (!(L_ == o.L_) || eps_ != o.eps_ || normalize_ != o.normalize_ || modes_.size() != o.modes_.size()) return false;
  for (std::size_t j = 0; j < modes_.size(); ++j)
    if (modes_[j].k != o.modes_[j].k || modes_[j].a != o.modes_[j].a || modes_[j].b != o.modes_[j].b) return false;
  return true;
}

void TorusMap::base_lift(const double* x, std::size_t n, double* out, double* disp) const {
  std::vector<double> u(d_ * n, 0.0);
  if (!is_linear()) {
    kernel::displacement(table_, x, n, n, u.data());
    for (std::size_t i = 0; i < d_; ++i) {
      const double c = normalize_ ? v0_[i] : 0.0;
      for (std::size_t p = 0; p < n; ++p) u[i * n + p] = eps_ * (u[i * n + p] - c);
    }
  }
  for (std::size_t i = 0; i < d_; ++i)
    for (std::size_t p = 0; p < n; ++p) {
      double s = 0;
      for (std::size_t j = 0; j < d_; ++j) s += Ld_(i, j) * x[j * n + p];
      out[i * n + p] = s + u[i * n + p];
    }
  if (disp) std::copy(u.begin(), u.end(), disp);
}

void TorusMap::base_jacobian(const double* x, std::size_t stride, double* J) const {
  for (std::size_t i = 0; i < d_; ++i)
    for (std::size_t j = 0; j < d_; ++j) J[i * d_ + j] = Ld_(i, j);
  if (is_linear()) return;
  for (std::size_t m = 0; m < modes_.size(); ++m) {
    const auto& mode = modes_[m];
    double t = 0;
    for (std::size_t i = 0; i < d_; ++i) t += static_cast<double>(mode.k[i]) * x[i * stride];
    const double r = 2 * std::numbers::pi * (t - std::nearbyint(t));
    const double s = std::sin(r), c = std::cos(r);
    for (std::size_t i = 0; i < d_; ++i) {
      const double coef = eps_ * 2 * std::numbers::pi * (-mode.a[i] * s + mode.b[i] * c);
      if (coef == 0) continue;
      for (std::size_t j = 0; j < d_; ++j) J[i * d_ + j] += coef * static_cast<double>(mode.k[j]);
    }
  }
}

void TorusMap::base_inverse(const double* y, std::size_t n, double* out) const {
  for (std::size_t i = 0; i < d_; ++i)
    for (std::size_t p = 0; p < n; ++p) {
      double s = 0;
      for (std::size_t j = 0; j < d_; ++j) s += Linvd_(i, j) * y[j * n + p];
      out[i * n + p] = s;
    }
  if (is_linear()) return;
  std::vector<char> active(n, 1);
  std::size_t remaining = n;
  const std::size_t m = modes_.size();
  // DF = L + C K^T with K the frequencies: Woodbury when the modes are few
  const bool woodbury = m <= d_;
  std::vector<double> fx(d_ * n), J(d_ * d_), r(d_), z(d_), C(d_ * m), W(d_ * m), S(m * m), t(m);
  for (int it = 0; it < 60 && remaining > 0; ++it) {
    base_lift(out, n, fx.data(), nullptr);
    for (std::size_t p = 0; p < n; ++p) {
      if (!active[p]) continue;
      for (std::size_t i = 0; i < d_; ++i) r[i] = fx[i * n + p] - y[i * n + p];
      bool ok = true;
      if (woodbury) {
        for (std::size_t j = 0; j < m; ++j) {
          const auto& mode = modes_[j];
          double th = 0;
          for (std::size_t i = 0; i < d_; ++i) th += static_cast<double>(mode.k[i]) * out[i * n + p];
          const double ang = 2 * std::numbers::pi * (th - std::nearbyint(th));
          const double s = std::sin(ang), c = std::cos(ang);
          for (std::size_t i = 0; i < d_; ++i)
            C[i * m + j] = eps_ * 2 * std::numbers::pi * (-mode.a[i] * s + mode.b[i] * c);
        }
        for (std::size_t i = 0; i < d_; ++i) {
          double zi = 0;
          for (std::size_t l = 0; l < d_; ++l) zi += Linvd_(i, l) * r[l];
          z[i] = zi;
          for (std::size_t j = 0; j < m; ++j) {
            double w = 0;
            for (std::size_t l = 0; l < d_; ++l) w += Linvd_(i, l) * C[l * m + j];
            W[i * m + j] = w;
          }
        }
        for (std::size_t a = 0; a < m; ++a) {
          const auto& ka = modes_[a].k;
          double ta = 0;
          for (std::size_t i = 0; i < d_; ++i) ta += static_cast<double>(ka[i]) * z[i];
          t[a] = ta;
          for (std::size_t b = 0; b < m; ++b) {
            double sab = a == b ? 1.0 : 0.0;
            for (std::size_t i = 0; i < d_; ++i) sab += static_cast<double>(ka[i]) * W[i * m + b];
            S[a * m + b] = sab;
          }
        }
        ok = detail::solve_in_place(S.data(), t.data(), m);
        if (ok)
          for (std::size_t i = 0; i < d_; ++i) {
            double s = z[i];
            for (std::size_t j = 0; j < m; ++j) s -= W[i * m + j] * t[j];
            r[i] = s;
          }
      } else {
        base_jacobian(out + p, n, J.data());
        ok = detail::solve_in_place(J.data(), r.data(), d_);
      }
      if (!ok) throw NumericalError("singular Jacobian in Newton inversion");
      double step = 0;
      for (std::size_t i = 0; i < d_; ++i) {
        out[i * n + p] -= r[i];
        step = std::max(step, std::abs(r[i]));
      }
      if (step < 1e-13) {
        active[p] = 0;
        --remaining;
      }
    }
  }
  if (remaining > 0) throw NumericalError("Newton inversion of the lift did not converge");
}

void TorusMap::lift_batch(const double* x, std::size_t n, double* out, double* disp) const {
  const std::size_t len = d_ * n;
  const int steps = std::abs(p_);
  if (steps == 1) {
    if (p_ > 0) {
      base_lift(x, n, out, disp);
      return;
    }
    base_inverse(x, n, out);
  } else {
    std::vector<double> cur(x, x + len), next(len);
    for (int s = 0; s < steps; ++s) {
      if (p_ > 0)
        base_lift(cur.data(), n, next.data(), nullptr);
      else
        base_inverse(cur.data(), n, next.data());
      cur.swap(next);
    }
    std::copy(cur.begin(), cur.end(), out);
  }
  if (!disp) return;
  if (is_linear()) {
    std::fill(disp, disp + len, 0.0);
    return;
  }
  for (std::size_t i = 0; i < d_; ++i)
    for (std::size_t p = 0; p < n; ++p) {
      double s = 0;
      for (std::size_t j = 0; j < d_; ++j) s += Lpd_(i, j) * x[j * n + p];
      disp[i * n + p] = out[i * n + p] - s;
    }
}

void TorusMap::inverse_batch(const double* y, std::size_t n, double* out) const {
  const std::size_t len = d_ * n;
  std::vector<double> cur(y, y + len), next(len);
  for (int s = 0; s < std::abs(p_); ++s) {
    if (p_ > 0)
      base_inverse(cur.data(), n, next.data());
    else
      base_lift(cur.data(), n, next.data(), nullptr);
    cur.swap(next);
  }
  std::copy(cur.begin(), cur.end(), out);
}

Eigen::VectorXd TorusMap::lift(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out(d_);
  lift_batch(x.data(), 1, out.data());
  return out;
}

Eigen::VectorXd TorusMap::inverse(const Eigen::VectorXd& y) const {
  Eigen::VectorXd out(d_);
  inverse_batch(y.data(), 1, out.data());
  return out;
}

Eigen::VectorXd TorusMap::displacement(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out(d_), u(d_);
  lift_batch(x.data(), 1, out.data(), u.data());
  return u;
}

Eigen::MatrixXd TorusMap::jacobian(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd total = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d_), static_cast<Eigen::Index>(d_));
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> J(d_, d_);
  Eigen::VectorXd cur = x, next(d_);
  for (int s = 0; s < std::abs(p_); ++s) {
    if (p_ > 0) {
      base_jacobian(cur.data(), 1, J.data());
      total = J * total;
      base_lift(cur.data(), 1, next.data(), nullptr);
    } else {
      base_inverse(cur.data(), 1, next.data());
      base_jacobian(next.data(), 1, J.data());
      total = J.partialPivLu().solve(total).eval();
    }
    cur = next;
  }
  return total;
}

double torus_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double m = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    m = std::max(m, std::abs(t - std::nearbyint(t)));
  }
  return m;
}

std::vector<double> stratified_sample(std::size_t d, std::size_t per_axis, std::uint64_t seed) {
  if (per_axis == 0) throw PreconditionError("sample size must be positive");
  const std::size_t strat = std::min<std::size_t>(d, 3);
  std::size_t n = 1;
  for (std::size_t i = 0; i < strat; ++i) n *= per_axis;
  std::vector<double> x(d * n);
  std::mt19937_64 rng(seed);
  for (std::size_t p = 0; p < n; ++p) {
    std::size_t cell = p;
    for (std::size_t i = 0; i < d; ++i) {
      const double u = detail::uniform01(rng);
      if (i < strat) {
        x[i * n + p] = (static_cast<double>(cell % per_axis) + u) / static_cast<double>(per_axis);
        cell /= per_axis;
      } else {
        x[i * n + p] = u;
      }
    }
  }
  return x;
}

double commutation_error(const TorusMap& f, const TorusMap& g, const std::vector<double>& pts) {
  const std::size_t d = f.dim();
  if (g.dim() != d) throw PreconditionError("maps have different dimensions");
  const std::size_t n = pts.size() / d;
  std::vector<double> a(pts.size()), b(pts.size()), fa(pts.size()), gb(pts.size());
  g.lift_batch(pts.data(), n, a.data());
  f.lift_batch(a.data(), n, fa.data());
  f.lift_batch(pts.data(), n, b.data());
  g.lift_batch(b.data(), n, gb.data());
  double m = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double t = fa[i] - gb[i];
    m = std::max(m, std::abs(t - std::nearbyint(t)));
  }
  return m;
}

}  // namespace toral
