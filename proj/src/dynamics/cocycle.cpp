#include <cfloat>
#include <cmath>
#include <sstream>

#include "dynamics/detail.hpp"
#include "toral/dynamics/dynamics.hpp"
#include "toral/dynamics/parallel.hpp"
#include "toral/spectrum/spectrum.hpp"

namespace toral {

namespace {

constexpr std::size_t kChunkPoints = 512;

double norm2(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0;
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

double norm_inf(const Eigen::MatrixXd& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

// The m x d matrices C_t T applied to u(orbit point t).
std::vector<Eigen::MatrixXd> series_coefficients(const CocycleSolution& s) {
  const auto m = s.A.rows();
  std::vector<Eigen::MatrixXd> out;
  const Eigen::MatrixXd step = s.expanding ? Eigen::MatrixXd(s.A.inverse()) : s.A;
  Eigen::MatrixXd P = s.expanding ? step : Eigen::MatrixXd::Identity(m, m);
  for (std::size_t t = 0; t <= s.truncation_N; ++t) {
    out.push_back(s.expanding ? Eigen::MatrixXd(P * s.T) : Eigen::MatrixXd(-P * s.T));
    P = step * P;
  }
  return out;
}

void phi_points(const CocycleSolution& s, const std::vector<Eigen::MatrixXd>& C, const double* x, std::size_t n,
                double* out) {
  const TorusMap& f = *s.map;
  const std::size_t d = f.dim();
  const std::size_t m = static_cast<std::size_t>(s.A.rows());
  std::vector<detail::Compensated> acc(m * n);
  std::vector<double> cur(x, x + d * n), next(d * n), disp(d * n);
  for (std::size_t t = 0; t < C.size(); ++t) {
    if (s.expanding) {
      f.lift_batch(cur.data(), n, next.data(), disp.data());
      detail::reduce(next.data(), next.size());
      cur.swap(next);
    } else {
      f.inverse_batch(cur.data(), n, next.data());
      detail::reduce(next.data(), next.size());
      cur.swap(next);
      f.lift_batch(cur.data(), n, next.data(), disp.data());
    }
    const Eigen::MatrixXd& Ct = C[t];
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t p = 0; p < n; ++p) {
        double v = 0;
        for (std::size_t i = 0; i < d; ++i) v += Ct(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) * disp[i * n + p];
        acc[k * n + p].add(v);
      }
  }
  for (std::size_t i = 0; i < m * n; ++i) out[i] = acc[i].value();
}

// Copies the chunk [b, e) of a coordinate-major d x n array.
std::vector<double> slice(const std::vector<double>& x, std::size_t d, std::size_t n, std::size_t b, std::size_t e) {
  std::vector<double> out(d * (e - b));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t p = b; p < e; ++p) out[i * (e - b) + (p - b)] = x[i * n + p];
  return out;
}

Eigen::VectorXd column(const std::vector<double>& x, std::size_t rows, std::size_t n, std::size_t p) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(rows));
  for (std::size_t i = 0; i < rows; ++i) v[static_cast<Eigen::Index>(i)] = x[i * n + p];
  return v;
}

}  // namespace

std::vector<double> CocycleSolution::phi_batch(const std::vector<double>& x, std::size_t n) const {
  const std::size_t d = map->dim();
  const std::size_t m = static_cast<std::size_t>(A.rows());
  std::vector<double> out(m * n, 0.0);
  if (map->is_linear() || n == 0) return out;
  const auto C = series_coefficients(*this);
  parallel_chunks(n, (n + kChunkPoints - 1) / kChunkPoints, [&](std::size_t, std::size_t b, std::size_t e) {
    const auto xs = slice(x, d, n, b, e);
    std::vector<double> r(m * (e - b));
    phi_points(*this, C, xs.data(), e - b, r.data());
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t p = b; p < e; ++p) out[k * n + p] = r[k * (e - b) + (p - b)];
  });
  return out;
}

Eigen::VectorXd CocycleSolution::phi(const Eigen::VectorXd& x) const {
  std::vector<double> xs(x.data(), x.data() + x.size());
  const auto r = phi_batch(xs, 1);
  return Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
}

Eigen::VectorXd CocycleSolution::Phi(const Eigen::VectorXd& x) const { return T * x + phi(x); }

double cocycle_residual(const CocycleSolution& s, const std::vector<double>& pts) {
  const TorusMap& f = *s.map;
  const std::size_t d = f.dim();
  const std::size_t n = pts.size() / d;
  const std::size_t m = static_cast<std::size_t>(s.A.rows());
  std::vector<double> fx(d * n), u(d * n);
  f.lift_batch(pts.data(), n, fx.data(), u.data());
  detail::reduce(fx.data(), fx.size());
  const auto px = s.phi_batch(pts, n);
  const auto pfx = s.phi_batch(fx, n);
  double worst = 0;
  Eigen::VectorXd r(static_cast<Eigen::Index>(m));
  for (std::size_t p = 0; p < n; ++p) {
    const Eigen::VectorXd up = column(u, d, n, p);
    const Eigen::VectorXd a = column(px, m, n, p), b = column(pfx, m, n, p);
    r = s.T * up - s.A * a + b;
    worst = std::max(worst, (s.S * r).cwiseAbs().maxCoeff());
  }
  return worst;
}

CocycleSolution solve_twisted_cocycle(const TorusMap& f, std::size_t cls, const CocycleOptions& opts) {
  const IntMatrix& L = f.linear_part();
  const auto spec = classify(L);
  if (cls >= spec.lyapunov.size())
    throw PreconditionError("no exponent class " + std::to_string(cls) + " (there are " +
                            std::to_string(spec.lyapunov.size()) + ")");
  const auto& c = spec.lyapunov[cls];
  if (c.center) throw PreconditionError("class " + std::to_string(cls) + " has exponent zero");
  const std::size_t d = f.dim();
  const auto basis = adapted_basis(L, spec);
  const Eigen::MatrixXd Sinv = basis.S.inverse();
  const auto off = static_cast<Eigen::Index>(basis.offsets[cls]);
  const auto m = static_cast<Eigen::Index>(c.multiplicity);

  CocycleSolution s;
  s.exponent_class = cls;
  s.exponent = c.value;
  s.expanding = c.value > 0;
  s.map = std::make_shared<const TorusMap>(f);
  s.S = basis.S.middleCols(off, m);
  s.T = Sinv.middleRows(off, m);
  s.A = s.T * f.linear_double() * s.S;

  const int steps = std::abs(f.iterate());
  const double lip = std::pow(1 + std::abs(f.epsilon()) * f.sup_dv(), steps);
  s.rho = (s.expanding ? norm2(s.A.inverse()) : norm2(s.A)) * lip;
  if (!(s.rho < 1)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "perturbation too large for class chi = " << c.value << " (rho = " << s.rho << ")";
    throw PreconditionError(msg.str());
  }
  if (!f.margin_ok()) throw PreconditionError("invertibility margin violated");

  // sup-norm bound on the displacement of f^p
  const double base_norm = norm_inf(f.iterate() > 0 ? to_double(f.base_linear()) : to_double(f.base_linear()).inverse());
  double U = 0;
  for (int k = 0; k < steps; ++k) U = U * base_norm + f.sup_displacement();

  const double cond = norm2(s.S) * norm2(s.T);
  const double C = cond * std::sqrt(static_cast<double>(d)) * U;
  if (f.is_linear() || C == 0) {
    s.truncation_N = 0;
    s.tail = 0;
  } else {
    std::size_t N = 0;
    while (C * std::pow(s.rho, static_cast<double>(N + 1)) / (1 - s.rho) > opts.tol / 2) {
      if (++N > 100000) throw NumericalError("series truncation exceeds 100000 terms");
    }
    s.truncation_N = N;
    s.tail = C * std::pow(s.rho, static_cast<double>(N + 1)) / (1 - s.rho);
  }
  // rounding in each term, and the loss of orbit shadowing once roundoff has grown to
  // O(1) along the fastest direction
  const double Lnorm = norm2(f.linear_double());
  const double fast = (s.expanding ? Lnorm : norm2(f.linear_double().inverse())) * lip;
  const double shadow = fast > 1 ? std::pow(DBL_EPSILON, std::log(1 / s.rho) / std::log(fast)) : DBL_EPSILON;
  const double allowance = 64 * DBL_EPSILON * static_cast<double>(s.truncation_N + 2) * (1 + Lnorm) * C / (1 - s.rho) +
                           4 * shadow * C / (1 - s.rho);
  s.bound = s.tail + allowance;

  if (opts.measure) {
    const auto pts = stratified_sample(d, opts.samples_per_axis, opts.seed);
    s.samples = pts.size() / d;
    s.seed = opts.seed;
    s.residual_sup = cocycle_residual(s, pts);
  }
  return s;
}

EquivarianceReport verify_equivariance(const CocycleSolution& sol, const TorusMap& g, std::size_t per_axis,
                                       std::uint64_t seed) {
  const TorusMap& f = *sol.map;
  const IntMatrix& L = f.linear_part();
  const IntMatrix& M = g.linear_part();
  if (g.dim() != f.dim() || !(L * M == M * L)) throw PreconditionError("g does not commute with f");
  const std::size_t d = f.dim();
  const auto pts = stratified_sample(d, per_axis, seed);
  const std::size_t n = pts.size() / d;
  EquivarianceReport rep;
  rep.commutation_error = commutation_error(f, g, pts);
  const double tol = 1e-12 * std::max(1.0, norm_inf(f.linear_double()) * norm_inf(g.linear_double()));
  if (rep.commutation_error > tol) {
    std::ostringstream msg;
    msg << "g does not commute with f on the sample (error " << rep.commutation_error << ")";
    throw PreconditionError(msg.str());
  }
  const auto m = sol.A.rows();
  const Eigen::MatrixXd Mc = sol.T * g.linear_double() * sol.S;
  std::vector<double> gx(d * n);
  g.lift_batch(pts.data(), n, gx.data());
  std::vector<double> gxr = gx;
  detail::reduce(gxr.data(), gxr.size());
  const auto px = sol.phi_batch(pts, n);
  const auto pgx = sol.phi_batch(gxr, n);
  std::vector<Eigen::VectorXd> D(n);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(m);
  for (std::size_t p = 0; p < n; ++p) {
    const Eigen::VectorXd Phi_gx = sol.T * column(gx, d, n, p) + column(pgx, static_cast<std::size_t>(m), n, p);
    const Eigen::VectorXd Phi_x = sol.T * column(pts, d, n, p) + column(px, static_cast<std::size_t>(m), n, p);
    D[p] = Phi_gx - Mc * Phi_x;
    mean += D[p];
  }
  mean /= static_cast<double>(n);
  rep.constant = mean;
  for (const auto& v : D) rep.deviation = std::max(rep.deviation, (sol.S * (v - mean)).cwiseAbs().maxCoeff());
  return rep;
}

HolderEstimate holder_diagnostic(const CocycleSolution& sol, std::size_t n_pairs, std::uint64_t seed) {
  const std::size_t d = sol.map->dim();
  std::mt19937_64 rng(seed);
  std::vector<double> base(d * n_pairs), dir(d * n_pairs);
  for (std::size_t p = 0; p < n_pairs; ++p) {
    double nn = 0;
    for (std::size_t i = 0; i < d; ++i) {
      base[i * n_pairs + p] = detail::uniform01(rng);
      dir[i * n_pairs + p] = 2 * detail::uniform01(rng) - 1;
      nn += dir[i * n_pairs + p] * dir[i * n_pairs + p];
    }
    for (std::size_t i = 0; i < d; ++i) dir[i * n_pairs + p] /= std::sqrt(nn);
  }
  HolderEstimate est;
  const auto m = static_cast<std::size_t>(sol.A.rows());
  const auto p0 = sol.phi_batch(base, n_pairs);
  for (int k = 2; k <= 16; k += 2) {
    const double delta = std::ldexp(1.0, -k);
    std::vector<double> moved(base);
    for (std::size_t i = 0; i < moved.size(); ++i) moved[i] += delta * dir[i];
    const auto p1 = sol.phi_batch(moved, n_pairs);
    double osc = 0;
    for (std::size_t p = 0; p < n_pairs; ++p) {
      double s = 0;
      for (std::size_t i = 0; i < m; ++i) s += std::pow(p1[i * n_pairs + p] - p0[i * n_pairs + p], 2);
      osc = std::max(osc, std::sqrt(s));
    }
    if (osc > 1e-13) {
      est.scales.push_back(delta);
      est.oscillations.push_back(osc);
    }
  }
  const std::size_t k = est.scales.size();
  if (k < 2) return est;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = std::log(est.scales[i]), y = std::log(est.oscillations[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  est.exponent = (static_cast<double>(k) * sxy - sx * sy) / (static_cast<double>(k) * sxx - sx * sx);
  return est;
}

std::vector<double> Semiconjugacy::h_batch(const std::vector<double>& x, std::size_t n) const {
  const std::size_t d = map->dim();
  std::vector<double> out(d * n, 0.0);
  for (const auto& part : parts) {
    const auto ph = part.phi_batch(x, n);
    const auto m = part.A.rows();
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t i = 0; i < d; ++i) {
        double s = 0;
        for (Eigen::Index k = 0; k < m; ++k)
          s += part.S(static_cast<Eigen::Index>(i), k) * ph[static_cast<std::size_t>(k) * n + p];
        out[i * n + p] += s;
      }
  }
  return out;
}

Eigen::VectorXd Semiconjugacy::h(const Eigen::VectorXd& x) const {
  std::vector<double> xs(x.data(), x.data() + x.size());
  const auto r = h_batch(xs, 1);
  return Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
}

Semiconjugacy franks_manning(const TorusMap& g, const SemiconjugacyOptions& opts) {
  const auto spec = classify(g.linear_part());
  if (spec.center_dim != 0) throw PreconditionError("no semiconjugacy solver for non-hyperbolic linear part");
  Semiconjugacy H;
  H.map = std::make_shared<const TorusMap>(g);
  CocycleOptions co;
  co.tol = opts.tol / static_cast<double>(spec.lyapunov.size());
  co.measure = false;
  for (std::size_t c = 0; c < spec.lyapunov.size(); ++c) {
    H.parts.push_back(solve_twisted_cocycle(g, c, co));
    H.bound += H.parts.back().bound;
  }
  const std::size_t d = g.dim();
  const auto pts = stratified_sample(d, opts.samples_per_axis, opts.seed);
  const std::size_t n = pts.size() / d;
  std::vector<double> gx(d * n), u(d * n);
  g.lift_batch(pts.data(), n, gx.data(), u.data());
  detail::reduce(gx.data(), gx.size());
  const auto hx = H.h_batch(pts, n);
  const auto hgx = H.h_batch(gx, n);
  const Eigen::MatrixXd& M = g.linear_double();
  for (std::size_t p = 0; p < n; ++p) {
    const Eigen::VectorXd r = column(u, d, n, p) + column(hgx, d, n, p) - M * column(hx, d, n, p);
    H.residual_sup = std::max(H.residual_sup, r.cwiseAbs().maxCoeff());
  }
  H.h0 = H.h(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d)));
  return H;
}

double commuting_pair_check(const TorusMap& f, const Semiconjugacy& H, std::size_t per_axis, std::uint64_t seed) {
  const TorusMap& g = *H.map;
  if (f.dim() != g.dim() || !(f.linear_part() * g.linear_part() == g.linear_part() * f.linear_part()))
    throw PreconditionError("linear parts of f and g do not commute");
  const std::size_t d = f.dim();
  const auto pts = stratified_sample(d, per_axis, seed);
  const std::size_t n = pts.size() / d;
  std::vector<double> fx(d * n);
  f.lift_batch(pts.data(), n, fx.data());
  std::vector<double> fxr = fx;
  detail::reduce(fxr.data(), fxr.size());
  const auto hx = H.h_batch(pts, n);
  const auto hfx = H.h_batch(fxr, n);
  const Eigen::MatrixXd& Lf = f.linear_double();
  double worst = 0;
  for (std::size_t p = 0; p < n; ++p) {
    const Eigen::VectorXd lhs = column(fx, d, n, p) + column(hfx, d, n, p);
    const Eigen::VectorXd rhs = Lf * (column(pts, d, n, p) + column(hx, d, n, p));
    worst = std::max(worst, torus_distance(lhs, rhs));
  }
  return worst;
}

}  // namespace toral
