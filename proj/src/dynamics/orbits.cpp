#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dynamics/detail.hpp"
#include "toral/centralizer/centralizer.hpp"
#include "toral/dynamics/dynamics.hpp"
#include "toral/dynamics/parallel.hpp"
#include "toral/exact/lattice.hpp"
#include "toral/exact/linalg.hpp"
#include "toral/spectrum/spectrum.hpp"

namespace toral {

namespace {

// Orthonormal frame transported by the derivative, in a fixed coordinate system.
class Frame {
 public:
  Frame(std::size_t d, const Eigen::MatrixXd& S, const Eigen::MatrixXd& Sinv)
      : d_(d), S_(S), Sinv_(Sinv), Q_(d * d, 0.0), Z_(d * d), B_(d * d), tmp_(d * d), acc_(d) {
    for (std::size_t i = 0; i < d; ++i) Q_[i * d + i] = 1;
  }

  // J row-major d x d, in ambient coordinates.
  void push(const double* J) {
    const std::size_t d = d_;
    // tmp = J S, B = Sinv tmp
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        double s = 0;
        for (std::size_t k = 0; k < d; ++k) s += J[i * d + k] * S_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
        tmp_[i * d + j] = s;
      }
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        double s = 0;
        for (std::size_t k = 0; k < d; ++k) s += Sinv_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) * tmp_[k * d + j];
        B_[i * d + j] = s;
      }
    // Z_c = B Q_c, then Gram-Schmidt with one reorthogonalization
    for (std::size_t c = 0; c < d; ++c) {
      double* z = &Z_[c * d];
      for (std::size_t i = 0; i < d; ++i) {
        double s = 0;
        for (std::size_t k = 0; k < d; ++k) s += B_[i * d + k] * Q_[c * d + k];
        z[i] = s;
      }
    }
    for (std::size_t c = 0; c < d; ++c) {
      double* z = &Z_[c * d];
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t j = 0; j < c; ++j) {
          const double* q = &Q_[j * d];
          double r = 0;
          for (std::size_t i = 0; i < d; ++i) r += q[i] * z[i];
          for (std::size_t i = 0; i < d; ++i) z[i] -= r * q[i];
        }
      double nn = 0;
      for (std::size_t i = 0; i < d; ++i) nn += z[i] * z[i];
      const double norm = std::sqrt(nn);
      if (!(norm > 0) || !std::isfinite(norm)) throw NumericalError("frame collapsed during QR transport");
      acc_[c].add(std::log(norm));
      for (std::size_t i = 0; i < d; ++i) Q_[c * d + i] = z[i] / norm;
    }
  }

  std::vector<double> sums() const {
    std::vector<double> out(d_);
    for (std::size_t i = 0; i < d_; ++i) out[i] = acc_[i].value();
    return out;
  }

 private:
  std::size_t d_;
  Eigen::MatrixXd S_, Sinv_;
  std::vector<double> Q_, Z_, B_, tmp_;
  std::vector<detail::Compensated> acc_;
};

std::mt19937_64 orbit_rng(std::uint64_t seed, std::size_t orbit) {
  return std::mt19937_64(seed + 0x9e3779b97f4a7c15ULL * (orbit + 1));
}

// Per-column log growth of the transported frame along n steps of f, summed.
std::vector<double> transport(const TorusMap& f, const Eigen::MatrixXd& S, const Eigen::MatrixXd& Sinv,
                              Eigen::VectorXd x, std::size_t n) {
  const std::size_t d = f.dim();
  Frame frame(d, S, Sinv);
  std::vector<double> J(d * d), next(d);
  if (f.iterate() > 0) {
    for (std::size_t step = 0; step < n; ++step)
      for (int sub = 0; sub < f.iterate(); ++sub) {
        f.base_jacobian(x.data(), 1, J.data());
        frame.push(J.data());
        f.base_lift(x.data(), 1, next.data(), nullptr);
        for (std::size_t i = 0; i < d; ++i) x[static_cast<Eigen::Index>(i)] = next[i] - std::nearbyint(next[i]);
      }
  } else {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> Jm;
    for (std::size_t step = 0; step < n; ++step) {
      Jm = f.jacobian(x);
      frame.push(Jm.data());
      x = f.lift(x);
      detail::reduce(x.data(), d);
    }
  }
  return frame.sums();
}

Eigen::VectorXd random_point(std::mt19937_64& rng, std::size_t d) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) x[static_cast<Eigen::Index>(i)] = detail::uniform01(rng);
  return x;
}

}  // namespace

LyapunovResult lyapunov_spectrum(const TorusMap& f, const LyapunovOptions& opts) {
  if (opts.n_orbits == 0 || opts.n_steps == 0) throw PreconditionError("n_orbits and n_steps must be positive");
  const std::size_t d = f.dim();
  const auto spec = classify(f.linear_part());
  const auto basis = adapted_basis(f.linear_part(), spec);
  const Eigen::MatrixXd Sinv = basis.S.inverse();
  LyapunovResult res;
  res.options = opts;
  res.per_orbit.assign(opts.n_orbits, {});
  parallel_chunks(opts.n_orbits, opts.n_orbits, [&](std::size_t o, std::size_t, std::size_t) {
    auto rng = orbit_rng(opts.seed, o);
    auto sums = transport(f, basis.S, Sinv, random_point(rng, d), opts.n_steps);
    for (auto& s : sums) s /= static_cast<double>(opts.n_steps);
    std::sort(sums.rbegin(), sums.rend());
    res.per_orbit[o] = std::move(sums);
  });
  res.exponents.assign(d, 0.0);
  res.stderr_.assign(d, 0.0);
  const double k = static_cast<double>(opts.n_orbits);
  for (std::size_t i = 0; i < d; ++i) {
    detail::Compensated mean;
    for (const auto& o : res.per_orbit) mean.add(o[i]);
    const double mu = mean.value() / k;
    double var = 0;
    for (const auto& o : res.per_orbit) var += (o[i] - mu) * (o[i] - mu);
    res.exponents[i] = mu;
    res.stderr_[i] = opts.n_orbits > 1 ? std::sqrt(var / (k - 1) / k) : 0.0;
  }
  return res;
}

FixedPointReport fixed_points(const TorusMap& f) {
  const std::size_t d = f.dim();
  const IntMatrix A = f.linear_part() - IntMatrix::identity(d);
  const Integer det = det_exact(A);
  if (det == 0) throw PreconditionError("det(L - I) = 0: fixed points are not isolated");
  FixedPointReport rep;
  rep.algebraic_count = abs(det);
  if (rep.algebraic_count > 1000000) throw PreconditionError("too many fixed points to enumerate");
  const IntMatrix H = column_hnf(A);
  std::vector<long> radix(d);
  for (std::size_t i = 0; i < d; ++i) radix[i] = H(i, i).get_si();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(to_double(A));
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  std::vector<long> m(d, 0);
  while (true) {
    ++rep.seeds;
    Eigen::VectorXd mv(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) mv[static_cast<Eigen::Index>(i)] = static_cast<double>(m[i]);
    Eigen::VectorXd x = lu.solve(mv);
    bool converged = false;
    for (int it = 0; it < 100 && !converged; ++it) {
      const Eigen::VectorXd G = f.lift(x) - x - mv;
      const Eigen::VectorXd step = (f.jacobian(x) - I).partialPivLu().solve(G);
      x -= step;
      converged = step.cwiseAbs().maxCoeff() < 1e-13;
    }
    if (!converged || !x.allFinite()) {
      std::ostringstream msg;
      msg << "Newton did not converge from fixed-point seed m = (";
      for (std::size_t i = 0; i < d; ++i) msg << (i ? ", " : "") << m[i];
      msg << ")";
      throw NumericalError(msg.str());
    }
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      x[i] -= std::floor(x[i]);
      if (x[i] > 1 - 1e-13) x[i] = 0;
    }
    bool dup = false;
    for (const auto& y : rep.points)
      if (torus_distance(x, y) < 1e-8) dup = true;
    if (!dup) rep.points.push_back(x);
    std::size_t k = 0;
    while (k < d && ++m[k] == radix[k]) m[k++] = 0;
    if (k == d) break;
  }
  rep.counts_match = Integer(static_cast<long>(rep.points.size())) == rep.algebraic_count;
  return rep;
}

PermutationReport fixed_point_permutation(const TorusMap& f, const TorusMap& g) {
  if (g.dim() != f.dim() || !(f.linear_part() * g.linear_part() == g.linear_part() * f.linear_part()))
    throw PreconditionError("g does not commute with f");
  const auto pts = stratified_sample(f.dim(), 8, kSampleSeed);
  const double ce = commutation_error(f, g, pts);
  if (ce > 1e-10) throw PreconditionError("g does not commute with f on the sample");
  const auto fix = fixed_points(f);
  PermutationReport rep;
  auto match = [&](const TorusMap& h) {
    std::vector<std::size_t> sigma;
    for (const auto& x : fix.points) {
      const Eigen::VectorXd y = h.lift(x);
      std::size_t best = fix.points.size();
      double dist = 1e-8;
      for (std::size_t k = 0; k < fix.points.size(); ++k) {
        const double t = torus_distance(y, fix.points[k]);
        if (t < dist) {
          dist = t;
          best = k;
        }
      }
      if (best == fix.points.size()) throw PreconditionError("g does not preserve the fixed points of f");
      rep.max_match_error = std::max(rep.max_match_error, dist);
      sigma.push_back(best);
    }
    return sigma;
  };
  rep.sigma = match(g);
  rep.sigma_sq = match(g.power(2));
  rep.homomorphism = true;
  for (std::size_t j = 0; j < rep.sigma.size(); ++j)
    if (rep.sigma_sq[j] != rep.sigma[rep.sigma[j]]) rep.homomorphism = false;
  return rep;
}

VolumeGrowthReport center_volume_growth(const TorusMap& f, const TorusMap& g, std::size_t n,
                                        const VolumeGrowthOptions& opts) {
  const IntMatrix& L = f.linear_part();
  const IntMatrix& M = g.linear_part();
  if (g.dim() != f.dim() || !(L * M == M * L)) throw PreconditionError("g does not commute with f");
  if (n == 0 || opts.n_orbits == 0) throw PreconditionError("n and n_orbits must be positive");
  const Functionals F(L);
  const auto& spec = F.spectrum();
  if (spec.center_dim != 2) throw PreconditionError("center of the linear part is not 2-dimensional");
  std::size_t cc = 0;
  while (!spec.lyapunov[cc].center) ++cc;
  const std::size_t d = f.dim();
  const auto basis = adapted_basis(L, spec);
  const auto c0 = static_cast<Eigen::Index>(basis.offsets[cc]);

  VolumeGrowthReport rep;
  rep.steps = n;
  const auto vals = F.evaluate(M);
  rep.linear_center_log_det = 2 * vals.per_class[cc];
  double pos = 0;
  for (std::size_t c = 0; c < F.class_count(); ++c)
    if (c != cc && vals.per_class[c] > 0) pos += F.class_dim(c) * vals.per_class[c];
  rep.lemma_rhs = (1 - opts.lemma_epsilon) * rep.linear_center_log_det - 2 * opts.lemma_epsilon * pos;

  if (f.is_linear() && g.is_linear()) {
    // E^c is exactly invariant: the center block of M in the adapted basis
    const Eigen::MatrixXd B = basis.S.inverse() * g.linear_double() * basis.S;
    const double r = std::log(std::abs(B.block(c0, c0, 2, 2).determinant()));
    rep.per_orbit.assign(opts.n_orbits, r);
  } else if (g.same_base(f)) {
    // g is an iterate of the same map, so E^u > E^c > E^s is dominated for g in the
    // order of the sign of its iterate
    Eigen::MatrixXd S = basis.S;
    std::vector<std::size_t> center_cols{static_cast<std::size_t>(c0), static_cast<std::size_t>(c0) + 1};
    if ((g.iterate() > 0) != (f.iterate() > 0)) {
      S = basis.S.rowwise().reverse();
      center_cols = {d - 2 - static_cast<std::size_t>(c0), d - 1 - static_cast<std::size_t>(c0)};
    }
    const Eigen::MatrixXd Sinv = S.inverse();
    std::vector<std::vector<double>> cols(opts.n_orbits);
    rep.per_orbit.assign(opts.n_orbits, 0.0);
    parallel_chunks(opts.n_orbits, opts.n_orbits, [&](std::size_t o, std::size_t, std::size_t) {
      auto rng = orbit_rng(opts.seed, o);
      auto sums = transport(g, S, Sinv, random_point(rng, d), n);
      for (auto& s : sums) s /= static_cast<double>(n);
      rep.per_orbit[o] = sums[center_cols[0]] + sums[center_cols[1]];
      cols[o] = std::move(sums);
    });
    // every non-center column must separate from the center average
    for (std::size_t o = 0; o < opts.n_orbits; ++o) {
      const double mid = rep.per_orbit[o] / 2;
      for (std::size_t i = 0; i < d; ++i) {
        if (i == center_cols[0] || i == center_cols[1]) continue;
        const bool above = i < center_cols[0];
        if (above ? !(cols[o][i] > mid) : !(cols[o][i] < mid))
          throw NumericalError("center-plane tracking failed: dominance violated");
      }
    }
  } else {
    throw PreconditionError("g must be linear or an iterate of f");
  }
  rep.rate = std::accumulate(rep.per_orbit.begin(), rep.per_orbit.end(), 0.0) / static_cast<double>(opts.n_orbits);
  rep.lemma_holds = rep.rate >= rep.lemma_rhs + std::log(opts.lemma_c) / static_cast<double>(n);
  return rep;
}

}  // namespace toral
