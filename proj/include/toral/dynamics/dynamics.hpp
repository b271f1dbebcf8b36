#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "toral/dynamics/kernel.hpp"
#include "toral/exact/matrix.hpp"

namespace toral {

inline constexpr std::uint64_t kSampleSeed = 0x9e3779b97f4a7c15ULL;
inline constexpr std::uint64_t kOrbitSeed = 0x2545f4914f6cdd1dULL;

/// a cos(2 pi <k,x>) + b sin(2 pi <k,x>)
struct FourierMode {
  std::vector<long> k;
  std::vector<double> a, b;
};

enum class MarginPolicy { Enforce, Defer };

/// f^p for the map f(x) = Lx + eps (v(x) - v(0)) on R^d / Z^d (the subtraction is
/// skipped when `normalize` is false). Negative p iterates the inverse.
class TorusMap {
 public:
  TorusMap(const IntMatrix& L, std::vector<FourierMode> modes, double epsilon, bool normalize = true,
           MarginPolicy policy = MarginPolicy::Enforce);
  static TorusMap linear(const IntMatrix& L) { return TorusMap(L, {}, 0.0); }

  TorusMap power(int p) const;

  std::size_t dim() const { return d_; }
  int iterate() const { return p_; }
  const IntMatrix& linear_part() const { return Lp_; }
  const Eigen::MatrixXd& linear_double() const { return Lpd_; }
  const IntMatrix& base_linear() const { return L_; }
  const std::vector<FourierMode>& modes() const { return modes_; }
  double epsilon() const { return eps_; }
  bool normalized() const { return normalize_; }
  bool is_linear() const { return eps_ == 0 || modes_.empty(); }

  /// sum 2 pi |k| (|a| + |b|), Euclidean norms; bounds sup ||Dv||.
  double sup_dv() const { return sup_dv_; }
  /// Bound on the max-norm of eps (v(x) - v(0)).
  double sup_displacement() const { return sup_u_; }
  /// 0.5 min over nonzero exponents chi of |e^chi - 1|
  double margin() const { return margin_; }
  bool margin_ok() const { return margin_ok_; }

  Eigen::VectorXd lift(const Eigen::VectorXd& x) const;
  Eigen::VectorXd inverse(const Eigen::VectorXd& y) const;
  /// lift(x) - L^p x
  Eigen::VectorXd displacement(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;

  /// Batched versions on coordinate-major arrays x[i * n + j]; `disp` may be null.
  void lift_batch(const double* x, std::size_t n, double* out, double* disp = nullptr) const;
  void inverse_batch(const double* y, std::size_t n, double* out) const;

  /// One step of the underlying map f, whatever the iterate. J is row-major d x d.
  void base_lift(const double* x, std::size_t n, double* out, double* disp) const;
  void base_inverse(const double* y, std::size_t n, double* out) const;
  void base_jacobian(const double* x, std::size_t stride, double* J) const;
  /// Same underlying f (linear part, modes, epsilon, normalization).
  bool same_base(const TorusMap& other) const;

 private:

  std::size_t d_ = 0;
  int p_ = 1;
  IntMatrix L_, Lp_;
  Eigen::MatrixXd Ld_, Linvd_, Lpd_;
  std::vector<FourierMode> modes_;
  kernel::ModeTable table_;
  std::vector<double> v0_;
  double eps_ = 0;
  bool normalize_ = true;
  double sup_dv_ = 0, sup_u_ = 0, margin_ = 0;
  bool margin_ok_ = true;
};

/// Max-norm distance on R^d / Z^d.
double torus_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Stratified sample of [0,1)^d with per_axis^min(d,3) points: one jittered point
/// per cell of a grid on the first min(d,3) axes, remaining coordinates uniform.
/// Coordinate-major layout.
std::vector<double> stratified_sample(std::size_t d, std::size_t per_axis, std::uint64_t seed);

/// sup over the sample of the torus distance between f(g(x)) and g(f(x)).
double commutation_error(const TorusMap& f, const TorusMap& g, const std::vector<double>& pts);

struct CocycleOptions {
  double tol = 1e-10;
  std::size_t samples_per_axis = 64;
  std::uint64_t seed = kSampleSeed;
  bool measure = true;
};

/// phi_chi for one exponent class of f's linear part, in class coordinates.
class CocycleSolution {
 public:
  std::size_t exponent_class = 0;
  double exponent = 0;
  bool expanding = true;
  std::size_t truncation_N = 0;  // the series has N + 1 terms
  double rho = 0;
  double tail = 0;          // geometric tail in ambient coordinates
  double bound = 0;         // tail plus roundoff allowance
  double residual_sup = 0;  // measured, ambient max-norm
  std::size_t samples = 0;
  std::uint64_t seed = 0;

  std::shared_ptr<const TorusMap> map;
  Eigen::MatrixXd A;  // L restricted to the class, in adapted coordinates
  Eigen::MatrixXd S;  // d x m: class columns of the adapted basis
  Eigen::MatrixXd T;  // m x d: matching rows of its inverse

  /// phi at each point (m x n result, coordinate-major); x is d x n coordinate-major.
  std::vector<double> phi_batch(const std::vector<double>& x, std::size_t n) const;
  Eigen::VectorXd phi(const Eigen::VectorXd& x) const;
  /// x^chi + phi(x)
  Eigen::VectorXd Phi(const Eigen::VectorXd& x) const;
};

CocycleSolution solve_twisted_cocycle(const TorusMap& f, std::size_t cls, const CocycleOptions& opts = {});

/// sup over the points of |S (T u(x) - A phi(x) + phi(fx))|_max.
double cocycle_residual(const CocycleSolution& sol, const std::vector<double>& pts);

struct EquivarianceReport {
  double deviation = 0;
  Eigen::VectorXd constant;
  double commutation_error = 0;
};

/// sup of |Phi(Gx) - M Phi(x) - c| with c the fitted mean; g must commute with f.
EquivarianceReport verify_equivariance(const CocycleSolution& sol, const TorusMap& g,
                                       std::size_t per_axis = 64, std::uint64_t seed = kSampleSeed);

struct HolderEstimate {
  double exponent = 0;
  std::vector<double> scales, oscillations;
};
/// Log-log regression of the oscillation of phi against the displacement scale.
HolderEstimate holder_diagnostic(const CocycleSolution& sol, std::size_t n_pairs = 256, std::uint64_t seed = kSampleSeed);

struct LyapunovOptions {
  std::size_t n_orbits = 16;
  std::size_t n_steps = 100000;
  std::uint64_t seed = kOrbitSeed;
};

struct LyapunovResult {
  std::vector<double> exponents;  // descending
  std::vector<double> stderr_;
  std::vector<std::vector<double>> per_orbit;
  LyapunovOptions options;
};

LyapunovResult lyapunov_spectrum(const TorusMap& f, const LyapunovOptions& opts = {});

struct FixedPointReport {
  Integer algebraic_count;
  std::vector<Eigen::VectorXd> points;  // in [0,1)^d
  std::size_t seeds = 0;
  bool counts_match = false;
};

FixedPointReport fixed_points(const TorusMap& f);

struct PermutationReport {
  std::vector<std::size_t> sigma;     // g(x_j) = x_sigma[j]
  std::vector<std::size_t> sigma_sq;  // for g^2
  bool homomorphism = false;          // sigma_sq = sigma o sigma
  double max_match_error = 0;
};

PermutationReport fixed_point_permutation(const TorusMap& f, const TorusMap& g);

struct SemiconjugacyOptions {
  double tol = 1e-8;
  std::size_t samples_per_axis = 64;
  std::uint64_t seed = kSampleSeed;
};

/// H = id + h with M h(x) - h(gx) = u(x), u the displacement of g.
class Semiconjugacy {
 public:
  std::vector<CocycleSolution> parts;
  std::shared_ptr<const TorusMap> map;
  double residual_sup = 0;
  double bound = 0;
  Eigen::VectorXd h0;

  Eigen::VectorXd h(const Eigen::VectorXd& x) const;
  std::vector<double> h_batch(const std::vector<double>& x, std::size_t n) const;
  Eigen::VectorXd H(const Eigen::VectorXd& x) const { return x + h(x); }
};

Semiconjugacy franks_manning(const TorusMap& g, const SemiconjugacyOptions& opts = {});

/// sup over samples of the torus distance between H(f(x)) and L_f H(x).
double commuting_pair_check(const TorusMap& f, const Semiconjugacy& H, std::size_t per_axis = 64,
                            std::uint64_t seed = kSampleSeed);

struct VolumeGrowthOptions {
  std::size_t n_orbits = 4;
  std::uint64_t seed = kOrbitSeed;
  double lemma_epsilon = 0.05;
  double lemma_c = 1.0;
};

struct VolumeGrowthReport {
  std::vector<double> per_orbit;  // log|det Dg^n on the center| / n
  double rate = 0;                // mean of per_orbit
  double linear_center_log_det = 0;
  double lemma_rhs = 0;  // (1 - eps) log|det M_c| - 2 eps sum_{chi(M) > 0} d chi(M)
  bool lemma_holds = false;
  std::size_t steps = 0;
};

VolumeGrowthReport center_volume_growth(const TorusMap& f, const TorusMap& g, std::size_t n,
                                        const VolumeGrowthOptions& opts = {});

}  // namespace toral
