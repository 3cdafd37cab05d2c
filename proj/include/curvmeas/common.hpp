#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace curvmeas {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Sentinel for quantities that genuinely take the value infinity
// (rho, reach, principal curvatures). All arithmetic on it is
// explicit-cased at the use sites.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

inline bool is_infinite(double v) { return std::isinf(v); }

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// x has no unique nearest point (x outside U(A)).
struct NotInDomain : Error { using Error::Error; };
// Query point fails the regularity test required by the differential kernels.
struct NotRegular : Error { using Error::Error; };
// A finite-difference stencil point left U(A).
struct StencilOutsideDomain : Error { using Error::Error; };
// Base point is not on the set A.
struct NotOnSet : Error { using Error::Error; };
// (a,u) has reach below the requested evaluation radius.
struct NotInBundle : Error { using Error::Error; };
struct NotOnManifold : Error { using Error::Error; };
struct InvalidIndex : Error { using Error::Error; };
struct ReachTooSmall : Error { using Error::Error; };
struct EmptyLevelSet : Error { using Error::Error; };
struct SceneFormat : Error { using Error::Error; };
struct Unsupported : Error { using Error::Error; };

struct Tolerances {
  double proj = 1e-9;        // nearest-point dedup / projection uniqueness
  double ray = 1e-9;         // rho/reach bisection slack, scaled by max(1, s)
  double diff = 1e-6;        // relative tolerance for differential residuals
  double step_factor = 1e-4; // FD step as a fraction of the safe radius
  double rank = 1e-3;        // relative singular-value cutoff for T_A
  double sing = 1e-5;        // |chi - 1/r| <= sing flags kappa = inf
  double t_max = 1e6;        // rho search cap; predicate true here => inf
  double s_max = 1e6;        // reach search cap

  // Returns false if the key is unknown.
  bool set_by_name(const std::string& key, double value);
};

inline Vec make_vec(std::initializer_list<double> vals) {
  Vec v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

}  // namespace curvmeas
