#include <cmath>

#include "curvmeas/curvature.hpp"
#include "curvmeas/differential.hpp"

namespace curvmeas {

namespace {

void append_unique(std::vector<Vec>& out, const Vec& p, double tol) {
  for (const Vec& q : out)
    if ((q - p).norm() <= tol) return;
  out.push_back(p);
}

// The circle/sphere as a closed set (thin shell, not the solid ball).
class SphereShellShape final : public Shape {
 public:
  SphereShellShape(Vec c, double R) : c_(std::move(c)), R_(R) {}
  int dim() const override { return static_cast<int>(c_.size()); }
  std::string type_name() const override { return "sphere_shell"; }
  double distance(const Vec& x) const override {
    return std::abs((x - c_).norm() - R_);
  }
  void nearest(const Vec& x, double tol, std::vector<Vec>& out) const override {
    double s = (x - c_).norm();
    if (s <= 1e-12 * R_) {
      for (int i = 0; i < dim(); ++i)
        for (int sgn : {-1, 1}) {
          Vec f = c_;
          f[i] += sgn * R_;
          append_unique(out, f, tol);
        }
      return;
    }
    append_unique(out, Vec(c_ + (R_ / s) * (x - c_)), tol);
  }
  void support_box(Vec& lo, Vec& hi) const override {
    lo = c_.array() - R_;
    hi = c_.array() + R_;
  }

 private:
  Vec c_;
  double R_;
};

class TorusShellShape final : public Shape {
 public:
  TorusShellShape(double R0, double r0) : R0_(R0), r0_(r0) {}
  int dim() const override { return 3; }
  std::string type_name() const override { return "torus_shell"; }
  double distance(const Vec& x) const override {
    double ax = std::hypot(x[0], x[1]);
    return std::abs(std::hypot(ax - R0_, x[2]) - r0_);
  }
  void nearest(const Vec& x, double tol, std::vector<Vec>& out) const override {
    double ax = std::hypot(x[0], x[1]);
    if (ax <= 1e-12 * R0_) {
      // on the symmetry axis: a full ring of feet; emit four markers
      for (double phi : {0.0, M_PI / 2, M_PI, 3 * M_PI / 2}) {
        Vec ring = make_vec({R0_ * std::cos(phi), R0_ * std::sin(phi), 0.0});
        Vec d = Vec(x) - ring;
        double dn = d.norm();
        append_unique(out, Vec(ring + (dn > 0 ? r0_ / dn : 0.0) * d), tol);
      }
      return;
    }
    Vec ring = make_vec({R0_ * x[0] / ax, R0_ * x[1] / ax, 0.0});
    Vec d = Vec(x) - ring;
    double dn = d.norm();
    if (dn <= 1e-12 * r0_) {
      // on the core ring: the whole tube section is nearest
      Vec er = ring / R0_;
      Vec ez = make_vec({0, 0, 1});
      for (double t : {0.0, M_PI / 2, M_PI, 3 * M_PI / 2})
        append_unique(out, Vec(ring + r0_ * (std::cos(t) * er + std::sin(t) * ez)), tol);
      return;
    }
    append_unique(out, Vec(ring + (r0_ / dn) * d), tol);
  }
  void support_box(Vec& lo, Vec& hi) const override {
    lo = make_vec({-(R0_ + r0_), -(R0_ + r0_), -r0_});
    hi = make_vec({R0_ + r0_, R0_ + r0_, r0_});
  }

 private:
  double R0_, r0_;
};

// Ellipse curve (a cos t, b sin t). The foot point is found by a dense
// parameter scan refined to machine precision, so the distance oracle is
// exact for differencing purposes.
class EllipseCurveShape final : public Shape {
 public:
  EllipseCurveShape(double a, double b) : a_(a), b_(b) {}
  int dim() const override { return 2; }
  std::string type_name() const override { return "ellipse_curve"; }
  double distance(const Vec& x) const override {
    std::vector<Vec> feet;
    feet_of(x, feet, 1e-9);
    return (x - feet[0]).norm();
  }
  void nearest(const Vec& x, double tol, std::vector<Vec>& out) const override {
    std::vector<Vec> feet;
    feet_of(x, feet, tol);
    for (const Vec& f : feet) append_unique(out, f, tol);
  }
  void support_box(Vec& lo, Vec& hi) const override {
    lo = make_vec({-a_, -b_});
    hi = make_vec({a_, b_});
  }

 private:
  Vec at(double t) const { return make_vec({a_ * std::cos(t), b_ * std::sin(t)}); }

  void feet_of(const Vec& x, std::vector<Vec>& feet, double tol) const {
    constexpr int kScan = 1024;
    auto d2 = [&](double t) { return (x - at(t)).squaredNorm(); };
    // local minima brackets over the periodic scan
    std::vector<double> vals(kScan);
    for (int i = 0; i < kScan; ++i) vals[i] = d2(2 * M_PI * i / kScan);
    std::vector<std::pair<double, double>> mins;  // (refined t, value)
    for (int i = 0; i < kScan; ++i) {
      double prev = vals[(i + kScan - 1) % kScan];
      double next = vals[(i + 1) % kScan];
      if (vals[i] <= prev && vals[i] <= next) {
        double lo = 2 * M_PI * (i - 1) / kScan, hi = 2 * M_PI * (i + 1) / kScan;
        const double gr = (std::sqrt(5.0) - 1) / 2;
        double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
        double fc = d2(c), fd = d2(d);
        for (int it = 0; it < 40; ++it) {
          if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = d2(c);
          } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = d2(d);
          }
        }
        double t = 0.5 * (lo + hi);
        // Newton on the stationarity equation (p(t)-x).p'(t) = 0 takes the
        // foot to machine precision, which the differencing kernel needs.
        for (int it = 0; it < 12; ++it) {
          double s = std::sin(t), cs = std::cos(t);
          Vec p = at(t);
          Vec dp = make_vec({-a_ * s, b_ * cs});
          Vec ddp = make_vec({-a_ * cs, -b_ * s});
          double g = (p - x).dot(dp);
          double gp = dp.squaredNorm() + (p - x).dot(ddp);
          if (gp <= 0) break;
          double t_next = t - g / gp;
          if (std::abs(t_next - t) < 1e-16) {
            t = t_next;
            break;
          }
          t = t_next;
        }
        mins.emplace_back(t, d2(t));
      }
    }
    double best = kInfinity;
    for (auto& m : mins) best = std::min(best, m.second);
    for (auto& m : mins)
      if (std::sqrt(m.second) <= std::sqrt(best) + tol) feet.push_back(at(m.first));
  }

  double a_, b_;
};

}  // namespace

SmoothSurface::SmoothSurface(Kind k, Vec c, double p1, double p2)
    : kind_(k), c_(std::move(c)), p1_(p1), p2_(p2) {
  std::shared_ptr<const Shape> shape;
  switch (kind_) {
    case Kind::Circle:
    case Kind::Sphere:
      shape = std::make_shared<SphereShellShape>(c_, p1_);
      break;
    case Kind::Ellipse:
      shape = std::make_shared<EllipseCurveShape>(p1_, p2_);
      break;
    case Kind::Torus:
      shape = std::make_shared<TorusShellShape>(p1_, p2_);
      break;
  }
  scene_ = std::make_shared<Scene>(
      shape->dim(), std::vector<std::shared_ptr<const Shape>>{shape}, 2.0);
}

SmoothSurface SmoothSurface::circle(const Vec& c, double R) {
  return SmoothSurface(Kind::Circle, c, R, 0);
}
SmoothSurface SmoothSurface::sphere(const Vec& c, double R) {
  return SmoothSurface(Kind::Sphere, c, R, 0);
}
SmoothSurface SmoothSurface::ellipse(double ax, double by) {
  return SmoothSurface(Kind::Ellipse, make_vec({0, 0}), ax, by);
}
SmoothSurface SmoothSurface::torus(double R0, double r0) {
  return SmoothSurface(Kind::Torus, make_vec({0, 0, 0}), R0, r0);
}

int SmoothSurface::dim() const { return scene_->dim(); }

int SmoothSurface::manifold_dim() const { return dim() - 1; }

double SmoothSurface::manifold_distance(const Vec& a) const {
  return scene_->delta(a);
}

Vec SmoothSurface::unit_normal(const Vec& a) const {
  switch (kind_) {
    case Kind::Circle:
    case Kind::Sphere: {
      Vec v = a - c_;
      return v / v.norm();
    }
    case Kind::Ellipse: {
      // gradient of (x/a)^2 + (y/b)^2
      Vec g = make_vec({a[0] / (p1_ * p1_), a[1] / (p2_ * p2_)});
      return g / g.norm();
    }
    case Kind::Torus: {
      double ax = std::hypot(a[0], a[1]);
      Vec ring = make_vec({p1_ * a[0] / ax, p1_ * a[1] / ax, 0.0});
      Vec v = Vec(a) - ring;
      return v / v.norm();
    }
  }
  throw Unsupported("unit_normal");
}

Mat SmoothSurface::tangent_basis(const Vec& a) const {
  return perp_basis(unit_normal(a));
}

Mat SmoothSurface::b_dot_u(const Vec& a, const Vec& u) const {
  const Vec n = unit_normal(a);
  const double sgn = u.dot(n) >= 0 ? 1.0 : -1.0;  // u = sgn * n
  Mat basis = tangent_basis(a);
  const int m = static_cast<int>(basis.cols());
  Mat out(m, m);
  switch (kind_) {
    case Kind::Circle:
    case Kind::Sphere: {
      // b_M . n_out = -(1/R) I on the tangent space
      out = -(sgn / p1_) * Mat::Identity(m, m);
      break;
    }
    case Kind::Ellipse: {
      double t = std::atan2(a[1] / p2_, a[0] / p1_);
      double s = std::sin(t), c = std::cos(t);
      double curv = p1_ * p2_ /
                    std::pow(p1_ * p1_ * s * s + p2_ * p2_ * c * c, 1.5);
      out = -(sgn * curv) * Mat::Identity(1, 1);
      break;
    }
    case Kind::Torus: {
      double ax = std::hypot(a[0], a[1]);
      Vec er = make_vec({a[0] / ax, a[1] / ax, 0.0});
      Vec nout = unit_normal(a);
      double cphi = nout.dot(er);  // cos of the poloidal angle
      // principal directions: poloidal (curvature 1/r0) and toroidal
      // (curvature cphi / (R0 + r0 cphi)), both w.r.t. the outward normal
      Vec etor = make_vec({-er[1], er[0], 0.0});
      Vec epol(3);
      epol << nout[1] * etor[2] - nout[2] * etor[1],
          nout[2] * etor[0] - nout[0] * etor[2],
          nout[0] * etor[1] - nout[1] * etor[0];
      double k_pol = 1.0 / p2_;
      double k_tor = cphi / (p1_ + p2_ * cphi);
      Mat amb = -sgn * (k_pol * epol * epol.transpose() +
                        k_tor * etor * etor.transpose());
      out = basis.transpose() * amb * basis;
      break;
    }
  }
  return out;
}

SmoothCompareResult compare_with_smooth(const SmoothSurface& smooth, const Vec& a,
                                        const Vec& u, double r_eval,
                                        const Tolerances& tols) {
  if (smooth.manifold_distance(a) > 1e-9)
    throw NotOnManifold("compare_with_smooth: base point off the surface");
  Vec n = smooth.unit_normal(a);
  if (std::abs(std::abs(u.dot(n)) - 1.0) > 1e-9)
    throw NotOnManifold("compare_with_smooth: u is not normal to the surface");

  SmoothCompareResult res;
  res.data = curvature_at(smooth.scene(), a, u, r_eval, tols);
  res.kappa = res.data.kappa;

  Mat bm = smooth.tangent_basis(a);
  Mat b = smooth.b_dot_u(a, u);
  // compare as ambient symmetric forms restricted to T_A(a,u)
  Mat b_amb = bm * b * bm.transpose();
  Mat b_in_ta = res.data.T_basis.transpose() * b_amb * res.data.T_basis;
  res.q_residual = (res.data.Q + b_in_ta).norm();

  // largest principal angle between T_A(a,u) and Tan(M,a)
  if (res.data.m > 0) {
    Eigen::JacobiSVD<Mat> svd(bm.transpose() * res.data.T_basis);
    double smin = svd.singularValues().minCoeff();
    res.tangent_angle = std::acos(std::clamp(smin, 0.0, 1.0));
  } else {
    res.tangent_angle = 0.0;
  }
  return res;
}

}  // namespace curvmeas
