#include "curvmeas/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "curvmeas/rng.hpp"

namespace curvmeas {

namespace {

using nlohmann::json;

constexpr double kUnitNormTol = 1e-12;

Vec perp2(const Vec& v) {
  Vec w(2);
  w << -v[1], v[0];
  return w;
}

// Orthonormal basis of the plane perpendicular to a unit vector (dim 3).
void perp_basis3(const Vec& u, Vec& e1, Vec& e2) {
  Vec t = Vec::Zero(3);
  int k = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(u[i]) < std::abs(u[k])) k = i;
  t[k] = 1.0;
  e1 = t - u * u.dot(t);
  e1.normalize();
  e2 = Vec(3);
  e2 << u[1] * e1[2] - u[2] * e1[1], u[2] * e1[0] - u[0] * e1[2],
      u[0] * e1[1] - u[1] * e1[0];
}

void append_dedup(std::vector<Vec>& out, const Vec& p, double tol) {
  for (const Vec& q : out)
    if ((q - p).norm() <= tol) return;
  out.push_back(p);
}

// Midpoint nodes of the circular arc of directions
//   v(t) = cos(t) e1 + sin(t) e2,  t in [t0, t1],
// with H^1 weights. Used for normal fans at corners/edges.
void arc_fiber(const Vec& e1, const Vec& e2, double t0, double t1, int count,
               std::vector<Vec>& dirs, std::vector<double>& w) {
  const double len = t1 - t0;
  for (int k = 0; k < count; ++k) {
    double t = t0 + (k + 0.5) * len / count;
    dirs.push_back(std::cos(t) * e1 + std::sin(t) * e2);
    w.push_back(len / count);
  }
}

// Midpoint cells of a spherical patch in (cos(theta), phi) coordinates of the
// frame {pole, e1, e2}; the area element d(cos theta) d(phi) is exact.
void spherical_patch_fiber(const Vec& pole, const Vec& e1, const Vec& e2,
                           double c0, double c1, double p0, double p1,
                           int nc, int np, std::vector<Vec>& dirs,
                           std::vector<double>& w) {
  const double wcell = (c1 - c0) / nc * (p1 - p0) / np;
  for (int i = 0; i < nc; ++i) {
    double c = c0 + (i + 0.5) * (c1 - c0) / nc;
    double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (int j = 0; j < np; ++j) {
      double phi = p0 + (j + 0.5) * (p1 - p0) / np;
      dirs.push_back(c * pole + s * (std::cos(phi) * e1 + std::sin(phi) * e2));
      w.push_back(wcell);
    }
  }
}

class PointShape final : public Shape {
 public:
  explicit PointShape(Vec c) : c_(std::move(c)) {}
  int dim() const override { return static_cast<int>(c_.size()); }
  std::string type_name() const override { return "point"; }
  double distance(const Vec& x) const override { return (x - c_).norm(); }
  void nearest(const Vec& x, double tol, std::vector<Vec>& out) const override {
    (void)x;
    append_dedup(out, c_, tol);
  }
  void support_box(Vec& lo, Vec& hi) const override { lo = c_; hi = c_; }
  void stratum_samples(int m, int density,
                       std::vector<StratumSample>& out) const override {
    if (m != 0) return;
    StratumSample s;
    s.z = c_;
    s.w_base = 1.0;
    s.m = 0;
    if (dim() == 2) {
      Vec e1 = make_vec({1, 0}), e2 = make_vec({0, 1});
      arc_fiber(e1, e2, 0, 2 * M_PI, std::max(8, density), s.fiber_dirs, s.fiber_w);
    } else {
      Vec pole = make_vec({0, 0, 1}), e1 = make_vec({1, 0, 0}), e2 = make_vec({0, 1, 0});
      int k = std::max(4, density / 2);
      spherical_patch_fiber(pole, e1, e2, -1, 1, 0, 2 * M_PI, k, 2 * k,
                            s.fiber_dirs, s.fiber_w);
    }
    out.push_back(std::move(s));
  }

 private:
  Vec c_;
};

class PointCloudShape final : public Shape {
 public:
  explicit PointCloudShape(std::vector<Vec> pts) : pts_(std::move(pts)) {
    if (pts_.empty()) throw SceneFormat("point_cloud: empty point list");
  }
  int dim() const override { return static_cast<int>(pts_[0].size()); }
  std::string type_name() const override { return "point_cloud"; }
  double distance(const Vec& x) const override {
    double d = kInfinity;
    for (const Vec& p : pts_) d = std::min(d, (x - p).norm());
    return d;
  }
  void nearest(const Vec& x, double tol, std::vector<Vec>& out) const override {
    double d = distance(x);
    for (const Vec& p : pts_)
      if ((x - p).norm() <= d + tol) append_dedup(out, p, tol);
  }
  void support_box(Vec& lo, Vec& hi) const override {
    lo = pts_[0];
    hi = pts_[0];
    for (const Vec& p : pts_) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  }
  void stratum_samples(int m, int density,
                       std::vector<StratumSample>& out) const override {
    if (m != 0) return;
    for (const Vec& p : pts_) {
      PointShape single(p);
      single.stratum_samples(0, density, out);
    }
  }

 private:
  std::vector<Vec> pts_;
};

class SegmentShape final : public Shape {
 public:
  SegmentShape(Vec p, Vec q) : p_(std::move(p)), q_(std::move(q)) {
    len_ = (q_ - p_).norm();
    if (len_ <= 0) throw SceneFormat("segment: endpoints coincide");
    d_ = (q_ - p_) / len_;
  }
  int dim() const override { return static_cast<int>(p_.size()); }
  std::string type_name() const override { return "segment"; }
  double distance(const Vec& x) const override { return (x - foot(x)).norm(); }
  void nearest(const Vec& x, double tol, std::vector<Vec>& out) const override {
    append_dedup(out, foot(x), tol);
  }
  void support_box(Vec& lo, Vec& hi) const override {
    lo = p_.cwiseMin(q_);
    hi = p_.cwiseMax(q_);
  }
  void stratum_samples(int m, int density,
                       std::vector<StratumSample>& out) const override {
    const int n = dim();
    if (m == 1) {
      int K = std::max(8, density);
      for (int k = 0; k < K; ++k) {
        StratumSample s;
        s.z = p_ + ((k + 0.5) / K) * (q_ - p_);
        s.w_base = len_ / K;
        s.m = 1;
        if (n == 2) {
          Vec nrm = perp2(d_);
          s.fiber_dirs = {nrm, Vec(-nrm)};
          s.fiber_w = {1.0, 1.0};
        } else {
          Vec e1, e2;
          perp_basis3(d_, e1, e2);
          arc_fiber(e1, e2, 0, 2 * M_PI, std::max(16, density / 8), s.fiber_dirs,
                    s.fiber_w);
        }
        out.push_back(std::move(s));
      }
    } else if (m == 0) {
      for (int end = 0; end < 2; ++end) {
        // Inward tangent at this endpoint; the fan is {v : v . din <= 0}.
        Vec z = end == 0 ? p_ : q_;
        Vec din = end == 0 ? Vec(d_) : Vec(-d_);
        StratumSample s;
        s.z = z;
        s.w_base = 1.0;
        s.m = 0;
        if (n == 2) {
          Vec e1 = -din;          // center of the fan
          Vec e2 = perp2(e1);
          arc_fiber(e1, e2, -M_PI / 2, M_PI / 2, std::max(16, density / 4),
                    s.fiber_dirs, s.fiber_w);
        } else {
          Vec e1, e2;
          perp_basis3(din, e1, e2);
          int k = std::max(8, density / 8);
          spherical_patch_fiber(-din, e1, e2, 0, 1, 0, 2 * M_PI, k, 2 * k,
                                s.fiber_dirs, s.fiber_w);
        }
        out.push_back(std::move(s));
      }
    }
  }

 private:
  Vec foot(const Vec& x) const {
    double t = std::clamp((x - p_).dot(d_), 0.0, len_);
    return p_ + t * d_;
  }
  Vec p_, q_, d_;
  double len_;
};

class BallShape final : public Shape {
 public:
  BallShape(Vec c, double R, bool complement)
      : c_(std::move(c)), R_(R), complement_(complement) {
    if (R_ <= 0) throw SceneFormat(type_name() + ": R must be positive");
  }
  int dim() const override { return static_cast<int>(c_.size()); }
  std::string type_name() const override {
    return complement_ ? "ball_complement" : "ball";
  }
  double distance(const Vec& x) const override {
    double s = (x - c_).norm();
    return complement_ ? std::max(0.0, R_ - s) : std::max(0.0, s - R_);
  }
  void nearest(const Vec& x, double tol, std::vector<Vec>& out) const override {
    double s = (x - c_).norm();
    if ((complement_ && s >= R_) || (!complement_ && s <= R_)) {
      append_dedup(out, x, tol);
      return;
    }
    if (complement_ && s <= 1e-12 * R_) {
      // Center of the complement: the whole sphere is nearest. Emit the
      // 2n axis feet, enough to signal multivaluedness.
      for (int i = 0; i < dim(); ++i)
        for (int sgn : {-1, 1}) {
          Vec f = c_;
          f[i] += sgn * R_;
          append_dedup(out, f, tol);
        }
      return;
    }
    append_dedup(out, Vec(c_ + (R_ / s) * (x - c_)), tol);
  }
  void support_box(Vec& lo, Vec& hi) const override {
    lo = c_.array() - R_;
    hi = c_.array() + R_;
  }
  void stratum_samples(int m, int density,
                       std::vector<StratumSample>& out) const override {
    const int n = dim();
    if (m != n - 1) return;
    const double sign = complement_ ? -1.0 : 1.0;
    if (n == 2) {
      int K = std::max(16, density);
      for (int k = 0; k < K; ++k) {
        double t = (k + 0.5) * 2 * M_PI / K;
        Vec u = make_vec({std::cos(t), std::sin(t)});
        StratumSample s;
        s.z = c_ + R_ * u;
        s.w_base = 2 * M_PI * R_ / K;
        s.m = 1;
        s.fiber_dirs = {Vec(sign * u)};
        s.fiber_w = {1.0};
        out.push_back(std::move(s));
      }
    } else {
      int K = std::max(8, density / 4);
      for (int i = 0; i < K; ++i) {
        double cth = -1.0 + (i + 0.5) * 2.0 / K;
        double sth = std::sqrt(std::max(0.0, 1 - cth * cth));
        for (int j = 0; j < 2 * K; ++j) {
          double phi = (j + 0.5) * M_PI / K;
          Vec u = make_vec(
              {sth * std::cos(phi), sth * std::sin(phi), cth});
          StratumSample s;
          s.z = c_ + R_ * u;
          s.w_base = R_ * R_ * (2.0 / K) * (M_PI / K);
          s.m = 2;
          s.fiber_dirs = {Vec(sign * u)};
          s.fiber_w = {1.0};
          out.push_back(std::move(s));
        }
      }
    }
  }

 private:
  Vec c_;
  double R_;
  bool complement_;
};

class AxisBoxShape final : public Shape {
 public:
  AxisBoxShape(Vec lo, Vec hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    for (int i = 0; i < dim(); ++i)
      if (!(lo_[i] < hi_[i]))
        throw SceneFormat("axis_box: lo must be strictly below hi componentwise");
  }
  int dim() const override { return static_cast<int>(lo_.size()); }
  std::string type_name() const override { return "axis_box"; }
  double distance(const Vec& x) const override {
    double s2 = 0;
    for (int i = 0; i < dim(); ++i) {
      double d = std::max({lo_[i] - x[i], 0.0, x[i] - hi_[i]});
      s2 += d * d;
    }
    return std::sqrt(s2);
  }
  void nearest(const Vec& x, double tol, std::vector<Vec>& out) const override {
    append_dedup(out, Vec(x.cwiseMax(lo_).cwiseMin(hi_)), tol);
  }
  void support_box(Vec& lo, Vec& hi) const override { lo = lo_; hi = hi_; }
  void stratum_samples(int m, int density,
                       std::vector<StratumSample>& out) const override {
    if (dim() == 2) {
      samples2(m, density, out);
    } else {
      samples3(m, density, out);
    }
  }

 private:
  void samples2(int m, int density, std::vector<StratumSample>& out) const {
    if (m == 1) {
      // Four edges; fiber is the single outward normal.
      for (int ax = 0; ax < 2; ++ax)
        for (int side = 0; side < 2; ++side) {
          Vec nrm = Vec::Zero(2);
          nrm[ax] = side == 0 ? -1.0 : 1.0;
          int other = 1 - ax;
          double len = hi_[other] - lo_[other];
          int K = std::max(8, density);
          for (int k = 0; k < K; ++k) {
            StratumSample s;
            s.z = Vec(2);
            s.z[ax] = side == 0 ? lo_[ax] : hi_[ax];
            s.z[other] = lo_[other] + (k + 0.5) * len / K;
            s.w_base = len / K;
            s.m = 1;
            s.fiber_dirs = {nrm};
            s.fiber_w = {1.0};
            out.push_back(std::move(s));
          }
        }
    } else if (m == 0) {
      for (int sx = 0; sx < 2; ++sx)
        for (int sy = 0; sy < 2; ++sy) {
          StratumSample s;
          s.z = make_vec({sx ? hi_[0] : lo_[0], sy ? hi_[1] : lo_[1]});
          s.w_base = 1.0;
          s.m = 0;
          Vec n1 = make_vec({sx ? 1.0 : -1.0, 0.0});
          Vec n2 = make_vec({0.0, sy ? 1.0 : -1.0});
          arc_fiber(n1, n2, 0, M_PI / 2, std::max(16, density / 4),
                    s.fiber_dirs, s.fiber_w);
          out.push_back(std::move(s));
        }
    }
  }

  void samples3(int m, int density, std::vector<StratumSample>& out) const {
    if (m == 2) {
      for (int ax = 0; ax < 3; ++ax)
        for (int side = 0; side < 2; ++side) {
          Vec nrm = Vec::Zero(3);
          nrm[ax] = side == 0 ? -1.0 : 1.0;
          int a1 = (ax + 1) % 3, a2 = (ax + 2) % 3;
          int K = std::max(8, density / 4);
          for (int i = 0; i < K; ++i)
            for (int j = 0; j < K; ++j) {
              StratumSample s;
              s.z = Vec(3);
              s.z[ax] = side == 0 ? lo_[ax] : hi_[ax];
              s.z[a1] = lo_[a1] + (i + 0.5) * (hi_[a1] - lo_[a1]) / K;
              s.z[a2] = lo_[a2] + (j + 0.5) * (hi_[a2] - lo_[a2]) / K;
              s.w_base = (hi_[a1] - lo_[a1]) * (hi_[a2] - lo_[a2]) / (K * K);
              s.m = 2;
              s.fiber_dirs = {nrm};
              s.fiber_w = {1.0};
              out.push_back(std::move(s));
            }
        }
    } else if (m == 1) {
      // Twelve edges; fiber is the quarter arc between adjacent face normals.
      for (int ax = 0; ax < 3; ++ax) {
        int a1 = (ax + 1) % 3, a2 = (ax + 2) % 3;
        for (int s1 = 0; s1 < 2; ++s1)
          for (int s2 = 0; s2 < 2; ++s2) {
            Vec n1 = Vec::Zero(3), n2 = Vec::Zero(3);
            n1[a1] = s1 ? 1.0 : -1.0;
            n2[a2] = s2 ? 1.0 : -1.0;
            int K = std::max(8, density / 2);
            for (int k = 0; k < K; ++k) {
              StratumSample s;
              s.z = Vec(3);
              s.z[ax] = lo_[ax] + (k + 0.5) * (hi_[ax] - lo_[ax]) / K;
              s.z[a1] = s1 ? hi_[a1] : lo_[a1];
              s.z[a2] = s2 ? hi_[a2] : lo_[a2];
              s.w_base = (hi_[ax] - lo_[ax]) / K;
              s.m = 1;
              arc_fiber(n1, n2, 0, M_PI / 2, std::max(8, density / 8),
                        s.fiber_dirs, s.fiber_w);
              out.push_back(std::move(s));
            }
          }
      }
    } else if (m == 0) {
      for (int sx = 0; sx < 2; ++sx)
        for (int sy = 0; sy < 2; ++sy)
          for (int sz = 0; sz < 2; ++sz) {
            StratumSample s;
            s.z = make_vec({sx ? hi_[0] : lo_[0], sy ? hi_[1] : lo_[1],
                            sz ? hi_[2] : lo_[2]});
            s.w_base = 1.0;
            s.m = 0;
            Vec pole = make_vec({0.0, 0.0, sz ? 1.0 : -1.0});
            Vec e1 = make_vec({sx ? 1.0 : -1.0, 0.0, 0.0});
            Vec e2 = make_vec({0.0, sy ? 1.0 : -1.0, 0.0});
            int k = std::max(8, density / 8);
            spherical_patch_fiber(pole, e1, e2, 0, 1, 0, M_PI / 2, k, k,
                                  s.fiber_dirs, s.fiber_w);
            out.push_back(std::move(s));
          }
    }
  }

  Vec lo_, hi_;
};

class ConvexPolytopeShape final : public Shape {
 public:
  explicit ConvexPolytopeShape(std::vector<Halfspace> hs) : hs_(std::move(hs)) {
    if (hs_.empty()) throw SceneFormat("convex_polytope: no halfspaces");
    n_ = static_cast<int>(hs_[0].normal.size());
    for (const Halfspace& h : hs_) {
      if (static_cast<int>(h.normal.size()) != n_)
        throw SceneFormat("convex_polytope: mixed dimensions");
      if (std::abs(h.normal.norm() - 1.0) > kUnitNormTol)
        throw SceneFormat("convex_polytope: halfspace normals must be unit vectors");
    }
    enumerate_vertices();
    if (vertices_.empty())
      throw SceneFormat("convex_polytope: empty polytope");
    check_bounded();
  }

  int dim() const override { return n_; }
  std::string type_name() const override { return "convex_polytope"; }

  double distance(const Vec& x) const override {
    if (inside(x, 0.0)) return 0.0;
    Vec best;
    return project(x, best);
  }

  void nearest(const Vec& x, double tol, std::vector<Vec>& out) const override {
    if (inside(x, 0.0)) {
      append_dedup(out, x, tol);
      return;
    }
    Vec best;
    project(x, best);
    append_dedup(out, best, tol);
  }

  void support_box(Vec& lo, Vec& hi) const override {
    lo = vertices_[0];
    hi = vertices_[0];
    for (const Vec& v : vertices_) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
  }

  void stratum_samples(int m, int density,
                       std::vector<StratumSample>& out) const override {
    if (n_ != 2) return;  // exact parametrization implemented for dim 2 only
    if (m == 1) {
      for (const Edge& e : edges_) {
        double len = (e.b - e.a).norm();
        if (len <= 0) continue;
        int K = std::max(8, density);
        for (int k = 0; k < K; ++k) {
          StratumSample s;
          s.z = e.a + ((k + 0.5) / K) * (e.b - e.a);
          s.w_base = len / K;
          s.m = 1;
          s.fiber_dirs = {hs_[e.facet].normal};
          s.fiber_w = {1.0};
          out.push_back(std::move(s));
        }
      }
    } else if (m == 0) {
      for (const Corner& c : corners_) {
        StratumSample s;
        s.z = c.v;
        s.w_base = 1.0;
        s.m = 0;
        Vec e1 = c.n1;
        double span = std::atan2(e1[0] * c.n2[1] - e1[1] * c.n2[0], e1.dot(c.n2));
        if (span < 0) span += 2 * M_PI;
        arc_fiber(e1, perp2(e1), 0, span, std::max(16, density / 4),
                  s.fiber_dirs, s.fiber_w);
        out.push_back(std::move(s));
      }
    }
  }

 private:
  struct Edge {
    Vec a, b;
    int facet;
  };
  struct Corner {
    Vec v;
    Vec n1, n2;  // normal cone spans from n1 to n2 counterclockwise
  };

  bool inside(const Vec& x, double slack) const {
    for (const Halfspace& h : hs_)
      if (h.normal.dot(x) > h.offset + slack) return false;
    return true;
  }

  // Projects onto the polytope by enumerating faces (subsets of active
  // constraints of size 1..n); exact at this dimension.
  double project(const Vec& x, Vec& best) const {
    const int m = static_cast<int>(hs_.size());
    double bestd = kInfinity;
    const double feas = 1e-10 * (1.0 + x.norm());
    std::vector<int> idx;
    auto consider = [&](const Vec& p) {
      if (!inside(p, feas)) return;
      double d = (x - p).norm();
      if (d < bestd) {
        bestd = d;
        best = p;
      }
    };
    // size-1 faces (facets)
    for (int i = 0; i < m; ++i) {
      double over = hs_[i].normal.dot(x) - hs_[i].offset;
      consider(Vec(x - over * hs_[i].normal));
    }
    // size-2 faces
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        Mat N(n_, 2);
        N.col(0) = hs_[i].normal;
        N.col(1) = hs_[j].normal;
        Mat G = N.transpose() * N;
        if (std::abs(G.determinant()) < 1e-14) continue;
        Vec rhs(2);
        rhs << hs_[i].normal.dot(x) - hs_[i].offset,
            hs_[j].normal.dot(x) - hs_[j].offset;
        consider(Vec(x - N * G.ldlt().solve(rhs)));
      }
    if (n_ == 3) {
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
          for (int k = j + 1; k < m; ++k) {
            Mat N(3, 3);
            N.col(0) = hs_[i].normal;
            N.col(1) = hs_[j].normal;
            N.col(2) = hs_[k].normal;
            if (std::abs(N.determinant()) < 1e-14) continue;
            Vec rhs(3);
            rhs << hs_[i].offset, hs_[j].offset, hs_[k].offset;
            consider(N.transpose().fullPivLu().solve(rhs));
          }
    }
    return bestd;
  }

  void enumerate_vertices() {
    const int m = static_cast<int>(hs_.size());
    const double feas = 1e-9;
    auto add_vertex = [&](const Vec& v, const std::vector<int>& act) {
      for (const Vec& w : vertices_)
        if ((w - v).norm() < 1e-9) return;
      vertices_.push_back(v);
      if (n_ == 2 && act.size() == 2) {
        // orient the normal cone counterclockwise
        const Vec& na = hs_[act[0]].normal;
        const Vec& nb = hs_[act[1]].normal;
        double cross = na[0] * nb[1] - na[1] * nb[0];
        Corner c;
        c.v = v;
        c.n1 = cross >= 0 ? na : nb;
        c.n2 = cross >= 0 ? nb : na;
        corners_.push_back(c);
      }
    };
    if (n_ == 2) {
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
          Mat N(2, 2);
          N.row(0) = hs_[i].normal.transpose();
          N.row(1) = hs_[j].normal.transpose();
          if (std::abs(N.determinant()) < 1e-12) continue;
          Vec b(2);
          b << hs_[i].offset, hs_[j].offset;
          Vec v = N.fullPivLu().solve(b);
          if (inside(v, feas)) add_vertex(v, {i, j});
        }
      // facet edges from pairs of vertices active on the same constraint
      for (int i = 0; i < m; ++i) {
        std::vector<Vec> on;
        for (const Vec& v : vertices_)
          if (std::abs(hs_[i].normal.dot(v) - hs_[i].offset) < 1e-9)
            on.push_back(v);
        if (on.size() < 2) continue;
        Vec t = perp2(hs_[i].normal);
        std::sort(on.begin(), on.end(),
                  [&](const Vec& a, const Vec& b) { return t.dot(a) < t.dot(b); });
        edges_.push_back({on.front(), on.back(), i});
      }
    } else {
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
          for (int k = j + 1; k < m; ++k) {
            Mat N(3, 3);
            N.row(0) = hs_[i].normal.transpose();
            N.row(1) = hs_[j].normal.transpose();
            N.row(2) = hs_[k].normal.transpose();
            if (std::abs(N.determinant()) < 1e-12) continue;
            Vec b(3);
            b << hs_[i].offset, hs_[j].offset, hs_[k].offset;
            Vec v = N.fullPivLu().solve(b);
            if (inside(v, feas)) add_vertex(v, {i, j, k});
          }
    }
  }

  void check_bounded() const {
    // Bounded iff the recession cone {v : n_i . v <= 0 for all i} is trivial.
    if (n_ == 2) {
      std::vector<double> ang;
      for (const Halfspace& h : hs_) ang.push_back(std::atan2(h.normal[1], h.normal[0]));
      std::sort(ang.begin(), ang.end());
      for (std::size_t i = 0; i < ang.size(); ++i) {
        double next = i + 1 < ang.size() ? ang[i + 1] : ang[0] + 2 * M_PI;
        if (next - ang[i] >= M_PI - 1e-12)
          throw SceneFormat("convex_polytope: unbounded (normals fit a halfplane)");
      }
    } else {
      for (const Vec& v : unit_directions(3, 4096, 12345)) {
        bool recession = true;
        for (const Halfspace& h : hs_)
          if (h.normal.dot(v) > 1e-10) {
            recession = false;
            break;
          }
        if (recession) throw SceneFormat("convex_polytope: unbounded");
      }
    }
  }

  std::vector<Halfspace> hs_;
  int n_;
  std::vector<Vec> vertices_;
  std::vector<Edge> edges_;
  std::vector<Corner> corners_;
};

Vec parse_vec(const json& j, int expect_dim, const std::string& what) {
  if (!j.is_array() || (expect_dim > 0 && static_cast<int>(j.size()) != expect_dim))
    throw SceneFormat(what + ": expected an array of " +
                      std::to_string(expect_dim) + " numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw SceneFormat(what + ": non-numeric entry");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw SceneFormat(where + ": unknown field \"" + it.key() + "\"");
}

std::shared_ptr<const Shape> parse_shape(const json& j, int dim) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw SceneFormat("shape: missing \"type\"");
  const std::string type = j["type"].get<std::string>();
  if (type == "point") {
    reject_unknown(j, {"type", "c"}, "point");
    return make_point(parse_vec(j.at("c"), dim, "point.c"));
  }
  if (type == "point_cloud") {
    reject_unknown(j, {"type", "points"}, "point_cloud");
    std::vector<Vec> pts;
    for (const auto& p : j.at("points"))
      pts.push_back(parse_vec(p, dim, "point_cloud.points[]"));
    return make_point_cloud(pts);
  }
  if (type == "segment") {
    reject_unknown(j, {"type", "p", "q"}, "segment");
    return make_segment(parse_vec(j.at("p"), dim, "segment.p"),
                        parse_vec(j.at("q"), dim, "segment.q"));
  }
  if (type == "ball" || type == "ball_complement") {
    reject_unknown(j, {"type", "c", "R"}, type);
    if (!j.contains("R") || !j["R"].is_number())
      throw SceneFormat(type + ": missing numeric \"R\"");
    Vec c = parse_vec(j.at("c"), dim, type + ".c");
    double R = j["R"].get<double>();
    return type == "ball" ? make_ball(c, R) : make_ball_complement(c, R);
  }
  if (type == "axis_box") {
    reject_unknown(j, {"type", "lo", "hi"}, "axis_box");
    return make_axis_box(parse_vec(j.at("lo"), dim, "axis_box.lo"),
                         parse_vec(j.at("hi"), dim, "axis_box.hi"));
  }
  if (type == "convex_polytope") {
    reject_unknown(j, {"type", "halfspaces"}, "convex_polytope");
    std::vector<Halfspace> hs;
    for (const auto& h : j.at("halfspaces")) {
      reject_unknown(h, {"n", "b"}, "halfspace");
      if (!h.contains("b") || !h["b"].is_number())
        throw SceneFormat("halfspace: missing numeric \"b\"");
      hs.push_back({parse_vec(h.at("n"), dim, "halfspace.n"), h["b"].get<double>()});
    }
    return make_convex_polytope(hs);
  }
  throw SceneFormat("shape: unknown type \"" + type + "\"");
}

}  // namespace

std::shared_ptr<const Shape> make_point(const Vec& c) {
  return std::make_shared<PointShape>(c);
}
std::shared_ptr<const Shape> make_point_cloud(const std::vector<Vec>& pts) {
  return std::make_shared<PointCloudShape>(pts);
}
std::shared_ptr<const Shape> make_segment(const Vec& p, const Vec& q) {
  return std::make_shared<SegmentShape>(p, q);
}
std::shared_ptr<const Shape> make_ball(const Vec& c, double R) {
  return std::make_shared<BallShape>(c, R, false);
}
std::shared_ptr<const Shape> make_axis_box(const Vec& lo, const Vec& hi) {
  return std::make_shared<AxisBoxShape>(lo, hi);
}
std::shared_ptr<const Shape> make_convex_polytope(const std::vector<Halfspace>& hs) {
  return std::make_shared<ConvexPolytopeShape>(hs);
}
std::shared_ptr<const Shape> make_ball_complement(const Vec& c, double R) {
  return std::make_shared<BallShape>(c, R, true);
}

Scene::Scene(int dim, std::vector<std::shared_ptr<const Shape>> shapes,
             double bbox_margin)
    : dim_(dim), shapes_(std::move(shapes)), margin_(bbox_margin) {
  if (dim_ != 2 && dim_ != 3) throw SceneFormat("scene: dim must be 2 or 3");
  if (shapes_.empty()) throw SceneFormat("scene: needs at least one shape");
  if (margin_ <= 0) throw SceneFormat("scene: bbox_margin must be positive");
  lo_ = Vec::Constant(dim_, kInfinity);
  hi_ = Vec::Constant(dim_, -kInfinity);
  for (const auto& s : shapes_) {
    if (s->dim() != dim_)
      throw SceneFormat("scene: shape dimension mismatch (" + s->type_name() + ")");
    Vec slo, shi;
    s->support_box(slo, shi);
    lo_ = lo_.cwiseMin(slo);
    hi_ = hi_.cwiseMax(shi);
  }
  lo_ = lo_.array() - margin_;
  hi_ = hi_.array() + margin_;
}

void Scene::bbox(Vec& lo, Vec& hi) const {
  lo = lo_;
  hi = hi_;
}

double Scene::diameter() const { return (hi_ - lo_).norm(); }

double Scene::delta(const Vec& x) const {
  double d = kInfinity;
  for (const auto& s : shapes_) d = std::min(d, s->distance(x));
  return d;
}

std::vector<Vec> Scene::nearest_set(const Vec& x, double tol) const {
  const double d = delta(x);
  std::vector<Vec> out;
  for (const auto& s : shapes_)
    if (s->distance(x) <= d + tol) s->nearest(x, tol, out);
  // keep only feet within the global band, dedup at tol
  std::vector<Vec> filtered;
  for (const Vec& a : out)
    if ((x - a).norm() <= d + tol) {
      bool dup = false;
      for (const Vec& b : filtered)
        if ((a - b).norm() <= tol) {
          dup = true;
          break;
        }
      if (!dup) filtered.push_back(a);
    }
  return filtered;
}

std::optional<Vec> Scene::xi(const Vec& x, double tol) const {
  std::vector<Vec> feet = nearest_set(x, tol);
  if (feet.empty()) return std::nullopt;
  Vec best = feet[0];
  double bestd = (x - best).norm();
  for (const Vec& a : feet) {
    if ((a - best).norm() > tol) return std::nullopt;  // multivalued
    double d = (x - a).norm();
    if (d < bestd) {
      bestd = d;
      best = a;
    }
  }
  return best;
}

std::vector<StratumSample> Scene::stratum_samples(int m, int density) const {
  std::vector<StratumSample> out;
  for (const auto& s : shapes_) s->stratum_samples(m, density, out);
  return out;
}

Scene Scene::from_json_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // translate the byte offset into line:column
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SceneFormat(origin + ":" + std::to_string(line) + ":" +
                      std::to_string(col) + ": " + e.what());
  }
  if (!j.is_object()) throw SceneFormat(origin + ": top level must be an object");
  reject_unknown(j, {"dim", "shapes", "bbox_margin"}, "scene");
  if (!j.contains("dim") || !j["dim"].is_number_integer())
    throw SceneFormat(origin + ": missing integer \"dim\"");
  int dim = j["dim"].get<int>();
  if (!j.contains("shapes") || !j["shapes"].is_array() || j["shapes"].empty())
    throw SceneFormat(origin + ": \"shapes\" must be a nonempty array");
  double margin = 2.0;
  if (j.contains("bbox_margin")) {
    if (!j["bbox_margin"].is_number())
      throw SceneFormat(origin + ": \"bbox_margin\" must be a number");
    margin = j["bbox_margin"].get<double>();
  }
  std::vector<std::shared_ptr<const Shape>> shapes;
  for (const auto& sj : j["shapes"]) shapes.push_back(parse_shape(sj, dim));
  return Scene(dim, std::move(shapes), margin);
}

Scene Scene::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SceneFormat("cannot open scene file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str(), path);
}

bool Tolerances::set_by_name(const std::string& key, double value) {
  if (key == "proj") proj = value;
  else if (key == "ray") ray = value;
  else if (key == "diff") diff = value;
  else if (key == "step_factor") step_factor = value;
  else if (key == "rank") rank = value;
  else if (key == "sing") sing = value;
  else if (key == "t_max") t_max = value;
  else if (key == "s_max") s_max = value;
  else return false;
  return true;
}

}  // namespace curvmeas
