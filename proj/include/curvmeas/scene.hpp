#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "curvmeas/common.hpp"

namespace curvmeas {

// Exact quadrature sample of an m-dimensional stratum piece together
// with its fiber of unit normal directions. Fiber weights sum to the
// H^{n-1-m} measure of N(A,z) contributed by the owning shape.
struct StratumSample {
  Vec z;
  double w_base = 0.0;  // H^m weight of the base node
  int m = 0;            // stratum dimension of the piece
  std::vector<Vec> fiber_dirs;
  std::vector<double> fiber_w;
};

// One primitive with exact distance and exact nearest-point-set oracles.
class Shape {
 public:
  virtual ~Shape() = default;

  virtual int dim() const = 0;
  virtual std::string type_name() const = 0;
  virtual double distance(const Vec& x) const = 0;

  // Appends every nearest point of this shape to x (exact, closed form),
  // deduplicated at resolution tol.
  virtual void nearest(const Vec& x, double tol, std::vector<Vec>& out) const = 0;

  // Axis box enclosing the geometrically interesting support.
  virtual void support_box(Vec& lo, Vec& hi) const = 0;

  // Exact parametrization of this shape's m-dimensional stratum pieces
  // at roughly `density` nodes per full extent. Default: none.
  virtual void stratum_samples(int /*m*/, int /*density*/,
                               std::vector<StratumSample>& /*out*/) const {}
};

// Closed set A as a union of primitives. Immutable and cheaply copyable;
// all queries are pure so a Scene can be shared across threads.
class Scene {
 public:
  Scene(int dim, std::vector<std::shared_ptr<const Shape>> shapes, double bbox_margin);

  static Scene from_json_file(const std::string& path);
  static Scene from_json_text(const std::string& text, const std::string& origin = "<string>");

  int dim() const { return dim_; }
  const std::vector<std::shared_ptr<const Shape>>& shapes() const { return shapes_; }
  double bbox_margin() const { return margin_; }

  void bbox(Vec& lo, Vec& hi) const;
  double diameter() const;  // bbox diagonal

  // Exact distance to the union: min over primitives.
  double delta(const Vec& x) const;

  // All points a of A with |x-a| <= delta(x) + tol, deduplicated at tol.
  std::vector<Vec> nearest_set(const Vec& x, double tol) const;

  // The nearest point projection where single valued; nullopt when the
  // nearest set has >= 2 elements separated by more than tol.
  std::optional<Vec> xi(const Vec& x, double tol) const;

  // Candidate stratum samples from every primitive (union overlap is
  // filtered by the caller via stratum classification).
  std::vector<StratumSample> stratum_samples(int m, int density) const;

 private:
  int dim_;
  std::vector<std::shared_ptr<const Shape>> shapes_;
  double margin_;
  Vec lo_, hi_;
};

// Primitive factories (shared by JSON loading and tests).
std::shared_ptr<const Shape> make_point(const Vec& c);
std::shared_ptr<const Shape> make_point_cloud(const std::vector<Vec>& pts);
std::shared_ptr<const Shape> make_segment(const Vec& p, const Vec& q);
std::shared_ptr<const Shape> make_ball(const Vec& c, double R);
std::shared_ptr<const Shape> make_axis_box(const Vec& lo, const Vec& hi);
struct Halfspace {
  Vec normal;     // unit outward normal
  double offset;  // halfspace is {x : normal . x <= offset}
};
std::shared_ptr<const Shape> make_convex_polytope(const std::vector<Halfspace>& hs);
std::shared_ptr<const Shape> make_ball_complement(const Vec& c, double R);

}  // namespace curvmeas
