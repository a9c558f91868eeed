#pragma once

#include <vector>

#include "vlab/grid.hpp"

namespace vlab {

// Periodic bicubic (B-spline) interpolation of a grid field.  The spline
// coefficients are prefiltered once at construction; evaluation is a local
// 4x4 stencil and interpolates exactly through the grid values.
class BicubicSampler {
 public:
  BicubicSampler() = default;
  BicubicSampler(const Grid2D& g, const std::vector<double>& values);

  double operator()(Point p) const;
  const Grid2D& grid() const { return grid_; }

 private:
  Grid2D grid_;
  std::vector<double> coef_;
};

class VectorSampler {
 public:
  VectorSampler() = default;
  VectorSampler(const Grid2D& g, const std::vector<double>& ux, const std::vector<double>& uy)
      : sx_(g, ux), sy_(g, uy) {}
  explicit VectorSampler(const VectorField& v) : VectorSampler(v.grid, v.ux, v.uy) {}

  Point operator()(Point p) const { return {sx_(p), sy_(p)}; }

 private:
  BicubicSampler sx_;
  BicubicSampler sy_;
};

}  // namespace vlab
