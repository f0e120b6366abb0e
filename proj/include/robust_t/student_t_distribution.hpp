#pragma once

#include <boost/math/distributions/students_t.hpp>

#include "robust_t/errors.hpp"

namespace robust_t {

// Exact Student t quantiles and CDF, backed by Boost.Math.

inline double student_t_quantile(double p, double degrees_of_freedom) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::InvalidProbability, "t quantile needs 0 < p < 1");
  }
  if (!(degrees_of_freedom > 0.0)) {
    throw Error(ErrorCode::SampleTooSmall, "t distribution needs positive degrees of freedom");
  }
  return boost::math::quantile(boost::math::students_t(degrees_of_freedom), p);
}

inline double student_t_cdf(double x, double degrees_of_freedom) {
  if (!(degrees_of_freedom > 0.0)) {
    throw Error(ErrorCode::SampleTooSmall, "t distribution needs positive degrees of freedom");
  }
  return boost::math::cdf(boost::math::students_t(degrees_of_freedom), x);
}

}  // namespace robust_t
