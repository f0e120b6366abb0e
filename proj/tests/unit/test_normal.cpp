#include <catch2/catch_amalgamated.hpp>

#include "robust_t/normal.hpp"
#include "robust_t/student_t_distribution.hpp"

using namespace robust_t;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

// Reference digits from 40-digit mpmath: sqrt(2) erfinv(2p - 1), and the t CDF
// through the regularized incomplete beta function.

TEST_CASE("Phi^{-1}(3/4) agrees with a high-precision value") {
  CHECK_THAT(NormalConstants::phi_inv_3_4(), WithinAbs(0.6744897501960817432, 1e-15));
}

TEST_CASE("normal quantile across all three rational regions") {
  struct Case { double p, z; };
  const Case cases[] = {
      {0.5005, 0.0012533144654324165}, {0.6, 0.2533471031357997},  {0.975, 1.9599639845400538},
      {0.995, 2.5758293035489004},     {0.025, -1.9599639845400543}, {1e-10, -6.361340902404057},
      {0.9999999, 5.199337582290661},
  };
  for (const auto& c : cases) CHECK_THAT(normal_quantile(c.p), WithinAbs(c.z, 1e-13 * std::max(1.0, std::abs(c.z))));
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK_THROWS_AS(normal_quantile(0.0), Error);
  CHECK_THROWS_AS(normal_quantile(1.0), Error);
}

TEST_CASE("normal density and CDF") {
  CHECK_THAT(normal_pdf(1.959963984540054), WithinRel(0.05844506980503538, 1e-12));
  CHECK_THAT(normal_cdf(1.959963984540054), WithinAbs(0.975, 1e-15));
  for (double p = 0.01; p < 1.0; p += 0.01) CHECK_THAT(normal_cdf(normal_quantile(p)), WithinAbs(p, 1e-14));
}

TEST_CASE("scale factors increase with n") {
  for (std::size_t n = 2; n < 200; ++n) {
    CHECK(NormalConstants::scale_ta(n + 1) > NormalConstants::scale_ta(n));
    CHECK(NormalConstants::scale_tb(n + 1) > NormalConstants::scale_tb(n));
  }
  CHECK_THAT(NormalConstants::scale_tb(10) / NormalConstants::scale_ta(10), WithinRel(std::sqrt(3.0), 1e-15));
}

TEST_CASE("Student t quantile and CDF match reference values") {
  CHECK_THAT(student_t_quantile(0.975, 9), WithinRel(2.2621571627982050, 1e-12));
  CHECK_THAT(student_t_quantile(0.975, 19), WithinRel(2.0930240544083093, 1e-12));
  CHECK_THAT(student_t_quantile(0.975, 4), WithinRel(2.7764451051977987, 1e-12));
  CHECK_THAT(student_t_quantile(0.995, 1), WithinRel(63.65674116287399, 1e-12));
  CHECK_THAT(student_t_quantile(0.6, 30), WithinRel(0.2556053649519127, 1e-12));
  CHECK_THAT(student_t_quantile(0.999, 2), WithinRel(22.32712477011987, 1e-12));
  CHECK_THAT(student_t_cdf(2.0, 5), WithinAbs(0.9490302605850709, 1e-14));
  CHECK_THAT(student_t_cdf(0.5, 9), WithinAbs(0.6854643500869868, 1e-14));
  CHECK_THAT(student_t_cdf(3.0, 19), WithinAbs(0.9963191379080657, 1e-14));
}
