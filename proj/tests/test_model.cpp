#include <cmath>
#include <numeric>

#include "doctest.h"
#include "hostforge/linalg.hpp"
#include "hostforge/model.hpp"

using namespace hostforge;

namespace {

// Straight product of ratios from the top level down, no log-space tricks.
std::vector<double> direct_pmf(const RatioChain& c, double t) {
  std::vector<double> w(c.size(), 1.0);
  for (std::size_t i = c.laws.size(); i-- > 0;)
    w[i] = w[i + 1] * c.laws[i].a * std::exp(c.laws[i].b * (t - 2006.0));
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= s;
  return w;
}

}  // namespace

TEST_CASE("YearTime parsing and calendar conversion") {
  CHECK(parse_date("2010.5").value == 2010.5);
  CHECK(parse_date(" 2014 ").value == 2014.0);
  CHECK(parse_date("2010-09-01").value == doctest::Approx(2010.0 + 8.0 / 12.0));
  CHECK(parse_date("2006-01-01").value == 2006.0);
  CHECK(from_calendar(2010, 1, 11).value == doctest::Approx(2010.0 + 10.0 / 365.25));
  CHECK_THROWS_AS(parse_date(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_date("2010-13-01"), std::invalid_argument);
  CHECK_THROWS_AS(parse_date("2010-09"), std::invalid_argument);
  CHECK_THROWS_AS(parse_date("soon"), std::invalid_argument);
  CHECK_THROWS_AS(parse_date("nan"), std::invalid_argument);
  const double inf = INFINITY;
  CHECK_THROWS_AS(YearTime{inf}, std::invalid_argument);

  CHECK_FALSE(YearTime(2006.0).is_extrapolated());
  CHECK_FALSE(YearTime(2014.0).is_extrapolated());
  CHECK(YearTime(2014.01).is_extrapolated());
  CHECK(YearTime(2005.9).is_extrapolated());
}

TEST_CASE("exp_law_eval") {
  CHECK(exp_law_eval(ExpLaw(3.369, -0.5004), YearTime(2006.0)) == 3.369);
  CHECK(exp_law_eval(ExpLaw(2064, 0.1709), YearTime(2014.0)) == doctest::Approx(8100).epsilon(0.01));
  CHECK(exp_law_eval(ExpLaw(17.49, -0.3217), YearTime(2010.0)) ==
        doctest::Approx(17.49 * std::exp(-0.3217 * 4)).epsilon(1e-12));
  CHECK(exp_law_eval(ExpLaw(17.49, -0.3217), YearTime(2010.0)) == doctest::Approx(4.83).epsilon(0.002));

  SUBCASE("multiplicative over shifts") {
    const ExpLaw law(12.8, -0.2377);
    for (double t : {2001.3, 2006.0, 2009.75, 2020.0})
      for (double d : {-3.0, 0.25, 7.5}) {
        const double lhs = law.value(YearTime(t + d));
        const double rhs = law.value(YearTime(t)) * std::exp(law.b * d);
        CHECK(std::abs(lhs - rhs) / rhs < 1e-12);
      }
  }

  SUBCASE("validation") {
    CHECK_THROWS_AS(ExpLaw(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ExpLaw(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ExpLaw(1.0, NAN), std::invalid_argument);
  }
}

TEST_CASE("ratio_chain_pmf") {
  const ModelParams p = default_params();

  SUBCASE("default cores at 2006") {
    const auto pmf = ratio_chain_pmf(p.core_chain, YearTime(2006.0));
    const std::vector<double> expect{0.7603, 0.2257, 0.0129, 0.0010, 0.0001};
    REQUIRE(pmf.size() == 5);
    // Published to four decimals.
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(pmf[i] - expect[i]) < 5e-5);
    CHECK(std::abs(pmf_mean(p.core_chain, pmf) - 1.28) < 0.03);
  }

  SUBCASE("default cores at 2014 average about 4.6") {
    const auto pmf = ratio_chain_pmf(p.core_chain, YearTime(2014.0));
    CHECK(std::abs(pmf_mean(p.core_chain, pmf) - 4.6) < 0.05);
  }

  SUBCASE("constant unit laws give a uniform pmf") {
    const RatioChain c({1, 2, 3, 4}, {ExpLaw(1, 0), ExpLaw(1, 0), ExpLaw(1, 0)});
    for (double t : {1990.0, 2010.0, 2030.0})
      for (double q : ratio_chain_pmf(c, YearTime(t))) CHECK(q == doctest::Approx(0.25).epsilon(1e-15));
  }

  SUBCASE("matches the direct product and reproduces ratios") {
    for (const RatioChain* c : {&p.core_chain, &p.mem_chain})
      for (double t = 2000.0; t <= 2020.0; t += 0.75) {
        const auto pmf = ratio_chain_pmf(*c, YearTime(t));
        const auto ref = direct_pmf(*c, t);
        double sum = 0.0;
        for (std::size_t i = 0; i < pmf.size(); ++i) {
          CHECK(pmf[i] > 0.0);
          CHECK(std::abs(pmf[i] - ref[i]) <= 1e-12 * ref[i] + 1e-300);
          sum += pmf[i];
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
        for (std::size_t i = 0; i + 1 < pmf.size(); ++i) {
          const double law = c->laws[i].value(YearTime(t));
          CHECK(std::abs(pmf[i] / pmf[i + 1] - law) / law < 1e-9);
        }
      }
  }

  SUBCASE("extreme ratios do not underflow") {
    const RatioChain c({1, 2, 3}, {ExpLaw(1e200, 0), ExpLaw(1e200, 0)});
    const auto pmf = ratio_chain_pmf(c, YearTime(2006.0));
    CHECK(pmf[0] == doctest::Approx(1.0));
    CHECK(std::isfinite(pmf[2]));
  }

  SUBCASE("chain validation") {
    CHECK_THROWS_AS(RatioChain({1, 2}, {}), std::invalid_argument);
    CHECK_THROWS_AS(RatioChain({2, 1}, {ExpLaw(1, 0)}), std::invalid_argument);
    CHECK_THROWS_AS(RatioChain({}, {}), std::invalid_argument);
  }
}

TEST_CASE("predicted_moments") {
  const ModelParams p = default_params();
  const YearTime t2014(2014.0);

  auto check = [](const DistLaw& d, YearTime t, double mean, double sd) {
    const auto m = predicted_moments(d, t);
    CHECK(m.mean == doctest::Approx(mean).epsilon(0.01));
    CHECK(std::sqrt(m.variance) == doctest::Approx(sd).epsilon(0.01));
  };
  check(p.whetstone, t2014, 2975, 868);
  check(p.dhrystone, t2014, 8100, 4419);
  check(p.disk, t2014, 272.0, 434.5);

  for (const DistLaw* d : {&p.whetstone, &p.dhrystone, &p.disk}) {
    const auto m = predicted_moments(*d, YearTime(2006.0));
    CHECK(m.mean == d->mean_law.a);
    CHECK(m.variance == d->variance_law.a);
  }
}

TEST_CASE("lognormal_params_from_moments") {
  const auto p = lognormal_params_from_moments(272.0, 1.888e5);
  CHECK(p.mu == doctest::Approx(4.972).epsilon(5e-4 / 4.972));
  CHECK(p.sigma == doctest::Approx(1.126).epsilon(5e-4 / 1.126));

  const double e = std::exp(1.0);
  const auto unit = lognormal_params_from_moments(std::exp(0.5), e * (e - 1.0));
  CHECK(std::abs(unit.mu) < 1e-12);
  CHECK(unit.sigma == doctest::Approx(1.0).epsilon(1e-12));

  const auto tiny = lognormal_params_from_moments(1.0, 1e-20);
  CHECK(std::abs(tiny.mu) < 1e-15);
  CHECK(tiny.sigma == doctest::Approx(1e-10).epsilon(1e-6));
  CHECK(tiny.sigma > 0.0);

  SUBCASE("round trip") {
    for (double mean : {0.01, 1.0, 272.0, 8100.0})
      for (double cv : {0.01, 0.3, 1.6, 20.0}) {
        const double var = (cv * mean) * (cv * mean);
        const auto m = lognormal_moments(lognormal_params_from_moments(mean, var));
        CHECK(std::abs(m.mean - mean) / mean < 1e-10);
        CHECK(std::abs(m.variance - var) / var < 1e-10);
      }
  }

  CHECK_THROWS_AS(lognormal_params_from_moments(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(lognormal_params_from_moments(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(lognormal_params_from_moments(-2.0, 1.0), std::domain_error);
}

TEST_CASE("default_params reproduces the published constants") {
  const ModelParams p = default_params();
  CHECK(p.core_chain.levels == std::vector<int>{1, 2, 4, 8, 16});
  CHECK(p.core_chain.laws == std::vector<ExpLaw>{ExpLaw(3.369, -0.5004), ExpLaw(17.49, -0.3217),
                                                 ExpLaw(12.8, -0.2377), ExpLaw(12, -0.2)});
  CHECK(p.mem_chain.levels == std::vector<int>{256, 512, 768, 1024, 1536, 2048, 4096});
  CHECK(p.mem_chain.laws ==
        std::vector<ExpLaw>{ExpLaw(0.5829, -0.2517), ExpLaw(4.89, -0.1292), ExpLaw(0.3821, -0.1709),
                            ExpLaw(3.98, -0.1367), ExpLaw(1.51, -0.0925), ExpLaw(4.951, -0.1008)});
  CHECK(p.mem_chain.laws[4] == ExpLaw(1.51, -0.0925));
  CHECK(p.dhrystone == DistLaw(DistFamilyTag::normal, ExpLaw(2064, 0.1709), ExpLaw(1.379e6, 0.3313)));
  CHECK(p.whetstone == DistLaw(DistFamilyTag::normal, ExpLaw(1179, 0.1157), ExpLaw(3.237e5, 0.1057)));
  CHECK(p.disk == DistLaw(DistFamilyTag::lognormal, ExpLaw(31.59, 0.2691), ExpLaw(2890, 0.5224)));
  CHECK(p.disk.mean_law == ExpLaw(31.59, 0.2691));
  CHECK(p.correlation.r()(1, 2) == 0.639);
  CHECK(p.correlation.r() == SquareMatrix{{1, 0.25, 0.306}, {0.25, 1, 0.639}, {0.306, 0.639, 1}});
  CHECK(p.lifetime == WeibullLaw(0.58, 135));
  CHECK(p == default_params());
}

TEST_CASE("expected memory is the product of independent means") {
  const ModelParams p = default_params();
  const YearTime t(2014.0);
  const double cores = pmf_mean(p.core_chain, ratio_chain_pmf(p.core_chain, t));
  const double pcm = pmf_mean(p.mem_chain, ratio_chain_pmf(p.mem_chain, t));
  CHECK(expected_memory_mb(p, t) == doctest::Approx(cores * pcm));
  // About 8 GB, not the 6.8 GB quoted alongside the published laws.
  CHECK(expected_memory_mb(p, t) / 1024.0 == doctest::Approx(8.05).epsilon(0.01));
}

TEST_CASE("cholesky") {
  SUBCASE("published matrix") {
    const SquareMatrix r{{1, 0.25, 0.306}, {0.25, 1, 0.639}, {0.306, 0.639, 1}};
    const auto l = cholesky(r);
    const SquareMatrix expect{{1, 0, 0}, {0.250, 0.968, 0}, {0.306, 0.581, 0.754}};
    CHECK(l.max_abs_diff(expect) < 1e-3);
    CHECK((l * l.transposed()).max_abs_diff(r) < 1e-12);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i + 1; j < 3; ++j) CHECK(l(i, j) == 0.0);
  }
  SUBCASE("identity") { CHECK(cholesky(SquareMatrix::identity(4)) == SquareMatrix::identity(4)); }
  SUBCASE("2x2 by hand") {
    const auto l = cholesky(SquareMatrix{{1, 0.5}, {0.5, 1}});
    CHECK(l(0, 0) == 1.0);
    CHECK(l(1, 0) == 0.5);
    CHECK(l(1, 1) == doctest::Approx(std::sqrt(0.75)).epsilon(1e-15));
  }
  SUBCASE("failures") {
    try {
      cholesky(SquareMatrix{{1, 2}, {2, 1}});
      FAIL("expected DecompositionError");
    } catch (const DecompositionError& e) {
      CHECK(e.pivot() == 1);
    }
    CHECK_THROWS_AS(cholesky(SquareMatrix{{1, 0.2}, {0.3, 1}}), std::invalid_argument);
  }
}

TEST_CASE("CorrelationModel validation") {
  CHECK_NOTHROW(CorrelationModel(SquareMatrix{{1, 0.25, 0.306}, {0.25, 1, 0.639}, {0.306, 0.639, 1}}));
  CHECK_THROWS(CorrelationModel(SquareMatrix{{1, 0}, {0, 1}}));
  CHECK_THROWS(CorrelationModel(SquareMatrix{{2, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
  CHECK_THROWS(CorrelationModel(SquareMatrix{{1, 1, 0}, {1, 1, 0}, {0, 0, 1}}));
  // Valid entries but not positive definite.
  CHECK_THROWS(CorrelationModel(SquareMatrix{{1, 0.9, -0.9}, {0.9, 1, 0.9}, {-0.9, 0.9, 1}}));
}

TEST_CASE("family names round trip") {
  for (auto tag : {DistFamilyTag::normal, DistFamilyTag::lognormal, DistFamilyTag::exponential,
                   DistFamilyTag::weibull, DistFamilyTag::pareto, DistFamilyTag::gamma,
                   DistFamilyTag::loggamma})
    CHECK(family_from_string(to_string(tag)) == tag);
  CHECK_THROWS_AS(family_from_string("cauchy"), std::invalid_argument);
  CHECK_THROWS_AS(WeibullLaw(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(WeibullLaw(1.0, -1.0), std::invalid_argument);
}
