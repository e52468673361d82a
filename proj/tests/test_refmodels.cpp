#include "saem/refmodels/bivariate_normal.hpp"
#include "saem/refmodels/censored_normal.hpp"
#include "saem/refmodels/complete_normal.hpp"
#include "saem/refmodels/mixture.hpp"
#include "saem/refmodels/oracle.hpp"

#include "saem/model.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace saem;
using namespace saem::refmodels;

TEST_CASE("censored normal: single censored observation at the mean") {
  CensoredNormalModel m({{0.0, true}});
  ParamVector theta(2);
  theta << 0.0, 0.0;
  CHECK(m.exact_marginal_loglik(theta) == doctest::Approx(std::log(0.5)).epsilon(1e-14));
}

TEST_CASE("censored normal without censoring reduces to the complete likelihood") {
  auto data = CensoredNormalModel::generate(0.5, 1.5, 30, 0.0, 9);
  CensoredNormalModel m(data);
  CHECK(m.num_censored() == 0);

  double s1 = 0.0, s2 = 0.0;
  for (const auto& obs : data) {
    s1 += obs.value;
    s2 += obs.value * obs.value;
  }
  const double n = 30.0;
  const double mean = s1 / n;
  const double sd = std::sqrt(s2 / n - mean * mean);

  SUBCASE("one EM step lands on the sample moments") {
    ParamVector start(2);
    start << -3.0, 1.0;
    const ParamVector em = m.exact_em_step(start);
    CHECK(em[0] == doctest::Approx(mean).epsilon(1e-12));
    CHECK(em[1] == doctest::Approx(std::log(sd)).epsilon(1e-12));
  }
  SUBCASE("direct maximization lands on the sample moments") {
    const auto mle = direct_mle(m, m.default_init());
    CHECK(mle.converged);
    CHECK(mle.x[0] == doctest::Approx(mean).epsilon(1e-8));
    CHECK(mle.x[1] == doctest::Approx(std::log(sd)).epsilon(1e-8));
  }
  SUBCASE("marginal log-likelihood equals the complete one") {
    ParamVector theta(2);
    theta << 0.4, 0.3;
    CHECK(m.exact_marginal_loglik(theta) ==
          doctest::Approx(m.complete_loglik(theta, {})).epsilon(1e-14));
  }
}

TEST_CASE("mixture: symmetric data with equal means is an EM fixed point") {
  // Data symmetric around zero, theta with mu1 = mu2 = 0 and pi = 1/2.
  MixtureModel m({-2.0, -1.0, -0.25, 0.25, 1.0, 2.0});
  ParamVector theta(3);
  theta << 0.0, 0.0, 0.0;
  const ParamVector next = m.exact_em_step(theta);
  CHECK(next[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(next[1] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(next[2] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("mixture: single observation, symmetric components") {
  MixtureModel m({0.0});
  ParamVector theta(3);
  theta << 0.0, -1.0, 1.0;  // pi = 1/2, means at -1 and 1
  // density = phi(1), so the log-likelihood is log phi(1).
  CHECK(m.exact_marginal_loglik(theta) ==
        doctest::Approx(-0.5 - 0.91893853320467274178).epsilon(1e-14));
}

TEST_CASE("mixture marginal equals the brute-force sum over all label vectors") {
  for (std::size_t n : {2U, 5U, 8U}) {
    MixtureModel m(MixtureModel::generate(0.35, -0.5, 1.8, n, 50 + n));
    Rng rng(7 + n);
    for (int trial = 0; trial < 5; ++trial) {
      ParamVector theta(3);
      theta << 2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.5, 2.0 * rng.uniform();
      const auto e = testing::enumerate_states(m, theta, testing::all_label_vectors(n));
      CHECK(m.exact_marginal_loglik(theta) ==
            doctest::Approx(e.log_marginal).epsilon(1e-10));
    }
  }
}

TEST_CASE("exact conditional expectations match enumeration (mixture)") {
  MixtureModel m(MixtureModel::generate(0.45, -1.0, 1.0, 6, 23));
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    ParamVector theta(3);
    theta << rng.normal(), -1.0 + 0.5 * rng.normal(), 1.0 + 0.5 * rng.normal();
    const auto e = testing::enumerate_states(m, theta, testing::all_label_vectors(6));
    const auto mom = testing::enumerated_moments(m, theta, e);
    const ConditionalMoments cm = m.exact_conditional_expectations(theta);
    CHECK((cm.score_mean - mom.score_mean).norm() <= 1e-9 * (1.0 + mom.score_mean.norm()));
    const Matrix expected = mom.info_mean - mom.score_outer_mean;
    CHECK((cm.info_minus_score_sq - expected).norm() <= 1e-9 * (1.0 + expected.norm()));
  }
}

TEST_CASE("EM never decreases the exact marginal log-likelihood") {
  Rng rng(606);
  SUBCASE("censored normal") {
    CensoredNormalModel m(CensoredNormalModel::generate(1.0, 2.0, 60, 0.3, 41));
    for (int start = 0; start < 5; ++start) {
      ParamVector theta(2);
      theta << 1.0 + 3.0 * (2.0 * rng.uniform() - 1.0), 0.7 * (2.0 * rng.uniform() - 1.0);
      double prev = m.exact_marginal_loglik(theta);
      for (int it = 0; it < 100; ++it) {
        theta = m.exact_em_step(theta);
        const double cur = m.exact_marginal_loglik(theta);
        CHECK(cur >= prev - 1e-10);
        prev = cur;
      }
    }
  }
  SUBCASE("mixture") {
    MixtureModel m(MixtureModel::generate(0.4, 0.0, 3.0, 50, 42));
    for (int start = 0; start < 5; ++start) {
      ParamVector theta(3);
      theta << 2.0 * rng.uniform() - 1.0, 1.5 * (2.0 * rng.uniform() - 1.0),
          3.0 + 1.5 * (2.0 * rng.uniform() - 1.0);
      double prev = m.exact_marginal_loglik(theta);
      for (int it = 0; it < 100; ++it) {
        theta = m.exact_em_step(theta);
        const double cur = m.exact_marginal_loglik(theta);
        CHECK(cur >= prev - 1e-10);
        prev = cur;
      }
    }
  }
  SUBCASE("bivariate normal") {
    BivariateNormalMissingModel m(
        BivariateNormalMissingModel::generate(1.0, 2.0, 2.0, 1.5, 0.6, 50, 0.4, 43));
    const ParamVector base = m.default_init();
    for (int start = 0; start < 5; ++start) {
      ParamVector theta = base;
      for (int j = 0; j < 5; ++j) theta[j] += 0.8 * (2.0 * rng.uniform() - 1.0);
      double prev = m.exact_marginal_loglik(theta);
      for (int it = 0; it < 100; ++it) {
        theta = m.exact_em_step(theta);
        const double cur = m.exact_marginal_loglik(theta);
        CHECK(cur >= prev - 1e-10);
        prev = cur;
      }
    }
  }
}

TEST_CASE("direct maximization agrees with the EM fixed point") {
  SUBCASE("censored normal") {
    CensoredNormalModel m(CensoredNormalModel::generate(1.0, 2.0, 80, 0.3, 44));
    const auto em = em_fixed_point(m, m.default_init(), 1e-10);
    const auto mle = direct_mle(m, m.default_init());
    CHECK(em.converged);
    CHECK(mle.converged);
    CHECK((em.theta - mle.x).norm() <= 1e-6);
  }
  SUBCASE("bivariate normal") {
    BivariateNormalMissingModel m(
        BivariateNormalMissingModel::generate(0.5, -1.0, 1.0, 2.0, -0.4, 70, 0.3, 45));
    const auto em = em_fixed_point(m, m.default_init(), 1e-10);
    const auto mle = direct_mle(m, m.default_init());
    CHECK(em.converged);
    CHECK(mle.converged);
    CHECK((em.theta - mle.x).norm() <= 1e-6);
  }
}

TEST_CASE("every reference model passes validate_model") {
  CHECK(validate_model(CensoredNormalModel(CensoredNormalModel::generate(1.0, 2.0, 50, 0.3, 1)),
                       ParamVector::Zero(2), 8, 10)
            .all_pass());
  CHECK(validate_model(MixtureModel(MixtureModel::generate(0.4, 0.0, 2.5, 40, 2)),
                       ParamVector::Zero(3), 8, 11)
            .all_pass());
  {
    BivariateNormalMissingModel m(
        BivariateNormalMissingModel::generate(1.0, 2.0, 2.0, 1.5, 0.6, 40, 0.4, 3));
    CHECK(validate_model(m, m.default_init(), 8, 12).all_pass());
  }
  CHECK(validate_model(CompleteDataNormalModel({0.1, 0.5, -0.3}), ParamVector::Zero(1), 8, 13)
            .all_pass());
}

TEST_CASE("generators are deterministic and honor their contracts") {
  SUBCASE("censored normal censors exactly the requested fraction") {
    const auto a = CensoredNormalModel::generate(1.0, 2.0, 100, 0.3, 7);
    const auto b = CensoredNormalModel::generate(1.0, 2.0, 100, 0.3, 7);
    int censored = 0;
    double threshold = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].value == b[k].value);
      CHECK(a[k].censored == b[k].censored);
      if (a[k].censored) {
        ++censored;
        threshold = a[k].value;
      }
    }
    CHECK(censored == 30);
    for (const auto& obs : a) {
      if (!obs.censored) CHECK(obs.value <= threshold);
    }
  }
  SUBCASE("bivariate generator never drops both coordinates") {
    const auto data = BivariateNormalMissingModel::generate(0.0, 0.0, 1.0, 1.0, 0.5, 200, 0.5, 8);
    int missing = 0;
    for (const auto& row : data) {
      CHECK((row.x1.has_value() || row.x2.has_value()));
      if (!row.x1 || !row.x2) ++missing;
    }
    CHECK(missing > 50);  // about half at miss_frac = 0.5
    CHECK(missing < 150);
  }
}
