#include "saem/model.hpp"

#include "saem/refmodels/bivariate_normal.hpp"
#include "saem/refmodels/censored_normal.hpp"
#include "saem/refmodels/complete_normal.hpp"
#include "saem/refmodels/mixture.hpp"
#include "support/test_models.hpp"

#include <doctest.h>

#include <cmath>

using namespace saem;
using namespace saem::refmodels;
using saem::testing::DoubledScoreModel;

namespace {

std::vector<double> normal_sample(double mu, double sigma, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = mu + sigma * rng.normal();
  return v;
}

}  // namespace

TEST_CASE("complete-data normal passes the FD consistency checks") {
  CompleteDataNormalModel m(normal_sample(0.3, 1.0, 12, 5));
  ParamVector theta0(1);
  theta0 << 0.0;
  const auto report = validate_model(m, theta0, 10, 99);
  CHECK(report.all_pass());
  CHECK(report.score_check.worst_rel_err < 1e-6);
  CHECK(report.info_check.worst_rel_err < 1e-3);
}

TEST_CASE("a model reporting twice its score fails with relative error near one") {
  DoubledScoreModel<CompleteDataNormalModel> bad(
      CompleteDataNormalModel(normal_sample(2.0, 1.0, 20, 6)));
  ParamVector theta0(1);
  theta0 << 0.0;  // far from the data mean, so the score is large
  const auto report = validate_model(bad, theta0, 5, 99);
  CHECK_FALSE(report.score_check.pass);
  CHECK(report.score_check.worst_rel_err == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("censored normal at theta=(0,1) passes the FD checks") {
  auto data = CensoredNormalModel::generate(0.0, std::exp(1.0), 60, 0.25, 31);
  CensoredNormalModel m(data);
  ParamVector theta(2);
  theta << 0.0, 1.0;
  const auto report = validate_model(m, theta, 10, 17);
  CHECK(report.all_pass());
  CHECK(report.score_check.worst_rel_err < 1e-4);
  CHECK(report.info_check.worst_rel_err < 1e-3);
}

TEST_CASE("validate_model is deterministic given the seed") {
  auto data = CensoredNormalModel::generate(1.0, 2.0, 40, 0.3, 77);
  CensoredNormalModel m(data);
  const auto a = validate_model(m, m.default_init(), 7, 1234);
  const auto b = validate_model(m, m.default_init(), 7, 1234);
  CHECK(a.score_check.worst_rel_err == b.score_check.worst_rel_err);
  CHECK(a.info_check.worst_rel_err == b.info_check.worst_rel_err);
  CHECK(a.worst_asymmetry == b.worst_asymmetry);
}

namespace {

// Deliberate contract violations for the checked evaluation helpers.
struct BadShapeModel {
  using Latent = int;
  Eigen::Index dim() const { return 2; }
  std::size_t num_obs() const { return 1; }
  ParamBounds bounds() const { return ParamBounds::unbounded(2); }
  double complete_loglik(const ParamVector&, const Latent&) const { return 0.0; }
  Vector score(const ParamVector&, const Latent&) const { return Vector::Zero(3); }
  Matrix complete_info(const ParamVector&, const Latent&) const { return Matrix::Zero(2, 2); }
  Proposal<Latent> propose(const ParamVector&, const Latent& z, Rng&) const { return {z, 0.0}; }
  Latent init_latent(const ParamVector&, Rng&) const { return 0; }
};

struct AsymmetricInfoModel {
  using Latent = int;
  Eigen::Index dim() const { return 2; }
  std::size_t num_obs() const { return 1; }
  ParamBounds bounds() const { return ParamBounds::unbounded(2); }
  double complete_loglik(const ParamVector& theta, const Latent&) const {
    return -0.5 * theta.squaredNorm();
  }
  Vector score(const ParamVector& theta, const Latent&) const { return -theta; }
  Matrix complete_info(const ParamVector&, const Latent&) const {
    Matrix m = Matrix::Identity(2, 2);
    m(0, 1) = 1e-6;  // asymmetry far above the 1e-10 contract
    return m;
  }
  Proposal<Latent> propose(const ParamVector&, const Latent& z, Rng&) const { return {z, 0.0}; }
  Latent init_latent(const ParamVector&, Rng&) const { return 0; }
};

struct NanLoglikModel {
  using Latent = int;
  Eigen::Index dim() const { return 1; }
  std::size_t num_obs() const { return 1; }
  ParamBounds bounds() const { return ParamBounds::unbounded(1); }
  double complete_loglik(const ParamVector&, const Latent&) const {
    return std::numeric_limits<double>::quiet_NaN();
  }
  Vector score(const ParamVector&, const Latent&) const { return Vector::Zero(1); }
  Matrix complete_info(const ParamVector&, const Latent&) const { return Matrix::Zero(1, 1); }
  Proposal<Latent> propose(const ParamVector&, const Latent& z, Rng&) const { return {z, 0.0}; }
  Latent init_latent(const ParamVector&, Rng&) const { return 0; }
};

}  // namespace

TEST_CASE("shape and finiteness violations surface as typed errors") {
  Rng rng(1);
  ParamVector t1 = ParamVector::Zero(1);
  ParamVector t2 = ParamVector::Zero(2);
  CHECK_THROWS_AS(eval_score_checked(BadShapeModel{}, t2, 0), DimensionMismatch);
  CHECK_THROWS_AS(eval_info_checked(AsymmetricInfoModel{}, t2, 0), ModelContractError);
  CHECK_THROWS_AS(validate_model(NanLoglikModel{}, t1, 3, 5), NonFiniteEvaluation);
}

TEST_CASE("asymmetric info is reported by validate_model") {
  ParamVector t = ParamVector::Zero(2);
  const auto report = validate_model(AsymmetricInfoModel{}, t, 3, 5);
  CHECK_FALSE(report.symmetry_pass);
  CHECK(report.worst_asymmetry == doctest::Approx(1e-6));
}

TEST_CASE("reference-model information is symmetric PSD near the data-generating point") {
  Rng rng(404);
  SUBCASE("censored normal") {
    CensoredNormalModel m(CensoredNormalModel::generate(1.0, 2.0, 80, 0.3, 11));
    for (double dmu : {-0.3, 0.0, 0.3}) {
      for (double dls : {-0.2, 0.0, 0.2}) {
        ParamVector theta(2);
        theta << 1.0 + dmu, std::log(2.0) + dls;
        const auto z = m.init_latent(theta, rng);
        const Matrix info = eval_info_checked(m, theta, z);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(info);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
      }
    }
  }
  SUBCASE("mixture: PSD for every theta and every labelling") {
    MixtureModel m(MixtureModel::generate(0.4, 0.0, 3.0, 30, 12));
    for (int trial = 0; trial < 10; ++trial) {
      ParamVector theta(3);
      theta << 4.0 * rng.uniform() - 2.0, 3.0 * rng.uniform() - 1.5, 3.0 * rng.uniform();
      const auto z = m.init_latent(theta, rng);
      const Matrix info = eval_info_checked(m, theta, z);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(info);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-12);
    }
  }
  SUBCASE("bivariate normal") {
    BivariateNormalMissingModel m(
        BivariateNormalMissingModel::generate(1.0, 2.0, 2.0, 1.5, 0.6, 60, 0.4, 13));
    ParamVector truth(5);
    truth << 1.0, 2.0, std::log(2.0), std::log(1.5), std::atanh(0.6);
    for (int trial = 0; trial < 6; ++trial) {
      ParamVector theta = truth;
      for (int j = 0; j < 5; ++j) theta[j] += 0.2 * (2.0 * rng.uniform() - 1.0);
      const auto z = m.init_latent(theta, rng);
      const Matrix info = eval_info_checked(m, theta, z);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(info);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
    }
  }
}
