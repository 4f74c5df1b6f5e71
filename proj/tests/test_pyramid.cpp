#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "alp/pyramid.hpp"
#include "alp/synthetic.hpp"

using alp::Index;
using alp::KernelMode;
using alp::LpVariant;
using alp::Matrix;
using alp::TrainOptions;

namespace {

Matrix random_points(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
  }
  return m;
}

int argmin(const std::vector<double>& curve) {
  return int(std::min_element(curve.begin(), curve.end()) - curve.begin());
}

}  // namespace

TEST_CASE("default_sigma0 is twice the median pairwise distance") {
  Matrix x(3, 1);
  x << 0.0, 1.0, 3.0;
  CHECK(alp::default_sigma0(x) == 4.0);
}

TEST_CASE("alp_train rejects malformed input") {
  const Matrix x = random_points(10, 1, 1);
  const Matrix f = Matrix::Ones(10, 1);

  CHECK_THROWS_AS(alp::alp_train(Matrix::Zero(2, 1), Matrix::Zero(2, 1), {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(alp::alp_train(x, Matrix::Ones(9, 1), {}), std::invalid_argument);
  CHECK_THROWS_AS(alp::alp_train(x, Matrix(10, 0), {}), std::invalid_argument);

  TrainOptions bad;
  bad.sigma0 = -1.0;
  CHECK_THROWS_AS(alp::alp_train(x, f, bad), std::invalid_argument);
  bad.sigma0 = 1.0;
  bad.mu = 1.0;
  CHECK_THROWS_AS(alp::alp_train(x, f, bad), std::invalid_argument);
  bad.mu = 2.0;
  bad.max_iter = 0;
  CHECK_THROWS_AS(alp::alp_train(x, f, bad), std::invalid_argument);

  Matrix nan_f = f;
  nan_f(3, 0) = std::nan("");
  CHECK_THROWS_AS(alp::alp_train(x, nan_f, {}), std::invalid_argument);
}

TEST_CASE("constant targets are reproduced at the first level") {
  const Matrix x = random_points(20, 2, 2);
  const Matrix f = Matrix::Constant(20, 1, 3.25);

  // The renormalizing mode keeps rows stochastic, so a constant survives the
  // very first smoothing pass exactly.
  TrainOptions options;
  options.kernel_mode = KernelMode::zero_diag_then_normalize;
  const auto result = alp::alp_train(x, f, options);
  CHECK(result.model.optimal_iter[0] == 0);
  CHECK(result.report.error_curves[0][0] < 1e-20);

  const Matrix q = random_points(7, 2, 3);
  const Matrix pred = alp::alp_predict(result.model, q);
  CHECK((pred.array() - 3.25).abs().maxCoeff() < 1e-12);
}

TEST_CASE("training leaves the held-out point's first-level fit untouched") {
  // The zero-diagonal operators give row p zero weight on sample p, so the
  // level-0 fit at p cannot depend on the target value there. The sample is
  // large enough for an interior stopping level, so residuals[1] survives the
  // trim and exposes the level-0 fit.
  const Index n = 100;
  const Index p = 17;
  const alp::Dataset data = alp::composite_sine(n, 0.1, 11);

  for (KernelMode mode : {KernelMode::zero_diag_then_normalize,
                          KernelMode::normalize_then_zero_diag}) {
    TrainOptions options;
    options.kernel_mode = mode;
    options.max_iter = 6;

    const auto a = alp::alp_train(data.points, data.targets, options);
    Matrix bumped = data.targets;
    bumped(p, 0) += 0.4;
    const auto b = alp::alp_train(data.points, bumped, options);

    REQUIRE(a.model.optimal_iter[0] >= 1);
    REQUIRE(b.model.optimal_iter[0] >= 1);
    const double fit_a = data.targets(p, 0) - a.model.residuals[1](p, 0);
    const double fit_b = bumped(p, 0) - b.model.residuals[1](p, 0);
    CHECK(fit_a == fit_b);
  }

  // The full operator does leak the perturbation back into the fit.
  TrainOptions full;
  full.variant = LpVariant::standard;
  full.max_iter = 2;
  const auto a = alp::alp_train(data.points, data.targets, full);
  Matrix bumped = data.targets;
  bumped(p, 0) += 0.4;
  const auto b = alp::alp_train(data.points, bumped, full);
  const double fit_a = data.targets(p, 0) - a.model.residuals[1](p, 0);
  const double fit_b = bumped(p, 0) - b.model.residuals[1](p, 0);
  CHECK(fit_a != fit_b);
}

TEST_CASE("kernel underflow at the first level is an error") {
  Matrix x(3, 1);
  x << 0.0, 1e6, 2e6;
  const Matrix f = random_points(3, 1, 4);
  TrainOptions options;
  options.sigma0 = 1.0;
  CHECK_THROWS_AS(alp::alp_train(x, f, options), std::runtime_error);
}

TEST_CASE("kernel underflow later on stops training and is reported") {
  Matrix x(3, 1);
  x << 0.0, 1.0, 2.0;
  Matrix f(3, 1);
  f << 0.0, 1.0, 4.0;
  TrainOptions options;
  options.sigma0 = 2.0;
  options.mu = 200.0;  // sigma_1 = 0.01, every off-diagonal weight underflows
  options.max_iter = 10;

  const auto result = alp::alp_train(x, f, options);
  CHECK(result.report.kernel_underflow);
  CHECK(result.report.iterations == 1);
  CHECK(result.model.optimal_iter[0] == 0);
}

TEST_CASE("noisy training runs to underflow and picks an interior minimum") {
  const alp::Dataset data = alp::composite_sine(300, 0.2, 5);
  const auto result = alp::alp_train(data.points, data.targets);

  // The bandwidth halves until every weight underflows, well before the
  // default level budget.
  CHECK(result.report.kernel_underflow);
  CHECK(result.report.iterations < 50);
  const auto& curve = result.report.error_curves[0];
  const int best = result.model.optimal_iter[0];
  CHECK(best == argmin(curve));
  CHECK(curve[std::size_t(best)] < curve[0]);
  // Noise keeps the minimum strictly inside the curve.
  CHECK(best > 0);
  CHECK(best + 1 < int(curve.size()));
  CHECK(int(result.model.residuals.size()) == best + 1);
}

TEST_CASE("exact LOOCV matches a hand-computed three-point case") {
  Matrix x(3, 1);
  x << 0.0, 1.0, 3.0;
  Matrix f(3, 1);
  f << 0.0, 1.0, 9.0;
  const double sigma0 = 2.0;
  const double mu = 2.0;

  const std::vector<double> curve = alp::exact_loocv_curve(x, f, sigma0, mu, 2);

  // Recompute with scalar arithmetic: hold out p, train the standard
  // two-level pyramid on the remaining pair, evaluate at x_p.
  double expected[2] = {0.0, 0.0};
  for (int p = 0; p < 3; ++p) {
    const int a = (p == 0) ? 1 : 0;
    const int b = (p == 2) ? 1 : 2;
    const double xa = x(a, 0), xb = x(b, 0), xp = x(p, 0);
    const double fa = f(a, 0), fb = f(b, 0), fp = f(p, 0);

    double ra = fa, rb = fb;        // residual signal on the pair
    double fit_a = 0.0, fit_b = 0.0;
    double yhat = 0.0;
    double sigma = sigma0;
    for (int level = 0; level < 2; ++level) {
      const double s2 = sigma * sigma;
      const double kab = std::exp(-(xa - xb) * (xa - xb) / s2);
      const double wpa = std::exp(-(xp - xa) * (xp - xa) / s2);
      const double wpb = std::exp(-(xp - xb) * (xp - xb) / s2);
      yhat += (wpa * ra + wpb * rb) / (wpa + wpb);
      fit_a += (ra + kab * rb) / (1.0 + kab);
      fit_b += (kab * ra + rb) / (1.0 + kab);
      ra = fa - fit_a;
      rb = fb - fit_b;
      expected[level] += (fp - yhat) * (fp - yhat) / 3.0;
      sigma /= mu;
    }
  }

  CHECK(curve[0] == doctest::Approx(expected[0]).epsilon(1e-12));
  CHECK(curve[1] == doctest::Approx(expected[1]).epsilon(1e-12));
}

TEST_CASE("exact LOOCV input limits") {
  CHECK_THROWS_AS(
      alp::exact_loocv_curve(Matrix::Zero(2001, 1), Matrix::Zero(2001, 1), 1.0, 2.0, 3),
      std::invalid_argument);
  Matrix x(3, 1);
  x << 0.0, 1.0, 2.0;
  CHECK_THROWS_AS(alp::exact_loocv_curve(x, Matrix::Zero(3, 1), 0.0, 2.0, 3),
                  std::invalid_argument);
  CHECK_THROWS_AS(alp::exact_loocv_curve(x, Matrix::Zero(3, 1), 1.0, 2.0, 0),
                  std::invalid_argument);
}

TEST_CASE("training error curve tracks the leave-one-out oracle") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const alp::Dataset data = alp::composite_sine(100, 0.1, seed);
    TrainOptions options;
    options.max_iter = 12;
    const auto result = alp::alp_train(data.points, data.targets, options);

    const std::vector<double> oracle = alp::exact_loocv_curve(
        data.points, data.targets, result.model.sigma0, result.model.mu, 12);

    const auto& curve = result.report.error_curves[0];
    const std::size_t shared = std::min(curve.size(), oracle.size());
    const int curve_best =
        argmin(std::vector<double>(curve.begin(), curve.begin() + shared));
    const int oracle_best =
        argmin(std::vector<double>(oracle.begin(), oracle.begin() + shared));

    // The stopping decision is what the zero-diagonal curve is for, and it
    // lands on the oracle's level.
    CHECK(curve_best == oracle_best);

    // At the widest bandwidth a single row weight is ~1/n, so dropping the
    // diagonal barely moves the prediction and the curves start together.
    CHECK(curve[0] == doctest::Approx(oracle[0]).epsilon(0.01));

    // Near the minimum the bandwidth is a small multiple of the sample
    // spacing. Zero-diagonal rows then sum to clearly less than one, the
    // damped corrections compound, and the training curve rides above the
    // oracle: equal argmin, larger values. At n=100 the ratio is a little
    // over 2; it shrinks as n grows.
    const std::size_t best = std::size_t(oracle_best);
    CHECK(curve[best] > oracle[best]);
    CHECK(curve[best] < 4.0 * oracle[best]);

    // The oracle curve is U-shaped on noisy data: down to the minimum,
    // rising at the end.
    CHECK(oracle_best > 0);
    CHECK(oracle_best < int(oracle.size()) - 1);
    CHECK(oracle.back() > oracle[std::size_t(oracle_best)]);
  }
}

TEST_CASE("standard pyramid drives the training error to zero") {
  const alp::Dataset data = alp::composite_sine(200, 0.0, 0);
  const double sigma0 = alp::default_sigma0(data.points);
  const std::vector<double> curve =
      alp::lp_train_error_curve(data.points, data.targets, sigma0, 2.0, 12);

  for (std::size_t l = 1; l < 11; ++l) {
    CHECK(curve[l] < curve[l - 1]);
  }
  CHECK(curve.back() < 1e-8);
}

TEST_CASE("standard pyramid on constant targets converges immediately") {
  const Matrix x = random_points(25, 2, 6);
  const Matrix f = Matrix::Constant(25, 1, -1.5);
  const std::vector<double> curve = alp::lp_train_error_curve(x, f, 1.0, 2.0, 3);
  CHECK(curve[0] < 1e-25);
}

TEST_CASE("standard pyramid freezes once the operator is the identity") {
  Matrix x(4, 1);
  x << 0.0, 100.0, 200.0, 300.0;
  Matrix f(4, 1);
  f << 1.0, -2.0, 0.5, 3.0;
  // sigma far below the spacing: the kernel underflows to the identity, the
  // first level reproduces f exactly and the error is exactly zero onwards.
  const std::vector<double> curve = alp::lp_train_error_curve(x, f, 1.0, 2.0, 4);
  CHECK(curve[0] == 0.0);
  CHECK(curve[3] == 0.0);
}

TEST_CASE("multi-output training matches the per-output runs") {
  const alp::Dataset data = alp::composite_sine(150, 0.1, 9);
  const Index n = data.points.rows();
  Matrix targets(n, 2);
  targets.col(0) = data.targets.col(0);
  for (Index i = 0; i < n; ++i) {
    targets(i, 1) = std::cos(data.points(i, 0));
  }

  TrainOptions options;
  options.max_iter = 15;
  const auto multi = alp::alp_train(data.points, targets, options);
  const auto first = alp::alp_train(data.points, targets.col(0), options);
  const auto second = alp::alp_train(data.points, targets.col(1), options);

  // Operators depend on the points only, and each level is linear in its
  // residual, so every column's curve is bitwise the single-output curve.
  const auto& mc0 = multi.report.error_curves[0];
  const auto& sc0 = first.report.error_curves[0];
  for (std::size_t l = 0; l < std::min(mc0.size(), sc0.size()); ++l) {
    CHECK(mc0[l] == sc0[l]);
  }
  const auto& mc1 = multi.report.error_curves[1];
  const auto& sc1 = second.report.error_curves[0];
  for (std::size_t l = 0; l < std::min(mc1.size(), sc1.size()); ++l) {
    CHECK(mc1[l] == sc1[l]);
  }

  CHECK(multi.model.optimal_iter[0] == first.model.optimal_iter[0]);
  CHECK(multi.model.optimal_iter[1] == second.model.optimal_iter[0]);

  const Matrix q = random_points(9, 1, 10) * 15.0;
  const Matrix pm = alp::alp_predict(multi.model, q);
  CHECK((pm.col(0) - alp::alp_predict(first.model, q)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((pm.col(1) - alp::alp_predict(second.model, q)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("predictions vary smoothly in the query point") {
  const alp::Dataset data = alp::composite_sine(200, 0.05, 12);
  const auto result = alp::alp_train(data.points, data.targets);

  Matrix q(2, 1);
  q << 7.3, 7.3 + 1e-8;
  const Matrix pred = alp::alp_predict(result.model, q);
  CHECK(std::abs(pred(1, 0) - pred(0, 0)) < 1e-5);
}

TEST_CASE("alp_predict validates its input") {
  const alp::Dataset data = alp::composite_sine(50, 0.1, 13);
  const auto result = alp::alp_train(data.points, data.targets);
  CHECK_THROWS_AS(alp::alp_predict(result.model, Matrix::Zero(3, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(alp::alp_predict(alp::AlpModel{}, Matrix::Zero(3, 1)),
                  std::invalid_argument);
}

TEST_CASE("pyramid variant names round trip") {
  CHECK(alp::lp_variant_from_string("standard") == LpVariant::standard);
  CHECK(alp::lp_variant_from_string("auto-adaptive") == LpVariant::auto_adaptive);
  CHECK_THROWS_AS(alp::lp_variant_from_string("x"), std::invalid_argument);
}
