#include <deconvo/asymptotics/cumulants.hpp>
#include <deconvo/asymptotics/normalizers.hpp>
#include <deconvo/asymptotics/rates.hpp>
#include <deconvo/estimators/estimate.hpp>
#include <deconvo/synth/sampling.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace deconvo;

namespace {

EstimatorConfig
laplace_config(double h, double lambda = 3.0, std::size_t d = 2)
{
  EstimatorConfig cfg;
  cfg.h = h;
  cfg.a_n = 0.25;
  cfg.psi = ConvolutionKernel::laplace(d, lambda);
  cfg.K = SmoothingKernel::sinc(d);
  cfg.partition = Partition::singletons(d);
  return cfg;
}

NormalizerRequest
fd_request(NormalizerKind kind, std::size_t n, double h, double sigma2 = 0.25)
{
  NormalizerRequest r;
  r.kind = kind;
  r.config = laplace_config(h);
  r.design = Design::fixed_grid(n, 0.25, 2);
  r.noise = NoiseSpec::iid(sigma2);
  r.x = { 0.4, -1.2 };
  return r;
}

NormalizerRequest
rd_request(NormalizerKind kind, std::size_t n, double h, double sigma2 = 0.25)
{
  NormalizerRequest r;
  r.kind = kind;
  r.config = laplace_config(h);
  r.design = Design::random(n, 0.25, 2, DensitySpec::uniform());
  r.noise = NoiseSpec::iid(sigma2);
  r.x = { 0.0, 0.0 };
  return r;
}

double
sample_variance(const std::vector<double>& v)
{
  return empirical_cumulants(v, 2)[1];
}

std::vector<double>
plan_weights(EstimatorKind kind, const NormalizerRequest& r)
{
  const EstimatorPlan plan(kind, r.config, r.design);
  return plan.weights(r.x);
}

} // namespace

TEST(Normalizers, UnMatchesSquaredCombinedWeights)
{
  for (std::size_t n : { 5, 9 }) {
    const auto r = fd_request(NormalizerKind::U_n, n, 0.3);
    const auto c = plan_weights(EstimatorKind::fd_additive, r);
    double s = 0;
    for (double v : c)
      s += v * v;
    const double u = normalizer_iid(r);
    EXPECT_NEAR(u, r.noise.sigma2 * s, 1e-10 * u);
  }
}

TEST(Normalizers, UnrestrictedFixedDesignMatchesSquaredWeights)
{
  const auto r = fd_request(NormalizerKind::U_full, 7, 0.35);
  const auto c = plan_weights(EstimatorKind::fd, r);
  double s = 0;
  for (double v : c)
    s += v * v;
  EXPECT_NEAR(normalizer_iid(r), r.noise.sigma2 * s, 1e-10 * normalizer_iid(r));
}

TEST(Normalizers, ComponentNormalizerMatchesMonteCarlo)
{
  // theta_{I_1} = sum_b w_b Z_b with Z_b the average over the complement axis
  const std::size_t n = 10, reps = 2000;
  auto r = fd_request(NormalizerKind::U_nj, n, 0.3, 1.0);
  r.block = 0;
  const WeightEngine engine([&] { auto c = r.config; c.a_n = r.design.a_n; return c; }());
  const auto z = r.design.axis_grid();
  std::vector<double> w(z.size());
  for (std::size_t b = 0; b < z.size(); ++b) {
    const double xj[1] = { r.x[0] }, zj[1] = { z[b] };
    w[b] = engine.fd_block(0, xj, zj, n);
  }
  const LatticeIndex lat(n, 2);
  std::vector<double> est;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    const auto eps = gen_noise(r.noise, lat.count(), 1000 + rep, lat);
    double v = 0;
    std::vector<std::size_t> offs;
    std::vector<double> Z(z.size(), 0.0);
    for (std::size_t k = 0; k < lat.count(); ++k) {
      lat.offsets(k, offs);
      Z[offs[0]] += eps.values[k] / static_cast<double>(z.size());
    }
    for (std::size_t b = 0; b < z.size(); ++b)
      v += w[b] * Z[b];
    est.push_back(v);
  }
  const double u = normalizer_iid(r);
  EXPECT_NEAR(sample_variance(est) / u, 1.0, 0.1);
}

TEST(Normalizers, CauchySchwarzBoundOnUn)
{
  for (double h : { 0.25, 0.5 }) {
    auto r = fd_request(NormalizerKind::U_n, 8, h);
    const double un = normalizer_iid(r);
    double bound = std::sqrt(r.noise.sigma2) / std::sqrt(static_cast<double>(LatticeIndex(8, 2).count()));
    r.kind = NormalizerKind::U_nj;
    for (std::size_t j = 0; j < 2; ++j) {
      r.block = j;
      bound += std::sqrt(normalizer_iid(r));
    }
    EXPECT_LE(un, bound * bound);
  }
}

TEST(Normalizers, V1LinearInSigma2WithoutSignal)
{
  auto r = rd_request(NormalizerKind::V1, 500, 0.5, 0.3);
  const double v = normalizer_iid(r);
  r.noise.sigma2 = 0.6;
  EXPECT_NEAR(normalizer_iid(r), 2 * v, 1e-13 * v);
}

TEST(Normalizers, V1MatchesMonteCarloVariance)
{
  const std::size_t n = 2000, reps = 300;
  auto r = rd_request(NormalizerKind::V1, n, 0.5, 0.25);
  r.signal = signals::theta1();
  std::vector<double> est;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    const auto ds = sample_random_design(r.design, *r.signal, r.config.psi, r.noise, 500 + rep);
    est.push_back(estimate_rd(ds, r.config, r.x));
  }
  const double ratio = sample_variance(est) / normalizer_iid(r);
  EXPECT_GE(ratio, 0.8);
  EXPECT_LE(ratio, 1.25);
}

TEST(Normalizers, V3WithConstantMatchesAdditiveMonteCarloVariance)
{
  const std::size_t n = 1000, reps = 300;
  auto r = rd_request(NormalizerKind::V3, n, 0.4, 0.25);
  r.signal = signals::theta1();
  r.include_constant = true;
  std::vector<double> est;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    const auto ds = sample_random_design(r.design, *r.signal, r.config.psi, r.noise, 900 + rep);
    est.push_back(estimate_rd_additive(ds, r.config, r.x));
  }
  const double ratio = sample_variance(est) / normalizer_iid(r);
  EXPECT_GE(ratio, 0.8);
  EXPECT_LE(ratio, 1.25);
}

TEST(Normalizers, ConstantTermVanishesRelativeToV3AsBandwidthShrinks)
{
  auto r = rd_request(NormalizerKind::V3, 2000, 0.4);
  r.config.psi = ConvolutionKernel::laplace(2, 1.0);
  auto ratio = [&](double h) {
    r.config.h = h;
    r.include_constant = false;
    const double v3 = normalizer_iid(r);
    r.include_constant = true;
    return normalizer_iid(r) / v3;
  };
  EXPECT_GT(std::abs(ratio(0.4) - 1), 0.3);
  EXPECT_LT(std::abs(ratio(0.05) - 1), 0.02);
}

TEST(Normalizers, V2BelowV3AndFiniteForEachBlock)
{
  auto r = rd_request(NormalizerKind::V2, 1000, 0.4);
  r.x = { 0.3 };
  r.block = 1;
  const double v2 = normalizer_iid(r);
  EXPECT_GT(v2, 0);
  r.x = { 0.0, 0.3 };
  const double v2full = normalizer_iid(r);
  EXPECT_DOUBLE_EQ(v2, v2full);
}

TEST(Normalizers, MaWithoutLagsEqualsIidBitwise)
{
  auto r = rd_request(NormalizerKind::V1, 400, 0.5);
  r.signal = signals::theta1();
  const double iid = normalizer_iid(r);
  r.kind = NormalizerKind::V1_MA;
  r.noise = NoiseSpec::ma_sequence(0.25, {});
  EXPECT_EQ(normalizer_ma(r), iid);

  auto f = fd_request(NormalizerKind::U_n, 6, 0.3);
  const double un = normalizer_iid(f);
  f.kind = NormalizerKind::V_MA;
  f.noise = NoiseSpec::ma_lattice(0.25, 0, 2, { 1.0 });
  EXPECT_EQ(normalizer_ma(f), un);
}

TEST(Normalizers, SequenceLongRunFactor)
{
  auto r = rd_request(NormalizerKind::V1, 400, 0.5, 0.5);
  const double iid = normalizer_iid(r);
  r.kind = NormalizerKind::V1_MA;
  r.noise = NoiseSpec::ma_sequence(0.5, { 0.5 });
  EXPECT_NEAR(normalizer_ma(r), 2.25 * iid, 1e-13 * iid);
}

TEST(Normalizers, LatticeMaAgainstExactVarianceAndMonteCarlo)
{
  const std::size_t n = 8, reps = 2000;
  const std::vector<double> beta{ 0.1, 0.2, 0.1, 0.3, 1.0, 0.3, 0.1, 0.2, 0.1 };
  auto r = fd_request(NormalizerKind::V_MA, n, 0.4, 1.0);
  r.design.a_n = 1.0;
  r.config.a_n = 1.0;
  r.x = { 0.2, -0.3 };
  r.noise = NoiseSpec::ma_lattice(1.0, 1, 2, beta);
  const double vma = normalizer_ma(r);

  const EstimatorPlan plan(EstimatorKind::fd_additive, r.config, r.design);
  const auto c = plan.weights(r.x);
  const double exact = linear_noise_variance(c, r.noise, r.design);

  // covariance double sum sigma^2 sum_{k,l} c_k c_{k+l} gamma(l); V_MA is
  // the same sum with c_{k+l} replaced by c_k
  const LatticeIndex lat(n, 2), lags(2, 2), coef(1, 2);
  auto gamma = [&](long l0, long l1) {
    double g = 0;
    for (long r0 = -1; r0 <= 1; ++r0)
      for (long r1 = -1; r1 <= 1; ++r1) {
        const long s0 = r0 + l0, s1 = r1 + l1;
        if (std::abs(s0) <= 1 && std::abs(s1) <= 1)
          g += beta[(r0 + 1) * 3 + r1 + 1] * beta[(s0 + 1) * 3 + s1 + 1];
      }
    return g;
  };
  double direct = 0, taylor = 0;
  const long side = 2 * n + 1;
  for (long k0 = 0; k0 < side; ++k0)
    for (long k1 = 0; k1 < side; ++k1)
      for (long l0 = -2; l0 <= 2; ++l0)
        for (long l1 = -2; l1 <= 2; ++l1) {
          const double ck = c[k0 * side + k1];
          taylor += ck * ck * gamma(l0, l1);
          const long m0 = k0 + l0, m1 = k1 + l1;
          if (m0 >= 0 && m0 < side && m1 >= 0 && m1 < side)
            direct += ck * c[m0 * side + m1] * gamma(l0, l1);
        }
  EXPECT_NEAR(direct, exact, 1e-10 * exact);
  EXPECT_NEAR(taylor, vma, 1e-10 * vma);
  EXPECT_NEAR(vma / exact, 1.0, 0.1);

  std::vector<double> est;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    const auto eps = gen_noise(r.noise, lat.count(), 77 + rep, lat);
    est.push_back(plan.evaluate_one(r.x, eps.values));
  }
  EXPECT_NEAR(sample_variance(est) / exact, 1.0, 0.1);
  EXPECT_NEAR(sample_variance(est) / vma, 1.0, 0.1);
}

TEST(Normalizers, MismatchedBindingsThrow)
{
  auto r = fd_request(NormalizerKind::V1, 5, 0.3);
  EXPECT_THROW(normalizer_iid(r), StructuralError);
  auto s = rd_request(NormalizerKind::U_n, 100, 0.3);
  EXPECT_THROW(normalizer_iid(s), StructuralError);
  auto t = rd_request(NormalizerKind::V1, 100, 0.3);
  EXPECT_THROW(normalizer_ma(t), std::invalid_argument);
  t.x = { 1.0 };
  EXPECT_THROW(normalizer_iid(t), StructuralError);
}

TEST(Normalizers, TruncationCheckFiresForHeavyTails)
{
  auto r = rd_request(NormalizerKind::V1, 500, 0.5);
  r.design.density = DensitySpec::student_t2();
  r.design.a_n = 1.0;
  r.margin = 2.0;
  EXPECT_THROW(normalizer_iid(r), NumericalError);
  r.design.density = DensitySpec::gaussian();
  r.margin = 10.0;
  EXPECT_GT(normalizer_iid(r), 0);
}

TEST(Cumulants, ConstantSampleHasNoSpread)
{
  const std::vector<double> x(50, 3.5);
  const auto k = empirical_cumulants(x);
  EXPECT_DOUBLE_EQ(k[0], 3.5);
  EXPECT_EQ(k[1], 0);
  EXPECT_EQ(k[2], 0);
  EXPECT_EQ(k[3], 0);
}

TEST(Cumulants, GaussianHigherCumulantsVanish)
{
  std::mt19937_64 rng(11);
  std::normal_distribution<double> N;
  std::vector<double> x(100000);
  for (auto& v : x)
    v = N(rng);
  const auto k = empirical_cumulants(x);
  EXPECT_NEAR(k[2], 0, 0.05);
  EXPECT_NEAR(k[3], 0, 0.05);
  EXPECT_NEAR(k[1], 1, 0.02);
}

TEST(Cumulants, ExponentialThirdCumulant)
{
  std::mt19937_64 rng(20);
  std::exponential_distribution<double> E(1.0);
  std::vector<double> x(100000);
  for (auto& v : x)
    v = E(rng) - 1.0;
  const auto k = empirical_cumulants(x);
  EXPECT_NEAR(k[0], 0, 0.02);
  EXPECT_NEAR(k[2], 2, 0.1);
}

TEST(Cumulants, KStatisticsAreUnbiasedAtSmallSamples)
{
  // averaged over many size-30 samples, k_4 of Exp(1) approaches 3! = 6
  std::mt19937_64 rng(13);
  std::exponential_distribution<double> E(1.0);
  double mean_k2 = 0, mean_k4 = 0;
  const int trials = 40000;
  std::vector<double> x(30);
  for (int t = 0; t < trials; ++t) {
    for (auto& v : x)
      v = E(rng);
    const auto k = empirical_cumulants(x);
    mean_k2 += k[1] / trials;
    mean_k4 += k[3] / trials;
  }
  EXPECT_NEAR(mean_k2, 1.0, 0.02);
  EXPECT_NEAR(mean_k4, 6.0, 0.4);
}

TEST(Cumulants, TooFewSamples)
{
  const std::vector<double> x(29, 1.0);
  EXPECT_THROW(empirical_cumulants(x), InsufficientSamples);
  const std::vector<double> y(30, 1.0);
  EXPECT_THROW(empirical_cumulants(y, 5), std::invalid_argument);
}

TEST(Rates, DimensionOneBandwidthLadder)
{
  // lambda h << 1 puts the ladder in the polynomial-decay regime
  std::vector<NormalizerRequest> ladder;
  for (double h : { 0.8, 0.6, 0.45, 0.34 }) {
    NormalizerRequest r;
    r.kind = NormalizerKind::V1;
    r.config.h = h;
    r.config.psi = ConvolutionKernel::laplace(1, 0.1);
    r.config.K = SmoothingKernel::sinc(1);
    r.design = Design::random(1000, 0.25, 1, DensitySpec::uniform());
    r.x = { 0.5 };
    ladder.push_back(r);
  }
  const double e = predicted_exponent(NormalizerKind::V1, LadderParameter::h, { .beta = 2.0 }, 1);
  EXPECT_DOUBLE_EQ(e, 2.5);
  const auto rep = rate_diagnostics(ladder, LadderParameter::h, e);
  EXPECT_TRUE(rep.within_bracket()) << rep.slope;
}

TEST(Rates, TwoDimensionalBandwidthLadder)
{
  // a wide design keeps the slowly decaying weight tails inside the support
  std::vector<NormalizerRequest> ladder;
  for (double h : { 0.8, 0.6, 0.45, 0.34 }) {
    auto r = rd_request(NormalizerKind::V1, 1000, h);
    r.design.a_n = 0.1;
    r.config.psi = ConvolutionKernel::laplace(2, 0.1);
    ladder.push_back(r);
  }
  const double e = predicted_exponent(NormalizerKind::V1, LadderParameter::h, { .beta = 4.0 }, 2);
  EXPECT_DOUBLE_EQ(e, 5.0);
  const auto rep = rate_diagnostics(ladder, LadderParameter::h, e);
  EXPECT_TRUE(rep.within_bracket()) << rep.slope;
}

TEST(Rates, AdditiveFixedDesignSampleSizeLadder)
{
  std::vector<NormalizerRequest> ladder;
  for (std::size_t n : { 8, 12, 18, 27 })
    ladder.push_back(fd_request(NormalizerKind::U_n, n, 0.3));
  const auto p = Partition::singletons(2);
  const double e = predicted_exponent(NormalizerKind::U_n, LadderParameter::n, { .beta = 4.0 }, 2, &p);
  EXPECT_DOUBLE_EQ(e, 1.0);
  const auto rep = rate_diagnostics(ladder, LadderParameter::n, e);
  EXPECT_TRUE(rep.within_bracket()) << rep.slope;
  const auto j = rep.to_json();
  EXPECT_EQ(j["kind"], "U_n");
  EXPECT_EQ(j["verdict"], "within bracket");
  EXPECT_EQ(j["values"].size(), 4u);
}

TEST(Rates, DegenerateLaddersThrow)
{
  std::vector<NormalizerRequest> same(4, fd_request(NormalizerKind::U_n, 8, 0.3));
  EXPECT_THROW(rate_diagnostics(same, LadderParameter::n, 1.0), std::invalid_argument);
  std::vector<NormalizerRequest> short_ladder(same.begin(), same.begin() + 3);
  EXPECT_THROW(rate_diagnostics(short_ladder, LadderParameter::n, 1.0), std::invalid_argument);
}
