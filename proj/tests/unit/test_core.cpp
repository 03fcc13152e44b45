#include <deconvo/core/config.hpp>
#include <deconvo/core/design.hpp>
#include <deconvo/core/presets.hpp>
#include <deconvo/core/validate.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace deconvo;

namespace {

double
at(const AdditiveSignal& s, double x1, double x2)
{
  const double x[2] = { x1, x2 };
  return theta_eval(s, x);
}

EstimatorConfig
default_config(double h, double a_n)
{
  EstimatorConfig cfg;
  cfg.h = h;
  cfg.a_n = a_n;
  cfg.psi = ConvolutionKernel::laplace(2, 3.0);
  cfg.K = SmoothingKernel::sinc(2);
  cfg.partition = Partition::singletons(2);
  return cfg;
}

} // namespace

TEST(Partition, RejectsIncompleteCover)
{
  EXPECT_THROW(Partition(3, { { 0 }, { 1 } }), StructuralError);
  try {
    Partition(3, { { 0 }, { 1 } });
  } catch (const StructuralError& e) {
    EXPECT_NE(std::string(e.what()).find("do not cover"), std::string::npos);
  }
}

TEST(Partition, RejectsOverlapEmptyAndOutOfRange)
{
  EXPECT_THROW(Partition(2, { { 0, 1 }, { 1 } }), StructuralError);
  EXPECT_THROW(Partition(2, { { 0, 1 }, {} }), StructuralError);
  EXPECT_THROW(Partition(2, { { 0, 2 } }), StructuralError);
}

TEST(Partition, ComplementsAndBlockSizes)
{
  Partition p(4, { { 2, 0 }, { 3 }, { 1 } });
  EXPECT_EQ(p.size(), 3u);
  std::size_t total = 0;
  for (std::size_t j = 0; j < p.size(); ++j)
    total += p.block_dim(j);
  EXPECT_EQ(total, 4u);
  EXPECT_EQ(p.complement(0), (std::vector<std::size_t>{ 1, 3 }));
  EXPECT_EQ(p.block_of(3), 1u);
  EXPECT_EQ(p.to_string(), "1,3;4;2");
}

TEST(Signal, PresetValuesAtProbePoints)
{
  const auto t1 = signals::theta1();
  const auto t2 = signals::theta2();
  EXPECT_NEAR(at(t1, 0, 0), 1.8422, 5e-5);
  EXPECT_NEAR(at(t1, 0, 1), 1.6877, 5e-5);
  EXPECT_NEAR(at(t1, 1, 1), 1.1425, 5e-5);
  EXPECT_NEAR(at(t1, 1, 1.8), 0.5857, 5e-5);
  EXPECT_NEAR(at(t2, -1.6, -1.6), 0.1473, 5e-5);
  EXPECT_NEAR(at(t2, 0, 0), 2.6703, 5e-5);
  EXPECT_NEAR(at(t2, 0, -1.6), 0.6823, 5e-5);
  EXPECT_NEAR(at(t2, -0.8, -0.8), 0.8573, 5e-5);
  EXPECT_NEAR(at(t2, -0.8, 0), 2.3012, 5e-5);
  EXPECT_EQ(at(signals::zero(2), 0.3, -7.0), 0.0);
}

TEST(Signal, AdditiveDecomposition)
{
  const auto s = signals::theta2();
  for (double x1 : { -1.3, 0.0, 0.4, 2.2 })
    for (double x2 : { -0.5, 0.1, 1.7 }) {
      const double expect = std::exp(-std::abs(x1 - 0.4)) + 2 * std::exp(-2 * x2 * x2);
      EXPECT_DOUBLE_EQ(at(s, x1, x2), expect);
    }
  EXPECT_EQ(s.partition(), Partition::singletons(2));
  EXPECT_THROW(AdditiveSignal("bad", 2, 0, { { { 0, 5 }, [](auto) { return 0.0; } } }),
               StructuralError);
}

TEST(Kernels, TransformIsOneAtOrigin)
{
  const double zero[3] = { 0, 0, 0 };
  for (const auto& k : { ConvolutionKernel::laplace(3, 3.0),
                         ConvolutionKernel::gaussian(3, 0.7),
                         ConvolutionKernel::gamma(3, 3.0, 2.0) })
    EXPECT_NEAR(std::abs(k.transform(zero) - 1.0), 0.0, 1e-10);
}

TEST(Kernels, DensitiesIntegrateToOne)
{
  // trapezoid sum on a wide window as an independent oracle
  for (const auto& k : { ConvolutionKernel::laplace(1, 3.0),
                         ConvolutionKernel::gaussian(1, 1.0),
                         ConvolutionKernel::gamma(1, 3.0, 2.0) }) {
    double s = 0;
    const double dt = 1e-4;
    for (double t = -40; t <= 40; t += dt)
      s += k.axis_density(0, t) * dt;
    EXPECT_NEAR(s, 1.0, 1e-3) << k.id();
  }
}

TEST(Kernels, MarginalDropsAxes)
{
  const auto k = ConvolutionKernel::gaussian(3, 1.0);
  const std::size_t axes[2] = { 1, 2 };
  EXPECT_EQ(k.marginal(axes), ConvolutionKernel::gaussian(2, 1.0));
  const std::size_t one[1] = { 0 };
  EXPECT_EQ(ConvolutionKernel::laplace(2, 3.0).marginal(one), ConvolutionKernel::laplace(1, 3.0));
}

TEST(Kernels, SincProfileAndTable)
{
  const auto K = SmoothingKernel::sinc(2);
  const double in[2] = { 0.5, -0.99 }, out[2] = { 1.01, 0.0 };
  EXPECT_EQ(K.transform(in), 1.0);
  EXPECT_EQ(K.transform(out), 0.0);
  const auto T = SmoothingKernel::table(1, { 1.0, 1.0, 0.5, 0.0 });
  EXPECT_DOUBLE_EQ(T.axis_transform(0.2), 1.0);
  EXPECT_DOUBLE_EQ(T.axis_transform(5.0 / 6.0), 0.25);
  EXPECT_DOUBLE_EQ(T.flat_radius(), 1.0 / 3.0);
}

TEST(Presets, ParseIds)
{
  EXPECT_EQ(presets::kernel("laplace:3", 2), ConvolutionKernel::laplace(2, 3.0));
  EXPECT_EQ(presets::kernel("gauss:1", 2), ConvolutionKernel::gaussian(2, 1.0));
  EXPECT_EQ(presets::kernel("gamma:3,2", 2), ConvolutionKernel::gamma(2, 3.0, 2.0));
  EXPECT_EQ(presets::kernel("gamma:3,2", 2).id(), "gamma:3,2");
  EXPECT_EQ(presets::density("heavytail:2").tail_b(), 2.0);
  EXPECT_EQ(presets::density("t2").id(), "t2");
  EXPECT_EQ(presets::signal("theta2").id(), "theta2");
  EXPECT_THROW(presets::kernel("cauchy:1", 2), std::invalid_argument);
  EXPECT_THROW(presets::kernel("laplace:x", 2), std::invalid_argument);
}

TEST(Density, HeavyTailShape)
{
  const auto f = DensitySpec::heavy_tail(2.0);
  EXPECT_DOUBLE_EQ(f.tail_a(), 0.25);
  EXPECT_DOUBLE_EQ(f.axis_density(0.3, 1.0), 0.25);
  EXPECT_DOUBLE_EQ(f.axis_density(2.0, 1.0), 1.0 / 16.0);
  EXPECT_DOUBLE_EQ(f.axis_cdf(1.0, 1.0) - f.axis_cdf(-1.0, 1.0), 0.5);
  for (double p : { 0.01, 0.2, 0.5, 0.77, 0.99 })
    EXPECT_NEAR(f.axis_cdf(f.axis_quantile(p, 1.0), 1.0), p, 1e-12);
  EXPECT_THROW(DensitySpec::heavy_tail(1.0), std::invalid_argument);
}

TEST(Density, UniformLevelAndTruncation)
{
  const auto f = DensitySpec::uniform();
  const double x[2] = { 1.0, -3.9 };
  EXPECT_DOUBLE_EQ(f.density(x, 0.25), 0.125 * 0.125);
  EXPECT_DOUBLE_EQ(f.truncation_level(2, 0.25), 0.125 * 0.125);
  const auto g = DensitySpec::gaussian();
  const double far[2] = { 3, 3 }, edge[2] = { 2, 2 };
  EXPECT_LT(g.density(far, 0.5), g.truncation_level(2, 0.5));
  EXPECT_DOUBLE_EQ(g.truncation_level(2, 0.5), g.density(edge, 0.5));
}

TEST(Noise, ShapesAndFactors)
{
  EXPECT_THROW(NoiseSpec::ma_lattice(1.0, 1, 2, std::vector<double>(8, 1.0)), StructuralError);
  const auto lat = NoiseSpec::ma_lattice(1.0, 1, 2, std::vector<double>(9, 1.0));
  EXPECT_DOUBLE_EQ(lat.marginal_variance(), 9.0);
  const auto seq = NoiseSpec::ma_sequence(1.0, { 0.5 });
  EXPECT_DOUBLE_EQ(seq.marginal_variance(), 1.25);
  EXPECT_DOUBLE_EQ(seq.long_run_factor(), 2.25);
  EXPECT_DOUBLE_EQ(NoiseSpec::iid(0.25).long_run_factor(), 1.0);
}

TEST(Design, FixedGridEnumeratesLattice)
{
  const auto d = Design::fixed_grid(50, 0.25, 2);
  EXPECT_EQ(d.sample_size(), 10201u);
  const auto locs = grid_locations(d);
  std::set<std::pair<double, double>> distinct;
  double lo = 1e9, hi = -1e9;
  for (std::size_t k = 0; k < d.sample_size(); ++k) {
    distinct.insert({ locs[2 * k], locs[2 * k + 1] });
    lo = std::min({ lo, locs[2 * k], locs[2 * k + 1] });
    hi = std::max({ hi, locs[2 * k], locs[2 * k + 1] });
  }
  EXPECT_EQ(distinct.size(), 10201u);
  EXPECT_DOUBLE_EQ(lo, -4.0);
  EXPECT_DOUBLE_EQ(hi, 4.0);
  // lexicographic order, first axis slowest
  EXPECT_DOUBLE_EQ(locs[0], -4.0);
  EXPECT_DOUBLE_EQ(locs[3], -4.0 + 0.08);
}

TEST(Validate, ReferenceScenarioPasses)
{
  const auto report = validate_scenario(signals::theta2(),
                                        ConvolutionKernel::laplace(2, 3.0),
                                        SmoothingKernel::sinc(2),
                                        Design::fixed_grid(50, 0.25, 2),
                                        default_config(0.36, 0.25));
  EXPECT_TRUE(report.ok());
  EXPECT_EQ(report.find("rate conditions")->status, CheckStatus::unchecked);
}

TEST(Validate, DimensionMismatchThrows)
{
  auto cfg = default_config(0.36, 0.25);
  EXPECT_THROW(validate_scenario(signals::theta2(),
                                 ConvolutionKernel::laplace(2, 3.0),
                                 SmoothingKernel::sinc(2),
                                 Design::fixed_grid(10, 0.25, 3),
                                 cfg),
               StructuralError);
}

TEST(Validate, GammaKernelFlaggedForEstimation)
{
  auto cfg = default_config(0.36, 0.25);
  cfg.psi = ConvolutionKernel::gamma(2, 3.0, 2.0);
  const auto report = validate_scenario(signals::theta1(),
                                        cfg.psi,
                                        SmoothingKernel::sinc(2),
                                        Design::fixed_grid(10, 0.25, 2),
                                        cfg);
  EXPECT_FALSE(report.ok());
  const auto* c = report.find("ill-posedness");
  ASSERT_NE(c, nullptr);
  EXPECT_EQ(c->status, CheckStatus::violated);
  EXPECT_NE(c->detail.find("non-symmetric transform"), std::string::npos);
}

TEST(Config, QMustConformToPartition)
{
  auto cfg = default_config(0.3, 0.25);
  cfg.Q = { BlockMeasure::uniform(1) };
  EXPECT_THROW(cfg.validate(), StructuralError);
  cfg.Q = { BlockMeasure::uniform(1), BlockMeasure::uniform(2) };
  EXPECT_THROW(cfg.validate(), StructuralError);
  cfg.Q = { BlockMeasure::uniform(1), BlockMeasure::uniform(1) };
  EXPECT_NO_THROW(cfg.validate());
  cfg.order = 1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}
