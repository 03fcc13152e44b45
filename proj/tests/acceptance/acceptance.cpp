// Acceptance suite: one PASS/FAIL line per criterion. Optional arguments
// select criteria by number, e.g. `acceptance 1 8 9`.

#include <deconvo/asymptotics/normalizers.hpp>
#include <deconvo/asymptotics/rates.hpp>
#include <deconvo/fourier/oracles.hpp>
#include <deconvo/harness/studies.hpp>
#include <deconvo/synth/sampling.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace deconvo;

namespace {

struct Outcome
{
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what)
  {
    pass = pass && ok;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [miss]");
  }
};

std::string
fmt(double v, int prec = 4)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

double
rel(double a, double b)
{
  return std::abs(a - b) / std::abs(b);
}

const std::vector<double> h_grid{ 0.24, 0.28, 0.32, 0.36, 0.40, 0.44, 0.48 };

Scenario
fixed_scenario(const std::string& signal, std::size_t n, EstimatorKind kind, std::size_t reps, std::uint64_t seed)
{
  Scenario s;
  s.signal = signal;
  s.true_kernel = "laplace:3";
  s.design = Design::fixed_grid(n, 0.25, 2);
  s.noise = NoiseSpec::iid(0.25);
  s.kind = kind;
  s.config.h = 0.36;
  s.reps = reps;
  s.seed = seed;
  return s;
}

void
criterion1(Outcome& o)
{
  for (double h : { 0.25, 0.5, 1.0 }) {
    const auto c = closed_form_oracles(h);
    o.check(rel(c.first_quadrature, c.first_closed) <= 1e-9 && rel(c.second_quadrature, c.second_closed) <= 1e-9,
            "h=" + fmt(h) + " closed forms rel " + fmt(rel(c.first_quadrature, c.first_closed), 2) + "/" +
              fmt(rel(c.second_quadrature, c.second_closed), 2));
  }
  const auto c = closed_form_oracles(0.25);
  const double r3 = c.third_quadrature / c.third_leading, r4 = c.fourth_quadrature / c.fourth_leading;
  o.check(r3 >= 0.9 && r3 <= 1.1, "leading-term ratio third=" + fmt(r3));
  o.check(r4 >= 0.9 && r4 <= 1.1, "fourth=" + fmt(r4));
}

void
criterion2(Outcome& o)
{
  for (std::size_t n : { 10, 30 })
    for (auto kind : { EstimatorKind::fd, EstimatorKind::fd_additive }) {
      auto s = fixed_scenario("theta1", n, kind, 500, 2000 + n);
      s.config.h = 0.36;
      s.points = { 0.0, 0.0 };
      const auto req = scenario_normalizer(s, s.points);
      const double u = normalizer_iid(req);
      const EstimatorPlan plan(kind, s.estimator_config(), s.design);
      double direct = 0;
      for (double c : plan.weights(s.points))
        direct += c * c;
      direct *= s.noise.sigma2;
      const auto mc = run_monte_carlo(s);
      const double ratio = mc.rows[0].var / u;
      o.check(rel(u, direct) <= 1e-10 && std::abs(ratio - 1) <= 0.2,
              to_string(kind) + " n=" + std::to_string(n) + " identity rel " + fmt(rel(u, direct), 2) +
                ", MC/U " + fmt(ratio));
    }
}

double
select_h(const Scenario& s, std::size_t reps, std::string& note)
{
  auto m = s;
  m.reps = reps;
  const auto t = mise_scan(m, h_grid, mise_grid());
  note = "MISE h=" + fmt(t.argmin());
  return t.argmin();
}

void
criterion3(Outcome& o)
{
  auto s = fixed_scenario("theta2", 50, EstimatorKind::fd_additive, 200, 3003);
  s.points = points::grid25();
  std::string note;
  s.config.h = select_h(s, 100, note);
  const auto mc = run_monte_carlo(s);
  // table label (x_1, x_2) = (-1.6, 0) is the signal point (0, -1.6)
  const auto& r = mc.rows[2];
  o.detail << note << "; theta=" << fmt(r.theta);
  o.check(std::abs(r.mean - 0.8296) <= 0.05, "mean " + fmt(r.mean));
  o.check(r.var >= 0.0008 && r.var <= 0.0035, "var " + fmt(r.var));
  o.check(r.mse >= 0.012 && r.mse <= 0.035, "mse " + fmt(r.mse));
}

void
criterion4(Outcome& o)
{
  // one bandwidth for both estimators, picked by the additive estimator's MISE
  auto add = fixed_scenario("theta1", 30, EstimatorKind::fd_additive, 200, 4004);
  add.points = points::probe4();
  std::string note;
  add.config.h = select_h(add, 100, note);
  o.detail << "shared " << note;
  auto fd = add;
  fd.kind = EstimatorKind::fd;
  fd.config.partition.reset();
  const std::vector<McSummary> sums{ run_monte_carlo(fd), run_monte_carlo(add) };
  for (std::size_t p = 0; p < 4; ++p) {
    const auto &fd = sums[0].rows[p], &add = sums[1].rows[p];
    o.check(add.mse <= fd.mse / 5, "(" + fmt(add.x[0]) + "," + fmt(add.x[1]) + ") mse " + fmt(add.mse) + " vs " + fmt(fd.mse));
  }
  const double m0 = sums[1].rows[0].mse;
  o.check(m0 >= 0.0015 && m0 <= 0.006, "additive mse at (0,0) " + fmt(m0));
}

void
criterion5(Outcome& o)
{
  Scenario s;
  s.signal = "theta1";
  s.design = Design::random(10201, 0.25, 2, DensitySpec::uniform());
  s.kind = EstimatorKind::rd;
  s.points = points::probe4();
  s.reps = 200;
  s.seed = 5005;
  std::string note;
  s.config.h = select_h(s, 20, note);
  o.detail << note;
  const auto narrow = run_monte_carlo(s);
  s.design.a_n = 0.5;
  const auto wide = run_monte_carlo(s);
  const auto &a = narrow.rows[0], &b = wide.rows[0];
  o.check(a.mse >= 0.02 && a.mse <= 0.07, "a_n=0.25 mse " + fmt(a.mse) + " (mean " + fmt(a.mean) + ")");
  o.check(std::abs(b.mean - b.theta) > std::abs(a.mean - a.theta),
          "a_n=0.5 bias " + fmt(b.mean - b.theta) + " vs " + fmt(a.mean - a.theta));
}

void
criterion6(Outcome& o)
{
  auto s = fixed_scenario("theta1", 50, EstimatorKind::fd_additive, 100, 6006);
  s.points = { 0.0, 0.0 };
  const auto t = mise_scan(s, h_grid, mise_grid());
  std::string table;
  for (std::size_t i = 0; i < t.h.size(); ++i)
    table += (i ? " " : "") + fmt(t.h[i], 2) + ":" + fmt(t.mise[i], 3);
  o.detail << "MISE " << table;
  o.check(t.argmin() >= 0.28 && t.argmin() <= 0.44, "argmin h=" + fmt(t.argmin()));
}

void
criterion7(Outcome& o)
{
  constexpr std::uint64_t seed = 20131;
  auto s = fixed_scenario("theta1", 50, EstimatorKind::fd_additive, 500, seed);
  s.points = { 0.0, 0.0 };
  auto report = [&](const std::string& name, const NormalityReport& r) {
    const auto& k = r.cumulants;
    o.check(r.pass(), name + " k2=" + fmt(k[1], 3) + " k3=" + fmt(k[2], 3) + " k4=" + fmt(k[3], 3));
  };
  report("iid/U_n", normality_diagnostics(s));
  std::vector<double> beta(9, 0.2);
  beta[4] = 1.0;
  s.noise = NoiseSpec::ma_lattice(0.25, 1, 2, beta);
  report("MA-lattice/V_MA", normality_diagnostics(s));
}

void
criterion8(Outcome& o)
{
  std::mt19937_64 rng(8008);
  std::uniform_real_distribution<double> coord(-2.5, 2.5), bw(0.2, 1.0);
  const auto f = DensitySpec::uniform();
  const std::vector<std::string> families{ "fd", "fd-additive", "rd", "rd-additive" };
  for (const auto& fam : families) {
    double worst = 0;
    for (int t = 0; t < 50; ++t) {
      EstimatorConfig cfg;
      cfg.h = bw(rng);
      cfg.a_n = 0.25;
      cfg.psi = ConvolutionKernel::laplace(2, 3.0);
      cfg.K = SmoothingKernel::sinc(2);
      cfg.partition = Partition::singletons(2);
      const double x[2] = { coord(rng), coord(rng) }, z[2] = { coord(rng), coord(rng) };
      auto both = [&](auto&& weight) {
        cfg.fast_path = true;
        const double a = weight(WeightEngine(cfg));
        cfg.fast_path = false;
        const double b = weight(WeightEngine(cfg));
        worst = std::max(worst, rel(a, b));
      };
      if (fam == "fd")
        both([&](const WeightEngine& e) { return e.fd_full(x, z, 30); });
      else if (fam == "fd-additive")
        both([&](const WeightEngine& e) { return e.fd_block(0, std::span(x, 1), std::span(z, 1), 30); });
      else if (fam == "rd")
        both([&](const WeightEngine& e) { return e.rd(x, z, 1000, f); });
      else
        both([&](const WeightEngine& e) {
          return e.rd_additive(1, std::span(x + 1, 1), z, 1000, f) + e.rd_constant(z, 1000, f);
        });
    }
    o.check(worst <= 1e-9, fam + " worst rel " + fmt(worst, 2));
  }
}

void
criterion9(Outcome& o)
{
  NormalizerRequest r;
  r.kind = NormalizerKind::V1;
  r.config.h = 0.4;
  r.config.psi = ConvolutionKernel::laplace(2, 3.0);
  r.config.K = SmoothingKernel::sinc(2);
  r.config.partition = Partition::singletons(2);
  r.design = Design::random(1000, 0.25, 2, DensitySpec::uniform());
  r.noise = NoiseSpec::iid(0.25);
  r.signal = signals::theta1();
  r.x = { 0.0, 0.0 };
  const double v1 = normalizer_iid(r);
  r.kind = NormalizerKind::V1_MA;
  r.noise = NoiseSpec::ma_sequence(0.25, {});
  o.check(normalizer_ma(r) == v1, "V1_MA(q=0) == V1");

  r.kind = NormalizerKind::U_n;
  r.design = Design::fixed_grid(20, 0.25, 2);
  r.noise = NoiseSpec::iid(0.25);
  const double un = normalizer_iid(r);
  r.kind = NormalizerKind::V_MA;
  r.noise = NoiseSpec::ma_lattice(0.25, 0, 2, { 1.0 });
  o.check(normalizer_ma(r) == un, "V_MA(q=0) == U_n");

  const auto eps = gen_noise(NoiseSpec::ma_sequence(1.0, { 0.5 }), 1000000, 9009);
  double m = 0, v = 0;
  for (double e : eps.values)
    m += e;
  m /= static_cast<double>(eps.values.size());
  for (double e : eps.values)
    v += (e - m) * (e - m);
  v /= static_cast<double>(eps.values.size() - 1);
  o.check(std::abs(v / 1.25 - 1) <= 0.01, "MA(1) Var(eps)=" + fmt(v, 5));
}

void
criterion10(Outcome& o)
{
  std::vector<NormalizerRequest> ladder;
  for (std::size_t n : { 8, 12, 18, 27 }) {
    NormalizerRequest r;
    r.kind = NormalizerKind::U_n;
    r.config.h = 0.36;
    r.config.psi = ConvolutionKernel::laplace(2, 3.0);
    r.config.K = SmoothingKernel::sinc(2);
    r.config.partition = Partition::singletons(2);
    r.design = Design::fixed_grid(n, 0.25, 2);
    r.noise = NoiseSpec::iid(0.25);
    r.x = { 0.0, 0.0 };
    ladder.push_back(r);
  }
  const auto p = Partition::singletons(2);
  const double e = predicted_exponent(NormalizerKind::U_n, LadderParameter::n, { .beta = 4.0 }, 2, &p);
  const auto rep = rate_diagnostics(ladder, LadderParameter::n, e);
  o.check(rep.within_bracket(), "slope " + fmt(rep.slope) + " vs " + fmt(e) + " +/- 0.15");
}

} // namespace

int
main(int argc, char** argv)
{
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
    { "closed-form oracles", criterion1 },     { "exact variance identity", criterion2 },
    { "theta2 grid25 moments", criterion3 },    { "additive vs unrestricted MSE", criterion4 },
    { "random-design truncation", criterion5 },       { "MISE minimizer", criterion6 },
    { "CLT cumulants", criterion7 },           { "fast-path equivalence", criterion8 },
    { "MA reductions", criterion9 },           { "rate slope", criterion10 },
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i)
    wanted.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!wanted.empty() && !wanted.count(id))
      continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("error: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.pass;
    std::printf("criterion %2d %-4s %s (%.1fs): %s\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(), secs,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failures ? 1 : 0;
}
