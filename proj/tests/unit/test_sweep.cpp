#include <doctest.h>

#include <cmath>

#include "aerostp/errors.hpp"
#include "aerostp/sweep.hpp"

using namespace aerostp;

namespace {

NetworkSpec single(double density, double h) {
  return NetworkSpec{{LayerSpec{density, h, 1.0}}, ChannelParams{}};
}

}  // namespace

TEST_SUITE("sweep") {

TEST_CASE("grid construction") {
  const auto lin = GridSpec::linear("h1", 50.0, 400.0, 8);
  REQUIRE(lin.values.size() == 8);
  CHECK(lin.values.front() == 50.0);
  CHECK(lin.values.back() == 400.0);
  CHECK(lin.values[1] == doctest::Approx(100.0));
  const auto lg = GridSpec::logarithmic("lambda1", 1e-7, std::pow(10.0, -3.5), 15);
  REQUIRE(lg.values.size() == 15);
  CHECK(lg.values.front() == doctest::Approx(1e-7));
  CHECK(lg.values.back() == doctest::Approx(std::pow(10.0, -3.5)));
  CHECK(lg.values[1] / lg.values[0] == doctest::Approx(lg.values[2] / lg.values[1]));
  CHECK_THROWS_AS(GridSpec::logarithmic("x", 0.0, 1.0, 5), ValidationError);
}

TEST_CASE("grid parsing") {
  auto g = GridSpec::parse("h1=25:500:20:log");
  CHECK(g.parameter == "h1");
  CHECK(g.values.size() == 20);
  CHECK(g.values.front() == doctest::Approx(25.0));
  g = GridSpec::parse("lambda1=10^-7:10^-3.5:15:log");
  CHECK(g.values.front() == doctest::Approx(1e-7));
  g = GridSpec::parse("beta=0.5,0.7,1");
  CHECK(g.values == std::vector<double>{0.5, 0.7, 1.0});
  g = GridSpec::parse("h1=100:200:3");
  CHECK(g.values == std::vector<double>{100.0, 150.0, 200.0});
  CHECK_THROWS_AS(GridSpec::parse("h1"), ValidationError);
  CHECK_THROWS_AS(GridSpec::parse("h1=1:2"), ValidationError);
  CHECK_THROWS_AS(GridSpec::parse("h1=1:2:1"), ValidationError);
  CHECK_THROWS_AS(GridSpec::parse("h1=1:2:3:cubic"), ValidationError);
  CHECK_THROWS_AS(GridSpec::parse("h1=a,b"), ValidationError);
}

TEST_CASE("parameter setters") {
  NetworkSpec net{{LayerSpec{1e-5, 100.0, 1.0}, LayerSpec{1e-6, 200.0, 1.0}}, {}};
  CHECK(with_parameter(net, "h2", 300.0).layers[1].altitude == 300.0);
  CHECK(with_parameter(net, "lambda1", 2e-5).layers[0].density == 2e-5);
  CHECK(with_parameter(net, "p2", 3.0).layers[1].power == 3.0);
  CHECK(with_parameter(net, "beta", 1.2).channel.beta == 1.2);
  CHECK(with_parameter(net, "m_los", 3.0).channel.m_los == 3);
  CHECK_THROWS_AS(with_parameter(net, "m_los", 2.5), ValidationError);
  CHECK_THROWS_AS(with_parameter(net, "h3", 1.0), ValidationError);
  CHECK_THROWS_AS(with_parameter(net, "gamma", 1.0), ValidationError);
}

TEST_CASE("1x1 grid reduces to total STP") {
  const auto net = single(1e-5, 100.0);
  SweepOptions opt;
  const auto r = sweep_2d(net, GridSpec{"h1", {100.0}}, GridSpec{"lambda1", {1e-5}}, opt);
  REQUIRE(r.points.size() == 1);
  CHECK(*r.points[0].analytic_stp == total_stp(net).value);
  CHECK(r.points[0].ran_analytic);
  CHECK(!r.points[0].ran_montecarlo);
}

TEST_CASE("2-D sweep is the row-major Cartesian product") {
  const auto net = single(1e-5, 100.0);
  SweepOptions opt;
  opt.threads = 3;
  const GridSpec a{"h1", {50.0, 100.0, 200.0}};
  const GridSpec b{"lambda1", {1e-6, 1e-5}};
  const auto r = sweep_2d(net, a, b, opt);
  REQUIRE(r.points.size() == 6);
  CHECK(r.points[1].coords == std::vector<double>{50.0, 1e-5});
  CHECK(r.points[2].coords == std::vector<double>{100.0, 1e-6});
  CHECK(*r.points[3].analytic_stp ==
        total_stp(with_parameter(with_parameter(net, "h1", 100.0), "lambda1", 1e-5)).value);
  CHECK(!r.metadata.engine_version.empty());
  CHECK(!r.metadata.timestamp.empty());
}

TEST_CASE("identical grid values give identical outputs") {
  const auto net = single(1e-5, 100.0);
  SweepOptions opt;
  opt.engines = {true, true};
  opt.sim.trials = 400;
  opt.association = true;
  const auto r = sweep_1d(net, GridSpec{"h1", {120.0, 120.0}}, opt);
  REQUIRE(r.points.size() == 2);
  CHECK(*r.points[0].analytic_stp == *r.points[1].analytic_stp);
  CHECK(r.points[0].mc->mean == r.points[1].mc->mean);
  CHECK(r.points[0].association->entries == r.points[1].association->entries);
  CHECK(point_seed(1, {120.0}) == point_seed(1, {120.0}));
  CHECK(point_seed(1, {120.0}) != point_seed(1, {121.0}));
  CHECK(point_seed(1, {120.0}) != point_seed(2, {120.0}));
}

TEST_CASE("sweeps are reproducible and thread-count invariant") {
  const auto net = single(1e-5, 100.0);
  SweepOptions opt;
  opt.engines = {true, true};
  opt.sim.trials = 300;
  const GridSpec g{"h1", {60.0, 150.0, 300.0}};
  const auto a = sweep_1d(net, g, opt);
  opt.threads = 3;
  const auto b = sweep_1d(net, g, opt);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(*a.points[i].analytic_stp == *b.points[i].analytic_stp);
    CHECK(a.points[i].mc->mean == b.points[i].mc->mean);
    CHECK(a.points[i].mc->std_error == b.points[i].mc->std_error);
  }
}

TEST_CASE("per-point failures are recorded, not fatal") {
  const auto net = single(1e-5, 100.0);
  SweepOptions opt;
  const auto r = sweep_1d(net, GridSpec{"alpha_los", {2.5, 1.5, 3.0}}, opt);
  REQUIRE(r.points.size() == 3);
  CHECK(r.points[0].error.empty());
  CHECK(!r.points[1].error.empty());
  CHECK(!r.points[1].analytic_stp.has_value());
  CHECK(r.points[2].analytic_stp.has_value());
}

TEST_CASE("optimal density below the bound") {
  const auto net = single(1e-5, 100.0);
  const auto od = optimal_density(
      net, 0, GridSpec::logarithmic("lambda1", 1e-7, std::pow(10.0, -3.5), 15));
  REQUIRE(od.bound.has_value());
  CHECK(od.bound_ge_argmax);
  CHECK(od.argmax_density <= *od.bound);
  CHECK(!od.boundary_solution);
  CHECK(od.stp.size() == 15);
}

TEST_CASE("monotone density grid gives a boundary solution") {
  const auto net = single(1e-5, 100.0);
  const auto od = optimal_density(net, 0, GridSpec::logarithmic("lambda1", 1e-9, 1e-7, 5));
  CHECK(od.boundary_solution);
  CHECK(od.argmax_density == doctest::Approx(1e-7));
}

TEST_CASE("bound omitted with a warning for Nakagami shapes") {
  auto net = single(1e-5, 100.0);
  net.channel.m_los = 3;
  const auto od = optimal_density(net, 0, GridSpec::logarithmic("lambda1", 1e-7, 1e-4, 4));
  CHECK(!od.bound.has_value());
  CHECK(!od.warning.empty());
}

TEST_CASE("iso-total-density slices") {
  NetworkSpec net{{LayerSpec{1e-5, 100.0, 1.0}, LayerSpec{1e-5, 200.0, 1.0}}, {}};
  SweepOptions opt;
  std::vector<double> f;
  for (int i = 0; i <= 20; ++i) f.push_back(i / 20.0);
  const auto low = iso_total_density(net, 1e-6, f, opt);
  CHECK(low.argmax_fraction <= 0.2);
  CHECK(low.sweep.points.size() == 21);
  const auto high = iso_total_density(net, std::pow(10.0, -4.6), f, opt);
  CHECK(high.argmax_fraction >= 0.8);
  CHECK_THROWS_AS(iso_total_density(net, 0.0, f, opt), ValidationError);
  CHECK_THROWS_AS(iso_total_density(net, 1e-6, {0.5, 1.5}, opt), ValidationError);
  CHECK_THROWS_AS(iso_total_density(NetworkSpec{{LayerSpec{1e-5, 100.0, 1.0}}, {}}, 1e-6, f, opt),
                  ValidationError);
}

}  // TEST_SUITE
