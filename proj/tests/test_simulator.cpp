#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lora/analysis.hpp"
#include "lora/errors.hpp"
#include "lora/simulator.hpp"

using namespace lora;
using sim::Estimate;

namespace {

bool within(double analytic, const Estimate& e, double k = 3.0) {
  return std::abs(analytic - e.mean) <= k * e.std_error;
}

// One available gateway at (100, 0) with all channels free, plus EDs at
// the given positions.
sim::Realization single_cell(const sim::Simulator& s, int n_eds) {
  sim::Realization r;
  r.gw_x = {100.0};
  r.gw_y = {0.0};
  r.gw_mask = {(std::uint64_t{1} << s.derived().params.n_ch) - 1};
  r.available = {0};
  r.avail_x = {100.0};
  r.avail_y = {0.0};
  r.avail_dist2 = {1e4};
  r.avail_fading = {1.0};
  for (int i = 0; i < n_eds; ++i) {
    r.ed_x.push_back(90.0 + i);
    r.ed_y.push_back(5.0);
    r.ed_cell.push_back(0);
  }
  r.degenerate = false;
  r.serving = 0;
  r.channel = 2;
  return r;
}

sim::SimConfig quick(std::uint64_t n) {
  sim::SimConfig c;
  c.n_iterations = n;
  c.fidelity = sim::Fidelity::Thinned;
  c.rng_seed = 11;
  return c;
}

}  // namespace

TEST_SUITE("simulator") {
  TEST_CASE("configuration checks") {
    sim::SimConfig c;
    c.n_iterations = 0;
    CHECK_THROWS_AS(sim::Simulator(NetworkParams{}, c), ValidationError);
    NetworkParams p;
    p.n_ch = 65;
    CHECK_THROWS_AS(sim::Simulator(p, quick(1)), ValidationError);
    sim::SimConfig small = quick(1);
    small.region_radius_m = 1000.0;
    CHECK(sim::Simulator(NetworkParams{}, small).warnings().size() == 1);
    CHECK(sim::Simulator(NetworkParams{}, quick(1)).warnings().empty());
    CHECK(sim::parse_fidelity("thinned") == sim::Fidelity::Thinned);
    CHECK_THROWS_AS(sim::parse_fidelity("x"), DomainError);
  }

  TEST_CASE("empty region is always degenerate") {
    sim::SimConfig c = quick(200);
    c.region_radius_m = 1e-3;
    const auto r = sim::run(NetworkParams{}, c);
    CHECK(r.n_degenerate == 200);
    CHECK(r.degenerate_rate.mean == 1.0);
    CHECK(r.p_sel.n == 0);
  }

  TEST_CASE("full availability when every channel is free") {
    NetworkParams p;
    p.rho = 1.0;
    const sim::Simulator s(p, quick(10));
    for (std::uint64_t i = 0; i < 10; ++i) {
      const auto real = s.sample_realization(i);
      CHECK(real.available.size() == real.gw_x.size());
    }
  }

  TEST_CASE("realization invariants") {
    const sim::Simulator s(NetworkParams{}, quick(5));
    for (std::uint64_t i = 0; i < 5; ++i) {
      const auto real = s.sample_realization(i);
      REQUIRE_FALSE(real.degenerate);
      const double r2 = s.near_radius() * s.near_radius();
      for (std::size_t g = 0; g < real.gw_x.size(); ++g) CHECK(real.gw_x[g] * real.gw_x[g] + real.gw_y[g] * real.gw_y[g] <= r2);
      for (double d : real.avail_dist2) CHECK(d >= real.avail_dist2[real.serving]);
      CHECK(((real.gw_mask[real.available[real.serving]] >> real.channel) & 1U) == 1U);
      for (std::size_t e = 0; e < real.ed_x.size(); ++e) {
        const double dx = real.ed_x[e] - real.avail_x[real.ed_cell[e]];
        const double dy = real.ed_y[e] - real.avail_y[real.ed_cell[e]];
        for (std::size_t j = 0; j < real.available.size(); ++j) {
          const double ex = real.ed_x[e] - real.avail_x[j], ey = real.ed_y[e] - real.avail_y[j];
          CHECK(dx * dx + dy * dy <= ex * ex + ey * ey);
        }
      }
      for (double d : real.far_dist2) {
        CHECK(d >= r2);
        CHECK(d <= s.far_radius() * s.far_radius());
      }
      // Same stream index, same realization.
      const auto again = s.sample_realization(i);
      CHECK(again.gw_x == real.gw_x);
      CHECK(again.far_fading == real.far_fading);
    }
  }

  TEST_CASE("a lightly loaded cell serves everyone") {
    const sim::Simulator s(NetworkParams{}, quick(1));
    const auto real = single_cell(s, 3);
    for (std::uint64_t i = 0; i < 50; ++i) {
      const auto sch = s.simulate_load(real, i);
      CHECK(sch.selected);
      CHECK(sch.load[0] == 3);
      CHECK(sch.free[0] == 8);
      CHECK(sch.typical_act == doctest::Approx(s.derived().a_ratio / 8.0));
      const double r_in = 0.25 * s.near_radius();
      const double expected = s.derived().lambda_gw_a * std::numbers::pi * r_in * r_in;
      CHECK(sch.sampled_act == doctest::Approx(3.0 / 8.0 / expected));
    }
  }

  TEST_CASE("a gateway without EDs is silent") {
    const sim::Simulator s(NetworkParams{}, [] {
      sim::SimConfig c = quick(1);
      c.fidelity = sim::Fidelity::Full;
      return c;
    }());
    auto real = single_cell(s, 0);
    real.gw_x.push_back(-300.0);
    real.gw_y.push_back(0.0);
    real.gw_mask.push_back(0xFF);
    real.available.push_back(1);
    real.avail_x.push_back(-300.0);
    real.avail_y.push_back(0.0);
    real.avail_dist2.push_back(9e4);
    real.avail_fading.push_back(1.0);
    for (std::uint64_t i = 0; i < 50; ++i) {
      const auto sch = s.simulate_load(real, i);
      CHECK(sch.active_on_channel[1] == 0);
      // No interferers anywhere: every SIR test passes.
      const auto out = s.evaluate_typical(real, sch);
      for (const auto& so : out.schemes)
        for (const auto& row : so.sir)
          for (bool b : row) CHECK(b);
    }
  }

  TEST_CASE("crowded cell selection frequency") {
    const sim::Simulator s(NetworkParams{}, quick(1));
    const auto real = single_cell(s, 15);  // 16 contenders for 8 channels
    int hits = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) hits += s.simulate_load(real, static_cast<std::uint64_t>(i)).selected;
    const double p = static_cast<double>(hits) / n;
    CHECK(std::abs(p - 0.5) < 3.0 * std::sqrt(0.25 / n));
  }

  TEST_CASE("determinism across thread counts") {
    sim::SimConfig c = quick(3000);
    c.fidelity = sim::Fidelity::Full;
    c.threads = 1;
    const auto a = sim::run(NetworkParams{}, c);
    c.threads = 3;
    const auto b = sim::run(NetworkParams{}, c);
    CHECK(a.p_act.mean == b.p_act.mean);
    CHECK(a.p_sel.mean == b.p_sel.mean);
    for (int s = 0; s < 2; ++s)
      for (int m = 0; m < 2; ++m) {
        CHECK(a.schemes[s].ase_total[m].mean == b.schemes[s].ase_total[m].mean);
        CHECK(a.schemes[s].ase_total[m].std_error == b.schemes[s].ase_total[m].std_error);
        for (int k = 0; k < kNumSf; ++k) CHECK(a.schemes[s].pcov[m][k].mean == b.schemes[s].pcov[m][k].mean);
      }
    c.n_iterations = 1;
    const auto one = sim::run(NetworkParams{}, c);
    const auto two = sim::run(NetworkParams{}, c);
    CHECK(one.pcov_snr[0].mean == two.pcov_snr[0].mean);
    CHECK(one.p_sel.mean == two.p_sel.mean);
  }

  TEST_CASE("distributional checks and SNR-only coverage at 1e5 realizations") {
    sim::SimConfig c = quick(100000);
    c.interference_enabled = false;
    const NetworkParams p;
    const auto r = sim::run(p, c);
    const DerivedParams d = derive(p);
    const double ratio = r.gateway_count_variance / r.gateway_count.mean;
    CHECK(ratio > 0.97);
    CHECK(ratio < 1.03);
    CHECK(within(p.lambda_gw * std::acos(-1.0) * r.near_radius_m * r.near_radius_m, r.gateway_count));
    CHECK(within(d.mu, r.available_fraction));
    for (int k = 7; k <= 12; ++k) {
      CHECK(within(analysis::pcov_snr(Sf(k), d), r.pcov_snr[k - 7]));
      // Without interference coverage reduces to the SNR test.
      CHECK(r.schemes[0].pcov[1][k - 7].mean == r.pcov_snr[k - 7].mean);
    }
    CHECK(within(analysis::selection_prob(d), r.p_sel));
    CHECK(within(analysis::active_prob(d), r.p_act));
  }

  TEST_CASE("active probability across cell loads") {
    const NetworkParams base;
    const DerivedParams d0 = derive(base);
    double last = 0.0;
    for (double a : {0.5, 2.0, 10.0, 200.0}) {
      NetworkParams p = base;
      p.theta_active = a * d0.lambda_gw_a / p.lambda_ed;
      sim::SimConfig c = quick(20000);
      c.interference_enabled = false;
      const auto r = sim::run(p, c);
      const double analytic = analysis::active_prob(derive(p));
      CAPTURE(a);
      CHECK(within(analytic, r.p_act));
      CHECK(within(analytic, r.p_act_sampled));
      const double se = std::hypot(r.p_act.std_error, r.p_act_sampled.std_error);
      CHECK(std::abs(r.p_act.mean - r.p_act_sampled.mean) <= 3.0 * se);
      CHECK(within(analysis::selection_prob(derive(p)), r.p_sel));
      CHECK(r.p_act.mean > last);
      CHECK(r.p_act.mean < 1.0);
      last = r.p_act.mean;
    }
  }

  TEST_CASE("coverage and ASE against the closed forms, thinned interferers") {
    const NetworkParams p;
    const auto r = sim::run(p, quick(20000));
    const DerivedParams d = derive(p);
    const RejectionMatrix rej = rejection_matrix();
    for (SfScheme s : {SfScheme::FairCollision, SfScheme::Random}) {
      for (auto m : {analysis::InterferenceMode::CoOnly, analysis::InterferenceMode::CoAndInter}) {
        const auto a = analysis::ase(sf_allocation(s), m, d, rej);
        const auto& est = r.scheme(s);
        const std::size_t mi = m == analysis::InterferenceMode::CoOnly ? 0 : 1;
        for (int k = 0; k < kNumSf; ++k) CHECK(within(a.pcov[k], est.pcov[mi][k]));
        CHECK(within(a.ase_total, est.ase_total[mi]));
      }
    }
  }

  TEST_CASE("standard error halves with four times the iterations") {
    sim::SimConfig c = quick(4000);
    c.interference_enabled = false;
    const auto small = sim::run(NetworkParams{}, c);
    c.n_iterations = 16000;
    const auto large = sim::run(NetworkParams{}, c);
    CHECK(small.pcov_snr[0].std_error / large.pcov_snr[0].std_error == doctest::Approx(2.0).epsilon(0.15));
    CHECK(small.p_act.std_error / large.p_act.std_error == doctest::Approx(2.0).epsilon(0.15));
  }
}
