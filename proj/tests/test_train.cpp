#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <deque>
#include <limits>
#include <vector>

#include "ganforge/config.hpp"
#include "ganforge/errors.hpp"
#include "ganforge/losses.hpp"
#include "ganforge/optimizer.hpp"
#include "ganforge/rng.hpp"
#include "ganforge/schedule.hpp"
#include "ganforge/trainer.hpp"

using namespace ganforge;

namespace {

Tensor<double> prob_batch(int n, double p) { return Tensor<double>::full({n, 1}, p, true); }

// Re-derivation of the guard from its definition, written forward instead of
// backward: track the running streak length per band and warn when it
// reaches the window.
GuardStatus brute_force_guard(const std::deque<LossRecord>& history, GuardBands bands,
                              int window) {
  GuardStatus status;
  long d_streak = 0, g_streak = 0;
  size_t d_start = 0, g_start = 0;
  for (size_t i = 0; i < history.size(); ++i) {
    if (history[i].d_loss >= bands.d) {
      if (d_streak == 0) d_start = i;
      ++d_streak;
    } else {
      d_streak = 0;
    }
    if (history[i].g_loss >= bands.g) {
      if (g_streak == 0) g_start = i;
      ++g_streak;
    } else {
      g_streak = 0;
    }
  }
  if (d_streak >= window) status.d = GuardWarning{history[d_start].step};
  if (g_streak >= window) status.g = GuardWarning{history[g_start].step};
  return status;
}

RunConfig toy_config(int total_steps, GLossMode mode, ScheduleMode sched) {
  RunConfig cfg;
  cfg.seed = 7;
  cfg.resolution = 8;
  cfg.width_multiplier = 0.125;
  cfg.batch_override = 8;
  cfg.latent_dim = 16;
  cfg.total_steps = total_steps;
  cfg.alt_interval = 10;
  cfg.guard_window = 25;
  cfg.g_loss_mode = mode;
  cfg.schedule_mode = sched;
  return cfg;
}

Tensor<float> synthetic_images(int n, int r, uint64_t seed) {
  Rng rng(seed);
  std::vector<float> v(static_cast<size_t>(n) * 3 * r * r);
  for (auto& x : v) x = static_cast<float>(rng.uniform(-1.0, 1.0));
  return Tensor<float>({n, 3, r, r}, std::move(v));
}

}  // namespace

TEST_CASE("loss fixed points at D == 1/2") {
  const double ln2 = std::log(2.0);
  Tensor<double> d = d_loss(prob_batch(4, 0.5), prob_batch(4, 0.5));
  CHECK(std::fabs(d.item() - 2.0 * ln2) < 1e-12);
  CHECK(std::fabs(g_loss(prob_batch(4, 0.5), GLossMode::NonSaturating).item() - ln2) < 1e-12);
  CHECK(std::fabs(g_loss(prob_batch(4, 0.5), GLossMode::PaperLiteral).item() + ln2) < 1e-12);
}

TEST_CASE("d_loss vanishes for a perfect discriminator and stays finite when clamped") {
  CHECK(d_loss(prob_batch(2, 1.0 - 1e-9), prob_batch(2, 1e-9)).item() < 1e-8);
  // Fully saturated: the 1e-12 clamp keeps it at -2*log(1e-12).
  const double sat = d_loss(prob_batch(2, 0.0), prob_batch(2, 1.0)).item();
  CHECK(std::isfinite(sat));
  CHECK(sat == doctest::Approx(-2.0 * std::log(1e-12)).epsilon(1e-9));
}

TEST_CASE("both generator objectives push D(G(z)) upward") {
  for (GLossMode mode : {GLossMode::PaperLiteral, GLossMode::NonSaturating}) {
    Tensor<double> p = prob_batch(3, 0.3);
    Tensor<double> loss = g_loss(p, mode);
    loss.backward();
    // Negative gradient means a gradient-descent step raises p.
    for (double g : p.grad()) CHECK(g < 0.0);
  }
  CHECK_THROWS_AS(parse_g_loss_mode("minimax"), ConfigError);
  CHECK(parse_g_loss_mode("paper_literal") == GLossMode::PaperLiteral);
  CHECK(parse_g_loss_mode("non_saturating") == GLossMode::NonSaturating);
}

TEST_CASE("d_loss requires equal batch sizes") {
  CHECK_THROWS_AS(d_loss(prob_batch(2, 0.5), prob_batch(3, 0.5)), ConfigError);
}

TEST_CASE("extra-interval plan: baseline pair plus alternating extras") {
  int extras = 0;
  ExtraTarget expected_next = ExtraTarget::G;
  long d_total = 0, g_total = 0;
  for (long step = 1; step <= 500; ++step) {
    UpdatePlan plan = plan_step(step, 50);
    if (step % 50 != 0) {
      CHECK(plan.extra == ExtraTarget::None);
      CHECK(plan.d_updates == 1);
      CHECK(plan.g_updates == 1);
    } else {
      ++extras;
      CHECK(plan.extra == expected_next);
      if (expected_next == ExtraTarget::G) {
        CHECK(plan.g_updates == 2);
        CHECK(plan.d_updates == 1);
      } else {
        CHECK(plan.d_updates == 2);
        CHECK(plan.g_updates == 1);
      }
      expected_next = expected_next == ExtraTarget::G ? ExtraTarget::D : ExtraTarget::G;
    }
    d_total += plan.d_updates;
    g_total += plan.g_updates;
    // Extras alternate, so the two networks never drift more than one
    // update apart at any prefix.
    CHECK(std::labs(d_total - g_total) <= 1);
    if (step == 200) {
      CHECK(d_total + g_total == 404);
      CHECK(d_total == 202);
      CHECK(g_total == 202);
    }
  }
  CHECK(extras == 10);
}

TEST_CASE("extra-interval plan with k=1 alternates every step") {
  CHECK(plan_step(1, 1).extra == ExtraTarget::G);
  CHECK(plan_step(2, 1).extra == ExtraTarget::D);
  CHECK(plan_step(3, 1).extra == ExtraTarget::G);
}

TEST_CASE("block plan alternates k-step one-sided blocks starting with D") {
  for (long step = 1; step <= 200; ++step) {
    UpdatePlan plan = plan_step_block(step, 25);
    const bool d_block = ((step - 1) / 25) % 2 == 0;
    CHECK(plan.extra == ExtraTarget::None);
    CHECK(plan.d_updates == (d_block ? 1 : 0));
    CHECK(plan.g_updates == (d_block ? 0 : 1));
  }
  CHECK(plan_for(ScheduleMode::BlockAlternation, 1, 25).g_updates == 0);
  CHECK(plan_for(ScheduleMode::ExtraInterval, 1, 25).g_updates == 1);
}

TEST_CASE("plan rejects nonpositive steps and intervals") {
  CHECK_THROWS_AS(plan_step(0, 50), ConfigError);
  CHECK_THROWS_AS(plan_step(1, 0), ConfigError);
  CHECK_THROWS_AS(plan_step_block(0, 50), ConfigError);
  CHECK_THROWS_AS(plan_step_block(1, 0), ConfigError);
}

TEST_CASE("guard ignores in-band oscillation") {
  std::deque<LossRecord> history;
  for (long t = 1; t <= 300; ++t) {
    history.push_back({t, 0.7 + 0.2 * std::sin(0.37 * t), 2.0 + 0.8 * std::cos(0.11 * t)});
    CHECK(divergence_guard(history, GuardBands{}, 25).ok());
  }
}

TEST_CASE("guard warns on exponential D drift at the analytic step") {
  // d(t) = 0.5 * 1.01^t crosses the band 1.0 at t = ceil(ln 2 / ln 1.01) = 70,
  // so a window of 5 first fills at step 74.
  std::deque<LossRecord> history;
  const int window = 5;
  for (long t = 1; t <= 120; ++t) {
    history.push_back({t, 0.5 * std::pow(1.01, static_cast<double>(t)), 0.1});
    GuardStatus s = divergence_guard(history, GuardBands{}, window);
    if (t < 74) {
      CHECK(s.ok());
    } else {
      REQUIRE(s.d.has_value());
      CHECK_FALSE(s.g.has_value());
      CHECK(s.d->since_step == 70);
      CHECK(s.str() == "warn_D");
    }
  }
}

TEST_CASE("guard reports a G streak from its first step") {
  std::deque<LossRecord> history;
  for (long t = 1; t <= 19; ++t) history.push_back({t, 0.2, 3.5});
  CHECK(divergence_guard(history, GuardBands{}, 20).ok());  // window not yet filled
  history.push_back({20, 0.2, 3.5});
  GuardStatus s = divergence_guard(history, GuardBands{}, 20);
  REQUIRE(s.g.has_value());
  CHECK(s.g->since_step == 1);
  CHECK(s.str() == "warn_G");
}

TEST_CASE("guard flags both networks at once") {
  std::deque<LossRecord> history;
  for (long t = 1; t <= 4; ++t) history.push_back({t, 1.5, 4.0});
  CHECK(divergence_guard(history, GuardBands{}, 4).str() == "warn_DG");
}

TEST_CASE("guard fuzz agrees with a forward streak scan") {
  Rng rng(31337);
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(60));
    const int window = 1 + static_cast<int>(rng.below(12));
    std::deque<LossRecord> history;
    for (int t = 1; t <= n; ++t) {
      // Values hug the bands so streaks of every length appear.
      history.push_back({static_cast<long>(t), rng.uniform(0.8, 1.2), rng.uniform(2.6, 3.4)});
    }
    GuardStatus got = divergence_guard(history, GuardBands{}, window);
    GuardStatus want = brute_force_guard(history, GuardBands{}, window);
    REQUIRE(got.d.has_value() == want.d.has_value());
    REQUIRE(got.g.has_value() == want.g.has_value());
    if (got.d) CHECK(got.d->since_step == want.d->since_step);
    if (got.g) CHECK(got.g->since_step == want.g->since_step);
  }
}

TEST_CASE("adam leaves parameters alone when gradients are zero") {
  Tensor<double> x({2}, {1.25, -0.5}, true);
  Adam<double> opt({{"x", x}}, AdamConfig{});
  opt.step();
  opt.step();
  CHECK(x.values()[0] == 1.25);
  CHECK(x.values()[1] == -0.5);
  CHECK(opt.t() == 2);
}

TEST_CASE("adam step size approaches the learning rate under constant gradient") {
  Tensor<double> x({1}, {0.0}, true);
  AdamConfig cfg;
  Adam<double> opt({{"x", x}}, cfg);
  double prev = 0.0;
  for (int i = 0; i < 500; ++i) {
    prev = x.values()[0];
    x.grad()[0] = 1.0;
    opt.step();
  }
  const double delta = std::fabs(x.values()[0] - prev);
  CHECK(delta == doctest::Approx(cfg.learning_rate).epsilon(0.05));
}

TEST_CASE("adam minimizes a quadratic bowl") {
  Tensor<double> x({1}, {2.9}, true);
  Adam<double> opt({{"x", x}}, AdamConfig{});
  for (int i = 0; i < 2000; ++i) {
    x.zero_grad();
    x.grad()[0] = 2.0 * (x.values()[0] - 3.0);
    opt.step();
  }
  CHECK(std::fabs(x.values()[0] - 3.0) < 1e-3);
}

TEST_CASE("adam rejects non-finite gradients by parameter name") {
  Tensor<double> x({1}, {0.0}, true);
  Adam<double> opt({{"g_weird", x}}, AdamConfig{});
  x.grad()[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_WITH_AS(opt.step(), doctest::Contains("g_weird"), NumericError);
}

TEST_CASE("toy session trains finitely under both generator objectives") {
  Tensor<float> images = synthetic_images(24, 8, 99);
  for (GLossMode mode : {GLossMode::NonSaturating, GLossMode::PaperLiteral}) {
    MemoryBatchSource<float> data(images);
    TrainSession<float> session(toy_config(40, mode, ScheduleMode::ExtraInterval), data);
    std::vector<StepLog> rows;
    session.run([&](const StepLog& log) { rows.push_back(log); });
    REQUIRE(rows.size() == 40);
    ExtraTarget expect = ExtraTarget::G;
    for (const StepLog& row : rows) {
      CHECK(std::isfinite(row.d_loss));
      CHECK(std::isfinite(row.g_loss));
      if (row.step % 10 == 0) {
        CHECK(row.extra == expect);
        expect = expect == ExtraTarget::G ? ExtraTarget::D : ExtraTarget::G;
      } else {
        CHECK(row.extra == ExtraTarget::None);
      }
    }
    CHECK(session.step() == 40);
    CHECK(session.batch_size() == 8);
  }
}

TEST_CASE("identical seeds reproduce the loss stream bit for bit") {
  Tensor<float> images = synthetic_images(24, 8, 99);
  std::vector<StepLog> a, b;
  {
    MemoryBatchSource<float> data(images);
    TrainSession<float> session(toy_config(30, GLossMode::NonSaturating,
                                           ScheduleMode::ExtraInterval), data);
    session.run([&](const StepLog& log) { a.push_back(log); });
  }
  {
    MemoryBatchSource<float> data(images);
    TrainSession<float> session(toy_config(30, GLossMode::NonSaturating,
                                           ScheduleMode::ExtraInterval), data);
    session.run([&](const StepLog& log) { b.push_back(log); });
  }
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].d_loss == b[i].d_loss);
    CHECK(a[i].g_loss == b[i].g_loss);
    CHECK(a[i].extra == b[i].extra);
    CHECK(a[i].guard == b[i].guard);
  }
}

TEST_CASE("block mode keeps both loss columns populated") {
  Tensor<float> images = synthetic_images(24, 8, 99);
  MemoryBatchSource<float> data(images);
  RunConfig cfg = toy_config(20, GLossMode::NonSaturating, ScheduleMode::BlockAlternation);
  cfg.alt_interval = 5;
  TrainSession<float> session(cfg, data);
  std::vector<StepLog> rows;
  session.run([&](const StepLog& log) { rows.push_back(log); });
  REQUIRE(rows.size() == 20);
  for (const StepLog& row : rows) {
    CHECK(row.extra == ExtraTarget::None);
    CHECK(std::isfinite(row.d_loss));
    CHECK(std::isfinite(row.g_loss));
  }
}

TEST_CASE("halt_on_warn stops after the first warned step") {
  Tensor<float> images = synthetic_images(24, 8, 99);
  MemoryBatchSource<float> data(images);
  RunConfig cfg = toy_config(500, GLossMode::NonSaturating, ScheduleMode::ExtraInterval);
  cfg.guard_window = 3;
  cfg.d_loss_band = 1e-9;  // any positive D loss counts as out of band
  cfg.halt_on_warn = true;
  TrainSession<float> session(cfg, data);
  std::vector<StepLog> rows;
  session.run([&](const StepLog& log) { rows.push_back(log); });
  REQUIRE(rows.size() == 3);
  CHECK(rows.back().guard == "warn_D");
  CHECK(rows[0].guard == "ok");
  CHECK(rows[1].guard == "ok");
}
