#include "ganforge/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "ganforge/errors.hpp"
#include "ganforge/losses.hpp"
#include "ganforge/models.hpp"
#include "ganforge/ops.hpp"
#include "ganforge/rng.hpp"

namespace ganforge {

double GradCheckReport::max_rel_error() const {
  double m = 0.0;
  for (const auto& e : entries) m = std::max(m, e.max_rel_error);
  return m;
}

bool GradCheckSuite::all_pass() const {
  return std::all_of(cases.begin(), cases.end(), [](const GradCheckCase& c) { return c.pass(); });
}

GradCheckReport grad_check(const std::function<Tensor<double>()>& f,
                           const std::vector<std::pair<std::string, Tensor<double>>>& params,
                           double step) {
  for (const auto& p : params) {
    auto t = p.second;
    t.zero_grad();
  }
  f().backward();

  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (const auto& p : params) {
    auto t = p.second;
    analytic.push_back(t.has_grad() ? t.grad() : std::vector<double>(t.numel(), 0.0));
  }

  GradCheckReport report;
  for (size_t pi = 0; pi < params.size(); ++pi) {
    auto t = params[pi].second;
    auto& v = t.values();
    double worst = 0.0;
    for (size_t j = 0; j < v.size(); ++j) {
      const double old = v[j];
      v[j] = old + step;
      const double fp = f().item();
      v[j] = old - step;
      const double fm = f().item();
      v[j] = old;
      const double numeric = (fp - fm) / (2.0 * step);
      const double a = analytic[pi][j];
      const double rel =
          std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6});
      worst = std::max(worst, rel);
    }
    report.entries.push_back({params[pi].first, worst});
  }
  return report;
}

namespace {

Tensor<double> random_tensor(Shape shape, Rng& rng, double scale, bool requires_grad) {
  std::vector<double> v(shape_numel(shape));
  for (auto& x : v) x = rng.gaussian(0.0, scale);
  return Tensor<double>(std::move(shape), std::move(v), requires_grad);
}

// Keeps every element at least `margin` away from the kink at zero so the
// central difference never straddles it.
Tensor<double> random_tensor_off_zero(Shape shape, Rng& rng, double margin, bool requires_grad) {
  auto t = random_tensor(std::move(shape), rng, 1.0, requires_grad);
  for (auto& x : t.values()) x += (x < 0.0 ? -margin : margin);
  return t;
}

GradCheckCase run_case(const std::string& op, double tolerance,
                       const std::function<Tensor<double>()>& f,
                       const std::vector<std::pair<std::string, Tensor<double>>>& params) {
  auto report = grad_check(f, params);
  return {op, report.max_rel_error(), tolerance};
}

std::vector<std::pair<std::string, Tensor<double>>> named_params(Network<double>& net) {
  std::vector<std::pair<std::string, Tensor<double>>> out;
  for (auto& p : net.params()) out.emplace_back(p.name, p.tensor);
  return out;
}

GradCheckCase case_conv2d(uint64_t seed) {
  Rng rng(seed);
  auto x = random_tensor({2, 3, 8, 8}, rng, 1.0, true);
  auto w = random_tensor({4, 3, 5, 5}, rng, 0.2, true);
  auto b = random_tensor({4}, rng, 0.2, true);
  auto probe = random_tensor({2, 4, 4, 4}, rng, 1.0, false);
  auto f = [=] { return mean_all(mul(conv2d(x, w, b, 2, 2), probe)); };
  return run_case("conv2d", 1e-4, f, {{"x", x}, {"w", w}, {"b", b}});
}

GradCheckCase case_conv_transpose2d(uint64_t seed) {
  Rng rng(seed);
  auto x = random_tensor({2, 3, 4, 4}, rng, 1.0, true);
  auto w = random_tensor({3, 2, 5, 5}, rng, 0.2, true);
  auto b = random_tensor({2}, rng, 0.2, true);
  auto probe = random_tensor({2, 2, 8, 8}, rng, 1.0, false);
  auto f = [=] { return mean_all(mul(conv_transpose2d(x, w, b, 2, 2, 1), probe)); };
  return run_case("conv_transpose2d", 1e-4, f, {{"x", x}, {"w", w}, {"b", b}});
}

GradCheckCase case_batch_norm(uint64_t seed) {
  Rng rng(seed);
  auto x = random_tensor({4, 3, 5, 5}, rng, 1.0, true);
  auto gamma = random_tensor({3}, rng, 0.1, true);
  for (auto& g : gamma.values()) g += 1.0;
  auto beta = random_tensor({3}, rng, 0.1, true);
  auto probe = random_tensor({4, 3, 5, 5}, rng, 1.0, false);
  // Fresh running-stat buffers per evaluation so the EMA side effect cannot
  // leak across finite-difference evaluations.
  auto f = [=] {
    std::vector<double> rm(3, 0.0), rv(3, 1.0);
    return mean_all(mul(batch_norm(x, gamma, beta, rm, rv, true, 0.9, 1e-5), probe));
  };
  return run_case("batch_norm", 1e-3, f, {{"x", x}, {"gamma", gamma}, {"beta", beta}});
}

GradCheckCase case_dense(uint64_t seed) {
  Rng rng(seed);
  auto x = random_tensor({3, 7}, rng, 1.0, true);
  auto w = random_tensor({7, 4}, rng, 0.3, true);
  auto b = random_tensor({4}, rng, 0.3, true);
  auto probe = random_tensor({3, 4}, rng, 1.0, false);
  auto f = [=] { return mean_all(mul(dense(x, w, b), probe)); };
  return run_case("dense", 1e-4, f, {{"x", x}, {"w", w}, {"b", b}});
}

GradCheckCase case_activation(const std::string& name, Act kind, double alpha, uint64_t seed) {
  Rng rng(seed);
  auto x = random_tensor_off_zero({2, 3, 4, 4}, rng, 1e-2, true);
  auto probe = random_tensor({2, 3, 4, 4}, rng, 1.0, false);
  auto f = [=] { return mean_all(mul(activate(x, kind, alpha), probe)); };
  return run_case(name, 1e-6, f, {{"x", x}});
}

GradCheckCase case_elementwise(uint64_t seed) {
  Rng rng(seed);
  auto a = random_tensor({3, 5}, rng, 1.0, true);
  auto b = random_tensor({3, 5}, rng, 1.0, true);
  auto probe = random_tensor({5, 3}, rng, 1.0, false);
  auto f = [=] {
    auto y = reshape(affine(mul(add(a, b), a), 0.7, 0.3), {5, 3});
    return mean_all(mul(y, probe));
  };
  return run_case("add_mul_affine_reshape", 1e-6, f, {{"a", a}, {"b", b}});
}

GradCheckCase case_log(uint64_t seed) {
  Rng rng(seed);
  auto raw = random_tensor({4, 4}, rng, 0.3, true);
  for (auto& v : raw.values()) v = 0.5 + std::abs(v);
  auto probe = random_tensor({4, 4}, rng, 1.0, false);
  auto f = [=] { return mean_all(mul(log_clamped(raw, 1e-12), probe)); };
  return run_case("log", 1e-6, f, {{"x", raw}});
}

GradCheckCase case_toy_generator(uint64_t seed) {
  auto net = build_generator<double>(16, 8, 1.0 / 128.0);
  init_params(net, derive_seed(seed, 1));
  Rng rng(derive_seed(seed, 2));
  std::vector<double> zv(2 * 8);
  for (auto& v : zv) v = rng.uniform(-1.0, 1.0);
  Tensor<double> z({2, 8}, std::move(zv), false);
  auto probe = random_tensor({2, 3, 16, 16}, rng, 1.0, false);
  auto netp = std::make_shared<Network<double>>(std::move(net));
  auto f = [netp, z, probe] { return mean_all(mul(netp->forward(z, true), probe)); };
  return run_case("toy_generator", 1e-4, f, named_params(*netp));
}

GradCheckCase case_toy_discriminator(uint64_t seed) {
  auto net = build_discriminator<double>(16, 1.0 / 128.0);
  init_params(net, derive_seed(seed, 1));
  Rng rng(derive_seed(seed, 2));
  auto x_real = random_tensor({2, 3, 16, 16}, rng, 0.5, false);
  auto x_fake = random_tensor({2, 3, 16, 16}, rng, 0.5, false);
  auto netp = std::make_shared<Network<double>>(std::move(net));
  auto f = [netp, x_real, x_fake] {
    return d_loss(netp->forward(x_real, true), netp->forward(x_fake, true));
  };
  return run_case("toy_discriminator", 1e-3, f, named_params(*netp));
}

GradCheckCase case_composed(uint64_t seed) {
  auto g = build_generator<double>(8, 6, 1.0 / 128.0);
  auto d = build_discriminator<double>(8, 1.0 / 128.0);
  init_params(g, derive_seed(seed, 1));
  init_params(d, derive_seed(seed, 2));
  Rng rng(derive_seed(seed, 3));
  std::vector<double> zv(2 * 6);
  for (auto& v : zv) v = rng.uniform(-1.0, 1.0);
  Tensor<double> z({2, 6}, std::move(zv), false);
  auto gp = std::make_shared<Network<double>>(std::move(g));
  auto dp = std::make_shared<Network<double>>(std::move(d));
  auto f = [gp, dp, z] {
    return g_loss(dp->forward(gp->forward(z, true), true), GLossMode::NonSaturating);
  };
  std::vector<std::pair<std::string, Tensor<double>>> params;
  for (auto& p : named_params(*gp)) params.emplace_back("G." + p.first, p.second);
  for (auto& p : named_params(*dp)) params.emplace_back("D." + p.first, p.second);
  return run_case("composed_g_d", 1e-4, f, params);
}

// Forward scales by 2 but the backward claims 2.2; the checker must flag it.
GradCheckCase case_corrupted(uint64_t seed) {
  Rng rng(seed);
  auto x = random_tensor({3, 3}, rng, 1.0, true);
  auto probe = random_tensor({3, 3}, rng, 1.0, false);
  auto f = [=] {
    std::vector<double> out(x.numel());
    for (size_t i = 0; i < out.size(); ++i) out[i] = 2.0 * x.values()[i];
    auto xi = x;
    auto y = Tensor<double>::make_op(x.shape(), std::move(out), "corrupted_scale", {x},
                                     [xi](auto& node) mutable {
                                       double* dx = xi.grad().data();
                                       for (size_t i = 0; i < node.grad.size(); ++i)
                                         dx[i] += 2.2 * node.grad[i];
                                     });
    return mean_all(mul(y, probe));
  };
  return run_case("corrupted_scale", 1e-4, f, {{"x", x}});
}

}  // namespace

GradCheckSuite run_grad_check_suite(const std::string& preset) {
  if (preset != "default" && preset != "negative-control") {
    throw ConfigError("unknown grad-check preset '" + preset +
                      "' (expected 'default' or 'negative-control')");
  }
  const uint64_t base = 0x67616e666f726765ULL;
  GradCheckSuite suite;
  suite.cases.push_back(case_conv2d(derive_seed(base, 10)));
  suite.cases.push_back(case_conv_transpose2d(derive_seed(base, 11)));
  suite.cases.push_back(case_batch_norm(derive_seed(base, 12)));
  suite.cases.push_back(case_dense(derive_seed(base, 13)));
  suite.cases.push_back(case_activation("relu", Act::ReLU, 0.0, derive_seed(base, 14)));
  suite.cases.push_back(case_activation("leaky_relu", Act::LeakyReLU, 0.2, derive_seed(base, 15)));
  suite.cases.push_back(case_activation("tanh", Act::Tanh, 0.0, derive_seed(base, 16)));
  suite.cases.push_back(case_activation("sigmoid", Act::Sigmoid, 0.0, derive_seed(base, 17)));
  suite.cases.push_back(case_elementwise(derive_seed(base, 18)));
  suite.cases.push_back(case_log(derive_seed(base, 19)));
  suite.cases.push_back(case_toy_generator(derive_seed(base, 20)));
  suite.cases.push_back(case_toy_discriminator(derive_seed(base, 21)));
  suite.cases.push_back(case_composed(derive_seed(base, 22)));
  if (preset == "negative-control") {
    suite.cases.push_back(case_corrupted(derive_seed(base, 23)));
  }
  return suite;
}

}  // namespace ganforge
