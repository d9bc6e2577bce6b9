#include "heasep/gradsuite.hpp"

#include <array>

#include "heasep/harness.hpp"
#include "heasep/ops.hpp"
#include "heasep/seq_model.hpp"

namespace heasep::harness {

using nc::Tensor;

namespace {

Tensor random_param(std::vector<int> shape, Rng& rng, double lo = -2.0, double hi = 2.0) {
  Tensor t = Tensor::zeros(std::move(shape), true);
  for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = rng.uniform(lo, hi);
  return t;
}

Tensor random_const(std::vector<int> shape, Rng& rng) {
  Tensor t = Tensor::zeros(std::move(shape), false);
  for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = rng.uniform(-1.0, 1.0);
  return t;
}

// Scalar projection with a fixed random cotangent so upstream gradients are
// non-degenerate.
Tensor reduce(const Tensor& t, const Tensor& cotangent) {
  return nc::sum(nc::elementwise_mul(t, cotangent));
}

using Params = std::vector<std::pair<std::string, Tensor>>;

struct Check {
  std::string name;
  Params params;
  std::function<Tensor()> f;
};

std::vector<Check> primitive_checks(Rng& rng) {
  std::vector<Check> checks;

  {
    Tensor a = random_param({4, 3}, rng), b = random_param({3, 5}, rng);
    Tensor r = random_const({4, 5}, rng);
    checks.push_back({"matmul", {{"a", a}, {"b", b}},
                      [=] { return reduce(nc::matmul(a, b), r); }});
  }
  {
    Tensor a = random_param({5, 4}, rng), x = random_param({4}, rng);
    Tensor r = random_const({5}, rng);
    checks.push_back({"matvec", {{"a", a}, {"x", x}},
                      [=] { return reduce(nc::matvec(a, x), r); }});
  }
  {
    Tensor a = random_param({5, 4}, rng), x = random_param({5}, rng);
    Tensor r = random_const({4}, rng);
    checks.push_back({"matvec_t", {{"a", a}, {"x", x}},
                      [=] { return reduce(nc::matvec_t(a, x), r); }});
  }
  {
    Tensor a = random_param({3, 6}, rng);
    Tensor r = random_const({6, 3}, rng);
    checks.push_back({"transpose", {{"a", a}}, [=] { return reduce(nc::transpose(a), r); }});
  }
  {
    Tensor a = random_param({7}, rng), b = random_param({7}, rng);
    Tensor r = random_const({7}, rng);
    checks.push_back({"add", {{"a", a}, {"b", b}}, [=] { return reduce(nc::add(a, b), r); }});
    checks.push_back({"sub", {{"a", a}, {"b", b}}, [=] { return reduce(nc::sub(a, b), r); }});
    checks.push_back({"scale", {{"a", a}}, [=] { return reduce(nc::scale(a, -1.7), r); }});
    checks.push_back({"elementwise_mul", {{"a", a}, {"b", b}},
                      [=] { return reduce(nc::elementwise_mul(a, b), r); }});
  }
  {
    Tensor a = random_param({4, 5}, rng), s = random_param({4}, rng);
    Tensor r = random_const({4, 5}, rng);
    checks.push_back({"row_scale", {{"a", a}, {"s", s}},
                      [=] { return reduce(nc::row_scale(a, s), r); }});
  }
  {
    Tensor a = random_param({3}, rng), b = random_param({5}, rng), c = random_param({2}, rng);
    Tensor r = random_const({10}, rng);
    checks.push_back({"concat_vec", {{"a", a}, {"b", b}, {"c", c}}, [=] {
                        const std::array<Tensor, 3> parts = {a, b, c};
                        return reduce(nc::concat(parts), r);
                      }});
  }
  {
    Tensor a = random_param({2, 4}, rng), b = random_param({3, 4}, rng);
    Tensor r = random_const({5, 4}, rng);
    checks.push_back({"concat_mat", {{"a", a}, {"b", b}}, [=] {
                        const std::array<Tensor, 2> parts = {a, b};
                        return reduce(nc::concat(parts), r);
                      }});
  }
  {
    Tensor v = random_param({9}, rng);
    Tensor r = random_const({4}, rng);
    checks.push_back({"slice", {{"v", v}}, [=] { return reduce(nc::slice(v, 3, 4), r); }});
  }
  {
    Tensor table = random_param({6, 4}, rng);
    Tensor r = random_const({4}, rng);
    checks.push_back({"lookup", {{"table", table}},
                      [=] { return reduce(nc::lookup(table, 2), r); }});
    Tensor r2 = random_const({3, 4}, rng);
    checks.push_back({"lookup_rows", {{"table", table}}, [=] {
                        const std::array<int, 3> idx = {5, 0, 5};  // repeated index
                        return reduce(nc::lookup_rows(table, idx), r2);
                      }});
  }
  {
    Tensor v = random_param({6}, rng, -3.0, 3.0);
    Tensor r = random_const({6}, rng);
    checks.push_back({"softmax", {{"v", v}}, [=] { return reduce(nc::softmax(v), r); }});
  }
  {
    Tensor x = random_param({5}, rng, -3.0, 3.0);
    Tensor r = random_const({5}, rng);
    checks.push_back({"sigmoid", {{"x", x}}, [=] { return reduce(nc::sigmoid(x), r); }});
    checks.push_back({"tanh", {{"x", x}}, [=] { return reduce(nc::tanh(x), r); }});
  }
  {
    Tensor x = random_param({3, 4}, rng);
    checks.push_back({"sum", {{"x", x}}, [=] { return nc::sum(x); }});
  }
  {
    Tensor a = random_param({6}, rng), b = random_param({6}, rng);
    checks.push_back({"dot", {{"a", a}, {"b", b}}, [=] { return nc::dot(a, b); }});
  }
  {
    Tensor v = random_param({6}, rng);
    Tensor r = random_const({6}, rng);
    checks.push_back({"mask_fill", {{"v", v}}, [=] {
                        const std::array<std::uint8_t, 6> keep = {1, 0, 1, 1, 0, 1};
                        return reduce(nc::mask_fill(v, keep, -3.25), r);
                      }});
    checks.push_back({"masked_softmax", {{"v", v}}, [=] {
                        const std::array<std::uint8_t, 6> keep = {1, 0, 1, 1, 0, 1};
                        Tensor masked = nc::mask_fill(
                            v, keep, -std::numeric_limits<double>::infinity());
                        return reduce(nc::softmax(masked), r);
                      }});
  }
  {
    Tensor a = random_param({5, 3}, rng);
    Tensor r = random_const({5, 3}, rng);
    checks.push_back({"zero_rows", {{"a", a}}, [=] {
                        const std::array<std::uint8_t, 5> keep = {1, 1, 0, 1, 0};
                        return reduce(nc::zero_rows(a, keep), r);
                      }});
  }
  {
    Tensor logit = random_param({}, rng, -2.0, 2.0);
    checks.push_back({"bce_pos", {{"logit", logit}},
                      [=] { return nc::bce(nc::sigmoid(logit), 1.0); }});
    checks.push_back({"bce_neg", {{"logit", logit}},
                      [=] { return nc::bce(nc::sigmoid(logit), 0.0); }});
  }
  return checks;
}

}  // namespace

prep::WindowSample random_window(int window_hours, Rng& rng, double obs_prob) {
  const int L = window_hours;
  prep::WindowSample w;
  w.window_hours = L;
  w.values.assign(static_cast<std::size_t>(L) * psv::kNumericVars, 0.0);
  w.obs_mask.assign(static_cast<std::size_t>(L) * psv::kNumericVars, 0);
  w.cat_idx.assign(static_cast<std::size_t>(L) * psv::kCategoricalVars,
                   static_cast<std::int8_t>(prep::kEmptyCategory));
  w.pad_mask.assign(static_cast<std::size_t>(L), 0);
  w.patient_id = "random";
  w.t_end = L - 1;
  w.label = rng.bernoulli(0.5) ? 1 : 0;

  const int padded = static_cast<int>(rng.index(static_cast<std::size_t>(L / 2 + 1)));
  for (int t = 0; t < L; ++t) {
    if (t < padded) {
      w.pad_mask[static_cast<std::size_t>(t)] = 1;
      continue;
    }
    for (int j = 0; j < psv::kNumericVars; ++j) {
      if (rng.bernoulli(obs_prob)) {
        auto idx = static_cast<std::size_t>(t) * psv::kNumericVars + static_cast<std::size_t>(j);
        w.values[idx] = rng.normal(0.0, 1.0);
        w.obs_mask[idx] = 1;
      }
    }
    for (int c = 0; c < psv::kCategoricalVars; ++c) {
      w.cat_idx[static_cast<std::size_t>(t) * psv::kCategoricalVars + static_cast<std::size_t>(c)] =
          static_cast<std::int8_t>(rng.index(model::kCategoryCount));
    }
  }
  return w;
}

GradSuiteResult run_gradcheck_suite(
    int primitive_trials, std::uint64_t seed,
    const std::function<void(const std::string&, double)>& on_row) {
  GradSuiteResult result;
  Rng rng(seed);

  // Primitives: fresh random instances every trial.
  for (int trial = 0; trial < primitive_trials; ++trial) {
    for (auto& check : primitive_checks(rng)) {
      const auto report = nc::grad_check(check.f, check.params);
      result.finite = result.finite && report.finite;
      if (report.max_rel_error > result.max_primitive_error) {
        result.max_primitive_error = report.max_rel_error;
        if (on_row && trial == 0) on_row("primitive." + check.name, report.max_rel_error);
      }
    }
  }
  if (on_row) on_row("primitives.max", result.max_primitive_error);

  // End-to-end: full loss through aggregation + BiLSTM, spec dimensions
  // with a small hidden size, plus the dense-embedding baseline.
  struct ModelCase {
    ModelKind kind;
    int heads;
    int window_hours;
  };
  const std::array<ModelCase, 6> cases = {{{ModelKind::hea_lstm, 1, 24},
                                           {ModelKind::hea_lstm, 1, 24},
                                           {ModelKind::hea_lstm, 1, 24},
                                           {ModelKind::hea_lstm, 8, 24},
                                           {ModelKind::hea_lstm, 8, 24},
                                           {ModelKind::dense_lstm, 1, 8}}};
  int case_no = 0;
  for (const auto& c : cases) {
    ModelConfig config;
    config.model_kind = c.kind;
    config.window_hours = c.window_hours;
    config.embed_dim = 16;
    config.heads = c.heads;
    config.hidden = 8;
    config.seed = seed + static_cast<std::uint64_t>(case_no);
    Rng model_rng(config.seed);
    model::SepsisModel model = model::SepsisModel::create(config, model_rng);
    const prep::WindowSample window = random_window(config.window_hours, model_rng);

    const auto f = [&model, &window] {
      return model::bce_loss(model.window_prob(window), window.label);
    };
    // Wider step than the primitive checks: the full loss has parameters
    // with ~1e-8 gradients where central differences at 1e-5 are roundoff-
    // dominated. 3e-4 balances roundoff against truncation here.
    const auto report = nc::grad_check(f, model.params().entries(), 3e-4);
    result.finite = result.finite && report.finite;
    result.max_model_error = std::max(result.max_model_error, report.max_rel_error);
    if (on_row)
      on_row("model." + to_string(c.kind) + ".heads" + std::to_string(c.heads) + ".case" +
                 std::to_string(case_no),
             report.max_rel_error);
    ++case_no;
  }
  return result;
}

}  // namespace heasep::harness
