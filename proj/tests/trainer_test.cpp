#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hrl/eval.hpp"
#include "hrl/trainer.hpp"
#include "test_model.hpp"
#include "test_util.hpp"

using namespace hrl;
using testutil::rel_err;

namespace {

// Corpus of hand-built documents over the tiny-model vocabulary, everything
// assigned to the train split.
Corpus toy_corpus(const Model& m, std::vector<Document> docs) {
  Corpus c;
  c.vocab = m.vocab;
  c.num_classes = m.cfg.num_classes;
  for (const auto& a : m.aspects) c.aspects.push_back({a.name, a.keywords});
  c.docs = std::move(docs);
  c.split.assign(c.docs.size(), static_cast<int>(Split::kTrain));
  return c;
}

Document two_clause_doc(const Model& m, int rating = 2) {
  Document doc;
  doc.id = "toy";
  doc.clauses = {testutil::make_clause(m.vocab, {"good", "location"}),
                 testutil::make_clause(m.vocab, {"bad", "room", "very"})};
  doc.queries.push_back({0, rating});
  return doc;
}

double select_all_low_accuracy(const Model& m, const Corpus& corpus) {
  size_t hits = 0, total = 0;
  for (size_t di = 0; di < corpus.docs.size(); ++di) {
    const auto& doc = corpus.docs[di];
    LstmState chain(static_cast<size_t>(m.cfg.d));
    for (const auto& clause : doc.clauses) {
      for (int tok : clause.token_ids) {
        chain = lstm::step(m.reg, m.lstm_low, chain, m.embedding_of(tok));
      }
    }
    // Clause-head argmax.
    const auto& cw = m.reg.at(m.dec.cw);
    const auto& cb = m.reg.at(m.dec.cb);
    Vector out(cw.rows);
    for (size_t r = 0; r < cw.rows; ++r) {
      double s = cb.value[r];
      for (size_t k = 0; k < cw.cols; ++k) s += cw.value[r * cw.cols + k] * chain.h[k];
      out[r] = static_cast<real>(s);
    }
    size_t best = 0;
    for (size_t r = 1; r < out.size(); ++r) {
      if (out[r] > out[best]) best = r;
    }
    for (const auto& q : doc.queries) {
      ++total;
      if (static_cast<int>(best) + 1 == q.rating) ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  ParamRegistry reg;
  const ParamId p = reg.add_vector("p", 3);
  reg.at(p).value = {real(1), real(-2), real(3)};
  const auto before = reg.at(p).value;
  GradStore grads(reg);
  AdamState adam(reg);
  const ParamId ids[] = {p};
  adam_step(reg, ids, grads, adam, 0.1);
  CHECK(reg.at(p).value == before);
}

TEST_CASE("adam: first step from zero moments matches the closed form") {
  ParamRegistry reg;
  const ParamId p = reg.add_vector("p", 2);
  reg.at(p).value = {real(0.5), real(-0.25)};
  GradStore grads(reg);
  grads.grad(p) = {real(0.2), real(-0.04)};
  AdamState adam(reg);
  const ParamId ids[] = {p};
  const double lr = 0.012;
  adam_step(reg, ids, grads, adam, lr);

  for (size_t k = 0; k < 2; ++k) {
    const double g = k == 0 ? 0.2 : -0.04;
    const double start = k == 0 ? 0.5 : -0.25;
    // With zero moments, mhat = g and vhat = g^2 after bias correction.
    const double want = start - lr * g / (std::abs(g) + kAdamEps);
    CHECK(rel_err(reg.at(p).value[k], want) < 1e-12);
  }
}

TEST_CASE("sgd ascent shrinks |x| on f(x) = -x^2") {
  LogisticPolicy p;
  p.w = Vector{1};
  for (int i = 0; i < 20; ++i) {
    const real before = std::abs(p.w[0]);
    Vector g{real(-2) * p.w[0]};  // gradient of -x^2
    sgd_ascent_step(p, g, 0, 0.1);
    CHECK(std::abs(p.w[0]) < before);
  }
}

TEST_CASE("policy gradients: zero advantage and saturation") {
  HighTrajectory traj;
  HighStep s;
  s.state = Vector{1, 2, 3, 4};
  s.option = 1;
  s.prob_select = real(0.7);
  s.reward = real(0.42);
  traj.steps.push_back(s);
  traj.lows.resize(1);

  const auto zero = policy_gradient_high(traj, real(0.42));
  CHECK(zero.w == Vector(4));
  CHECK(zero.b == real(0));

  traj.steps[0].prob_select = real(1) - real(1e-14);
  const auto saturated = policy_gradient_high(traj, real(0));
  for (size_t i = 0; i < 4; ++i) CHECK(std::abs(saturated.w[i]) < 1e-12);
}

TEST_CASE("single-step policy gradient matches finite differences of E[R]") {
  // J(theta) = sum_o pi_theta(o | s) r(o); the score-function estimator's
  // expectation must equal dJ/dtheta.
  Rng rng(3);
  const Vector s = testutil::random_vector(rng, 4);
  const double r0 = -0.3, r1 = 0.9;

  LogisticPolicy pol;
  pol.w = testutil::random_vector(rng, 4, -0.5, 0.5);
  pol.b = real(0.1);

  auto expected_gradient = [&]() {
    const real p1 = policy::select_prob(pol, s);
    PolicyGradient g;
    g.w = Vector(4);
    policy::accumulate_score_gradient(s, 1, p1, static_cast<real>(r1), g.w, g.b);
    for (size_t i = 0; i < 4; ++i) g.w[i] *= p1;
    g.b *= p1;
    Vector gw0(4);
    real gb0 = 0;
    policy::accumulate_score_gradient(s, 0, p1, static_cast<real>(r0), gw0, gb0);
    for (size_t i = 0; i < 4; ++i) g.w[i] += (real(1) - p1) * gw0[i];
    g.b += (real(1) - p1) * gb0;
    return g;
  };
  auto objective = [&]() {
    const real p1 = policy::select_prob(pol, s);
    return static_cast<double>(p1) * r1 + (1.0 - static_cast<double>(p1)) * r0;
  };

  const PolicyGradient g = expected_gradient();
  for (size_t i = 0; i < 4; ++i) {
    const double fd = testutil::central_diff(objective, &pol.w[i]);
    CHECK(rel_err(g.w[i], fd) < 1e-5);
  }
  const double fdb = testutil::central_diff(objective, &pol.b);
  CHECK(rel_err(g.b, fdb) < 1e-5);
}

TEST_CASE("pretrain_low: one document, one epoch, exactly one optimizer step") {
  Model m = testutil::make_tiny_model();
  const Corpus corpus = toy_corpus(m, {two_clause_doc(m)});
  Trainer t(m, corpus);
  t.pretrain_low(1);
  CHECK(t.optimizer_steps() == 1);
  CHECK(m.pretrained_low);
}

TEST_CASE("pretraining is bitwise deterministic under a fixed seed") {
  const SyntheticSpec spec = data::default_spec(12, 2, 3, 0.5, 0.5, 4);
  const Corpus corpus = data::generate_synthetic(spec);
  Config cfg;
  cfg.d = 6;
  cfg.num_classes = 3;
  cfg.seed = 17;
  cfg.batch_size = 4;

  std::vector<AspectInfo> infos;
  for (const auto& a : corpus.aspects) infos.push_back(a);

  Model a = Model::create(cfg, corpus.vocab, infos);
  Model b = Model::create(cfg, corpus.vocab, infos);
  CHECK(a.theta_fingerprint() == b.theta_fingerprint());

  Trainer ta(a, corpus), tb(b, corpus);
  ta.pretrain_low(2);
  tb.pretrain_low(2);
  ta.pretrain_high(2);
  tb.pretrain_high(2);
  CHECK(a.theta_fingerprint() == b.theta_fingerprint());

  ta.train_policies(1);
  tb.train_policies(1);
  CHECK(a.high_policy.w == b.high_policy.w);
  CHECK(a.low_policy.w == b.low_policy.w);
  CHECK(a.high_policy.b == b.high_policy.b);
}

TEST_CASE("pretraining learns a separable toy corpus") {
  const SyntheticSpec spec = data::default_spec(40, 1, 2, 0.0, 0.0, 21);
  const Corpus corpus = data::generate_synthetic(spec);
  Config cfg;
  cfg.d = 8;
  cfg.num_classes = 2;
  cfg.seed = 5;
  cfg.batch_size = 8;

  std::vector<AspectInfo> infos;
  for (const auto& a : corpus.aspects) infos.push_back(a);
  Model m = Model::create(cfg, corpus.vocab, infos);
  Trainer t(m, corpus);
  t.pretrain_low(10);

  // Mean epoch loss is non-increasing over the first three epochs.
  const auto& losses = t.result().pretrain_low_loss;
  REQUIRE(losses.size() == 10);
  CHECK(losses[1] <= losses[0]);
  CHECK(losses[2] <= losses[1]);

  CHECK(select_all_low_accuracy(m, corpus) >= 0.95);

  t.pretrain_high(10);
  const auto& hi_losses = t.result().pretrain_high_loss;
  CHECK(hi_losses[1] <= hi_losses[0]);
  CHECK(hi_losses[2] <= hi_losses[1]);

  // Select-all decode through the final head.
  size_t hits = 0, total = 0;
  for (size_t di = 0; di < corpus.docs.size(); ++di) {
    const auto vecs = t.clause_vectors(di);
    LstmState high(static_cast<size_t>(cfg.d));
    for (const auto& v : vecs) high = lstm::step(m.reg, m.lstm_high, high, v);
    LstmState chain(static_cast<size_t>(cfg.d));
    for (const auto& clause : corpus.docs[di].clauses) {
      for (int tok : clause.token_ids) {
        chain = lstm::step(m.reg, m.lstm_low, chain, m.embedding_of(tok));
      }
    }
    const Vector z = predictor::document_representation(high.h, chain.h);
    const auto pred = predictor::predict(m.reg, m.dec, z);
    for (const auto& q : corpus.docs[di].queries) {
      ++total;
      if (pred.rating == q.rating) ++hits;
    }
  }
  CHECK(static_cast<double>(hits) / static_cast<double>(total) >= 0.95);
}

TEST_CASE("policy training before pretraining is a state error") {
  Model m = testutil::make_tiny_model();
  const Corpus corpus = toy_corpus(m, {two_clause_doc(m)});
  Trainer t(m, corpus);
  CHECK_THROWS_AS(t.train_policies(1), StateError);
  t.pretrain_low(1);
  CHECK_THROWS_AS(t.train_policies(1), StateError);  // high stage still missing

  Model fresh = testutil::make_tiny_model();
  const Corpus fresh_corpus = toy_corpus(fresh, {two_clause_doc(fresh)});
  Trainer t2(fresh, fresh_corpus);
  CHECK_THROWS_AS(t2.pretrain_high(1), StateError);  // high before low
}

TEST_CASE("theta stays bitwise frozen through policy training") {
  Model m = testutil::make_tiny_model(4, 3, 7);
  const Corpus corpus =
      toy_corpus(m, {two_clause_doc(m, 1), two_clause_doc(m, 2), two_clause_doc(m, 3)});
  Trainer t(m, corpus);
  t.pretrain_low(1);
  t.pretrain_high(1);
  const std::string before = m.theta_fingerprint();
  t.train_policies(3);
  CHECK(m.theta_fingerprint() == before);
  CHECK(m.policies_trained);
}

TEST_CASE("all-skip document updates the high policy only") {
  Model m = testutil::make_tiny_model(4, 3, 11);
  const Corpus corpus = toy_corpus(m, {two_clause_doc(m)});
  Trainer t(m, corpus);
  t.pretrain_low(1);
  t.pretrain_high(1);

  // Saturate the high policy toward skip. sigma(-8) ~ 3e-4, so a sampled
  // epoch over one two-clause document skips everything w.h.p.; the seed
  // below is checked to do so.
  m.high_policy.w = Vector(16);
  m.high_policy.b = -8;
  const Vector low_w_before = m.low_policy.w;
  const real low_b_before = m.low_policy.b;
  const Vector high_w_before = m.high_policy.w;

  t.train_policies(1);
  CHECK(m.low_policy.w == low_w_before);
  CHECK(m.low_policy.b == low_b_before);
  CHECK(m.high_policy.w != high_w_before);
}

TEST_CASE("baselines") {
  Model m = testutil::make_tiny_model(4, 3, 13);
  const Corpus corpus = toy_corpus(m, {two_clause_doc(m)});
  Trainer t(m, corpus);
  t.pretrain_low(1);
  t.pretrain_high(1);
  const AspectQuery q = corpus.docs[0].queries[0];

  SUBCASE("m = 1 equals that single trajectory's reward") {
    Rng ra(99), rb(99);
    const real b = t.estimate_high_baseline(0, q, 1, ra);
    rollout::DocRunOptions opts;
    const auto traj =
        rollout::run_document(m, corpus.docs[0], q, t.clause_vectors(0), rb, opts);
    CHECK(b == traj.steps[0].reward);
  }

  SUBCASE("a deterministic (saturated) policy has zero baseline variance") {
    m.high_policy.w = Vector(16);
    m.high_policy.b = 60;  // always select
    m.low_policy.w = Vector(12);
    m.low_policy.b = 60;
    Rng r1(1), r2(2), r3(3);
    const real b1 = t.estimate_high_baseline(0, q, 3, r1);
    const real b2 = t.estimate_high_baseline(0, q, 3, r2);
    const real b3 = t.estimate_high_baseline(0, q, 3, r3);
    CHECK(b1 == b2);
    CHECK(b2 == b3);
  }

  SUBCASE("m = 1000 lands within 3 sigma of the exhaustive expectation") {
    // Joint enumeration over option patterns and, for selected clauses,
    // all word-action patterns; probabilities taken from the forced runs.
    const auto& doc = corpus.docs[0];
    const auto vecs = t.clause_vectors(0);
    const size_t n = doc.clauses.size();
    double expected = 0;
    double prob_mass = 0;
    for (std::uint32_t obits = 0; obits < (1u << n); ++obits) {
      std::vector<std::uint8_t> options(n);
      std::vector<size_t> selected;
      size_t action_bits = 0;
      for (size_t i = 0; i < n; ++i) {
        options[i] = (obits >> i) & 1u;
        if (options[i]) {
          selected.push_back(i);
          action_bits += doc.clauses[i].token_ids.size();
        }
      }
      for (std::uint64_t abits = 0; abits < (1ull << action_bits); ++abits) {
        std::vector<std::vector<std::uint8_t>> actions(n);
        size_t bit = 0;
        for (size_t i : selected) {
          actions[i].assign(doc.clauses[i].token_ids.size(), 0);
          for (size_t j = 0; j < actions[i].size(); ++j) {
            actions[i][j] = (abits >> bit++) & 1u;
          }
        }
        Rng dummy(0);
        rollout::DocRunOptions opts;
        opts.forced_options = &options;
        opts.forced_actions = &actions;
        const auto traj = rollout::run_document(m, doc, q, vecs, dummy, opts);
        double p = 1;
        for (size_t i = 0; i < n; ++i) {
          const double ps = traj.steps[i].prob_select;
          p *= options[i] ? ps : 1.0 - ps;
          if (options[i]) {
            for (size_t j = 0; j < actions[i].size(); ++j) {
              const double pa = traj.lows[i].probs[j];
              p *= actions[i][j] ? pa : 1.0 - pa;
            }
          }
        }
        expected += p * traj.steps[0].reward;
        prob_mass += p;
      }
    }
    CHECK(prob_mass == doctest::Approx(1.0).epsilon(1e-9));

    Rng rng(2025);
    const int m_samples = 1000;
    std::vector<double> draws;
    for (int s = 0; s < m_samples; ++s) {
      draws.push_back(t.estimate_high_baseline(0, q, 1, rng));
    }
    double mean = 0;
    for (double v : draws) mean += v;
    mean /= m_samples;
    double var = 0;
    for (double v : draws) var += (v - mean) * (v - mean);
    var /= (m_samples - 1);
    const double sigma = std::sqrt(var / m_samples);
    CHECK(std::abs(mean - expected) <= 3 * sigma);
  }
}

TEST_CASE("baseline subtraction is unbiased over an exhaustive 3-step space") {
  // sum_tau P(tau) * b * grad log P(tau) = 0 for a constant b.
  Rng rng(15);
  LogisticPolicy pol;
  pol.w = testutil::random_vector(rng, 4, -0.8, 0.8);
  pol.b = real(0.2);
  std::vector<Vector> states = {testutil::random_vector(rng, 4), testutil::random_vector(rng, 4),
                                testutil::random_vector(rng, 4)};
  const real b = real(1.37);

  Vector gw(4);
  real gb = 0;
  for (std::uint32_t bits = 0; bits < 8; ++bits) {
    double p_traj = 1;
    for (size_t i = 0; i < 3; ++i) {
      const real p1 = policy::select_prob(pol, states[i]);
      p_traj *= ((bits >> i) & 1u) ? p1 : real(1) - p1;
    }
    for (size_t i = 0; i < 3; ++i) {
      const real p1 = policy::select_prob(pol, states[i]);
      policy::accumulate_score_gradient(states[i], (bits >> i) & 1u, p1,
                                        static_cast<real>(p_traj) * b, gw, gb);
    }
  }
  for (size_t k = 0; k < 4; ++k) CHECK(std::abs(gw[k]) < 1e-10);
  CHECK(std::abs(gb) < 1e-10);
}

TEST_CASE("checkpoint round-trip is byte-identical") {
  Model m = testutil::make_tiny_model(5, 4, 19);
  m.pretrained_low = true;
  m.pretrain_epochs_done = 3;
  const std::string p1 = "/tmp/hrl_ckpt_a.bin";
  const std::string p2 = "/tmp/hrl_ckpt_b.bin";
  m.save(p1);
  Model loaded = Model::load(p1);
  loaded.save(p2);

  std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  CHECK(s1.str() == s2.str());
  CHECK(s1.str().size() > 0);

  CHECK(loaded.cfg.d == m.cfg.d);
  CHECK(loaded.vocab.size() == m.vocab.size());
  CHECK(loaded.pretrained_low);
  CHECK(loaded.pretrain_epochs_done == 3);
  CHECK(loaded.theta_fingerprint() == m.theta_fingerprint());
  CHECK(loaded.high_policy.w == m.high_policy.w);
  CHECK(loaded.rng == m.rng);
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("dimension mismatch between checkpoint and corpus is reported") {
  Model m = testutil::make_tiny_model(4, 3, 23);
  const SyntheticSpec spec = data::default_spec(10, 2, 5, 0.5, 0.5, 9);  // C = 5, model C = 3
  const Corpus corpus = data::generate_synthetic(spec);
  CHECK_THROWS_WITH_AS(
      eval::evaluate(m, corpus, Split::kTrain, DecodeMode::kGreedy, 1, 1),
      doctest::Contains("dimension mismatch"), FormatError);
}
