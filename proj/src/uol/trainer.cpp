#include "uol/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uol/error.hpp"

namespace uol {

std::string to_string(TrainMode mode) {
  switch (mode) {
    case TrainMode::regression: return "regression";
    case TrainMode::order_point: return "order_point";
    case TrainMode::uol: return "uol";
  }
  throw InvalidArgument("to_string: bad train mode");
}

TrainMode train_mode_from_string(const std::string& s) {
  if (s == "regression") return TrainMode::regression;
  if (s == "order_point") return TrainMode::order_point;
  if (s == "uol") return TrainMode::uol;
  throw InvalidArgument("unknown train mode: " + s);
}

void adam_update(std::span<double> params, std::span<const double> grads, Vec& m, Vec& v,
                 long long step, double lr, double beta1, double beta2, double eps) {
  if (params.size() != grads.size() || m.size() != params.size() || v.size() != params.size())
    throw InvalidArgument("adam_update: shape mismatch");
  if (step < 1) throw InvalidArgument("adam_update: step starts at 1");
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * grads[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * grads[i] * grads[i];
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

double cosine_lr(int epoch, int epochs, double lr_max, double lr_min) {
  if (epochs < 1) throw InvalidArgument("cosine_lr: epochs must be >= 1");
  if (epoch < 0 || epoch >= epochs) throw InvalidArgument("cosine_lr: epoch out of range");
  if (epochs == 1) return lr_max;
  const double phase = 3.141592653589793238462643383279502884 * static_cast<double>(epoch) /
                       static_cast<double>(epochs - 1);
  return lr_min + 0.5 * (lr_max - lr_min) * (1.0 + std::cos(phase));
}

namespace {

struct Softmax {
  std::array<double, 3> p{};
};

Softmax softmax3(const OrderLogits& y) {
  const double m = std::max({y[0], y[1], y[2]});
  Softmax s;
  double sum = 0.0;
  for (int c = 0; c < 3; ++c) {
    s.p[static_cast<std::size_t>(c)] = std::exp(y[c] - m);
    sum += s.p[static_cast<std::size_t>(c)];
  }
  for (int c = 0; c < 3; ++c) s.p[static_cast<std::size_t>(c)] /= sum;
  return s;
}

}  // namespace

BatchLossTerms order_batch_loss(const Mlp& encoder, const Mlp& comparator,
                                std::span<const RatedInstance> batch,
                                std::span<const Pair> pairs,
                                std::span<const Triplet> triplets,
                                std::span<const SampleNoise> pair_noise,
                                const LossWeights& weights, TrainMode mode,
                                bool normalized_kl, MlpGrads* encoder_grads,
                                MlpGrads* comparator_grads) {
  if (mode == TrainMode::regression)
    throw InvalidArgument("order_batch_loss: regression mode has no order losses");
  if (mode == TrainMode::uol && pair_noise.size() != pairs.size())
    throw InvalidArgument("order_batch_loss: need one noise block per pair");
  const bool want_grads = encoder_grads != nullptr || comparator_grads != nullptr;
  if (want_grads && (encoder_grads == nullptr || comparator_grads == nullptr))
    throw InvalidArgument("order_batch_loss: gradients must be requested for both networks");

  const std::size_t m_count = batch.size();
  std::vector<GaussianEmbedding> z(m_count);
  std::vector<MlpCache> enc_cache(want_grads ? m_count : 0);
  for (std::size_t i = 0; i < m_count; ++i) {
    z[i] = encode(encoder, batch[i].features, want_grads ? &enc_cache[i] : nullptr);
  }
  const std::size_t dim = z.empty() ? 0 : z[0].mu.size();

  std::vector<Vec> dmu;
  std::vector<Vec> dvar;
  if (want_grads) {
    dmu.assign(m_count, Vec(dim, 0.0));
    dvar.assign(m_count, Vec(dim, 0.0));
  }

  BatchLossTerms terms;
  terms.pair_count = static_cast<int>(pairs.size());
  terms.triplet_count = static_cast<int>(triplets.size());

  // Order cross entropy, averaged over pairs.
  const double pair_scale = pairs.empty() ? 0.0 : 1.0 / static_cast<double>(pairs.size());
  double ce_sum = 0.0;
  MlpCache comp_cache;
  std::vector<MlpCache> draw_caches;
  Vec joint(2 * dim);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto a = static_cast<std::size_t>(pairs[p].i);
    const auto b = static_cast<std::size_t>(pairs[p].j);
    const int target = onehot_index(pairs[p].relation);

    OrderLogits mean_logits;
    if (mode == TrainMode::uol) {
      const SampleNoise& noise = pair_noise[p];
      const int draws = noise.draws();
      if (want_grads) draw_caches.resize(static_cast<std::size_t>(draws));
      for (int t = 0; t < draws; ++t) {
        const Vec s1 = reparam_sample(z[a], noise.eps1[static_cast<std::size_t>(t)]);
        const Vec s2 = reparam_sample(z[b], noise.eps2[static_cast<std::size_t>(t)]);
        const OrderLogits y = compare_points(
            comparator, s1, s2, want_grads ? &draw_caches[static_cast<std::size_t>(t)] : nullptr);
        for (int c = 0; c < 3; ++c) mean_logits[static_cast<std::size_t>(c)] += y[c];
      }
      for (int c = 0; c < 3; ++c) mean_logits[static_cast<std::size_t>(c)] /= draws;

      ce_sum += ce_loss(mean_logits, pairs[p].relation);
      if (want_grads) {
        const Softmax sm = softmax3(mean_logits);
        Vec dlogits(3);
        for (int c = 0; c < 3; ++c) {
          dlogits[static_cast<std::size_t>(c)] =
              (sm.p[static_cast<std::size_t>(c)] - (c == target ? 1.0 : 0.0)) * pair_scale /
              draws;
        }
        for (int t = 0; t < draws; ++t) {
          const Vec dz = backward(comparator, draw_caches[static_cast<std::size_t>(t)], dlogits,
                                  *comparator_grads);
          const Vec& e1 = noise.eps1[static_cast<std::size_t>(t)];
          const Vec& e2 = noise.eps2[static_cast<std::size_t>(t)];
          for (std::size_t j = 0; j < dim; ++j) {
            dmu[a][j] += dz[j];
            dmu[b][j] += dz[dim + j];
            // d sample / d var = eps / (2 sqrt(var))
            dvar[a][j] += dz[j] * e1[j] / (2.0 * std::sqrt(z[a].var_diag[j]));
            dvar[b][j] += dz[dim + j] * e2[j] / (2.0 * std::sqrt(z[b].var_diag[j]));
          }
        }
      }
    } else {
      mean_logits =
          compare_points(comparator, z[a].mu, z[b].mu, want_grads ? &comp_cache : nullptr);
      ce_sum += ce_loss(mean_logits, pairs[p].relation);
      if (want_grads) {
        const Softmax sm = softmax3(mean_logits);
        Vec dlogits(3);
        for (int c = 0; c < 3; ++c) {
          dlogits[static_cast<std::size_t>(c)] =
              (sm.p[static_cast<std::size_t>(c)] - (c == target ? 1.0 : 0.0)) * pair_scale;
        }
        const Vec dz = backward(comparator, comp_cache, dlogits, *comparator_grads);
        for (std::size_t j = 0; j < dim; ++j) {
          dmu[a][j] += dz[j];
          dmu[b][j] += dz[dim + j];
        }
      }
    }
  }
  terms.ce = ce_sum * pair_scale;

  if (mode == TrainMode::uol) {
    // Ordinal hinge over the mined triplets.
    const HingeResult hinge = hinge_ordinal_loss(z, triplets, weights.tau);
    terms.hinge = hinge.value;
    terms.hinge_empty = hinge.empty;
    if (want_grads && !triplets.empty()) {
      const double coeff = weights.alpha / static_cast<double>(triplets.size());
      for (const Triplet& t : triplets) {
        const auto l = static_cast<std::size_t>(t.l);
        const auto mm = static_cast<std::size_t>(t.m);
        const auto nn = static_cast<std::size_t>(t.n);
        const double d_near = std::sqrt(wasserstein_sq(z[l], z[mm]));
        const double d_far = std::sqrt(wasserstein_sq(z[l], z[nn]));
        if (d_near + weights.tau - d_far <= 0.0) continue;
        if (d_near > 0.0) {
          const double s = coeff / d_near;
          for (std::size_t j = 0; j < dim; ++j) {
            const double gm = s * (z[l].mu[j] - z[mm].mu[j]);
            const double gv = s * (z[l].var_diag[j] - z[mm].var_diag[j]);
            dmu[l][j] += gm;
            dmu[mm][j] -= gm;
            dvar[l][j] += gv;
            dvar[mm][j] -= gv;
          }
        }
        if (d_far > 0.0) {
          const double s = coeff / d_far;
          for (std::size_t j = 0; j < dim; ++j) {
            const double gm = s * (z[l].mu[j] - z[nn].mu[j]);
            const double gv = s * (z[l].var_diag[j] - z[nn].var_diag[j]);
            dmu[l][j] -= gm;
            dmu[nn][j] += gm;
            dvar[l][j] -= gv;
            dvar[nn][j] += gv;
          }
        }
      }
    }

    // Dispersion matching between predicted Frobenius dispersions and the
    // observed rating variances, summed over the batch.
    Vec preds(m_count);
    Vec etas(m_count);
    for (std::size_t i = 0; i < m_count; ++i) {
      preds[i] = frobenius_dispersion(z[i].var_diag);
      etas[i] = batch[i].rating_variance;
    }
    terms.kl = normalized_kl ? kl_dispersion_loss_normalized(preds, etas)
                             : kl_dispersion_loss(preds, etas);
    if (want_grads) {
      double pred_sum = 0.0;
      double eta_sum = 0.0;
      for (std::size_t i = 0; i < m_count; ++i) {
        pred_sum += preds[i];
        eta_sum += etas[i];
      }
      for (std::size_t i = 0; i < m_count; ++i) {
        double dkl_dpred;
        if (!normalized_kl) {
          dkl_dpred = -etas[i] / preds[i];
        } else if (eta_sum <= 0.0) {
          dkl_dpred = 0.0;
        } else {
          dkl_dpred = -(etas[i] / eta_sum) / preds[i] + 1.0 / pred_sum;
        }
        // d pred / d var_j = 1 / (2 pred) for every j.
        const double g = weights.beta * dkl_dpred / (2.0 * preds[i]);
        for (std::size_t j = 0; j < dim; ++j) dvar[i][j] += g;
      }
    }
  }

  terms.total = total_loss(terms.ce, terms.hinge, terms.kl, weights);

  if (want_grads) {
    for (std::size_t i = 0; i < m_count; ++i) {
      const Vec dout = encode_output_grad(z[i], dmu[i], dvar[i]);
      backward(encoder, enc_cache[i], dout, *encoder_grads);
    }
  }
  return terms;
}

namespace {

void validate(const TrainConfig& cfg) {
  if (!(cfg.theta > 0.0)) throw InvalidArgument("train: theta must be > 0");
  if (!(cfg.tau > 0.0)) throw InvalidArgument("train: tau must be > 0");
  if (cfg.alpha < 0.0 || cfg.beta < 0.0)
    throw InvalidArgument("train: loss weights must be >= 0");
  if (cfg.mc_samples < 1) throw InvalidArgument("train: mc_samples must be >= 1");
  if (cfg.batch_size < 1) throw InvalidArgument("train: batch_size must be >= 1");
  if (cfg.epochs < 1) throw InvalidArgument("train: epochs must be >= 1");
  if (!(cfg.lr_max > 0.0) || !(cfg.lr_min > 0.0) || cfg.lr_min > cfg.lr_max)
    throw InvalidArgument("train: need 0 < lr_min <= lr_max");
  if (cfg.pair_cap < 1) throw InvalidArgument("train: pair_cap must be >= 1");
  if (cfg.hidden < 1 || cfg.embed_dim < 1)
    throw InvalidArgument("train: layer sizes must be >= 1");
  if (cfg.mode != TrainMode::regression && cfg.batch_size < 3)
    throw InvalidArgument("train: order modes need batch_size >= 3");
}

// Flat view over every trainable tensor, in checkpoint order.
struct TensorRefs {
  std::vector<std::span<double>> tensors;

  void add(Mlp& mlp) {
    for (LinearLayer& l : mlp.layers) {
      tensors.emplace_back(l.w.a);
      tensors.emplace_back(l.b);
    }
  }
};

std::vector<std::span<double>> grad_refs(MlpGrads& g) {
  std::vector<std::span<double>> out;
  for (std::size_t i = 0; i < g.w.size(); ++i) {
    out.emplace_back(g.w[i].a);
    out.emplace_back(g.b[i]);
  }
  return out;
}

void zero(MlpGrads& g) {
  for (Mat& w : g.w) std::fill(w.a.begin(), w.a.end(), 0.0);
  for (Vec& b : g.b) std::fill(b.begin(), b.end(), 0.0);
}

}  // namespace

TrainResult train(std::span<const RatedInstance> dataset, const TrainConfig& cfg) {
  validate(cfg);
  if (dataset.empty()) throw InvalidArgument("train: empty dataset");
  if (dataset.size() < static_cast<std::size_t>(cfg.batch_size))
    throw InvalidArgument("train: dataset smaller than one batch");
  const int feature_dim = static_cast<int>(dataset[0].features.size());
  for (const RatedInstance& inst : dataset) {
    if (static_cast<int>(inst.features.size()) != feature_dim)
      throw InvalidArgument("train: inconsistent feature dimensions");
  }

  Rng rng(cfg.seed);
  TrainResult result;
  ModelCheckpoint& ckpt = result.checkpoint;
  ckpt.config = cfg;
  ckpt.feature_dim = feature_dim;
  ckpt.encoder = make_encoder(feature_dim, cfg.hidden, cfg.embed_dim, rng);
  ckpt.comparator = make_comparator(cfg.embed_dim, cfg.hidden, rng);
  ckpt.head = make_regression_head(cfg.hidden, rng);

  TensorRefs params;
  params.add(ckpt.encoder);
  params.add(ckpt.comparator);
  params.add(ckpt.head);
  std::vector<Vec> adam_m;
  std::vector<Vec> adam_v;
  for (const auto& t : params.tensors) {
    adam_m.emplace_back(t.size(), 0.0);
    adam_v.emplace_back(t.size(), 0.0);
  }
  long long adam_step = 0;

  MlpGrads enc_g = zeros_like(ckpt.encoder);
  MlpGrads comp_g = zeros_like(ckpt.comparator);
  MlpGrads head_g = zeros_like(ckpt.head);

  const LossWeights weights{cfg.alpha, cfg.beta, cfg.tau};
  const std::size_t n_batches = dataset.size() / static_cast<std::size_t>(cfg.batch_size);
  std::vector<std::size_t> perm(dataset.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});

  std::vector<RatedInstance> batch(static_cast<std::size_t>(cfg.batch_size));
  std::vector<double> scores(static_cast<std::size_t>(cfg.batch_size));
  MlpCache trunk_cache;
  MlpCache head_cache;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cosine_lr(epoch, cfg.epochs, cfg.lr_max, cfg.lr_min);
    rng.shuffle(perm);

    EpochTrace trace{epoch, lr, 0.0, 0.0, 0.0, 0.0};
    for (std::size_t bi = 0; bi < n_batches; ++bi) {
      for (std::size_t k = 0; k < batch.size(); ++k) {
        batch[k] = dataset[perm[bi * batch.size() + k]];
        scores[k] = batch[k].mean_score;
      }
      zero(enc_g);
      zero(comp_g);
      zero(head_g);

      BatchLossTerms terms;
      if (cfg.mode == TrainMode::regression) {
        // Plain squared error through the trunk and the scalar head.
        double sq = 0.0;
        const double inv_m = 1.0 / static_cast<double>(batch.size());
        for (const RatedInstance& inst : batch) {
          const Vec hidden = forward(ckpt.encoder, inst.features, &trunk_cache, 2);
          const Vec pred = forward(ckpt.head, hidden, &head_cache);
          const double r = pred[0] - inst.mean_score;
          sq += r * r;
          const Vec dpred{2.0 * r * inv_m};
          const Vec dtrunk = backward(ckpt.head, head_cache, dpred, head_g);
          backward(ckpt.encoder, trunk_cache, dtrunk, enc_g);
        }
        terms.total = sq * inv_m;
      } else {
        const std::vector<Pair> pairs =
            select_balanced_pairs(scores, cfg.pair_cap, cfg.theta, rng);
        TripletSelection triplet_sel;
        std::vector<SampleNoise> pair_noise;
        if (cfg.mode == TrainMode::uol) {
          triplet_sel = select_hard_triplets(scores);
          result.dropped_triplets += triplet_sel.dropped;
          pair_noise.reserve(pairs.size());
          for (std::size_t p = 0; p < pairs.size(); ++p) {
            pair_noise.push_back(SampleNoise::draw(cfg.mc_samples, cfg.embed_dim, rng));
          }
        }
        terms = order_batch_loss(ckpt.encoder, ckpt.comparator, batch, pairs,
                                 triplet_sel.triplets, pair_noise, weights, cfg.mode,
                                 cfg.normalized_kl, &enc_g, &comp_g);
      }

      ++adam_step;
      std::vector<std::span<double>> grads;
      auto eg = grad_refs(enc_g);
      auto cg = grad_refs(comp_g);
      auto hg = grad_refs(head_g);
      grads.insert(grads.end(), eg.begin(), eg.end());
      grads.insert(grads.end(), cg.begin(), cg.end());
      grads.insert(grads.end(), hg.begin(), hg.end());
      for (std::size_t t = 0; t < params.tensors.size(); ++t) {
        adam_update(params.tensors[t], grads[t], adam_m[t], adam_v[t], adam_step, lr);
      }

      trace.ce += terms.ce;
      trace.hinge += terms.hinge;
      trace.kl += terms.kl;
      trace.total += terms.total;
    }
    const double inv_b = 1.0 / static_cast<double>(n_batches);
    trace.ce *= inv_b;
    trace.hinge *= inv_b;
    trace.kl *= inv_b;
    trace.total *= inv_b;
    result.trace.push_back(trace);
  }
  return result;
}

std::vector<double> predict_scores(const ModelCheckpoint& ckpt,
                                   std::span<const RatedInstance> instances,
                                   std::span<const RatedInstance> reference,
                                   const EvalConfig& cfg) {
  if (instances.empty()) throw InvalidArgument("predict_scores: no instances");
  for (const RatedInstance& inst : instances) {
    if (static_cast<int>(inst.features.size()) != ckpt.feature_dim)
      throw InvalidArgument("predict_scores: feature dimension mismatch");
  }

  Rng rng(cfg.seed);
  std::vector<double> preds;
  preds.reserve(instances.size());

  if (ckpt.config.mode == TrainMode::regression) {
    for (const RatedInstance& inst : instances) {
      const Vec hidden = forward(ckpt.encoder, inst.features, nullptr, 2);
      preds.push_back(forward(ckpt.head, hidden)[0]);
    }
    return preds;
  }

  std::vector<GaussianEmbedding> ref_embeddings;
  ref_embeddings.reserve(reference.size());
  for (const RatedInstance& inst : reference) {
    if (static_cast<int>(inst.features.size()) != ckpt.feature_dim)
      throw InvalidArgument("predict_scores: reference feature dimension mismatch");
    ref_embeddings.push_back(encode(ckpt.encoder, inst.features));
  }
  const ReferenceSet refs =
      build_reference_set(reference, ref_embeddings, cfg.ref_cap, cfg.bin_width, rng);

  const CompareMode mode =
      ckpt.config.mode == TrainMode::uol ? CompareMode::sampled : CompareMode::point;
  for (const RatedInstance& inst : instances) {
    const GaussianEmbedding z = encode(ckpt.encoder, inst.features);
    preds.push_back(
        estimate_score(ckpt.comparator, z, refs, cfg.bt, mode, cfg.estimate_draws, rng));
  }
  return preds;
}

MetricsReport evaluate(const ModelCheckpoint& ckpt, std::span<const RatedInstance> instances,
                       std::span<const RatedInstance> reference, const EvalConfig& cfg) {
  const std::vector<double> preds = predict_scores(ckpt, instances, reference, cfg);
  std::vector<double> targets;
  targets.reserve(instances.size());
  for (const RatedInstance& inst : instances) {
    if (cfg.target == EvalTarget::true_score) {
      if (!inst.true_score)
        throw InvalidArgument("evaluate: instance lacks a true score");
      targets.push_back(*inst.true_score);
    } else {
      targets.push_back(inst.mean_score);
    }
  }
  return compute_metrics(preds, targets);
}

}  // namespace uol
