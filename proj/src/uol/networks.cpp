#include "uol/networks.hpp"

#include <cmath>

#include "uol/error.hpp"

namespace uol {

Mlp init_params(std::span<const LayerSpec> spec, Rng& rng) {
  if (spec.empty()) throw InvalidArgument("init_params: empty layer spec");
  Mlp mlp;
  mlp.layers.reserve(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const LayerSpec& s = spec[i];
    if (s.in < 1 || s.out < 1) throw InvalidArgument("init_params: non-positive layer size");
    if (i > 0 && s.in != spec[i - 1].out)
      throw InvalidArgument("init_params: layer dimensions do not chain");
    LinearLayer layer;
    layer.w = Mat(s.out, s.in);
    const double bound = 1.0 / std::sqrt(static_cast<double>(s.in));
    for (double& x : layer.w.a) x = rng.uniform(-bound, bound);
    layer.b.assign(static_cast<std::size_t>(s.out), 0.0);
    layer.act = s.act;
    mlp.layers.push_back(std::move(layer));
  }
  return mlp;
}

std::size_t parameter_count(const Mlp& mlp) {
  std::size_t n = 0;
  for (const LinearLayer& l : mlp.layers) n += l.w.a.size() + l.b.size();
  return n;
}

Vec forward(const Mlp& mlp, std::span<const double> x, MlpCache* cache,
            std::size_t layer_count) {
  if (mlp.layers.empty()) throw InvalidArgument("forward: empty network");
  if (layer_count == kAllLayers) layer_count = mlp.layers.size();
  if (layer_count < 1 || layer_count > mlp.layers.size())
    throw InvalidArgument("forward: layer count out of range");
  if (static_cast<int>(x.size()) != mlp.input_dim())
    throw InvalidArgument("forward: input dimension mismatch");

  if (cache) {
    cache->input.assign(x.begin(), x.end());
    cache->post.resize(layer_count);
  }
  Vec h(x.begin(), x.end());
  Vec next;
  for (std::size_t li = 0; li < layer_count; ++li) {
    const LinearLayer& l = mlp.layers[li];
    next.assign(l.b.begin(), l.b.end());
    const double* wrow = l.w.a.data();
    for (int r = 0; r < l.w.rows; ++r, wrow += l.w.cols) {
      double acc = next[r];
      for (int c = 0; c < l.w.cols; ++c) acc += wrow[c] * h[c];
      next[r] = l.act == Activation::relu && acc < 0.0 ? 0.0 : acc;
    }
    h.swap(next);
    if (cache) cache->post[li] = h;
  }
  return h;
}

MlpGrads zeros_like(const Mlp& mlp) {
  MlpGrads g;
  g.w.reserve(mlp.layers.size());
  g.b.reserve(mlp.layers.size());
  for (const LinearLayer& l : mlp.layers) {
    g.w.emplace_back(l.w.rows, l.w.cols);
    g.b.emplace_back(l.b.size(), 0.0);
  }
  return g;
}

namespace {

void check_cache(const Mlp& mlp, const MlpCache& cache, std::size_t dout_size,
                 const MlpGrads& acc) {
  const std::size_t used = cache.post.size();
  if (used < 1 || used > mlp.layers.size() ||
      static_cast<int>(cache.input.size()) != mlp.input_dim())
    throw ContractViolation("backward: cache does not match network");
  for (std::size_t li = 0; li < used; ++li) {
    if (cache.post[li].size() != mlp.layers[li].b.size())
      throw ContractViolation("backward: cache does not match network");
  }
  if (dout_size != mlp.layers[used - 1].b.size())
    throw ContractViolation("backward: output gradient dimension mismatch");
  if (acc.w.size() != mlp.layers.size())
    throw ContractViolation("backward: gradient accumulator does not match network");
}

}  // namespace

Vec backward(const Mlp& mlp, const MlpCache& cache, std::span<const double> dout,
             MlpGrads& acc) {
  check_cache(mlp, cache, dout.size(), acc);

  Vec d(dout.begin(), dout.end());
  Vec dprev;
  for (std::size_t li = cache.post.size(); li-- > 0;) {
    const LinearLayer& l = mlp.layers[li];
    const Vec& out = cache.post[li];
    if (l.act == Activation::relu) {
      for (std::size_t r = 0; r < d.size(); ++r) {
        if (out[r] <= 0.0) d[r] = 0.0;
      }
    }
    const Vec& in = li == 0 ? cache.input : cache.post[li - 1];

    Mat& gw = acc.w[li];
    Vec& gb = acc.b[li];
    dprev.assign(in.size(), 0.0);
    const double* wrow = l.w.a.data();
    double* gwrow = gw.a.data();
    for (int r = 0; r < l.w.rows; ++r, wrow += l.w.cols, gwrow += l.w.cols) {
      const double dr = d[r];
      gb[r] += dr;
      for (int c = 0; c < l.w.cols; ++c) {
        gwrow[c] += dr * in[c];
        dprev[c] += dr * wrow[c];
      }
    }
    d.swap(dprev);
  }
  return d;
}

Mlp make_encoder(int feature_dim, int hidden, int embed_dim, Rng& rng) {
  const LayerSpec spec[] = {
      {feature_dim, hidden, Activation::relu},
      {hidden, hidden, Activation::relu},
      {hidden, 2 * embed_dim, Activation::identity},
  };
  return init_params(spec, rng);
}

Mlp make_comparator(int embed_dim, int hidden, Rng& rng) {
  const LayerSpec spec[] = {
      {2 * embed_dim, hidden, Activation::relu},
      {hidden, hidden, Activation::relu},
      {hidden, 3, Activation::identity},
  };
  return init_params(spec, rng);
}

Mlp make_regression_head(int hidden, Rng& rng) {
  const LayerSpec spec[] = {{hidden, 1, Activation::identity}};
  return init_params(spec, rng);
}

GaussianEmbedding encode(const Mlp& encoder, std::span<const double> features,
                         MlpCache* cache) {
  const Vec out = forward(encoder, features, cache);
  if (out.size() % 2 != 0) throw InvalidArgument("encode: encoder output dim must be even");
  const std::size_t d = out.size() / 2;
  GaussianEmbedding z;
  z.mu.assign(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(d));
  z.var_diag.resize(d);
  for (std::size_t j = 0; j < d; ++j) z.var_diag[j] = std::exp(out[d + j]);
  return z;
}

Vec encode_output_grad(const GaussianEmbedding& z, std::span<const double> dmu,
                       std::span<const double> dvar) {
  const std::size_t d = z.mu.size();
  if (dmu.size() != d || dvar.size() != d)
    throw InvalidArgument("encode_output_grad: dimension mismatch");
  Vec dout(2 * d);
  for (std::size_t j = 0; j < d; ++j) {
    dout[j] = dmu[j];
    dout[d + j] = dvar[j] * z.var_diag[j];
  }
  return dout;
}

OrderLogits compare_points(const Mlp& comparator, std::span<const double> z1,
                           std::span<const double> z2, MlpCache* cache) {
  if (z1.size() != z2.size()) throw InvalidArgument("compare_points: dimension mismatch");
  Vec joint;
  joint.reserve(z1.size() + z2.size());
  joint.insert(joint.end(), z1.begin(), z1.end());
  joint.insert(joint.end(), z2.begin(), z2.end());
  const Vec out = forward(comparator, joint, cache);
  if (out.size() != 3) throw InvalidArgument("compare_points: comparator must emit 3 logits");
  OrderLogits logits;
  logits.v = {out[0], out[1], out[2]};
  return logits;
}

}  // namespace uol
