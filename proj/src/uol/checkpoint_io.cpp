#include "uol/checkpoint_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "uol/error.hpp"

namespace uol {

using json = nlohmann::ordered_json;

namespace {

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

json layer_to_json(const LinearLayer& l) {
  json out;
  out["in"] = l.w.cols;
  out["out"] = l.w.rows;
  out["activation"] = l.act == Activation::relu ? "relu" : "identity";
  out["weights"] = l.w.a;  // row-major
  out["bias"] = l.b;
  return out;
}

json mlp_to_json(const Mlp& mlp) {
  json layers = json::array();
  for (const LinearLayer& l : mlp.layers) layers.push_back(layer_to_json(l));
  return json{{"layers", std::move(layers)}};
}

LinearLayer layer_from_json(const json& j) {
  LinearLayer l;
  const int in = j.at("in").get<int>();
  const int out = j.at("out").get<int>();
  if (in < 1 || out < 1) throw ValidationError("checkpoint: non-positive layer size");
  const std::string act = j.at("activation").get<std::string>();
  if (act == "relu") {
    l.act = Activation::relu;
  } else if (act == "identity") {
    l.act = Activation::identity;
  } else {
    throw ValidationError("checkpoint: unknown activation " + act);
  }
  l.w = Mat(out, in);
  l.w.a = j.at("weights").get<std::vector<double>>();
  l.b = j.at("bias").get<Vec>();
  if (l.w.a.size() != static_cast<std::size_t>(in) * static_cast<std::size_t>(out) ||
      l.b.size() != static_cast<std::size_t>(out))
    throw ValidationError("checkpoint: weight array does not match the shape manifest");
  return l;
}

Mlp mlp_from_json(const json& j) {
  Mlp mlp;
  for (const json& lj : j.at("layers")) mlp.layers.push_back(layer_from_json(lj));
  if (mlp.layers.empty()) throw ValidationError("checkpoint: network with no layers");
  return mlp;
}

json config_to_json(const TrainConfig& cfg) {
  return json{
      {"mode", to_string(cfg.mode)},
      {"theta", cfg.theta},
      {"tau", cfg.tau},
      {"alpha", cfg.alpha},
      {"beta", cfg.beta},
      {"mc_samples", cfg.mc_samples},
      {"batch_size", cfg.batch_size},
      {"epochs", cfg.epochs},
      {"lr_max", cfg.lr_max},
      {"lr_min", cfg.lr_min},
      {"pair_cap", cfg.pair_cap},
      {"hidden", cfg.hidden},
      {"embed_dim", cfg.embed_dim},
      {"normalized_kl", cfg.normalized_kl},
      {"seed", cfg.seed},
  };
}

TrainConfig config_from_json(const json& j) {
  TrainConfig cfg;
  cfg.mode = train_mode_from_string(j.at("mode").get<std::string>());
  cfg.theta = j.at("theta").get<double>();
  cfg.tau = j.at("tau").get<double>();
  cfg.alpha = j.at("alpha").get<double>();
  cfg.beta = j.at("beta").get<double>();
  cfg.mc_samples = j.at("mc_samples").get<int>();
  cfg.batch_size = j.at("batch_size").get<int>();
  cfg.epochs = j.at("epochs").get<int>();
  cfg.lr_max = j.at("lr_max").get<double>();
  cfg.lr_min = j.at("lr_min").get<double>();
  cfg.pair_cap = j.at("pair_cap").get<int>();
  cfg.hidden = j.at("hidden").get<int>();
  cfg.embed_dim = j.at("embed_dim").get<int>();
  cfg.normalized_kl = j.at("normalized_kl").get<bool>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelCheckpoint& ckpt) {
  json doc;
  doc["format_version"] = ckpt.format_version;
  doc["config"] = config_to_json(ckpt.config);
  doc["feature_dim"] = ckpt.feature_dim;
  doc["networks"] = json{
      {"encoder", mlp_to_json(ckpt.encoder)},
      {"comparator", mlp_to_json(ckpt.comparator)},
      {"head", mlp_to_json(ckpt.head)},
  };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

ModelCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path);

  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint is not valid JSON: ") + e.what());
  }

  ModelCheckpoint ckpt;
  try {
    ckpt.format_version = doc.at("format_version").get<int>();
    if (ckpt.format_version != kCheckpointFormatVersion)
      throw UnsupportedVersion("unsupported checkpoint format_version " +
                               std::to_string(ckpt.format_version));
    ckpt.config = config_from_json(doc.at("config"));
    ckpt.feature_dim = doc.at("feature_dim").get<int>();
    const json& nets = doc.at("networks");
    ckpt.encoder = mlp_from_json(nets.at("encoder"));
    ckpt.comparator = mlp_from_json(nets.at("comparator"));
    ckpt.head = mlp_from_json(nets.at("head"));
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint missing required fields: ") + e.what());
  }
  return ckpt;
}

void save_loss_trace(const std::string& path, std::span<const EpochTrace> trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "epoch,lr,ce,hinge,kl,total\n";
  for (const EpochTrace& row : trace) {
    out << row.epoch << ',' << format_double(row.lr) << ',' << format_double(row.ce) << ','
        << format_double(row.hinge) << ',' << format_double(row.kl) << ','
        << format_double(row.total) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace uol
