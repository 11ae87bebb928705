#include "uol/dataset_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "uol/error.hpp"

namespace uol {

using json = nlohmann::ordered_json;

void save_dataset(const std::string& path, std::span<const RatedInstance> instances) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (const RatedInstance& inst : instances) {
    json row;
    row["id"] = inst.id;
    row["features"] = inst.features;
    row["mean_score"] = inst.mean_score;
    row["rating_variance"] = inst.rating_variance;
    if (inst.true_score) {
      row["true_score"] = *inst.true_score;
    } else {
      row["true_score"] = nullptr;
    }
    if (inst.has_ratings()) {
      row["ratings"] = inst.ratings;
    } else {
      row["ratings"] = nullptr;
    }
    out << row.dump() << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

namespace {

constexpr double kStatTol = 1e-9;

void check(bool ok, const std::string& msg, int line) {
  if (!ok) throw ValidationError(msg, line);
}

RatedInstance parse_instance(const std::string& text, int line) {
  json row;
  try {
    row = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad JSON: ") + e.what(), line);
  }

  RatedInstance inst;
  try {
    inst.id = row.at("id").get<std::int64_t>();
    inst.features = row.at("features").get<Vec>();
    inst.mean_score = row.at("mean_score").get<double>();
    inst.rating_variance = row.at("rating_variance").get<double>();
    if (row.contains("true_score") && !row["true_score"].is_null()) {
      inst.true_score = row["true_score"].get<double>();
    }
    if (row.contains("ratings") && !row["ratings"].is_null()) {
      inst.ratings = row["ratings"].get<std::vector<double>>();
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad instance: ") + e.what(), line);
  }

  check(!inst.features.empty(), "features must be non-empty", line);
  check(inst.mean_score >= 1.0 && inst.mean_score <= 5.0,
        "mean_score outside [1,5]", line);
  check(inst.rating_variance >= 0.0, "rating_variance must be >= 0", line);
  if (inst.true_score) {
    check(*inst.true_score >= 1.0 && *inst.true_score <= 5.0,
          "true_score outside [1,5]", line);
  }
  if (inst.has_ratings()) {
    double sum = 0.0;
    for (double r : inst.ratings) {
      check(r >= 1.0 && r <= 5.0, "rating outside [1,5]", line);
      sum += r;
    }
    const double mean = sum / static_cast<double>(inst.ratings.size());
    check(std::abs(mean - inst.mean_score) <= kStatTol,
          "mean_score does not match ratings", line);
    double ss = 0.0;
    for (double r : inst.ratings) ss += (r - mean) * (r - mean);
    const double var = ss / static_cast<double>(inst.ratings.size());
    check(std::abs(var - inst.rating_variance) <= kStatTol,
          "rating_variance does not match ratings", line);
  }
  return inst;
}

}  // namespace

std::vector<RatedInstance> load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);

  std::vector<RatedInstance> out;
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_instance(text, line));
  }
  if (in.bad()) throw IoError("read failed: " + path);
  return out;
}

}  // namespace uol
