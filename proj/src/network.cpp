#include "pinnbound/network.hpp"

#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "pinnbound/json_io.hpp"

namespace pinnbound {

using nlohmann::json;

PinnWeights<double> init_weights(int d, int p, std::uint64_t seed, double w_scale) {
  if (d < 1 || p < 1) throw DimensionError("init_weights: d and p must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat<double> A1(d, p);
  Vec<double> a2(p);
  Mat<double> W(p, d + 1);
  for (int k = 0; k < d; ++k)
    for (int q = 0; q < p; ++q) A1(k, q) = normal(rng);
  for (int q = 0; q < p; ++q) a2(q) = normal(rng);
  for (int q = 0; q < p; ++q)
    for (int j = 0; j <= d; ++j) W(q, j) = w_scale * normal(rng);
  return PinnWeights<double>(std::move(W), std::move(A1), std::move(a2));
}

namespace {

json checkpoint_json(const PinnWeights<double>& w, const ActivationSpec& spec) {
  return json{{"d", w.d()},
              {"p", w.p()},
              {"activation", {{"family", spec.family_name()}, {"k", spec.k}}},
              {"W", matrix_to_json(w.W())},
              {"A1", matrix_to_json(w.A1())},
              {"a2", vector_to_json(w.a2())}};
}

}  // namespace

void save_checkpoint(const PinnWeights<double>& w, const ActivationSpec& spec,
                     const std::filesystem::path& path, const json& meta) {
  json doc = checkpoint_json(w, spec);
  if (!meta.is_null()) doc["meta"] = meta;
  write_json_file(path, doc);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  try {
    const int d = doc.at("d").get<int>();
    const int p = doc.at("p").get<int>();
    const auto& act = doc.at("activation");
    const ActivationSpec spec =
        ActivationSpec::parse(act.at("family").get<std::string>(), act.at("k").get<int>());
    Mat<double> W = matrix_from_json(doc.at("W"));
    Mat<double> A1 = matrix_from_json(doc.at("A1"));
    Vec<double> a2 = vector_from_json(doc.at("a2"));
    if (W.rows() != p || W.cols() != d + 1 || A1.rows() != d || A1.cols() != p || a2.size() != p) {
      throw DimensionError("checkpoint " + path.string() + ": array shapes disagree with d=" +
                           std::to_string(d) + ", p=" + std::to_string(p));
    }
    return {PinnWeights<double>(std::move(W), std::move(A1), std::move(a2)), spec};
  } catch (const json::exception& e) {
    throw FormatError("checkpoint " + path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    if (dynamic_cast<const DimensionError*>(&e)) throw;
    throw FormatError("checkpoint " + path.string() + ": " + e.what());
  }
}

}  // namespace pinnbound
