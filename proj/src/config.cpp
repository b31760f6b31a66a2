#include "pinnbound/config.hpp"

#include <algorithm>
#include <stdexcept>

#include "pinnbound/json_io.hpp"

namespace pinnbound {

using nlohmann::json;

void RunConfig::validate() const {
  activation.validate();
  loss.validate();
  train.validate();
  box.validate();
  if (p < 1) throw std::invalid_argument("config: network.p must be >= 1");
  if (w_scale < 0) throw std::invalid_argument("config: network.w_scale must be >= 0");
  if (N_r < 1 || N_0 < 1) throw std::invalid_argument("config: sampling.N_r and N_0 must be >= 1");
  if (population_points < 1) throw std::invalid_argument("config: sampling.population_points must be >= 1");
  if (C_z && *C_z < 0) throw std::invalid_argument("config: bound.C_z must be >= 0");
  if (C_z0 && *C_z0 < 0) throw std::invalid_argument("config: bound.C_z0 must be >= 0");
  if (replicates < 1) throw std::invalid_argument("config: sweep.replicates must be >= 1");
  if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
}

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw std::invalid_argument("config: '" + where + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw std::invalid_argument("config: unknown key '" + (where.empty() ? key : where + "." + key) + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument("config: '" + where + "." + key + "' has the wrong type");
  }
}

void read_optional(const json& obj, const char* key, std::optional<double>& out, const std::string& where) {
  if (!obj.contains(key)) return;
  if (obj.at(key).is_null()) {
    out.reset();
    return;
  }
  double v = 0;
  read(obj, key, v, where);
  out = v;
}

}  // namespace

json to_json(const RunConfig& c) {
  return {
      {"activation", {{"family", c.activation.family_name()}, {"k", c.activation.k}}},
      {"network", {{"p", c.p}, {"w_scale", c.w_scale}}},
      {"loss", {{"delta", c.loss.delta}, {"nu", c.loss.nu}, {"lambda0", c.loss.lambda0}, {"lambda1", c.loss.lambda1}}},
      {"training",
       {{"epochs", c.train.epochs},
        {"learning_rate", c.train.learning_rate},
        {"beta1", c.train.beta1},
        {"beta2", c.train.beta2},
        {"eps_adam", c.train.eps_adam},
        {"weight_decay", c.train.weight_decay},
        {"log_every", c.train.log_every}}},
      {"sampling",
       {{"box", {{"lo", vector_to_json(c.box.lo)}, {"hi", vector_to_json(c.box.hi)}}},
        {"N_r", c.N_r},
        {"N_0", c.N_0},
        {"population_points", c.population_points}}},
      {"bound",
       {{"cz_convention", to_string(c.cz_convention)},
        {"c1_variant", to_string(c.c1_variant)},
        {"sigma_override", c.sigma_override ? to_json(*c.sigma_override) : json(nullptr)},
        {"C_z", optional_json(c.C_z)},
        {"C_z0", optional_json(c.C_z0)}}},
      {"sweep", {{"N_r_values", c.sweep_N_r}, {"replicates", c.replicates}}},
      {"verify",
       {{"seed", c.verify.seed},
        {"instances", c.verify.instances},
        {"symmetrization_classes", c.verify.symmetrization_classes},
        {"n_draws", c.verify.n_draws},
        {"symmetrization_trials", c.verify.symmetrization_trials},
        {"population_points", c.verify.population_points}}},
      {"seed", c.seed},
      {"threads", c.threads},
      {"out_dir", c.out_dir},
  };
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  check_keys(j, {"activation", "network", "loss", "training", "sampling", "bound", "sweep", "verify", "seed",
                 "threads", "out_dir"},
             "");
  if (j.contains("activation")) {
    const json& a = j.at("activation");
    check_keys(a, {"family", "k"}, "activation");
    std::string family = c.activation.family_name();
    int k = c.activation.k;
    read(a, "family", family, "activation");
    read(a, "k", k, "activation");
    c.activation = ActivationSpec::parse(family, k);
  }
  if (j.contains("network")) {
    const json& n = j.at("network");
    check_keys(n, {"p", "w_scale"}, "network");
    read(n, "p", c.p, "network");
    read(n, "w_scale", c.w_scale, "network");
  }
  if (j.contains("loss")) {
    const json& l = j.at("loss");
    check_keys(l, {"delta", "nu", "lambda0", "lambda1"}, "loss");
    read(l, "delta", c.loss.delta, "loss");
    read(l, "nu", c.loss.nu, "loss");
    read(l, "lambda0", c.loss.lambda0, "loss");
    read(l, "lambda1", c.loss.lambda1, "loss");
  }
  if (j.contains("training")) {
    const json& t = j.at("training");
    check_keys(t, {"epochs", "learning_rate", "beta1", "beta2", "eps_adam", "weight_decay", "log_every"},
               "training");
    read(t, "epochs", c.train.epochs, "training");
    read(t, "learning_rate", c.train.learning_rate, "training");
    read(t, "beta1", c.train.beta1, "training");
    read(t, "beta2", c.train.beta2, "training");
    read(t, "eps_adam", c.train.eps_adam, "training");
    read(t, "weight_decay", c.train.weight_decay, "training");
    read(t, "log_every", c.train.log_every, "training");
  }
  if (j.contains("sampling")) {
    const json& s = j.at("sampling");
    check_keys(s, {"box", "N_r", "N_0", "population_points"}, "sampling");
    if (s.contains("box")) {
      const json& b = s.at("box");
      check_keys(b, {"lo", "hi"}, "sampling.box");
      try {
        if (b.contains("lo")) c.box.lo = vector_from_json(b.at("lo"));
        if (b.contains("hi")) c.box.hi = vector_from_json(b.at("hi"));
      } catch (const FormatError& e) {
        throw std::invalid_argument(std::string("config: sampling.box: ") + e.what());
      }
    }
    read(s, "N_r", c.N_r, "sampling");
    read(s, "N_0", c.N_0, "sampling");
    read(s, "population_points", c.population_points, "sampling");
  }
  if (j.contains("bound")) {
    const json& b = j.at("bound");
    check_keys(b, {"cz_convention", "c1_variant", "sigma_override", "C_z", "C_z0"}, "bound");
    std::string conv = to_string(c.cz_convention), variant = to_string(c.c1_variant);
    read(b, "cz_convention", conv, "bound");
    read(b, "c1_variant", variant, "bound");
    c.cz_convention = parse_moment_convention(conv);
    c.c1_variant = parse_c1_variant(variant);
    if (b.contains("sigma_override") && !b.at("sigma_override").is_null()) {
      const json& so = b.at("sigma_override");
      check_keys(so, {"L_sigma", "L_sigma1", "L_sigma2", "B_sigma", "B_sigma1", "c0", "c1", "c2"},
                 "bound.sigma_override");
      try {
        c.sigma_override = sigma_constants_from_json(so);
      } catch (const json::exception&) {
        throw std::invalid_argument("config: bound.sigma_override needs all eight numeric constants");
      }
    }
    read_optional(b, "C_z", c.C_z, "bound");
    read_optional(b, "C_z0", c.C_z0, "bound");
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    check_keys(s, {"N_r_values", "replicates"}, "sweep");
    read(s, "N_r_values", c.sweep_N_r, "sweep");
    read(s, "replicates", c.replicates, "sweep");
  }
  if (j.contains("verify")) {
    const json& v = j.at("verify");
    check_keys(v, {"seed", "instances", "symmetrization_classes", "n_draws", "symmetrization_trials",
                   "population_points"},
               "verify");
    read(v, "seed", c.verify.seed, "verify");
    read(v, "instances", c.verify.instances, "verify");
    read(v, "symmetrization_classes", c.verify.symmetrization_classes, "verify");
    read(v, "n_draws", c.verify.n_draws, "verify");
    read(v, "symmetrization_trials", c.verify.symmetrization_trials, "verify");
    read(v, "population_points", c.verify.population_points, "verify");
  }
  read(j, "seed", c.seed, "");
  read(j, "threads", c.threads, "");
  read(j, "out_dir", c.out_dir, "");
  c.validate();
  return c;
}

RunConfig preset(const std::string& name) {
  RunConfig c;  // defaults are the desk preset
  if (name == "desk") return c;
  if (name == "sweep") {
    c.sweep_N_r = {27, 64, 125, 216, 343, 512, 729, 1000};
    c.N_r = 1000;
    c.N_0 = 2500;
    c.train.epochs = 20000;
    return c;
  }
  if (name == "figure1") {
    c.box.lo = Vec<double>::Zero(3);
    c.box.hi = (Vec<double>(3) << 2.0, 2.0, 1.0).finished();
    c.N_r = 1000;
    c.N_0 = 2500;
    c.train.epochs = 20000;
    return c;
  }
  throw std::invalid_argument("unknown preset '" + name + "' (expected desk, sweep, or figure1)");
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument("override '" + assignment + "' must look like key.path=value");
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw std::invalid_argument("override '" + assignment + "' has an empty key");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    if (!node->contains(key) || !(*node)[key].is_object()) (*node)[key] = json::object();
    node = &(*node)[key];
    start = dot + 1;
  }
}

RunConfig resolve_config(const std::string& preset_name, const std::string& config_path,
                         const std::vector<std::string>& overrides) {
  json doc = to_json(preset(preset_name.empty() ? "desk" : preset_name));
  if (!config_path.empty()) {
    json file;
    try {
      file = read_json_file(config_path);
    } catch (const FormatError& e) {
      throw std::invalid_argument(e.what());
    }
    doc.merge_patch(file);
    // merge_patch drops keys set to null; nullable fields default to null anyway.
  }
  for (const auto& o : overrides) apply_override(doc, o);
  return run_config_from_json(doc);
}

SweepConfig sweep_config(const RunConfig& c) {
  SweepConfig s;
  s.activation = c.activation;
  s.p = c.p;
  s.w_scale = c.w_scale;
  s.loss = c.loss;
  s.train = c.train;
  s.box = c.box;
  s.N_r_values = c.sweep_N_r;
  s.N_0 = c.N_0;
  s.population_points = c.population_points;
  s.replicates = c.replicates;
  s.seed = c.seed;
  s.convention = c.cz_convention;
  s.variant = c.c1_variant;
  s.sigma_override = c.sigma_override;
  s.threads = c.threads;
  return s;
}

GapConfig gap_config(const RunConfig& c, std::uint64_t population_seed) {
  GapConfig g;
  g.loss = c.loss;
  g.box = c.box;
  g.population_points = c.population_points;
  g.seed = population_seed;
  g.convention = c.cz_convention;
  g.variant = c.c1_variant;
  g.sigma_override = c.sigma_override;
  g.threads = c.threads;
  return g;
}

}  // namespace pinnbound
