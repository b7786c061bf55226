// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/train/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "json.hpp"

namespace hetmol::train {

using nlohmann::json;

double default_cutoff(ingest::Property target) {
  using ingest::Property;
  switch (target) {
    case Property::kZpve:
    case Property::kU0:
    case Property::kU:
    case Property::kH:
    case Property::kG:
    case Property::kCv:
      return 3.0;
    default:
      return 5.0;
  }
}

std::string precision_name(Precision p) { return p == Precision::kF32 ? "f32" : "f64"; }

Precision parse_precision(const std::string& name) {
  if (name == "f64") return Precision::kF64;
  if (name == "f32") return Precision::kF32;
  throw ConfigError("precision must be f32 or f64, got '" + name + "'");
}

double TrainConfig::resolved_cutoff() const { return cutoff ? *cutoff : default_cutoff(target); }

model::ModelConfig TrainConfig::model_config(int vocab_order1, int vocab_order2) const {
  model::ModelConfig m;
  m.latent = latent;
  m.depth = depth;
  m.vocab_order1 = vocab_order1;
  m.vocab_order2 = vocab_order2;
  m.k_distance = rbf_distance;
  m.k_length = rbf_length;
  m.k_angle = rbf_angle;
  m.use_order_2 = use_order_2;
  m.use_inter_order_edges = use_inter_order_edges;
  m.leaky_slope = leaky_slope;
  m.bn_eps = bn_eps;
  m.bn_momentum = bn_momentum;
  return m;
}

void TrainConfig::validate() const {
  const auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(n_train >= 1, "n_train must be >= 1");
  require(n_val >= 0 && n_test >= 0, "n_val and n_test must be >= 0");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(eval_batch_size >= 1, "eval_batch_size must be >= 1");
  require(learning_rate >= 0.0, "learning_rate must be >= 0");
  require(lr_decay_factor > 0.0 && lr_decay_factor <= 1.0, "lr_decay_factor must be in (0, 1]");
  require(lr_decay_steps >= 1, "lr_decay_steps must be >= 1");
  require(max_steps >= 0, "max_steps must be >= 0");
  require(eval_every >= 1, "eval_every must be >= 1");
  require(patience_evals >= 1, "patience_evals must be >= 1");
  require(lambda >= 0.0, "lambda must be >= 0");
  require(clip_grad_norm >= 0.0, "clip_grad_norm must be >= 0");
  require(!cutoff || *cutoff > 0.0, "cutoff must be > 0");
  require(latent >= 1 && depth >= 1, "latent and depth must be >= 1");
  require(rbf_distance >= 2 && rbf_length >= 2 && rbf_angle >= 2, "RBF sizes must be >= 2");
  require(bn_momentum >= 0.0 && bn_momentum < 1.0, "bn_momentum must be in [0, 1)");
  require(bn_eps > 0.0, "bn_eps must be > 0");
  require(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0,
          "adam betas must be in [0, 1)");
  require(adam_eps > 0.0, "adam_eps must be > 0");
}

namespace {

std::string type_error(const std::string& key, const char* expected) {
  return "config key '" + key + "' must be " + expected;
}

double as_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(type_error(key, "a number"));
  return v.get<double>();
}

std::int64_t as_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError(type_error(key, "an integer"));
  return v.get<std::int64_t>();
}

std::uint64_t as_seed(const json& v, const std::string& key) {
  const auto x = as_int(v, key);
  if (x < 0) throw ConfigError(type_error(key, "a non-negative integer"));
  return static_cast<std::uint64_t>(x);
}

bool as_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError(type_error(key, "true or false"));
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(type_error(key, "a string"));
  return v.get<std::string>();
}

using Setter = std::function<void(TrainConfig&, const json&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
#define HETMOL_NUM(k) t[#k] = [](TrainConfig& c, const json& v, const std::string& key) { c.k = as_number(v, key); }
#define HETMOL_INT(k) t[#k] = [](TrainConfig& c, const json& v, const std::string& key) { c.k = as_int(v, key); }
#define HETMOL_SMALL(k) \
  t[#k] = [](TrainConfig& c, const json& v, const std::string& key) { c.k = static_cast<int>(as_int(v, key)); }
#define HETMOL_SEED(k) t[#k] = [](TrainConfig& c, const json& v, const std::string& key) { c.k = as_seed(v, key); }
#define HETMOL_BOOL(k) t[#k] = [](TrainConfig& c, const json& v, const std::string& key) { c.k = as_bool(v, key); }
    t["dataset"] = [](TrainConfig& c, const json& v, const std::string& key) { c.dataset = as_string(v, key); };
    t["out_dir"] = [](TrainConfig& c, const json& v, const std::string& key) { c.out_dir = as_string(v, key); };
    t["target"] = [](TrainConfig& c, const json& v, const std::string& key) {
      const auto name = as_string(v, key);
      const auto p = ingest::property_from_name(name);
      if (!p) throw ConfigError("unknown target '" + name + "'; valid targets: " + ingest::valid_property_names());
      c.target = *p;
    };
    t["precision"] = [](TrainConfig& c, const json& v, const std::string& key) {
      c.precision = parse_precision(as_string(v, key));
    };
    t["cutoff"] = [](TrainConfig& c, const json& v, const std::string& key) {
      if (v.is_null())
        c.cutoff.reset();
      else
        c.cutoff = as_number(v, key);
    };
    HETMOL_INT(n_train);
    HETMOL_INT(n_val);
    HETMOL_INT(n_test);
    HETMOL_SEED(split_seed);
    HETMOL_SEED(model_seed);
    HETMOL_SEED(shuffle_seed);
    HETMOL_INT(batch_size);
    HETMOL_INT(eval_batch_size);
    HETMOL_NUM(learning_rate);
    HETMOL_NUM(lr_decay_factor);
    HETMOL_INT(lr_decay_steps);
    HETMOL_INT(max_steps);
    HETMOL_INT(eval_every);
    HETMOL_INT(patience_evals);
    HETMOL_NUM(lambda);
    HETMOL_NUM(clip_grad_norm);
    HETMOL_SMALL(latent);
    HETMOL_SMALL(depth);
    HETMOL_SMALL(rbf_distance);
    HETMOL_SMALL(rbf_length);
    HETMOL_SMALL(rbf_angle);
    HETMOL_NUM(leaky_slope);
    HETMOL_NUM(bn_momentum);
    HETMOL_NUM(bn_eps);
    HETMOL_NUM(adam_beta1);
    HETMOL_NUM(adam_beta2);
    HETMOL_NUM(adam_eps);
    HETMOL_BOOL(use_mtl_loss);
    HETMOL_BOOL(use_inter_order_edges);
    HETMOL_BOOL(use_order_2);
#undef HETMOL_NUM
#undef HETMOL_INT
#undef HETMOL_SMALL
#undef HETMOL_SEED
#undef HETMOL_BOOL
    return t;
  }();
  return table;
}

}  // namespace

TrainConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  TrainConfig config;
  const auto& table = setters();
  for (const auto& [key, value] : doc.items()) {
    auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(config, value, key);
  }
  config.validate();
  return config;
}

TrainConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const TrainConfig& c) {
  json j;
  j["dataset"] = c.dataset;
  j["target"] = std::string(ingest::property_name(c.target));
  j["precision"] = precision_name(c.precision);
  j["n_train"] = c.n_train;
  j["n_val"] = c.n_val;
  j["n_test"] = c.n_test;
  j["split_seed"] = c.split_seed;
  j["model_seed"] = c.model_seed;
  j["shuffle_seed"] = c.shuffle_seed;
  j["batch_size"] = c.batch_size;
  j["eval_batch_size"] = c.eval_batch_size;
  j["learning_rate"] = c.learning_rate;
  j["lr_decay_factor"] = c.lr_decay_factor;
  j["lr_decay_steps"] = c.lr_decay_steps;
  j["max_steps"] = c.max_steps;
  j["eval_every"] = c.eval_every;
  j["patience_evals"] = c.patience_evals;
  j["lambda"] = c.lambda;
  j["clip_grad_norm"] = c.clip_grad_norm;
  j["cutoff"] = c.resolved_cutoff();
  j["latent"] = c.latent;
  j["depth"] = c.depth;
  j["rbf_distance"] = c.rbf_distance;
  j["rbf_length"] = c.rbf_length;
  j["rbf_angle"] = c.rbf_angle;
  j["leaky_slope"] = c.leaky_slope;
  j["bn_momentum"] = c.bn_momentum;
  j["bn_eps"] = c.bn_eps;
  j["adam_beta1"] = c.adam_beta1;
  j["adam_beta2"] = c.adam_beta2;
  j["adam_eps"] = c.adam_eps;
  j["use_mtl_loss"] = c.use_mtl_loss;
  j["use_inter_order_edges"] = c.use_inter_order_edges;
  j["use_order_2"] = c.use_order_2;
  return j.dump(2);
}

}  // namespace hetmol::train
