#include "catlab/error.hpp"
#include "catlab/experiments.hpp"
#include "catlab/torus.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace catlab::experiments {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

void require_keys(const Json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) config_error(fmt::format("{} must be an object", where));
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) config_error(fmt::format("unknown key {}.{}", where, key));
}

template <class T>
T get(const Json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    config_error(fmt::format("{}.{}: {}", where, key, e.what()));
  }
}

void require_sizes(const std::vector<std::int64_t>& sizes, const std::string& where) {
  if (sizes.empty()) config_error(fmt::format("{} is empty", where));
  for (auto N : sizes)
    if (N < 1) config_error(fmt::format("{} contains N = {}", where, N));
}

void require_divisible(const std::vector<std::int64_t>& sizes, int q_side, const std::string& where) {
  for (auto N : sizes)
    if (N % q_side != 0) config_error(fmt::format("{}: q_side = {} does not divide N = {}", where, q_side, N));
}

}  // namespace

double ExperimentConfig::alpha_value() const {
  if (alpha) return *alpha;
  const auto A = torus::CatMap::make(map[0], map[1], map[2], map[3]);
  return 1.0 / (2.0 * A.log_lambda());
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["map"] = c.map;
  j["q_side"] = c.q_side;
  j["alpha"] = c.alpha ? Json(*c.alpha) : Json(nullptr);
  j["lattice"] = c.lattice;
  j["subsample"] = c.subsample;
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  j["verify_axioms"] = {{"N_list", c.verify.N_list}, {"trials", c.verify.trials}, {"fault", c.verify.fault}};
  j["semiclassics"] = {{"N_list", c.semiclassics.N_list},
                       {"roundtrip_N_list", c.semiclassics.roundtrip_N_list},
                       {"k_max", c.semiclassics.k_max},
                       {"threshold", c.semiclassics.threshold},
                       {"observable", c.semiclassics.observable}};
  j["alf"] = {{"N_list", c.alf.N_list},
              {"k_max", c.alf.k_max},
              {"gap_k_max", c.alf.gap_k_max},
              {"saturation_N", c.alf.saturation_N},
              {"saturation_k_max", c.alf.saturation_k_max},
              {"max_chains", c.alf.max_chains},
              {"max_entries", c.alf.max_entries}};
  j["cnt"] = {{"N_list", c.cnt.N_list}, {"k_max", c.cnt.k_max}, {"classical_k", c.cnt.classical_k}};
  return j;
}

Json default_config_json() { return to_json(ExperimentConfig{}); }

ExperimentConfig from_json(const Json& j) {
  require_keys(j, "config",
               {"map", "q_side", "alpha", "lattice", "subsample", "output_dir", "seed", "verify_axioms",
                "semiclassics", "alf", "cnt"});
  ExperimentConfig c;
  c.map = get<std::array<std::int64_t, 4>>(j, "map", "config");
  c.q_side = get<int>(j, "q_side", "config");
  if (!j.at("alpha").is_null()) c.alpha = get<double>(j, "alpha", "config");
  c.lattice = get<std::int64_t>(j, "lattice", "config");
  c.subsample = get<int>(j, "subsample", "config");
  c.output_dir = get<std::string>(j, "output_dir", "config");
  c.seed = get<std::uint64_t>(j, "seed", "config");

  const Json& v = j.at("verify_axioms");
  require_keys(v, "verify_axioms", {"N_list", "trials", "fault"});
  c.verify.N_list = get<std::vector<std::int64_t>>(v, "N_list", "verify_axioms");
  c.verify.trials = get<int>(v, "trials", "verify_axioms");
  c.verify.fault = get<std::string>(v, "fault", "verify_axioms");

  const Json& s = j.at("semiclassics");
  require_keys(s, "semiclassics", {"N_list", "roundtrip_N_list", "k_max", "threshold", "observable"});
  c.semiclassics.N_list = get<std::vector<std::int64_t>>(s, "N_list", "semiclassics");
  c.semiclassics.roundtrip_N_list = get<std::vector<std::int64_t>>(s, "roundtrip_N_list", "semiclassics");
  c.semiclassics.k_max = get<int>(s, "k_max", "semiclassics");
  c.semiclassics.threshold = get<double>(s, "threshold", "semiclassics");
  c.semiclassics.observable = get<std::string>(s, "observable", "semiclassics");

  const Json& a = j.at("alf");
  require_keys(a, "alf", {"N_list", "k_max", "gap_k_max", "saturation_N", "saturation_k_max", "max_chains", "max_entries"});
  c.alf.N_list = get<std::vector<std::int64_t>>(a, "N_list", "alf");
  c.alf.k_max = get<int>(a, "k_max", "alf");
  c.alf.gap_k_max = get<int>(a, "gap_k_max", "alf");
  c.alf.saturation_N = get<std::int64_t>(a, "saturation_N", "alf");
  c.alf.saturation_k_max = get<int>(a, "saturation_k_max", "alf");
  c.alf.max_chains = get<std::size_t>(a, "max_chains", "alf");
  c.alf.max_entries = get<std::size_t>(a, "max_entries", "alf");

  const Json& n = j.at("cnt");
  require_keys(n, "cnt", {"N_list", "k_max", "classical_k"});
  c.cnt.N_list = get<std::vector<std::int64_t>>(n, "N_list", "cnt");
  c.cnt.k_max = get<int>(n, "k_max", "cnt");
  c.cnt.classical_k = get<int>(n, "classical_k", "cnt");

  // Semantic checks, including the guards of the modules the sweeps call.
  try {
    (void)torus::CatMap::make(c.map[0], c.map[1], c.map[2], c.map[3]);
  } catch (const Error& e) {
    config_error(fmt::format("map: {}", e.what()));
  }
  if (c.q_side < 1) config_error("q_side must be >= 1");
  if (c.alpha && !(*c.alpha > 0.0)) config_error("alpha must be positive");
  if (c.lattice < c.q_side) config_error("lattice must be >= q_side");
  if (c.subsample < 1) config_error("subsample must be >= 1");
  if (c.output_dir.empty()) config_error("output_dir is empty");
  require_sizes(c.verify.N_list, "verify_axioms.N_list");
  if (c.verify.trials < 1) config_error("verify_axioms.trials must be >= 1");
  if (c.verify.fault != "none" && c.verify.fault != "scale_fundamental") {
    config_error(fmt::format("verify_axioms.fault: unknown value '{}'", c.verify.fault));
  }
  require_sizes(c.semiclassics.N_list, "semiclassics.N_list");
  require_sizes(c.semiclassics.roundtrip_N_list, "semiclassics.roundtrip_N_list");
  if (c.semiclassics.k_max < 1) config_error("semiclassics.k_max must be >= 1");
  if (!(c.semiclassics.threshold > 0.0)) config_error("semiclassics.threshold must be positive");
  if (c.semiclassics.observable != "cos_x1" && c.semiclassics.observable != "left_half") {
    config_error(fmt::format("semiclassics.observable: unknown value '{}'", c.semiclassics.observable));
  }
  require_sizes(c.alf.N_list, "alf.N_list");
  require_divisible(c.alf.N_list, c.q_side, "alf.N_list");
  if (c.alf.k_max < 1 || c.alf.gap_k_max < 0 || c.alf.saturation_k_max < 0) config_error("alf: invalid k limits");
  if (c.alf.saturation_k_max > 0) {
    require_sizes({c.alf.saturation_N}, "alf.saturation_N");
    require_divisible({c.alf.saturation_N}, c.q_side, "alf.saturation_N");
  }
  const double ell = static_cast<double>(c.q_side) * c.q_side + 1.0;
  auto check_budget = [&](std::int64_t N, int k) {
    const double chains = std::pow(ell, k);
    const double entries = chains * static_cast<double>(N) * static_cast<double>(N);
    if (chains > static_cast<double>(c.alf.max_chains) || entries > static_cast<double>(c.alf.max_entries)) {
      config_error(fmt::format("alf: {} chains at N = {}, k = {} exceed the memory budget", chains, N, k));
    }
  };
  for (auto N : c.alf.N_list) check_budget(N, c.alf.k_max);
  if (c.alf.saturation_k_max > 0) check_budget(c.alf.saturation_N, c.alf.saturation_k_max);
  require_sizes(c.cnt.N_list, "cnt.N_list");
  require_divisible(c.cnt.N_list, c.q_side, "cnt.N_list");
  if (c.cnt.k_max < 1) config_error("cnt.k_max must be >= 1");
  if (c.cnt.classical_k < 2) config_error("cnt.classical_k must be >= 2");
  if (static_cast<double>(std::max(c.cnt.k_max, c.cnt.classical_k)) * std::log2(static_cast<double>(c.q_side) * c.q_side) >= 63.0) {
    config_error("cnt: q^k exceeds 64-bit symbol codes");
  }
  return c;
}

void apply_override(Json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) config_error(fmt::format("override '{}' is not path=value", assignment));
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  Json* node = &j;
  std::stringstream parts(path);
  std::string key;
  std::vector<std::string> keys;
  while (std::getline(parts, key, '.')) keys.push_back(key);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (!node->is_object() || !node->contains(keys[i])) config_error(fmt::format("unknown parameter '{}'", path));
    node = &(*node)[keys[i]];
  }
  Json value = Json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  *node = value;
}

ExperimentConfig load_config(const std::optional<std::filesystem::path>& file,
                             const std::vector<std::string>& overrides) {
  Json j = default_config_json();
  if (file) {
    std::ifstream in(*file);
    if (!in) config_error(fmt::format("cannot read config file {}", file->string()));
    const Json user = Json::parse(in, nullptr, false);
    if (user.is_discarded()) config_error(fmt::format("{} is not valid JSON", file->string()));
    if (!user.is_object()) config_error("config file must hold a JSON object");
    // Merge so partial files keep the defaults of untouched keys.
    for (const auto& [key, value] : user.items()) {
      if (!j.contains(key)) config_error(fmt::format("unknown key config.{}", key));
      if (j[key].is_object() && value.is_object()) {
        for (const auto& [sub, v] : value.items()) {
          if (!j[key].contains(sub)) config_error(fmt::format("unknown key {}.{}", key, sub));
          j[key][sub] = v;
        }
      } else {
        j[key] = value;
      }
    }
  }
  for (const auto& o : overrides) apply_override(j, o);
  return from_json(j);
}

std::string config_hash(const ExperimentConfig& cfg) {
  // The output location is not part of the experiment.
  Json j = to_json(cfg);
  j.erase("output_dir");
  const std::string canonical = j.dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(canonical.data(), canonical.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::InvalidState, "SHA-256 digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

}  // namespace catlab::experiments
