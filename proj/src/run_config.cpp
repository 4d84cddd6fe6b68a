#include "essf/run_config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "essf/diagnostics.hpp"

#include "json.hpp"

namespace essf {

using nlohmann::json;

namespace {

DislocationMeasure parse_measure(const json& arr) {
  std::vector<DislocationMeasure::Atom> atoms;
  for (const auto& a : arr) {
    if (!a.contains("weight") || !a.contains("pairs"))
      throw std::invalid_argument("config: measure atoms need weight and pairs");
    std::vector<std::pair<double, double>> pairs;
    for (const auto& p : a.at("pairs")) {
      if (!p.is_array() || p.size() != 2)
        throw std::invalid_argument("config: atom pairs must be [size, mark]");
      pairs.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    atoms.push_back({a.at("weight").get<double>(), ZElement(std::move(pairs))});
  }
  return DislocationMeasure(std::move(atoms));
}

Characteristics parse_characteristics(const json& doc) {
  if (doc.contains("preset")) {
    const auto& p = doc.at("preset");
    const std::string name = p.at("name").get<std::string>();
    const double alpha = p.value("alpha", 0.0);
    if (name == "bbm") {
      Characteristics ch = bbm_preset(p.value("drift", 0.0));
      return ch.with_alpha(alpha);
    }
    if (name == "classical_binary")
      return classical_preset(binary_classical_measure(), p.value("c", 0.0), alpha);
    if (name == "binary_unit_mark") {
      Characteristics ch;
      ch.alpha = alpha;
      ch.c = p.value("c", 0.0);
      ch.d = p.value("d", 0.0);
      ch.beta = p.value("beta", 0.0);
      ch.lambda = binary_unit_mark_measure();
      ch.validate();
      return ch;
    }
    if (name == "classical")
      return classical_preset(parse_measure(p.at("nu")), p.value("c", 0.0), alpha);
    if (name == "gf") {
      GrowthFragmentationCell cell;
      cell.alpha = alpha;
      cell.d = p.value("d", 0.0);
      cell.beta = p.value("beta", 0.0);
      cell.k = p.value("k", 0.0);
      for (const auto& j : p.at("jumps")) {
        if (!j.is_array() || j.size() != 2)
          throw std::invalid_argument("config: gf jumps must be [rate, y]");
        cell.jumps.emplace_back(j[0].get<double>(), j[1].get<double>());
      }
      const std::string s1 = p.value("s1", std::string("exp_y_one_minus_y"));
      GfSizeChoice choice;
      if (s1 == "exp_y_one_minus_y")
        choice = GfSizeChoice::exp_y_one_minus_y;
      else if (s1 == "exp_neg_y_squared")
        choice = GfSizeChoice::exp_neg_y_squared;
      else
        throw std::invalid_argument("config: unknown gf s1 choice '" + s1 + "'");
      return gf_embedding(cell, choice);
    }
    throw std::invalid_argument("config: unknown preset '" + name + "'");
  }
  if (!doc.contains("characteristics"))
    throw std::invalid_argument("config: need characteristics or preset");
  const auto& c = doc.at("characteristics");
  Characteristics ch;
  ch.alpha = c.value("alpha", 0.0);
  ch.c = c.value("c", 0.0);
  ch.d = c.value("d", 0.0);
  ch.beta = c.value("beta", 0.0);
  if (c.contains("lambda")) ch.lambda = parse_measure(c.at("lambda"));
  ch.validate();
  return ch;
}

}  // namespace

uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

RunConfig parse_config_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: JSON parse failure: ") + e.what());
  }
  RunConfig cfg;
  cfg.characteristics = parse_characteristics(doc);
  cfg.alpha = doc.value("alpha", cfg.characteristics.alpha);
  cfg.characteristics.alpha = cfg.alpha;
  cfg.level = doc.value("level", 1u);
  if (cfg.level == 0) throw std::invalid_argument("config: level must be >= 1");
  cfg.horizon = doc.value("horizon", 1.0);
  if (!(cfg.horizon > 0.0)) throw std::invalid_argument("config: horizon must be > 0");
  if (doc.contains("query_times"))
    cfg.query_times = doc.at("query_times").get<std::vector<double>>();
  for (double q : cfg.query_times)
    if (q < 0.0) throw std::invalid_argument("config: query times must be >= 0");
  cfg.replicates = doc.value("replicates", 1ull);
  if (cfg.replicates == 0) throw std::invalid_argument("config: replicates must be >= 1");
  if (doc.contains("seed")) cfg.seed = doc.at("seed").get<uint64_t>();
  cfg.h_grid = doc.value("h_grid", 1e-3);
  if (!(cfg.h_grid > 0.0)) throw std::invalid_argument("config: h_grid must be > 0");
  if (doc.contains("theta")) cfg.thetas = doc.at("theta").get<std::vector<double>>();
  cfg.out_dir = doc.value("out", std::string("out"));
  cfg.dump_partitions = doc.value("dump_partitions", false);

  if (doc.contains("diagnose")) {
    const auto& d = doc.at("diagnose");
    if (d.contains("theta_grid")) {
      cfg.diag_thetas = d.at("theta_grid").get<std::vector<double>>();
    } else {
      const double lo = d.value("theta_min", -2.0);
      const double hi = d.value("theta_max", 2.0);
      const int pts = d.value("theta_points", 100);
      if (pts < 2 || !(hi > lo)) throw std::invalid_argument("config: bad diagnose theta grid");
      for (int i = 0; i < pts; ++i)
        cfg.diag_thetas.push_back(lo + (hi - lo) * i / (pts - 1));
    }
    if (d.contains("levels")) cfg.diag_levels = d.at("levels").get<std::vector<uint32_t>>();
    for (uint32_t l : cfg.diag_levels)
      if (l == 0) throw std::invalid_argument("config: diagnose levels must be >= 1");
  }

  if (doc.contains("test")) {
    const auto& t = doc.at("test");
    if (t.contains("names")) cfg.test_names = t.at("names").get<std::vector<std::string>>();
    cfg.test_replicates = t.value("replicates", 10000ull);
    cfg.test_level = t.value("level", 2u);
    cfg.test_level_m = t.value("level_m", 4u);
    cfg.test_time = t.value("t", 1.0);
    cfg.test_theta = t.value("theta", 0.0);
    if (t.contains("times")) cfg.test_times = t.at("times").get<std::vector<double>>();
    const std::string mode = t.value("mode", std::string("level_n"));
    if (mode == "level_n")
      cfg.test_mode = StatisticMode::level_n;
    else if (mode == "level_infinity")
      cfg.test_mode = StatisticMode::level_infinity;
    else
      throw std::invalid_argument("config: unknown test mode '" + mode + "'");
    if (t.contains("rate_override"))
      cfg.test_rate_override = t.at("rate_override").get<double>();
  }
  if (cfg.test_times.empty()) cfg.test_times = {0.5, 1.0, 2.0};

  cfg.config_hash = hex64(fnv1a64(doc.dump()));
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

}  // namespace essf
