#include "frd/config.hpp"

#include <json.hpp>

#include "frd/io.hpp"

namespace frd {

using json = nlohmann::json;

namespace {

[[noreturn]] void reject(const std::string& what) {
  throw std::invalid_argument("config: " + what);
}

GeneratorSpec parse_spec(const json& j) {
  GeneratorSpec spec;
  spec.type = j.value("type", "laplacian");
  if (spec.type != "laplacian" && spec.type != "diagonal" && spec.type != "random" &&
      spec.type != "file")
    reject("generator.type must be laplacian|diagonal|random|file");
  if (j.contains("diag")) spec.diag = j.at("diag").get<std::vector<double>>();
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("path")) spec.path = j.at("path").get<std::string>();
  if (spec.type == "diagonal" && spec.diag.empty())
    reject("diagonal generator needs a diag coefficient list");
  if (spec.type == "file" && spec.path.empty()) reject("file generator needs a path");
  return spec;
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    reject(std::string("not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  if (doc.contains("geometry")) {
    const auto& g = doc.at("geometry");
    cfg.L = g.value("L", cfg.L);
    cfg.N = g.value("N", cfg.N);
    cfg.d = g.value("d", cfg.d);
    cfg.m = g.value("m", cfg.m);
  }
  if (cfg.L < 3 || cfg.L % 2 == 0) reject("geometry.L must be odd and >= 3");
  if (cfg.N < 1) reject("geometry.N must be >= 1");
  if (cfg.d < 2) reject("geometry.d must be >= 2");
  if (cfg.m < 1) reject("geometry.m must be >= 1");

  if (doc.contains("multi_index_set"))
    cfg.multi_indices = doc.at("multi_index_set").get<std::vector<MultiIndex>>();

  cfg.omega0 = doc.value("omega0", cfg.omega0);
  cfg.Omega0 = doc.value("Omega0", cfg.Omega0);
  if (!(cfg.omega0 > 0)) reject("omega0 must be positive");
  if (!(cfg.Omega0 >= cfg.omega0)) reject("Omega0 must be >= omega0");

  if (doc.contains("generator")) cfg.generator = parse_spec(doc.at("generator"));
  if (doc.contains("ensemble"))
    for (const auto& e : doc.at("ensemble")) cfg.ensemble.push_back(parse_spec(e));

  if (doc.contains("decomposition")) {
    const auto& d = doc.at("decomposition");
    cfg.kind = d.value("kind", cfg.kind);
    cfg.n = d.value("n", cfg.n);
    cfg.ntilde = d.value("ntilde", cfg.ntilde);
  }
  if (cfg.kind != "base" && cfg.kind != "improved" && cfg.kind != "final")
    reject("decomposition.kind must be base|improved|final");
  if (cfg.kind != "base" && cfg.n < 1) reject("decomposition.n must be >= 1");
  if (cfg.kind == "final" && !(cfg.ntilde > cfg.n))
    reject("decomposition.ntilde must exceed n for the final kind");

  cfg.scale = doc.value("scale", cfg.scale);
  if (cfg.scale < 1 || cfg.scale > cfg.N + 1) reject("scale must lie in [1, N+1]");
  cfg.seed = doc.value("seed", cfg.seed);
  cfg.sample_count = doc.value("sample_count", cfg.sample_count);
  if (cfg.sample_count < 2) reject("sample_count must be >= 2");
  cfg.out_dir = doc.value("out_dir", cfg.out_dir);
  cfg.tol_scale = doc.value("tol_scale", cfg.tol_scale);
  if (!(cfg.tol_scale > 0)) reject("tol_scale must be positive");
  cfg.workers = doc.value("workers", cfg.workers);
  if (cfg.workers < 1) reject("workers must be >= 1");
  if (doc.contains("sweep_N")) {
    cfg.sweep_N = doc.at("sweep_N").get<std::vector<int>>();
    for (int n : cfg.sweep_N)
      if (n < 1) reject("sweep_N entries must be >= 1");
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  return from_json_text(read_text_file(path));
}

TorusGeometry RunConfig::geometry() const { return TorusGeometry(L, N, d, m); }

TorusGeometry RunConfig::geometry_for(int Nother) const {
  return TorusGeometry(L, Nother, d, m);
}

MultiIndexSet RunConfig::mset() const {
  if (multi_indices.empty()) return MultiIndexSet::gradients(d);
  return MultiIndexSet(d, multi_indices);
}

Generator RunConfig::make_generator(const GeneratorSpec& spec) const {
  const MultiIndexSet ms = mset();
  if (spec.type == "laplacian") return laplacian_generator(ms, m, omega0, Omega0);
  if (spec.type == "diagonal") return diagonal_generator(ms, m, spec.diag, omega0, Omega0);
  if (spec.type == "random") return random_generator(ms, m, omega0, Omega0, spec.seed);
  return load_generator(spec.path);
}

std::vector<Generator> RunConfig::make_ensemble() const {
  std::vector<Generator> out;
  if (!ensemble.empty()) {
    for (const auto& e : ensemble) out.push_back(make_generator(e));
    return out;
  }
  out.push_back(main_generator());
  out.push_back(laplacian_generator(mset(), m, omega0, Omega0));
  std::vector<double> diag(d);
  for (int i = 0; i < d; ++i) diag[i] = omega0 + (Omega0 - omega0) * (i + 1.0) / (d + 1.0);
  out.push_back(diagonal_generator(mset(), m, diag, omega0, Omega0));
  out.push_back(random_generator(mset(), m, omega0, Omega0, seed + 101));
  out.push_back(random_generator(mset(), m, omega0, Omega0, seed + 202));
  return out;
}

}  // namespace frd
