#include "frd/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace frd {

using json = nlohmann::ordered_json;

std::string hex_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double parse_hex_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw std::runtime_error("parse_hex_double: bad literal: " + s);
  return v;
}

std::string generator_to_json(const Generator& A) {
  json doc;
  doc["d"] = A.mset.d();
  doc["m"] = A.m;
  doc["omega0"] = A.omega0;
  doc["Omega0"] = A.Omega0;
  json idx = json::array();
  for (const auto& a : A.mset.indices()) idx.push_back(a);
  doc["multi_indices"] = idx;
  json blocks = json::array();
  for (int a = 0; a < A.mset.size(); ++a)
    for (int b = 0; b < A.mset.size(); ++b) {
      json entry;
      entry["alpha"] = A.mset[a];
      entry["beta"] = A.mset[b];
      json vals = json::array();
      for (int r = 0; r < A.m; ++r)
        for (int s = 0; s < A.m; ++s) vals.push_back(A.block(a, b)(r, s));
      entry["values"] = vals;
      blocks.push_back(entry);
    }
  doc["blocks"] = blocks;
  return doc.dump(2) + "\n";
}

Generator generator_from_json(const std::string& text) {
  const json doc = json::parse(text);
  const int d = doc.at("d").get<int>();
  const int m = doc.at("m").get<int>();
  std::vector<MultiIndex> idx;
  for (const auto& a : doc.at("multi_indices")) idx.push_back(a.get<MultiIndex>());
  MultiIndexSet mset(d, idx);
  Generator A{mset, m, Eigen::MatrixXd::Zero(m * mset.size(), m * mset.size()),
              doc.at("omega0").get<double>(), doc.at("Omega0").get<double>()};
  for (const auto& entry : doc.at("blocks")) {
    const int a = mset.find(entry.at("alpha").get<MultiIndex>());
    const int b = mset.find(entry.at("beta").get<MultiIndex>());
    if (a < 0 || b < 0) throw std::runtime_error("generator_from_json: unknown block index");
    const auto vals = entry.at("values").get<std::vector<double>>();
    if (static_cast<int>(vals.size()) != m * m)
      throw std::runtime_error("generator_from_json: bad block size");
    for (int r = 0; r < m; ++r)
      for (int s = 0; s < m; ++s) A.blocks(a * m + r, b * m + s) = vals[r * m + s];
  }
  return A;
}

namespace {
const char* kind_tag(DecompKind k) {
  switch (k) {
    case DecompKind::Base: return "base";
    case DecompKind::Improved: return "improved";
    case DecompKind::Final: return "final";
  }
  return "base";
}
DecompKind kind_from_tag(const std::string& s) {
  if (s == "base") return DecompKind::Base;
  if (s == "improved") return DecompKind::Improved;
  if (s == "final") return DecompKind::Final;
  throw std::runtime_error("unknown decomposition kind: " + s);
}
}  // namespace

std::string decomposition_to_text(const Decomposition& dec) {
  json doc;
  doc["kind"] = kind_tag(dec.kind);
  doc["geometry"] = {{"L", dec.geom.L}, {"N", dec.geom.N}, {"d", dec.geom.d}, {"m", dec.geom.m}};
  doc["params"] = {{"n", dec.n}, {"ntilde", dec.ntilde}, {"K", hex_double(dec.K)}};
  json scales = json::array();
  for (int k = 1; k <= dec.scales(); ++k) {
    json sk;
    sk["k"] = k;
    json tail = json::array();
    for (int r = 0; r < dec.geom.m; ++r)
      for (int s = 0; s < dec.geom.m; ++s) tail.push_back(hex_double(dec.tail[k - 1](r, s)));
    sk["tail"] = tail;
    json modes = json::array();
    for (std::int64_t p = 0; p < dec.geom.volume; ++p) {
      json mode = json::array();
      const Eigen::MatrixXcd& v = dec.spectral[k - 1].values[p];
      for (int r = 0; r < dec.geom.m; ++r)
        for (int s = 0; s < dec.geom.m; ++s) {
          mode.push_back(hex_double(v(r, s).real()));
          mode.push_back(hex_double(v(r, s).imag()));
        }
      modes.push_back(mode);
    }
    sk["spectral"] = modes;
    scales.push_back(sk);
  }
  doc["scales"] = scales;
  return doc.dump() + "\n";
}

Decomposition decomposition_from_text(const std::string& text) {
  const json doc = json::parse(text);
  const auto& gj = doc.at("geometry");
  TorusGeometry g(gj.at("L").get<int>(), gj.at("N").get<int>(), gj.at("d").get<int>(),
                  gj.at("m").get<int>());
  Decomposition dec;
  dec.geom = g;
  dec.kind = kind_from_tag(doc.at("kind").get<std::string>());
  dec.n = doc.at("params").at("n").get<int>();
  dec.ntilde = doc.at("params").at("ntilde").get<int>();
  dec.K = parse_hex_double(doc.at("params").at("K").get<std::string>());
  dec.spectral.assign(g.N + 1, SpectralKernel(g));
  dec.tail.assign(g.N + 1, Eigen::MatrixXd::Zero(g.m, g.m));
  for (const auto& sk : doc.at("scales")) {
    const int k = sk.at("k").get<int>();
    const auto& tail = sk.at("tail");
    int ti = 0;
    for (int r = 0; r < g.m; ++r)
      for (int s = 0; s < g.m; ++s)
        dec.tail[k - 1](r, s) = parse_hex_double(tail.at(ti++).get<std::string>());
    const auto& modes = sk.at("spectral");
    for (std::int64_t p = 0; p < g.volume; ++p) {
      const auto& mode = modes.at(p);
      int mi = 0;
      for (int r = 0; r < g.m; ++r)
        for (int s = 0; s < g.m; ++s) {
          const double re = parse_hex_double(mode.at(mi++).get<std::string>());
          const double im = parse_hex_double(mode.at(mi++).get<std::string>());
          dec.spectral[k - 1].values[p](r, s) = Complex(re, im);
        }
    }
  }
  dec.position.clear();
  for (int k = 1; k <= g.N + 1; ++k) {
    dec.position.push_back(idft_real(dec.spectral[k - 1]));
    if (k <= g.N) dec.position[k - 1].tail = dec.tail[k - 1];
  }
  return dec;
}

void save_decomposition(const Decomposition& dec, const std::string& path) {
  write_text_file(path, decomposition_to_text(dec));
}

void save_decomposition_scales(const Decomposition& dec, const std::string& dir) {
  for (int k = 1; k <= dec.scales(); ++k) {
    json sk;
    sk["kind"] = kind_tag(dec.kind);
    sk["k"] = k;
    json tail = json::array();
    for (int r = 0; r < dec.geom.m; ++r)
      for (int s = 0; s < dec.geom.m; ++s) tail.push_back(hex_double(dec.tail[k - 1](r, s)));
    sk["tail"] = tail;
    json modes = json::array();
    for (std::int64_t p = 0; p < dec.geom.volume; ++p) {
      json mode = json::array();
      const Eigen::MatrixXcd& v = dec.spectral[k - 1].values[p];
      for (int r = 0; r < dec.geom.m; ++r)
        for (int s = 0; s < dec.geom.m; ++s) {
          mode.push_back(hex_double(v(r, s).real()));
          mode.push_back(hex_double(v(r, s).imag()));
        }
      modes.push_back(mode);
    }
    sk["spectral"] = modes;
    char name[32];
    std::snprintf(name, sizeof(name), "/scale_%02d.json", k);
    write_text_file(dir + name, sk.dump() + "\n");
  }
}

Decomposition load_decomposition(const std::string& path) {
  return decomposition_from_text(read_text_file(path));
}

void save_generator(const Generator& A, const std::string& path) {
  write_text_file(path, generator_to_json(A));
}

Generator load_generator(const std::string& path) {
  return generator_from_json(read_text_file(path));
}

std::string batch_to_text(const SampleBatch& batch) {
  std::ostringstream os;
  if (batch.fields.empty()) return "";
  const TorusGeometry& g = batch.fields[0].geom;
  os << "# seed " << batch.seed << " count " << batch.count << " volume " << g.volume
     << " m " << g.m << "\n";
  char buf[40];
  for (int i = 0; i < batch.count; ++i) {
    os << "sample " << i << "\n";
    for (std::int64_t x = 0; x < g.volume; ++x) {
      for (int r = 0; r < g.m; ++r) {
        std::snprintf(buf, sizeof(buf), "%.17g", batch.fields[i].at(x, r));
        os << buf << (r + 1 == g.m ? "" : " ");
      }
      os << "\n";
    }
  }
  return os.str();
}

std::string report_to_csv(const BoundsReport& rep) {
  std::ostringstream os;
  os << "suite,k,j,quantity,measured,bound,ratio,pass\n";
  char buf[128];
  for (const auto& r : rep.rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g", r.measured, r.bound, r.ratio);
    os << r.suite << "," << r.k << "," << r.j << "," << r.quantity << "," << buf << ","
       << (r.pass ? "1" : "0") << "\n";
  }
  return os.str();
}

std::string report_to_json(const BoundsReport& rep) {
  json doc = json::array();
  for (const auto& r : rep.rows) {
    json row;
    row["suite"] = r.suite;
    row["k"] = r.k;
    row["j"] = r.j;
    row["quantity"] = r.quantity;
    row["measured"] = r.measured;
    row["bound"] = r.bound;
    row["ratio"] = r.ratio;
    row["pass"] = r.pass;
    doc.push_back(row);
  }
  return doc.dump(2) + "\n";
}

void save_report(const BoundsReport& rep, const std::string& csv_path,
                 const std::string& json_path) {
  write_text_file(csv_path, report_to_csv(rep));
  write_text_file(json_path, report_to_json(rep));
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace frd
