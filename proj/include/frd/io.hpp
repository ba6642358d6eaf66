#pragma once

#include <string>

#include "frd/bounds.hpp"
#include "frd/decomposition.hpp"
#include "frd/sampler.hpp"

namespace frd {

/// C99 hex-float text for bit-exact round-trips in the decomposition export.
std::string hex_double(double v);
double parse_hex_double(const std::string& s);

/// Generator document: d, m, family constants, multi-indices, dense blocks in
/// row-major order. Plain decimal with shortest round-trip representation.
std::string generator_to_json(const Generator& A);
Generator generator_from_json(const std::string& text);
void save_generator(const Generator& A, const std::string& path);
Generator load_generator(const std::string& path);

/// Decomposition export: per-scale spectral kernels (hex floats, re/im pairs)
/// and tail matrices, tagged with kind and parameters. Deterministic bytes.
std::string decomposition_to_text(const Decomposition& dec);
Decomposition decomposition_from_text(const std::string& text);
void save_decomposition(const Decomposition& dec, const std::string& path);
Decomposition load_decomposition(const std::string& path);
/// One file per scale (scale_01.json, ...) under dir, same mode encoding.
void save_decomposition_scales(const Decomposition& dec, const std::string& dir);

/// Sample batch export: site-major full-precision text.
std::string batch_to_text(const SampleBatch& batch);

/// Report writers: CSV (suite,k,j,quantity,measured,bound,ratio,pass) and a
/// JSON mirror for regression diffing.
std::string report_to_csv(const BoundsReport& rep);
std::string report_to_json(const BoundsReport& rep);
void save_report(const BoundsReport& rep, const std::string& csv_path,
                 const std::string& json_path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace frd
