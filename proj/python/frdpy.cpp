// Python bindings for the main operations: generator construction, finite
// range decompositions, envelope statistics, and Gaussian sampling.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "frd/bounds.hpp"
#include "frd/io.hpp"
#include "frd/renorm.hpp"
#include "frd/sampler.hpp"

namespace py = pybind11;
using namespace frd;

namespace {

py::array_t<double> kernel_matrix(const Decomposition& dec, int k, std::int64_t site) {
  const Eigen::MatrixXd& m = dec.position.at(k - 1).values.at(site);
  py::array_t<double> out({m.rows(), m.cols()});
  auto r = out.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < m.rows(); ++i)
    for (py::ssize_t j = 0; j < m.cols(); ++j) r(i, j) = m(i, j);
  return out;
}

py::array_t<double> batch_array(const SampleBatch& batch) {
  if (batch.fields.empty()) return py::array_t<double>();
  const auto& g = batch.fields[0].geom;
  py::array_t<double> out({static_cast<py::ssize_t>(batch.count),
                           static_cast<py::ssize_t>(g.volume),
                           static_cast<py::ssize_t>(g.m)});
  auto r = out.mutable_unchecked<3>();
  for (int s = 0; s < batch.count; ++s)
    for (std::int64_t x = 0; x < g.volume; ++x)
      for (int c = 0; c < g.m; ++c) r(s, x, c) = batch.fields[s].at(x, c);
  return out;
}

}  // namespace

PYBIND11_MODULE(frdpy, m) {
  m.doc() = "finite range decompositions of lattice Green's functions";

  py::class_<TorusGeometry>(m, "TorusGeometry")
      .def(py::init<int, int, int, int>(), py::arg("L"), py::arg("N"), py::arg("d"),
           py::arg("m"))
      .def_readonly("L", &TorusGeometry::L)
      .def_readonly("N", &TorusGeometry::N)
      .def_readonly("d", &TorusGeometry::d)
      .def_readonly("m", &TorusGeometry::m)
      .def_readonly("side", &TorusGeometry::side)
      .def_readonly("volume", &TorusGeometry::volume)
      .def("wrap", [](const TorusGeometry& g, std::vector<int> x) { return g.wrap(x); })
      .def("site_index", &TorusGeometry::site_index)
      .def("site_coords", &TorusGeometry::site_coords)
      .def("momentum_norm", &TorusGeometry::momentum_norm);

  py::class_<MultiIndexSet>(m, "MultiIndexSet")
      .def(py::init<int, std::vector<MultiIndex>>())
      .def_static("gradients", &MultiIndexSet::gradients)
      .def_static("gradients_plus", &MultiIndexSet::gradients_plus)
      .def_property_readonly("size", &MultiIndexSet::size)
      .def_property_readonly("range", &MultiIndexSet::range);

  py::class_<Generator>(m, "Generator")
      .def_readonly("m", &Generator::m)
      .def_readonly("omega0", &Generator::omega0)
      .def_readonly("Omega0", &Generator::Omega0)
      .def("op_norm", &Generator::op_norm)
      .def("to_json", &generator_to_json);
  m.def("laplacian_generator", &laplacian_generator, py::arg("mset"), py::arg("m"),
        py::arg("omega0") = 1.0, py::arg("Omega0") = 1.0);
  m.def("diagonal_generator", &diagonal_generator);
  m.def("random_generator", &random_generator);
  m.def("generator_from_json", &generator_from_json);

  py::class_<Decomposition>(m, "Decomposition")
      .def_readonly("n", &Decomposition::n)
      .def_readonly("ntilde", &Decomposition::ntilde)
      .def_readonly("K", &Decomposition::K)
      .def_property_readonly("scales", &Decomposition::scales)
      .def("sum_identity_defect", &Decomposition::sum_identity_defect)
      .def("finite_range_defect", &Decomposition::finite_range_defect)
      .def("min_mode_eigenvalue_rel", &Decomposition::min_mode_eigenvalue_rel)
      .def("kernel_matrix", &kernel_matrix, py::arg("k"), py::arg("site"))
      .def("tail_matrix",
           [](const Decomposition& dec, int k) {
             const Eigen::MatrixXd& t = dec.tail.at(k - 1);
             py::array_t<double> out({t.rows(), t.cols()});
             auto r = out.mutable_unchecked<2>();
             for (py::ssize_t i = 0; i < t.rows(); ++i)
               for (py::ssize_t j = 0; j < t.cols(); ++j) r(i, j) = t(i, j);
             return out;
           })
      .def("to_text", &decomposition_to_text);
  m.def("decomposition_from_text", &decomposition_from_text);

  py::class_<BaseBuilder>(m, "BaseBuilder")
      .def(py::init<const TorusGeometry&, const Generator&, double, int>(), py::arg("geometry"),
           py::arg("generator"), py::arg("B_override") = 0.0, py::arg("workers") = 1)
      .def("build", &BaseBuilder::build)
      .def("green", &BaseBuilder::green)
      .def("spectral_cap", &BaseBuilder::spectral_cap);

  m.def("improved_decomposition", &improved_decomposition);
  m.def("estimate_K", &estimate_K);
  m.def("final_decomposition", &final_decomposition);
  m.def("final_lower_envelope_c", &final_lower_envelope_c);

  m.def(
      "sample_decomposition_scale",
      [](const Decomposition& dec, int k, std::uint64_t seed, int count, int workers) {
        return batch_array(sample(dec.spectral.at(k - 1), seed, count, std::nullopt, workers));
      },
      py::arg("decomposition"), py::arg("k"), py::arg("seed"), py::arg("count"),
      py::arg("workers") = 1);

  py::class_<SpectralKernel>(m, "SpectralKernel");
  m.def("green_spectral", &green_spectral);
  m.def(
      "sample_kernel",
      [](const SpectralKernel& kernel, std::uint64_t seed, int count, int workers) {
        return batch_array(sample(kernel, seed, count, std::nullopt, workers));
      },
      py::arg("kernel"), py::arg("seed"), py::arg("count"), py::arg("workers") = 1);
}
