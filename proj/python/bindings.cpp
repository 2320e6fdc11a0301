#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "driftcurate/brisque.hpp"
#include "driftcurate/distort.hpp"
#include "driftcurate/error.hpp"
#include "driftcurate/feature_gate.hpp"
#include "driftcurate/fixtures.hpp"
#include "driftcurate/metrics.hpp"
#include "driftcurate/pnm.hpp"
#include "driftcurate/tensor.hpp"

namespace py = pybind11;
using namespace driftcurate;

namespace {

std::vector<double> features_of(const std::string& image_path, double mscn_c) {
  const io::GrayPlane luma = brisque::to_luma(io::load_image(image_path));
  const brisque::BrisqueFeatures f = brisque::brisque_features(luma, mscn_c);
  return {f.values.begin(), f.values.end()};
}

double score_image(const std::string& image_path, const std::string& model_path, double mscn_c) {
  const brisque::QualityModel model = brisque::load_quality_model(model_path);
  const io::GrayPlane luma = brisque::to_luma(io::load_image(image_path));
  return brisque::score(brisque::brisque_features(luma, mscn_c), model).sigma;
}

void degrade_file(const std::string& in_path, const std::string& out_path, int levels) {
  io::save_image(distort::degrade(io::load_image(in_path), levels), out_path);
}

double dice_files(const std::string& pred_path, const std::string& truth_path, double threshold) {
  const io::GrayPlane prob = io::load_probability_mask(pred_path);
  const io::GrayPlane truth = io::load_binary_mask(truth_path);
  return metrics::dice(metrics::binarize(prob, threshold), truth);
}

std::vector<double> spp_pool_file(const std::string& tensor_path, const std::vector<int>& levels) {
  return fgate::spp_pool(io::read_tensor(tensor_path), levels).values;
}

void generate_fixtures(const std::string& out_dir, uint64_t seed, int count) {
  fixtures::CorpusOptions options;
  options.seed = seed;
  options.count = count;
  fixtures::generate_corpus(out_dir, options);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "quality-aware training-data curation core";
  m.attr("__version__") = "0.1.0";
  m.attr("FEATURE_COUNT") = brisque::kFeatureCount;

  py::register_exception<Error>(m, "CurationError");

  m.def("features", &features_of, py::arg("image_path"),
        py::arg("mscn_c") = brisque::kDefaultMscnC,
        "36 natural-scene-statistics features of a PGM/PPM image");
  m.def("score_image", &score_image, py::arg("image_path"), py::arg("model_path"),
        py::arg("mscn_c") = brisque::kDefaultMscnC,
        "quality score of an image under a model (lower is better)");
  m.def("degrade", &degrade_file, py::arg("in_path"), py::arg("out_path"), py::arg("levels"),
        "pyramidal down/up degradation of an image file");
  m.def("dice", &dice_files, py::arg("pred_path"), py::arg("truth_path"),
        py::arg("threshold") = 0.5, "dice overlap of a thresholded prediction vs a truth mask");
  m.def("spp_pool", &spp_pool_file, py::arg("tensor_path"),
        py::arg("levels") = std::vector<int>{1, 2, 4},
        "spatial-pyramid max pooling of a stored feature map");
  m.def("generate_fixtures", &generate_fixtures, py::arg("out_dir"), py::arg("seed") = 1,
        py::arg("count") = 20, "write the procedural texture/mask/feature-map corpus");
}
