#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lnq/evalkit/cohort.hpp"
#include "lnq/measure/diameter.hpp"
#include "lnq/morph3d/components.hpp"
#include "lnq/morph3d/dilate.hpp"
#include "lnq/volgrid/io.hpp"
#include "lnq/weaklab/annotation.hpp"

namespace py = pybind11;

namespace {

using Mask = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using Spacing = std::tuple<double, double, double>;

lnq::Geometry geometry_of(const py::array& a, const Spacing& s) {
  if (a.ndim() != 3) throw py::value_error("expected a 3D array indexed [z, y, x]");
  return {{a.shape(0), a.shape(1), a.shape(2)}, {std::get<0>(s), std::get<1>(s), std::get<2>(s)}, {}};
}

lnq::LabelMap to_labels(const Mask& a, const Spacing& s, lnq::VolumeKind kind = lnq::VolumeKind::label) {
  const auto g = geometry_of(a, s);
  std::vector<std::uint8_t> data(a.data(), a.data() + a.size());
  return lnq::LabelMap(g, kind, std::move(data));
}

template <typename T>
py::array_t<T> to_array(const lnq::Volume<T>& v) {
  const auto& d = v.geometry().dims;
  py::array_t<T> out({d.z, d.y, d.x});
  std::copy(v.data().begin(), v.data().end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bindings of the lnq volumetric toolkit";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const lnq::Error& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def(
      "connected_components",
      [](const Mask& mask, int connectivity) {
        const auto set = lnq::connected_components(to_labels(mask, {1.0, 1.0, 1.0}),
                                                   lnq::connectivity_from_int(connectivity));
        const auto ids = lnq::component_id_map(set);
        py::array_t<std::int32_t> out({mask.shape(0), mask.shape(1), mask.shape(2)});
        std::copy(ids.begin(), ids.end(), out.mutable_data());
        return py::make_tuple(out, set.size());
      },
      py::arg("mask"), py::arg("connectivity") = 26,
      "Component id per voxel (0 = background, 1 = largest) and the component count.");

  m.def(
      "dilate",
      [](const Mask& mask, int connectivity, int iterations) {
        return to_array(lnq::dilate(to_labels(mask, {1.0, 1.0, 1.0}), lnq::connectivity_from_int(connectivity),
                                    iterations));
      },
      py::arg("mask"), py::arg("connectivity") = 26, py::arg("iterations") = 1);

  m.def(
      "dice", [](const Mask& pred, const Mask& gt) { return lnq::dice(to_labels(pred, {1, 1, 1}), to_labels(gt, {1, 1, 1})); },
      py::arg("prediction"), py::arg("ground_truth"));

  m.def(
      "assd",
      [](const Mask& pred, const Mask& gt, const Spacing& spacing) {
        const auto r = lnq::assd(to_labels(pred, spacing), to_labels(gt, spacing));
        return py::make_tuple(r.assd_mm, r.fallback_used);
      },
      py::arg("prediction"), py::arg("ground_truth"), py::arg("spacing") = Spacing{1.0, 1.0, 1.0},
      "Returns (assd_mm, fallback_used).");

  m.def(
      "shortest_diameters",
      [](const Mask& mask, const Spacing& spacing, int connectivity) {
        auto set = lnq::connected_components(to_labels(mask, spacing), lnq::connectivity_from_int(connectivity));
        std::vector<double> out;
        for (const auto& d : lnq::measure_components(set)) out.push_back(d.shortest_diameter_mm);
        return out;
      },
      py::arg("mask"), py::arg("spacing"), py::arg("connectivity") = 26,
      "Shortest axial diameter in mm of each component, largest component first.");

  m.def(
      "postprocess_filter",
      [](const Mask& mask, const Spacing& spacing, double min_mm, int connectivity) {
        return to_array(
            lnq::postprocess_filter(to_labels(mask, spacing), min_mm, lnq::connectivity_from_int(connectivity)));
      },
      py::arg("mask"), py::arg("spacing"), py::arg("min_short_diameter_mm") = lnq::kDefaultMinShortDiameterMm,
      py::arg("connectivity") = 26);

  m.def(
      "wilcoxon",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        const auto r = lnq::wilcoxon_signed_rank(a, b);
        return py::dict(py::arg("n") = r.n_effective, py::arg("statistic") = r.statistic,
                        py::arg("p") = r.p_two_sided, py::arg("method") = std::string(lnq::to_string(r.method)));
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "apply_strategy",
      [](const std::string& name, const Mask& weak, const std::optional<Mask>& anatomy) {
        const auto state = lnq::from_weak_labels(to_labels(weak, {1, 1, 1}));
        lnq::AnnotationState out = state;
        switch (lnq::strategy_from_string(name)) {
          case lnq::Strategy::noisy_label: out = lnq::strategy_noisy_label(state); break;
          case lnq::Strategy::loss_masking: out = lnq::strategy_loss_masking(state); break;
          case lnq::Strategy::instance_coating: out = lnq::strategy_instance_coating(state); break;
          case lnq::Strategy::pseudo_labeling:
            if (!anatomy) throw py::value_error("pseudo labeling needs an anatomy mask");
            out = lnq::strategy_pseudo_labeling(state, to_labels(*anatomy, {1, 1, 1}));
            break;
        }
        return to_array(out.codes());
      },
      py::arg("strategy"), py::arg("weak"), py::arg("anatomy") = py::none(),
      "Tri-state codes after a weak-label strategy: 0 unknown, 1 background, 2 foreground.");

  m.def(
      "read_volume",
      [](const std::string& path) {
        const auto v = lnq::read_image(path);
        const auto& g = v.geometry();
        return py::make_tuple(to_array(v), py::make_tuple(g.spacing.z, g.spacing.y, g.spacing.x),
                              py::make_tuple(g.origin.z, g.origin.y, g.origin.x));
      },
      py::arg("path"), "Returns (float32 array, spacing, origin).");
}
