#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "commands.hpp"
#include "curvad/cloud_io.hpp"
#include "curvad/curvature.hpp"
#include "curvad/error.hpp"
#include "curvad/metrics.hpp"
#include "curvad/neighbors.hpp"
#include "curvad/scoring.hpp"
#include "curvad/synth.hpp"

namespace py = pybind11;
using namespace curvad;

namespace {

using Points = py::array_t<double, py::array::c_style | py::array::forcecast>;

PointCloud to_cloud(const Points& a) {
    if (a.ndim() != 2 || a.shape(1) != 3) throw py::value_error("points must have shape (N, 3)");
    const auto r = a.unchecked<2>();
    std::vector<Vec3> pts(static_cast<std::size_t>(a.shape(0)));
    for (py::ssize_t i = 0; i < a.shape(0); ++i) pts[i] = {r(i, 0), r(i, 1), r(i, 2)};
    return PointCloud(std::move(pts));
}

py::array_t<double> to_array(std::span<const Vec3> pts) {
    py::array_t<double> out({static_cast<py::ssize_t>(pts.size()), py::ssize_t{3}});
    auto w = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (int c = 0; c < 3; ++c) w(i, c) = pts[i][c];
    return out;
}

py::array_t<double> vector_array(const std::vector<double>& v) {
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

CloudFormat resolve(const std::string& format, const std::filesystem::path& path) {
    return format == "auto" ? format_from_extension(path) : parse_cloud_format(format);
}

}  // namespace

PYBIND11_MODULE(_curvad, m) {
    m.doc() = "Curvature-based point cloud anomaly detection";
    py::register_exception<Error>(m, "CurvadError", PyExc_ValueError);

    m.def("load_cloud", [](const std::filesystem::path& path, const std::string& format) {
        return to_array(load_cloud(path, resolve(format, path)).points());
    }, py::arg("path"), py::arg("format") = "auto");
    m.def("save_cloud", [](const Points& pts, const std::filesystem::path& path, const std::string& format) {
        save_cloud(to_cloud(pts), path, resolve(format, path));
    }, py::arg("points"), py::arg("path"), py::arg("format") = "auto");
    m.def("normalize_cloud", [](const Points& pts) {
        auto [cloud, t] = normalize_cloud(to_cloud(pts));
        return py::make_tuple(to_array(cloud.points()), py::make_tuple(t.centroid[0], t.centroid[1], t.centroid[2]),
                              t.scale);
    }, py::arg("points"), "Returns (points, centroid, scale).");

    m.def("knn", [](const Points& pts, std::size_t k, bool include_self) {
        const NeighborIndex idx(to_cloud(pts));
        const auto flat = idx.knn_all(k, include_self);
        py::array_t<std::uint32_t> out({static_cast<py::ssize_t>(idx.size()), static_cast<py::ssize_t>(k)});
        std::copy(flat.begin(), flat.end(), out.mutable_data());
        return out;
    }, py::arg("points"), py::arg("k"), py::arg("include_self") = true,
       "k nearest neighbors of every point, shape (N, k).");
    m.def("farthest_point_sample", [](const Points& pts, std::size_t count, std::uint64_t seed) {
        return farthest_point_sample(to_cloud(pts), count, seed);
    }, py::arg("points"), py::arg("m"), py::arg("seed") = 0);

    m.def("eig3_sym", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
        if (a.ndim() != 2 || a.shape(0) != 3 || a.shape(1) != 3) throw py::value_error("matrix must be 3x3");
        Mat3 mat;
        std::copy(a.data(), a.data() + 9, mat.begin());
        const auto e = eig3_sym(mat);
        py::array_t<double> vecs({py::ssize_t{3}, py::ssize_t{3}});
        auto w = vecs.mutable_unchecked<2>();
        for (int i = 0; i < 3; ++i)
            for (int c = 0; c < 3; ++c) w(i, c) = e.vectors[i][c];
        return py::make_tuple(py::array_t<double>(3, e.values.data()), vecs);
    }, py::arg("matrix"), "Ascending eigenvalues and eigenvectors (one per row).");
    m.def("curvature_field", [](const Points& pts, std::size_t k, const std::string& mode, double eps) {
        return vector_array(curvature_field(to_cloud(pts), k, parse_curvature_mode(mode), eps).values);
    }, py::arg("points"), py::arg("k") = kDefaultCurvatureK, py::arg("mode") = "variation",
       py::arg("eps") = kDefaultCurvatureEps);
    m.def("multi_scale_curvature", [](const Points& pts, std::vector<std::size_t> ks, const std::string& mode,
                                      double eps) {
        const auto ms = multi_scale_curvature(to_cloud(pts), ks, parse_curvature_mode(mode), eps);
        py::array_t<double> out({static_cast<py::ssize_t>(ms.n), static_cast<py::ssize_t>(ks.size())});
        std::copy(ms.values.begin(), ms.values.end(), out.mutable_data());
        return out;
    }, py::arg("points"), py::arg("ks"), py::arg("mode") = "variation", py::arg("eps") = kDefaultCurvatureEps);
    m.def("normals", [](const Points& pts, std::size_t k) {
        const auto n = normals(to_cloud(pts), k);
        return to_array(n);
    }, py::arg("points"), py::arg("k") = kDefaultCurvatureK);

    m.def("make_shape", [](const std::string& kind, std::size_t n, double noise, std::uint64_t seed) {
        return to_array(make_shape(parse_shape_kind(kind), n, noise, seed).points());
    }, py::arg("kind"), py::arg("n"), py::arg("noise") = 0.0, py::arg("seed") = 0);
    m.def("generate_pseudo_anomaly", [](const Points& pts, std::uint64_t seed, std::size_t num_patches,
                                        std::size_t max_selected, double lo, double hi, std::size_t normal_k) {
        PseudoAnomalyConfig cfg;
        cfg.seed = seed;
        cfg.num_patches = num_patches;
        cfg.max_selected = max_selected;
        cfg.displacement_lo = lo;
        cfg.displacement_hi = hi;
        cfg.normal_k = normal_k;
        const auto lc = generate_pseudo_anomaly(to_cloud(pts), cfg);
        py::array_t<std::uint8_t> labels(static_cast<py::ssize_t>(lc.labels.size()), lc.labels.values().data());
        return py::make_tuple(to_array(lc.cloud.points()), labels, lc.provenance.to_text());
    }, py::arg("points"), py::arg("seed") = 0, py::arg("num_patches") = 64, py::arg("max_selected") = 3,
       py::arg("displacement_lo") = 0.01, py::arg("displacement_hi") = 0.05, py::arg("normal_k") = 16,
       "Returns (points, labels, provenance text).");

    m.def("logit_score", [](std::vector<double> p_normal, std::vector<double> p_anomalous, double eps) {
        if (p_normal.size() != p_anomalous.size()) throw AlignmentError("probability arrays differ in length");
        ClassProbabilities probs;
        for (std::size_t i = 0; i < p_normal.size(); ++i) probs.values.emplace_back(p_normal[i], p_anomalous[i]);
        return vector_array(logit_score(probs, eps));
    }, py::arg("p_normal"), py::arg("p_anomalous"), py::arg("eps") = kDefaultLogitEps);
    m.def("object_score", [](std::vector<double> scores, double rate) { return object_score(scores, rate); },
          py::arg("scores"), py::arg("rate") = kDefaultAggregationRate);
    m.def("auroc", [](std::vector<double> scores, std::vector<std::uint8_t> labels) {
        return auroc(scores, labels);
    }, py::arg("scores"), py::arg("labels"));

    m.def("run_cli", [](std::vector<std::string> args) {
        args.insert(args.begin(), "curvad");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code = 0;
        {
            py::gil_scoped_release release;
            code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"), "Runs one curvad command in-process; returns (exit code, stdout, stderr).");
}
