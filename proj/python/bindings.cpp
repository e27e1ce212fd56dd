// Python bindings for the interpolation engine: numpy in, numpy out.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>
#include <stdexcept>

#include "gmi/benchmark.hpp"
#include "gmi/bin_grid.hpp"
#include "gmi/engine.hpp"
#include "gmi/imaging.hpp"
#include "gmi/optimize.hpp"
#include "gmi/oracle.hpp"
#include "gmi/resample.hpp"
#include "gmi/validate.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

gmi::ImageBuffer image_from_array(const DoubleArray& arr) {
    if (arr.ndim() == 2) {
        gmi::ImageBuffer img = gmi::ImageBuffer::zeros(
            static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)), 1);
        std::memcpy(img.data.data(), arr.data(),
                    img.data.size() * sizeof(double));
        return img;
    }
    if (arr.ndim() == 3) {
        const int channels = static_cast<int>(arr.shape(2));
        if (channels != 1 && channels != 3) {
            throw std::invalid_argument("image must have 1 or 3 channels");
        }
        gmi::ImageBuffer img = gmi::ImageBuffer::zeros(
            static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)),
            channels);
        std::memcpy(img.data.data(), arr.data(),
                    img.data.size() * sizeof(double));
        return img;
    }
    throw std::invalid_argument("image array must be HxW or HxWxC");
}

py::array image_to_array(const gmi::ImageBuffer& img) {
    py::array_t<double> arr({img.height, img.width, img.channels});
    std::memcpy(arr.mutable_data(), img.data.data(),
                img.data.size() * sizeof(double));
    return arr;
}

gmi::PointSet point_set_from_arrays(const DoubleArray& positions,
                                    const DoubleArray& colors) {
    if (positions.ndim() != 2 || positions.shape(1) != 2) {
        throw std::invalid_argument("positions must be Nx2");
    }
    if (colors.ndim() != 2 || colors.shape(0) != positions.shape(0)) {
        throw std::invalid_argument("colors must be NxC with matching N");
    }
    const int n = static_cast<int>(positions.shape(0));
    const int channels = static_cast<int>(colors.shape(1));
    gmi::PointSet ps;
    ps.channels = channels;
    ps.positions.resize(n);
    for (int i = 0; i < n; ++i) {
        ps.positions[i] = {positions.at(i, 0), positions.at(i, 1)};
    }
    ps.colors.assign(colors.data(), colors.data() + n * channels);
    gmi::require_valid(ps);
    return ps;
}

py::array positions_to_array(const gmi::PointSet& ps) {
    py::array_t<double> arr({ps.size(), 2});
    auto view = arr.mutable_unchecked<2>();
    for (int i = 0; i < ps.size(); ++i) {
        view(i, 0) = ps.positions[i].x;
        view(i, 1) = ps.positions[i].y;
    }
    return arr;
}

py::array colors_to_array(const gmi::PointSet& ps) {
    py::array_t<double> arr({ps.size(), ps.channels});
    std::memcpy(arr.mutable_data(), ps.colors.data(),
                ps.colors.size() * sizeof(double));
    return arr;
}

gmi::InterpConfig make_interp_config(double sigma, double radius,
                                     const std::string& fallback,
                                     int width, int height) {
    gmi::InterpConfig cfg = gmi::make_config(sigma, {width, height});
    if (radius > 0.0) {
        cfg.cutoff_radius = radius;
    }
    if (fallback == "zero") {
        cfg.fallback = gmi::Fallback::Zero;
    } else if (fallback != "nearest") {
        throw std::invalid_argument("fallback must be 'nearest' or 'zero'");
    }
    return cfg;
}

gmi::Filter filter_arg(const std::string& name) {
    const auto f = gmi::filter_from_name(name);
    if (!f) {
        throw std::invalid_argument("unknown filter: " + name);
    }
    return *f;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Gaussian-mixture interpolation of scattered image points";

    py::register_exception<gmi::Error>(m, "GmiError");

    py::class_<gmi::PointSet>(m, "PointSet")
        .def(py::init(&point_set_from_arrays), "positions"_a, "colors"_a)
        .def_property_readonly("positions", &positions_to_array)
        .def_property_readonly("colors", &colors_to_array)
        .def_property_readonly("channels",
                               [](const gmi::PointSet& ps) { return ps.channels; })
        .def("__len__", &gmi::PointSet::size);

    py::class_<gmi::ForwardCache>(m, "ForwardCache")
        .def_property_readonly("fallback_count",
                               &gmi::ForwardCache::fallback_count)
        .def_property_readonly("width",
                               [](const gmi::ForwardCache& c) { return c.width; })
        .def_property_readonly(
            "height", [](const gmi::ForwardCache& c) { return c.height; });

    m.def("gaussian_weight",
          [](double qx, double qy, double mx, double my, double sigma) {
              return gmi::gaussian_weight({qx, qy}, {mx, my}, sigma);
          },
          "qx"_a, "qy"_a, "mux"_a, "muy"_a, "sigma"_a);

    m.def(
        "forward",
        [](const gmi::PointSet& ps, int width, int height, double sigma,
           double radius, const std::string& fallback, int workers) {
            const gmi::InterpConfig cfg =
                make_interp_config(sigma, radius, fallback, width, height);
            gmi::ForwardResult result =
                gmi::forward(ps, cfg, cfg.frame, workers);
            return py::make_tuple(image_to_array(result.image),
                                  std::move(result.cache));
        },
        "points"_a, "width"_a, "height"_a, "sigma"_a, "radius"_a = 0.0,
        "fallback"_a = "nearest", "workers"_a = 1,
        "Render the point set; returns (image, cache).");

    m.def(
        "backward",
        [](const gmi::PointSet& ps, const gmi::ForwardCache& cache,
           const DoubleArray& upstream, double sigma, double radius,
           const std::string& fallback, int workers) {
            const gmi::InterpConfig cfg = make_interp_config(
                sigma, radius, fallback, cache.width, cache.height);
            const gmi::GradientSet grad = gmi::backward(
                ps, cfg, cache, image_from_array(upstream), workers);
            py::array_t<double> d_colors({ps.size(), ps.channels});
            std::memcpy(d_colors.mutable_data(), grad.d_colors.data(),
                        grad.d_colors.size() * sizeof(double));
            py::array_t<double> d_positions({ps.size(), 2});
            auto view = d_positions.mutable_unchecked<2>();
            for (int i = 0; i < ps.size(); ++i) {
                view(i, 0) = grad.d_positions[i].x;
                view(i, 1) = grad.d_positions[i].y;
            }
            return py::make_tuple(d_colors, d_positions);
        },
        "points"_a, "cache"_a, "upstream"_a, "sigma"_a, "radius"_a = 0.0,
        "fallback"_a = "nearest", "workers"_a = 1,
        "Gradients of sum(upstream * forward) w.r.t. colors and positions.");

    m.def(
        "oracle_forward",
        [](const gmi::PointSet& ps, int width, int height, double sigma) {
            return image_to_array(
                gmi::oracle_forward(ps, sigma, {width, height}));
        },
        "points"_a, "width"_a, "height"_a, "sigma"_a,
        "Slow full-sum reference forward pass.");

    m.def(
        "oracle_gradients_fd",
        [](const gmi::PointSet& ps, int width, int height, double sigma,
           const DoubleArray& upstream, double step) {
            const gmi::GradientSet grad = gmi::oracle_gradients_fd(
                ps, sigma, {width, height}, image_from_array(upstream), step);
            py::array_t<double> d_colors({ps.size(), ps.channels});
            std::memcpy(d_colors.mutable_data(), grad.d_colors.data(),
                        grad.d_colors.size() * sizeof(double));
            py::array_t<double> d_positions({ps.size(), 2});
            auto view = d_positions.mutable_unchecked<2>();
            for (int i = 0; i < ps.size(); ++i) {
                view(i, 0) = grad.d_positions[i].x;
                view(i, 1) = grad.d_positions[i].y;
            }
            return py::make_tuple(d_colors, d_positions);
        },
        "points"_a, "width"_a, "height"_a, "sigma"_a, "upstream"_a,
        "step"_a = 1e-5, "Central finite differences through the reference.");

    m.def(
        "resample",
        [](const DoubleArray& img, int width, int height,
           const std::string& method) {
            return image_to_array(gmi::resample(image_from_array(img),
                                                {width, height},
                                                filter_arg(method)));
        },
        "image"_a, "width"_a, "height"_a, "method"_a,
        "Separable classical resample (nearest, box, bilinear, bicubic, "
        "hamming, lanczos).");

    m.def("kernel_eval",
          [](const std::string& method, double t) {
              return gmi::kernel_eval(filter_arg(method), t);
          },
          "method"_a, "t"_a);

    m.def(
        "grid_subsample",
        [](const DoubleArray& img, int factor) {
            return gmi::grid_subsample(image_from_array(img), factor);
        },
        "image"_a, "factor"_a,
        "Box-average blocks into one known point per block.");

    m.def(
        "random_subsample",
        [](const DoubleArray& img, int n, std::uint64_t seed) {
            return gmi::random_subsample(image_from_array(img), n, seed);
        },
        "image"_a, "n"_a, "seed"_a,
        "Uniformly scattered points with nearest-pixel colors.");

    m.def(
        "l1_metric",
        [](const DoubleArray& a, const DoubleArray& b) {
            return gmi::l1_metric(image_from_array(a), image_from_array(b));
        },
        "a"_a, "b"_a);

    m.def(
        "load_image",
        [](const std::string& path) {
            return image_to_array(gmi::load_image(path));
        },
        "path"_a);

    m.def(
        "save_image",
        [](const DoubleArray& img, const std::string& path) {
            gmi::save_image(image_from_array(img), path);
        },
        "image"_a, "path"_a);

    m.def(
        "load_point_set",
        [](const std::string& path) { return gmi::load_point_set(path); },
        "path"_a);

    m.def(
        "save_point_set",
        [](const gmi::PointSet& ps, const std::string& path) {
            gmi::save_point_set(ps, path);
        },
        "points"_a, "path"_a);

    m.def(
        "optimize_points",
        [](const gmi::PointSet& ps, const DoubleArray& target, double sigma,
           double radius, int steps, double learning_rate,
           bool optimize_positions, bool optimize_colors, int log_every,
           int workers) {
            const gmi::ImageBuffer target_img = image_from_array(target);
            gmi::InterpConfig icfg =
                gmi::make_config(sigma, target_img.frame());
            if (radius > 0.0) {
                icfg.cutoff_radius = radius;
            }
            gmi::OptimConfig ocfg;
            ocfg.steps = steps;
            ocfg.learning_rate = learning_rate;
            ocfg.optimize_positions = optimize_positions;
            ocfg.optimize_colors = optimize_colors;
            ocfg.log_every = log_every;
            const gmi::OptimResult result =
                gmi::optimize_points(ps, target_img, icfg, ocfg, workers);

            py::dict out;
            out["points"] = result.points;
            out["loss_curve"] = py::array_t<double>(
                static_cast<py::ssize_t>(result.loss_curve.size()),
                result.loss_curve.data());
            py::list trajectory;
            for (const gmi::TrajectoryEntry& e : result.trajectory.entries) {
                trajectory.append(py::make_tuple(e.step, e.point_index, e.x,
                                                 e.y, e.loss));
            }
            out["trajectory"] = trajectory;
            const gmi::DisplacementReport report =
                gmi::displacement_report(result.trajectory);
            out["mean_displacement"] = report.mean;
            out["max_displacement"] = report.max;
            return out;
        },
        "points"_a, "target"_a, "sigma"_a, "radius"_a = 0.0, "steps"_a = 100,
        "learning_rate"_a = 0.5, "optimize_positions"_a = true,
        "optimize_colors"_a = false, "log_every"_a = 10, "workers"_a = 1,
        "Gradient descent on point positions against an L1 target loss.");

    m.def(
        "make_blob_image",
        [](int width, int height, int channels, std::uint64_t seed) {
            gmi::Rng rng(seed);
            return image_to_array(
                gmi::make_blob_image(width, height, channels, rng));
        },
        "width"_a, "height"_a, "channels"_a = 3, "seed"_a = 0,
        "Seeded smooth synthetic test image.");

    m.attr("__version__") = "0.1.0";
}
