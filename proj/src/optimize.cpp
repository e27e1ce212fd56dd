#include "gmi/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "gmi/engine.hpp"

namespace gmi {

LossGrad l1_loss_and_grad(const ImageBuffer& pred, const ImageBuffer& target) {
    if (!pred.same_shape(target)) {
        throw Error(ErrorCode::ShapeMismatch,
                    "prediction and target have different shapes");
    }
    LossGrad lg;
    lg.upstream = ImageBuffer::zeros(pred.height, pred.width, pred.channels);
    const double inv = 1.0 / static_cast<double>(pred.data.size());
    double total = 0.0;
    for (std::size_t k = 0; k < pred.data.size(); ++k) {
        const double d = pred.data[k] - target.data[k];
        total += std::abs(d);
        lg.upstream.data[k] = d > 0.0 ? inv : (d < 0.0 ? -inv : 0.0);
    }
    lg.loss = total * inv;
    return lg;
}

namespace {

void check_optim_config(const OptimConfig& ocfg) {
    if (ocfg.steps < 1) {
        throw Error(ErrorCode::ConfigInvalid, "steps must be >= 1");
    }
    if (!std::isfinite(ocfg.learning_rate) || ocfg.learning_rate < 0.0) {
        throw Error(ErrorCode::ConfigInvalid,
                    "learning_rate must be finite and >= 0");
    }
    if (ocfg.log_every < 1) {
        throw Error(ErrorCode::ConfigInvalid, "log_every must be >= 1");
    }
}

}  // namespace

OptimResult optimize_points(const PointSet& ps, const ImageBuffer& target,
                            const InterpConfig& icfg, const OptimConfig& ocfg,
                            int num_workers) {
    require_valid(ps);
    require_valid(icfg);
    require_frame(target.frame());
    check_optim_config(ocfg);

    OptimResult result;
    result.points = ps;
    const CoordinateFrame frame = target.frame();

    for (int step = 0; step <= ocfg.steps; ++step) {
        const ForwardResult fwd =
            forward(result.points, icfg, frame, num_workers);
        const LossGrad lg = l1_loss_and_grad(fwd.image, target);
        result.loss_curve.push_back(lg.loss);

        const bool log_now = step == 0 || step == ocfg.steps ||
                             step % ocfg.log_every == 0;
        if (log_now) {
            for (int i = 0; i < result.points.size(); ++i) {
                result.trajectory.entries.push_back(
                    {step, i, result.points.positions[i].x,
                     result.points.positions[i].y, lg.loss});
            }
        }
        if (step == ocfg.steps) {
            break;
        }

        const GradientSet grad =
            backward(result.points, icfg, fwd.cache, lg.upstream, num_workers);
        if (ocfg.optimize_positions) {
            for (int i = 0; i < result.points.size(); ++i) {
                result.points.positions[i].x -=
                    ocfg.learning_rate * grad.d_positions[i].x;
                result.points.positions[i].y -=
                    ocfg.learning_rate * grad.d_positions[i].y;
            }
        }
        if (ocfg.optimize_colors) {
            for (std::size_t k = 0; k < result.points.colors.size(); ++k) {
                result.points.colors[k] = std::clamp(
                    result.points.colors[k] -
                        ocfg.learning_rate * grad.d_colors[k],
                    0.0, 1.0);
            }
        }
    }
    return result;
}

DisplacementReport displacement_report(const TrajectoryLog& log) {
    if (log.entries.empty()) {
        throw Error(ErrorCode::EmptyLog, "trajectory log is empty");
    }
    int first_step = log.entries.front().step;
    int last_step = log.entries.front().step;
    for (const TrajectoryEntry& e : log.entries) {
        first_step = std::min(first_step, e.step);
        last_step = std::max(last_step, e.step);
    }

    std::map<int, PointDisplacement> by_point;
    for (const TrajectoryEntry& e : log.entries) {
        auto& d = by_point[e.point_index];
        d.point_index = e.point_index;
        if (e.step == first_step) {
            d.start = {e.x, e.y};
        }
        if (e.step == last_step) {
            d.end = {e.x, e.y};
        }
    }

    DisplacementReport report;
    report.points.reserve(by_point.size());
    double total = 0.0;
    for (auto& [index, d] : by_point) {
        d.distance = std::sqrt(squared_norm(d.end - d.start));
        total += d.distance;
        report.max = std::max(report.max, d.distance);
        report.points.push_back(d);
    }
    report.mean = total / static_cast<double>(report.points.size());
    return report;
}

void save_displacement_report(const DisplacementReport& report,
                              const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot open for writing: " + path);
    }
    out << "point_index,x_start,y_start,x_end,y_end,displacement\n";
    for (const PointDisplacement& d : report.points) {
        out << d.point_index << "," << format_double(d.start.x) << ","
            << format_double(d.start.y) << "," << format_double(d.end.x)
            << "," << format_double(d.end.y) << ","
            << format_double(d.distance) << "\n";
    }
    if (!out) {
        throw Error(ErrorCode::IoError, "short write: " + path);
    }
}

}  // namespace gmi
