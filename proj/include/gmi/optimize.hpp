#pragma once

// Gradient-descent optimization of point positions (and optionally colors)
// against an L1 reconstruction loss, with trajectory and loss logging.

#include <cstdint>
#include <vector>

#include "gmi/core.hpp"
#include "gmi/imaging.hpp"

namespace gmi {

struct OptimConfig {
    int steps = 100;
    double learning_rate = 0.5;  // pixels per unit gradient; 0 freezes state
    bool optimize_positions = true;
    bool optimize_colors = false;
    int log_every = 10;
    std::uint64_t seed = 0;  // carried alongside for reproducible pipelines
};

struct LossGrad {
    double loss = 0.0;
    ImageBuffer upstream;  // d loss / d prediction
};

// loss = mean |pred - target|; upstream = sign(pred - target)/(H*W*C) with
// sign(0) = 0.
LossGrad l1_loss_and_grad(const ImageBuffer& pred, const ImageBuffer& target);

struct OptimResult {
    PointSet points;
    TrajectoryLog trajectory;          // step 0, every log_every, final
    std::vector<double> loss_curve;    // one entry per step 0..steps
};

// steps rounds of: render -> L1 loss -> backward -> descent update. The
// spatial grid is rebuilt from scratch inside every render. Positions are
// never clamped; colors clamp to [0,1] when color optimization is on.
OptimResult optimize_points(const PointSet& ps, const ImageBuffer& target,
                            const InterpConfig& icfg, const OptimConfig& ocfg,
                            int num_workers = 1);

struct PointDisplacement {
    int point_index = 0;
    Vec2 start;
    Vec2 end;
    double distance = 0.0;
};

struct DisplacementReport {
    double mean = 0.0;
    double max = 0.0;
    std::vector<PointDisplacement> points;
};

// Euclidean displacement between the first and last logged steps.
DisplacementReport displacement_report(const TrajectoryLog& log);

void save_displacement_report(const DisplacementReport& report,
                              const std::string& path);

}  // namespace gmi
