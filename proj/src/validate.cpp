#include "gmi/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "gmi/engine.hpp"
#include "gmi/oracle.hpp"

namespace gmi {

RandomInstance random_instance(std::uint64_t seed, int grid_max,
                               int points_max, double sigma_lo,
                               double sigma_hi) {
    Rng rng(seed);
    RandomInstance inst;
    inst.seed = seed;
    inst.frame.width = 1 + static_cast<int>(rng.next_below(grid_max));
    inst.frame.height = 1 + static_cast<int>(rng.next_below(grid_max));
    const int n = 1 + static_cast<int>(rng.next_below(points_max));
    inst.points.channels = rng.next_below(2) == 0 ? 1 : 3;
    inst.points.positions.reserve(n);
    for (int i = 0; i < n; ++i) {
        inst.points.positions.push_back(
            {rng.uniform(-1.0, inst.frame.width),
             rng.uniform(-1.0, inst.frame.height)});
    }
    inst.points.colors.reserve(static_cast<std::size_t>(n) *
                               inst.points.channels);
    for (int i = 0; i < n * inst.points.channels; ++i) {
        inst.points.colors.push_back(rng.next_double());
    }
    inst.sigma = rng.uniform(sigma_lo, sigma_hi);
    return inst;
}

ImageBuffer random_upstream(Rng& rng, const CoordinateFrame& frame,
                            int channels) {
    ImageBuffer up = ImageBuffer::zeros(frame.height, frame.width, channels);
    for (double& v : up.data) {
        v = rng.uniform(-1.0, 1.0);
    }
    return up;
}

double untruncated_radius(const RandomInstance& instance) {
    double min_x = 0.0, min_y = 0.0;
    double max_x = instance.frame.width - 1.0;
    double max_y = instance.frame.height - 1.0;
    for (const Vec2& p : instance.points.positions) {
        min_x = std::min(min_x, p.x);
        min_y = std::min(min_y, p.y);
        max_x = std::max(max_x, p.x);
        max_y = std::max(max_y, p.y);
    }
    return std::hypot(max_x - min_x, max_y - min_y) + 1.0;
}

double max_relative_error(const std::vector<double>& a,
                          const std::vector<double>& b, double abs_floor) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double scale = std::max(std::abs(a[k]), std::abs(b[k]));
        if (scale <= abs_floor) {
            continue;
        }
        worst = std::max(worst, std::abs(a[k] - b[k]) / scale);
    }
    return worst;
}

GradientCheck compare_gradients(const GradientSet& got,
                                const GradientSet& want, double rel_tol,
                                double abs_floor) {
    GradientCheck check;
    const auto compare = [&](double a, double b) {
        const double diff = std::abs(a - b);
        const double scale = std::max(std::abs(a), std::abs(b));
        if (diff > abs_floor + rel_tol * scale) {
            check.passed = false;
        }
        if (scale > abs_floor) {
            check.worst_rel = std::max(check.worst_rel, diff / scale);
        }
    };
    for (std::size_t k = 0; k < got.d_colors.size(); ++k) {
        compare(got.d_colors[k], want.d_colors[k]);
    }
    for (std::size_t k = 0; k < got.d_positions.size(); ++k) {
        compare(got.d_positions[k].x, want.d_positions[k].x);
        compare(got.d_positions[k].y, want.d_positions[k].y);
    }
    return check;
}

bool ValidationSummary::all_passed() const {
    for (const CheckResult& check : checks) {
        if (check.hard && !check.passed) {
            return false;
        }
    }
    return true;
}

namespace {

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           (a.empty() ||
            std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

bool bits_equal(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    return a.size() == b.size() &&
           (a.empty() ||
            std::memcmp(a.data(), b.data(), a.size() * sizeof(Vec2)) == 0);
}

// Max |engine - oracle| split into truncation error (pixels that kept a
// neighborhood) and fallback deviation (pixels that lost it).
struct TruncationErrors {
    double truncation = 0.0;
    double fallback = 0.0;
};

TruncationErrors truncation_errors(const ForwardResult& fwd,
                                   const ImageBuffer& reference) {
    TruncationErrors err;
    const int channels = reference.channels;
    for (std::int64_t pix = 0; pix < fwd.cache.num_pixels(); ++pix) {
        double d = 0.0;
        for (int ch = 0; ch < channels; ++ch) {
            d = std::max(d, std::abs(fwd.image.data[pix * channels + ch] -
                                     reference.data[pix * channels + ch]));
        }
        if (fwd.cache.fallback_flag[pix]) {
            err.fallback = std::max(err.fallback, d);
        } else {
            err.truncation = std::max(err.truncation, d);
        }
    }
    return err;
}

}  // namespace

ValidationSummary run_validation(const ValidationOptions& options) {
    ValidationSummary summary;
    CheckResult forward_check{"forward vs oracle (untruncated, rel err)",
                              true, true, 0.0, 1e-12, {}};
    CheckResult truncation_check{"truncation error at 3*sigma (abs, measured)",
                                 false, true, 0.0, 1e-3, {}};
    CheckResult fallback_check{"fallback deviation vs oracle (abs, measured)",
                               false, true, 0.0, 0.0, {}};
    CheckResult gradient_check{"backward vs finite differences (rel err)",
                               true, true, 0.0, 1e-6, {}};
    CheckResult determinism_check{"worker-count determinism (1/2/4/8)",
                                  true, true, 0.0, 0.0, {}};

    Rng master(options.seed);
    for (int k = 0; k < options.cases; ++k) {
        const std::uint64_t inst_seed = master.next_u64();
        const RandomInstance inst =
            random_instance(inst_seed, options.grid_max, options.points_max);
        Rng aux(inst_seed ^ 0x5DEECE66DULL);

        const ImageBuffer reference =
            oracle_forward(inst.points, inst.sigma, inst.frame);

        // 1. untruncated engine forward must reproduce the oracle
        {
            const InterpConfig cfg{inst.sigma, untruncated_radius(inst),
                                   Fallback::NearestPoint, inst.frame};
            const ForwardResult fwd = forward(inst.points, cfg, inst.frame);
            const double rel = max_relative_error(fwd.image.data,
                                                  reference.data, 1e-300);
            forward_check.worst = std::max(forward_check.worst, rel);
            if (rel > forward_check.tolerance) {
                forward_check.passed = false;
                forward_check.failed_seeds.push_back(inst_seed);
            }
        }

        // 2. truncation error at the default 3*sigma cutoff (measured)
        {
            const InterpConfig cfg = make_config(inst.sigma, inst.frame);
            const ForwardResult fwd = forward(inst.points, cfg, inst.frame);
            const TruncationErrors err = truncation_errors(fwd, reference);
            truncation_check.worst =
                std::max(truncation_check.worst, err.truncation);
            if (err.truncation > truncation_check.tolerance) {
                truncation_check.passed = false;
                truncation_check.failed_seeds.push_back(inst_seed);
            }
            fallback_check.worst = std::max(fallback_check.worst, err.fallback);
        }

        // 3. analytic gradients vs central finite differences
        {
            const InterpConfig cfg{inst.sigma, untruncated_radius(inst),
                                   Fallback::NearestPoint, inst.frame};
            const ForwardResult fwd = forward(inst.points, cfg, inst.frame);
            const ImageBuffer upstream =
                random_upstream(aux, inst.frame, inst.points.channels);
            GradientSet analytic =
                backward(inst.points, cfg, fwd.cache, upstream);
            if (options.inject_fault && k == 0) {
                analytic.d_colors[0] += 1.0;  // negative-path test hook
            }
            const GradientSet fd = oracle_gradients_fd(
                inst.points, inst.sigma, inst.frame, upstream, 1e-5);
            const GradientCheck check =
                compare_gradients(analytic, fd, 1e-6, 1e-8);
            gradient_check.worst =
                std::max(gradient_check.worst, check.worst_rel);
            if (!check.passed) {
                gradient_check.passed = false;
                gradient_check.failed_seeds.push_back(inst_seed);
            }
        }

        // 4. bit-identical results for any worker count
        {
            const InterpConfig cfg = make_config(inst.sigma, inst.frame);
            const ImageBuffer upstream =
                random_upstream(aux, inst.frame, inst.points.channels);
            const ForwardResult base = forward(inst.points, cfg, inst.frame, 1);
            const GradientSet base_grad =
                backward(inst.points, cfg, base.cache, upstream, 1);
            bool identical = true;
            for (int workers : {2, 4, 8}) {
                const ForwardResult fwd =
                    forward(inst.points, cfg, inst.frame, workers);
                const GradientSet grad =
                    backward(inst.points, cfg, fwd.cache, upstream, workers);
                identical = identical &&
                            bits_equal(fwd.image.data, base.image.data) &&
                            bits_equal(grad.d_colors, base_grad.d_colors) &&
                            bits_equal(grad.d_positions, base_grad.d_positions);
            }
            if (!identical) {
                determinism_check.passed = false;
                determinism_check.failed_seeds.push_back(inst_seed);
            }
        }
    }

    summary.checks.push_back(std::move(forward_check));
    summary.checks.push_back(std::move(truncation_check));
    summary.checks.push_back(std::move(fallback_check));
    summary.checks.push_back(std::move(gradient_check));
    summary.checks.push_back(std::move(determinism_check));
    return summary;
}

}  // namespace gmi
