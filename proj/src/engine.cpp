#include "gmi/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace gmi {

namespace detail {

std::vector<std::pair<int, int>> row_ranges(int height, int num_workers) {
    num_workers = std::max(1, num_workers);
    const int chunk = (height + num_workers - 1) / num_workers;
    std::vector<std::pair<int, int>> ranges;
    ranges.reserve(num_workers);
    for (int w = 0; w < num_workers; ++w) {
        const int begin = std::min(height, w * chunk);
        const int end = std::min(height, begin + chunk);
        ranges.emplace_back(begin, end);
    }
    return ranges;
}

}  // namespace detail

int ForwardCache::fallback_count() const {
    int n = 0;
    for (std::uint8_t f : fallback_flag) {
        n += f;
    }
    return n;
}

namespace {

// Contribution lists for one row range, spliced into the cache afterwards.
struct RowChunk {
    std::vector<std::int64_t> counts;  // per pixel in the range
    std::vector<int> points;
    std::vector<double> weights;
};

void forward_rows(const PointSet& ps, const InterpConfig& cfg,
                  const BinGrid& grid, int row_begin, int row_end,
                  ImageBuffer& image, ForwardCache& cache, RowChunk& chunk) {
    const int width = image.width;
    const int channels = ps.channels;
    std::vector<int> neighbors;
    double num[3];

    for (int r = row_begin; r < row_end; ++r) {
        for (int c = 0; c < width; ++c) {
            const Vec2 q{static_cast<double>(c), static_cast<double>(r)};
            const std::int64_t pix = static_cast<std::int64_t>(r) * width + c;

            query_radius(grid, ps, q, cfg.cutoff_radius, neighbors);

            double wsum = 0.0;
            for (int ch = 0; ch < channels; ++ch) {
                num[ch] = 0.0;
            }
            const std::size_t contrib_begin = chunk.points.size();
            for (int i : neighbors) {
                const double w = gaussian_weight(q, ps.positions[i], cfg.sigma);
                wsum += w;
                for (int ch = 0; ch < channels; ++ch) {
                    num[ch] += ps.color(i, ch) * w;
                }
                chunk.points.push_back(i);
                chunk.weights.push_back(w);
            }

            // wsum == 0 covers both an empty neighborhood and total
            // exp underflow under a user-set huge radius.
            if (wsum <= 0.0) {
                chunk.points.resize(contrib_begin);
                chunk.weights.resize(contrib_begin);
                chunk.counts.push_back(0);
                cache.fallback_flag[pix] = 1;
                cache.normalizer[pix] = 0.0;
                if (cfg.fallback == Fallback::NearestPoint) {
                    const int nearest = nearest_point(grid, ps, q);
                    cache.nearest_index[pix] = nearest;
                    for (int ch = 0; ch < channels; ++ch) {
                        image.at(r, c, ch) = ps.color(nearest, ch);
                    }
                } else {
                    for (int ch = 0; ch < channels; ++ch) {
                        image.at(r, c, ch) = 0.0;
                    }
                }
            } else {
                chunk.counts.push_back(
                    static_cast<std::int64_t>(neighbors.size()));
                cache.normalizer[pix] = wsum;
                for (int ch = 0; ch < channels; ++ch) {
                    image.at(r, c, ch) = num[ch] / wsum;
                }
            }
        }
    }
}

}  // namespace

ForwardResult forward(const PointSet& ps, const InterpConfig& cfg,
                      const CoordinateFrame& out_frame, int num_workers) {
    require_valid(ps);
    require_valid(cfg);
    require_frame(out_frame);

    const int height = out_frame.height;
    const int width = out_frame.width;
    const BinGrid grid = build_bin_grid(ps, cfg.cutoff_radius);

    ForwardResult result;
    result.image = ImageBuffer::zeros(height, width, ps.channels);

    ForwardCache& cache = result.cache;
    cache.width = width;
    cache.height = height;
    cache.channels = ps.channels;
    cache.num_points = ps.size();
    cache.sigma = cfg.sigma;
    cache.cutoff_radius = cfg.cutoff_radius;
    cache.fallback = cfg.fallback;
    const std::int64_t num_pixels = cache.num_pixels();
    cache.normalizer.assign(num_pixels, 0.0);
    cache.fallback_flag.assign(num_pixels, 0);
    cache.nearest_index.assign(num_pixels, -1);

    const auto ranges = detail::row_ranges(height, num_workers);
    std::vector<RowChunk> chunks(ranges.size());

    if (ranges.size() == 1) {
        forward_rows(ps, cfg, grid, ranges[0].first, ranges[0].second,
                     result.image, cache, chunks[0]);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(ranges.size());
        for (std::size_t w = 0; w < ranges.size(); ++w) {
            threads.emplace_back([&, w] {
                forward_rows(ps, cfg, grid, ranges[w].first, ranges[w].second,
                             result.image, cache, chunks[w]);
            });
        }
        for (auto& t : threads) {
            t.join();
        }
    }

    // Ranges ascend over rows, so appending chunk arrays in range order
    // yields the same pixel-ordered CSR for any worker count.
    std::size_t total = 0;
    for (const RowChunk& chunk : chunks) {
        total += chunk.points.size();
    }
    cache.pixel_start.assign(num_pixels + 1, 0);
    cache.contrib_point.reserve(total);
    cache.contrib_weight.reserve(total);
    std::int64_t pix = 0;
    for (const RowChunk& chunk : chunks) {
        for (const std::int64_t count : chunk.counts) {
            cache.pixel_start[pix + 1] = cache.pixel_start[pix] + count;
            ++pix;
        }
        cache.contrib_point.insert(cache.contrib_point.end(),
                                   chunk.points.begin(), chunk.points.end());
        cache.contrib_weight.insert(cache.contrib_weight.end(),
                                    chunk.weights.begin(),
                                    chunk.weights.end());
    }
    cache.output = result.image.data;
    return result;
}

ForwardResult forward(const PointSet& ps, const InterpConfig& cfg,
                      int num_workers) {
    return forward(ps, cfg, cfg.frame, num_workers);
}

namespace {

struct GradientAccum {
    std::vector<double> d_colors;
    std::vector<Vec2> d_positions;
};

void backward_rows(const PointSet& ps, const ForwardCache& cache,
                   const ImageBuffer& upstream, double inv_sigma2,
                   int row_begin, int row_end, GradientAccum& acc) {
    const int width = cache.width;
    const int channels = cache.channels;

    for (int r = row_begin; r < row_end; ++r) {
        for (int c = 0; c < width; ++c) {
            const std::int64_t pix = static_cast<std::int64_t>(r) * width + c;

            if (cache.fallback_flag[pix]) {
                // Nearest-point selection is treated as non-differentiable:
                // the upstream gradient flows to that point's color only.
                if (cache.fallback == Fallback::NearestPoint) {
                    const int j = cache.nearest_index[pix];
                    for (int ch = 0; ch < channels; ++ch) {
                        acc.d_colors[static_cast<std::size_t>(j) * channels +
                                     ch] += upstream.at(r, c, ch);
                    }
                }
                continue;
            }

            const Vec2 q{static_cast<double>(c), static_cast<double>(r)};
            const double inv_w = 1.0 / cache.normalizer[pix];
            for (std::int64_t k = cache.pixel_start[pix];
                 k < cache.pixel_start[pix + 1]; ++k) {
                const int i = cache.contrib_point[k];
                const double ratio = cache.contrib_weight[k] * inv_w;
                double dot = 0.0;
                for (int ch = 0; ch < channels; ++ch) {
                    const double up = upstream.at(r, c, ch);
                    acc.d_colors[static_cast<std::size_t>(i) * channels + ch] +=
                        up * ratio;
                    dot += up * (ps.color(i, ch) -
                                 cache.output[pix * channels + ch]);
                }
                const double coef = ratio * dot * inv_sigma2;
                const Vec2 mu = ps.positions[i];
                acc.d_positions[i].x += coef * (q.x - mu.x);
                acc.d_positions[i].y += coef * (q.y - mu.y);
            }
        }
    }
}

}  // namespace

GradientSet backward(const PointSet& ps, const InterpConfig& cfg,
                     const ForwardCache& cache, const ImageBuffer& upstream,
                     int num_workers) {
    require_valid(ps);
    require_valid(cfg);
    if (cache.num_points != ps.size() || cache.channels != ps.channels ||
        cache.width != upstream.width || cache.height != upstream.height ||
        cache.channels != upstream.channels || cache.sigma != cfg.sigma ||
        cache.cutoff_radius != cfg.cutoff_radius ||
        cache.fallback != cfg.fallback) {
        throw Error(ErrorCode::CacheMismatch,
                    "forward cache does not match the given inputs");
    }

    // Accumulation granularity is fixed by the input, not the worker
    // count: each slot owns a contiguous row block and is reduced in slot
    // order, so any worker count yields bit-identical gradients.
    const int num_slots = std::min(cache.height, 16);
    const auto slots = detail::row_ranges(cache.height, num_slots);

    const int n = ps.size();
    const int channels = ps.channels;
    const double inv_sigma2 = 1.0 / (cfg.sigma * cfg.sigma);

    std::vector<GradientAccum> partials(slots.size());
    for (auto& acc : partials) {
        acc.d_colors.assign(static_cast<std::size_t>(n) * channels, 0.0);
        acc.d_positions.assign(static_cast<std::size_t>(n), Vec2{});
    }

    const int threads_wanted =
        std::min<int>(std::max(1, num_workers), static_cast<int>(slots.size()));
    if (threads_wanted <= 1) {
        for (std::size_t s = 0; s < slots.size(); ++s) {
            backward_rows(ps, cache, upstream, inv_sigma2, slots[s].first,
                          slots[s].second, partials[s]);
        }
    } else {
        std::atomic<int> next_slot{0};
        std::vector<std::thread> threads;
        threads.reserve(threads_wanted);
        for (int t = 0; t < threads_wanted; ++t) {
            threads.emplace_back([&] {
                for (;;) {
                    const int s =
                        next_slot.fetch_add(1, std::memory_order_relaxed);
                    if (s >= static_cast<int>(slots.size())) {
                        break;
                    }
                    backward_rows(ps, cache, upstream, inv_sigma2,
                                  slots[s].first, slots[s].second,
                                  partials[s]);
                }
            });
        }
        for (auto& t : threads) {
            t.join();
        }
    }

    GradientSet grad = GradientSet::zeros(n, channels);
    for (const GradientAccum& acc : partials) {
        for (std::size_t k = 0; k < grad.d_colors.size(); ++k) {
            grad.d_colors[k] += acc.d_colors[k];
        }
        for (int i = 0; i < n; ++i) {
            grad.d_positions[i].x += acc.d_positions[i].x;
            grad.d_positions[i].y += acc.d_positions[i].y;
        }
    }
    return grad;
}

}  // namespace gmi
