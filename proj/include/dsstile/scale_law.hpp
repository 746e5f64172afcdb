#pragma once

// Altitude-aware scaling math: the minimum resolution law, the discrete
// resolution bin ladder, and the altitude -> bin policies that drive
// dynamic spatial scaling (DSS).

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dsstile/errors.hpp"

namespace dss {

inline constexpr double kPi = 3.14159265358979323846;

// One capture source: flight altitude (possibly unknown), field of view and
// native sensor resolution. Altitude 0 in dataset metadata means "missing",
// so unknown altitude is a first-class state here.
struct CameraModel {
    std::optional<double> altitude_m;
    double fov_deg = 65.0;
    int native_width_px = 0;
    int native_height_px = 0;

    int native_long_side() const { return std::max(native_width_px, native_height_px); }
};

// Recognition criterion: an object of physical area obj_m2 must cover at
// least rec_px2 pixels in the scaled image.
struct RecognitionSpec {
    double rec_px2 = 80.0;
    double obj_m2 = 0.48;
};

inline void validate(const RecognitionSpec& spec) {
    if (!(spec.rec_px2 > 0.0) || !std::isfinite(spec.rec_px2) ||
        !(spec.obj_m2 > 0.0) || !std::isfinite(spec.obj_m2)) {
        throw DomainError("RecognitionSpec: rec_px2 and obj_m2 must be finite and > 0");
    }
}

// Minimum long-side image dimension (pixels) that keeps an object of
// obj_m2 square meters at rec_px2 pixels when imaged from altitude h with
// the given horizontal FOV:
//
//     p = 2 h tan(fov/2) sqrt(rec / obj)
//
// All math in double precision, rounded to integer pixels once at the end.
inline int required_resolution(double altitude_m, double fov_deg, const RecognitionSpec& spec) {
    if (!(altitude_m > 0.0) || !std::isfinite(altitude_m)) {
        throw DomainError("required_resolution: altitude must be finite and > 0");
    }
    if (!(fov_deg > 0.0) || !(fov_deg < 180.0) || !std::isfinite(fov_deg)) {
        throw DomainError("required_resolution: fov_deg must be in (0, 180)");
    }
    validate(spec);
    const double half_fov_rad = fov_deg * kPi / 360.0;
    const double p = 2.0 * altitude_m * std::tan(half_fov_rad) * std::sqrt(spec.rec_px2 / spec.obj_m2);
    return static_cast<int>(std::llround(p));
}

// Discrete resolution bins. bins_px[0] is the tile size N; each following
// bin adds one tile stride, so bin i implies i tiles per dimension at the
// matching overlap.
struct BinLadder {
    int tile_size_px = 640;
    double stride_fraction = 0.8;
    int bin_count = 6;
    std::vector<int> bins_px;

    int step_px() const { return static_cast<int>(std::llround(tile_size_px * stride_fraction)); }
    int top_bin() const { return bins_px.back(); }
    // 1-based, matching how the bins are usually written (P1..P6).
    int bin_px(int index_1based) const {
        if (index_1based < 1 || index_1based > static_cast<int>(bins_px.size())) {
            throw DomainError("BinLadder: bin index " + std::to_string(index_1based) +
                              " out of range 1.." + std::to_string(bins_px.size()));
        }
        return bins_px[static_cast<std::size_t>(index_1based - 1)];
    }
};

// The stride is rounded to whole pixels once; every bin is an exact multiple
// of that step above N, so consecutive bins differ by a constant step.
inline BinLadder build_ladder(int tile_size_px, double stride_fraction, int bin_count) {
    if (tile_size_px <= 0) throw DomainError("build_ladder: tile size must be > 0");
    if (!(stride_fraction > 0.0) || stride_fraction > 1.0 || !std::isfinite(stride_fraction)) {
        throw DomainError("build_ladder: stride fraction must be in (0, 1]");
    }
    if (bin_count < 1) throw DomainError("build_ladder: bin count must be >= 1");
    BinLadder ladder;
    ladder.tile_size_px = tile_size_px;
    ladder.stride_fraction = stride_fraction;
    ladder.bin_count = bin_count;
    const int step = ladder.step_px();
    if (step < 1) throw DomainError("build_ladder: stride rounds to zero pixels");
    ladder.bins_px.reserve(static_cast<std::size_t>(bin_count));
    for (int i = 0; i < bin_count; ++i) {
        ladder.bins_px.push_back(tile_size_px + step * i);
    }
    return ladder;
}

// Smallest bin that still satisfies p_hat, clamped to the top bin. Never
// returns more than native_long_side: an image below the chosen bin keeps
// its native resolution (no upscaling).
inline int select_bin(int p_hat, const BinLadder& ladder, int native_long_side) {
    if (ladder.bins_px.empty()) throw DomainError("select_bin: empty ladder");
    if (p_hat <= 0) throw DomainError("select_bin: p_hat must be > 0");
    if (native_long_side <= 0) throw DomainError("select_bin: native_long_side must be > 0");
    int chosen = ladder.top_bin();
    for (int b : ladder.bins_px) {
        if (b >= p_hat) {
            chosen = b;
            break;
        }
    }
    return std::min(chosen, native_long_side);
}

// Policy row: altitudes up to max_altitude_m map to bin_index (1-based).
struct PolicyBreakpoint {
    double max_altitude_m = 0.0;
    int bin_index = 1;
};

// Altitude -> bin mapping. The breakpoint table is data, not code; the
// shipped scaledV1/scaledV2 tables approximate the published policies and
// can be replaced wholesale from config. Altitudes past the last breakpoint
// fall back to the raw resolution law. tile_native bypasses scaling
// entirely (the static-tiling baseline).
struct ScalingPolicy {
    std::string name = "custom";
    bool tile_native = false;
    std::vector<PolicyBreakpoint> breakpoints;
    int fallback_bin_unknown_altitude = 6;
};

inline void validate(const ScalingPolicy& policy, const BinLadder& ladder) {
    double prev = 0.0;
    for (const auto& bp : policy.breakpoints) {
        if (!(bp.max_altitude_m > prev)) {
            throw DomainError("ScalingPolicy '" + policy.name + "': breakpoints must be sorted by altitude, strictly increasing");
        }
        prev = bp.max_altitude_m;
        ladder.bin_px(bp.bin_index); // range check
    }
    ladder.bin_px(policy.fallback_bin_unknown_altitude);
}

// Target long side for one capture. Where the policy table covers the
// altitude it decides the bin; beyond the table the resolution law decides;
// unknown altitude takes the fallback bin. The no-upscale rule applies in
// every branch.
inline int bin_for_capture(const CameraModel& camera, const RecognitionSpec& spec,
                           const ScalingPolicy& policy, const BinLadder& ladder) {
    const int native_long = camera.native_long_side();
    if (native_long <= 0) throw DomainError("bin_for_capture: camera native dimensions must be > 0");
    if (policy.tile_native) return native_long;
    validate(policy, ladder);
    if (!camera.altitude_m.has_value()) {
        return std::min(ladder.bin_px(policy.fallback_bin_unknown_altitude), native_long);
    }
    const double h = *camera.altitude_m;
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw DomainError("bin_for_capture: known altitude must be finite and > 0");
    }
    for (const auto& bp : policy.breakpoints) {
        if (h <= bp.max_altitude_m) {
            return std::min(ladder.bin_px(bp.bin_index), native_long);
        }
    }
    const int p_hat = required_resolution(h, camera.fov_deg, spec);
    return select_bin(p_hat, ladder, native_long);
}

// Shipped policies. The published per-row tables are not recoverable, so
// these follow the prose: V1 stays at 640 px up to 50 m then steps up about
// every 40 m; V2 starts stepping at 30 m, about every 30 m; baseline640
// forces everything into the lowest bin (the no-tiling baseline); static
// tiles the native resolution.
inline ScalingPolicy make_policy_scaled_v1(const BinLadder& ladder) {
    ScalingPolicy p;
    p.name = "scaledV1";
    p.fallback_bin_unknown_altitude = std::min(6, ladder.bin_count);
    const double alts[] = {50.0, 90.0, 130.0, 170.0, 210.0, 250.0};
    for (int i = 0; i < ladder.bin_count && i < 6; ++i) {
        p.breakpoints.push_back({alts[i], i + 1});
    }
    return p;
}

inline ScalingPolicy make_policy_scaled_v2(const BinLadder& ladder) {
    ScalingPolicy p;
    p.name = "scaledV2";
    p.fallback_bin_unknown_altitude = std::min(6, ladder.bin_count);
    const double alts[] = {30.0, 60.0, 90.0, 120.0, 150.0, 180.0};
    for (int i = 0; i < ladder.bin_count && i < 6; ++i) {
        p.breakpoints.push_back({alts[i], i + 1});
    }
    return p;
}

inline ScalingPolicy make_policy_baseline640(const BinLadder& ladder) {
    (void)ladder;
    ScalingPolicy p;
    p.name = "baseline640";
    p.breakpoints.push_back({1e9, 1});
    p.fallback_bin_unknown_altitude = 1;
    return p;
}

inline ScalingPolicy make_policy_static() {
    ScalingPolicy p;
    p.name = "static";
    p.tile_native = true;
    p.fallback_bin_unknown_altitude = 1;
    return p;
}

inline std::optional<ScalingPolicy> make_named_policy(const std::string& name, const BinLadder& ladder) {
    if (name == "scaledV1" || name == "scaledv1") return make_policy_scaled_v1(ladder);
    if (name == "scaledV2" || name == "scaledv2") return make_policy_scaled_v2(ladder);
    if (name == "baseline640") return make_policy_baseline640(ladder);
    if (name == "static") return make_policy_static();
    return std::nullopt;
}

} // namespace dss
