#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lfaa/epi.hpp"
#include "lfaa/grid.hpp"
#include "lfaa/light_field.hpp"

namespace lfaa {

// A scene point traces the line u = u0 - d * (p - S/2) through an EPI, with a
// Gaussian footprint of `width` pixels. beta_over_z > 0 adds multiplicative
// band-limited intensity modulation along the angular dimension.
struct ScenePoint {
    double u0 = 0.0;
    double d = 0.0;           // disparity, pixels per view step
    double intensity = 0.8;   // base luminance in (0, 1]
    double width = 1.2;       // Gaussian footprint, pixels
    double beta_over_z = 0.0; // modulation band width, radians per view step
    double mod_depth = 0.0;   // modulation amplitude in [0, 1)
    uint32_t mod_seed = 0;
};

void validate(const ScenePoint& p);

// Continuous-coordinate renderer: ground truth exists at fractional views.
// Angular position p is measured in the coarse view units of an S-view EPI
// centered at S/2. Points composite in painter's order (later on top).
class SceneSampler {
public:
    SceneSampler(std::vector<ScenePoint> points, int views);
    double operator()(double u, double p) const;
    int views() const { return views_; }

private:
    struct Modulator {
        std::vector<double> amp, freq, phase;
        double eval(double p) const;
    };
    std::vector<ScenePoint> points_;
    std::vector<Modulator> mods_;
    int views_;
};

Epi render_epi(const std::vector<ScenePoint>& points, int views, int width);

// (LR, HR) pair from the same continuous sampler: HR has s_hr views on the
// fine grid, LR = downsample_angular_nearest(HR, alpha_s, 0). Requires
// s_hr = alpha_s*S_lr - (alpha_s - 1).
std::pair<Epi, Epi> render_dense_oracle(const std::vector<ScenePoint>& points, int s_hr,
                                        int width, int alpha_s);

// The Fig-2-style analysis scene: three Lambertian points with small
// disparities, one with larger disparity, one non-Lambertian. Parameter
// values are illustrative.
std::vector<ScenePoint> analysis_scene();

// Pseudo EPI: curved trajectory u = u0 - integral of d(p), plus band-limited
// intensity flicker. Disparity knots are Catmull-Rom interpolated across the
// angular range.
struct PseudoEpiSpec {
    double u0 = 0.0;
    double intensity = 0.8;
    double width = 1.5;
    std::vector<double> disparity_knots; // >= 2 values, spread over [0, S-1]
    double flicker_band = 0.0;  // beta', radians per view step
    double flicker_depth = 0.0; // in [0, 1)
    uint32_t seed = 0;
};

Epi render_pseudo_epi(const PseudoEpiSpec& spec, int views, int width);
std::pair<Epi, Epi> render_pseudo_dense_oracle(const PseudoEpiSpec& spec, int s_hr,
                                               int width, int alpha_s);

struct PatchPair {
    Grid2D input;                   // input_views x width
    Grid2D label;                   // label_views x width
    std::vector<double> disparities; // per scene point (knots for pseudo patches)
};

struct TrainingSetConfig {
    int count_regular = 512;
    int count_pseudo = 0;
    int input_views = 6;
    int width = 72;
    int alpha_s = 3; // label views = alpha_s*input - (alpha_s - 1)
    double d_min = -3.0;
    double d_max = 3.0;
    double nonlambertian_fraction = 0.0;
    uint64_t seed = 1;
};

struct TrainingSet {
    std::vector<PatchPair> phase1; // regular synthetic EPIs
    std::vector<PatchPair> phase2; // pseudo EPIs
};

TrainingSet make_training_set(const TrainingSetConfig& cfg);

// 4D analogue of ScenePoint for oracle light fields.
struct ScenePoint4D {
    double u0 = 0.0, v0 = 0.0;
    double d = 0.0;
    double intensity = 0.8;
    double width = 1.2;
};

// (sparse, dense) oracle light fields sharing one continuous parameterization;
// dense has alpha_s*n - (alpha_s - 1) views per axis.
std::pair<LightField4D, LightField4D> render_light_field_oracle(
    const std::vector<ScenePoint4D>& points, int width, int height, int views_s,
    int views_t, int alpha_s);

} // namespace lfaa
