#include "lfaa/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lfaa/pyramid.hpp"

namespace lfaa {

void validate(const ScenePoint& p) {
    if (p.width <= 0.0) throw ValidationError("ScenePoint: width must be > 0");
    if (p.intensity <= 0.0 || p.intensity > 1.0)
        throw ValidationError("ScenePoint: intensity must be in (0, 1]");
    if (p.mod_depth < 0.0 || p.mod_depth >= 1.0)
        throw ValidationError("ScenePoint: mod_depth must be in [0, 1)");
    if (p.intensity * (1.0 + p.mod_depth) > 1.0 + 1e-12)
        throw ValidationError("ScenePoint: intensity*(1+mod_depth) exceeds 1");
    if (p.beta_over_z < 0.0) throw ValidationError("ScenePoint: beta_over_z must be >= 0");
    if (p.mod_depth > 0.0 && p.beta_over_z == 0.0)
        throw ValidationError("ScenePoint: modulation requires beta_over_z > 0");
}

namespace {

// Zero-mean band-limited signal: a few sinusoids with frequencies in
// (0, band] rad per view step, amplitudes normalized so |g| <= 1.
void fill_modulator(std::vector<double>& amp, std::vector<double>& freq,
                    std::vector<double>& phase, double band, uint32_t seed) {
    constexpr int M = 8;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ufreq(0.05 * band, band);
    std::uniform_real_distribution<double> uamp(0.5, 1.0);
    std::uniform_real_distribution<double> uphase(0.0, 2.0 * M_PI);
    amp.resize(M);
    freq.resize(M);
    phase.resize(M);
    double sum = 0.0;
    for (int j = 0; j < M; ++j) {
        amp[j] = uamp(rng);
        freq[j] = ufreq(rng);
        phase[j] = uphase(rng);
        sum += amp[j];
    }
    for (double& a : amp) a /= sum;
}

} // namespace

double SceneSampler::Modulator::eval(double p) const {
    double g = 0.0;
    for (size_t j = 0; j < amp.size(); ++j) g += amp[j] * std::cos(freq[j] * p + phase[j]);
    return g;
}

SceneSampler::SceneSampler(std::vector<ScenePoint> points, int views)
    : points_(std::move(points)), views_(views) {
    if (views_ < 1) throw ValidationError("SceneSampler: views must be >= 1");
    for (const auto& p : points_) validate(p);
    mods_.resize(points_.size());
    for (size_t i = 0; i < points_.size(); ++i)
        if (points_[i].mod_depth > 0.0)
            fill_modulator(mods_[i].amp, mods_[i].freq, mods_[i].phase,
                           points_[i].beta_over_z, points_[i].mod_seed);
}

double SceneSampler::operator()(double u, double p) const {
    const double center = 0.5 * views_;
    double val = 0.0;
    for (size_t i = 0; i < points_.size(); ++i) {
        const ScenePoint& pt = points_[i];
        const double du = u - (pt.u0 - pt.d * (p - center));
        const double cov = std::exp(-0.5 * du * du / (pt.width * pt.width));
        double c = pt.intensity;
        if (pt.mod_depth > 0.0) c *= 1.0 + pt.mod_depth * mods_[i].eval(p);
        val = val * (1.0 - cov) + c * cov; // painter's order, later on top
    }
    return val;
}

Epi render_epi(const std::vector<ScenePoint>& points, int views, int width) {
    if (width < 1) throw ValidationError("render_epi: width must be >= 1");
    SceneSampler sampler(points, views);
    Epi epi(views, width, {EpiKind::Synthetic, 0, 0});
    for (int s = 0; s < views; ++s)
        for (int u = 0; u < width; ++u) epi(s, u) = sampler(u, s);
    return epi;
}

std::pair<Epi, Epi> render_dense_oracle(const std::vector<ScenePoint>& points, int s_hr,
                                        int width, int alpha_s) {
    if (alpha_s < 1) throw ValidationError("render_dense_oracle: alpha_s must be >= 1");
    if ((s_hr + alpha_s - 1) % alpha_s != 0)
        throw ValidationError("render_dense_oracle: s_hr must equal alpha_s*S - (alpha_s-1)");
    const int s_lr = (s_hr + alpha_s - 1) / alpha_s;

    SceneSampler sampler(points, s_lr); // angular units of the coarse grid
    Epi hr(s_hr, width, {EpiKind::Synthetic, 0, 0});
    for (int f = 0; f < s_hr; ++f) {
        const double p = static_cast<double>(f) / alpha_s;
        for (int u = 0; u < width; ++u) hr(f, u) = sampler(u, p);
    }
    Epi lr(downsample_angular_nearest(hr.samples, alpha_s, 0), hr.provenance);
    return {std::move(lr), std::move(hr)};
}

std::vector<ScenePoint> analysis_scene() {
    std::vector<ScenePoint> pts;
    pts.push_back({14.0, -0.6, 0.85, 2.2, 0.0, 0.0, 0});       // A, Lambertian
    pts.push_back({30.0, 0.4, 0.70, 2.0, 0.5, 0.30, 7});       // B, non-Lambertian
    pts.push_back({46.0, 0.9, 0.60, 2.5, 0.0, 0.0, 0});        // C, Lambertian
    pts.push_back({58.0, 2.5, 0.90, 1.8, 0.0, 0.0, 0});        // D, larger disparity
    return pts;
}

namespace {

// Catmull-Rom value and running integral over uniform knots spanning [0, span].
class DisparityPath {
public:
    DisparityPath(std::vector<double> knots, double span) : k_(std::move(knots)) {
        if (k_.size() < 2)
            throw ValidationError("PseudoEpiSpec: need >= 2 disparity knots");
        if (span <= 0.0) throw ValidationError("DisparityPath: span must be > 0");
        h_ = span / (static_cast<double>(k_.size()) - 1.0);
        // cumulative integral at knot boundaries
        cum_.resize(k_.size(), 0.0);
        for (size_t i = 0; i + 1 < k_.size(); ++i)
            cum_[i + 1] = cum_[i] + segment_integral(static_cast<int>(i), 1.0);
    }

    double value(double p) const {
        int seg;
        double t;
        locate(p, seg, t);
        double c0, c1, c2, c3;
        coeffs(seg, c0, c1, c2, c3);
        return ((c3 * t + c2) * t + c1) * t + c0;
    }

    double integral(double p) const {
        int seg;
        double t;
        locate(p, seg, t);
        return cum_[seg] + segment_integral(seg, t);
    }

private:
    void locate(double p, int& seg, double& t) const {
        const double span = h_ * (static_cast<double>(k_.size()) - 1.0);
        p = std::clamp(p, 0.0, span);
        seg = std::min(static_cast<int>(p / h_), static_cast<int>(k_.size()) - 2);
        t = p / h_ - seg;
    }

    void coeffs(int seg, double& c0, double& c1, double& c2, double& c3) const {
        const int n = static_cast<int>(k_.size());
        const double p0 = k_[std::max(seg - 1, 0)];
        const double p1 = k_[seg];
        const double p2 = k_[seg + 1];
        const double p3 = k_[std::min(seg + 2, n - 1)];
        c0 = p1;
        c1 = 0.5 * (p2 - p0);
        c2 = 0.5 * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3);
        c3 = 0.5 * (-p0 + 3.0 * p1 - 3.0 * p2 + p3);
    }

    double segment_integral(int seg, double t) const {
        double c0, c1, c2, c3;
        coeffs(seg, c0, c1, c2, c3);
        return h_ * (((c3 * t / 4.0 + c2 / 3.0) * t + c1 / 2.0) * t + c0) * t;
    }

    std::vector<double> k_;
    double h_ = 1.0;
    std::vector<double> cum_;
};

class PseudoSampler {
public:
    PseudoSampler(const PseudoEpiSpec& spec, int views)
        : spec_(spec), path_(spec.disparity_knots, std::max(views - 1, 1)) {
        if (spec.width <= 0.0) throw ValidationError("PseudoEpiSpec: width must be > 0");
        if (spec.intensity <= 0.0 || spec.intensity > 1.0)
            throw ValidationError("PseudoEpiSpec: intensity must be in (0, 1]");
        if (spec.flicker_depth < 0.0 || spec.flicker_depth >= 1.0)
            throw ValidationError("PseudoEpiSpec: flicker_depth must be in [0, 1)");
        if (spec.intensity * (1.0 + spec.flicker_depth) > 1.0 + 1e-12)
            throw ValidationError("PseudoEpiSpec: intensity*(1+flicker_depth) exceeds 1");
        if (spec.flicker_depth > 0.0) {
            if (spec.flicker_band <= 0.0)
                throw ValidationError("PseudoEpiSpec: flicker requires flicker_band > 0");
            fill_modulator(amp_, freq_, phase_, spec.flicker_band, spec.seed);
        }
    }

    double operator()(double u, double p) const {
        const double du = u - (spec_.u0 - path_.integral(p));
        const double cov = std::exp(-0.5 * du * du / (spec_.width * spec_.width));
        double c = spec_.intensity;
        if (spec_.flicker_depth > 0.0) {
            double g = 0.0;
            for (size_t j = 0; j < amp_.size(); ++j)
                g += amp_[j] * std::cos(freq_[j] * p + phase_[j]);
            c *= 1.0 + spec_.flicker_depth * g;
        }
        return c * cov;
    }

private:
    PseudoEpiSpec spec_;
    DisparityPath path_;
    std::vector<double> amp_, freq_, phase_;
};

} // namespace

Epi render_pseudo_epi(const PseudoEpiSpec& spec, int views, int width) {
    if (views < 2) throw ValidationError("render_pseudo_epi: views must be >= 2");
    if (width < 1) throw ValidationError("render_pseudo_epi: width must be >= 1");
    PseudoSampler sampler(spec, views);
    Epi epi(views, width, {EpiKind::Pseudo, 0, 0});
    for (int s = 0; s < views; ++s)
        for (int u = 0; u < width; ++u) epi(s, u) = sampler(u, s);
    return epi;
}

std::pair<Epi, Epi> render_pseudo_dense_oracle(const PseudoEpiSpec& spec, int s_hr,
                                               int width, int alpha_s) {
    if (alpha_s < 1)
        throw ValidationError("render_pseudo_dense_oracle: alpha_s must be >= 1");
    if ((s_hr + alpha_s - 1) % alpha_s != 0)
        throw ValidationError(
            "render_pseudo_dense_oracle: s_hr must equal alpha_s*S - (alpha_s-1)");
    const int s_lr = (s_hr + alpha_s - 1) / alpha_s;

    PseudoSampler sampler(spec, s_lr);
    Epi hr(s_hr, width, {EpiKind::Pseudo, 0, 0});
    for (int f = 0; f < s_hr; ++f) {
        const double p = static_cast<double>(f) / alpha_s;
        for (int u = 0; u < width; ++u) hr(f, u) = sampler(u, p);
    }
    Epi lr(downsample_angular_nearest(hr.samples, alpha_s, 0), hr.provenance);
    return {std::move(lr), std::move(hr)};
}

TrainingSet make_training_set(const TrainingSetConfig& cfg) {
    if (cfg.count_regular < 0 || cfg.count_pseudo < 0)
        throw ValidationError("make_training_set: negative counts");
    if (cfg.input_views < 2)
        throw ValidationError("make_training_set: input_views must be >= 2");
    if (cfg.width < 8) throw ValidationError("make_training_set: width must be >= 8");
    if (cfg.alpha_s < 2) throw ValidationError("make_training_set: alpha_s must be >= 2");
    if (!(cfg.d_min <= cfg.d_max))
        throw ValidationError("make_training_set: d_min > d_max");
    if (cfg.nonlambertian_fraction < 0.0 || cfg.nonlambertian_fraction > 1.0)
        throw ValidationError("make_training_set: nonlambertian_fraction out of [0,1]");

    const int s_hr = cfg.alpha_s * cfg.input_views - (cfg.alpha_s - 1);

    TrainingSet set;
    set.phase1.reserve(cfg.count_regular);
    set.phase2.reserve(cfg.count_pseudo);

    for (int i = 0; i < cfg.count_regular; ++i) {
        std::mt19937_64 rng(cfg.seed * 1000003ULL + static_cast<uint64_t>(i));
        std::uniform_int_distribution<int> npts(1, 3);
        std::uniform_real_distribution<double> ud(cfg.d_min, cfg.d_max);
        std::uniform_real_distribution<double> uu(0.0, cfg.width);
        std::uniform_real_distribution<double> uw(1.5, 4.0);
        std::uniform_real_distribution<double> ui(0.3, 0.95);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        std::uniform_real_distribution<double> uband(0.2, 0.8);
        std::uniform_real_distribution<double> udepth(0.1, 0.3);

        std::vector<ScenePoint> pts;
        const int n = npts(rng);
        for (int j = 0; j < n; ++j) {
            ScenePoint p;
            p.d = ud(rng);
            p.u0 = uu(rng);
            p.width = uw(rng);
            p.intensity = ui(rng);
            if (u01(rng) < cfg.nonlambertian_fraction) {
                p.beta_over_z = uband(rng);
                p.mod_depth = udepth(rng);
                p.intensity = std::min(p.intensity, 1.0 / (1.0 + p.mod_depth) - 1e-9);
                p.mod_seed = static_cast<uint32_t>(rng());
            }
            pts.push_back(p);
        }
        std::vector<double> ds;
        for (const auto& p : pts) ds.push_back(p.d);
        auto [lr, hr] = render_dense_oracle(pts, s_hr, cfg.width, cfg.alpha_s);
        set.phase1.push_back({std::move(lr.samples), std::move(hr.samples), std::move(ds)});
    }

    for (int i = 0; i < cfg.count_pseudo; ++i) {
        std::mt19937_64 rng(cfg.seed * 2000003ULL + static_cast<uint64_t>(i));
        std::uniform_real_distribution<double> ud(cfg.d_min, cfg.d_max);
        std::uniform_real_distribution<double> uu(0.2 * cfg.width, 0.8 * cfg.width);
        std::uniform_real_distribution<double> uw(1.5, 4.0);
        std::uniform_real_distribution<double> ui(0.3, 0.95);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        std::uniform_real_distribution<double> uband(0.2, 0.8);
        std::uniform_real_distribution<double> udepth(0.1, 0.3);

        PseudoEpiSpec spec;
        spec.u0 = uu(rng);
        spec.width = uw(rng);
        spec.intensity = ui(rng);
        spec.disparity_knots = {ud(rng), ud(rng), ud(rng), ud(rng)};
        if (u01(rng) < cfg.nonlambertian_fraction) {
            spec.flicker_band = uband(rng);
            spec.flicker_depth = udepth(rng);
            spec.intensity = std::min(spec.intensity, 1.0 / (1.0 + spec.flicker_depth) - 1e-9);
            spec.seed = static_cast<uint32_t>(rng());
        }
        auto [lr, hr] = render_pseudo_dense_oracle(spec, s_hr, cfg.width, cfg.alpha_s);
        set.phase2.push_back(
            {std::move(lr.samples), std::move(hr.samples), spec.disparity_knots});
    }
    return set;
}

std::pair<LightField4D, LightField4D> render_light_field_oracle(
    const std::vector<ScenePoint4D>& points, int width, int height, int views_s,
    int views_t, int alpha_s) {
    if (alpha_s < 1)
        throw ValidationError("render_light_field_oracle: alpha_s must be >= 1");
    for (const auto& p : points) {
        if (p.width <= 0.0)
            throw ValidationError("ScenePoint4D: width must be > 0");
        if (p.intensity <= 0.0 || p.intensity > 1.0)
            throw ValidationError("ScenePoint4D: intensity must be in (0, 1]");
    }

    const int dense_s = alpha_s * views_s - (alpha_s - 1);
    const int dense_t = alpha_s * views_t - (alpha_s - 1);
    const double cs = 0.5 * views_s, ct = 0.5 * views_t;

    LightField4D dense(width, height, dense_s, dense_t);
    for (int g = 0; g < dense_t; ++g) {
        const double pt_ang = static_cast<double>(g) / alpha_s;
        for (int f = 0; f < dense_s; ++f) {
            const double ps_ang = static_cast<double>(f) / alpha_s;
            for (int v = 0; v < height; ++v)
                for (int u = 0; u < width; ++u) {
                    double val = 0.0;
                    for (const auto& p : points) {
                        const double du = u - (p.u0 - p.d * (ps_ang - cs));
                        const double dv = v - (p.v0 - p.d * (pt_ang - ct));
                        const double cov =
                            std::exp(-0.5 * (du * du + dv * dv) / (p.width * p.width));
                        val = val * (1.0 - cov) + p.intensity * cov;
                    }
                    dense.at(u, v, f, g) = val;
                }
        }
    }

    LightField4D sparse(width, height, views_s, views_t);
    for (int t = 0; t < views_t; ++t)
        for (int s = 0; s < views_s; ++s)
            for (int v = 0; v < height; ++v)
                for (int u = 0; u < width; ++u)
                    sparse.at(u, v, s, t) = dense.at(u, v, s * alpha_s, t * alpha_s);

    double dmin = 0.0, dmax = 0.0;
    for (const auto& p : points) {
        dmin = std::min(dmin, p.d);
        dmax = std::max(dmax, p.d);
    }
    sparse.disparity_hint() = DisparityRange(dmin, dmax);
    dense.disparity_hint() = DisparityRange(dmin / alpha_s, dmax / alpha_s);
    return {std::move(sparse), std::move(dense)};
}

} // namespace lfaa
