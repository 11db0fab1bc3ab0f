#pragma once

#include <complex>
#include <optional>
#include <ostream>
#include <vector>

#include "lfaa/epi.hpp"
#include "lfaa/grid.hpp"

namespace lfaa {

// All frequencies are in radians per sample/view step: omega in [-pi, pi].

// Line spectral support d*Omega_u + Omega_s = +-beta/Z.
struct SpectralSupport {
    double d = 0.0;    // disparity, pixels per view step
    double beta = 0.0; // band width of the non-Lambertian signal, >= 0
    double z = 1.0;    // depth, > 0

    SpectralSupport() = default;
    SpectralSupport(double d_, double beta_, double z_) : d(d_), beta(beta_), z(z_) {
        if (beta < 0.0) throw ValidationError("SpectralSupport: beta must be >= 0");
        if (z <= 0.0) throw ValidationError("SpectralSupport: Z must be > 0");
    }
    double ratio() const { return beta / z; } // only the quotient ever matters
    bool lambertian() const { return beta == 0.0; }
};

// Centered 2D DFT of an EPI. Row r maps to omega_s = 2*pi*(r - rows/2)/rows,
// column c to omega_u = 2*pi*(c - cols/2)/cols. Raw (unnormalized) DFT values;
// total_energy() carries the 1/(S*U) Parseval factor.
class Spectrum {
public:
    Spectrum(int rows, int cols)
        : rows_(rows), cols_(cols), v_(static_cast<size_t>(rows) * cols) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    std::complex<double>& at(int r, int c) { return v_[static_cast<size_t>(r) * cols_ + c]; }
    std::complex<double> at(int r, int c) const {
        return v_[static_cast<size_t>(r) * cols_ + c];
    }

    double omega_s(int r) const { return 2.0 * M_PI * (r - rows_ / 2) / rows_; }
    double omega_u(int c) const { return 2.0 * M_PI * (c - cols_ / 2) / cols_; }

    double magnitude(int r, int c) const { return std::abs(at(r, c)); }
    // log(1 + |F|), the usual visualization transform
    Grid2D log_magnitude() const;
    double total_energy() const; // sum |F|^2 / (S*U); equals image energy

private:
    int rows_, cols_;
    std::vector<std::complex<double>> v_;
};

Spectrum epi_spectrum(const Epi& epi);

struct ReplicaLine {
    int k = 0;        // replica index, never 0
    double offset = 0.0; // Omega_s offset 2*pi*k/step
    double band = 0.0;   // +- beta/Z around the line
};

// Replica supports d*Omega_u + Omega_s = 2*pi*k/step +- beta/Z that intersect
// the base band Omega_s in [-pi, pi].
std::vector<ReplicaLine> predict_replicas(const SpectralSupport& support, int angular_step);

// §6.5 criterion: the expansionary spectra overlap their replicas once the
// angular step exceeds pi*Z/beta + 1 (beta > 0 only).
bool expansion_overlap(const SpectralSupport& support, int angular_step);

struct AliasingReport {
    double omega_u_pa = 0.0; // |Omega_u| of the reference alias P_a, radians
    double omega_s_pa = 0.0;
    double amplitude = 0.0;  // |F_{E_LR}(P_a)|
    int replica_index = 0;   // k of the replica containing P_a (0 only when clean)
    bool overlap_detected = false;
    bool clean = false;      // no alias energy above the noise floor
};

// Locates P_a: the bin of the k != 0 replica with minimal |Omega_u| whose
// magnitude exceeds the noise floor (1% of the peak non-DC magnitude). The
// scan runs along the Omega_s = 0 row, where replica k of an EPI with
// effective slope d*step crosses at Omega_u = 2*pi*k/(d*step).
AliasingReport locate_reference_alias(const Spectrum& spectrum,
                                      const SpectralSupport& support, int angular_step);

struct PrefilterSpec {
    double sigma = 0.0; // shape parameter (cycles convention; tap std is 2*pi*sigma)
    double gamma = 0.0; // baseline amplitude
    std::vector<double> taps; // odd length, symmetric, non-negative, sums to 1

    int half_width() const { return (static_cast<int>(taps.size()) - 1) / 2; }
};

// taps[u] = exp(-u^2/(2 sigma^2)), normalized to sum 1, u in [-half_width, half_width].
// sigma = 0 yields the unit impulse. sigma here is the tap-domain std.
std::vector<double> gaussian_kernel(double sigma, int half_width);

// Closed-form shape parameter: sigma = sqrt(ln(max(A/gamma,1)) / (2 pi^2 W^2))
// with W = alpha_u * omega_u_pa the post-downscale alias frequency in radians.
// The designed kernel's frequency response is exp(-2 pi^2 sigma^2 omega^2), so
// a sinusoid at W is attenuated to gamma/A. Throws NumericalError when the
// alias sits at DC with amplitude above gamma (unfilterable, §6.5 regime).
PrefilterSpec design_prefilter(const AliasingReport& report, double gamma, double alpha_u);

struct SigmaAlphaTable {
    std::vector<double> gammas;
    std::vector<double> alpha_us;
    std::vector<std::vector<double>> sigma; // [gamma index][alpha_u index]

    void to_csv(std::ostream& os) const; // columns: gamma, alpha_u, sigma
};

SigmaAlphaTable sigma_alpha_curve(const AliasingReport& report,
                                  const std::vector<double>& gammas,
                                  const std::vector<double>& alpha_us);

// 1D convolution along u with edge replication.
Grid2D convolve_u(const Grid2D& x, const std::vector<double>& taps);

// Slope with maximal spectral line energy, refined by parabolic interpolation.
// Requires >= 4 views. Flat spectra yield nullopt. Ties go to smaller |d|.
std::optional<double> estimate_dominant_disparity(const Epi& epi);

} // namespace lfaa
