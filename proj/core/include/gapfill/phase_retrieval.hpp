// phase_retrieval.hpp  Phase estimation from magnitude-only coefficients:
// phase gradient heap integration seeding momentum-accelerated Griffin-Lim.
//
// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gapfill/stft.hpp"

namespace gapfill {

struct MagnitudeGrid {
  int n_bins = 0;
  int n_frames = 0;
  int frame_origin = 0;
  std::vector<double> mags;  // bin-major, nonnegative
  STFTParams params;

  static MagnitudeGrid zeros(const STFTParams& params, int n_frames,
                             int frame_origin = 0);
  static MagnitudeGrid from_tf(const TFMatrix& tf);

  double& at(int bin, int frame) {
    return mags[static_cast<size_t>(bin) * n_frames + frame];
  }
  double at(int bin, int frame) const {
    return mags[static_cast<size_t>(bin) * n_frames + frame];
  }
};

struct RetrievalConfig {
  int fgl_iterations = 100;
  double fgl_momentum = 0.99;
  // Bins below this fraction of the peak magnitude get random phase.
  double pghi_rel_tolerance = 1e-7;
  // Gaussian-equivalent time-frequency ratio of the Hann window,
  // gamma = pghi_gamma_scale * M^2.
  double pghi_gamma_scale = 0.17937;
  uint64_t random_phase_seed = 0x9e3779b97f4a7c15ull;
  bool clamp_context = true;

  void validate() const;
};

// Frames whose complex coefficients are known exactly (the context) and are
// reimposed inside every magnitude projection.
struct FrameClamp {
  std::vector<uint8_t> known;  // per frame, size n_frames
  TFMatrix values;             // same grid shape; only known columns are read
};

// Phase estimate (bin-major, radians) by integrating magnitude-derived phase
// gradients in order of decreasing magnitude. All-zero input yields zeros.
std::vector<double> pghi(const MagnitudeGrid& mag, const RetrievalConfig& config);

// Alternating projection between the magnitude constraint and the set of
// consistent STFTs, accelerated: c_n = P_cons(P_mag(t_n)),
// t_{n+1} = c_n + momentum*(c_n - c_{n-1}). Returns the final
// magnitude-projected iterate. momentum = 0 gives the classical iteration.
TFMatrix fast_griffin_lim(const MagnitudeGrid& mag,
                          const std::vector<double>& init_phase,
                          const RetrievalConfig& config,
                          const FrameClamp* clamp = nullptr);

// PGHI initialization followed by fast Griffin-Lim refinement.
TFMatrix reconstruct_from_magnitude(const MagnitudeGrid& mag,
                                    const RetrievalConfig& config,
                                    const FrameClamp* clamp = nullptr);

// Replace moduli by mag, keeping phases (clamped frames get known values).
TFMatrix project_magnitude(const TFMatrix& c, const MagnitudeGrid& mag,
                           const FrameClamp* clamp = nullptr);

// stft(istft(c)) on c's own frame grid: orthogonal projection onto the set
// of consistent coefficient arrays.
TFMatrix project_consistent(const TFMatrix& c);

// || |P_cons(c)| - mag || / ||mag||, with conjugate-symmetry weights.
double spectral_convergence(const TFMatrix& c, const MagnitudeGrid& mag);

}  // namespace gapfill
