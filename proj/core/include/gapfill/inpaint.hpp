// inpaint.hpp  Network-based gap restoration: predict, reassemble, resynthesize.
//
// Copyright (C) 2026 the gapfill authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include "gapfill/network.hpp"
#include "gapfill/phase_retrieval.hpp"

namespace gapfill::nn {

// Restores the whole excerpt (spec.total_len samples). The complex variant
// synthesizes the predicted Re/Im grid directly; the magnitude variant runs
// phase retrieval on the assembled magnitude grid, with the known context
// coefficients clamped (unless retrieval.clamp_context is off).
AudioBuffer inpaint(Network& net, const Segment& seg, const STFTParams& params,
                    const RetrievalConfig& retrieval);

// The predicted gap-region coefficient grid before synthesis (complex
// variant) or the predicted magnitudes promoted to a grid with zero phase
// (magnitude variant). Mostly useful for inspection and tests.
TFMatrix predict_gap_grid(Network& net, const Segment& seg,
                          const STFTParams& params);

}  // namespace gapfill::nn
