// SPDX-License-Identifier: Apache-2.0
//
// satee: energy-efficient multicast precoding for multibeam satellite downlinks

#pragma once

#include <Eigen/Dense>

#include "satee/channel.hpp"
#include "satee/types.hpp"

namespace satee {

/// Classical one-shot precoders used as comparison points.
enum class Baseline {
  rzf,   ///< regularized channel inversion on the beam-representative rows
  mmse,  ///< same closed form with the MMSE-motivated regularizer; with the
         ///< default regularizer this coincides with rzf (kept as a separate
         ///< label so sweeps report both reference curves)
  mbim,  ///< per-beam interference-nulling directions plus a gain-inversion
         ///< power sweep tuned for the worst user ("MBIM-style")
};

const char* baseline_label(Baseline b);

/// One row per beam: the average of the beam's non-virtual channel rows; all
/// zeros for beams whose users are all virtual.
Eigen::MatrixXcd representative_rows(const ChannelMatrix& h);

/// Builds the requested baseline, scaled so the total transmit power equals
/// params.p_t_watts exactly. `regularization` < 0 selects the default
/// N * sigma2 / P_T used by both rzf and mmse.
PrecodingMatrix baseline_precoder(const ChannelMatrix& h,
                                  const SystemParams& params, Baseline kind,
                                  double regularization = -1.0);

}  // namespace satee
