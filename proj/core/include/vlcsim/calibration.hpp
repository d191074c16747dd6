#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "vlcsim/frontends.hpp"
#include "vlcsim/params.hpp"
#include "vlcsim/transmitter.hpp"

namespace vlcsim {

/// What a calibration point must show under the full measurement protocol.
enum class Expectation {
  Decodes,   // BER <= 1e-3
  Fails,     // BER > 1e-3
  Dark,      // BER > 1e-2
};

/// One (receiver, light level, rate) point the model has to reproduce.
/// Light is the incident ON level in darkness.
struct CalibrationTarget {
  ReceiverKind receiver;
  double lux;
  double bitrate_bps;
  Expectation expect;
  Framing framing = Framing::RawOok;

  std::string name() const;
};

/// Sensitivity table cells, their one-step upper neighbours, dark cells and
/// the throughput ceilings.
std::vector<CalibrationTarget> default_targets();

struct TargetOutcome {
  CalibrationTarget target;
  double ber;  // lower bound when the run stopped early
  bool met;
};

/// Runs the protocol (3 rounds x 50 packets x 256 bytes) at every target.
std::vector<TargetOutcome> check_targets(const ModelParams& params,
                                         std::span<const CalibrationTarget> targets);

struct CalibrationOptions {
  /// Upper bound on protocol runs spent fitting.
  int max_evaluations = 2000;
  /// Progress messages; may be empty.
  std::function<void(const std::string&)> log;
};

struct CalibrationReport {
  ModelParams params;
  std::vector<TargetOutcome> outcomes;
  bool changed = false;
  int evaluations = 0;
};

/// Returns `start` untouched when every target is already met. Otherwise
/// adjusts the comparator and noise parameters of the failing receivers by
/// coordinate search within fixed physical bounds.
///
/// Throws CalibrationError naming each target that is out of reach: ones
/// the front-end cannot meet at any parameter value inside the bounds (signal
/// below the noise floor, above saturation) are rejected before any search,
/// the rest after the search gives up.
CalibrationReport calibrate(const ModelParams& start, std::span<const CalibrationTarget> targets,
                            const CalibrationOptions& options = {});

/// CSV `target,receiver,lux,bitrate_bps,framing,expect,ber,met`.
void write_calibration_csv(std::ostream& out, std::span<const TargetOutcome> outcomes);

}  // namespace vlcsim
