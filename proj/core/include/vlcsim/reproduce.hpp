#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "vlcsim/link.hpp"
#include "vlcsim/params.hpp"

namespace vlcsim {

/// Shared knobs for every experiment.
struct ExperimentOptions {
  ModelParams params = default_params();
  std::uint64_t seed = 1;
  int samples_per_bit = 16;
  std::function<void(const std::string&)> log;
};

// --- sensitivity table ------------------------------------------------------

struct SensitivityCell {
  double lux;
  ReceiverKind receiver;
  std::optional<double> stated_bps;  // none: the receiver is listed as unusable
  double achieved_bps;               // highest passing grid rate
  double probe_bps;                  // rate the BER below was measured at
  double probe_ber;
  bool ok;
};

/// Light levels of the table rows; the "< 4 lx" row is measured at 3 lx.
std::vector<double> sensitivity_rows();
/// Stated entry for a cell, none for "-".
std::optional<double> sensitivity_entry(double lux, ReceiverKind receiver);
/// Lowest stated rate of the receiver (probe rate of its "-" cells).
double lowest_stated_rate(ReceiverKind receiver);

/// Rows x receivers. A stated cell is ok when that rate decodes at 1e-3 and
/// the highest passing grid rate is within one grid factor of it; a "-" cell
/// is ok when the receiver's lowest stated rate exceeds BER 1e-2 there.
std::vector<SensitivityCell> sensitivity_table(const ExperimentOptions& opt);

// --- rate sweeps ------------------------------------------------------------

struct SweepPoint {
  std::string series;
  double ambient_lux;
  double incident_lux;
  double bitrate_bps;
  double ber;
  double throughput_bps;
  std::size_t framing_errors;
};

/// BER and throughput against transmitter rate for every (ambient, incident)
/// pair, darkness protocol otherwise.
std::vector<SweepPoint> rate_sweep(ReceiverKind receiver, Framing framing,
                                   const std::vector<double>& ambient_lux,
                                   const std::vector<double>& incident_lux,
                                   const std::vector<double>& rates, const ExperimentOptions& opt);

// --- solar cell response ----------------------------------------------------

struct SwingPoint {
  double bitrate_bps;
  double peak_to_peak_v;
};

/// Settled peak-to-peak output of the noiseless solar cell for an
/// alternating 1/0 pattern at `on_lux`.
std::vector<SwingPoint> solar_cell_swing(const SolarCellModel& cell, double on_lux,
                                         const std::vector<double>& rates);

// --- gain sweep -------------------------------------------------------------

struct GainPoint {
  double rf_ohm;
  double min_operating_lux;
  double saturation_lux;
};

/// High-speed receiver with a feedback resistor between the two gain
/// settings; every other parameter is interpolated in log(rf), and held at
/// the nearer setting for rf outside the two.
ReceiverParams interpolate_gain(const ModelParams& params, double rf_ohm);

std::vector<GainPoint> gain_sweep(const std::vector<double>& rf_ohm, double bitrate_bps,
                                  const ExperimentOptions& opt);

/// True when a steady ON level drives the TIA output onto the rail.
bool tia_saturates(const TiaModel& model, double lux);

// --- switching ----------------------------------------------------------------

struct WindowSeries {
  std::string series;
  std::vector<WindowPoint> windows;
  std::size_t bit_errors;
  std::size_t payload_bits;
  std::vector<SwitchEvent> switch_events;
};

/// Square light trace between `lo_lux` and `hi_lux` in darkness at
/// `bitrate_bps`: each fixed receiver, then the switched link.
std::vector<WindowSeries> square_trace_runs(double lo_lux, double hi_lux, int transitions,
                                            double duration_s, double bitrate_bps,
                                            const std::vector<std::optional<ReceiverKind>>& runs,
                                            const ExperimentOptions& opt);

struct ResponsePoint {
  double sample_hz;
  double mean_s;
  double min_s;
  double max_s;
  int trials;      // steps that produced a response
  double expected_s;  // expected_response_s at the same rate
};

/// Bright-to-dark step under the energy goal; the sampler phase relative to
/// the step is drawn uniformly per trial.
std::vector<ResponsePoint> response_times(const std::vector<double>& sample_hz, int trials,
                                          const ExperimentOptions& opt);

/// Mean response predicted for a step uniformly placed against both the
/// sampler and the packet stream: the wait for the next tick plus the switch
/// latency, or, when a packet starts before the new receiver is on, the wait
/// for the following packet's payload.
double expected_response_s(double sample_hz, const ModelParams& params, double bitrate_bps);

// --- CSV output -------------------------------------------------------------

inline constexpr const char* kSweepCsvHeader =
    "series,ambient_lux,incident_lux,bitrate_bps,ber,throughput_bps,framing_errors";
inline constexpr const char* kWindowSeriesCsvHeader = "series,start_s,end_s,ber,bits";
inline constexpr const char* kSwingCsvHeader = "bitrate_bps,peak_to_peak_v";
inline constexpr const char* kGainCsvHeader = "rf_ohm,min_operating_lux,saturation_lux";
inline constexpr const char* kResponseCsvHeader =
    "sample_hz,mean_response_s,min_response_s,max_response_s,trials,expected_s";
inline constexpr const char* kSensitivityCsvHeader =
    "lux,receiver,stated_bps,achieved_bps,probe_bps,probe_ber,ok";

void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> pts);
void write_window_series_csv(std::ostream& out, std::span<const WindowSeries> runs);
void write_swing_csv(std::ostream& out, std::span<const SwingPoint> pts);
void write_gain_csv(std::ostream& out, std::span<const GainPoint> pts);
void write_response_csv(std::ostream& out, std::span<const ResponsePoint> pts);
/// A "-" cell leaves stated_bps empty.
void write_sensitivity_csv(std::ostream& out, std::span<const SensitivityCell> cells);

// --- figure registry ----------------------------------------------------------

std::vector<std::string> figure_ids();

/// Runs the experiment behind `figure_id` and writes its CSV files into
/// `out_dir`. Throws std::invalid_argument listing the valid ids for an
/// unknown one. Returns the files written.
std::vector<std::filesystem::path> reproduce(const std::string& figure_id,
                                             const std::filesystem::path& out_dir,
                                             const ExperimentOptions& opt);

}  // namespace vlcsim
