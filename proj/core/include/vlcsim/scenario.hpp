#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vlcsim/channel.hpp"
#include "vlcsim/link.hpp"
#include "vlcsim/params.hpp"
#include "vlcsim/switching.hpp"
#include "vlcsim/transmitter.hpp"

namespace vlcsim {

/// A runnable experiment: transmitter, channel, receiver choice and protocol.
///
/// The ON level seen by the receiver may vary over time through
/// `incident_lux`; it is turned into a channel attenuation relative to
/// `tx.on_lux` when the link is built.
struct Scenario {
  std::string name;
  std::string description;
  TxConfig tx;
  ChannelConfig channel;
  std::optional<LuxTrace> incident_lux;
  std::optional<ReceiverKind> receiver = ReceiverKind::HighGain;  // none = switched
  SwitchPolicy policy;
  int rounds = 3;
  int packets_per_round = 50;
  int packet_len = 256;
  std::optional<double> duration_s;
  std::uint64_t seed = 1;
  int samples_per_bit = 16;
  double ber_window_s = 0.25;
  double snr_window_s = 0.1;

  /// Throws ValidationError naming every offending key.
  void validate() const;
};

/// Parses the scenario file format. Unknown keys are rejected; every
/// problem is reported in one ValidationError.
Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& scenario);
Scenario load_scenario(const std::filesystem::path& path);

/// Builds the link description for a scenario under the given model.
LinkSetup link_setup(const Scenario& scenario, const ModelParams& params);

/// Validates and simulates. Deterministic for a fixed seed.
LinkMetrics run_scenario(const Scenario& scenario, const ModelParams& params);

/// Writes `<out_dir>/<scenario.name>/` with metrics.csv, ber_windows.csv,
/// snr.csv, switch_events.csv and config.json (scenario plus model). The
/// directory is assembled under a temporary name and renamed into place.
/// Returns the directory written.
std::filesystem::path write_results(const std::filesystem::path& out_dir,
                                    const Scenario& scenario, const ModelParams& params,
                                    const LinkMetrics& metrics);

/// Column sets of the result CSVs.
inline constexpr const char* kMetricsCsvHeader =
    "scenario,receiver,bitrate_bps,framing,ber,bit_errors,payload_bits,packets_lost,"
    "framing_errors,duration_s,throughput_bps,payload_efficiency,energy_j,sampler_energy_j,"
    "energy_per_bit_j,switch_events,aborted";
inline constexpr const char* kBerWindowsCsvHeader = "start_s,end_s,ber,bits";
inline constexpr const char* kSnrCsvHeader = "time_s,snr_db";

void write_metrics_csv(std::ostream& out, const Scenario& scenario, const LinkMetrics& metrics);
void write_ber_windows_csv(std::ostream& out, const LinkMetrics& metrics);
void write_snr_csv(std::ostream& out, const LinkMetrics& metrics);

struct PresetInfo {
  std::string name;
  std::string description;
  std::filesystem::path path;
};

/// Preset scenarios shipped with the project, sorted by name. `dir` defaults
/// to the installed scenario directory.
std::vector<PresetInfo> list_presets(const std::optional<std::filesystem::path>& dir = {});
std::filesystem::path default_scenario_dir();

/// A scenario file path, or the name of a preset in the scenario directory.
Scenario load_scenario_or_preset(const std::string& path_or_name,
                                 const std::optional<std::filesystem::path>& dir = {});

}  // namespace vlcsim
