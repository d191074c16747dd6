#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>

#include "vlcsim/frontends.hpp"
#include "vlcsim/thresholder.hpp"

namespace vlcsim {

/// Thresholder settings that scale with the bitrate.
struct ThresholderSettings {
  double rc_bit_periods = 16.0;
  double propagation_delay_s = 0.0;
  double hysteresis_v = 0.0;
  double overdrive_delay_v_s = 0.0;
  double min_pulse_s = 0.0;

  ThresholderConfig for_bitrate(double bitrate_bps) const;
};

struct ReceiverParams {
  ReceiverKind kind = ReceiverKind::UltraLowPower;
  std::variant<SolarCellModel, TiaModel> front_end;
  ThresholderSettings thresholder;
  double power_w = 0.0;

  const TiaModel* tia() const { return std::get_if<TiaModel>(&front_end); }
  const SolarCellModel* solar_cell() const { return std::get_if<SolarCellModel>(&front_end); }
};

/// Integration unit: switch latencies, light sampler and MCU limits.
struct IntegrationParams {
  double power_on_latency_s = 60e-6;
  double mux_latency_s = 20e-9;
  double throughput_sample_interval_s = 1e-3;
  double sampler_energy_per_sample_j = 0.0;
  /// Highest line rate the MCU can demodulate on the UART path; none = no cap.
  std::optional<double> mcu_rate_cap_bps;
};

struct ModelParams {
  ReceiverParams ultra_low_power;
  ReceiverParams high_gain;
  ReceiverParams low_gain;
  IntegrationParams integration;

  const ReceiverParams& receiver(ReceiverKind kind) const;
  ReceiverParams& receiver(ReceiverKind kind);
  /// Throws ValidationError naming every offending key.
  void validate() const;
};

/// Calibrated defaults; identical to the checked-in parameter file.
ModelParams default_params();

std::string params_to_json(const ModelParams& params);
/// Throws ValidationError for unknown, missing or malformed keys.
ModelParams params_from_json(const std::string& text);

ModelParams load_params(const std::filesystem::path& path);
/// Writes via a temporary file and rename.
void save_params(const std::filesystem::path& path, const ModelParams& params);

/// Environment variable naming an alternative parameter file.
inline constexpr const char* kParamsEnvVar = "VLCSIM_PARAMS";

/// Explicit path, else $VLCSIM_PARAMS, else nothing (use the built-in defaults).
std::optional<std::filesystem::path> resolve_params_path(
    const std::optional<std::filesystem::path>& explicit_path);

/// Loads the resolved file, or returns default_params() when there is none.
ModelParams load_resolved_params(const std::optional<std::filesystem::path>& explicit_path);

/// Receiver power drawn by the ultra-low-power receiver: 2.4 V at 220 nA.
inline constexpr double kUltraLowPowerSupplyV = 2.4;
inline constexpr double kUltraLowPowerCurrentA = 220e-9;

}  // namespace vlcsim
