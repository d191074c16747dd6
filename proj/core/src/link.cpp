#include "vlcsim/link.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

#include "vlcsim/demodulator.hpp"
#include "vlcsim/errors.hpp"
#include "vlcsim/random.hpp"

namespace vlcsim {

ReceiverChain::ReceiverChain(const ReceiverParams& params, double bitrate_bps,
                             double sample_rate_hz, std::uint64_t noise_seed, bool cold_start)
    : front_end_(params.solar_cell()
                     ? std::variant<SolarCellFrontEnd, TiaFrontEnd>(
                           std::in_place_type<SolarCellFrontEnd>, *params.solar_cell(),
                           sample_rate_hz, noise_seed)
                     : std::variant<SolarCellFrontEnd, TiaFrontEnd>(
                           std::in_place_type<TiaFrontEnd>, *params.tia(), sample_rate_hz,
                           noise_seed, cold_start)),
      thresholder_(params.thresholder.for_bitrate(bitrate_bps), sample_rate_hz) {}

void ReceiverChain::process(std::span<const double> lux, std::span<Bit> digital) {
  if (volts_.size() < lux.size()) volts_.resize(lux.size());
  const std::span<double> volts(volts_.data(), lux.size());
  std::visit([&](auto& fe) { fe.process(lux, volts); }, front_end_);
  thresholder_.process(volts, digital);
}

void LinkSetup::validate() const {
  std::vector<std::string> bad;
  try {
    tx.validate();
  } catch (const ValidationError& e) {
    for (const auto& k : e.keys()) bad.push_back("tx." + k);
  }
  try {
    channel.validate();
  } catch (const ValidationError& e) {
    for (const auto& k : e.keys()) bad.push_back("channel." + k);
  }
  try {
    policy.validate();
  } catch (const ValidationError& e) {
    for (const auto& k : e.keys()) bad.push_back("policy." + k);
  }
  try {
    params.validate();
  } catch (const ValidationError& e) {
    for (const auto& k : e.keys()) bad.push_back("params." + k);
  }
  if (samples_per_bit < 2) bad.emplace_back("oversampling");
  if (rounds < 1) bad.emplace_back("rounds");
  if (packets_per_round < 1) bad.emplace_back("packets_per_round");
  if (packet_len < 1) bad.emplace_back("packet_len");
  if (duration_s && !(*duration_s > 0.0)) bad.emplace_back("duration_s");
  if (!(ber_window_s > 0.0)) bad.emplace_back("ber_window_s");
  if (!(snr_window_s > 0.0)) bad.emplace_back("snr_window_s");
  if (!(snr_noise_floor_lux > 0.0)) bad.emplace_back("snr_noise_floor_lux");
  if (!(sampler_phase_s >= 0.0)) bad.emplace_back("sampler_phase_s");
  if (!bad.empty()) throw ValidationError(std::move(bad));
}

PowerModel power_model(const ModelParams& params) {
  return {params.ultra_low_power.power_w,
          std::max(params.high_gain.power_w, params.low_gain.power_w)};
}

std::vector<double> rate_grid(double lowest_bps, double highest_bps, double step) {
  if (!(lowest_bps > 0.0) || !(step > 1.0)) throw std::invalid_argument("rate_grid: bad arguments");
  std::vector<double> rates;
  for (int n = 0;; ++n) {
    const double r = lowest_bps * std::pow(step, n);
    if (r > highest_bps * (1.0 + 1e-12)) break;
    rates.push_back(r);
  }
  return rates;
}

namespace {

constexpr std::uint8_t kNoSource = 0xFF;
constexpr std::size_t kLeadBits = 16;
constexpr std::size_t kTailBits = 32;

std::size_t index_of(ReceiverKind k) { return static_cast<std::size_t>(k); }

class LinkEngine {
 public:
  LinkEngine(const LinkSetup& setup, bool switched)
      : s_(setup),
        switched_(switched),
        fs_(setup.sample_rate_hz()),
        spb_(static_cast<std::size_t>(setup.samples_per_bit)),
        uart_(setup.tx.framing == Framing::Uart),
        table_(operating_table()),
        power_(power_model(setup.params)),
        ber_windows_(setup.ber_window_s),
        snr_(setup.snr_window_s, setup.snr_noise_floor_lux) {
    setup.validate();
    if (switched_) {
      // The ultra-low-power receiver is always on, but its chain only needs
      // simulating if it can ever be selected at this bitrate.
      for (const auto& r : table_) {
        if (r.receiver == ReceiverKind::UltraLowPower) {
          for (const auto& e : r.entries) {
            if (e.max_throughput_bps >= s_.tx.bitrate_bps) simulate_ulp_ = true;
          }
        }
      }
    }
  }

  LinkMetrics run() {
    const int rounds = s_.duration_s ? 1 : s_.rounds;
    double t_offset = 0.0;
    for (int round = 0; round < rounds && !m_.aborted; ++round) {
      t_offset += run_round(round, t_offset);
    }
    m_.duration_s = t_offset;
    const std::size_t correct = m_.payload_bits - m_.bit_errors;
    m_.ber = m_.payload_bits ? static_cast<double>(m_.bit_errors) / static_cast<double>(m_.payload_bits) : 0.0;
    m_.throughput_bps = t_offset > 0.0 ? static_cast<double>(correct) / t_offset : 0.0;
    m_.energy_per_bit_j = correct ? m_.energy_j / static_cast<double>(correct)
                                  : std::numeric_limits<double>::infinity();
    m_.payload_efficiency = uart_ ? 8.0 / static_cast<double>(uart_frame_bits(s_.tx))
                                  : static_cast<double>(8 * s_.packet_len) /
                                        static_cast<double>(8 * s_.packet_len + default_preamble().size());
    if (!s_.summary_only) {
      m_.windowed_ber = ber_windows_.finish(t_offset);
      m_.snr = snr_.finish();
    }
    return std::move(m_);
  }

 private:
  // Per-round state ---------------------------------------------------------
  struct Slot {
    std::unique_ptr<ReceiverChain> chain;
    double on_since_s = 0.0;
  };

  double run_round(int round, double t_offset) {
    t_offset_ = t_offset;
    round_ = static_cast<std::uint64_t>(round);
    const double bitrate = s_.tx.bitrate_bps;

    const std::size_t frame_bits = uart_frame_bits(s_.tx);
    const std::size_t preamble_bits = default_preamble().size();
    const std::size_t packet_line = uart_ ? static_cast<std::size_t>(s_.packet_len) * frame_bits
                                          : preamble_bits + 8 * static_cast<std::size_t>(s_.packet_len);
    int n_packets = s_.packets_per_round;
    if (s_.duration_s) {
      const double bits = *s_.duration_s * bitrate - static_cast<double>(kLeadBits);
      n_packets = std::max(1, static_cast<int>(std::ceil(bits / static_cast<double>(packet_line))));
    }
    packets_ = build_test_payload(derive_seed(s_.seed, {round_}), n_packets, s_.packet_len);

    lead_samples_ = (kLeadBits + (uart_ ? 2 : 0)) * spb_;
    packet_samples_ = packet_line * spb_;
    buf_base_ = 0;
    dig_.clear();
    src_.clear();
    next_packet_ = 0;
    for (auto& slot : slots_) slot = Slot{};
    active_.reset();
    active_from_ = 0;
    next_tick_ = 0;
    channel_.emplace(s_.channel, fs_);
    if (uart_) {
      decoder_.emplace(spb_, s_.tx.uart_parity, s_.tx.uart_stop_bits);
      uart_fed_ = lead_samples_ - spb_;
      frames_.clear();
      byte_ok_.assign(static_cast<std::size_t>(n_packets) * s_.packet_len, 0);
      byte_seen_.assign(byte_ok_.size(), 0);
    }

    start_receivers();

    std::vector<Bit> line;
    std::size_t pos = 0;
    for (int k = 0; k <= n_packets && !m_.aborted; ++k) {
      line.clear();
      if (k == 0) {
        for (std::size_t i = 0; i < kLeadBits; ++i) line.push_back(static_cast<Bit>((i + 1) % 2));
        if (uart_) line.insert(line.end(), {1, 1});
      }
      if (k < n_packets) {
        const BitStream bits = packet_line_bits(packets_[static_cast<std::size_t>(k)], s_.tx);
        line.insert(line.end(), bits.bits().begin(), bits.bits().end());
      } else {
        for (std::size_t i = 0; i < kTailBits; ++i) {
          line.push_back(uart_ ? Bit{1} : static_cast<Bit>((i + 1) % 2));
        }
      }
      process_chunk(line, pos);
      pos += line.size() * spb_;
      if (uart_) {
        feed_uart(pos);
      } else {
        demodulate_ready(pos, k == n_packets);
      }
      if (s_.error_budget && m_.bit_errors > *s_.error_budget) m_.aborted = true;
      trim();
    }
    if (uart_ && !m_.aborted) score_uart();
    if (s_.error_budget && m_.bit_errors > *s_.error_budget) m_.aborted = true;

    const double round_duration = static_cast<double>(pos) / fs_;
    close_power(round_duration);
    return round_duration;
  }

  // Receivers ---------------------------------------------------------------
  std::uint64_t chain_seed(ReceiverKind k) {
    return derive_seed(s_.seed, {round_, 0x72780000ULL + index_of(k), power_cycles_[index_of(k)]++});
  }

  void power_on(ReceiverKind k, double t, bool cold) {
    auto& slot = slots_[index_of(k)];
    if (slot.chain) return;
    slot.chain = std::make_unique<ReceiverChain>(s_.params.receiver(k), s_.tx.bitrate_bps, fs_,
                                                 chain_seed(k), cold);
    slot.on_since_s = t;
  }

  void power_off(ReceiverKind k, double t) {
    auto& slot = slots_[index_of(k)];
    if (!slot.chain) return;
    m_.energy_j += s_.params.receiver(k).power_w * (t - slot.on_since_s);
    slot.chain.reset();
  }

  void close_power(double t) {
    for (ReceiverKind k : kAllReceivers) power_off(k, t);
    if (switched_ && !simulate_ulp_) m_.energy_j += s_.params.ultra_low_power.power_w * t;
  }

  double sampled_lux(double t_round) const {
    return s_.tx.on_lux * channel_->attenuation_at(t_offset_ + t_round) + s_.channel.ambient_lux;
  }

  void start_receivers() {
    if (!switched_) {
      active_ = *s_.receiver;
      power_on(*active_, 0.0, false);
      return;
    }
    if (simulate_ulp_) power_on(ReceiverKind::UltraLowPower, 0.0, false);
    active_ = select_receiver(sampled_lux(0.0), s_.tx.bitrate_bps, s_.policy, table_, power_);
    if (active_) power_on(*active_, 0.0, false);
    m_.sampler_energy_j += s_.params.integration.sampler_energy_per_sample_j;
  }

  double tick_interval() const {
    return s_.policy.goal == SwitchGoal::Throughput ? s_.params.integration.throughput_sample_interval_s
                                                    : s_.policy.sample_interval_s;
  }

  std::size_t tick_sample(std::uint64_t k) const {
    const double t = s_.sampler_phase_s + static_cast<double>(k) * tick_interval();
    return static_cast<std::size_t>(std::ceil(t * fs_ - 1e-9));
  }

  void tick(std::size_t n) {
    const double t = static_cast<double>(n) / fs_;
    m_.sampler_energy_j += s_.params.integration.sampler_energy_per_sample_j;
    const auto sel = select_receiver(sampled_lux(t), s_.tx.bitrate_bps, s_.policy, table_, power_);
    if (sel == active_) return;
    double latency = 0.0;
    if (sel) {
      const bool powered = slots_[index_of(*sel)].chain != nullptr ||
                           (*sel == ReceiverKind::UltraLowPower);
      latency = (powered ? 0.0 : s_.params.integration.power_on_latency_s) +
                s_.params.integration.mux_latency_s;
    }
    m_.switch_events.push_back({t_offset_ + t, active_, sel, latency});
    if (active_ && *active_ != ReceiverKind::UltraLowPower) power_off(*active_, t);
    if (sel) power_on(*sel, t, true);
    active_ = sel;
    active_from_ = n + static_cast<std::size_t>(std::lround(latency * fs_));
  }

  // Sample pipeline ---------------------------------------------------------
  void process_chunk(const std::vector<Bit>& line, std::size_t c0) {
    const std::size_t n = line.size() * spb_;
    tx_.resize(n);
    lux_.resize(n);
    ook_modulate_into(line, s_.tx, spb_, tx_);
    channel_->process(tx_, t_offset_ + static_cast<double>(c0) / fs_, lux_);
    if (!s_.summary_only) snr_.add_block(t_offset_ + static_cast<double>(c0) / fs_, 1.0 / fs_, lux_);

    const std::size_t old = dig_.size();
    dig_.resize(old + n);
    src_.resize(old + n);
    scratch_.resize(n);

    std::size_t pos = c0;
    const std::size_t end = c0 + n;
    while (pos < end) {
      std::size_t seg_end = end;
      if (switched_) {
        const std::size_t ts = tick_sample(next_tick_);
        if (ts <= pos) {
          tick(pos);
          ++next_tick_;
          continue;
        }
        seg_end = std::min(end, ts);
      }
      const std::size_t a = pos - c0;
      const std::size_t len = seg_end - pos;
      const std::span<const double> lux(lux_.data() + a, len);
      Bit* out = dig_.data() + old + a;
      std::uint8_t* src = src_.data() + old + a;
      bool written = false;
      for (ReceiverKind k : kAllReceivers) {
        auto& slot = slots_[index_of(k)];
        if (!slot.chain) continue;
        if (active_ == k) {
          slot.chain->process(lux, std::span<Bit>(out, len));
          written = true;
        } else {
          slot.chain->process(lux, std::span<Bit>(scratch_.data(), len));
        }
      }
      if (!written) {
        std::fill(out, out + len, Bit{0});
        std::fill(src, src + len, kNoSource);
      } else {
        const auto id = static_cast<std::uint8_t>(index_of(*active_));
        for (std::size_t i = 0; i < len; ++i) {
          const bool up = pos + i >= active_from_;
          src[i] = up ? id : kNoSource;
          if (!up) out[i] = 0;
        }
      }
      pos = seg_end;
    }
  }

  void trim() {
    // Keep two bits of history before the next packet's search window.
    std::size_t keep_from;
    if (uart_) {
      keep_from = uart_fed_ > 2 * spb_ ? uart_fed_ - 2 * spb_ : 0;
    } else {
      const std::size_t next_start = lead_samples_ + next_packet_ * packet_samples_;
      keep_from = next_start > 2 * spb_ ? next_start - 2 * spb_ : 0;
    }
    if (keep_from <= buf_base_) return;
    const std::size_t drop = std::min(keep_from - buf_base_, dig_.size());
    dig_.erase(dig_.begin(), dig_.begin() + static_cast<std::ptrdiff_t>(drop));
    src_.erase(src_.begin(), src_.begin() + static_cast<std::ptrdiff_t>(drop));
    buf_base_ += drop;
  }

  std::optional<ReceiverKind> source_at(std::size_t n) const {
    const std::uint8_t id = src_[n - buf_base_];
    if (id == kNoSource) return std::nullopt;
    return static_cast<ReceiverKind>(id);
  }

  void score_bit(double t, bool error, std::optional<ReceiverKind> source) {
    ++m_.payload_bits;
    if (error) ++m_.bit_errors;
    if (!s_.summary_only) ber_windows_.add(t, error ? 1.0 : 0.0);
    if (s_.on_payload_bit) s_.on_payload_bit(t, error, source);
  }

  void demodulate_ready(std::size_t available_end, bool final_chunk) {
    const auto& preamble = default_preamble();
    const std::size_t pre_samples = preamble.size() * spb_;
    const std::size_t payload_bits = 8 * static_cast<std::size_t>(s_.packet_len);
    const std::size_t lookahead = 2 * spb_;
    while (next_packet_ < packets_.size()) {
      const std::size_t start = lead_samples_ + next_packet_ * packet_samples_;
      if (!final_chunk && start + packet_samples_ + lookahead > available_end) return;

      const std::span<const Bit> levels(dig_);
      const std::size_t b = start - spb_ / 2 - buf_base_;
      const std::size_t e = start + (3 * spb_) / 2 - buf_base_;
      const auto lock = find_preamble(levels, spb_, preamble.bits(), b, e);
      const BitStream sent = bits_from_bytes(packets_[next_packet_].payload);
      if (!lock) ++m_.packets_lost;
      const std::size_t data_start = lock ? lock->start_sample + pre_samples : 0;
      for (std::size_t i = 0; i < payload_bits; ++i) {
        const std::size_t nominal = start + pre_samples + i * spb_ + spb_ / 2;
        const double t = t_offset_ + static_cast<double>(nominal) / fs_;
        if (!lock) {
          score_bit(t, true, source_at(std::min(nominal, buf_base_ + dig_.size() - 1)));
          continue;
        }
        const std::size_t c = data_start + i * spb_ + spb_ / 2;
        if (c >= dig_.size()) {
          score_bit(t, true, std::nullopt);
          continue;
        }
        const std::uint8_t id = src_[c];
        const bool error = id == kNoSource || dig_[c] != sent[i];
        score_bit(t, error, id == kNoSource ? std::nullopt : std::optional(static_cast<ReceiverKind>(id)));
      }
      ++next_packet_;
      if (s_.error_budget && m_.bit_errors > *s_.error_budget) return;
    }
  }

  void feed_uart(std::size_t available_end) {
    if (available_end <= uart_fed_) return;
    const std::size_t a = uart_fed_ - buf_base_;
    const std::size_t len = available_end - uart_fed_;
    frames_.clear();
    decoder_->process(std::span<const Bit>(dig_.data() + a, len), uart_fed_, frames_);
    uart_fed_ = available_end;
    const std::size_t frame_samples = uart_frame_bits(s_.tx) * spb_;
    for (const auto& f : frames_) {
      if (!f.ok) ++m_.framing_errors;
      const double rel = (static_cast<double>(f.start_sample) - static_cast<double>(lead_samples_)) /
                         static_cast<double>(frame_samples);
      const long j = std::lround(rel);
      if (j < 0 || static_cast<std::size_t>(j) >= byte_ok_.size()) continue;
      const auto idx = static_cast<std::size_t>(j);
      const std::size_t last = std::min(f.start_sample + frame_samples - spb_ / 2, buf_base_ + dig_.size() - 1);
      const bool up = src_[f.start_sample - buf_base_] != kNoSource && src_[last - buf_base_] != kNoSource;
      const std::size_t p = idx / static_cast<std::size_t>(s_.packet_len);
      const std::size_t q = idx % static_cast<std::size_t>(s_.packet_len);
      const bool good = f.ok && up && f.byte == packets_[p].payload[q];
      if (!byte_seen_[idx]) {
        byte_seen_[idx] = 1;
        byte_ok_[idx] = good;
        byte_source_.resize(byte_ok_.size());
        byte_source_[idx] = up ? src_[f.start_sample - buf_base_] : kNoSource;
      } else {
        byte_ok_[idx] = 0;  // two frames claim the same slot
      }
    }
  }

  void score_uart() {
    const std::size_t frame_samples = uart_frame_bits(s_.tx) * spb_;
    byte_source_.resize(byte_ok_.size(), kNoSource);
    for (std::size_t j = 0; j < byte_ok_.size(); ++j) {
      const bool error = !byte_ok_[j];
      const std::uint8_t id = byte_seen_[j] ? byte_source_[j] : kNoSource;
      const auto source = id == kNoSource ? std::nullopt : std::optional(static_cast<ReceiverKind>(id));
      for (std::size_t b = 0; b < 8; ++b) {
        const std::size_t centre = lead_samples_ + j * frame_samples + (1 + b) * spb_ + spb_ / 2;
        score_bit(t_offset_ + static_cast<double>(centre) / fs_, error, source);
      }
    }
  }

  const LinkSetup& s_;
  bool switched_;
  double fs_;
  std::size_t spb_;
  bool uart_;
  std::vector<OperatingRange> table_;
  PowerModel power_;
  bool simulate_ulp_ = false;

  LinkMetrics m_;
  WindowAccumulator ber_windows_;
  SnrAccumulator snr_;

  double t_offset_ = 0.0;
  std::uint64_t round_ = 0;
  std::vector<Packet> packets_;
  std::size_t lead_samples_ = 0;
  std::size_t packet_samples_ = 0;
  std::size_t next_packet_ = 0;
  std::optional<ChannelStream> channel_;

  std::array<Slot, 3> slots_;
  std::array<std::uint64_t, 3> power_cycles_{};
  std::optional<ReceiverKind> active_;
  std::size_t active_from_ = 0;
  std::uint64_t next_tick_ = 0;

  std::vector<double> tx_;
  std::vector<double> lux_;
  std::vector<Bit> scratch_;
  std::vector<Bit> dig_;
  std::vector<std::uint8_t> src_;
  std::size_t buf_base_ = 0;

  std::optional<UartDecoder> decoder_;
  std::size_t uart_fed_ = 0;
  std::vector<UartFrame> frames_;
  std::vector<std::uint8_t> byte_ok_;
  std::vector<std::uint8_t> byte_seen_;
  std::vector<std::uint8_t> byte_source_;
};

}  // namespace

LinkMetrics run_link(const LinkSetup& setup) {
  LinkEngine engine(setup, !setup.receiver.has_value());
  return engine.run();
}

LinkMetrics run_switched_link(const LinkSetup& setup) {
  LinkEngine engine(setup, true);
  return engine.run();
}

namespace {

std::size_t planned_payload_bits(const LinkSetup& s) {
  if (s.duration_s) {
    return static_cast<std::size_t>(*s.duration_s * s.tx.bitrate_bps);
  }
  return static_cast<std::size_t>(s.rounds) * static_cast<std::size_t>(s.packets_per_round) *
         static_cast<std::size_t>(s.packet_len) * 8;
}

}  // namespace

bool link_passes(const LinkSetup& scenario, ReceiverKind receiver, double bitrate_bps) {
  const auto& cap = scenario.params.integration.mcu_rate_cap_bps;
  if (scenario.tx.framing == Framing::Uart && cap && bitrate_bps > *cap) return false;
  LinkSetup s = scenario;
  s.receiver = receiver;
  s.tx.bitrate_bps = bitrate_bps;
  s.summary_only = true;
  s.on_payload_bit = nullptr;
  s.error_budget = static_cast<std::size_t>(kTargetBer * static_cast<double>(planned_payload_bits(s)));
  const LinkMetrics m = run_link(s);
  return !m.aborted && m.ber <= kTargetBer;
}

double achievable_throughput(const LinkSetup& scenario, ReceiverKind receiver,
                             std::span<const double> rates) {
  if (!std::is_sorted(rates.begin(), rates.end())) {
    throw std::invalid_argument("achievable_throughput: rates must be ascending");
  }
  for (auto it = rates.rbegin(); it != rates.rend(); ++it) {
    if (link_passes(scenario, receiver, *it)) return *it;
  }
  return 0.0;
}

double min_operating_lux(const ReceiverParams& receiver, double bitrate_bps, const LinkSetup& base) {
  double hi = 1e5;
  if (const auto* tia = receiver.tia()) {
    if (bitrate_bps > 2.0 * tia->bandwidth_hz()) {
      throw std::invalid_argument("min_operating_lux: bitrate " + std::to_string(bitrate_bps) +
                                  " exceeds twice the front-end bandwidth");
    }
    hi = 0.999 * tia->saturation_lux();
  }
  LinkSetup s = base;
  s.params.receiver(receiver.kind) = receiver;
  s.channel.ambient_lux = 0.0;
  s.channel.attenuation.reset();
  s.tx.off_lux = 0.0;
  const auto passes = [&](double lux) {
    s.tx.on_lux = lux;
    return link_passes(s, receiver.kind, bitrate_bps);
  };
  if (!passes(hi)) return std::numeric_limits<double>::infinity();
  double lo = 0.01;
  if (passes(lo)) return lo;
  // 2% resolution in lux is far finer than any tolerance applied to it.
  while (hi / lo > 1.02) {
    const double mid = std::sqrt(lo * hi);
    if (passes(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double response_time(const LinkSetup& setup, double step_time_s) {
  // Receiver that the policy picks for the post-step light level.
  const auto table = operating_table();
  const auto power = power_model(setup.params);
  const double t_after = step_time_s + 1e-9;
  const double att = setup.channel.attenuation ? setup.channel.attenuation->lux_at(t_after) : 1.0;
  const double lux_after = setup.tx.on_lux * att + setup.channel.ambient_lux;
  const auto target = select_receiver(lux_after, setup.tx.bitrate_bps, setup.policy, table, power);
  if (!target) return std::numeric_limits<double>::infinity();

  LinkSetup s = setup;
  s.summary_only = true;
  double found = std::numeric_limits<double>::infinity();
  double run_start = 0.0;
  int run = 0;
  s.on_payload_bit = [&](double t, bool error, std::optional<ReceiverKind> source) {
    if (t < step_time_s || found < std::numeric_limits<double>::infinity()) return;
    if (error || source != target) {
      run = 0;
      return;
    }
    if (run == 0) run_start = t;
    if (++run >= 16) found = run_start - step_time_s;
  };
  run_switched_link(s);
  return found;
}

}  // namespace vlcsim
