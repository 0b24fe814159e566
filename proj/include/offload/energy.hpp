#ifndef OFFLOAD_ENERGY_HPP_
#define OFFLOAD_ENERGY_HPP_

#include <cmath>
#include <iomanip>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "offload/common.hpp"
#include "offload/config.hpp"

namespace offload::energy {

enum class CpuFreq { Low246MHz, High385MHz };

enum class WifiState { Off, LowPower, HighPower, TransmitFromLow, TransmitFromHigh };

enum class CellState { Off, Idle, Fach, Dch };

// Per-component power coefficients for the HTC Dream model (mW). The CPU
// terms are per utilization percent; brightness is per level (0-255).
struct PowerCoefficients {
  double beta_uh = 4.32;        // high-frequency CPU, mW per util-%
  double beta_ul = 3.42;        // low-frequency CPU, mW per util-%
  double beta_cpu_on = 121.46;  // base draw while CPU is on
  double beta_wifi_low = 20.0;
  double beta_wifi_high = 710.0;
  double wifi_transmit = 1000.0;
  double beta_3g_idle = 10.0;
  double beta_3g_fach = 401.0;
  double beta_3g_dch = 570.0;
  double beta_brightness = 2.40;  // mW per brightness level

  static PowerCoefficients from_config(const Config& cfg) {
    PowerCoefficients c;
    c.beta_uh = cfg.get_double("beta_uh", c.beta_uh);
    c.beta_ul = cfg.get_double("beta_ul", c.beta_ul);
    c.beta_cpu_on = cfg.get_double("beta_cpu_on", c.beta_cpu_on);
    c.beta_wifi_low = cfg.get_double("beta_wifi_low", c.beta_wifi_low);
    c.beta_wifi_high = cfg.get_double("beta_wifi_high", c.beta_wifi_high);
    c.wifi_transmit = cfg.get_double("wifi_transmit", c.wifi_transmit);
    c.beta_3g_idle = cfg.get_double("beta_3g_idle", c.beta_3g_idle);
    c.beta_3g_fach = cfg.get_double("beta_3g_fach", c.beta_3g_fach);
    c.beta_3g_dch = cfg.get_double("beta_3g_dch", c.beta_3g_dch);
    c.beta_brightness = cfg.get_double("beta_brightness", c.beta_brightness);
    return c;
  }
};

// Instantaneous hardware state feeding the power model.
struct DeviceState {
  double cpu_util = 0.0;  // percent, 0-100
  CpuFreq cpu_freq = CpuFreq::Low246MHz;
  bool cpu_on = false;
  int brightness = 0;  // 0-255
  WifiState wifi = WifiState::Off;
  CellState cell = CellState::Off;

  bool valid() const {
    if (cpu_util < 0 || cpu_util > 100) return false;
    if (brightness < 0 || brightness > 255) return false;
    if (cpu_util > 0 && !cpu_on) return false;
    return true;
  }
};

struct PowerBreakdown {
  double cpu = 0, screen = 0, wifi = 0, cellular = 0;
  double total() const { return cpu + screen + wifi + cellular; }
};

inline double wifi_power_mw(WifiState s, const PowerCoefficients& c) {
  switch (s) {
    case WifiState::Off: return 0.0;
    case WifiState::LowPower: return c.beta_wifi_low;
    case WifiState::HighPower: return c.beta_wifi_high;
    case WifiState::TransmitFromLow:
    case WifiState::TransmitFromHigh: return c.wifi_transmit;
  }
  return 0.0;
}

inline double cell_power_mw(CellState s, const PowerCoefficients& c) {
  switch (s) {
    case CellState::Off: return 0.0;
    case CellState::Idle: return c.beta_3g_idle;
    case CellState::Fach: return c.beta_3g_fach;
    case CellState::Dch: return c.beta_3g_dch;
  }
  return 0.0;
}

// Component powers in mW for one device state. The CPU term selects the
// coefficient for the active frequency; the base draw applies whenever the
// CPU is on.
inline PowerBreakdown instantaneous_power(const DeviceState& s,
                                          const PowerCoefficients& c) {
  PowerBreakdown p;
  double freq_coeff = (s.cpu_freq == CpuFreq::High385MHz) ? c.beta_uh : c.beta_ul;
  p.cpu = freq_coeff * s.cpu_util + (s.cpu_on ? c.beta_cpu_on : 0.0);
  p.screen = c.beta_brightness * s.brightness;
  p.wifi = wifi_power_mw(s.wifi, c);
  p.cellular = cell_power_mw(s.cell, c);
  return p;
}

// Per-component energy in mJ. total is maintained as the component sum.
struct EnergyBreakdown {
  double cpu = 0, screen = 0, wifi = 0, cellular = 0, total = 0;

  EnergyBreakdown& operator+=(const EnergyBreakdown& o) {
    cpu += o.cpu;
    screen += o.screen;
    wifi += o.wifi;
    cellular += o.cellular;
    total = cpu + screen + wifi + cellular;
    return *this;
  }
  friend EnergyBreakdown operator+(EnergyBreakdown a, const EnergyBreakdown& b) {
    a += b;
    return a;
  }
};

struct TraceSegment {
  DeviceState state;
  double duration_s = 0.0;
};

// Rectangular-rule integration of piecewise-constant states.
inline EnergyBreakdown integrate_energy(std::span<const TraceSegment> trace,
                                        const PowerCoefficients& c) {
  EnergyBreakdown e;
  for (const auto& seg : trace) {
    PowerBreakdown p = instantaneous_power(seg.state, c);
    e.cpu += p.cpu * seg.duration_s;
    e.screen += p.screen * seg.duration_s;
    e.wifi += p.wifi * seg.duration_s;
    e.cellular += p.cellular * seg.duration_s;
  }
  e.total = e.cpu + e.screen + e.wifi + e.cellular;
  return e;
}

inline EnergyBreakdown integrate_energy(const std::vector<TraceSegment>& trace,
                                        const PowerCoefficients& c) {
  return integrate_energy(std::span<const TraceSegment>(trace), c);
}

// 3G RRC state machine. Promotion to the dedicated channel happens when a
// traffic queue strictly exceeds its threshold (151 B uplink, 119 B downlink);
// demotion runs DCH -> FACH -> IDLE on inactivity timeouts. Queues exist only
// to gate promotion; they drain fully once the step's state is recorded.
struct CellFsm {
  CellState state = CellState::Idle;
  double uplink_queue = 0, downlink_queue = 0;
  double uplink_threshold = 151, downlink_threshold = 119;
  double dch_inactivity = 0, fach_inactivity = 0;
  double dch_timeout = 5.0, fach_timeout = 12.0;

  void step(double tx_bytes, double rx_bytes, double dt) {
    if (tx_bytes > 0 || rx_bytes > 0) {
      uplink_queue += tx_bytes;
      downlink_queue += rx_bytes;
      if (uplink_queue > uplink_threshold || downlink_queue > downlink_threshold) {
        state = CellState::Dch;
      } else if (state == CellState::Idle) {
        state = CellState::Fach;
      }
      uplink_queue = downlink_queue = 0;
      dch_inactivity = fach_inactivity = 0;
    } else {
      if (state == CellState::Dch) {
        dch_inactivity += dt;
        if (dch_inactivity >= dch_timeout) {
          state = CellState::Fach;
          dch_inactivity = 0;
          fach_inactivity = 0;
        }
      } else if (state == CellState::Fach) {
        fach_inactivity += dt;
        if (fach_inactivity >= fach_timeout) {
          state = CellState::Idle;
          fach_inactivity = 0;
        }
      }
    }
  }
};

struct WifiStepResult {
  WifiState base_state = WifiState::LowPower;
  double transmit_fraction = 0.0;  // fraction of dt spent in the transmit state
  double avg_power_mw = 0.0;
};

// WiFi interface power states. The base state is driven by packet rate; an
// active transmission overlays the 1000 mW transmit state for 15 ms per
// second of transmission.
struct WifiFsm {
  WifiState state = WifiState::LowPower;
  double packets_per_second = 0;
  double channel_rate_mbps = 54;  // 1-54; coefficient currently unvalued, unused in the sum
  double data_rate_bytes = 0;
  double high_threshold = 15.0;   // packets/s
  double transmit_duty = 0.015;   // transmit seconds per second of transmission

  WifiStepResult step(double pps, bool transmitting, double dt,
                      const PowerCoefficients& c) {
    (void)dt;
    packets_per_second = pps;
    state = (pps >= high_threshold) ? WifiState::HighPower : WifiState::LowPower;
    WifiStepResult r;
    r.base_state = state;
    r.transmit_fraction = transmitting ? transmit_duty : 0.0;
    double base = wifi_power_mw(state, c);
    r.avg_power_mw = base * (1.0 - r.transmit_fraction) + c.wifi_transmit * r.transmit_fraction;
    return r;
  }
};

// --- trace CSV ---

inline const char* to_string(CpuFreq f) {
  return f == CpuFreq::High385MHz ? "High385MHz" : "Low246MHz";
}
inline const char* to_string(WifiState s) {
  switch (s) {
    case WifiState::Off: return "Off";
    case WifiState::LowPower: return "LowPower";
    case WifiState::HighPower: return "HighPower";
    case WifiState::TransmitFromLow: return "TransmitFromLow";
    case WifiState::TransmitFromHigh: return "TransmitFromHigh";
  }
  return "Off";
}
inline const char* to_string(CellState s) {
  switch (s) {
    case CellState::Off: return "Off";
    case CellState::Idle: return "Idle";
    case CellState::Fach: return "Fach";
    case CellState::Dch: return "Dch";
  }
  return "Off";
}

inline CpuFreq cpu_freq_from_string(const std::string& s) {
  if (s == "High385MHz") return CpuFreq::High385MHz;
  if (s == "Low246MHz") return CpuFreq::Low246MHz;
  throw InputError("unknown cpu_freq: " + s);
}
inline WifiState wifi_state_from_string(const std::string& s) {
  if (s == "Off") return WifiState::Off;
  if (s == "LowPower") return WifiState::LowPower;
  if (s == "HighPower") return WifiState::HighPower;
  if (s == "TransmitFromLow") return WifiState::TransmitFromLow;
  if (s == "TransmitFromHigh") return WifiState::TransmitFromHigh;
  throw InputError("unknown wifi_state: " + s);
}
inline CellState cell_state_from_string(const std::string& s) {
  if (s == "Off") return CellState::Off;
  if (s == "Idle") return CellState::Idle;
  if (s == "Fach") return CellState::Fach;
  if (s == "Dch") return CellState::Dch;
  throw InputError("unknown cell_state: " + s);
}

inline std::string trace_to_csv(const std::vector<TraceSegment>& trace) {
  std::ostringstream out;
  out << "t_start_s,duration_s,cpu_util,cpu_freq,cpu_on,brightness,wifi_state,cell_state\n";
  out << std::setprecision(17);
  double t = 0;
  for (const auto& seg : trace) {
    out << t << ',' << seg.duration_s << ',' << seg.state.cpu_util << ','
        << to_string(seg.state.cpu_freq) << ',' << (seg.state.cpu_on ? 1 : 0) << ','
        << seg.state.brightness << ',' << to_string(seg.state.wifi) << ','
        << to_string(seg.state.cell) << '\n';
    t += seg.duration_s;
  }
  return out.str();
}

inline std::vector<TraceSegment> trace_from_csv(const std::string& csv) {
  std::vector<TraceSegment> trace;
  std::istringstream in(csv);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 8) throw InputError("bad trace row: " + line);
    TraceSegment seg;
    seg.duration_s = std::stod(fields[1]);
    seg.state.cpu_util = std::stod(fields[2]);
    seg.state.cpu_freq = cpu_freq_from_string(fields[3]);
    seg.state.cpu_on = fields[4] == "1";
    seg.state.brightness = std::stoi(fields[5]);
    seg.state.wifi = wifi_state_from_string(fields[6]);
    seg.state.cell = cell_state_from_string(fields[7]);
    trace.push_back(seg);
  }
  return trace;
}

}  // namespace offload::energy

#endif  // OFFLOAD_ENERGY_HPP_
