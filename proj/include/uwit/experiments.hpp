#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "uwit/criteria.hpp"
#include "uwit/error.hpp"
#include "uwit/sampling.hpp"
#include "uwit/states.hpp"

namespace uwit {

// ---------------------------------------------------------------------------
// Work distribution

inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Runs task(i) for i in [0, count) on up to `workers` threads. Tasks must
/// write only to their own output slot; the first exception is rethrown.
inline void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& task) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// Monte-Carlo detection sweep over rho(p, d) = p |psi-><psi-| + (1 - p) sigma

struct NoiseBallConfig {
  double d = 0.2;
  std::uint64_t seed = 42;
  std::size_t samples = 2000;
};

/// Samples per independently seeded partition. Fixed, so the random streams
/// (and hence the output) do not depend on the worker count.
inline constexpr std::size_t kSweepChunk = 250;

struct DetectionRow {
  double p = 0.0;
  double fraction_witness = 0.0;
  double fraction_lur = 0.0;
  double fraction_npt = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  // Per-sample consistency counters; both must stay zero.
  std::size_t chain_violations = 0;  // witness without LUR, or LUR without NPT
  std::size_t ppt_detections = 0;    // PPT sample flagged by witness or LUR
};

struct SampleOutcome {
  bool witness = false;
  bool lur = false;
  bool npt = false;
};

inline SampleOutcome evaluate_sample(const DensityMatrix& rho) {
  // The LUR value is the witness value minus a sum of squares, so the
  // implication witness => LUR is exact in floating point as well.
  return {linear_witness_value(rho) < 0.0, nonlinear_witness_value(rho).detected, is_npt(rho).npt};
}

inline std::vector<double> default_p_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
  return grid;
}

struct SweepOptions {
  unsigned workers = 1;
};

inline std::vector<DetectionRow> run_detection_sweep(const NoiseBallConfig& config, const std::vector<double>& p_grid,
                                                     SweepOptions options = {}) {
  if (config.samples == 0) throw Error(ErrorKind::InvalidParameter, "sweep needs at least one sample per p");
  if (!(config.d >= 0.0)) throw Error(ErrorKind::InvalidParameter, "ball radius " + std::to_string(config.d));
  for (double p : p_grid)
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidWeight, "p grid value " + std::to_string(p));

  struct Counts {
    std::size_t witness = 0, lur = 0, npt = 0, chain = 0, ppt = 0;
  };
  const std::size_t chunks_per_p = (config.samples + kSweepChunk - 1) / kSweepChunk;
  std::vector<Counts> counts(p_grid.size() * chunks_per_p);

  parallel_for(counts.size(), options.workers, [&](std::size_t job) {
    const std::size_t p_index = job / chunks_per_p;
    const std::size_t chunk = job % chunks_per_p;
    const double p = p_grid[p_index];
    auto rng = make_stream(config.seed, (static_cast<std::uint64_t>(p_index) << 32) | chunk);
    const std::size_t begin = chunk * kSweepChunk;
    const std::size_t end = std::min(config.samples, begin + kSweepChunk);
    Counts c;
    for (std::size_t s = begin; s < end; ++s) {
      const auto outcome = evaluate_sample(noisy_singlet(p, sample_noise_ball(config.d, rng)));
      c.witness += outcome.witness;
      c.lur += outcome.lur;
      c.npt += outcome.npt;
      c.chain += (outcome.witness && !outcome.lur) || (outcome.lur && !outcome.npt);
      c.ppt += !outcome.npt && (outcome.witness || outcome.lur);
    }
    counts[job] = c;
  });

  std::vector<DetectionRow> rows;
  rows.reserve(p_grid.size());
  const double n = static_cast<double>(config.samples);
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    Counts total;
    for (std::size_t k = 0; k < chunks_per_p; ++k) {
      const auto& c = counts[i * chunks_per_p + k];
      total.witness += c.witness;
      total.lur += c.lur;
      total.npt += c.npt;
      total.chain += c.chain;
      total.ppt += c.ppt;
    }
    rows.push_back({p_grid[i], static_cast<double>(total.witness) / n, static_cast<double>(total.lur) / n,
                    static_cast<double>(total.npt) / n, config.samples, config.seed, total.chain, total.ppt});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Bell-diagonal geometry scan

struct GeometryCell {
  BellDiagonalCoords coords;
  bool is_state = false;
  bool in_octahedron = false;
  bool sphere_detected = false;
  std::uint64_t tsallis_mask = 0;  // bit k set: detected at the k-th scanned q

  bool tsallis_detected(std::size_t q_index) const { return (tsallis_mask >> q_index) & 1u; }
};

struct GeometryScan {
  std::size_t resolution = 0;
  std::vector<double> q_values;
  std::vector<GeometryCell> cells;  // x slowest, z fastest
};

inline constexpr std::size_t kMaxScanQValues = 64;

inline GeometryCell classify_cell(const BellDiagonalCoords& c, std::span<const double> q_values) {
  GeometryCell cell{c};
  cell.is_state = in_state_tetrahedron(c);
  if (!cell.is_state) return cell;
  cell.in_octahedron = in_witness_octahedron(c);
  const auto p = bell_populations(c);
  double squares = 0.0;
  for (double v : p) squares += v * v;
  cell.sphere_detected = 1.0 - squares < 0.5;
  for (std::size_t k = 0; k < q_values.size(); ++k)
    if (bell_tsallis_detects(c, q_values[k])) cell.tsallis_mask |= std::uint64_t{1} << k;
  return cell;
}

/// Uniform resolution^3 grid over [-1, 1]^3.
inline GeometryScan run_geometry_scan(std::size_t resolution, std::vector<double> q_values, unsigned workers = 1) {
  if (resolution < 2) throw Error(ErrorKind::InvalidParameter, "geometry resolution must be at least 2");
  if (q_values.size() > kMaxScanQValues) throw Error(ErrorKind::InvalidParameter, "too many q values");
  for (double q : q_values)
    if (!(q > 0.0) || !std::isfinite(q)) throw Error(ErrorKind::InvalidParameter, "q = " + std::to_string(q));

  GeometryScan scan{resolution, std::move(q_values), {}};
  const std::size_t n = resolution;
  scan.cells.resize(n * n * n);
  auto coordinate = [n](std::size_t i) { return -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1); };
  parallel_for(n, workers, [&](std::size_t ix) {
    for (std::size_t iy = 0; iy < n; ++iy)
      for (std::size_t iz = 0; iz < n; ++iz)
        scan.cells[(ix * n + iy) * n + iz] =
            classify_cell({coordinate(ix), coordinate(iy), coordinate(iz)}, scan.q_values);
  });
  return scan;
}

// ---------------------------------------------------------------------------
// Werner line (d = 0)

struct WernerThresholds {
  double witness = 0.0;
  double lur = 0.0;
  double npt = 0.0;
};

/// Smallest p in [0, 1] at which `detected(werner(p))` holds, to within `tolerance`.
inline double bisect_threshold(const std::function<bool(const DensityMatrix&)>& detected, double tolerance = 1e-8) {
  double lo = 0.0, hi = 1.0;
  if (detected(werner(lo))) return lo;
  if (!detected(werner(hi))) throw Error(ErrorKind::InvalidParameter, "criterion never detects on the Werner line");
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    (detected(werner(mid)) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

inline WernerThresholds werner_thresholds() {
  return {bisect_threshold([](const DensityMatrix& r) { return linear_witness_value(r) < 0.0; }),
          bisect_threshold([](const DensityMatrix& r) { return nonlinear_witness_value(r).detected; }),
          bisect_threshold([](const DensityMatrix& r) { return is_npt(r).npt; })};
}

// ---------------------------------------------------------------------------
// CSV output

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline void write_detection_csv(std::ostream& out, std::span<const DetectionRow> rows) {
  out << "p,frac_witness,frac_lur,frac_npt,samples,seed\n";
  for (const auto& r : rows) {
    out << format_number(r.p) << ',' << format_number(r.fraction_witness) << ',' << format_number(r.fraction_lur) << ','
        << format_number(r.fraction_npt) << ',' << r.samples << ',' << r.seed << '\n';
  }
}

inline void write_geometry_csv(std::ostream& out, const GeometryScan& scan) {
  out << "x,y,z,is_state,in_octahedron,sphere_detected,q,tsallis_detected\n";
  std::string line;
  for (const auto& cell : scan.cells) {
    const std::string prefix = format_number(cell.coords.x) + ',' + format_number(cell.coords.y) + ',' +
                               format_number(cell.coords.z) + ',' + (cell.is_state ? '1' : '0') + ',' +
                               (cell.in_octahedron ? '1' : '0') + ',' + (cell.sphere_detected ? '1' : '0') + ',';
    for (std::size_t k = 0; k < scan.q_values.size(); ++k) {
      line = prefix;
      line += format_number(scan.q_values[k]);
      line += ',';
      line += cell.tsallis_detected(k) ? '1' : '0';
      line += '\n';
      out << line;
    }
  }
}

}  // namespace uwit
