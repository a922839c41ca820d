#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <functional>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "exemplar/evaluator.hpp"

namespace exemplar {

struct ProblemShape {
  std::size_t n = 20000;
  std::size_t l = 500;
  std::size_t k = 10;
  std::size_t d = 100;
};

template <class T>
struct Problem {
  GroundSet<T> ground;
  EvaluationBatch<T> batch;
};

namespace detail {

/// Uniform integer in [0, bound) without modulo bias.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

/// Uniform value in [0, 1) on a grid of 2^-digits, so it is exact at the
/// storage width and can never round up to 1.
inline double uniform_unit(std::mt19937_64& rng, int digits) {
  return std::ldexp(static_cast<double>(rng() >> (64 - digits)), -digits);
}

}  // namespace detail

/// Ground vectors i.i.d. uniform over [0, 1)^d; every evaluation set holds k
/// distinct ground vectors (Floyd sampling). Same shape and seed give the
/// same problem, bit for bit.
template <class T>
Problem<T> generate_problem(const ProblemShape& shape, std::uint64_t seed) {
  if (shape.n == 0 || shape.l == 0 || shape.k == 0 || shape.d == 0) {
    fail(Errc::invalid_argument, "problem shape fields must be >= 1");
  }
  if (shape.k > shape.n) fail(Errc::budget_exceeds_ground_set, "k exceeds n");
  std::mt19937_64 rng(seed);
  const int digits = scalar_traits<T>::digits;

  std::vector<T> column_major(shape.n * shape.d);
  std::vector<T> rows(shape.n * shape.d);
  for (std::size_t i = 0; i < shape.n; ++i) {
    for (std::size_t k = 0; k < shape.d; ++k) {
      const T value = scalar_traits<T>::from_double(detail::uniform_unit(rng, digits));
      column_major[k * shape.n + i] = value;
      rows[i * shape.d + k] = value;
    }
  }
  GroundSet<T> ground(shape.n, shape.d, std::move(column_major));

  EvaluationBatch<T> batch(shape.d);
  std::vector<std::size_t> picked;
  std::unordered_set<std::size_t> seen;
  std::vector<T> set_rows(shape.k * shape.d);
  for (std::size_t j = 0; j < shape.l; ++j) {
    picked.clear();
    seen.clear();
    for (std::size_t m = shape.n - shape.k; m < shape.n; ++m) {
      const std::size_t t = static_cast<std::size_t>(detail::uniform_below(rng, m + 1));
      const std::size_t pick = seen.contains(t) ? m : t;
      seen.insert(pick);
      picked.push_back(pick);
    }
    for (std::size_t e = 0; e < shape.k; ++e) {
      std::copy_n(rows.begin() + static_cast<std::ptrdiff_t>(picked[e] * shape.d), shape.d,
                  set_rows.begin() + static_cast<std::ptrdiff_t>(e * shape.d));
    }
    batch.add_set(set_rows, shape.k);
  }
  return Problem<T>{std::move(ground), std::move(batch)};
}

enum class VaryAxis { n, l, k };

inline std::string_view to_string(VaryAxis a) {
  switch (a) {
    case VaryAxis::n: return "n";
    case VaryAxis::l: return "l";
    case VaryAxis::k: return "k";
  }
  return "?";
}

inline std::optional<VaryAxis> parse_vary_axis(std::string_view s) {
  if (s == "n") return VaryAxis::n;
  if (s == "l") return VaryAxis::l;
  if (s == "k") return VaryAxis::k;
  return std::nullopt;
}

struct BenchRecord {
  VaryAxis vary = VaryAxis::n;
  std::size_t n = 0;
  std::size_t l = 0;
  std::size_t k = 0;
  std::size_t d = 0;
  Precision precision = Precision::binary32;
  Backend backend = Backend::reference;
  std::size_t workers = 1;
  std::uint64_t seed = 0;
  std::size_t repetitions = 1;
  double runtime_seconds = 0.0;  // median; NaN when the run failed
  bool failed = false;

  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

inline constexpr std::string_view kBenchCsvHeader =
    "vary,n,l,k,d,precision,backend,workers,seed,repetitions,runtime_seconds";

inline void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << kBenchCsvHeader << '\n';
  for (const auto& r : records) {
    out << to_string(r.vary) << ',' << r.n << ',' << r.l << ',' << r.k << ',' << r.d << ','
        << to_string(r.precision) << ',' << to_string(r.backend) << ',' << r.workers << ','
        << r.seed << ',' << r.repetitions << ',';
    if (r.failed) {
      out << "nan";
    } else {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", r.runtime_seconds);
      out << buf;
    }
    out << '\n';
  }
}

inline std::vector<BenchRecord> read_bench_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kBenchCsvHeader) {
    fail(Errc::format_error, "bench CSV header must be '" + std::string(kBenchCsvHeader) + "'");
  }
  std::vector<BenchRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 11) fail(Errc::format_error, "line " + std::to_string(line_no) + ": expected 11 fields");
    BenchRecord r;
    try {
      const auto vary = parse_vary_axis(f[0]);
      const auto precision = parse_precision(f[5]);
      const auto backend = parse_backend(f[6]);
      if (!vary || !precision || !backend) throw std::invalid_argument("tag");
      r.vary = *vary;
      r.n = std::stoull(f[1]);
      r.l = std::stoull(f[2]);
      r.k = std::stoull(f[3]);
      r.d = std::stoull(f[4]);
      r.precision = *precision;
      r.backend = *backend;
      r.workers = std::stoull(f[7]);
      r.seed = std::stoull(f[8]);
      r.repetitions = std::stoull(f[9]);
      r.runtime_seconds = std::strtod(f[10].c_str(), nullptr);
      r.failed = std::isnan(r.runtime_seconds);
    } catch (const std::exception&) {
      fail(Errc::format_error, "line " + std::to_string(line_no) + ": malformed record");
    }
    records.push_back(r);
  }
  return records;
}

/// baseline / candidate runtime for two records of the same problem.
inline double compute_speedup(const BenchRecord& baseline, const BenchRecord& candidate) {
  if (baseline.n != candidate.n || baseline.l != candidate.l || baseline.k != candidate.k ||
      baseline.d != candidate.d || baseline.seed != candidate.seed) {
    fail(Errc::incomparable_records, "records describe different problems");
  }
  if (baseline.failed || candidate.failed) {
    fail(Errc::incomparable_records, "failed records have no runtime");
  }
  return baseline.runtime_seconds / candidate.runtime_seconds;
}

inline double median(std::vector<double> xs) {
  if (xs.empty()) fail(Errc::invalid_argument, "median of nothing");
  std::sort(xs.begin(), xs.end());
  const std::size_t mid = xs.size() / 2;
  return xs.size() % 2 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
};

inline LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) fail(Errc::invalid_argument, "need >= 2 points");
  const double m = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  LinearFit fit;
  fit.slope = sxx > 0 ? sxy / sxx : 0;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

struct BenchConfig {
  VaryAxis vary = VaryAxis::n;
  std::vector<std::size_t> values;
  ProblemShape fixed{};
  std::vector<Backend> backends{Backend::reference};
  std::vector<Precision> precisions{Precision::binary32};
  std::size_t repetitions = 5;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  DeviceLimits limits{};
  std::uint64_t memory_budget = 2ull << 30;
};

/// What gets timed: evaluation of one generated problem.
struct ChunkedExecutor {
  template <class T>
  void operator()(const Evaluator& evaluator, const GroundSet<T>& ground,
                  const EvaluationBatch<T>& batch, std::uint64_t budget) const {
    const auto values = evaluate_chunked(evaluator, ground, batch, budget);
    if (values.size() != batch.l()) fail(Errc::invalid_data, "result count mismatch");
  }
};

/// Runs every (value, precision, backend) combination in turn. The problem is
/// generated once per (value, precision), outside the timed region; the
/// median over repetitions is recorded. Plans that do not fit the memory
/// budget become failed records.
template <class Executor = ChunkedExecutor>
std::vector<BenchRecord> run_benchmark(const BenchConfig& config, Executor executor = {},
                                       const std::function<void(const BenchRecord&)>& on_record = {}) {
  if (config.values.empty()) fail(Errc::invalid_argument, "no values to vary");
  if (config.repetitions == 0) fail(Errc::invalid_argument, "repetitions must be >= 1");
  std::vector<BenchRecord> records;
  for (std::size_t value : config.values) {
    ProblemShape shape = config.fixed;
    switch (config.vary) {
      case VaryAxis::n: shape.n = value; break;
      case VaryAxis::l: shape.l = value; break;
      case VaryAxis::k: shape.k = value; break;
    }
    for (Precision precision : config.precisions) {
      dispatch_precision(precision, [&]<class T>(std::type_identity<T>) {
        const Problem<T> problem = generate_problem<T>(shape, config.seed);
        for (Backend backend : config.backends) {
          BenchRecord record{config.vary, shape.n,  shape.l, shape.k, shape.d, precision,
                             backend,     config.workers, config.seed, config.repetitions};
          const Evaluator evaluator{backend, config.limits, config.workers};
          std::vector<double> times;
          try {
            for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
              const auto start = std::chrono::steady_clock::now();
              executor(evaluator, problem.ground, problem.batch, config.memory_budget);
              const auto stop = std::chrono::steady_clock::now();
              times.push_back(std::chrono::duration<double>(stop - start).count());
            }
            // a clock tick of zero still has to satisfy runtime > 0
            record.runtime_seconds = std::max(median(times), 1e-9);
          } catch (const Error& e) {
            if (e.code() != Errc::out_of_memory) throw;
            record.failed = true;
            record.runtime_seconds = std::numeric_limits<double>::quiet_NaN();
          }
          records.push_back(record);
          if (on_record) on_record(record);
        }
      });
    }
  }
  return records;
}

}  // namespace exemplar
