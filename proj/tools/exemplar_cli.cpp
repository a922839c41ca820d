// Command-line front end: benchmarks, clustering of a dataset, batch
// evaluation of explicit sets, and format conversion.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "exemplar/exemplar.hpp"

namespace {

using namespace exemplar;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitOutOfMemory = 2;

template <class Enum, class Parse>
std::vector<Enum> parse_list(const std::vector<std::string>& names, Parse parse, const char* what) {
  std::vector<Enum> out;
  for (const auto& name : names) {
    const auto v = parse(name);
    if (!v) fail(Errc::invalid_argument, std::string("unknown ") + what + " '" + name + "'");
    out.push_back(*v);
  }
  return out;
}

Backend one_backend(const std::string& name) {
  return parse_list<Backend>({name}, parse_backend, "backend").front();
}

Precision one_precision(const std::string& name) {
  return parse_list<Precision>({name}, parse_precision, "precision").front();
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot write " + path);
  return out;
}

struct BenchArgs {
  std::string vary = "n";
  std::vector<std::size_t> values;
  ProblemShape shape;
  std::vector<std::string> backends{"reference"};
  std::vector<std::string> precisions{"fp32"};
  std::size_t workers = 1;
  std::uint64_t seed = 1;
  std::size_t reps = 5;
  std::uint64_t memory_budget = 2ull << 30;
  std::string out;
};

int run_bench(const BenchArgs& args) {
  BenchConfig config;
  const auto axis = parse_vary_axis(args.vary);
  if (!axis) fail(Errc::invalid_argument, "unknown axis '" + args.vary + "'");
  config.vary = *axis;
  config.values = args.values;
  config.fixed = args.shape;
  config.backends = parse_list<Backend>(args.backends, parse_backend, "backend");
  config.precisions = parse_list<Precision>(args.precisions, parse_precision, "precision");
  config.repetitions = args.reps;
  config.seed = args.seed;
  config.workers = args.workers;
  config.memory_budget = args.memory_budget;

  const auto records = run_benchmark(config, ChunkedExecutor{}, [](const BenchRecord& r) {
    std::fprintf(stderr, "%s=%zu %s %s: %s\n", std::string(to_string(r.vary)).c_str(),
                 r.vary == VaryAxis::n ? r.n : r.vary == VaryAxis::l ? r.l : r.k,
                 std::string(to_string(r.precision)).c_str(), std::string(to_string(r.backend)).c_str(),
                 r.failed ? "out of memory" : (std::to_string(r.runtime_seconds) + " s").c_str());
  });
  if (args.out.empty()) {
    write_bench_csv(std::cout, records);
  } else {
    auto out = open_output(args.out);
    write_bench_csv(out, records);
  }
  for (const auto& r : records)
    if (r.failed) return kExitOutOfMemory;
  return kExitOk;
}

struct ClusterArgs {
  std::string input;
  std::size_t k = 10;
  std::string backend = "tiled";
  std::string precision = "fp32";
  std::size_t workers = 1;
  std::optional<std::uint64_t> memory_budget;
  std::string out;
  std::string labels;
};

template <class T>
int cluster_as(const ClusterArgs& args, const std::vector<std::vector<double>>& rows) {
  const auto ground = build_ground_set<T>(rows);
  const Evaluator evaluator{one_backend(args.backend), {}, args.workers};
  const auto result = greedy_maximize(ground, args.k, evaluator, args.memory_budget);

  VectorSet<T> exemplars;
  for (std::size_t i : result.exemplar_indices) exemplars.push_back(ground.vector(i));

  std::ofstream file;
  if (!args.out.empty()) file = open_output(args.out);
  std::ostream& out = args.out.empty() ? std::cout : file;
  out << "step,index,value";
  for (std::size_t k = 0; k < ground.d(); ++k) out << ",x" << k;
  out << '\n';
  char buf[32];
  for (std::size_t s = 0; s < exemplars.size(); ++s) {
    std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(result.values[s]));
    out << s + 1 << ',' << result.exemplar_indices[s] << ',' << buf;
    for (const T& x : exemplars[s]) {
      std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(scalar_traits<T>::load(x)));
      out << ',' << buf;
    }
    out << '\n';
  }

  if (!args.labels.empty() && !exemplars.empty()) {
    auto labels = open_output(args.labels);
    labels << "label\n";
    for (std::size_t label : assign_clusters(ground, std::span<const std::vector<T>>(exemplars)))
      labels << label << '\n';
  }
  std::fprintf(stderr, "%zu evaluations\n", static_cast<std::size_t>(result.evaluations));
  return kExitOk;
}

struct EvalArgs {
  std::string input;
  std::string sets;
  std::string backend = "reference";
  std::string precision = "fp32";
  std::size_t workers = 1;
  std::optional<std::uint64_t> memory_budget;
};

template <class T>
int eval_as(const EvalArgs& args, const std::vector<std::vector<double>>& rows) {
  const auto ground = build_ground_set<T>(rows);
  std::ifstream in(args.sets);
  if (!in) fail(Errc::io_error, "cannot open " + args.sets);
  const auto batch = EvaluationBatch<T>::from_values(io::read_sets_csv(in));
  const Evaluator evaluator{one_backend(args.backend), {}, args.workers};
  const auto values = args.memory_budget
                          ? evaluate_chunked(evaluator, ground, batch, *args.memory_budget)
                          : evaluate_batch(evaluator, ground, batch);
  for (auto v : values) std::printf("%.17g\n", static_cast<double>(v));
  return kExitOk;
}

struct ConvertArgs {
  std::string input;
  std::string out;
  std::string precision = "fp32";
};

template <class T>
int convert_as(const ConvertArgs& args, const std::vector<std::vector<double>>& rows) {
  const auto ground = build_ground_set<T>(rows);
  std::ofstream out(args.out, std::ios::binary);
  if (!out) fail(Errc::io_error, "cannot write " + args.out);
  io::write_exem(out, ground);
  return kExitOk;
}

int run_info() {
  const DeviceLimits limits;
  std::printf("exemplar %s\n", std::string(kVersion).c_str());
  std::printf("max_threads_per_block %zu\n", limits.max_threads_per_block);
  std::printf("shared_memory_bytes %zu\n", limits.shared_memory_bytes);
  std::printf("segment_bytes %zu\n", limits.segment_bytes);
  std::printf("warp_size %zu\n", limits.warp_size);
  std::printf("global_memory_bytes %llu\n", static_cast<unsigned long long>(limits.global_memory_bytes));
  std::printf("hardware_threads %u\n", std::thread::hardware_concurrency());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exemplar-based clustering with batched evaluation"};
  app.require_subcommand(1);

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time evaluation while varying one of n, l, k");
  bench_cmd->add_option("--vary", bench.vary, "Axis to vary: n, l or k")->check(CLI::IsMember({"n", "l", "k"}));
  bench_cmd->add_option("--values", bench.values, "Values of the varied axis")->delimiter(',')->required();
  bench_cmd->add_option("--n", bench.shape.n, "Ground set size")->capture_default_str();
  bench_cmd->add_option("--l", bench.shape.l, "Sets per batch")->capture_default_str();
  bench_cmd->add_option("--k", bench.shape.k, "Set cardinality")->capture_default_str();
  bench_cmd->add_option("--d", bench.shape.d, "Dimensionality")->capture_default_str();
  bench_cmd->add_option("--backend", bench.backends, "reference, parallel, tiled")->delimiter(',');
  bench_cmd->add_option("--precision", bench.precisions, "fp16, fp32, fp64")->delimiter(',');
  bench_cmd->add_option("--workers", bench.workers)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench.seed);
  bench_cmd->add_option("--reps", bench.reps)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--memory-budget", bench.memory_budget, "Bytes available per batch");
  bench_cmd->add_option("--out", bench.out, "CSV output (default stdout)");

  ClusterArgs cluster;
  auto* cluster_cmd = app.add_subcommand("cluster", "Greedy exemplar selection on a dataset");
  cluster_cmd->add_option("--input", cluster.input, "CSV or .exem file")->required();
  cluster_cmd->add_option("--k", cluster.k, "Number of exemplars")->required();
  cluster_cmd->add_option("--backend", cluster.backend)->capture_default_str();
  cluster_cmd->add_option("--precision", cluster.precision)->capture_default_str();
  cluster_cmd->add_option("--workers", cluster.workers)->check(CLI::PositiveNumber);
  cluster_cmd->add_option("--memory-budget", cluster.memory_budget, "Bytes available per batch");
  cluster_cmd->add_option("--out", cluster.out, "Exemplar CSV (default stdout)");
  cluster_cmd->add_option("--labels", cluster.labels, "Per-observation cluster labels");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate f on the sets of a CSV file");
  eval_cmd->add_option("--input", eval.input, "CSV or .exem file")->required();
  eval_cmd->add_option("--sets", eval.sets, "CSV rows: set_id,x_1,...,x_d")->required();
  eval_cmd->add_option("--backend", eval.backend)->capture_default_str();
  eval_cmd->add_option("--precision", eval.precision)->capture_default_str();
  eval_cmd->add_option("--workers", eval.workers)->check(CLI::PositiveNumber);
  eval_cmd->add_option("--memory-budget", eval.memory_budget, "Bytes available per batch");

  ConvertArgs convert;
  auto* convert_cmd = app.add_subcommand("convert", "Write a dataset as a binary .exem file");
  convert_cmd->add_option("--input", convert.input)->required();
  convert_cmd->add_option("--out", convert.out)->required();
  convert_cmd->add_option("--precision", convert.precision)->capture_default_str();

  auto* info_cmd = app.add_subcommand("info", "Print device-model defaults and version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*bench_cmd) return run_bench(bench);
    if (*info_cmd) return run_info();
    if (*cluster_cmd) {
      const auto rows = io::load_observations(cluster.input);
      return dispatch_precision(one_precision(cluster.precision), [&]<class T>(std::type_identity<T>) {
        return cluster_as<T>(cluster, rows);
      });
    }
    if (*eval_cmd) {
      const auto rows = io::load_observations(eval.input);
      return dispatch_precision(one_precision(eval.precision), [&]<class T>(std::type_identity<T>) {
        return eval_as<T>(eval, rows);
      });
    }
    if (*convert_cmd) {
      const auto rows = io::load_observations(convert.input);
      return dispatch_precision(one_precision(convert.precision), [&]<class T>(std::type_identity<T>) {
        return convert_as<T>(convert, rows);
      });
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == Errc::out_of_memory ? kExitOutOfMemory : kExitUsage;
  }
  return kExitUsage;
}
