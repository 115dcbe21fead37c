#include <benchmark/benchmark.h>

#include "ipfaudit/complexity.hpp"
#include "ipfaudit/pcap.hpp"
#include "ipfaudit/probe.hpp"
#include "ipfaudit/split.hpp"
#include "ipfaudit/synth.hpp"
#include "ipfaudit/tree.hpp"

using namespace ipfaudit;

namespace {

const GeneratedSession& flood() {
  static const GeneratedSession g = [] {
    ScenarioSpec s;
    s.kind = ScenarioKind::syn_flood;
    s.duration = 20;
    return generate(s);
  }();
  return g;
}

void BM_FitTree(benchmark::State& state) {
  const auto& d = flood().dataset;
  const std::vector<std::string> f{"frame_len", "src_port", "ttl", "window"};
  const auto x = project(d.records(), f);
  for (auto _ : state) benchmark::DoNotOptimize(fit_tree(x, d.labels()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.rows()));
}
BENCHMARK(BM_FitTree);

void BM_CvProbe(benchmark::State& state) {
  const auto& d = flood().dataset;
  const auto plans = make_cv_splits(d, 10, 1, 1);
  ProbeOptions opt;
  opt.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_probe(d, "src_port", plans, opt));
}
BENCHMARK(BM_CvProbe)->Arg(1)->Arg(4);

void BM_ComplexityReport(benchmark::State& state) {
  const auto& d = flood().dataset;
  const std::vector<std::string> f{"frame_len"};
  const auto x = project(d.records(), f);
  ComplexityOptions opt;
  opt.max_samples = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(compute_report(x, d.labels(), opt));
}
BENCHMARK(BM_ComplexityReport)->Arg(250)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_ParseCapture(benchmark::State& state) {
  const auto bytes = write_pcap(flood().dataset.records());
  for (auto _ : state) benchmark::DoNotOptimize(parse_capture(bytes));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes.size()));
}
BENCHMARK(BM_ParseCapture);

}  // namespace
BENCHMARK_MAIN();
