#include <benchmark/benchmark.h>

#include "ugc/compiler.hpp"
#include "ugc/language_model.hpp"
#include "ugc/oracle.hpp"
#include "ugc/pfsg.hpp"

namespace {

ugc::Grammar shuttle(const char* file) { return ugc::load_grammar(std::string(UGC_ASSET_DIR) + "/shuttle/" + file); }

void BM_Compile(benchmark::State& state, const char* file) {
  auto g = shuttle(file);
  for (auto _ : state) benchmark::DoNotOptimize(ugc::compile(g));
}
BENCHMARK_CAPTURE(BM_Compile, no_rels, "no_rels.ugr")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Compile, rels, "rels.ugr")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Compile, unlinked, "unlinked.ugr")->Unit(benchmark::kMillisecond);

void BM_BuildPfsg(benchmark::State& state) {
  auto cfg = ugc::compile(shuttle("rels.ugr")).cfg;
  for (auto _ : state) benchmark::DoNotOptimize(ugc::build_pfsg(cfg));
}
BENCHMARK(BM_BuildPfsg)->Unit(benchmark::kMillisecond);

void BM_OracleEnumerate(benchmark::State& state) {
  auto g = shuttle("rels.ugr");
  for (auto _ : state) benchmark::DoNotOptimize(ugc::oracle_enumerate(g, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_OracleEnumerate)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_CfgEnumerate(benchmark::State& state) {
  auto cfg = ugc::compile(shuttle("rels.ugr")).cfg;
  for (auto _ : state) benchmark::DoNotOptimize(ugc::cfg_enumerate(cfg, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_CfgEnumerate)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_OracleParse(benchmark::State& state) {
  auto g = shuttle("rels.ugr");
  auto tokens = ugc::tokenize("can you find out when the fixed sensors say the temperature at flight deck reached thirty degrees celsius");
  for (auto _ : state) benchmark::DoNotOptimize(ugc::oracle_parse(g, tokens));
}
BENCHMARK(BM_OracleParse)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
