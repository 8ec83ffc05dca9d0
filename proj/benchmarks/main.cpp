#include <benchmark/benchmark.h>

// The packaged benchmark_main archive carries LTO bytecode from another compiler
// release, so the entry point is compiled here instead.
BENCHMARK_MAIN();
