#include "spm/engine.hpp"
#include "spm/kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

using namespace spm;

namespace {

Scene grid_scene(int k) {
    const double pitch = 2.0 / k;
    std::vector<Polygon> squares;
    for (int j = 0; j < k; ++j) {
        for (int i = 0; i < k; ++i) {
            const double cx = -1.0 + pitch * (i + 0.5);
            const double cy = -1.0 + pitch * (j + 0.5);
            const double h = pitch / 4.0;
            squares.emplace_back(std::vector<Point2>{{cx - h, cy - h}, {cx + h, cy - h}, {cx + h, cy + h}, {cx - h, cy + h}});
        }
    }
    return Scene(Rect{}, std::move(squares));
}

DataEntry source_at(Point2 p) {
    DataEntry g;
    g.p1 = p;
    g.p2 = p;
    g.status = EntryStatus::source;
    g.kind = EntryKind::source_point;
    g.distance = 0.0;
    g.original_index = 1;
    return g;
}

const Point2 kSource{0.0123, 0.0061};

std::vector<Triangle> grid_shadow(int k, int r) {
    EngineConfig config;
    config.resolution = r;
    return shadow_triangles(grid_scene(k), source_at(kSource), config);
}

template <void (*Rasterize)(std::span<const Triangle>, const RasterGrid&, StencilGrid&)>
void BM_rasterize(benchmark::State& state) {
    const int r = static_cast<int>(state.range(0));
    const std::vector<Triangle> tris = grid_shadow(10, r);
    const RasterGrid grid{Rect{}, r};
    for (auto _ : state) {
        StencilGrid out(r);
        Rasterize(tris, grid, out);
        benchmark::DoNotOptimize(out.cells.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tris.size()));
}

template <void (*Fill)(Framebuffer&, const StencilGrid&, const ConeApex&)>
void BM_cone_fill(benchmark::State& state) {
    const int r = static_cast<int>(state.range(0));
    const RasterGrid grid{Rect{}, r};
    StencilGrid shadow(r);
    rasterize_serial(grid_shadow(10, r), grid, shadow);
    const ConeApex apex{kSource, kSource, false, 0.0, 1};
    for (auto _ : state) {
        Framebuffer fb(Rect{}, r);
        Fill(fb, shadow, apex);
        benchmark::DoNotOptimize(fb.distances().data());
    }
    state.SetItemsProcessed(state.iterations() * r * r);
}

void BM_build(benchmark::State& state, Execution execution) {
    const Scene scene = grid_scene(static_cast<int>(state.range(0)));
    SourceSpec sources;
    sources.points = {kSource};
    EngineConfig config;
    config.resolution = static_cast<int>(state.range(1));
    config.execution = execution;
    for (auto _ : state) {
        const SpmResult spm = build_spm(scene, sources, config);
        benchmark::DoNotOptimize(spm.framebuffer.distances().data());
    }
}

} // namespace

BENCHMARK(BM_rasterize<rasterize_serial>)->Name("rasterize/serial")->Arg(256)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_rasterize<rasterize_parallel>)->Name("rasterize/parallel")->Arg(256)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cone_fill<cone_fill_serial>)->Name("cone_fill/serial")->Arg(256)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cone_fill<cone_fill_parallel>)->Name("cone_fill/parallel")->Arg(256)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_build, serial, Execution::serial)->Args({4, 256})->Args({10, 256})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_build, parallel, Execution::parallel)
    ->Args({4, 256})
    ->Args({10, 256})
    ->Args({10, 1000})
    ->Args({20, 1000})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
