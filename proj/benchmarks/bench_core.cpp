#include <benchmark/benchmark.h>

#include "ctpji/contour.hpp"
#include "ctpji/dicom_lite.hpp"
#include "ctpji/hounsfield.hpp"
#include "ctpji/patch.hpp"
#include "ctpji/phantom.hpp"

using namespace ctpji;

namespace {

phantom::PhantomSpec bench_spec(int size) {
    phantom::PhantomSpec spec;
    spec.patient_id = "BM";
    spec.label = Label::Infected;
    spec.num_slices = 1;
    spec.implant_first = 1;
    spec.implant_last = 1;
    spec.image_size = size;
    spec.seed = 42;
    spec.geometry = phantom::random_geometry(spec.seed, size);
    return spec;
}

const dicom::RawSlice& raw_slice() {
    static const auto raw = phantom::generate_slice(bench_spec(512), 1);
    return raw;
}

const hu::HuSlice& hu_slice() {
    static const auto slice = hu::to_hounsfield(raw_slice());
    return slice;
}

}  // namespace

static void BM_ParseDicom(benchmark::State& state) {
    const auto bytes = dicom::write_dicom_lite(raw_slice());
    for (auto _ : state) benchmark::DoNotOptimize(dicom::parse_dicom(bytes));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * bytes.size()));
}
BENCHMARK(BM_ParseDicom);

static void BM_ToHounsfield(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(hu::to_hounsfield(raw_slice()));
}
BENCHMARK(BM_ToHounsfield);

static void BM_TraceContours(benchmark::State& state) {
    const auto mask = hu::bone_mask(hu_slice());
    for (auto _ : state) benchmark::DoNotOptimize(contour::trace_contours(mask));
}
BENCHMARK(BM_TraceContours);

static void BM_PrincipalCentroid(benchmark::State& state) {
    const auto mask = hu::bone_mask(hu_slice());
    const auto contours = contour::trace_contours(mask);
    for (auto _ : state) benchmark::DoNotOptimize(contour::principal_centroid(contours, mask));
}
BENCHMARK(BM_PrincipalCentroid);

static void BM_EqualizeHist(benchmark::State& state) {
    const auto window = patch::extract_patch(hu_slice(), {256.0, 256.0});
    for (auto _ : state) benchmark::DoNotOptimize(patch::equalize_hist(window, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_EqualizeHist)->Arg(256)->Arg(4096);

static void BM_SlicePrep(benchmark::State& state) {
    const auto bytes = dicom::write_dicom_lite(raw_slice());
    for (auto _ : state) {
        const auto slice = hu::to_hounsfield(dicom::parse_dicom(bytes));
        if (hu::contains_prosthesis(slice)) benchmark::DoNotOptimize(patch::encode_pgm(patch::make_patch(slice).pixels));
    }
}
BENCHMARK(BM_SlicePrep)->Unit(benchmark::kMillisecond);

static void BM_GenerateSlice(benchmark::State& state) {
    const auto spec = bench_spec(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(phantom::generate_slice(spec, 1));
}
BENCHMARK(BM_GenerateSlice)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
