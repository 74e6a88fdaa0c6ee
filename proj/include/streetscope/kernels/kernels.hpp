#pragma once

#include <cstddef>
#include <cstdint>

namespace streetscope::kernels {

enum class Isa { scalar, avx2 };

// Inner-loop kernels used by the imaging and stability modules. Every entry
// has a scalar reference implementation and (on x86-64) an AVX2 variant; the
// two are required to produce bit-identical output, which the kernel tests
// assert. Identical expression order and no FMA contraction keep float paths
// exact; the f64 window-statistics paths are integer-valued and exact anyway.
struct Ops {
  const char* name;

  // Horizontal pass of a separable convolution, replicate borders.
  // taps holds 2*radius+1 coefficients.
  void (*conv_rows_f32)(const float* src, float* dst, int width, int height,
                        const float* taps, int radius);
  // Vertical pass, replicate borders.
  void (*conv_cols_f32)(const float* src, float* dst, int width, int height,
                        const float* taps, int radius);

  // dst[i] = gain * src[i]
  void (*scale_u8_f32)(const std::uint8_t* src, float* dst, std::size_t n,
                       float gain);

  // Four 3x3 directional derivative filters. mag = hypot of the axis-aligned
  // pair; sector = argmax |response| mapped to the non-maximum-suppression
  // neighbour axis: 0 = horizontal, 1 = down-right diagonal, 2 = vertical,
  // 3 = up-right diagonal. The 1px border is zeroed.
  void (*gradient4_f32)(const float* src, int width, int height, float* mag,
                        std::uint8_t* sector);

  // Pixelwise conversion/products feeding windowed statistics:
  // fx = x, fy = y, xx = x*x, yy = y*y, xy = x*y (all f64, exact).
  void (*products_u8_f64)(const std::uint8_t* x, const std::uint8_t* y,
                          std::size_t n, double* fx, double* fy, double* xx,
                          double* yy, double* xy);

  // Vertical sliding box sum of height win; dst has height - win + 1 rows.
  void (*box_cols_f64)(const double* src, double* dst, int width, int height,
                       int win);

  // acc[i] += src[i]
  void (*accumulate_u32)(const std::uint8_t* src, std::uint32_t* acc,
                         std::size_t n);

  // Totals for mean/std screening of frames.
  void (*sum_sumsq_u8)(const std::uint8_t* src, std::size_t n,
                       std::uint64_t* sum, std::uint64_t* sumsq);
};

// Active implementation. Picked once: AVX2 when the CPU supports it, unless
// the environment variable STREETSCOPE_ISA=scalar (or =avx2) overrides.
const Ops& ops();
Isa active_isa();
bool cpu_has_avx2();

// Explicit selection, primarily for the equivalence tests.
// Returns false if the requested ISA is unavailable.
bool force_isa(Isa isa);

const Ops& scalar_ops();
const Ops* avx2_ops();  // nullptr when unsupported

// Horizontal sliding box sum (row-sequential, no vector variant);
// dst has width - win + 1 columns per row.
void box_rows_f64(const double* src, double* dst, int width, int height,
                  int win);

}  // namespace streetscope::kernels
