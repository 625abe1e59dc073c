#pragma once

// Data-parallel image kernels. `kernels` holds the OpenMP row-parallel
// versions used by the library; `reference` holds plain serial versions kept
// for testing and benchmarking. Both produce identical results except for
// floating-point summation order in gvf_energy and operation order in reduce.

#include <aspl/image.hpp>

namespace aspl {

namespace kernels {

void median_filter(const Image& in, int kw, int kh, Image& out);
void gradient(const Image& in, Image& gx, Image& gy);
/// u_out = u + dt (mu lap(u) - b (u - fx)), likewise for v. Returns max |change|.
double gvf_step(const Image& u, const Image& v, const Image& fx, const Image& fy, const Image& b,
                double mu, double dt, Image& u_out, Image& v_out);
double gvf_energy(const Image& u, const Image& v, const Image& fx, const Image& fy,
                  const Image& b, double mu);
void reduce(const Image& in, Image& out);

} // namespace kernels

namespace reference {

void median_filter(const Image& in, int kw, int kh, Image& out);
void gradient(const Image& in, Image& gx, Image& gy);
double gvf_step(const Image& u, const Image& v, const Image& fx, const Image& fy, const Image& b,
                double mu, double dt, Image& u_out, Image& v_out);
double gvf_energy(const Image& u, const Image& v, const Image& fx, const Image& fy,
                  const Image& b, double mu);
void reduce(const Image& in, Image& out);

} // namespace reference

/// Binomial smoothing taps shared by both implementations.
inline constexpr double kBinomial5[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};

/// Offset of the output pixel inside a window of size k.
inline constexpr int window_anchor(int k) { return (k + 1) / 2 - 1; }

} // namespace aspl
