#include <aspl/kernels.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

namespace aspl::kernels {

namespace {

inline int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

} // namespace

void median_filter(const Image& in, int kw, int kh, Image& out) {
    const int w = in.width();
    const int h = in.height();
    out = Image(w, h);
    const int ax = window_anchor(kw);
    const int ay = window_anchor(kh);
    const std::size_t n = static_cast<std::size_t>(kw) * static_cast<std::size_t>(kh);
#pragma omp parallel
    {
        std::vector<double> window(n);
        std::vector<const double*> rows(static_cast<std::size_t>(kh));
        std::vector<int> cols(static_cast<std::size_t>(kw));
#pragma omp for schedule(static)
        for (int y = 0; y < h; ++y) {
            for (int j = 0; j < kh; ++j) {
                rows[static_cast<std::size_t>(j)] = in.row(clamp_index(y - ay + j, h));
            }
            double* dst = out.row(y);
            for (int x = 0; x < w; ++x) {
                for (int i = 0; i < kw; ++i) {
                    cols[static_cast<std::size_t>(i)] = clamp_index(x - ax + i, w);
                }
                std::size_t k = 0;
                for (int j = 0; j < kh; ++j) {
                    for (int i = 0; i < kw; ++i) {
                        window[k++] = rows[static_cast<std::size_t>(j)][cols[static_cast<std::size_t>(i)]];
                    }
                }
                const auto mid = window.begin() + static_cast<std::ptrdiff_t>(n / 2);
                std::nth_element(window.begin(), mid, window.end());
                if (n % 2 == 1) {
                    dst[x] = *mid;
                } else {
                    const double lower = *std::max_element(window.begin(), mid);
                    dst[x] = (lower + *mid) / 2.0;
                }
            }
        }
    }
}

void gradient(const Image& in, Image& gx, Image& gy) {
    const int w = in.width();
    const int h = in.height();
    gx = Image(w, h);
    gy = Image(w, h);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        const double* r = in.row(y);
        double* ox = gx.row(y);
        double* oy = gy.row(y);
        if (w > 1) {
            ox[0] = r[1] - r[0];
            for (int x = 1; x < w - 1; ++x) {
                ox[x] = (r[x + 1] - r[x - 1]) / 2.0;
            }
            ox[w - 1] = r[w - 1] - r[w - 2];
        }
        if (h > 1) {
            const double* up = in.row(y == 0 ? 0 : y - 1);
            const double* down = in.row(y == h - 1 ? h - 1 : y + 1);
            if (y == 0 || y == h - 1) {
                for (int x = 0; x < w; ++x) {
                    oy[x] = down[x] - up[x];
                }
            } else {
                for (int x = 0; x < w; ++x) {
                    oy[x] = (down[x] - up[x]) / 2.0;
                }
            }
        }
    }
}

double gvf_step(const Image& u, const Image& v, const Image& fx, const Image& fy, const Image& b,
                double mu, double dt, Image& u_out, Image& v_out) {
    const int w = u.width();
    const int h = u.height();
    u_out = Image(w, h);
    v_out = Image(w, h);
    double max_change = 0.0;
#pragma omp parallel for schedule(static) reduction(max : max_change)
    for (int y = 0; y < h; ++y) {
        const double* ur = u.row(y);
        const double* uu = u.row(clamp_index(y - 1, h));
        const double* ud = u.row(clamp_index(y + 1, h));
        const double* vr = v.row(y);
        const double* vu = v.row(clamp_index(y - 1, h));
        const double* vd = v.row(clamp_index(y + 1, h));
        const double* fxr = fx.row(y);
        const double* fyr = fy.row(y);
        const double* br = b.row(y);
        double* uo = u_out.row(y);
        double* vo = v_out.row(y);
        for (int x = 0; x < w; ++x) {
            const int xl = clamp_index(x - 1, w);
            const int xr = clamp_index(x + 1, w);
            const double lap_u = ur[xl] + ur[xr] + uu[x] + ud[x] - 4.0 * ur[x];
            const double lap_v = vr[xl] + vr[xr] + vu[x] + vd[x] - 4.0 * vr[x];
            const double du = dt * (mu * lap_u - br[x] * (ur[x] - fxr[x]));
            const double dv = dt * (mu * lap_v - br[x] * (vr[x] - fyr[x]));
            uo[x] = ur[x] + du;
            vo[x] = vr[x] + dv;
            max_change = std::max({max_change, std::abs(du), std::abs(dv)});
        }
    }
    return max_change;
}

double gvf_energy(const Image& u, const Image& v, const Image& fx, const Image& fy,
                  const Image& b, double mu) {
    const int w = u.width();
    const int h = u.height();
    std::vector<double> rows(static_cast<std::size_t>(h), 0.0);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        const double* ur = u.row(y);
        const double* vr = v.row(y);
        const double* un = y + 1 < h ? u.row(y + 1) : nullptr;
        const double* vn = y + 1 < h ? v.row(y + 1) : nullptr;
        const double* fxr = fx.row(y);
        const double* fyr = fy.row(y);
        const double* br = b.row(y);
        double acc = 0.0;
        for (int x = 0; x < w; ++x) {
            if (x + 1 < w) {
                const double du = ur[x + 1] - ur[x];
                const double dv = vr[x + 1] - vr[x];
                acc += mu * (du * du + dv * dv);
            }
            if (un != nullptr) {
                const double du = un[x] - ur[x];
                const double dv = vn[x] - vr[x];
                acc += mu * (du * du + dv * dv);
            }
            const double ru = ur[x] - fxr[x];
            const double rv = vr[x] - fyr[x];
            acc += br[x] * (ru * ru + rv * rv);
        }
        rows[static_cast<std::size_t>(y)] = acc;
    }
    // Fixed-order reduction keeps the result independent of the thread count.
    double energy = 0.0;
    for (double r : rows) {
        energy += r;
    }
    return energy;
}

void reduce(const Image& in, Image& out) {
    const int w = in.width();
    const int h = in.height();
    const int ow = w / 2;
    const int oh = h / 2;
    out = Image(ow, oh);
    // Horizontal pass at even columns for every input row, then vertical pass.
    Image horizontal(ow, h);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        const double* r = in.row(y);
        double* o = horizontal.row(y);
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int i = 0; i < 5; ++i) {
                acc += kBinomial5[i] * r[clamp_index(2 * x + i - 2, w)];
            }
            o[x] = acc;
        }
    }
#pragma omp parallel for schedule(static)
    for (int y = 0; y < oh; ++y) {
        double* o = out.row(y);
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int j = 0; j < 5; ++j) {
                acc += kBinomial5[j] * horizontal.at(x, clamp_index(2 * y + j - 2, h));
            }
            o[x] = acc;
        }
    }
}

} // namespace aspl::kernels
