#include <aspl/kernels.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

namespace aspl::reference {

void median_filter(const Image& in, int kw, int kh, Image& out) {
    out = Image(in.width(), in.height());
    const int ax = window_anchor(kw);
    const int ay = window_anchor(kh);
    std::vector<double> window;
    for (int y = 0; y < in.height(); ++y) {
        for (int x = 0; x < in.width(); ++x) {
            window.clear();
            for (int j = 0; j < kh; ++j) {
                for (int i = 0; i < kw; ++i) {
                    window.push_back(in.clamped(x - ax + i, y - ay + j));
                }
            }
            std::sort(window.begin(), window.end());
            const std::size_t n = window.size();
            out.at(x, y) = n % 2 == 1 ? window[n / 2] : (window[n / 2 - 1] + window[n / 2]) / 2.0;
        }
    }
}

void gradient(const Image& in, Image& gx, Image& gy) {
    const int w = in.width();
    const int h = in.height();
    gx = Image(w, h);
    gy = Image(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (w > 1) {
                if (x == 0) {
                    gx.at(x, y) = in.at(1, y) - in.at(0, y);
                } else if (x == w - 1) {
                    gx.at(x, y) = in.at(w - 1, y) - in.at(w - 2, y);
                } else {
                    gx.at(x, y) = (in.at(x + 1, y) - in.at(x - 1, y)) / 2.0;
                }
            }
            if (h > 1) {
                if (y == 0) {
                    gy.at(x, y) = in.at(x, 1) - in.at(x, 0);
                } else if (y == h - 1) {
                    gy.at(x, y) = in.at(x, h - 1) - in.at(x, h - 2);
                } else {
                    gy.at(x, y) = (in.at(x, y + 1) - in.at(x, y - 1)) / 2.0;
                }
            }
        }
    }
}

double gvf_step(const Image& u, const Image& v, const Image& fx, const Image& fy, const Image& b,
                double mu, double dt, Image& u_out, Image& v_out) {
    u_out = Image(u.width(), u.height());
    v_out = Image(u.width(), u.height());
    double max_change = 0.0;
    for (int y = 0; y < u.height(); ++y) {
        for (int x = 0; x < u.width(); ++x) {
            const double lap_u = u.clamped(x - 1, y) + u.clamped(x + 1, y) + u.clamped(x, y - 1) +
                                 u.clamped(x, y + 1) - 4.0 * u.at(x, y);
            const double lap_v = v.clamped(x - 1, y) + v.clamped(x + 1, y) + v.clamped(x, y - 1) +
                                 v.clamped(x, y + 1) - 4.0 * v.at(x, y);
            const double du = dt * (mu * lap_u - b.at(x, y) * (u.at(x, y) - fx.at(x, y)));
            const double dv = dt * (mu * lap_v - b.at(x, y) * (v.at(x, y) - fy.at(x, y)));
            u_out.at(x, y) = u.at(x, y) + du;
            v_out.at(x, y) = v.at(x, y) + dv;
            max_change = std::max({max_change, std::abs(du), std::abs(dv)});
        }
    }
    return max_change;
}

double gvf_energy(const Image& u, const Image& v, const Image& fx, const Image& fy,
                  const Image& b, double mu) {
    double energy = 0.0;
    for (int y = 0; y < u.height(); ++y) {
        for (int x = 0; x < u.width(); ++x) {
            if (x + 1 < u.width()) {
                const double du = u.at(x + 1, y) - u.at(x, y);
                const double dv = v.at(x + 1, y) - v.at(x, y);
                energy += mu * (du * du + dv * dv);
            }
            if (y + 1 < u.height()) {
                const double du = u.at(x, y + 1) - u.at(x, y);
                const double dv = v.at(x, y + 1) - v.at(x, y);
                energy += mu * (du * du + dv * dv);
            }
            const double ru = u.at(x, y) - fx.at(x, y);
            const double rv = v.at(x, y) - fy.at(x, y);
            energy += b.at(x, y) * (ru * ru + rv * rv);
        }
    }
    return energy;
}

void reduce(const Image& in, Image& out) {
    out = Image(in.width() / 2, in.height() / 2);
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            double acc = 0.0;
            for (int j = 0; j < 5; ++j) {
                for (int i = 0; i < 5; ++i) {
                    acc += kBinomial5[i] * kBinomial5[j] * in.clamped(2 * x + i - 2, 2 * y + j - 2);
                }
            }
            out.at(x, y) = acc;
        }
    }
}

} // namespace aspl::reference
