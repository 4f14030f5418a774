#include "qzeno/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace qzeno::fft {
namespace {

// (n, howmany, stride, dist, sign)
using PlanKey = std::tuple<int, int, int, int, int>;

std::mutex plan_mutex;
std::map<PlanKey, fftw_plan>& plan_cache() {
    static std::map<PlanKey, fftw_plan> cache;
    return cache;
}

fftw_plan get_plan(int n, int howmany, int stride, int dist, int sign) {
    std::lock_guard lock(plan_mutex);
    auto& cache = plan_cache();
    const PlanKey key{n, howmany, stride, dist, sign};
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    const std::size_t len = static_cast<std::size_t>(n - 1) * stride + static_cast<std::size_t>(howmany - 1) * dist + 1;
    auto* scratch = fftw_alloc_complex(len);
    int dims[1] = {n};
    fftw_plan plan = fftw_plan_many_dft(1, dims, howmany, scratch, nullptr, stride, dist, scratch, nullptr, stride,
                                        dist, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    cache.emplace(key, plan);
    return plan;
}

void run(cplx* data, int n, int howmany, int stride, int dist, int sign) {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(get_plan(n, howmany, stride, dist, sign), p, p);
}

}  // namespace

void columns(Eigen::MatrixXcd& a, int sign) {
    run(a.data(), static_cast<int>(a.rows()), static_cast<int>(a.cols()), 1, static_cast<int>(a.rows()), sign);
}

void rows(Eigen::MatrixXcd& a, int sign) {
    run(a.data(), static_cast<int>(a.cols()), static_cast<int>(a.rows()), static_cast<int>(a.rows()), 1, sign);
}

void vector(cplx* data, int n, int sign) { run(data, n, 1, 1, n, sign); }

Eigen::MatrixXcd upsample2(const Eigen::MatrixXcd& a) {
    const int n = static_cast<int>(a.rows());
    const int N = 2 * n;
    Eigen::MatrixXcd spec = a;
    columns(spec, FFTW_FORWARD);
    rows(spec, FFTW_FORWARD);

    // Each coarse bin maps to one or two fine bins with weights.
    auto targets = [&](int k, int (&out)[2], double (&w)[2]) {
        const int s = k < n / 2 ? k : k - n;
        if (s == -n / 2) {
            out[0] = N - n / 2;
            out[1] = n / 2;
            w[0] = w[1] = 0.5;
            return 2;
        }
        out[0] = s >= 0 ? s : s + N;
        w[0] = 1.0;
        return 1;
    };

    Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(N, N);
    for (int j = 0; j < n; ++j) {
        int tj[2];
        double wj[2];
        const int cj = targets(j, tj, wj);
        for (int i = 0; i < n; ++i) {
            int ti[2];
            double wi[2];
            const int ci = targets(i, ti, wi);
            const cplx v = spec(i, j);
            for (int b = 0; b < cj; ++b)
                for (int c = 0; c < ci; ++c) big(ti[c], tj[b]) += wi[c] * wj[b] * v;
        }
    }
    columns(big, FFTW_BACKWARD);
    rows(big, FFTW_BACKWARD);
    big /= static_cast<double>(n) * n;
    return big;
}

}  // namespace qzeno::fft
