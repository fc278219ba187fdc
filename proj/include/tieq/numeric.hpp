#pragma once

#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace tieq {

// Error-free sum of two doubles: hi + lo == a + b exactly.
struct TwoSum {
    double hi;
    double lo;
};

inline TwoSum two_sum(double a, double b) {
    const double s = a + b;
    const double bp = s - a;
    const double err = (a - (s - bp)) + (b - bp);
    return {s, err};
}

// Value carried as an unevaluated hi + lo pair. Used where exponent
// differences must cancel to well below one ulp of the operands.
struct Compensated {
    double hi = 0.0;
    double lo = 0.0;

    double value() const { return hi + lo; }

    void add(double x) {
        const TwoSum t = two_sum(hi, x);
        hi = t.hi;
        lo += t.lo;
    }

    // Accumulate a*b keeping the fma residual.
    void add_product(double a, double b) {
        const double p = a * b;
        const double perr = std::fma(a, b, -p);
        add(p);
        lo += perr;
    }
};

// Exact-to-working-precision difference of two compensated values.
inline double compensated_diff(const Compensated& a, const Compensated& b) {
    const TwoSum t = two_sum(a.hi, -b.hi);
    return t.hi + (t.lo + (a.lo - b.lo));
}

// Neumaier-compensated sum.
inline double stable_sum(std::span<const double> xs) {
    double s = 0.0, c = 0.0;
    for (double x : xs) {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    return s + c;
}

inline double stable_dot(std::span<const double> a, std::span<const double> b) {
    Compensated acc;
    for (std::size_t i = 0; i < a.size(); ++i) acc.add_product(a[i], b[i]);
    return acc.value();
}

inline double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double inf_dist(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double two_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Dense row-major matrix. Model sizes are small; nothing clever needed.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {}

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    std::span<const double> row(int i) const {
        return {a_.data() + static_cast<std::size_t>(i) * cols_, static_cast<std::size_t>(cols_)};
    }
    std::span<double> row(int i) {
        return {a_.data() + static_cast<std::size_t>(i) * cols_, static_cast<std::size_t>(cols_)};
    }

    const std::vector<double>& data() const { return a_; }

    friend Matrix operator*(const Matrix& x, const Matrix& y) {
        Matrix z(x.rows_, y.cols_);
        for (int i = 0; i < x.rows_; ++i)
            for (int k = 0; k < x.cols_; ++k) {
                const double v = x(i, k);
                if (v == 0.0) continue;
                for (int j = 0; j < y.cols_; ++j) z(i, j) += v * y(k, j);
            }
        return z;
    }

    std::vector<double> apply(std::span<const double> v) const {
        std::vector<double> out(rows_, 0.0);
        for (int i = 0; i < rows_; ++i) out[i] = stable_dot(row(i), v);
        return out;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

// Thread cap from the environment; 0 or unset means single-threaded.
inline int configured_threads() {
    const char* env = std::getenv("TIEQ_THREADS");
    if (!env) return 1;
    const int n = std::atoi(env);
    if (n <= 1) return 1;
    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    return hw > 0 ? std::min(n, hw) : n;
}

// Static block partition; each index is processed exactly once.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const int threads = configured_threads();
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace tieq
