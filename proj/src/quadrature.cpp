#include "kmsec/quadrature.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "kmsec/errors.hpp"

namespace kmsec::quad {
namespace {

// Kronrod nodes on [-1, 1] (positive half, descending) with Kronrod weights;
// odd-indexed nodes are the embedded 7-point Gauss nodes.
constexpr std::array<double, 8> kXk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment kronrod(const std::function<double(double)>& f, double a, double b, int& evals) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod_sum = kWk[7] * fc;
    double gauss_sum = kWg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXk[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        kronrod_sum += kWk[j] * (f1 + f2);
        if (j % 2 == 1) gauss_sum += kWg[j / 2] * (f1 + f2);
    }
    evals += 15;
    const double value = kronrod_sum * half;
    const double error = std::abs((kronrod_sum - gauss_sum) * half);
    if (!std::isfinite(value)) {
        throw QuadratureError("integrand is not finite on [" + std::to_string(a) + ", " +
                              std::to_string(b) + "]");
    }
    return {a, b, value, error};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureControl& ctl) {
    if (!(b > a)) {
        if (a == b) return {};
        throw DomainError("integrate: upper limit below lower limit");
    }
    QuadratureResult out;
    std::priority_queue<Segment> heap;
    Segment first = kronrod(f, a, b, out.evaluations);
    double total = first.value;
    double error = first.error;
    heap.push(first);

    while (error > std::max(ctl.abs_tol, ctl.rel_tol * std::abs(total))) {
        if (static_cast<int>(heap.size()) >= ctl.max_intervals) {
            throw QuadratureError("integrate: interval budget exhausted, error estimate " +
                                  std::to_string(error));
        }
        const Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            throw QuadratureError("integrate: interval collapsed to machine resolution");
        }
        const Segment left = kronrod(f, worst.a, mid, out.evaluations);
        const Segment right = kronrod(f, mid, worst.b, out.evaluations);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum from the leaves to drop the drift of the running updates.
    total = 0.0;
    error = 0.0;
    out.intervals = static_cast<int>(heap.size());
    while (!heap.empty()) {
        total += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    out.value = total;
    out.abs_error = error;
    return out;
}

QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       const QuadratureControl& ctl) {
    auto mapped = [&](double t) {
        const double s = 1.0 - t;
        const double x = a + t / s;
        const double fx = f(x);
        // f is expected to decay; the product is 0 in the far tail.
        return fx == 0.0 ? 0.0 : fx / (s * s);
    };
    return integrate(mapped, 0.0, 1.0, ctl);
}

}  // namespace kmsec::quad
