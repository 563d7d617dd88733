#pragma once

// Dormand-Prince 5(4) integrator with PI step control, Hairer's continuous
// extension for dense output, and bracketed event location.

#include "errors.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace memsfold {

struct Tolerance {
    double abs = 1e-10;
    double rel = 1e-10;
};

struct IntegratorOptions {
    Tolerance tol;
    double event_tol = 1e-12;
    double h_init = 0.0; // 0 selects the step automatically
    double h_max = 0.0;  // 0 means |t1 - t0|
    std::size_t max_steps = 2'000'000;
};

enum class EventDirection { Any, Up, Down };

template <std::size_t N>
using StateN = std::array<double, N>;

template <std::size_t N>
struct EventSpec {
    std::string id;
    std::function<double(double, const StateN<N>&)> f;
    EventDirection direction = EventDirection::Any;
    bool terminal = false;
};

template <std::size_t N>
struct EventRecord {
    double t;
    StateN<N> y;
    std::string id;
};

template <std::size_t N>
class Trajectory {
public:
    const std::vector<double>& times() const noexcept { return t_; }
    const std::vector<StateN<N>>& states() const noexcept { return y_; }
    const std::vector<EventRecord<N>>& events() const noexcept { return events_; }

    double t_begin() const { return t_.front(); }
    double t_end() const { return t_.back(); }
    const StateN<N>& back() const { return y_.back(); }
    std::size_t size() const noexcept { return t_.size(); }

    // True when a terminal event stopped the integration.
    bool terminated() const noexcept { return terminal_.has_value(); }
    const std::optional<EventRecord<N>>& terminal_event() const noexcept { return terminal_; }

    std::size_t rhs_evaluations() const noexcept { return nfev_; }

    // Dense output of order 4 between nodes; reproduces nodes exactly.
    StateN<N> at(double t) const
    {
        const bool forward = t_.back() >= t_.front();
        auto cmp = [forward](double a, double b) { return forward ? a < b : a > b; };
        auto it = std::upper_bound(t_.begin(), t_.end(), t, cmp);
        std::size_t i = static_cast<std::size_t>(it - t_.begin());
        i = (i == 0) ? 0 : std::min(i - 1, t_.size() - 2);
        if (t_.size() < 2)
            return y_.front();
        return interpolate(i, t);
    }

    // Internal: appended by integrate().
    void push_node(double t, const StateN<N>& y) { t_.push_back(t); y_.push_back(y); }
    void push_segment(double h, const std::array<StateN<N>, 5>& coeffs)
    {
        seg_h_.push_back(h);
        dense_.push_back(coeffs);
    }
    // Moves the last node back to an interior point of the final step.
    void truncate_last(double t, const StateN<N>& y)
    {
        t_.back() = t;
        y_.back() = y;
    }
    void push_event(EventRecord<N> e) { events_.push_back(std::move(e)); }
    void set_terminal(EventRecord<N> e) { terminal_ = std::move(e); }
    void add_nfev(std::size_t n) { nfev_ += n; }

    StateN<N> interpolate(std::size_t seg, double t) const
    {
        const double h = seg_h_[seg];
        const double th = (t - t_[seg]) / h;
        const double th1 = 1.0 - th;
        const auto& r = dense_[seg];
        StateN<N> out;
        for (std::size_t k = 0; k < N; ++k)
            out[k] = r[0][k] + th * (r[1][k] + th1 * (r[2][k] + th * (r[3][k] + th1 * r[4][k])));
        return out;
    }

private:
    std::vector<double> t_;
    std::vector<StateN<N>> y_;
    std::vector<double> seg_h_;
    std::vector<std::array<StateN<N>, 5>> dense_;
    std::vector<EventRecord<N>> events_;
    std::optional<EventRecord<N>> terminal_;
    std::size_t nfev_ = 0;
};

namespace detail {

struct DP5 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                            a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double d1 = -12715105075.0 / 11282082432.0,
                            d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0,
                            d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
};

inline bool crossed(double g0, double g1, EventDirection dir)
{
    const bool up = g0 < 0.0 && g1 >= 0.0;
    const bool down = g0 > 0.0 && g1 <= 0.0;
    switch (dir) {
    case EventDirection::Up: return up;
    case EventDirection::Down: return down;
    case EventDirection::Any: return up || down;
    }
    return false;
}

template <std::size_t N>
bool all_finite(const StateN<N>& y)
{
    return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

} // namespace detail

// Integrates y' = rhs(t, y) from t0 towards t1. Terminal events stop the
// integration at the located event time, which then becomes the last node.
template <std::size_t N, class Rhs>
Trajectory<N> integrate(Rhs&& rhs, const StateN<N>& y0, double t0, double t1,
                        const std::vector<EventSpec<N>>& events = {},
                        const IntegratorOptions& opt = {})
{
    using detail::DP5;
    if (t0 == t1)
        throw DomainError("integrate: empty time span");

    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    const double h_max = opt.h_max > 0.0 ? opt.h_max : span;
    const double atol = opt.tol.abs;
    const double rtol = opt.tol.rel;

    Trajectory<N> traj;
    traj.push_node(t0, y0);

    auto error_norm = [&](const StateN<N>& a, const StateN<N>& b, const StateN<N>& e) {
        double s = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            const double sc = atol + rtol * std::max(std::abs(a[k]), std::abs(b[k]));
            const double r = e[k] / sc;
            s += r * r;
        }
        return std::sqrt(s / static_cast<double>(N));
    };

    double t = t0;
    StateN<N> y = y0;
    StateN<N> k1 = rhs(t, y);
    std::size_t nfev = 1;

    // starting step (Hairer & Wanner, II.4)
    double h = opt.h_init;
    if (!(h > 0.0)) {
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            const double sc = atol + rtol * std::abs(y[k]);
            d0 += (y[k] / sc) * (y[k] / sc);
            d1 += (k1[k] / sc) * (k1[k] / sc);
        }
        d0 = std::sqrt(d0 / N);
        d1 = std::sqrt(d1 / N);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, h_max);
        StateN<N> y1;
        for (std::size_t k = 0; k < N; ++k) y1[k] = y[k] + dir * h0 * k1[k];
        const StateN<N> f1 = rhs(t + dir * h0, y1);
        ++nfev;
        double d2 = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            const double sc = atol + rtol * std::abs(y[k]);
            const double r = (f1[k] - k1[k]) / sc;
            d2 += r * r;
        }
        d2 = std::sqrt(d2 / N) / h0;
        const double dm = std::max(d1, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
        h = std::min({100.0 * h0, h1, h_max});
    }
    h = std::min(h, span);

    std::vector<double> g_prev(events.size());
    for (std::size_t e = 0; e < events.size(); ++e)
        g_prev[e] = events[e].f(t, y);

    constexpr double safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
    constexpr double fac_min = 0.2, fac_max = 10.0;
    double err_old = 1e-4;
    bool rejected_last = false;

    for (std::size_t step = 0;; ++step) {
        if (step >= opt.max_steps) {
            traj.add_nfev(nfev);
            throw IntegrationError("integrate: step budget exhausted", t,
                                   std::vector<double>(y.begin(), y.end()));
        }
        const double remaining = std::abs(t1 - t);
        bool last = false;
        if (h >= remaining) {
            h = remaining;
            last = true;
        }
        const double h_floor = std::max(16.0 * std::numeric_limits<double>::epsilon() * std::abs(t),
                                        std::numeric_limits<double>::min());
        if (h < h_floor) {
            traj.add_nfev(nfev);
            throw IntegrationError("integrate: step size underflow", t,
                                   std::vector<double>(y.begin(), y.end()));
        }
        const double hs = dir * h;

        StateN<N> tmp, k2, k3, k4, k5, k6, k7, ynew, err;
        for (std::size_t k = 0; k < N; ++k) tmp[k] = y[k] + hs * DP5::a21 * k1[k];
        k2 = rhs(t + DP5::c2 * hs, tmp);
        for (std::size_t k = 0; k < N; ++k) tmp[k] = y[k] + hs * (DP5::a31 * k1[k] + DP5::a32 * k2[k]);
        k3 = rhs(t + DP5::c3 * hs, tmp);
        for (std::size_t k = 0; k < N; ++k)
            tmp[k] = y[k] + hs * (DP5::a41 * k1[k] + DP5::a42 * k2[k] + DP5::a43 * k3[k]);
        k4 = rhs(t + DP5::c4 * hs, tmp);
        for (std::size_t k = 0; k < N; ++k)
            tmp[k] = y[k] + hs * (DP5::a51 * k1[k] + DP5::a52 * k2[k] + DP5::a53 * k3[k] +
                                  DP5::a54 * k4[k]);
        k5 = rhs(t + DP5::c5 * hs, tmp);
        for (std::size_t k = 0; k < N; ++k)
            tmp[k] = y[k] + hs * (DP5::a61 * k1[k] + DP5::a62 * k2[k] + DP5::a63 * k3[k] +
                                  DP5::a64 * k4[k] + DP5::a65 * k5[k]);
        k6 = rhs(t + hs, tmp);
        for (std::size_t k = 0; k < N; ++k)
            ynew[k] = y[k] + hs * (DP5::a71 * k1[k] + DP5::a73 * k3[k] + DP5::a74 * k4[k] +
                                   DP5::a75 * k5[k] + DP5::a76 * k6[k]);
        k7 = rhs(t + hs, ynew);
        nfev += 6;
        for (std::size_t k = 0; k < N; ++k)
            err[k] = hs * (DP5::e1 * k1[k] + DP5::e3 * k3[k] + DP5::e4 * k4[k] + DP5::e5 * k5[k] +
                           DP5::e6 * k6[k] + DP5::e7 * k7[k]);

        const double en = (detail::all_finite(ynew) && detail::all_finite(k7))
                              ? error_norm(y, ynew, err)
                              : std::numeric_limits<double>::infinity();

        if (!(en <= 1.0)) {
            const double fac = std::isfinite(en) ? std::max(fac_min, safe * std::pow(en, -expo1)) : fac_min;
            h *= std::min(1.0, fac);
            rejected_last = true;
            continue;
        }

        // accepted
        std::array<StateN<N>, 5> dense;
        for (std::size_t k = 0; k < N; ++k) {
            const double dy = ynew[k] - y[k];
            const double bspl = hs * k1[k] - dy;
            dense[0][k] = y[k];
            dense[1][k] = dy;
            dense[2][k] = bspl;
            dense[3][k] = dy - hs * k7[k] - bspl;
            dense[4][k] = hs * (DP5::d1 * k1[k] + DP5::d3 * k3[k] + DP5::d4 * k4[k] +
                                DP5::d5 * k5[k] + DP5::d6 * k6[k] + DP5::d7 * k7[k]);
        }
        const double tnew = last ? t1 : t + hs;
        traj.push_node(tnew, ynew);
        traj.push_segment(hs, dense);
        const std::size_t seg = traj.size() - 2;

        // events inside [t, tnew]
        std::optional<EventRecord<N>> first_terminal;
        std::vector<EventRecord<N>> found;
        for (std::size_t e = 0; e < events.size(); ++e) {
            const double g_new = events[e].f(tnew, ynew);
            if (detail::crossed(g_prev[e], g_new, events[e].direction)) {
                auto g_of = [&](double tt) { return events[e].f(tt, traj.interpolate(seg, tt)); };
                double te = tnew;
                if (g_new != 0.0) {
                    std::uintmax_t iters = 200;
                    auto tolf = [&](double a, double b) {
                        const double ga = g_of(a);
                        const double gb = g_of(b);
                        return std::abs(b - a) <= 4 * std::numeric_limits<double>::epsilon() * std::abs(a) ||
                               std::min(std::abs(ga), std::abs(gb)) <= opt.event_tol * 1e-3;
                    };
                    const double lo = std::min(t, tnew), hi = std::max(t, tnew);
                    const double glo = g_of(lo), ghi = g_of(hi);
                    if (glo == 0.0) {
                        te = lo;
                    } else if (ghi == 0.0 || (glo > 0.0) == (ghi > 0.0)) {
                        te = (ghi == 0.0) ? hi : tnew;
                    } else {
                        auto r = boost::math::tools::toms748_solve(g_of, lo, hi, glo, ghi, tolf, iters);
                        te = std::abs(g_of(r.first)) <= std::abs(g_of(r.second)) ? r.first : r.second;
                    }
                }
                EventRecord<N> rec{te, traj.interpolate(seg, te), events[e].id};
                if (events[e].terminal) {
                    if (!first_terminal || dir * (te - first_terminal->t) < 0.0)
                        first_terminal = rec;
                } else {
                    found.push_back(rec);
                }
            }
            g_prev[e] = g_new;
        }
        for (auto& rec : found) {
            if (!first_terminal || dir * (rec.t - first_terminal->t) <= 0.0)
                traj.push_event(rec);
        }
        if (first_terminal) {
            traj.push_event(*first_terminal);
            traj.set_terminal(*first_terminal);
            traj.add_nfev(nfev);
            traj.truncate_last(first_terminal->t, first_terminal->y);
            return traj;
        }

        // PI controller
        const double fac11 = std::pow(std::max(en, 1e-10), expo1);
        double fac = fac11 / std::pow(err_old, beta);
        fac = std::clamp(fac / safe, 1.0 / fac_max, 1.0 / fac_min);
        double hnew = h / fac;
        if (rejected_last)
            hnew = std::min(hnew, h);
        err_old = std::max(en, 1e-4);
        rejected_last = false;

        t = tnew;
        y = ynew;
        k1 = k7;
        if (last) {
            traj.add_nfev(nfev);
            return traj;
        }
        h = std::min(hnew, h_max);
    }
}

} // namespace memsfold
