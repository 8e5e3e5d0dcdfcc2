#pragma once

// Gaussian von Neumann meter coupled to a system observable through
// H_int = -lambda(t) Q A. The readout variable P is shifted by lambda*a on
// the eigenvalue-a branch. The meter amplitude is
//
//     phi(P) = (2 pi Delta^2)^(-1/4) exp(-P^2 / (4 Delta^2)),
//
// so a single resolved readout component has density
// exp(-(P-lambda a)^2 / (2 Delta^2)): Delta is the standard deviation of
// the pointer distribution and the dial between the strong (Delta small)
// and weak (Delta large) regimes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tsqm/qcore.hpp"
#include "tsqm/tsv.hpp"

namespace tsqm {

struct MeterConfig {
    double lambda = 1.0;  // integrated coupling
    double delta = 1.0;   // pointer standard deviation, > 0

    void validate() const {
        if (!(delta > 0.0) || !std::isfinite(delta))
            throw std::invalid_argument("MeterConfig: delta must be positive and finite");
        if (!std::isfinite(lambda) || lambda < 0.0)
            throw std::invalid_argument("MeterConfig: lambda must be finite and >= 0");
    }
};

// Normalized readout density sampled on a uniform grid.
struct ReadoutDensity {
    std::vector<double> grid;
    std::vector<double> density;

    ReadoutDensity(std::vector<double> g, std::vector<double> d)
        : grid(std::move(g)), density(std::move(d)) {
        if (grid.size() != density.size() || grid.size() < 3)
            throw std::invalid_argument("ReadoutDensity: need >= 3 matching samples");
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (!(grid[i] > grid[i - 1]))
                throw std::invalid_argument("ReadoutDensity: grid must increase strictly");
        double mass = 0.0;
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
            if (density[i] < 0.0) {
                if (density[i] < -1e-14) throw std::invalid_argument("ReadoutDensity: negative density");
                density[i] = 0.0;
            }
            mass += 0.5 * (density[i] + density[i + 1]) * (grid[i + 1] - grid[i]);
        }
        if (!(mass > 0.0)) throw std::invalid_argument("ReadoutDensity: zero total mass");
        for (double& v : density) v /= mass;
    }

    double step() const { return grid[1] - grid[0]; }

    double trapezoid_mass(std::size_t lo, std::size_t hi) const {
        double m = 0.0;
        for (std::size_t i = lo; i + 1 <= hi; ++i)
            m += 0.5 * (density[i] + density[i + 1]) * (grid[i + 1] - grid[i]);
        return m;
    }
    double total_mass() const { return trapezoid_mass(0, grid.size() - 1); }
};

struct SampleRecord {
    double readout;
    bool postselected;
    std::uint64_t trial_index;
};

namespace detail {

inline double phi_norm(double delta) {
    return std::pow(2.0 * std::numbers::pi * delta * delta, -0.25);
}

inline double phi(double p, double center, double delta) {
    const double x = p - center;
    return phi_norm(delta) * std::exp(-x * x / (4.0 * delta * delta));
}

// Uniform grid spanning all shift centers +- 6 Delta, with step fine enough
// to resolve both the pointer width and the smallest center gap.
inline std::vector<double> readout_grid(const std::vector<double>& centers, double delta) {
    double lo = centers.front(), hi = centers.front(), gap = std::numeric_limits<double>::infinity();
    std::vector<double> sorted(centers);
    std::sort(sorted.begin(), sorted.end());
    for (double c : sorted) {
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        const double g = sorted[i] - sorted[i - 1];
        if (g > kDegenerateGap) gap = std::min(gap, g);
    }
    const double step = std::min(delta, gap) / 20.0;
    lo -= 6.0 * delta;
    hi += 6.0 * delta;
    // snap so a span that is an exact multiple of the step cannot gain or
    // lose a point to rounding
    const std::size_t n = static_cast<std::size_t>(std::ceil((hi - lo) / step - 1e-9)) + 1;
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) grid[i] = lo + step * double(i);
    return grid;
}

inline std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

// Counter-based generator: the stream for a trial depends only on
// (seed, trial_index), so parallel trial evaluation reproduces the
// sequential records exactly.
class TrialRng {
  public:
    TrialRng(std::uint64_t seed, std::uint64_t trial) {
        std::uint64_t s = seed;
        const std::uint64_t a = detail::splitmix64(s);
        state_ = a ^ (0xda942042e4dd58b5ULL * (trial + 1));
        (void)detail::splitmix64(state_);
    }
    double uniform() { return double(detail::splitmix64(state_) >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Densities

// Pre-selected-only readout density: an incoherent Gaussian mixture with
// weights |<a_i|Psi>|^2.
inline ReadoutDensity preonly_density(const StateVector& state, const Observable& obs,
                                      const MeterConfig& cfg) {
    cfg.validate();
    if (obs.dimension() != state.dimension())
        throw DimensionMismatch("preonly_density: observable dimension");
    const StateVector psi = state.normalized();
    const Spectrum& spec = obs.spectrum();

    std::vector<double> centers, weights;
    for (std::size_t k = 0; k < spec.lines.size(); ++k) {
        auto proj = obs.project_raw(k, psi.amplitudes());
        double w = 0.0;
        for (const Amplitude& a : proj) w += std::norm(a);
        centers.push_back(cfg.lambda * spec.lines[k].eigenvalue);
        weights.push_back(w);
    }

    auto grid = detail::readout_grid(centers, cfg.delta);
    std::vector<double> dens(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double v = 0.0;
        for (std::size_t k = 0; k < centers.size(); ++k) {
            const double f = detail::phi(grid[i], centers[k], cfg.delta);
            v += weights[k] * f * f;
        }
        dens[i] = v;
    }
    return ReadoutDensity(std::move(grid), std::move(dens));
}

namespace detail {

// Coherent post-selected readout amplitude components: center lambda*a_i and
// transition amplitude <post|P_i|pre>. Shared by the single-shot and the
// collective builders.
inline ReadoutDensity amplitude_sum_density(const std::vector<double>& centers,
                                            const std::vector<Amplitude>& amps,
                                            double delta) {
    double scale = 0.0;
    for (const Amplitude& a : amps) scale += std::abs(a);
    if (scale <= 1e-300)
        throw AllAmplitudesZero("meter: every transition amplitude vanishes");

    auto grid = readout_grid(centers, delta);
    std::vector<double> dens(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Amplitude f{0.0, 0.0};
        for (std::size_t k = 0; k < centers.size(); ++k)
            f += amps[k] * phi(grid[i], centers[k], delta);
        dens[i] = std::norm(f);
    }
    return ReadoutDensity(std::move(grid), std::move(dens));
}

}  // namespace detail

// Readout density conditioned on a successful post-selection:
// density(P) ~ |sum_i <post|P_i|pre> phi(P - lambda a_i)|^2.
inline ReadoutDensity postselected_meter_distribution(const PrePostEnsemble& ens,
                                                      const Observable& obs,
                                                      const MeterConfig& cfg) {
    cfg.validate();
    if (obs.dimension() != ens.dimension())
        throw DimensionMismatch("postselected_meter_distribution: observable dimension");
    const StateVector pre = ens.evolved_pre().normalized();
    const StateVector post = ens.evolved_post().normalized();
    const Spectrum& spec = obs.spectrum();

    std::vector<double> centers;
    std::vector<Amplitude> amps;
    for (std::size_t k = 0; k < spec.lines.size(); ++k) {
        auto proj = obs.project_raw(k, pre.amplitudes());
        centers.push_back(cfg.lambda * spec.lines[k].eigenvalue);
        amps.push_back(tsqm::detail::bra_dot(post.amplitudes(), proj));
    }
    return detail::amplitude_sum_density(centers, amps, cfg.delta);
}

// ---------------------------------------------------------------------------
// Collective observable A^(N) = (1/N) sum_i A_i on a product ensemble

// Shift centers and transition amplitudes for measuring A^(N) on
// (|pre1>)^N / (<post1|)^N, computed from the single-particle spectrum: a
// composition (n_1..n_K) of N over the K distinct eigenvalues contributes
// multinomial(N; n) * prod_k a_k^{n_k} at shift lambda * sum_k n_k a_k / N.
// The 2^N product space never appears.
inline std::vector<std::pair<double, Amplitude>> collective_shift_amplitudes(
        int n_particles, const StateVector& pre1, const StateVector& post1,
        const Observable& obs1, double lambda = 1.0) {
    if (n_particles < 1) throw std::invalid_argument("collective: N must be >= 1");
    const StateVector pre = pre1.normalized();
    const StateVector post = post1.normalized();
    const Spectrum& spec = obs1.spectrum();
    const std::size_t K = spec.lines.size();

    std::vector<Amplitude> a(K);
    for (std::size_t k = 0; k < K; ++k)
        a[k] = tsqm::detail::bra_dot(post.amplitudes(),
                                     obs1.project_raw(k, pre.amplitudes()));

    // enumerate compositions of n_particles into K eigenvalue classes
    std::vector<std::pair<double, Amplitude>> terms;
    const double invN = 1.0 / double(n_particles);
    auto rec = [&](auto&& self, std::size_t k, int remaining, double coeff,
                   Amplitude amp, double eigsum) -> void {
        if (k + 1 == K) {
            Amplitude total = amp;
            for (int i = 0; i < remaining; ++i) total *= a[k];
            const double shift = lambda * (eigsum + remaining * spec.lines[k].eigenvalue) * invN;
            terms.emplace_back(shift, coeff * total);
            return;
        }
        for (int nk = 0; nk <= remaining; ++nk) {
            Amplitude amp2 = amp;
            for (int i = 0; i < nk; ++i) amp2 *= a[k];
            const double c2 = coeff * double(binomial_u64(remaining, nk));
            self(self, k + 1, remaining - nk, c2, amp2,
                 eigsum + nk * spec.lines[k].eigenvalue);
        }
    };
    rec(rec, 0, n_particles, 1.0, Amplitude{1.0, 0.0}, 0.0);

    // merge terms whose shifts coincide
    std::sort(terms.begin(), terms.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<std::pair<double, Amplitude>> merged;
    for (const auto& t : terms) {
        if (!merged.empty() && t.first - merged.back().first < kDegenerateGap * std::max(1.0, std::abs(lambda)))
            merged.back().second += t.second;
        else
            merged.push_back(t);
    }
    return merged;
}

inline ReadoutDensity collective_density(int n_particles, const StateVector& pre1,
                                         const StateVector& post1, const Observable& obs1,
                                         const MeterConfig& cfg) {
    cfg.validate();
    auto terms = collective_shift_amplitudes(n_particles, pre1, post1, obs1, cfg.lambda);
    std::vector<double> centers;
    std::vector<Amplitude> amps;
    for (const auto& [shift, amp] : terms) {
        centers.push_back(shift);
        amps.push_back(amp);
    }
    return detail::amplitude_sum_density(centers, amps, cfg.delta);
}

// ---------------------------------------------------------------------------
// Disturbance estimate for a weakened coupling

// Probability that a coupling of strength lambda*q kicks the system out of
// `state`: (lq)^2 Var(A) / (1 + (lq)^2 <A^2>).
inline double disturbance_probability(const StateVector& state, const Observable& obs,
                                      double lambda_q) {
    if (obs.dimension() != state.dimension())
        throw DimensionMismatch("disturbance_probability: observable dimension");
    const StateVector psi = state.normalized();
    auto av = obs.apply_raw(psi.amplitudes());
    double mean = 0.0, second = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) {
        mean += (std::conj(psi[i]) * av[i]).real();
        second += std::norm(av[i]);
    }
    const double var = std::max(0.0, second - mean * mean);
    const double c = lambda_q * lambda_q;
    return c * var / (1.0 + c * second);
}

// ---------------------------------------------------------------------------
// Monte Carlo sampling with post-selection

namespace detail {

// Piecewise-linear inverse CDF over a readout grid.
class GridSampler {
  public:
    explicit GridSampler(const ReadoutDensity& d) : d_(&d), cum_(d.grid.size(), 0.0) {
        for (std::size_t i = 1; i < d.grid.size(); ++i)
            cum_[i] = cum_[i - 1] + 0.5 * (d.density[i - 1] + d.density[i]) *
                                            (d.grid[i] - d.grid[i - 1]);
    }

    double draw(double u) const {
        const double target = u * cum_.back();
        std::size_t lo = 0, hi = cum_.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (cum_[mid] <= target ? lo : hi) = mid;
        }
        const double seg = cum_[hi] - cum_[lo];
        const double frac = seg > 0.0 ? (target - cum_[lo]) / seg : 0.0;
        return d_->grid[lo] + frac * (d_->grid[hi] - d_->grid[lo]);
    }

  private:
    const ReadoutDensity* d_;
    std::vector<double> cum_;
};

}  // namespace detail

// Simulates `trials` independent runs: draw the pointer readout P from the
// pre-only marginal of the entangled system+meter state, then accept with
// the exact post-selection probability of the P-conditioned system state.
// Deterministic per (seed, trial_index).
inline std::vector<SampleRecord> sample_run(const PrePostEnsemble& ens, const Observable& obs,
                                            const MeterConfig& cfg, std::uint64_t trials,
                                            std::uint64_t seed) {
    cfg.validate();
    if (trials < 1) throw std::invalid_argument("sample_run: trials must be >= 1");
    if (obs.dimension() != ens.dimension())
        throw DimensionMismatch("sample_run: observable dimension");

    const StateVector pre = ens.evolved_pre().normalized();
    const StateVector post = ens.evolved_post().normalized();
    const Spectrum& spec = obs.spectrum();
    const std::size_t K = spec.lines.size();

    std::vector<double> centers(K), branch_weight(K);
    std::vector<Amplitude> amp(K);
    for (std::size_t k = 0; k < K; ++k) {
        auto proj = obs.project_raw(k, pre.amplitudes());
        centers[k] = cfg.lambda * spec.lines[k].eigenvalue;
        double w = 0.0;
        for (const Amplitude& z : proj) w += std::norm(z);
        branch_weight[k] = w;
        amp[k] = tsqm::detail::bra_dot(post.amplitudes(), proj);
    }

    const ReadoutDensity marginal = preonly_density(pre, obs, cfg);
    const detail::GridSampler sampler(marginal);

    std::vector<SampleRecord> records;
    records.reserve(trials);
    for (std::uint64_t t = 0; t < trials; ++t) {
        TrialRng rng(seed, t);
        const double p = sampler.draw(rng.uniform());
        double fsum = 0.0;
        Amplitude asum{0.0, 0.0};
        for (std::size_t k = 0; k < K; ++k) {
            const double f = detail::phi(p, centers[k], cfg.delta);
            fsum += branch_weight[k] * f * f;
            asum += amp[k] * f;
        }
        const double p_accept = fsum > 0.0 ? std::norm(asum) / fsum : 0.0;
        const bool accepted = rng.uniform() < p_accept;
        records.push_back({p, accepted, t});
    }
    return records;
}

// ---------------------------------------------------------------------------
// No-signaling check

// The pre-only readout marginal sum_j Pr(j) density_j(P) must not depend on
// which complete post-selection basis is later used. Returns the maximum
// pointwise deviation between the marginals of the given bases.
inline double no_signaling_check(const StateVector& pre, const Observable& obs,
                                 const MeterConfig& cfg,
                                 const std::vector<std::vector<StateVector>>& bases) {
    cfg.validate();
    if (bases.empty()) throw std::invalid_argument("no_signaling_check: no bases");
    const StateVector psi = pre.normalized();
    const std::size_t dim = psi.dimension();
    const Spectrum& spec = obs.spectrum();
    const std::size_t K = spec.lines.size();

    for (const auto& basis : bases) {
        Matrix resolution(dim * dim, Amplitude{0.0, 0.0});
        for (const StateVector& v : basis) {
            if (v.dimension() != dim) throw DimensionMismatch("no_signaling_check: basis dimension");
            for (std::size_t i = 0; i < dim; ++i)
                for (std::size_t j = 0; j < dim; ++j)
                    resolution[i * dim + j] += v[i] * std::conj(v[j]);
        }
        if (max_abs_diff(resolution, identity_matrix(dim)) > kUnitaryTol)
            throw IncompleteBasis("no_signaling_check: basis does not resolve the identity");
    }

    std::vector<double> centers(K);
    std::vector<std::vector<Amplitude>> proj(K);
    for (std::size_t k = 0; k < K; ++k) {
        centers[k] = cfg.lambda * spec.lines[k].eigenvalue;
        proj[k] = obs.project_raw(k, psi.amplitudes());
    }
    auto grid = detail::readout_grid(centers, cfg.delta);

    // marginal of one basis: sum_j |sum_k <f_j|P_k|psi> phi_k(P)|^2
    auto marginal = [&](const std::vector<StateVector>& basis) {
        std::vector<std::vector<Amplitude>> w(basis.size(), std::vector<Amplitude>(K));
        for (std::size_t j = 0; j < basis.size(); ++j)
            for (std::size_t k = 0; k < K; ++k)
                w[j][k] = tsqm::detail::bra_dot(basis[j].amplitudes(), proj[k]);
        std::vector<double> m(grid.size(), 0.0);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            std::vector<double> f(K);
            for (std::size_t k = 0; k < K; ++k) f[k] = detail::phi(grid[i], centers[k], cfg.delta);
            double v = 0.0;
            for (std::size_t j = 0; j < basis.size(); ++j) {
                Amplitude s{0.0, 0.0};
                for (std::size_t k = 0; k < K; ++k) s += w[j][k] * f[k];
                v += std::norm(s);
            }
            m[i] = v;
        }
        return m;
    };

    std::vector<std::vector<double>> marginals;
    for (const auto& basis : bases) marginals.push_back(marginal(basis));

    double dev = 0.0;
    for (std::size_t a = 0; a < marginals.size(); ++a)
        for (std::size_t b = a + 1; b < marginals.size(); ++b)
            for (std::size_t i = 0; i < grid.size(); ++i)
                dev = std::max(dev, std::abs(marginals[a][i] - marginals[b][i]));
    return dev;
}

// ---------------------------------------------------------------------------
// Peak analysis

// Argmax refined by quadratic interpolation through the three samples around
// the discrete maximum. Ties break toward the smallest readout.
inline double peak_estimate(const ReadoutDensity& d) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < d.density.size(); ++i)
        if (d.density[i] > d.density[best]) best = i;
    if (best == 0 || best + 1 == d.density.size()) return d.grid[best];
    const double y0 = d.density[best - 1], y1 = d.density[best], y2 = d.density[best + 1];
    const double denom = y0 - 2.0 * y1 + y2;
    if (denom >= 0.0) return d.grid[best];
    return d.grid[best] + 0.5 * d.step() * (y0 - y2) / denom;
}

// Local maxima above rel_threshold * global max, refined like peak_estimate.
// Returns (position, relative height) pairs in grid order.
inline std::vector<std::pair<double, double>> local_maxima(const ReadoutDensity& d,
                                                           double rel_threshold) {
    double top = 0.0;
    for (double v : d.density) top = std::max(top, v);
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 1; i + 1 < d.density.size(); ++i) {
        if (!(d.density[i] > d.density[i - 1] && d.density[i] >= d.density[i + 1])) continue;
        if (d.density[i] < rel_threshold * top) continue;
        const double y0 = d.density[i - 1], y1 = d.density[i], y2 = d.density[i + 1];
        const double denom = y0 - 2.0 * y1 + y2;
        const double pos = denom < 0.0 ? d.grid[i] + 0.5 * d.step() * (y0 - y2) / denom
                                       : d.grid[i];
        out.emplace_back(pos, d.density[i] / top);
    }
    return out;
}

}  // namespace tsqm
