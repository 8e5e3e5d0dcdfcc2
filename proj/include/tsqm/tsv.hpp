#pragma once

// Two-state-vector formalism: pre/post-selected ensembles, the ABL rule for
// intermediate ideal measurements (projector form, so degenerate spectra are
// handled), collapse chains for measurement sequences, and weak values.

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "tsqm/qcore.hpp"

namespace tsqm {

// Pre-selected ket at t_in, post-selected bra at t_fin, and optional
// evolution U_pre (t_in -> t) and U_post (t -> t_fin) around the
// intermediate measurement time t.
class PrePostEnsemble {
  public:
    PrePostEnsemble(StateVector pre, StateVector post,
                    std::optional<UnitaryMap> u_pre = std::nullopt,
                    std::optional<UnitaryMap> u_post = std::nullopt)
        : pre_(std::move(pre)), post_(std::move(post)),
          u_pre_(std::move(u_pre)), u_post_(std::move(u_post)) {
        require_same_space(pre_, post_);
        if (u_pre_ && u_pre_->dimension() != pre_.dimension())
            throw DimensionMismatch("ensemble: u_pre dimension");
        if (u_post_ && u_post_->dimension() != pre_.dimension())
            throw DimensionMismatch("ensemble: u_post dimension");
        overlap_ = inner_product(evolved_post(), evolved_pre());
    }

    const StateVector& pre() const { return pre_; }
    const StateVector& post() const { return post_; }
    std::size_t dimension() const { return pre_.dimension(); }

    // U_pre |pre>, i.e. the forward vector at the measurement time.
    StateVector evolved_pre() const { return u_pre_ ? u_pre_->apply(pre_) : pre_; }
    // U_post^dag |post>, i.e. the backward vector at the measurement time.
    StateVector evolved_post() const {
        return u_post_ ? u_post_->adjoint_map().apply(post_) : post_;
    }

    // <post| U_post U_pre |pre>
    Amplitude overlap() const { return overlap_; }

    // True when the selections are (numerically) orthogonal, which leaves
    // weak values undefined. ABL probabilities may still exist.
    bool degenerate() const {
        return std::abs(overlap_) < kOrthogonalEps * pre_.norm() * post_.norm();
    }

  private:
    StateVector pre_;
    StateVector post_;
    std::optional<UnitaryMap> u_pre_;
    std::optional<UnitaryMap> u_post_;
    Amplitude overlap_;
};

// One ideal measurement in a time-ordered sequence. `outcome_filter`, when
// set, keeps only branches with that eigenvalue.
struct MeasurementEvent {
    int time_index;
    Observable observable;
    std::optional<double> outcome_filter;
};

// Weighted superposition of (bra, ket) pairs.
class GeneralizedTwoState {
  public:
    struct Term {
        Amplitude alpha;
        StateVector bra;
        StateVector ket;
    };

    explicit GeneralizedTwoState(std::vector<Term> terms) : terms_(std::move(terms)) {
        if (terms_.empty()) throw std::invalid_argument("GeneralizedTwoState: no terms");
        for (const Term& t : terms_) require_same_space(t.bra, t.ket);
        for (std::size_t i = 1; i < terms_.size(); ++i)
            require_same_space(terms_[0].ket, terms_[i].ket);
    }

    const std::vector<Term>& terms() const { return terms_; }
    std::size_t dimension() const { return terms_[0].ket.dimension(); }

    // sum_i alpha_i <Psi_i|Phi_i>
    Amplitude trace() const {
        Amplitude s{0.0, 0.0};
        for (const Term& t : terms_) s += t.alpha * inner_product(t.bra, t.ket);
        return s;
    }

    // sum_i alpha_i <Psi_i|A|Phi_i>
    Amplitude insert(const Observable& obs) const {
        Amplitude s{0.0, 0.0};
        for (const Term& t : terms_) {
            auto av = obs.apply_raw(t.ket.amplitudes());
            Amplitude ip{0.0, 0.0};
            for (std::size_t k = 0; k < av.size(); ++k) ip += std::conj(t.bra[k]) * av[k];
            s += t.alpha * ip;
        }
        return s;
    }

  private:
    std::vector<Term> terms_;
};

namespace detail {

inline Amplitude bra_dot(const std::vector<Amplitude>& bra, const std::vector<Amplitude>& ket) {
    Amplitude s{0.0, 0.0};
    for (std::size_t k = 0; k < bra.size(); ++k) s += std::conj(bra[k]) * ket[k];
    return s;
}

}  // namespace detail

// ABL rule: Pr(a_j) = |<post|U_post P_j U_pre|pre>|^2 / sum_n |...|^2 over
// the (merged) eigenprojectors of obs.
inline std::map<double, double> abl_probability(const PrePostEnsemble& ens,
                                                const Observable& obs) {
    if (obs.dimension() != ens.dimension())
        throw DimensionMismatch("abl_probability: observable dimension");
    const StateVector fwd = ens.evolved_pre();
    const StateVector bwd = ens.evolved_post();
    const Spectrum& spec = obs.spectrum();

    std::vector<double> weights(spec.lines.size());
    double denom = 0.0;
    for (std::size_t k = 0; k < spec.lines.size(); ++k) {
        auto proj = obs.project_raw(k, fwd.amplitudes());
        const double w = std::norm(detail::bra_dot(bwd.amplitudes(), proj));
        weights[k] = w;
        denom += w;
    }
    const double scale = fwd.norm_sq() * bwd.norm_sq();
    if (denom <= scale * 1e-28)
        throw AllAmplitudesZero("abl_probability: post-selection unreachable via every outcome");

    std::map<double, double> out;
    for (std::size_t k = 0; k < spec.lines.size(); ++k)
        out[spec.lines[k].eigenvalue] = weights[k] / denom;
    return out;
}

// Collapse chain over a time-ordered sequence of ideal measurements:
// Pr(a_vec) = |<post| U_post P_{a_K} ... P_{a_1} U_pre |pre>|^2, normalized
// over all outcome tuples. Events are applied in the order given.
inline std::map<std::vector<double>, double> multi_time_abl(
        const PrePostEnsemble& ens, const std::vector<MeasurementEvent>& events) {
    if (events.empty()) throw std::invalid_argument("multi_time_abl: no events");
    for (std::size_t i = 1; i < events.size(); ++i)
        if (events[i].time_index <= events[i - 1].time_index)
            throw std::invalid_argument("multi_time_abl: time indices must increase");
    for (const MeasurementEvent& e : events)
        if (e.observable.dimension() != ens.dimension())
            throw DimensionMismatch("multi_time_abl: observable dimension");

    const StateVector fwd = ens.evolved_pre();
    const StateVector bwd = ens.evolved_post();

    // per-event candidate outcome indices, honoring outcome filters
    std::vector<std::vector<std::size_t>> choices;
    for (const MeasurementEvent& e : events) {
        const Spectrum& spec = e.observable.spectrum();
        std::vector<std::size_t> idx;
        for (std::size_t k = 0; k < spec.lines.size(); ++k) {
            if (e.outcome_filter &&
                std::abs(spec.lines[k].eigenvalue - *e.outcome_filter) > kDegenerateGap)
                continue;
            idx.push_back(k);
        }
        if (idx.empty())
            throw std::invalid_argument("multi_time_abl: outcome filter matches no eigenvalue");
        choices.push_back(std::move(idx));
    }

    std::map<std::vector<double>, double> weights;
    double denom = 0.0;
    std::vector<std::size_t> pick(events.size(), 0);
    for (;;) {
        std::vector<Amplitude> v = fwd.amplitudes();
        std::vector<double> key;
        key.reserve(events.size());
        for (std::size_t e = 0; e < events.size(); ++e) {
            const std::size_t k = choices[e][pick[e]];
            key.push_back(events[e].observable.spectrum().lines[k].eigenvalue);
            v = events[e].observable.project_raw(k, v);
        }
        const double w = std::norm(detail::bra_dot(bwd.amplitudes(), v));
        weights[key] = w;
        denom += w;

        std::size_t e = 0;
        while (e < events.size() && ++pick[e] == choices[e].size()) pick[e++] = 0;
        if (e == events.size()) break;
    }

    const double scale = fwd.norm_sq() * bwd.norm_sq();
    if (denom <= scale * 1e-28)
        throw AllAmplitudesZero("multi_time_abl: post-selection unreachable via every branch");
    for (auto& [key, w] : weights) w /= denom;
    return weights;
}

// A_w = <post|U_post A U_pre|pre> / <post|U_post U_pre|pre>
inline Amplitude weak_value(const PrePostEnsemble& ens, const Observable& obs) {
    if (obs.dimension() != ens.dimension())
        throw DimensionMismatch("weak_value: observable dimension");
    if (ens.degenerate())
        throw OrthogonalSelection("weak_value: orthogonal pre/post selection");
    const StateVector fwd = ens.evolved_pre();
    const StateVector bwd = ens.evolved_post();
    const Amplitude num = detail::bra_dot(bwd.amplitudes(), obs.apply_raw(fwd.amplitudes()));
    return num / ens.overlap();
}

// A_w = sum_i alpha_i <Psi_i|A|Phi_i> / sum_i alpha_i <Psi_i|Phi_i>
inline Amplitude weak_value_generalized(const GeneralizedTwoState& g, const Observable& obs) {
    if (obs.dimension() != g.dimension())
        throw DimensionMismatch("weak_value_generalized: observable dimension");
    const Amplitude tr = g.trace();
    double scale = 0.0;
    for (const auto& t : g.terms())
        scale += std::abs(t.alpha) * t.bra.norm() * t.ket.norm();
    if (std::abs(tr) < kOrthogonalEps * std::max(scale, 1e-300))
        throw OrthogonalSelection("weak_value_generalized: vanishing normalization");
    return g.insert(obs) / tr;
}

}  // namespace tsqm
