#pragma once

// Catalog of named states and observables used by the scenario suite, the
// CLI, and the tests. Two-level systems use the computational basis
// {"0","1"} with "0" the sigma_z=+1 state; scenario spaces carry their own
// labels ("A","B","C"; "O","NO"; "L","R" x "+","-").

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tsqm/qcore.hpp"

namespace tsqm::states {

inline const Amplitude I1{0.0, 1.0};

inline Observable sigma_x() { return Observable({{0, 0}, {1, 0}, {1, 0}, {0, 0}}, 2); }
inline Observable sigma_y() {
    return Observable({{0, 0}, {0, -1}, {0, 1}, {0, 0}}, 2);
}
inline Observable sigma_z() { return Observable({{1, 0}, {0, 0}, {0, 0}, {-1, 0}}, 2); }

// spin along the 45-degree direction in the x-y plane
inline Observable sigma_xi() {
    const double r = 1.0 / std::sqrt(2.0);
    return Observable({{0, 0}, {r, -r}, {r, r}, {0, 0}}, 2);
}

inline StateVector up_z() { return StateVector(std::vector<Amplitude>{{1, 0}, {0, 0}}); }
inline StateVector down_z() { return StateVector(std::vector<Amplitude>{{0, 0}, {1, 0}}); }
inline StateVector up_x() {
    const double r = 1.0 / std::sqrt(2.0);
    return StateVector(std::vector<Amplitude>{{r, 0}, {r, 0}});
}
inline StateVector down_x() {
    const double r = 1.0 / std::sqrt(2.0);
    return StateVector(std::vector<Amplitude>{{r, 0}, {-r, 0}});
}
inline StateVector up_y() {
    const double r = 1.0 / std::sqrt(2.0);
    return StateVector(std::vector<Amplitude>{{r, 0}, {0, r}});
}
inline StateVector down_y() {
    const double r = 1.0 / std::sqrt(2.0);
    return StateVector(std::vector<Amplitude>{{r, 0}, {0, -r}});
}

// --- three boxes ---

inline std::vector<std::string> box_labels() { return {"A", "B", "C"}; }

inline StateVector three_box_pre() {
    const double r = 1.0 / std::sqrt(3.0);
    return StateVector({{r, 0}, {r, 0}, {r, 0}}, box_labels());
}
inline StateVector three_box_post() {
    const double r = 1.0 / std::sqrt(3.0);
    return StateVector({{r, 0}, {r, 0}, {-r, 0}}, box_labels());
}
inline Observable box_projector(std::size_t which) {
    Matrix m(9, Amplitude{0.0, 0.0});
    m[which * 3 + which] = Amplitude{1.0, 0.0};
    return Observable(std::move(m), 3, box_labels());
}

// --- Hardy's two interferometers ---
// First tensor slot: positron; second: electron. "O" is the overlapping arm.
// The pre-selected state is the post-annihilation survivor (no |O,O>
// component); the dark-port projection D = (|O> - |NO>)/sqrt(2) on each side
// defines the post-selection.

inline std::vector<std::string> arm_labels() { return {"O", "NO"}; }

inline StateVector hardy_pre() {
    const double r = 1.0 / std::sqrt(3.0);
    auto labels = tensor_labels(arm_labels(), arm_labels());
    return StateVector({{0, 0}, {r, 0}, {r, 0}, {r, 0}}, labels);
}
inline StateVector hardy_post() {
    const double r = 1.0 / std::sqrt(2.0);
    StateVector dark(std::vector<Amplitude>{{r, 0}, {-r, 0}}, arm_labels());
    return tensor_product(dark, dark);
}
inline Observable arm_projector(bool overlapping) {
    Matrix m(4, Amplitude{0.0, 0.0});
    const std::size_t k = overlapping ? 0 : 1;
    m[k * 2 + k] = Amplitude{1.0, 0.0};
    return Observable(std::move(m), 2, arm_labels());
}
inline Observable arm_identity() { return Observable::identity(2, arm_labels()); }

// --- Cheshire cat ---
// First slot: box {L,R}; second slot: spin {+,-}.

inline StateVector cheshire_pre() {
    auto labels = tensor_labels({"L", "R"}, {"+", "-"});
    return StateVector({{1, 0}, {1, 0}, {1, 0}, {0, 0}}, labels);
}
inline StateVector cheshire_post() {
    auto labels = tensor_labels({"L", "R"}, {"+", "-"});
    return StateVector({{1, 0}, {-1, 0}, {-1, 0}, {1, 0}}, labels);
}

// --- lookup for the CLI ---

inline std::optional<StateVector> named_state(const std::string& name) {
    if (name == "up_x") return up_x();
    if (name == "down_x") return down_x();
    if (name == "up_y") return up_y();
    if (name == "down_y") return down_y();
    if (name == "up_z") return up_z();
    if (name == "down_z") return down_z();
    if (name == "three_box_pre") return three_box_pre();
    if (name == "three_box_post") return three_box_post();
    if (name == "hardy_pre") return hardy_pre();
    if (name == "hardy_post") return hardy_post();
    if (name == "cheshire_pre") return cheshire_pre();
    if (name == "cheshire_post") return cheshire_post();
    return std::nullopt;
}

inline std::optional<Observable> named_observable(const std::string& name) {
    if (name == "sigma_x") return sigma_x();
    if (name == "sigma_y") return sigma_y();
    if (name == "sigma_z") return sigma_z();
    if (name == "sigma_xi") return sigma_xi();
    if (name == "proj_a") return box_projector(0);
    if (name == "proj_b") return box_projector(1);
    if (name == "proj_c") return box_projector(2);
    return std::nullopt;
}

// --- seeded random inputs (tests, no-signaling sweeps) ---
// mt19937_64 raw output is fully specified by the standard, so mapping bits
// to doubles by hand keeps the streams platform-identical.

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }
    double gaussian() {
        // Box-Muller; both uniforms drawn explicitly for determinism
        double u1 = uniform(), u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

  private:
    std::mt19937_64 eng_;
};

inline StateVector random_state(std::size_t dim, Rng& rng) {
    std::vector<Amplitude> amps(dim);
    for (Amplitude& a : amps) a = Amplitude{rng.gaussian(), rng.gaussian()};
    return StateVector(std::move(amps));
}

inline StateVector random_real_state(std::size_t dim, Rng& rng) {
    std::vector<Amplitude> amps(dim);
    for (Amplitude& a : amps) a = Amplitude{rng.gaussian(), 0.0};
    return StateVector(std::move(amps));
}

inline Observable random_hermitian(std::size_t dim, Rng& rng) {
    Matrix m(dim * dim);
    for (std::size_t i = 0; i < dim; ++i) {
        m[i * dim + i] = Amplitude{rng.gaussian(), 0.0};
        for (std::size_t j = i + 1; j < dim; ++j) {
            const Amplitude z{rng.gaussian(), rng.gaussian()};
            m[i * dim + j] = z;
            m[j * dim + i] = std::conj(z);
        }
    }
    return Observable(std::move(m), dim);
}

inline Observable random_real_symmetric(std::size_t dim, Rng& rng) {
    Matrix m(dim * dim);
    for (std::size_t i = 0; i < dim; ++i) {
        m[i * dim + i] = Amplitude{rng.gaussian(), 0.0};
        for (std::size_t j = i + 1; j < dim; ++j) {
            const Amplitude z{rng.gaussian(), 0.0};
            m[i * dim + j] = z;
            m[j * dim + i] = z;
        }
    }
    return Observable(std::move(m), dim);
}

}  // namespace tsqm::states
