#pragma once

// Dense complex linear algebra for small Hilbert spaces (dim <= ~4096):
// labeled state vectors, Hermitian observables with cached spectral
// decompositions, unitary maps and tensor products.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace tsqm {

using Amplitude = std::complex<double>;

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NotHermitian : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NotUnitary : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct AllAmplitudesZero : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OrthogonalSelection : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IncompleteBasis : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ZeroModulus : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kDegenerateGap = 1e-9;   // eigenvalue merge gap
inline constexpr double kOrthogonalEps = 1e-10;  // relative overlap cutoff

// ---------------------------------------------------------------------------
// StateVector

class StateVector {
  public:
    StateVector(std::vector<Amplitude> amplitudes, std::vector<std::string> basis = {})
        : amps_(std::move(amplitudes)), basis_(std::move(basis)) {
        if (amps_.empty()) throw std::invalid_argument("StateVector: empty amplitude list");
        if (basis_.empty()) {
            basis_.reserve(amps_.size());
            for (std::size_t i = 0; i < amps_.size(); ++i) basis_.push_back(std::to_string(i));
        }
        if (basis_.size() != amps_.size())
            throw DimensionMismatch("StateVector: basis size != amplitude count");
        double n2 = 0.0;
        for (const Amplitude& a : amps_) {
            if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
                throw std::invalid_argument("StateVector: non-finite amplitude");
            n2 += std::norm(a);
        }
        if (n2 <= 0.0) throw std::invalid_argument("StateVector: zero vector rejected");
    }

    std::size_t dimension() const { return amps_.size(); }
    const std::vector<Amplitude>& amplitudes() const { return amps_; }
    const std::vector<std::string>& basis() const { return basis_; }
    const Amplitude& operator[](std::size_t i) const { return amps_[i]; }

    double norm_sq() const {
        double n2 = 0.0;
        for (const Amplitude& a : amps_) n2 += std::norm(a);
        return n2;
    }
    double norm() const { return std::sqrt(norm_sq()); }

    StateVector normalized() const {
        const double n = norm();
        std::vector<Amplitude> out(amps_);
        for (Amplitude& a : out) a /= n;
        return StateVector(std::move(out), basis_);
    }

  private:
    std::vector<Amplitude> amps_;
    std::vector<std::string> basis_;
};

inline void require_same_space(const StateVector& a, const StateVector& b) {
    if (a.dimension() != b.dimension())
        throw DimensionMismatch("states live in different dimensions");
    if (a.basis() != b.basis())
        throw DimensionMismatch("states use different basis labels");
}

// <bra|ket> with the bra conjugated.
inline Amplitude inner_product(const StateVector& bra, const StateVector& ket) {
    require_same_space(bra, ket);
    Amplitude s{0.0, 0.0};
    for (std::size_t k = 0; k < bra.dimension(); ++k) s += std::conj(bra[k]) * ket[k];
    return s;
}

inline StateVector operator+(const StateVector& a, const StateVector& b) {
    require_same_space(a, b);
    std::vector<Amplitude> out(a.amplitudes());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return StateVector(std::move(out), a.basis());
}

inline StateVector operator-(const StateVector& a, const StateVector& b) {
    require_same_space(a, b);
    std::vector<Amplitude> out(a.amplitudes());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
    return StateVector(std::move(out), a.basis());
}

inline StateVector operator*(const Amplitude& z, const StateVector& s) {
    std::vector<Amplitude> out(s.amplitudes());
    for (Amplitude& a : out) a *= z;
    return StateVector(std::move(out), s.basis());
}

inline StateVector basis_state(std::size_t dim, std::size_t index,
                               std::vector<std::string> basis = {}) {
    std::vector<Amplitude> amps(dim, Amplitude{0.0, 0.0});
    amps.at(index) = Amplitude{1.0, 0.0};
    return StateVector(std::move(amps), std::move(basis));
}

// ---------------------------------------------------------------------------
// Dense matrix helpers (row-major square matrices)

using Matrix = std::vector<Amplitude>;

inline Matrix identity_matrix(std::size_t n) {
    Matrix m(n * n, Amplitude{0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) m[i * n + i] = Amplitude{1.0, 0.0};
    return m;
}

inline Matrix matmul(const Matrix& a, const Matrix& b, std::size_t n) {
    Matrix c(n * n, Amplitude{0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const Amplitude aik = a[i * n + k];
            if (aik == Amplitude{0.0, 0.0}) continue;
            for (std::size_t j = 0; j < n; ++j) c[i * n + j] += aik * b[k * n + j];
        }
    return c;
}

inline Matrix adjoint(const Matrix& a, std::size_t n) {
    Matrix c(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) c[j * n + i] = std::conj(a[i * n + j]);
    return c;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline std::vector<Amplitude> apply_matrix(const Matrix& m, std::size_t n,
                                           const std::vector<Amplitude>& v) {
    std::vector<Amplitude> out(n, Amplitude{0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
        Amplitude s{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) s += m[i * n + j] * v[j];
        out[i] = s;
    }
    return out;
}

// Exact binomial coefficient; n <= 64 keeps the result inside 64 bits.
inline unsigned long long binomial_u64(unsigned n, unsigned k) {
    if (n > 64) throw std::invalid_argument("binomial_u64: n > 64");
    if (k > n) return 0ULL;
    k = std::min(k, n - k);
    unsigned long long c = 1ULL;
    for (unsigned i = 1; i <= k; ++i)
        c = static_cast<unsigned long long>((static_cast<unsigned __int128>(c) * (n - k + i)) / i);
    return c;
}

inline std::vector<std::string> tensor_labels(const std::vector<std::string>& a,
                                              const std::vector<std::string>& b) {
    std::vector<std::string> out;
    out.reserve(a.size() * b.size());
    for (const std::string& x : a)
        for (const std::string& y : b) out.push_back(x + "⊗" + y);
    return out;
}

// ---------------------------------------------------------------------------
// Observable

// Spectral decomposition with degenerate eigenvalues merged into a single
// projector. `vectors` holds the orthonormal eigenvectors column-major; a
// line owns the contiguous column range [offset, offset+multiplicity).
struct SpectralLine {
    double eigenvalue;
    std::size_t offset;
    std::size_t multiplicity;
};

struct Spectrum {
    std::vector<SpectralLine> lines;
    std::vector<Amplitude> vectors;  // column-major, dim x dim
    std::size_t dim = 0;
};

class Observable {
  public:
    Observable(Matrix matrix, std::size_t dim, std::vector<std::string> basis = {})
        : m_(std::move(matrix)), dim_(dim), basis_(std::move(basis)),
          cache_(std::make_shared<Cache>()) {
        if (m_.size() != dim_ * dim_) throw DimensionMismatch("Observable: bad matrix size");
        if (basis_.empty()) {
            basis_.reserve(dim_);
            for (std::size_t i = 0; i < dim_; ++i) basis_.push_back(std::to_string(i));
        }
        if (basis_.size() != dim_) throw DimensionMismatch("Observable: bad basis size");
        double dev = 0.0;
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j)
                dev = std::max(dev, std::abs(m_[i * dim_ + j] - std::conj(m_[j * dim_ + i])));
        if (dev > kHermitianTol)
            throw NotHermitian("Observable: matrix is not Hermitian (max dev " +
                               std::to_string(dev) + ")");
    }

    static Observable identity(std::size_t dim, std::vector<std::string> basis = {}) {
        return Observable(identity_matrix(dim), dim, std::move(basis));
    }

    std::size_t dimension() const { return dim_; }
    const Matrix& matrix() const { return m_; }
    const std::vector<std::string>& basis() const { return basis_; }
    Amplitude at(std::size_t i, std::size_t j) const { return m_[i * dim_ + j]; }

    // A|psi> as a StateVector; throws AllAmplitudesZero if the operator
    // annihilates the state. Chain computations that must let zero vectors
    // flow through use apply_raw / project_raw instead.
    StateVector apply(const StateVector& s) const {
        require_compatible(s);
        auto v = apply_matrix(m_, dim_, s.amplitudes());
        double n2 = 0.0;
        for (const Amplitude& a : v) n2 += std::norm(a);
        if (n2 <= 0.0) throw AllAmplitudesZero("operator annihilated the state");
        return StateVector(std::move(v), s.basis());
    }

    // A|psi> as a raw amplitude vector (may be the zero vector).
    std::vector<Amplitude> apply_raw(const std::vector<Amplitude>& v) const {
        return apply_matrix(m_, dim_, v);
    }

    const Spectrum& spectrum() const& {
        std::call_once(cache_->flag, [this] { cache_->spec = compute_spectrum(); });
        return cache_->spec;
    }
    // calling on a temporary would return a dangling reference
    Spectrum spectrum() const&& {
        std::call_once(cache_->flag, [this] { cache_->spec = compute_spectrum(); });
        return cache_->spec;
    }

    std::vector<double> eigenvalues() const {
        const Spectrum& s = spectrum();
        std::vector<double> out;
        out.reserve(s.lines.size());
        for (const SpectralLine& l : s.lines) out.push_back(l.eigenvalue);
        return out;
    }

    // P_k |v> for the k-th (merged) spectral line.
    std::vector<Amplitude> project_raw(std::size_t k, const std::vector<Amplitude>& v) const {
        const Spectrum& s = spectrum();
        const SpectralLine& line = s.lines.at(k);
        std::vector<Amplitude> out(dim_, Amplitude{0.0, 0.0});
        for (std::size_t c = line.offset; c < line.offset + line.multiplicity; ++c) {
            const Amplitude* col = &s.vectors[c * dim_];
            Amplitude coeff{0.0, 0.0};
            for (std::size_t i = 0; i < dim_; ++i) coeff += std::conj(col[i]) * v[i];
            for (std::size_t i = 0; i < dim_; ++i) out[i] += coeff * col[i];
        }
        return out;
    }

    Matrix projector_matrix(std::size_t k) const {
        const Spectrum& s = spectrum();
        const SpectralLine& line = s.lines.at(k);
        Matrix p(dim_ * dim_, Amplitude{0.0, 0.0});
        for (std::size_t c = line.offset; c < line.offset + line.multiplicity; ++c) {
            const Amplitude* col = &s.vectors[c * dim_];
            for (std::size_t i = 0; i < dim_; ++i)
                for (std::size_t j = 0; j < dim_; ++j)
                    p[i * dim_ + j] += col[i] * std::conj(col[j]);
        }
        return p;
    }

  private:
    struct Cache {
        std::once_flag flag;
        Spectrum spec;
    };

    void require_compatible(const StateVector& s) const {
        if (s.dimension() != dim_ || s.basis() != basis_)
            throw DimensionMismatch("Observable/state dimension or basis mismatch");
    }

    Spectrum compute_spectrum() const {
        Eigen::MatrixXcd a(dim_, dim_);
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) a((Eigen::Index)i, (Eigen::Index)j) = m_[i * dim_ + j];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("eigendecomposition failed to converge");

        Spectrum out;
        out.dim = dim_;
        out.vectors.resize(dim_ * dim_);
        for (std::size_t c = 0; c < dim_; ++c)
            for (std::size_t i = 0; i < dim_; ++i)
                out.vectors[c * dim_ + i] = solver.eigenvectors()((Eigen::Index)i, (Eigen::Index)c);

        // merge eigenvalues closer than the degeneracy gap, averaging within a run
        std::size_t start = 0;
        while (start < dim_) {
            std::size_t stop = start + 1;
            while (stop < dim_ &&
                   solver.eigenvalues()((Eigen::Index)stop) -
                           solver.eigenvalues()((Eigen::Index)(stop - 1)) < kDegenerateGap)
                ++stop;
            double mean = 0.0;
            for (std::size_t k = start; k < stop; ++k) mean += solver.eigenvalues()((Eigen::Index)k);
            mean /= double(stop - start);
            out.lines.push_back({mean, start, stop - start});
            start = stop;
        }
        return out;
    }

    Matrix m_;
    std::size_t dim_;
    std::vector<std::string> basis_;
    std::shared_ptr<Cache> cache_;
};

// Per-spec operation name; returns the cached spectral decomposition.
inline const Spectrum& eigendecompose(const Observable& obs) { return obs.spectrum(); }
void eigendecompose(Observable&&) = delete;  // reference would dangle

// Complete orthonormal eigenbasis of an observable as labeled states.
inline std::vector<StateVector> eigenbasis(const Observable& obs) {
    const Spectrum& s = obs.spectrum();
    std::vector<StateVector> out;
    out.reserve(s.dim);
    for (std::size_t c = 0; c < s.dim; ++c) {
        std::vector<Amplitude> col(s.vectors.begin() + c * s.dim,
                                   s.vectors.begin() + (c + 1) * s.dim);
        out.emplace_back(std::move(col), obs.basis());
    }
    return out;
}

inline Observable operator+(const Observable& a, const Observable& b) {
    if (a.dimension() != b.dimension()) throw DimensionMismatch("observable sum dimensions");
    Matrix m(a.matrix());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += b.matrix()[i];
    return Observable(std::move(m), a.dimension(), a.basis());
}

inline Observable operator*(double c, const Observable& a) {
    Matrix m(a.matrix());
    for (Amplitude& z : m) z *= c;
    return Observable(std::move(m), a.dimension(), a.basis());
}

// Product of two (commuting) observables. Throws NotHermitian when the
// factors fail to commute, since the product is then not an observable.
inline Observable product_observable(const Observable& a, const Observable& b) {
    if (a.dimension() != b.dimension()) throw DimensionMismatch("observable product dimensions");
    return Observable(matmul(a.matrix(), b.matrix(), a.dimension()), a.dimension(), a.basis());
}

// ---------------------------------------------------------------------------
// UnitaryMap

class UnitaryMap {
  public:
    UnitaryMap(Matrix matrix, std::size_t dim) : m_(std::move(matrix)), dim_(dim) {
        if (m_.size() != dim_ * dim_) throw DimensionMismatch("UnitaryMap: bad matrix size");
        Matrix gram = matmul(adjoint(m_, dim_), m_, dim_);
        if (max_abs_diff(gram, identity_matrix(dim_)) > kUnitaryTol)
            throw NotUnitary("UnitaryMap: U^dag U deviates from identity");
    }

    static UnitaryMap identity(std::size_t dim) { return UnitaryMap(identity_matrix(dim), dim); }

    std::size_t dimension() const { return dim_; }
    const Matrix& matrix() const { return m_; }

    StateVector apply(const StateVector& s) const {
        if (s.dimension() != dim_) throw DimensionMismatch("UnitaryMap/state dimension");
        return StateVector(apply_matrix(m_, dim_, s.amplitudes()), s.basis());
    }

    UnitaryMap adjoint_map() const { return UnitaryMap(adjoint(m_, dim_), dim_); }

  private:
    Matrix m_;
    std::size_t dim_;
};

// ---------------------------------------------------------------------------
// Tensor products

inline StateVector tensor_product(const StateVector& a, const StateVector& b) {
    std::vector<Amplitude> out;
    out.reserve(a.dimension() * b.dimension());
    for (std::size_t i = 0; i < a.dimension(); ++i)
        for (std::size_t j = 0; j < b.dimension(); ++j) out.push_back(a[i] * b[j]);
    return StateVector(std::move(out), tensor_labels(a.basis(), b.basis()));
}

inline Observable tensor_product(const Observable& a, const Observable& b) {
    const std::size_t na = a.dimension(), nb = b.dimension(), n = na * nb;
    Matrix out(n * n);
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j)
            for (std::size_t k = 0; k < nb; ++k)
                for (std::size_t l = 0; l < nb; ++l)
                    out[(i * nb + k) * n + (j * nb + l)] = a.at(i, j) * b.at(k, l);
    return Observable(std::move(out), n, tensor_labels(a.basis(), b.basis()));
}

}  // namespace tsqm
