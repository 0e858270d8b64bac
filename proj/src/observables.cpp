#include "bohmsemi/observables.hpp"

#include <algorithm>
#include <cmath>

#include "bohmsemi/errors.hpp"
#include "bohmsemi/random.hpp"

namespace bohmsemi {

namespace {

constexpr double kZeroNorm = 1e-300;

double trapezoid_weight(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }

}  // namespace

WaveFunction1D normalize(const WaveFunction1D& wf) {
    const double n2 = norm_squared(wf);
    if (!(n2 >= kZeroNorm)) throw ZeroNorm("cannot normalize: integral of |psi|^2 vanishes");
    WaveFunction1D out = wf;
    const double s = 1.0 / std::sqrt(n2);
    for (auto& z : out.psi) z *= s;
    return out;
}

WaveFunction2D normalize(const WaveFunction2D& wf) {
    const double n2 = norm_squared(wf);
    if (!(n2 >= kZeroNorm)) throw ZeroNorm("cannot normalize: integral of |psi|^2 vanishes");
    WaveFunction2D out = wf;
    const double s = 1.0 / std::sqrt(n2);
    for (auto& z : out.psi) z *= s;
    return out;
}

double expectation_kinetic(const WaveFunction1D& wf, double mass) {
    if (!(mass > 0.0)) throw ShapeError("mass must be positive");
    const auto& p = wf.psi;
    const std::size_t n = p.size();
    const double dx = wf.grid.dx();
    double kin = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const Complex lap = (p[i + 1] - 2.0 * p[i] + p[i - 1]) / (dx * dx);
        kin += std::real(std::conj(p[i]) * lap);
    }
    return -kin * dx / (2.0 * mass);
}

double expectation_energy(const WaveFunction1D& wf, const PotentialField& V, double mass) {
    if (V.size() != wf.grid.size()) throw ShapeError("potential does not match the grid");
    const std::size_t n = wf.psi.size();
    double pot = 0.0;
    for (std::size_t i = 0; i < n; ++i) pot += trapezoid_weight(i, n) * wf.density(i) * V.values[i];
    return expectation_kinetic(wf, mass) + pot * wf.grid.dx();
}

double expectation_force(const WaveFunction1D& chi, const CouplingGradient& dV_dx2, double X2) {
    const std::size_t n = chi.psi.size();
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double rho = chi.density(i);
        if (rho == 0.0) continue;
        f -= trapezoid_weight(i, n) * rho * dV_dx2(chi.grid.x(i), X2);
    }
    return f * chi.grid.dx();
}

double mean_position(const WaveFunction1D& wf) {
    const std::size_t n = wf.psi.size();
    double m0 = 0.0;
    double m1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = trapezoid_weight(i, n) * wf.density(i);
        m0 += w;
        m1 += w * wf.grid.x(i);
    }
    if (!(m0 * wf.grid.dx() >= kZeroNorm)) throw ZeroNorm("mean position of a zero state");
    return m1 / m0;
}

double position_spread(const WaveFunction1D& wf) {
    const double mu = mean_position(wf);
    const std::size_t n = wf.psi.size();
    double m0 = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = trapezoid_weight(i, n) * wf.density(i);
        const double d = wf.grid.x(i) - mu;
        m0 += w;
        m2 += w * d * d;
    }
    return std::sqrt(m2 / m0);
}

DensityCdf::DensityCdf(const WaveFunction1D& wf) : grid_(wf.grid), cum_(wf.grid.size(), 0.0) {
    const double dx = grid_.dx();
    for (std::size_t i = 1; i < cum_.size(); ++i)
        cum_[i] = cum_[i - 1] + 0.5 * (wf.density(i - 1) + wf.density(i)) * dx;
    const double total = cum_.back();
    if (!(total >= kZeroNorm)) throw ZeroNorm("cannot sample from a zero density");
    for (auto& c : cum_) c /= total;
    cum_.back() = 1.0;
}

double DensityCdf::operator()(double x) const {
    if (x <= grid_.x_min()) return 0.0;
    if (x >= grid_.x_max()) return 1.0;
    const double s = (x - grid_.x_min()) / grid_.dx();
    auto i = static_cast<std::size_t>(s);
    if (i + 1 >= cum_.size()) i = cum_.size() - 2;
    const double w = s - static_cast<double>(i);
    return cum_[i] + w * (cum_[i + 1] - cum_[i]);
}

double DensityCdf::quantile(double u) const {
    // First node whose cumulative exceeds u; the sample is uniform inside that cell.
    auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
    if (it == cum_.begin()) return grid_.x_min();
    if (it == cum_.end()) return grid_.x_max();
    const auto i = static_cast<std::size_t>(it - cum_.begin()) - 1;
    const double lo = cum_[i];
    const double hi = cum_[i + 1];
    const double w = hi > lo ? (u - lo) / (hi - lo) : 0.5;
    return grid_.x(i) + w * grid_.dx();
}

std::vector<double> sample_density(const WaveFunction1D& wf, std::size_t count, std::uint64_t seed) {
    if (count == 0) throw ShapeError("sample count must be at least 1");
    const DensityCdf cdf(wf);
    UniformSource rng(seed);
    std::vector<double> out(count);
    for (auto& x : out) x = cdf.quantile(rng.next());
    return out;
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw ShapeError("KS distance of an empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const double f = cdf(samples[k]);
        d = std::max({d, static_cast<double>(k + 1) / n - f, f - static_cast<double>(k) / n});
    }
    return d;
}

double ks_distance(std::vector<double> samples, const WaveFunction1D& wf) {
    const DensityCdf cdf(wf);
    return ks_distance(std::move(samples), [&cdf](double x) { return cdf(x); });
}

}  // namespace bohmsemi
