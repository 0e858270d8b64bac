#include "bohmsemi/grid.hpp"

#include <algorithm>
#include <cmath>

#include "bohmsemi/errors.hpp"

namespace bohmsemi {

Grid1D::Grid1D(double x_min, double x_max, std::size_t n) : x_min_(x_min), x_max_(x_max), n_(n) {
    if (n < 8) throw ShapeError("Grid1D needs at least 8 points");
    if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max))
        throw ShapeError("Grid1D needs x_max > x_min");
    dx_ = (x_max - x_min) / static_cast<double>(n - 1);
}

Grid1D Grid1D::with_spacing(double x_min, double x_max, double dx) {
    if (!(dx > 0.0)) throw ShapeError("grid spacing must be positive");
    auto cells = static_cast<std::size_t>(std::ceil((x_max - x_min) / dx - 1e-9));
    return Grid1D(x_min, x_max, std::max<std::size_t>(cells + 1, 8));
}

WaveFunction1D::WaveFunction1D(Grid1D g, std::vector<Complex> values, double time)
    : grid(g), psi(std::move(values)), t(time) {
    if (psi.size() != grid.size()) throw ShapeError("wave function length does not match grid");
    for (const auto& z : psi)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw UnstableState("wave function has non-finite amplitude");
}

WaveFunction1D::WaveFunction1D(Grid1D g, double time)
    : grid(g), psi(g.size(), Complex{0.0, 0.0}), t(time) {}

double WaveFunction1D::peak_density() const {
    double m = 0.0;
    for (const auto& z : psi) m = std::max(m, std::norm(z));
    return m;
}

WaveFunction2D::WaveFunction2D(Grid2D g, std::vector<Complex> values, double time)
    : grid(g), psi(std::move(values)), t(time) {
    if (psi.size() != grid.size()) throw ShapeError("wave function length does not match grid");
    for (const auto& z : psi)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw UnstableState("wave function has non-finite amplitude");
}

double WaveFunction2D::peak_density() const {
    double m = 0.0;
    for (const auto& z : psi) m = std::max(m, std::norm(z));
    return m;
}

PotentialField::PotentialField(std::vector<double> v, std::string l)
    : values(std::move(v)), label(std::move(l)) {
    for (double x : values)
        if (!std::isfinite(x)) throw ShapeError("potential '" + label + "' has non-finite values");
}

double trapezoid(std::span<const double> f, double dx) {
    if (f.empty()) return 0.0;
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
    return s * dx;
}

double norm_squared(const WaveFunction1D& wf) {
    const auto& p = wf.psi;
    const std::size_t n = p.size();
    double s = 0.5 * (std::norm(p.front()) + std::norm(p.back()));
    for (std::size_t i = 1; i + 1 < n; ++i) s += std::norm(p[i]);
    return s * wf.grid.dx();
}

double norm_squared(const WaveFunction2D& wf) {
    const auto& g = wf.grid;
    const std::size_t n1 = g.axis1().size();
    const std::size_t n2 = g.axis2().size();
    double s = 0.0;
    for (std::size_t i = 0; i < n1; ++i) {
        const double w1 = (i == 0 || i + 1 == n1) ? 0.5 : 1.0;
        for (std::size_t j = 0; j < n2; ++j) {
            const double w2 = (j == 0 || j + 1 == n2) ? 0.5 : 1.0;
            s += w1 * w2 * std::norm(wf.psi[g.index(i, j)]);
        }
    }
    return s * g.axis1().dx() * g.axis2().dx();
}

}  // namespace bohmsemi
