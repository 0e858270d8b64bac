#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace bohmsemi {

using Complex = std::complex<double>;

/// Uniform 1D grid, x_i = x_min + i*dx for i = 0..n-1.
class Grid1D {
public:
    Grid1D(double x_min, double x_max, std::size_t n);

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    std::size_t size() const { return n_; }
    double dx() const { return dx_; }
    double x(std::size_t i) const { return x_min_ + static_cast<double>(i) * dx_; }
    bool contains(double x) const { return x >= x_min_ && x <= x_max_; }

    /// Grid with the given spacing (rounded so that dx divides the interval).
    static Grid1D with_spacing(double x_min, double x_max, double dx);

    friend bool operator==(const Grid1D&, const Grid1D&) = default;

private:
    double x_min_;
    double x_max_;
    std::size_t n_;
    double dx_;
};

/// Tensor product of two grids; samples are stored row-major with axis2 fastest.
class Grid2D {
public:
    Grid2D(Grid1D axis1, Grid1D axis2) : axis1_(axis1), axis2_(axis2) {}

    const Grid1D& axis1() const { return axis1_; }
    const Grid1D& axis2() const { return axis2_; }
    std::size_t size() const { return axis1_.size() * axis2_.size(); }
    std::size_t index(std::size_t i1, std::size_t i2) const { return i1 * axis2_.size() + i2; }

    friend bool operator==(const Grid2D&, const Grid2D&) = default;

private:
    Grid1D axis1_;
    Grid1D axis2_;
};

struct WaveFunction1D {
    Grid1D grid;
    std::vector<Complex> psi;
    double t = 0.0;

    WaveFunction1D(Grid1D g, std::vector<Complex> values, double time = 0.0);
    /// Zero state on the grid.
    explicit WaveFunction1D(Grid1D g, double time = 0.0);

    template <class F>
    static WaveFunction1D sample(const Grid1D& g, F&& f, double time = 0.0) {
        std::vector<Complex> v(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(g.x(i));
        return WaveFunction1D(g, std::move(v), time);
    }

    double density(std::size_t i) const { return std::norm(psi[i]); }
    double peak_density() const;
};

struct WaveFunction2D {
    Grid2D grid;
    std::vector<Complex> psi;
    double t = 0.0;

    WaveFunction2D(Grid2D g, std::vector<Complex> values, double time = 0.0);

    template <class F>
    static WaveFunction2D sample(const Grid2D& g, F&& f, double time = 0.0) {
        std::vector<Complex> v(g.size());
        for (std::size_t i = 0; i < g.axis1().size(); ++i)
            for (std::size_t j = 0; j < g.axis2().size(); ++j)
                v[g.index(i, j)] = f(g.axis1().x(i), g.axis2().x(j));
        return WaveFunction2D(g, std::move(v), time);
    }

    Complex at(std::size_t i1, std::size_t i2) const { return psi[grid.index(i1, i2)]; }
    double peak_density() const;
};

/// Real potential sampled on a grid (1D or flattened 2D).
struct PotentialField {
    std::vector<double> values;
    std::string label;

    PotentialField() = default;
    PotentialField(std::vector<double> v, std::string l = {});

    static PotentialField zero(std::size_t n, std::string l = "zero") {
        return PotentialField(std::vector<double>(n, 0.0), std::move(l));
    }
    template <class F>
    static PotentialField sample(const Grid1D& g, F&& f, std::string l = {}) {
        std::vector<double> v(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(g.x(i));
        return PotentialField(std::move(v), std::move(l));
    }
    template <class F>
    static PotentialField sample(const Grid2D& g, F&& f, std::string l = {}) {
        std::vector<double> v(g.size());
        for (std::size_t i = 0; i < g.axis1().size(); ++i)
            for (std::size_t j = 0; j < g.axis2().size(); ++j)
                v[g.index(i, j)] = f(g.axis1().x(i), g.axis2().x(j));
        return PotentialField(std::move(v), std::move(l));
    }

    std::size_t size() const { return values.size(); }
};

// Trapezoidal quadrature.
double trapezoid(std::span<const double> f, double dx);
double norm_squared(const WaveFunction1D& wf);
double norm_squared(const WaveFunction2D& wf);

}  // namespace bohmsemi
