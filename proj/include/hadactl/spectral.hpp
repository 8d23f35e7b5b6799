#pragma once

/// Dirichlet-Laplacian eigenstructure on intervals and rectangles, subregions,
/// actuator distributions and every spatial inner product the toolkit needs.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "hadactl/error.hpp"
#include "hadactl/quadrature.hpp"

namespace hadactl {

using Point = std::array<double, 2>;
using Vec2 = std::array<double, 2>;

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    double length() const noexcept { return hi - lo; }
    bool operator==(const Interval&) const = default;
};

/// Axis-aligned rectangle (or interval when dim() == 1).
struct RectDomain {
    std::vector<Interval> axes;

    int dim() const noexcept { return static_cast<int>(axes.size()); }

    void validate() const {
        if (axes.empty() || axes.size() > 2)
            throw ConfigError(detail::concat("domain must have 1 or 2 axes, got ", axes.size()));
        for (std::size_t d = 0; d < axes.size(); ++d)
            if (!(axes[d].lo < axes[d].hi))
                throw GeometryError(detail::concat("domain axis ", d, " needs lo < hi, got [", axes[d].lo, ", ",
                                                   axes[d].hi, "]"));
    }
    bool operator==(const RectDomain&) const = default;
};

/// Axis-aligned box; degenerate (zero-measure) boxes are allowed.
struct Box {
    std::vector<Interval> axes;

    double measure() const {
        double m = 1.0;
        for (const auto& ax : axes) m *= ax.length();
        return m;
    }
    bool operator==(const Box&) const = default;
};

/// Union of boxes with disjoint interiors.
struct Region {
    std::vector<Box> boxes;

    static Region whole(const RectDomain& domain) { return Region{{Box{domain.axes}}}; }

    double measure() const {
        double m = 0.0;
        for (const auto& b : boxes) m += b.measure();
        return m;
    }

    /// Checks containment in the domain and interior disjointness.
    void validate(const RectDomain& domain, const std::string& what = "region") const {
        const double tol = 1e-12;
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            const auto& b = boxes[i];
            if (b.axes.size() != domain.axes.size())
                throw GeometryError(detail::concat(what, " box ", i, " has ", b.axes.size(), " axes, domain has ",
                                                   domain.axes.size()));
            for (std::size_t d = 0; d < b.axes.size(); ++d) {
                const auto& ax = b.axes[d];
                if (!(ax.lo <= ax.hi))
                    throw GeometryError(detail::concat(what, " box ", i, " axis ", d, " has lo > hi"));
                if (ax.lo < domain.axes[d].lo - tol || ax.hi > domain.axes[d].hi + tol)
                    throw GeometryError(detail::concat(what, " box ", i, " axis ", d, " [", ax.lo, ", ", ax.hi,
                                                       "] leaves the domain [", domain.axes[d].lo, ", ",
                                                       domain.axes[d].hi, "]"));
            }
        }
        for (std::size_t i = 0; i < boxes.size(); ++i)
            for (std::size_t j = i + 1; j < boxes.size(); ++j) {
                double overlap = 1.0;
                for (std::size_t d = 0; d < boxes[i].axes.size(); ++d) {
                    const double lo = std::max(boxes[i].axes[d].lo, boxes[j].axes[d].lo);
                    const double hi = std::min(boxes[i].axes[d].hi, boxes[j].axes[d].hi);
                    overlap *= std::max(0.0, hi - lo);
                }
                if (overlap > tol)
                    throw GeometryError(detail::concat(what, " boxes ", i, " and ", j, " overlap"));
            }
    }
    bool operator==(const Region&) const = default;
};

enum class BasisKind { canonical, integer_sine };

inline const char* to_string(BasisKind k) { return k == BasisKind::canonical ? "canonical" : "integer_sine"; }

struct Mode {
    std::array<int, 2> index{1, 1};
    double lambda = 0.0;
    int bucket = 0;
};

/// Dirichlet eigenpairs with all per-axis indices 1..K, sorted by eigenvalue.
///
/// canonical: prod_d sqrt(2/len_d) sin(k_d pi (x_d - lo_d)/len_d), complete on
///            any rectangle.
/// integer_sine: prod_d sin(k_d pi x_d) on [-1, 1]^n, already of unit norm. The
///            family misses the cosine-type modes, so it is not complete.
class SpectralBasis {
public:
    SpectralBasis(RectDomain domain, int K, BasisKind kind = BasisKind::canonical)
        : domain_(std::move(domain)), K_(K), kind_(kind) {
        domain_.validate();
        if (K < 1) throw ConfigError(detail::concat("mode cutoff K must be >= 1, got ", K));
        if (kind_ == BasisKind::integer_sine)
            for (const auto& ax : domain_.axes)
                if (ax.lo != -1.0 || ax.hi != 1.0)
                    throw ConfigError("integer_sine basis is only defined on [-1,1]^n");
        const double pi = std::numbers::pi;
        const int n = domain_.dim();
        for (int k = 1; k <= K; ++k)
            for (int l = 1; l <= (n == 2 ? K : 1); ++l) {
                Mode m;
                m.index = {k, n == 2 ? l : 0};
                m.lambda = 0.0;
                for (int d = 0; d < n; ++d) {
                    const double w = m.index[d] * pi / (kind_ == BasisKind::integer_sine ? 1.0 : domain_.axes[d].length());
                    m.lambda += w * w;
                }
                modes_.push_back(m);
            }
        std::stable_sort(modes_.begin(), modes_.end(), [](const Mode& x, const Mode& y) { return x.lambda < y.lambda; });
        for (std::size_t i = 0; i < modes_.size(); ++i) {
            if (i == 0 || std::abs(modes_[i].lambda - modes_[i - 1].lambda) > 1e-9 * modes_[i].lambda)
                buckets_.emplace_back();
            modes_[i].bucket = static_cast<int>(buckets_.size()) - 1;
            buckets_.back().push_back(static_cast<int>(i));
        }
    }

    const RectDomain& domain() const noexcept { return domain_; }
    int dim() const noexcept { return domain_.dim(); }
    int cutoff() const noexcept { return K_; }
    BasisKind kind() const noexcept { return kind_; }
    int size() const noexcept { return static_cast<int>(modes_.size()); }
    const Mode& mode(int i) const { return modes_.at(i); }
    const std::vector<Mode>& modes() const noexcept { return modes_; }
    const std::vector<std::vector<int>>& buckets() const noexcept { return buckets_; }
    int multiplicity(int bucket) const { return static_cast<int>(buckets_.at(bucket).size()); }

    Eigen::VectorXd eigenvalues() const {
        Eigen::VectorXd v(size());
        for (int i = 0; i < size(); ++i) v(i) = modes_[i].lambda;
        return v;
    }

    double eval(int i, const Point& x) const {
        double v = 1.0;
        for (int d = 0; d < dim(); ++d) v *= factor(i, d, x[d]).first;
        return v;
    }

    Vec2 grad(int i, const Point& x) const {
        Vec2 g{0.0, 0.0};
        if (dim() == 1) {
            g[0] = factor(i, 0, x[0]).second;
            return g;
        }
        const auto f0 = factor(i, 0, x[0]);
        const auto f1 = factor(i, 1, x[1]);
        g[0] = f0.second * f1.first;
        g[1] = f0.first * f1.second;
        return g;
    }

    /// Largest wavenumber along axis d.
    double max_wavenumber(int d) const {
        return K_ * std::numbers::pi / (kind_ == BasisKind::integer_sine ? 1.0 : domain_.axes.at(d).length());
    }

    /// Gauss-Legendre order per box axis for products of two basis functions
    /// (or their gradients) over the region: at least 2K+8, raised when a box
    /// spans many oscillations so the error stays at roundoff level.
    int quadrature_order(const Region& region) const {
        int n = 2 * K_ + 8;
        for (const auto& box : region.boxes)
            for (int d = 0; d < dim(); ++d) {
                const double half_phase = max_wavenumber(d) * box.axes[d].length();
                n = std::max(n, static_cast<int>(std::ceil(0.9 * half_phase)) + 10);
            }
        return n;
    }
    int quadrature_order() const { return quadrature_order(Region::whole(domain_)); }

private:
    // (value, derivative) of the axis-d factor of mode i.
    std::pair<double, double> factor(int i, int d, double x) const {
        const double pi = std::numbers::pi;
        const int k = modes_[i].index[d];
        if (kind_ == BasisKind::integer_sine) return {std::sin(k * pi * x), k * pi * std::cos(k * pi * x)};
        const auto& ax = domain_.axes[d];
        const double len = ax.length();
        const double c = std::sqrt(2.0 / len);
        const double w = k * pi / len;
        return {c * std::sin(w * (x - ax.lo)), c * w * std::cos(w * (x - ax.lo))};
    }

    RectDomain domain_;
    int K_;
    BasisKind kind_;
    std::vector<Mode> modes_;
    std::vector<std::vector<int>> buckets_;
};

/// Tensor Gauss-Legendre nodes and weights over all boxes of a region.
struct RegionQuadrature {
    std::vector<Point> points;
    std::vector<double> weights;
};

inline RegionQuadrature region_quadrature(const Region& region, int dim, int order) {
    RegionQuadrature q;
    for (const auto& box : region.boxes) {
        if (box.measure() <= 0.0) continue;
        const auto rx = gauss_legendre_on(order, box.axes[0].lo, box.axes[0].hi);
        if (dim == 1) {
            for (std::size_t i = 0; i < rx.size(); ++i) {
                q.points.push_back({rx.nodes[i], 0.0});
                q.weights.push_back(rx.weights[i]);
            }
            continue;
        }
        const auto ry = gauss_legendre_on(order, box.axes[1].lo, box.axes[1].hi);
        for (std::size_t i = 0; i < rx.size(); ++i)
            for (std::size_t j = 0; j < ry.size(); ++j) {
                q.points.push_back({rx.nodes[i], ry.nodes[j]});
                q.weights.push_back(rx.weights[i] * ry.weights[j]);
            }
    }
    return q;
}

/// A quadrature value together with the empty-region warning flag.
struct InnerProduct {
    double value = 0.0;
    bool empty_region = false;
    operator double() const noexcept { return value; }
};

/// <f, g> over the region by tensor Gauss-Legendre on each box.
template <class F, class G>
InnerProduct region_inner_product(const F& f, const G& g, const Region& region, int dim, int order) {
    if (region.measure() <= 0.0) return {0.0, true};
    const auto q = region_quadrature(region, dim, order);
    double sum = 0.0;
    for (std::size_t i = 0; i < q.points.size(); ++i) sum += q.weights[i] * f(q.points[i]) * g(q.points[i]);
    return {sum, false};
}

// ---------------------------------------------------------------- actuators

struct ConstantDistribution {
    double value = 1.0;
    bool operator==(const ConstantDistribution&) const = default;
};

/// sum_t coef_t x^{p_t} y^{q_t}
struct PolynomialDistribution {
    struct Term {
        double coef = 0.0;
        std::array<int, 2> powers{0, 0};
        bool operator==(const Term&) const = default;
    };
    std::vector<Term> terms;
    bool operator==(const PolynomialDistribution&) const = default;

    int degree() const {
        int d = 0;
        for (const auto& t : terms) d = std::max(d, t.powers[0] + t.powers[1]);
        return d;
    }
};

/// amplitude * prod_d sin(frequency_d pi (x_d - origin_d)); a zero frequency
/// on an axis makes that factor 1.
struct SineProductDistribution {
    double amplitude = 1.0;
    std::array<double, 2> frequency{1.0, 1.0};
    std::array<double, 2> origin{0.0, 0.0};
    bool operator==(const SineProductDistribution&) const = default;
};

using Distribution = std::variant<ConstantDistribution, PolynomialDistribution, SineProductDistribution>;

inline double evaluate(const Distribution& d, const Point& x, int dim) {
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ConstantDistribution>) {
                return v.value;
            } else if constexpr (std::is_same_v<T, PolynomialDistribution>) {
                double s = 0.0;
                for (const auto& t : v.terms) {
                    double m = t.coef * std::pow(x[0], t.powers[0]);
                    if (dim == 2) m *= std::pow(x[1], t.powers[1]);
                    s += m;
                }
                return s;
            } else {
                double s = v.amplitude;
                for (int d = 0; d < dim; ++d)
                    if (v.frequency[d] != 0.0) s *= std::sin(v.frequency[d] * std::numbers::pi * (x[d] - v.origin[d]));
                return s;
            }
        },
        d);
}

/// Extra Gauss-Legendre points needed on top of the basis order.
inline int extra_order(const Distribution& d, const Region& support) {
    return std::visit(
        [&](const auto& v) -> int {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ConstantDistribution>) {
                return 0;
            } else if constexpr (std::is_same_v<T, PolynomialDistribution>) {
                return (v.degree() + 1) / 2 + 1;
            } else {
                double span = 0.0;
                for (const auto& b : support.boxes)
                    for (const auto& ax : b.axes) span = std::max(span, ax.length());
                const double f = std::max(std::abs(v.frequency[0]), std::abs(v.frequency[1]));
                return static_cast<int>(std::ceil(f * span)) + 4;
            }
        },
        d);
}

struct Actuator {
    Region support;
    Distribution distribution = ConstantDistribution{};
    bool operator==(const Actuator&) const = default;
};

using ActuatorSet = std::vector<Actuator>;

inline void validate_actuators(const ActuatorSet& acts, const RectDomain& domain) {
    for (std::size_t i = 0; i < acts.size(); ++i) acts[i].support.validate(domain, detail::concat("actuator ", i));
}

/// m x N matrix d^i_j = <chi_{P_i} d_i, alpha_j>.
inline Eigen::MatrixXd actuator_coefficients(const ActuatorSet& acts, const SpectralBasis& basis) {
    validate_actuators(acts, basis.domain());
    const int N = basis.size();
    const int dim = basis.dim();
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(acts.size()), N);
    for (std::size_t i = 0; i < acts.size(); ++i) {
        const auto& act = acts[i];
        const int order = basis.quadrature_order(act.support) + extra_order(act.distribution, act.support);
        const auto q = region_quadrature(act.support, dim, order);
        for (std::size_t p = 0; p < q.points.size(); ++p) {
            const double wd = q.weights[p] * evaluate(act.distribution, q.points[p], dim);
            if (wd == 0.0) continue;
            for (int j = 0; j < N; ++j) D(static_cast<Eigen::Index>(i), j) += wd * basis.eval(j, q.points[p]);
        }
    }
    return D;
}

// ------------------------------------------------------------ gradient space

/// Gram matrix of the restricted gradients psi_j = p_omega grad alpha_j.
struct GradientBasisGram {
    Eigen::MatrixXd gamma;
    bool empty_region = false;
};

/// Gradients of every basis function at every quadrature point, pre-scaled by
/// sqrt(weight): rows are (point, component), columns are modes.
inline Eigen::MatrixXd weighted_gradient_samples(const SpectralBasis& basis, const Region& region, int order) {
    const auto q = region_quadrature(region, basis.dim(), order);
    const int n = basis.dim();
    Eigen::MatrixXd G(static_cast<Eigen::Index>(q.points.size()) * n, basis.size());
    for (std::size_t p = 0; p < q.points.size(); ++p) {
        const double sw = std::sqrt(q.weights[p]);
        for (int j = 0; j < basis.size(); ++j) {
            const auto g = basis.grad(j, q.points[p]);
            for (int d = 0; d < n; ++d) G(static_cast<Eigen::Index>(p) * n + d, j) = sw * g[d];
        }
    }
    return G;
}

inline GradientBasisGram gradient_gram(const SpectralBasis& basis, const Region& region, int order = 0) {
    region.validate(basis.domain());
    GradientBasisGram out;
    const int N = basis.size();
    if (region.measure() <= 0.0) {
        out.gamma = Eigen::MatrixXd::Zero(N, N);
        out.empty_region = true;
        return out;
    }
    const Eigen::MatrixXd G = weighted_gradient_samples(basis, region, order > 0 ? order : basis.quadrature_order(region));
    Eigen::MatrixXd gamma = G.transpose() * G;
    out.gamma = 0.5 * (gamma + gamma.transpose());
    return out;
}

/// c_j = <g, p_omega grad alpha_j> for g = sum_m g_m psi_m, i.e. c = Gamma g.
inline Eigen::VectorXd adjoint_gradient_coefficients(const Eigen::VectorXd& g, const GradientBasisGram& gram) {
    if (g.size() != gram.gamma.rows())
        throw ConfigError(detail::concat("gradient coefficients have ", g.size(), " entries, basis has ",
                                         gram.gamma.rows()));
    return gram.gamma * g;
}

/// c_j = <g, grad alpha_j>_omega for a vector field g given pointwise on omega.
template <class Field>
Eigen::VectorXd adjoint_gradient_coefficients(const Field& g, const SpectralBasis& basis, const Region& region,
                                              int order = 0) {
    region.validate(basis.domain());
    const auto q = region_quadrature(region, basis.dim(), order > 0 ? order : basis.quadrature_order(region) + 4);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.size());
    for (std::size_t p = 0; p < q.points.size(); ++p) {
        const Vec2 gv = g(q.points[p]);
        for (int j = 0; j < basis.size(); ++j) {
            const Vec2 gr = basis.grad(j, q.points[p]);
            double dot = gv[0] * gr[0];
            if (basis.dim() == 2) dot += gv[1] * gr[1];
            c(j) += q.weights[p] * dot;
        }
    }
    return c;
}

}  // namespace hadactl
