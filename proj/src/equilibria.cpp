#include "urnflow/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "urnflow/dynamics.hpp"
#include "urnflow/spectral.hpp"

namespace urnflow {

namespace {

using Index = Eigen::Index;

Index idx(Vertex v) { return static_cast<Index>(v); }

constexpr std::size_t kMaxEnumerationVertices = 24;

bool lex_less(const Support& a, const Support& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

void check_admissible(const Graph& g, const Support& s) {
    if (s.empty()) throw Error(Errc::validation, "empty support");
    std::vector<bool> in(g.vertex_count(), false);
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k] >= g.vertex_count() || (k > 0 && s[k] <= s[k - 1]))
            throw Error(Errc::validation, "support must be strictly increasing vertex ids");
        in[s[k]] = true;
    }
    for (const auto& e : g.edges())
        if (!in[e.u] && !in[e.v])
            throw Error(Errc::validation, "support complement contains an edge");
}

double face_residual(const Point& grad, const Support& s) {
    double r = 0;
    for (Vertex i : s) r = std::max(r, std::abs(grad[idx(i)]));
    return r;
}

double min_on(const Point& v, const Support& s) {
    double lo = std::numeric_limits<double>::infinity();
    for (Vertex i : s) lo = std::min(lo, v[idx(i)]);
    return lo;
}

// Newton iterations on dL/dv_i = 0, i in s. The system's Jacobian is the
// Hessian of L on the face; it is singular along the interval direction of
// a balanced bipartite full face, hence the rank-revealing solve.
bool newton_polish(const Graph& g, const Support& s, Point& v, const Tolerances& tol) {
    const auto k = static_cast<Index>(s.size());
    for (int it = 0; it < 30; ++it) {
        const Point grad = lyapunov_grad(g, v);
        const double res = face_residual(grad, s);
        if (res <= tol.face_solve) return true;
        const Matrix hess = lyapunov_hessian(g, v);
        Matrix h(k, k);
        Point rhs(k);
        for (Index a = 0; a < k; ++a) {
            rhs[a] = -grad[idx(s[static_cast<std::size_t>(a)])];
            for (Index b = 0; b < k; ++b)
                h(a, b) = hess(idx(s[static_cast<std::size_t>(a)]), idx(s[static_cast<std::size_t>(b)]));
        }
        const Point delta = h.completeOrthogonalDecomposition().solve(rhs);

        double step = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 30 && !improved; ++ls, step *= 0.5) {
            Point trial = v;
            bool positive = true;
            for (Index a = 0; a < k; ++a) {
                auto i = idx(s[static_cast<std::size_t>(a)]);
                trial[i] += step * delta[a];
                positive = positive && trial[i] > 0;
            }
            if (!positive) continue;
            if (face_residual(lyapunov_grad(g, trial), s) < res) {
                v = std::move(trial);
                improved = true;
            }
        }
        if (!improved) return false;
    }
    return face_residual(lyapunov_grad(g, v), s) <= tol.face_solve;
}

// Euclidean projection of y onto {z >= 0, sum z = 1}.
Point project_simplex(const Point& y) {
    std::vector<double> sorted(y.data(), y.data() + y.size());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0, theta = 0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        cumulative += sorted[k];
        const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
        if (sorted[k] - t > 0) theta = t;
    }
    return (y.array() - theta).cwiseMax(0.0);
}

// Projected gradient ascent on L over the face with Armijo backtracking.
// Used when the fixed-point iteration stalls in the interior.
void gradient_ascent(const Graph& g, const Support& s, Point& v, int iterations) {
    const auto k = static_cast<Index>(s.size());
    auto restrict_to = [&](const Point& full) {
        Point r(k);
        for (Index a = 0; a < k; ++a) r[a] = full[idx(s[static_cast<std::size_t>(a)])];
        return r;
    };
    auto expand = [&](const Point& r) {
        Point full = Point::Zero(v.size());
        for (Index a = 0; a < k; ++a) full[idx(s[static_cast<std::size_t>(a)])] = r[a];
        return full;
    };
    auto value = [&](const Point& full) {
        try {
            return lyapunov(g, full);
        } catch (const Error&) {
            return -std::numeric_limits<double>::infinity();
        }
    };
    Point z = restrict_to(v);
    double step = 1e-2;
    for (int it = 0; it < iterations; ++it) {
        const Point full = expand(z);
        const double current = value(full);
        const Point grad = restrict_to(lyapunov_grad(g, full));
        bool moved = false;
        for (int ls = 0; ls < 40; ++ls) {
            const Point trial = project_simplex(z + step * grad);
            if (value(expand(trial)) >= current + 1e-4 * grad.dot(trial - z)) {
                moved = (trial - z).lpNorm<1>() > 0;
                z = trial;
                step *= 2.0;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
    v = expand(z);
}

}  // namespace

const char* stability_name(Stability s) noexcept {
    return s == Stability::unstable ? "unstable" : "non-unstable";
}

const char* limit_kind_name(LimitKind k) noexcept {
    switch (k) {
        case LimitKind::unique_point: return "UniquePoint";
        case LimitKind::omega_segment: return "OmegaSegment";
        case LimitKind::interior_interval: return "InteriorInterval";
        case LimitKind::finite_set: return "FiniteSet";
    }
    return "Unknown";
}

Support support_of(const Point& v) {
    Support s;
    for (Index i = 0; i < v.size(); ++i)
        if (v[i] > 0) s.push_back(static_cast<Vertex>(i));
    return s;
}

std::vector<Support> enumerate_faces(const Graph& g) {
    const std::size_t m = g.vertex_count();
    if (m > kMaxEnumerationVertices)
        throw Error(Errc::too_large, std::to_string(m) + " vertices exceeds the enumeration bound of " +
                                         std::to_string(kMaxEnumerationVertices));
    std::vector<Support> faces;
    const std::uint32_t full = (std::uint32_t{1} << m) - 1;
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        bool independent = true;
        for (const auto& e : g.edges()) {
            if (!(mask >> e.u & 1u) && !(mask >> e.v & 1u)) {
                independent = false;
                break;
            }
        }
        if (!independent) continue;
        Support s;
        for (Vertex i = 0; i < m; ++i)
            if (mask >> i & 1u) s.push_back(i);
        faces.push_back(std::move(s));
    }
    std::sort(faces.begin(), faces.end(), lex_less);
    return faces;
}

std::optional<Point> face_critical_point(const Graph& g, const Support& s, const Tolerances& tol) {
    check_admissible(g, s);
    constexpr double damping = 0.5;
    const int max_iter = tol.face_max_iterations;
    const int fallback_at = max_iter / 2;

    // A limit with a coordinate this close to zero belongs to a smaller face,
    // which the enumeration visits on its own.
    auto accept = [&](Point p) -> std::optional<Point> {
        if (min_on(p, s) < tol.dedup) return std::nullopt;
        return p;
    };

    Point v = Point::Zero(idx(g.vertex_count()));
    for (Vertex i : s) v[idx(i)] = 1.0 / static_cast<double>(s.size());

    int below_floor = 0;
    double residual_at_floor = std::numeric_limits<double>::infinity();
    bool tried_newton_at = false;
    for (int it = 0; it < max_iter; ++it) {
        const Point grad = lyapunov_grad(g, v);
        const double residual = face_residual(grad, s);
        const double lowest = min_on(v, s);

        if (residual <= tol.face_solve) return accept(v);

        // Close enough for Newton to take over from the linear fixed-point rate.
        if (residual < 1e-3 && lowest > 1e-8 && !tried_newton_at) {
            Point polished = v;
            if (newton_polish(g, s, polished, tol)) return accept(polished);
            tried_newton_at = true;
        }
        if (residual >= 1e-3) tried_newton_at = false;

        if (lowest < tol.boundary_floor) {
            if (below_floor == 0) residual_at_floor = residual;
            if (residual > 0.5 * residual_at_floor) {
                if (++below_floor >= tol.boundary_patience) return std::nullopt;
            } else {
                below_floor = 0;
            }
        } else {
            below_floor = 0;
        }

        if (it == fallback_at && lowest >= tol.boundary_floor) {
            gradient_ascent(g, s, v, max_iter - fallback_at);
            Point polished = v;
            if (min_on(polished, s) > 0 && newton_polish(g, s, polished, tol)) return accept(polished);
            if (min_on(v, s) <= 0) return std::nullopt;
            break;
        }

        const Point pull = grad.array() + 1.0;
        for (Vertex i : s) v[idx(i)] *= (1.0 - damping) + damping * pull[idx(i)];
        double total = 0;
        for (Vertex i : s) total += v[idx(i)];
        for (Vertex i : s) v[idx(i)] /= total;
    }
    throw Error(Errc::no_convergence, "face solver did not converge within " +
                                          std::to_string(max_iter) + " iterations");
}

std::vector<double> spectrum(const Graph& g, const Point& v, const Tolerances& tol) {
    const Support p = support_of(v);
    for (Vertex i : p)
        if (v[idx(i)] < tol.degenerate_point)
            throw Error(Errc::degenerate_point, "coordinate " + std::to_string(i + 1) +
                                                    " is too small to conjugate");
    const Point grad = lyapunov_grad(g, v);
    std::vector<double> eig;
    for (Index i = 0; i < v.size(); ++i)
        if (!(v[i] > 0)) eig.push_back(grad[i]);

    if (!p.empty()) {
        const Matrix hess = lyapunov_hessian(g, v);
        const auto k = static_cast<Index>(p.size());
        Matrix sym(k, k);
        for (Index a = 0; a < k; ++a) {
            const auto i = idx(p[static_cast<std::size_t>(a)]);
            for (Index b = 0; b < k; ++b) {
                const auto j = idx(p[static_cast<std::size_t>(b)]);
                sym(a, b) = std::sqrt(v[i]) * hess(i, j) * std::sqrt(v[j]);
            }
            sym(a, a) += grad[i];
        }
        for (double e : jacobi_eigenvalues(sym, tol.jacobi_offdiag)) eig.push_back(e);
    }
    std::sort(eig.begin(), eig.end());
    return eig;
}

Classification classification_of(const Graph& g, const Point& v, const Tolerances& tol) {
    Classification out;
    const Point grad = lyapunov_grad(g, v);
    bool positive_sign = false;
    for (Index i = 0; i < v.size(); ++i) {
        if (v[i] > 0) continue;
        out.sign_test.push_back({static_cast<Vertex>(i), grad[i]});
        positive_sign = positive_sign || grad[i] > tol.class_eps;
    }
    out.stability = positive_sign ? Stability::unstable : Stability::non_unstable;
    out.spectrum = spectrum(g, v, tol);
    const bool positive_eigen = !out.spectrum.empty() && out.spectrum.back() > tol.class_eps;
    out.consistent = positive_eigen == positive_sign;
    return out;
}

Classification classify_equilibrium(const Graph& g, const Point& v, const Tolerances& tol) {
    Classification out = classification_of(g, v, tol);
    if (!out.consistent)
        throw Error(Errc::inconsistent_classification,
                    "sign test and spectrum disagree (largest eigenvalue " +
                        std::to_string(out.spectrum.back()) + ")");
    return out;
}

namespace {

InteriorInterval interval_from_base(const Graph& g, const GraphClass& cls, const Point& base,
                                    const Tolerances& tol) {
    InteriorInterval out;
    out.base = base;
    const auto signs = bipartite_sign_vector(g, cls);
    out.direction = Eigen::Map<const Point>(signs.data(), static_cast<Index>(signs.size()));
    double min_a = std::numeric_limits<double>::infinity();
    double min_b = std::numeric_limits<double>::infinity();
    for (Vertex i : cls.bipartition->a) min_a = std::min(min_a, base[idx(i)]);
    for (Vertex i : cls.bipartition->b) min_b = std::min(min_b, base[idx(i)]);
    out.eta_min = -min_a;
    out.eta_max = min_b;

    constexpr int samples = 50;
    for (int k = 0; k < samples; ++k) {
        const double eta = out.eta_min + (out.eta_max - out.eta_min) * (k + 0.5) / samples;
        out.max_sample_residual =
            std::max(out.max_sample_residual, vector_field(g, out.at(eta)).lpNorm<1>());
    }
    if (out.max_sample_residual > tol.equilibrium_residual)
        throw Error(Errc::no_convergence, "interval sample is not an equilibrium (residual " +
                                              std::to_string(out.max_sample_residual) + ")");
    return out;
}

Equilibrium make_equilibrium(const Graph& g, const Point& v, const Tolerances& tol) {
    Equilibrium eq;
    eq.point = v;
    eq.support = support_of(v);
    for (Vertex i = 0; i < g.vertex_count(); ++i)
        if (!(v[idx(i)] > 0)) eq.zero_set.push_back(i);
    eq.residual = vector_field(g, v).lpNorm<1>();
    if (eq.residual > tol.equilibrium_residual)
        throw Error(Errc::no_convergence,
                    "face critical point fails verification (residual " + std::to_string(eq.residual) + ")");
    eq.classification = classification_of(g, v, tol);
    return eq;
}

}  // namespace

std::vector<Equilibrium> find_equilibria(const Graph& g, const Tolerances& tol) {
    const GraphClass cls = classify_graph(g);
    std::vector<Equilibrium> found;
    for (const auto& face : enumerate_faces(g)) {
        auto cp = face_critical_point(g, face, tol);
        if (!cp) continue;
        bool duplicate = false;
        for (const auto& e : found)
            if (l1_distance(e.point, *cp) < tol.dedup) duplicate = true;
        if (duplicate) continue;
        Equilibrium eq = make_equilibrium(g, *cp, tol);
        if (cls.balanced_bipartite() && eq.support.size() == g.vertex_count())
            eq.interval = interval_from_base(g, cls, eq.point, tol);
        found.push_back(std::move(eq));
    }
    std::stable_sort(found.begin(), found.end(), [](const Equilibrium& a, const Equilibrium& b) {
        if (a.support.size() != b.support.size()) return a.support.size() > b.support.size();
        return lex_less(a.support, b.support);
    });
    return found;
}

Point OmegaSegment::at(double p) const {
    Point v(midpoint.size());
    for (Vertex i : part_a) v[idx(i)] = p;
    for (Vertex i : part_b) v[idx(i)] = p_plus_q - p;
    return v;
}

OmegaSegment omega_segment(const Graph& g, const GraphClass& cls) {
    if (!cls.regular_bipartite() || !cls.bipartition)
        throw Error(Errc::not_regular_bipartite, "graph is not regular bipartite");
    OmegaSegment seg;
    seg.p_plus_q = 2.0 / static_cast<double>(g.vertex_count());
    seg.part_a = cls.bipartition->a;
    seg.part_b = cls.bipartition->b;
    seg.midpoint = Point::Constant(idx(g.vertex_count()), 1.0 / static_cast<double>(g.vertex_count()));
    seg.endpoint_a = seg.at(seg.p_plus_q);
    seg.endpoint_b = seg.at(0.0);
    return seg;
}

std::optional<InteriorInterval> interior_interval(const Graph& g, const GraphClass& cls,
                                                  const Tolerances& tol) {
    if (!cls.balanced_bipartite())
        throw Error(Errc::not_balanced_bipartite, "graph is not balanced bipartite");
    Support all(g.vertex_count());
    std::iota(all.begin(), all.end(), Vertex{0});
    auto base = face_critical_point(g, all, tol);
    if (!base) return std::nullopt;
    return interval_from_base(g, cls, *base, tol);
}

std::pair<double, double> nearest_on_line(const Point& x, const Point& base, const Point& direction,
                                          double lo, double hi) {
    // sum_i |x_i - base_i - eta d_i| is convex and piecewise linear in eta,
    // so its minimum over [lo, hi] sits at a breakpoint or an end.
    std::vector<double> candidates{lo, hi};
    for (Index i = 0; i < x.size(); ++i)
        if (direction[i] != 0) {
            const double eta = (x[i] - base[i]) / direction[i];
            if (eta > lo && eta < hi) candidates.push_back(eta);
        }
    double best_eta = lo;
    double best = std::numeric_limits<double>::infinity();
    for (double eta : candidates) {
        const double d = (x - base - eta * direction).lpNorm<1>();
        if (d < best) {
            best = d;
            best_eta = eta;
        }
    }
    return {best_eta, best};
}

OmegaProjection project_to_omega(const Graph& g, const GraphClass& cls, const Point& x) {
    const OmegaSegment seg = omega_segment(g, cls);
    if (x.size() != idx(g.vertex_count())) throw Error(Errc::domain, "point dimension mismatch");
    const auto signs = bipartite_sign_vector(g, cls);
    const Point l = Eigen::Map<const Point>(signs.data(), static_cast<Index>(signs.size()));
    const double half = 0.5 * seg.p_plus_q;
    auto [eta, dist] = nearest_on_line(x, seg.midpoint, l, -half, half);
    OmegaProjection out;
    out.p = half + eta;
    out.nearest = seg.at(out.p);
    out.distance = dist;
    return out;
}

LimitResult limit_object(const Graph& g, const Tolerances& tol) {
    const GraphClass cls = classify_graph(g);
    LimitResult out;
    if (cls.regular_bipartite()) {
        out.kind = LimitKind::omega_segment;
        out.omega = omega_segment(g, cls);
        out.note = "limit is a random point of the segment";
        return out;
    }

    const auto eqs = find_equilibria(g, tol);
    for (const auto& e : eqs)
        if (e.classification.stability == Stability::non_unstable) out.candidates.push_back(e);

    if (!cls.balanced_bipartite()) {
        if (out.candidates.size() != 1)
            throw UniquenessViolation(std::to_string(out.candidates.size()) +
                                          " non-unstable equilibria found, expected exactly one",
                                      out.candidates);
        out.kind = LimitKind::unique_point;
        out.point = out.candidates.front();
        out.note = "deterministic limit point";
        return out;
    }

    for (const auto& e : eqs) {
        if (e.interval) {
            out.kind = LimitKind::interior_interval;
            out.interval = e.interval;
            out.note = "interval of interior equilibria; convergence to a point of it is conjectured, not established";
            return out;
        }
    }
    out.kind = LimitKind::finite_set;
    out.note = "no interior equilibrium; the limit is conjectured to be one of the listed non-unstable equilibria";
    return out;
}

double distance_to_limit(const Graph& g, const GraphClass& cls, const LimitResult& limit,
                         const Point& x) {
    switch (limit.kind) {
        case LimitKind::unique_point: return l1_distance(x, limit.point->point);
        case LimitKind::omega_segment: return project_to_omega(g, cls, x).distance;
        case LimitKind::interior_interval: {
            const auto& iv = *limit.interval;
            return nearest_on_line(x, iv.base, iv.direction, iv.eta_min, iv.eta_max).second;
        }
        case LimitKind::finite_set: {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& e : limit.candidates) best = std::min(best, l1_distance(x, e.point));
            return best;
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace urnflow
