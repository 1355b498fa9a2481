#include "flowembed/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "flowembed/parallel.hpp"

namespace flowembed {

double theoretical_bound(double epsilon, double delta, int m) {
    if (!(epsilon > 0) || !(delta > 0))
        throw std::invalid_argument("theoretical_bound: epsilon and delta must be positive");
    if (m < 1) throw std::invalid_argument("theoretical_bound: m must be >= 1");
    if (m == 1) return 2.0 * epsilon * epsilon / delta;
    return 3.0 * epsilon *
           std::pow(6.0 * static_cast<double>(m - 1) * epsilon / delta, static_cast<double>(m));
}

ExpBound exponential_bound(double epsilon, double delta) {
    if (!(epsilon > 0) || !(delta > 0))
        throw std::invalid_argument("exponential_bound: epsilon and delta must be positive");
    const double value = 3.0 * epsilon * std::exp(-delta / (6.0 * std::numbers::e * epsilon));
    return {value, value < kCertifiableFloor};
}

bool ErrorReport::satisfied() const {
    return within_plan && !tolerance_limited && note.empty() && measured_error <= bound_poly;
}

namespace {

std::string point_str(const Point& x) {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < x.dim(); ++i) {
        if (i) os << ", ";
        os << x.coords[i].real();
        if (x.coords[i].imag() != 0.0) os << " + " << x.coords[i].imag() << "i";
    }
    os << ")";
    return os.str();
}

double epsilon_used_for(const AnyMap& map, const Domain& dom, const CertifyConfig& cfg) {
    if (cfg.epsilon_override) return *cfg.epsilon_override;
    return estimate_epsilon(map, dom, cfg.grid) * cfg.safety_factor;
}

}  // namespace

double embedding_error_at(const AnyMap& map, int m, const Point& x,
                          const IntegratorConfig& integ, const Domain& guard,
                          double* discrepancy) {
    const InterpField field{map, m};
    const Point fx = eval(map, x);
    const FlowResult flow = flow_time_one_verified(field, x, integ, guard);
    if (flow.escaped)
        throw OrbitEscape("trajectory escaped the delta/3 guard from x = " + point_str(x));
    if (discrepancy) *discrepancy = flow.est_global_error;
    return inf_dist(flow.endpoint.coords, fx.coords);
}

ErrorReport measure_error(const AnyMap& map, int m, const Domain& dom,
                          const CertifyConfig& cfg) {
    if (m < 1) throw std::invalid_argument("measure_error: m must be >= 1");
    const double eps_used = epsilon_used_for(map, dom, cfg);
    const std::vector<Point> pts = real_grid(dom, cfg.grid);

    ErrorReport report;
    report.m = m;
    report.epsilon_used = eps_used;
    report.delta = dom.delta;
    report.n_samples = static_cast<long>(pts.size());

    if (eps_used == 0.0) {
        // Degenerate identity-like map: X_m vanishes identically, so the
        // flow is trivial and every bound collapses to zero.
        double worst = 0.0, disc = 0.0;
        for (const Point& x : pts) {
            double d = 0.0;
            worst = std::max(worst, embedding_error_at(map, m, x, cfg.integrator, dom, &d));
            disc = std::max(disc, d);
        }
        report.measured_error = worst;
        report.integrator_discrepancy = disc;
        report.tolerance_limited = disc > worst / 100.0;
        return report;
    }

    const OrderPlan plan = plan_order(eps_used, dom.delta);
    report.within_plan = (m <= plan.m_star) && (m == 1 || plan.admissible);

    std::vector<double> errs(pts.size()), discs(pts.size());
    par::for_each_index(pts.size(), [&](std::size_t i) {
        errs[i] = embedding_error_at(map, m, pts[i], cfg.integrator, dom, &discs[i]);
    });
    report.measured_error = *std::max_element(errs.begin(), errs.end());
    report.integrator_discrepancy = *std::max_element(discs.begin(), discs.end());

    report.bound_poly = theoretical_bound(eps_used, dom.delta, m);
    if (m == plan.m_star) report.bound_exp = exponential_bound(eps_used, dom.delta).value;
    report.tolerance_limited = report.integrator_discrepancy > report.measured_error / 100.0;
    return report;
}

SweepResult order_sweep(const AnyMap& map, const Domain& dom, const CertifyConfig& cfg,
                        int m_max) {
    const double eps_used = epsilon_used_for(map, dom, cfg);
    int m_top;
    if (eps_used == 0.0) {
        m_top = std::max(1, m_max);
    } else {
        const OrderPlan plan = plan_order(eps_used, dom.delta);
        m_top = m_max <= 0 ? plan.m_star : std::min(m_max, plan.m_star);
    }

    SweepResult sweep;
    for (int m = 1; m <= m_top; ++m) {
        try {
            sweep.reports.push_back(measure_error(map, m, dom, cfg));
        } catch (const std::exception& e) {
            ErrorReport failed;
            failed.m = m;
            failed.epsilon_used = eps_used;
            failed.delta = dom.delta;
            failed.measured_error = std::numeric_limits<double>::quiet_NaN();
            failed.within_plan = false;
            failed.note = e.what();
            sweep.reports.push_back(std::move(failed));
        }
    }

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sweep.reports.size(); ++i) {
        const ErrorReport& r = sweep.reports[i];
        if (r.note.empty() && r.measured_error < best) {
            best = r.measured_error;
            sweep.best_index = static_cast<int>(i);
        }
    }
    return sweep;
}

namespace {

// Deterministic subsample of the real grid: evenly strided indices.
std::vector<Point> sample_points(const Domain& dom, int count) {
    if (count < 1) throw std::invalid_argument("sample_points: count must be >= 1");
    const int n = dom.dim();
    int per_axis = std::max(2, static_cast<int>(std::llround(
                                   std::ceil(std::pow(static_cast<double>(count), 1.0 / n)))));
    SampleGrid g;
    g.real_points_per_axis = per_axis;
    std::vector<Point> full = real_grid(dom, g);
    if (static_cast<int>(full.size()) <= count) return full;

    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const std::size_t idx = (static_cast<std::size_t>(i) * full.size()) /
                                static_cast<std::size_t>(count);
        out.push_back(full[idx]);
    }
    return out;
}

}  // namespace

OrderEstimate mu_order_check(const MapSpec& map, int m, const Domain& dom,
                             const CertifyConfig& cfg, int sample_count, double mu0) {
    if (m < 1) throw std::invalid_argument("mu_order_check: m must be >= 1");
    if (!(mu0 > 0)) throw std::invalid_argument("mu_order_check: mu0 must be positive");

    OrderEstimate est;
    est.m = m;
    est.mu_values = {mu0, mu0 / 2.0, mu0 / 4.0};

    const double eps_used = epsilon_used_for(AnyMap{map}, dom, cfg);
    if (eps_used > 0.0) {
        const double radius = mu_radius(eps_used, dom.delta, m);
        if (mu0 > radius / 8.0)
            throw std::invalid_argument("mu_order_check: mu0 must satisfy mu0 <= mu_m/8 = " +
                                        std::to_string(radius / 8.0));
    }

    const std::vector<Point> pts = sample_points(dom, sample_count);
    std::array<double, 3> discs{};
    for (int j = 0; j < 3; ++j) {
        const AnyMap fam{MuFamily{map, Complex(est.mu_values[j], 0.0)}};
        std::vector<double> errs(pts.size()), ds(pts.size());
        par::for_each_index(pts.size(), [&](std::size_t i) {
            errs[i] = embedding_error_at(fam, m, pts[i], cfg.integrator, dom, &ds[i]);
        });
        est.errors[j] = *std::max_element(errs.begin(), errs.end());
        discs[j] = *std::max_element(ds.begin(), ds.end());
    }

    for (int j = 0; j < 3; ++j)
        if (est.errors[j] <= 100.0 * discs[j]) est.inconclusive = true;

    est.observed_order =
        est.inconclusive ? std::numeric_limits<double>::quiet_NaN()
                         : std::log2(est.errors[1] / est.errors[2]);
    return est;
}

CVec directional_derivative(const VectorFieldFn& g, const Point& x, const CVec& v,
                            double fd_step) {
    if (!(fd_step > 0)) throw std::invalid_argument("directional_derivative: fd_step must be > 0");
    const double len = inf_norm(v);
    if (len == 0.0) return CVec(x.coords.size(), Complex(0.0, 0.0));

    CVec fwd = x.coords, bwd = x.coords;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Complex unit = v[i] / len;
        fwd[i] += fd_step * unit;
        bwd[i] -= fd_step * unit;
    }
    CVec out = sub(g(Point(fwd)), g(Point(bwd)));
    scale_inplace(out, Complex(len / (2.0 * fd_step), 0.0));
    return out;
}

namespace {

CVec lie_coefficient_raw(const MapSpec& map, int k, const Point& x, double s) {
    const VectorFieldFn a1 = [&map](const Point& p) { return displacement(map, p); };
    if (k == 1) return a1(x);

    const VectorFieldFn a2 = [&](const Point& p) {
        CVec v = directional_derivative(a1, p, a1(p), s);
        scale_inplace(v, Complex(-0.5, 0.0));
        return v;
    };
    if (k == 2) return a2(x);

    // a_3 = -1/2 [(a1.grad) a2 + (a2.grad) a1] - 1/6 (a1.grad)(a1.grad) a1
    const VectorFieldFn nested = [&](const Point& p) {
        return directional_derivative(a1, p, a1(p), s);
    };
    const CVec a1x = a1(x);
    CVec t1 = directional_derivative(a2, x, a1x, s);
    const CVec t2 = directional_derivative(a1, x, a2(x), s);
    CVec t3 = directional_derivative(nested, x, a1x, s);

    CVec out(x.coords.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = -0.5 * (t1[i] + t2[i]) - t3[i] / 6.0;
    return out;
}

}  // namespace

CVec lie_coefficient(const MapSpec& map, int k, const Point& x, double fd_step) {
    if (k < 1 || k > 3) throw std::invalid_argument("lie_coefficient: k must be 1, 2 or 3");
    if (!(fd_step > 0)) throw std::invalid_argument("lie_coefficient: fd_step must be > 0");
    if (k == 1) return displacement(map, x);

    const CVec v = lie_coefficient_raw(map, k, x, fd_step);
    const CVec v2 = lie_coefficient_raw(map, k, x, 2.0 * fd_step);
    if (inf_dist(v, v2) > 0.1 * inf_norm(v) + 1e-15)
        throw UnstableDerivative("lie_coefficient: result moves by more than 10% when fd_step "
                                 "doubles; cancellation dominates at fd_step = " +
                                 std::to_string(fd_step));
    return v;
}

namespace {

// Solves the small SPD-ish system G c = r by Gaussian elimination with
// partial pivoting in long double; returns the 1-norm condition
// estimate through cond_out.
std::vector<long double> solve_dense(std::vector<std::vector<long double>> G,
                                     std::vector<long double> r, double* cond_out) {
    const std::size_t n = G.size();

    auto norm1 = [n](const std::vector<std::vector<long double>>& A) {
        long double worst = 0.0L;
        for (std::size_t j = 0; j < n; ++j) {
            long double s = 0.0L;
            for (std::size_t i = 0; i < n; ++i) s += std::abs(A[i][j]);
            worst = std::max(worst, s);
        }
        return worst;
    };

    // Explicit inverse for the condition estimate (n <= 3).
    std::vector<std::vector<long double>> A = G;
    std::vector<std::vector<long double>> inv(n, std::vector<long double>(n, 0.0L));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0L;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t i = col + 1; i < n; ++i)
            if (std::abs(A[i][col]) > std::abs(A[pivot][col])) pivot = i;
        if (A[pivot][col] == 0.0L) {
            if (cond_out) *cond_out = std::numeric_limits<double>::infinity();
            return std::vector<long double>(n, 0.0L);
        }
        std::swap(A[col], A[pivot]);
        std::swap(inv[col], inv[pivot]);
        std::swap(r[col], r[pivot]);
        const long double d = A[col][col];
        for (std::size_t j = 0; j < n; ++j) {
            A[col][j] /= d;
            inv[col][j] /= d;
        }
        r[col] /= d;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col) continue;
            const long double f = A[i][col];
            if (f == 0.0L) continue;
            for (std::size_t j = 0; j < n; ++j) {
                A[i][j] -= f * A[col][j];
                inv[i][j] -= f * inv[col][j];
            }
            r[i] -= f * r[col];
        }
    }

    if (cond_out) *cond_out = static_cast<double>(norm1(G) * norm1(inv));
    return r;
}

}  // namespace

std::vector<LieCheck> lie_vs_field_taylor(const MapSpec& map, int m, const Point& x,
                                          const std::vector<double>& mu_grid,
                                          double fd_step) {
    if (m < 2 || m > 3) throw std::invalid_argument("lie_vs_field_taylor: m must be 2 or 3");
    if (static_cast<int>(mu_grid.size()) < 2 * m + 1)
        throw std::invalid_argument("lie_vs_field_taylor: need at least 2m+1 mu values");
    for (double mu : mu_grid)
        if (!(mu > 0) || !std::isfinite(mu))
            throw std::invalid_argument("lie_vs_field_taylor: mu values must be positive");
    {
        std::vector<double> sorted = mu_grid;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("lie_vs_field_taylor: mu values must be distinct");
    }

    const double mu_max = *std::max_element(mu_grid.begin(), mu_grid.end());
    const std::size_t n = x.coords.size();
    const std::size_t deg = static_cast<std::size_t>(m);

    // X_{m,mu}(x) = sum_k a_k mu^k + O(mu^{m+1}); fit powers 1..m of the
    // scaled variable s = mu/mu_max, then unscale the coefficients.
    std::vector<CVec> vals(mu_grid.size());
    for (std::size_t j = 0; j < mu_grid.size(); ++j) {
        const InterpField field{AnyMap{MuFamily{map, Complex(mu_grid[j], 0.0)}}, m};
        vals[j] = field_eval(field, x);
    }

    std::vector<std::vector<long double>> G(deg, std::vector<long double>(deg, 0.0L));
    for (std::size_t j = 0; j < mu_grid.size(); ++j) {
        const long double s = static_cast<long double>(mu_grid[j] / mu_max);
        std::vector<long double> pw(deg + 1, 1.0L);
        for (std::size_t p = 1; p <= deg; ++p) pw[p] = pw[p - 1] * s;
        for (std::size_t p = 0; p < deg; ++p)
            for (std::size_t q = 0; q < deg; ++q) G[p][q] += pw[p + 1] * pw[q + 1];
    }

    auto fit_component = [&](auto value_of) {
        std::vector<long double> rhs(deg, 0.0L);
        for (std::size_t j = 0; j < mu_grid.size(); ++j) {
            const long double s = static_cast<long double>(mu_grid[j] / mu_max);
            long double pw = 1.0L;
            for (std::size_t p = 0; p < deg; ++p) {
                pw *= s;
                rhs[p] += pw * static_cast<long double>(value_of(j));
            }
        }
        double cond = 0.0;
        std::vector<long double> c = solve_dense(G, std::move(rhs), &cond);
        if (!(cond < 1e12))
            throw IllConditionedFit("lie_vs_field_taylor: normal equations condition " +
                                    std::to_string(cond));
        return c;
    };

    // Coefficients per power (1..m) per component.
    std::vector<CVec> coeff(deg, CVec(n));
    for (std::size_t comp = 0; comp < n; ++comp) {
        auto cre = fit_component([&](std::size_t j) { return vals[j][comp].real(); });
        auto cim = fit_component([&](std::size_t j) { return vals[j][comp].imag(); });
        long double scale = 1.0L;
        for (std::size_t p = 0; p < deg; ++p) {
            scale *= static_cast<long double>(mu_max);
            coeff[p][comp] = Complex(static_cast<double>(cre[p] / scale),
                                     static_cast<double>(cim[p] / scale));
        }
    }

    std::vector<LieCheck> checks;
    for (int k = 2; k <= m; ++k) {
        LieCheck chk{k, x, lie_coefficient(map, k, x, fd_step),
                     coeff[static_cast<std::size_t>(k - 1)], 0.0};
        const double denom = inf_norm(chk.a_k_numeric);
        const double diff = inf_dist(chk.a_k_numeric, chk.a_k_from_field);
        chk.rel_discrepancy = denom > 0.0 ? diff / denom : (diff > 0.0 ? 1.0 : 0.0);
        checks.push_back(std::move(chk));
    }
    return checks;
}

SlopeResult epsilon_slope_check(BuiltinField g, int m, const Domain& dom,
                                const CertifyConfig& cfg,
                                const std::vector<double>& h_values) {
    if (m < 1) throw std::invalid_argument("epsilon_slope_check: m must be >= 1");
    if (h_values.size() < 3)
        throw std::invalid_argument("epsilon_slope_check: need at least 3 h values");
    for (double h : h_values)
        if (!(h > 0) || !std::isfinite(h))
            throw std::invalid_argument("epsilon_slope_check: h values must be positive");
    for (std::size_t i = 2; i < h_values.size(); ++i) {
        const double r1 = h_values[i - 1] / h_values[i - 2];
        const double r2 = h_values[i] / h_values[i - 1];
        if (std::abs(r1 - r2) > 1e-9 * std::abs(r1))
            throw std::invalid_argument("epsilon_slope_check: h values must form a geometric "
                                        "progression");
    }

    SlopeResult result;
    result.m = m;
    for (double h : h_values) {
        const AnyMap map{MapSpec::euler_step(g, h)};
        const double eps_used = epsilon_used_for(map, dom, cfg);
        if (eps_used == 0.0)
            throw DegenerateInput("epsilon_slope_check: epsilon = 0, slope undefined");
        const ErrorReport rep = measure_error(map, m, dom, cfg);
        if (rep.tolerance_limited)
            throw DegenerateInput("epsilon_slope_check: measurement at h = " + std::to_string(h) +
                                  " is tolerance limited; the fit would be meaningless");
        result.rows.push_back({h, rep.epsilon_used, rep.measured_error});
    }

    // Least-squares slope of log(error) against log(epsilon).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double nrows = static_cast<double>(result.rows.size());
    for (const SlopeRow& row : result.rows) {
        const double lx = std::log(row.epsilon_used);
        const double ly = std::log(row.measured_error);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    result.slope = (nrows * sxy - sx * sy) / (nrows * sxx - sx * sx);
    return result;
}

}  // namespace flowembed
