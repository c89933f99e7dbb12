#pragma once
// Brute-force and closed-form checks on n-fold product measures.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vcdl/functionals.hpp"
#include "vcdl/loss.hpp"
#include "vcdl/numeric.hpp"
#include "vcdl/piecewise_density.hpp"
#include "vcdl/stats.hpp"

namespace vcdl {

inline constexpr std::uint64_t kEnumerationBudget = 10'000'000;

class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(std::uint64_t required, std::uint64_t budget)
        : std::runtime_error("enumeration needs " + std::to_string(required) + " tuples, budget is " +
                             std::to_string(budget)),
          required_(required) {}
    /// Tuple count needed, saturated at UINT64_MAX.
    std::uint64_t required() const noexcept { return required_; }

private:
    std::uint64_t required_;
};

struct ProductSums {
    double half_abs_diff{0.0};  // the product TV
    double min_sum{0.0};        // sum of min(P^n, q^n) over tuples
    std::uint64_t tuples{0};
};

namespace detail {

inline std::uint64_t checked_power(std::uint64_t m, std::uint64_t n, std::uint64_t budget) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < n; ++i) {
        if (m != 0 && r > budget / m) {
            // keep multiplying with saturation for the report
            long double big = static_cast<long double>(r);
            for (; i < n; ++i) big *= static_cast<long double>(m);
            const auto req = big >= 1.8e19L ? UINT64_MAX : static_cast<std::uint64_t>(big);
            throw BudgetExceeded(req, budget);
        }
        r *= m;
    }
    if (r > budget) throw BudgetExceeded(r, budget);
    return r;
}

}  // namespace detail

/// Enumerates every cell-index tuple of length n over the common grid of P and q.
inline ProductSums product_sums(const PiecewiseDensity& P, const PiecewiseDensity& q, std::uint64_t n,
                                std::uint64_t budget = kEnumerationBudget) {
    const auto [rp, rq] = refine(P, q);
    const std::size_t m = rp.cells();
    const std::uint64_t total = detail::checked_power(m, n, budget);
    const auto& a = rp.masses();
    const auto& b = rq.masses();

    ProductSums out;
    out.tuples = total;
    std::vector<std::size_t> idx(n, 0);
    // prefix products; pa[j] = prod_{i<j} a[idx[i]]
    std::vector<double> pa(n + 1, 1.0), pb(n + 1, 1.0);
    double abs_sum = 0.0;
    for (std::uint64_t t = 0; t < total; ++t) {
        for (std::size_t j = 0; j < n; ++j) {
            pa[j + 1] = pa[j] * a[idx[j]];
            pb[j + 1] = pb[j] * b[idx[j]];
        }
        abs_sum += std::abs(pa[n] - pb[n]);
        out.min_sum += std::min(pa[n], pb[n]);
        for (std::size_t j = n; j-- > 0;) {
            if (++idx[j] < m) break;
            idx[j] = 0;
        }
    }
    out.half_abs_diff = std::min(1.0, 0.5 * abs_sum);
    return out;
}

/// d_TV(P^n, q^n) by exact enumeration. Within a shared cell both conditionals
/// are uniform, so the product TV equals the TV of the cell-index products.
inline double product_tv_exact(const PiecewiseDensity& P, const PiecewiseDensity& q, std::uint64_t n,
                               std::uint64_t budget = kEnumerationBudget) {
    return product_sums(P, q, n, budget).half_abs_diff;
}

/// 1 - exp(-n tv^2 / 2).
inline double reis_lower_bound(double tv_single, std::uint64_t n) {
    if (!(tv_single >= 0.0 && tv_single <= 1.0)) throw std::invalid_argument("reis_lower_bound: tv outside [0,1]");
    return -std::expm1(-static_cast<double>(n) * tv_single * tv_single / 2.0);
}

/// min(1, n tv).
inline double subadditive_upper(double tv_single, std::uint64_t n) {
    return std::min(1.0, static_cast<double>(n) * tv_single);
}

/// 1 - exp(-n eps).
inline double invalid_product_margin(double eps, std::uint64_t n) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("invalid_product_margin: eps must lie in (0,1)");
    return -std::expm1(-static_cast<double>(n) * eps);
}

struct ProductTVReport {
    std::string instance;
    std::uint64_t n{0};
    double exact_tv{0.0};
    double reis_lower{0.0};
    double subadditive_upper{0.0};
    std::optional<double> invalid_margin_lower;

    bool sandwich_holds(double tol = kExactTol) const {
        return reis_lower <= exact_tv + tol && exact_tv <= subadditive_upper + tol;
    }
    bool margin_holds() const { return !invalid_margin_lower || *invalid_margin_lower < exact_tv; }
};

/// `margin_eps`, when given, adds the 1 - exp(-n eps) lower bound to the report.
inline ProductTVReport product_tv_report(const PiecewiseDensity& P, const PiecewiseDensity& q, std::uint64_t n,
                                         std::optional<double> margin_eps = std::nullopt, std::string instance = "",
                                         std::uint64_t budget = kEnumerationBudget) {
    const double t = tv(P, q);
    ProductTVReport r{std::move(instance), n, product_tv_exact(P, q, n, budget), reis_lower_bound(t, n),
                      subadditive_upper(t, n), std::nullopt};
    if (margin_eps) r.invalid_margin_lower = invalid_product_margin(*margin_eps, n);
    return r;
}

inline constexpr const char* kProductTvSchema = "vcdl_producttv_v1";

inline std::string producttv_csv_header() {
    return std::string(kProductTvSchema) + ",instance,n,exact_tv,reis_lower,subadditive_upper,invalid_margin_lower\n";
}

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    // shortest form that reads back to the same double
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

inline std::string producttv_csv_row(const ProductTVReport& r) {
    std::ostringstream os;
    os << kProductTvSchema << ',' << r.instance << ',' << r.n << ',' << format_double(r.exact_tv) << ','
       << format_double(r.reis_lower) << ',' << format_double(r.subadditive_upper) << ','
       << (r.invalid_margin_lower ? format_double(*r.invalid_margin_lower) : "") << '\n';
    return os.str();
}

struct FlipEstimate {
    BinomialSummary summary;
    std::vector<bool> flips;  // per replication
};

/// Frequency of {L_S(q) <= L_S(P)} over `reps` samples S ~ P^n. Replication r
/// draws from a generator seeded with derive_seed(seed, r).
inline FlipEstimate flip_probability(const PiecewiseDensity& P, const PiecewiseDensity& q, std::uint64_t n,
                                     std::uint64_t reps, std::uint64_t seed, const LossSpec& loss,
                                     CiMethod method = CiMethod::Normal) {
    if (reps < 100) throw std::invalid_argument("flip_probability: reps must be >= 100");
    if (n == 0) throw std::invalid_argument("flip_probability: n must be >= 1");
    std::vector<char> flip(reps, 0);
    parallel_for(reps, [&](std::size_t r) {
        Rng rng(derive_seed(seed, r));
        const auto S = sample(P, rng, n);
        flip[r] = empirical_loss(S, q, loss) <= empirical_loss(S, P, loss) ? 1 : 0;
    });
    FlipEstimate e;
    e.flips.assign(flip.begin(), flip.end());
    std::uint64_t k = 0;
    for (char f : flip) k += f ? 1 : 0;
    e.summary = binomial_summary(k, reps, method);
    return e;
}

}  // namespace vcdl
