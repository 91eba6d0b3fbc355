#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>

#include "xap/curve_model.hpp"
#include "xap/points.hpp"

namespace xap {

/*
 * Heights use the unnormalized convention: h(P) = h(x(P)) and
 * hhat(P) = lim h(2^n P) / 4^n, which is twice the value in the
 * half-normalized convention.
 */

struct HeightEstimate {
    double value = 0;
    double error_bound = 0;  // |value - hhat(P)| <= error_bound
    int doublings = 0;
};

/* Thrown when reaching the requested tolerance would push the coordinates
 * of 2^n P past the bit budget.  Carries the best estimate reached. */
class HeightBudgetExceeded : public std::runtime_error {
public:
    HeightBudgetExceeded(const std::string& what, HeightEstimate best)
        : std::runtime_error(what), best_(best) {}
    const HeightEstimate& best() const { return best_; }

private:
    HeightEstimate best_;
};

inline constexpr double default_height_tolerance = 1e-3;
inline constexpr std::size_t default_height_budget_bits = 1000000;

double weil_height(const Point& p);

/* Bracket (lo, hi) with lo <= hhat(P) - h(P) <= hi for every P:
 *   lo = -(5/12) log X - 5.2,  hi = (1/3) log X + 4.65 */
std::pair<double, double> height_difference_bounds(const CurveInvariants& inv);
std::pair<double, double> height_difference_bounds(double log_x);

/* C_E = max{|lo|, hi}, so |hhat(P) - h(2^n P)/4^n| <= C_E / 4^n. */
double height_error_constant(double log_x);

HeightEstimate canonical_height(const ShortWeierstrass& curve, const Point& p,
                                double tol = default_height_tolerance,
                                std::size_t budget_bits = default_height_budget_bits);

struct PairingEstimate {
    double value = 0;
    double error_bound = 0;
};

/* <P,Q> = hhat(P+Q) - hhat(P) - hhat(Q), each term evaluated to tol/3. */
PairingEstimate pairing(const ShortWeierstrass& curve, const Point& p, const Point& q,
                        double tol = default_height_tolerance,
                        std::size_t budget_bits = default_height_budget_bits);

struct CosAngle {
    double value = 0;        // (hhat(P+Q) - hhat(P) - hhat(Q)) / (2 sqrt(hhat(P) hhat(Q)))
    double alt_value = 0;    // (hhat(P) + hhat(Q) - hhat(P-Q)) / (2 sqrt(hhat(P) hhat(Q)))
    double error_bound = 0;  // enclosure radius of value
    double alt_error_bound = 0;
    bool forms_agree = false;
    HeightEstimate hp, hq, hsum, hdiff;
};

/* Rejects torsion input with PreconditionError. */
CosAngle cos_angle(const ShortWeierstrass& curve, const Point& p, const Point& q,
                   double tol = default_height_tolerance,
                   std::size_t budget_bits = default_height_budget_bits);

} // namespace xap
