#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace cmsum {

struct GammaFamily {
    double shape;
    double scale;
};
struct PoissonFamily {
    double rate;
};
struct NormalFamily {
    double mean;
    double sd;
};
struct UniformFamily {
    double lo;
    double hi;
};
struct DegenerateFamily {
    double point;
};
struct EmpiricalFamily {
    std::vector<double> points; //!< sorted, distinct
    std::vector<double> probs;  //!< positive, normalized to sum 1
};

using Family = std::variant<GammaFamily, PoissonFamily, NormalFamily, UniformFamily, DegenerateFamily,
                            EmpiricalFamily>;

struct SupportBounds {
    double lower;
    double upper;
    bool lower_finite;
    bool upper_finite;
};

//! Atom table shared by the discrete families (Poisson, empirical, degenerate).
//!
//! Cumulative and survival masses are accumulated from opposite ends so that
//! either tail keeps full relative precision. Poisson tables are truncated where
//! the neglected mass is below 1e-20.
struct AtomTable {
    std::vector<double> points;
    std::vector<double> pmf;
    std::vector<double> cum;       //!< P[X <= x_k], summed from the bottom
    std::vector<double> surv;      //!< P[X > x_k], summed from the top
    std::vector<double> below_exp; //!< E[X; X <= x_k]
    std::vector<double> above_exp; //!< E[X; X > x_k]
    bool unbounded_above = false;

    //! F(x_k) taken from whichever accumulation is more precise.
    double cdf_at(std::size_t k) const { return cum[k] <= 0.5 ? cum[k] : 1.0 - surv[k]; }
    std::size_t size() const { return points.size(); }

    //! Index of the atom equal to the left inverse at p in (0,1); size() if beyond the table.
    std::size_t left_index(double p) const;
    //! Index of the atom equal to the right inverse at p in (0,1); size() if beyond the table.
    std::size_t right_index(double p) const;
    //! Index of the last atom <= x, or size() when x lies below every atom.
    std::size_t floor_index(double x) const;
};

//! Default bound on the number of atom levels returned by Marginal::atoms.
inline constexpr std::size_t kDefaultAtomCap = 100000;

//! Probability levels closer than this to an atom level are treated as that level.
//! Absorbs the rounding of 1 - (1 - c) when atoms are mapped through u -> 1 - u.
inline constexpr double kAtomSnap = 1e-15;

//! A univariate distribution with exact-as-possible cdf, generalized inverses and moments.
//!
//! Values are immutable; copies share the atom table.
class Marginal {
public:
    static Marginal gamma(double shape, double scale);
    static Marginal poisson(double rate);
    static Marginal normal(double mean, double sd);
    static Marginal uniform(double lo, double hi);
    static Marginal degenerate(double point);
    static Marginal empirical(std::vector<double> points, std::vector<double> probs);

    const Family& family() const { return family_; }
    std::string name() const;

    //! Non-null for Poisson, empirical and degenerate marginals.
    const AtomTable* atom_table() const { return table_.get(); }
    bool is_discrete() const { return table_ != nullptr; }
    bool is_degenerate() const { return std::holds_alternative<DegenerateFamily>(family_); }

    SupportBounds support() const;

    double cdf(double x) const;
    //! P[X > x]; kept separate from 1 - cdf for upper-tail precision.
    double sf(double x) const;

    //! inf{x | F(x) >= p}. Returns the lower support bound at p = 0.
    double quantile_left(double p) const;
    //! sup{x | F(x) <= p}. Returns the upper support bound at p = 1.
    double quantile_right(double p) const;
    //! (1 - alpha) * left + alpha * right. Throws if either inverse is infinite.
    double quantile_alpha(double p, double alpha) const;

    double mean() const;

    //! Probability levels in (plo, phi) at which quantile_left jumps.
    std::vector<double> atoms(double plo, double phi, std::size_t cap = kDefaultAtomCap) const;

private:
    explicit Marginal(Family f);

    Family family_;
    std::shared_ptr<const AtomTable> table_;
};

} // namespace cmsum
