#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace wflow {

// One-dimensional model potentials, all sharing a curvature-1 minimum at
// x = 0 so that the small-amplitude limit is the same unit-frequency
// oscillator:
//
//   harmonic     V = x^2/2
//   eckart       V = D tan^2(x/sqrt(2D))     hard wall, poles at +-pi*sqrt(2D)/2
//   rosen_morse  V = D tanh^2(x/sqrt(2D))    soft wall, plateau height D
//   morse        V = D (1 - e^{-x/sqrt(2D)})^2   asymmetric, plateau D on the right
//   polynomial   V = x^2/2 + sum_nu alpha_nu x^nu
//
// Derivatives of every order are evaluated in closed form (no finite
// differences): the tan/tanh families through a polynomial recurrence in
// t = tan(u) resp. tanh(u), Morse through its exponentials.

enum class PotentialFamily { harmonic, eckart, rosen_morse, morse, polynomial };

struct PolynomialTerm {
    int power;     // >= 3
    double alpha;  // coefficient of x^power

    bool operator==(const PolynomialTerm&) const = default;
};

class PotentialModel {
  public:
    static PotentialModel harmonic();
    static PotentialModel eckart(double depth);
    static PotentialModel rosen_morse(double depth);
    static PotentialModel morse(double depth);
    static PotentialModel polynomial(std::vector<PolynomialTerm> terms);

    PotentialFamily family() const { return family_; }
    double depth() const { return depth_; }
    const std::vector<PolynomialTerm>& terms() const { return terms_; }

    double eval(double x) const;

    // k-th derivative, k >= 1, exact.
    double derivative(double x, int k) const;

    // Open domain of definition. Finite only for eckart.
    double domain_min() const;
    double domain_max() const;
    bool contains(double x) const;

    // Symmetric about x = 0?
    bool is_even() const;

    // Leading anharmonic order: 4 for the even wall families, 3 for morse,
    // lowest term power for polynomial; nullopt for harmonic.
    std::optional<int> leading_anharmonic_order() const;

    // Taylor coefficient V^(nu)(0)/nu! of the given order.
    double taylor_coefficient(int nu) const;

    // Polynomial truncation x^2/2 + alpha_nu x^nu at the given order
    // (defaults to the leading anharmonic order). Errors for harmonic input.
    PotentialModel truncated() const;
    PotentialModel truncated(int order) const;

    std::string family_name() const;
    std::string describe() const;

    bool operator==(const PotentialModel&) const = default;

  private:
    PotentialModel(PotentialFamily f, double depth, std::vector<PolynomialTerm> terms);

    PotentialFamily family_;
    double depth_ = 0.0;               // unused for harmonic/polynomial
    std::vector<PolynomialTerm> terms_; // polynomial only
};

PotentialModel potential_from_name(const std::string& name, double depth);

} // namespace wflow
