#include "wflow/potential.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace wflow {

namespace {

constexpr int kMaxDerivativeOrder = 120;

// d/du tan u = 1 + tan^2 u, d/du tanh u = 1 - tanh^2 u. Hence every
// derivative of t^2 (t = tan u or tanh u) is a polynomial in t, obtained by
// the recurrence P -> P'(t) * (1 + sigma t^2) with sigma = +1 (tan) or
// -1 (tanh). Coefficients grow factorially; doubles hold them to order ~120.
struct TanPolyTable {
    // table[k] = coefficients of d^k/du^k (t^2), lowest power first
    std::vector<std::vector<double>> table;
    int sigma;

    explicit TanPolyTable(int sigma_) : sigma(sigma_) { table.push_back({0.0, 0.0, 1.0}); }

    void extend(int k) {
        while (static_cast<int>(table.size()) <= k) {
            const auto& p = table.back();
            std::vector<double> d(p.size() >= 2 ? p.size() - 1 : 1, 0.0);
            for (size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * static_cast<double>(i);
            std::vector<double> next(d.size() + 2, 0.0);
            for (size_t i = 0; i < d.size(); ++i) {
                next[i] += d[i];
                next[i + 2] += sigma * d[i];
            }
            table.push_back(std::move(next));
        }
    }

    double eval(int k, double t) {
        extend(k);
        const auto& p = table[k];
        double acc = 0.0;
        for (size_t i = p.size(); i-- > 0;) acc = acc * t + p[i];
        return acc;
    }
};

double tan_family_derivative(int sigma, double depth, double u, int k) {
    static TanPolyTable tan_table(+1);
    static TanPolyTable tanh_table(-1);
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    TanPolyTable& tab = (sigma > 0) ? tan_table : tanh_table;
    const double t = (sigma > 0) ? std::tan(u) : std::tanh(u);
    return depth * tab.eval(k, t);
}

double falling_power(int nu, int k, double x) {
    // d^k/dx^k x^nu = nu (nu-1) ... (nu-k+1) x^{nu-k}
    if (k > nu) return 0.0;
    double c = 1.0;
    for (int i = 0; i < k; ++i) c *= static_cast<double>(nu - i);
    return c * std::pow(x, nu - k);
}

} // namespace

PotentialModel::PotentialModel(PotentialFamily f, double depth, std::vector<PolynomialTerm> terms)
    : family_(f), depth_(depth), terms_(std::move(terms)) {}

PotentialModel PotentialModel::harmonic() {
    return PotentialModel(PotentialFamily::harmonic, 0.0, {});
}

PotentialModel PotentialModel::eckart(double depth) {
    if (!(depth > 0.0)) throw std::invalid_argument("eckart: depth must be positive");
    return PotentialModel(PotentialFamily::eckart, depth, {});
}

PotentialModel PotentialModel::rosen_morse(double depth) {
    if (!(depth > 0.0)) throw std::invalid_argument("rosen_morse: depth must be positive");
    return PotentialModel(PotentialFamily::rosen_morse, depth, {});
}

PotentialModel PotentialModel::morse(double depth) {
    if (!(depth > 0.0)) throw std::invalid_argument("morse: depth must be positive");
    return PotentialModel(PotentialFamily::morse, depth, {});
}

PotentialModel PotentialModel::polynomial(std::vector<PolynomialTerm> terms) {
    for (const auto& t : terms) {
        if (t.power < 3) throw std::invalid_argument("polynomial: anharmonic powers start at 3");
    }
    return PotentialModel(PotentialFamily::polynomial, 0.0, std::move(terms));
}

double PotentialModel::domain_min() const {
    if (family_ == PotentialFamily::eckart) return -0.5 * std::numbers::pi * std::sqrt(2.0 * depth_);
    return -std::numeric_limits<double>::infinity();
}

double PotentialModel::domain_max() const {
    if (family_ == PotentialFamily::eckart) return 0.5 * std::numbers::pi * std::sqrt(2.0 * depth_);
    return std::numeric_limits<double>::infinity();
}

bool PotentialModel::contains(double x) const {
    return x > domain_min() && x < domain_max();
}

double PotentialModel::eval(double x) const {
    switch (family_) {
        case PotentialFamily::harmonic:
            return 0.5 * x * x;
        case PotentialFamily::eckart: {
            if (!contains(x))
                throw std::domain_error("eckart potential evaluated at or beyond its poles");
            const double t = std::tan(x / std::sqrt(2.0 * depth_));
            return depth_ * t * t;
        }
        case PotentialFamily::rosen_morse: {
            const double t = std::tanh(x / std::sqrt(2.0 * depth_));
            return depth_ * t * t;
        }
        case PotentialFamily::morse: {
            const double e = std::exp(-x / std::sqrt(2.0 * depth_));
            return depth_ * (1.0 - e) * (1.0 - e);
        }
        case PotentialFamily::polynomial: {
            double v = 0.5 * x * x;
            for (const auto& t : terms_) v += t.alpha * std::pow(x, t.power);
            return v;
        }
    }
    throw std::logic_error("unreachable");
}

double PotentialModel::derivative(double x, int k) const {
    if (k < 1) throw std::invalid_argument("derivative order must be >= 1");
    if (k > kMaxDerivativeOrder) throw std::invalid_argument("derivative order too large");
    switch (family_) {
        case PotentialFamily::harmonic:
            if (k == 1) return x;
            if (k == 2) return 1.0;
            return 0.0;
        case PotentialFamily::eckart: {
            if (!contains(x))
                throw std::domain_error("eckart potential evaluated at or beyond its poles");
            const double s = std::sqrt(2.0 * depth_);
            return tan_family_derivative(+1, depth_, x / s, k) / std::pow(s, k);
        }
        case PotentialFamily::rosen_morse: {
            const double s = std::sqrt(2.0 * depth_);
            return tan_family_derivative(-1, depth_, x / s, k) / std::pow(s, k);
        }
        case PotentialFamily::morse: {
            // d^k/du^k of (1 - 2e^{-u} + e^{-2u}) = (-1)^k (-2 e^{-u} + 2^k e^{-2u})
            const double s = std::sqrt(2.0 * depth_);
            const double u = x / s;
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            const double du = sign * (-2.0 * std::exp(-u) + std::pow(2.0, k) * std::exp(-2.0 * u));
            return depth_ * du / std::pow(s, k);
        }
        case PotentialFamily::polynomial: {
            double v = 0.0;
            if (k == 1) v += x;
            if (k == 2) v += 1.0;
            for (const auto& t : terms_) v += t.alpha * falling_power(t.power, k, x);
            return v;
        }
    }
    throw std::logic_error("unreachable");
}

bool PotentialModel::is_even() const {
    switch (family_) {
        case PotentialFamily::harmonic:
        case PotentialFamily::eckart:
        case PotentialFamily::rosen_morse:
            return true;
        case PotentialFamily::morse:
            return false;
        case PotentialFamily::polynomial:
            for (const auto& t : terms_)
                if (t.power % 2 != 0 && t.alpha != 0.0) return false;
            return true;
    }
    return false;
}

std::optional<int> PotentialModel::leading_anharmonic_order() const {
    switch (family_) {
        case PotentialFamily::harmonic:
            return std::nullopt;
        case PotentialFamily::eckart:
        case PotentialFamily::rosen_morse:
            return 4;
        case PotentialFamily::morse:
            return 3;
        case PotentialFamily::polynomial: {
            int lowest = 0;
            for (const auto& t : terms_)
                if (t.alpha != 0.0 && (lowest == 0 || t.power < lowest)) lowest = t.power;
            if (lowest == 0) return std::nullopt;
            return lowest;
        }
    }
    return std::nullopt;
}

double PotentialModel::taylor_coefficient(int nu) const {
    if (nu < 1) throw std::invalid_argument("taylor_coefficient: order must be >= 1");
    double fact = 1.0;
    for (int i = 2; i <= nu; ++i) fact *= i;
    return derivative(0.0, nu) / fact;
}

PotentialModel PotentialModel::truncated() const {
    auto nu = leading_anharmonic_order();
    if (!nu) throw std::invalid_argument("truncated: potential has no anharmonic term");
    return truncated(*nu);
}

PotentialModel PotentialModel::truncated(int order) const {
    if (order < 3) throw std::invalid_argument("truncated: order must be >= 3");
    if (family_ == PotentialFamily::harmonic)
        throw std::invalid_argument("truncated: harmonic potential has no anharmonic term");
    const double alpha = taylor_coefficient(order);
    return polynomial({{order, alpha}});
}

std::string PotentialModel::family_name() const {
    switch (family_) {
        case PotentialFamily::harmonic: return "harmonic";
        case PotentialFamily::eckart: return "eckart";
        case PotentialFamily::rosen_morse: return "rosen-morse";
        case PotentialFamily::morse: return "morse";
        case PotentialFamily::polynomial: return "polynomial";
    }
    return "?";
}

std::string PotentialModel::describe() const {
    std::ostringstream os;
    os << family_name();
    if (family_ == PotentialFamily::eckart || family_ == PotentialFamily::rosen_morse ||
        family_ == PotentialFamily::morse)
        os << "(D=" << depth_ << ")";
    if (family_ == PotentialFamily::polynomial) {
        os << "(x^2/2";
        for (const auto& t : terms_) os << (t.alpha >= 0 ? "+" : "") << t.alpha << "*x^" << t.power;
        os << ")";
    }
    return os.str();
}

PotentialModel potential_from_name(const std::string& name, double depth) {
    if (name == "harmonic") return PotentialModel::harmonic();
    if (name == "eckart") return PotentialModel::eckart(depth);
    if (name == "rosen-morse" || name == "rosen_morse") return PotentialModel::rosen_morse(depth);
    if (name == "morse") return PotentialModel::morse(depth);
    throw std::invalid_argument("unknown potential family: " + name);
}

} // namespace wflow
