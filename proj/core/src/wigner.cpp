#include "wflow/wigner.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace wflow {

namespace {

constexpr double kPi = std::numbers::pi;

// Plans are created once per length/direction (FFTW_ESTIMATE keeps planning
// deterministic) and executed on caller buffers; execution is thread-safe.
class FftPlans {
  public:
    static FftPlans& instance() {
        static FftPlans plans;
        return plans;
    }

    void execute(int n, int sign, std::complex<double>* in, std::complex<double>* out) {
        fftw_plan plan;
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto key = std::make_pair(n, sign);
            auto it = plans_.find(key);
            if (it == plans_.end()) {
                std::vector<std::complex<double>> scratch_in(n), scratch_out(n);
                plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(scratch_in.data()),
                                        reinterpret_cast<fftw_complex*>(scratch_out.data()), sign,
                                        FFTW_ESTIMATE | FFTW_UNALIGNED);
                if (!plan) throw std::runtime_error("fftw planning failed");
                plans_.emplace(key, plan);
            } else {
                plan = it->second;
            }
        }
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in),
                         reinterpret_cast<fftw_complex*>(out));
    }

  private:
    std::mutex mu_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

void require_symmetric_p(const PhaseSpaceGrid& grid) {
    if (std::abs(grid.p_lo + grid.p_hi) > 1e-12 * (grid.p_hi - grid.p_lo))
        throw std::invalid_argument("momentum window must be symmetric about 0");
}

} // namespace

double WignerField::max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

CrossWignerField wigner_transform(const EigenstateBasis& basis, int bra, int ket,
                                  const PhaseSpaceGrid& grid) {
    if (bra < 0 || ket < 0 || bra >= basis.k || ket >= basis.k)
        throw std::invalid_argument("wigner_transform: state index outside basis");
    require_symmetric_p(grid);

    const double hbar = basis.units.hbar;
    const int N = grid.np;
    const double dp = grid.dp();
    const double dy = kPi * hbar / (N * dp);
    const double scale = dy / (kPi * hbar);
    const double a = basis.grid.a, b = basis.grid.b;

    CrossWignerField out;
    out.grid = grid;
    out.units = basis.units;
    out.bra = bra;
    out.ket = ket;
    out.support_lo = a;
    out.support_hi = b;
    out.v.assign(grid.size(), {0.0, 0.0});

    const CubicSpline& sb = basis.splines[bra];
    const CubicSpline& sk = basis.splines[ket];
    double edge = 0.0;

#pragma omp parallel for schedule(static) reduction(max : edge)
    for (int i = 0; i < grid.nx; ++i) {
        const double x = grid.x(i);
        const double ymax = std::min(b - x, x - a);
        if (ymax <= 0.0) continue;
        std::vector<std::complex<double>> in(N, 0.0), fft(N);
        for (int l = 0; l < N; ++l) {
            const double y = (l - N / 2) * dy;
            if (std::abs(y) > ymax) continue;
            const double g = sb(x + y) * sk(x - y);
            in[l] = (l & 1) ? -g : g;
        }
        FftPlans::instance().execute(N, FFTW_BACKWARD, in.data(), fft.data());
        for (int j = 0; j < N; ++j) {
            const std::complex<double> w = scale * ((j & 1) ? -fft[j] : fft[j]);
            out.v[grid.index(i, j)] = w;
        }
        edge = std::max({edge, std::abs(out.v[grid.index(i, 0)]),
                         std::abs(out.v[grid.index(i, N - 1)])});
    }
    out.p_edge_amplitude = edge;
    return out;
}

WignerField diagonal_field(const CrossWignerField& cross) {
    if (cross.bra != cross.ket)
        throw std::invalid_argument("diagonal_field: off-diagonal cross field");
    double scale = 0.0, imag = 0.0;
    for (const auto& z : cross.v) {
        scale = std::max(scale, std::abs(z.real()));
        imag = std::max(imag, std::abs(z.imag()));
    }
    if (imag > 1e-12 * scale)
        throw std::runtime_error("diagonal Wigner field has non-real residue");

    WignerField f;
    f.grid = cross.grid;
    f.units = cross.units;
    f.support_lo = cross.support_lo;
    f.support_hi = cross.support_hi;
    std::ostringstream os;
    os << "W_" << cross.bra << cross.ket;
    f.source = os.str();
    f.v.resize(cross.v.size());
    for (size_t i = 0; i < cross.v.size(); ++i) f.v[i] = cross.v[i].real();
    return f;
}

TwoStateEngine::TwoStateEngine(const EigenstateBasis& basis, int m, int n,
                               const PhaseSpaceGrid& grid)
    : basis_(basis), grid_(grid), m_(m), n_(n) {
    if (!(0 <= m && m < n && n < basis.k))
        throw std::invalid_argument("two-state spec needs 0 <= m < n < k");
    omega_ = (basis.energies[n] - basis.energies[m]) / basis.units.hbar;
    wmm_ = diagonal_field(wigner_transform(basis_, m, m, grid));
    wnn_ = diagonal_field(wigner_transform(basis_, n, n, grid));
    wmn_ = wigner_transform(basis_, m, n, grid);
}

double TwoStateEngine::period() const { return 2.0 * kPi / std::abs(omega_); }

WignerField TwoStateEngine::field(double theta, double t) const {
    const double c = std::cos(theta), s = std::sin(theta);
    const double cc = c * c, ss = s * s, cross = 2.0 * c * s;
    const double ph_c = std::cos(omega_ * t), ph_s = std::sin(omega_ * t);

    WignerField f;
    f.grid = grid_;
    f.units = basis_.units;
    f.time = t;
    f.support_lo = wmm_.support_lo;
    f.support_hi = wmm_.support_hi;
    std::ostringstream os;
    os << "Psi_" << m_ << n_ << "(theta=" << theta << ",t=" << t << ")";
    f.source = os.str();
    f.v.resize(grid_.size());
    const long sz = grid_.size();
#pragma omp parallel for schedule(static)
    for (long k = 0; k < sz; ++k) {
        const std::complex<double> z = wmn_.v[k];
        f.v[k] = cc * wmm_.v[k] + ss * wnn_.v[k] +
                 cross * (ph_c * z.real() + ph_s * z.imag());
    }
    return f;
}

WignerField TwoStateEngine::time_derivative(double theta, double t) const {
    const double c = std::cos(theta), s = std::sin(theta);
    const double cross = 2.0 * c * s * omega_;
    const double ph_c = std::cos(omega_ * t), ph_s = std::sin(omega_ * t);

    WignerField f;
    f.grid = grid_;
    f.units = basis_.units;
    f.time = t;
    f.support_lo = wmm_.support_lo;
    f.support_hi = wmm_.support_hi;
    f.source = "dW/dt";
    f.v.resize(grid_.size());
    const long sz = grid_.size();
#pragma omp parallel for schedule(static)
    for (long k = 0; k < sz; ++k) {
        const std::complex<double> z = wmn_.v[k];
        f.v[k] = cross * (-ph_s * z.real() + ph_c * z.imag());
    }
    return f;
}

WignerField superposition_field(const EigenstateBasis& basis, int m, int n, double theta, double t,
                                const PhaseSpaceGrid& grid) {
    return TwoStateEngine(basis, m, n, grid).field(theta, t);
}

std::vector<double> spectral_derivative_rows(const PhaseSpaceGrid& grid,
                                             const std::vector<double>& values, int order,
                                             double eta_cap,
                                             const std::vector<double>& row_eta_limit) {
    const int N = grid.np;
    const double d_eta = 2.0 * kPi / (N * grid.dp());
    std::vector<double> out(values.size(), 0.0);

#pragma omp parallel for schedule(static)
    for (int i = 0; i < grid.nx; ++i) {
        std::vector<std::complex<double>> buf(N), spec(N);
        for (int j = 0; j < N; ++j) buf[j] = values[grid.index(i, j)];
        FftPlans::instance().execute(N, FFTW_FORWARD, buf.data(), spec.data());
        const double limit = std::min(eta_cap, row_eta_limit.empty()
                                                   ? std::numeric_limits<double>::infinity()
                                                   : row_eta_limit[i]);
        for (int k = 0; k < N; ++k) {
            const int kk = (k <= N / 2) ? k : k - N;
            const double eta = kk * d_eta;
            std::complex<double> mult;
            if (std::abs(eta) > limit || (k == N / 2 && (order & 1))) {
                mult = 0.0;
            } else {
                mult = std::pow(std::complex<double>(0.0, eta), order);
            }
            spec[k] *= mult;
        }
        FftPlans::instance().execute(N, FFTW_BACKWARD, spec.data(), buf.data());
        for (int j = 0; j < N; ++j) out[grid.index(i, j)] = buf[j].real() / N;
    }
    return out;
}

WignerField momentum_derivative(const WignerField& field, int order, const SpectralFilter& filter) {
    if (order < 1 || order > 102)
        throw std::invalid_argument("momentum_derivative: order must be in [1, 102]");

    const int N = field.grid.np;
    const double d_eta = 2.0 * kPi / (N * field.grid.dp());
    const double eta_nyq = kPi / field.grid.dp();
    const double cap = filter.fraction * eta_nyq;

    std::vector<double> limits;
    if (filter.support_limit) {
        limits.resize(field.grid.nx);
        const double hbar = field.units.hbar;
        for (int i = 0; i < field.grid.nx; ++i) {
            const double x = field.grid.x(i);
            const double ymax = std::min(field.support_hi - x, x - field.support_lo);
            // Exact band limit of the shift product, padded by two bins;
            // rows outside the support hold zeros anyway.
            limits[i] = std::max(2.0 * std::max(ymax, 0.0) / hbar + 2.0 * d_eta, 4.0 * d_eta);
        }
    }

    WignerField out;
    out.grid = field.grid;
    out.units = field.units;
    out.time = field.time;
    out.support_lo = field.support_lo;
    out.support_hi = field.support_hi;
    std::ostringstream os;
    os << "d^" << order << "/dp^" << order << "[" << field.source << "]";
    out.source = os.str();
    out.v = spectral_derivative_rows(field.grid, field.v, order, cap, limits);
    return out;
}

std::vector<double> spatial_derivative_x(const PhaseSpaceGrid& grid,
                                         const std::vector<double>& values) {
    const int N = grid.nx;
    const double d_xi = 2.0 * kPi / (N * grid.dx());
    std::vector<double> out(values.size(), 0.0);

#pragma omp parallel for schedule(static)
    for (int j = 0; j < grid.np; ++j) {
        std::vector<std::complex<double>> buf(N), spec(N);
        for (int i = 0; i < N; ++i) buf[i] = values[grid.index(i, j)];
        FftPlans::instance().execute(N, FFTW_FORWARD, buf.data(), spec.data());
        for (int k = 0; k < N; ++k) {
            const int kk = (k <= N / 2) ? k : k - N;
            if (k == N / 2) {
                spec[k] = 0.0;
            } else {
                spec[k] *= std::complex<double>(0.0, kk * d_xi);
            }
        }
        FftPlans::instance().execute(N, FFTW_BACKWARD, spec.data(), buf.data());
        for (int i = 0; i < N; ++i) out[grid.index(i, j)] = buf[i].real() / N;
    }
    return out;
}

double normalization(const WignerField& field) {
    double sum = 0.0;
    for (double x : field.v) sum += x;
    return sum * field.grid.dx() * field.grid.dp();
}

std::vector<double> marginal_x(const WignerField& field) {
    std::vector<double> m(field.grid.nx, 0.0);
    for (int i = 0; i < field.grid.nx; ++i) {
        double sum = 0.0;
        for (int j = 0; j < field.grid.np; ++j) sum += field.at(i, j);
        m[i] = sum * field.grid.dp();
    }
    return m;
}

std::vector<double> marginal_p(const WignerField& field) {
    std::vector<double> m(field.grid.np, 0.0);
    for (int j = 0; j < field.grid.np; ++j) {
        double sum = 0.0;
        for (int i = 0; i < field.grid.nx; ++i) sum += field.at(i, j);
        m[j] = sum * field.grid.dx();
    }
    return m;
}

std::vector<double> position_density(const EigenstateBasis& basis, int m, int n, double theta,
                                     double t, const PhaseSpaceGrid& grid) {
    const double c = std::cos(theta), s = std::sin(theta);
    const double phase = (basis.energies[n] - basis.energies[m]) * t / basis.units.hbar;
    std::vector<double> rho(grid.nx);
    for (int i = 0; i < grid.nx; ++i) {
        const double pm = basis.psi(m, grid.x(i));
        const double pn = basis.psi(n, grid.x(i));
        rho[i] = c * c * pm * pm + s * s * pn * pn + 2.0 * c * s * std::cos(phase) * pm * pn;
    }
    return rho;
}

std::vector<double> momentum_density(const EigenstateBasis& basis, int m, int n, double theta,
                                     double t, const PhaseSpaceGrid& grid) {
    const double hbar = basis.units.hbar;
    const double c = std::cos(theta), s = std::sin(theta);
    const std::complex<double> am =
        c * std::exp(std::complex<double>(0.0, -basis.energies[m] * t / hbar));
    const std::complex<double> an =
        s * std::exp(std::complex<double>(0.0, -basis.energies[n] * t / hbar));
    const double h = basis.grid.dx();
    const double norm = h / std::sqrt(2.0 * kPi * hbar);

    std::vector<double> rho(grid.np);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < grid.np; ++j) {
        const double p = grid.p(j);
        std::complex<double> phi_m = 0.0, phi_n = 0.0;
        for (int i = 0; i < basis.grid.n; ++i) {
            const std::complex<double> ph =
                std::exp(std::complex<double>(0.0, -p * basis.grid.x(i) / hbar));
            phi_m += basis.states[m][i] * ph;
            phi_n += basis.states[n][i] * ph;
        }
        rho[j] = std::norm(norm * (am * phi_m + an * phi_n));
    }
    return rho;
}

namespace oracle {

namespace {

double laguerre(int k, int alpha, double u) {
    if (k == 0) return 1.0;
    double lm1 = 1.0;
    double l = 1.0 + alpha - u;
    for (int i = 2; i <= k; ++i) {
        const double next = ((2.0 * i - 1.0 + alpha - u) * l - (i - 1.0 + alpha) * lm1) / i;
        lm1 = l;
        l = next;
    }
    return l;
}

} // namespace

std::complex<double> harmonic_wigner_mn(int m, int n, double x, double p, double hbar) {
    if (m < 0 || n < 0) throw std::invalid_argument("harmonic oracle: negative state index");
    if (m > n) return std::conj(harmonic_wigner_mn(n, m, x, p, hbar));
    const int d = n - m;
    const double r2 = (x * x + p * p) / hbar;
    double ratio = 1.0; // m!/n!
    for (int i = m + 1; i <= n; ++i) ratio /= i;
    const double coef = ((m & 1) ? -1.0 : 1.0) / (kPi * hbar) * std::sqrt(ratio);
    const std::complex<double> z = std::sqrt(2.0 / hbar) * std::complex<double>(x, -p);
    return coef * std::pow(z, d) * std::exp(-r2) * laguerre(m, d, 2.0 * r2);
}

double harmonic_wigner_nn(int n, double x, double p, double hbar) {
    const double r2 = (x * x + p * p) / hbar;
    return ((n & 1) ? -1.0 : 1.0) / (kPi * hbar) * std::exp(-r2) * laguerre(n, 0, 2.0 * r2);
}

WignerField harmonic_field_nn(int n, const PhaseSpaceGrid& grid, double hbar) {
    WignerField f;
    f.grid = grid;
    f.units.hbar = hbar;
    f.support_lo = grid.x_lo;
    f.support_hi = grid.x_hi;
    std::ostringstream os;
    os << "oracle W_" << n << n;
    f.source = os.str();
    f.v.resize(grid.size());
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.np; ++j)
            f.v[grid.index(i, j)] = harmonic_wigner_nn(n, grid.x(i), grid.p(j), hbar);
    return f;
}

CrossWignerField harmonic_cross_mn(int m, int n, const PhaseSpaceGrid& grid, double hbar) {
    CrossWignerField f;
    f.grid = grid;
    f.units.hbar = hbar;
    f.bra = m;
    f.ket = n;
    f.support_lo = grid.x_lo;
    f.support_hi = grid.x_hi;
    f.v.resize(grid.size());
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.np; ++j)
            f.v[grid.index(i, j)] = harmonic_wigner_mn(m, n, grid.x(i), grid.p(j), hbar);
    return f;
}

WignerField harmonic_superposition(int m, int n, double theta, double t,
                                   const PhaseSpaceGrid& grid, double hbar) {
    const double c = std::cos(theta), s = std::sin(theta);
    const double omega = static_cast<double>(n - m); // harmonic gaps
    const std::complex<double> phase = std::exp(std::complex<double>(0.0, -omega * t));

    WignerField f;
    f.grid = grid;
    f.units.hbar = hbar;
    f.time = t;
    f.support_lo = grid.x_lo;
    f.support_hi = grid.x_hi;
    std::ostringstream os;
    os << "oracle Psi_" << m << n << "(theta=" << theta << ",t=" << t << ")";
    f.source = os.str();
    f.v.resize(grid.size());
    for (int i = 0; i < grid.nx; ++i) {
        const double x = grid.x(i);
        for (int j = 0; j < grid.np; ++j) {
            const double p = grid.p(j);
            const double diag = c * c * harmonic_wigner_nn(m, x, p, hbar) +
                                s * s * harmonic_wigner_nn(n, x, p, hbar);
            const double cross =
                2.0 * c * s * (phase * harmonic_wigner_mn(m, n, x, p, hbar)).real();
            f.v[grid.index(i, j)] = diag + cross;
        }
    }
    return f;
}

OriginData harmonic_origin_data(int m, int n, double theta, double t, double omega, double hbar) {
    const double c = std::cos(theta), s = std::sin(theta);
    OriginData o;
    auto diag = [&](int k, double weight) {
        const double sk = (k & 1) ? -1.0 : 1.0;
        o.w += weight * sk / (kPi * hbar);
        o.d2p += weight * (-2.0 * (1.0 + 2.0 * k)) * sk / (kPi * hbar * hbar);
    };
    diag(m, c * c);
    diag(n, s * s);
    if (n - m == 2) {
        // (x-ip)^2 cross term: zero value, curvature -2C at the origin
        const double sm = (m & 1) ? -1.0 : 1.0;
        const double C = sm * 2.0 / (kPi * std::sqrt((m + 1.0) * (m + 2.0)));
        o.d2p += 2.0 * c * s * std::cos(omega * t) * (-2.0 * C) / (hbar * hbar);
    }
    return o;
}

} // namespace oracle

} // namespace wflow
