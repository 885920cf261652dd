#include "mfbs/numerics.hpp"

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace mfbs {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer: bijective on 64-bit words, good avalanche.
std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

std::uint64_t stream_state(const SeededStream& stream) {
    return mix64(stream.seed ^ mix64(stream.tag + kGolden));
}

}  // namespace

SymmetricMatrix::SymmetricMatrix(std::size_t n) : n_(n), entries_(n * n, 0.0) {
    if (n == 0) throw DomainError("matrix dimension must be at least 1");
}

SymmetricMatrix::SymmetricMatrix(std::size_t n, std::vector<double> entries) : n_(n) {
    if (n == 0) throw DomainError("matrix dimension must be at least 1");
    if (entries.size() != n * n)
        throw DimensionMismatch("expected " + std::to_string(n * n) + " entries, got " +
                                std::to_string(entries.size()));
    entries_ = std::move(entries);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) {
            const double avg = 0.5 * (entries_[i * n_ + j] + entries_[j * n_ + i]);
            entries_[i * n_ + j] = avg;
            entries_[j * n_ + i] = avg;
        }
    }
}

SymmetricMatrix::SymmetricMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : n_(rows.size()) {
    if (n_ == 0) throw DomainError("matrix dimension must be at least 1");
    entries_.reserve(n_ * n_);
    for (const auto& row : rows) {
        if (row.size() != n_) throw DimensionMismatch("ragged initializer for symmetric matrix");
        entries_.insert(entries_.end(), row.begin(), row.end());
    }
    *this = SymmetricMatrix(n_, std::move(entries_));
}

SymmetricMatrix SymmetricMatrix::identity(std::size_t n) {
    SymmetricMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m.entries_[i * n + i] = 1.0;
    return m;
}

void SymmetricMatrix::set(std::size_t i, std::size_t j, double value) {
    entries_[i * n_ + j] = value;
    entries_[j * n_ + i] = value;
}

double SymmetricMatrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += entries_[i * n_ + i];
    return t;
}

double SymmetricMatrix::total_sum() const {
    double s = 0.0;
    for (double v : entries_) s += v;
    return s;
}

double SymmetricMatrix::max_diagonal() const {
    double m = entries_[0];
    for (std::size_t i = 1; i < n_; ++i) m = std::max(m, entries_[i * n_ + i]);
    return m;
}

std::vector<double> CholeskyFactor::forward_solve(std::span<const double> b) const {
    if (b.size() != n) throw DimensionMismatch("rhs length does not match factor dimension");
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= lower[i * n + k] * u[k];
        u[i] = s / lower[i * n + i];
    }
    return u;
}

std::vector<double> CholeskyFactor::solve(std::span<const double> b) const {
    std::vector<double> x = forward_solve(b);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= lower[k * n + ii] * x[k];
        x[ii] = s / lower[ii * n + ii];
    }
    return x;
}

void CholeskyFactor::multiply_lower(std::span<const double> z, std::span<double> out) const {
    if (z.size() != n || out.size() != n)
        throw DimensionMismatch("vector length does not match factor dimension");
    for (std::size_t ii = n; ii-- > 0;) {
        double s = 0.0;
        for (std::size_t k = 0; k <= ii; ++k) s += lower[ii * n + k] * z[k];
        out[ii] = s;
    }
}

CholeskyFactor cholesky_factor(const SymmetricMatrix& matrix) {
    const std::size_t n = matrix.size();
    const double threshold =
        static_cast<double>(n) * std::numeric_limits<double>::epsilon() * matrix.max_diagonal();

    CholeskyFactor f;
    f.n = n;
    f.lower.assign(n * n, 0.0);
    double half_logdet = 0.0;

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = matrix(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= f.lower[i * n + k] * f.lower[j * n + k];
            if (i == j) {
                if (!(s > threshold))
                    throw NotPositiveDefinite("pivot " + std::to_string(i) + " is " +
                                              std::to_string(s) + ", at or below threshold " +
                                              std::to_string(threshold));
                const double l = std::sqrt(s);
                f.lower[i * n + i] = l;
                half_logdet += std::log(l);
            } else {
                f.lower[i * n + j] = s / f.lower[j * n + j];
            }
        }
    }
    f.logdet = 2.0 * half_logdet;
    return f;
}

std::vector<double> symmetric_eigenvalues(const SymmetricMatrix& matrix) {
    const auto n = static_cast<Eigen::Index>(matrix.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            m(i, j) = matrix(static_cast<std::size_t>(i), static_cast<std::size_t>(j));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw ConvergenceFailure("symmetric eigenvalue iteration did not converge");

    const auto& ev = solver.eigenvalues();
    return std::vector<double>(ev.data(), ev.data() + n);
}

std::vector<double> spd_solve(const SymmetricMatrix& matrix, std::span<const double> rhs) {
    if (rhs.size() != matrix.size())
        throw DimensionMismatch("rhs length does not match matrix dimension");
    return cholesky_factor(matrix).solve(rhs);
}

SeededStream SeededStream::derive(std::uint64_t subtag) const {
    return SeededStream{seed, mix64(tag ^ (kGolden * (subtag + 1)))};
}

double uniform_draw(const SeededStream& stream, std::uint64_t index) {
    const std::uint64_t bits = mix64(stream_state(stream) + (index + 1) * kGolden);
    // Top 53 bits, offset to the bin center: values lie strictly inside (0,1).
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double normal_draw(const SeededStream& stream, std::uint64_t index) {
    return inverse_normal_cdf(uniform_draw(stream, index));
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.70710678118654752440);
}

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("inverse normal cdf needs p in (0,1)");

    // Wichura (1988), algorithm AS 241, routine PPND16.
    static constexpr double a[8] = {
        3.3871328727963666080e+00, 1.3314166789178437745e+02, 1.9715909503065514427e+03,
        1.3731693765509461125e+04, 4.5921953931549871457e+04, 6.7265770927008700853e+04,
        3.3430575583588128105e+04, 2.5090809287301226727e+03};
    static constexpr double b[8] = {
        1.0,                       4.2313330701600911252e+01, 6.8718700749205790830e+02,
        5.3941960214247511077e+03, 2.1213794301586595867e+04, 3.9307895800092710610e+04,
        2.8729085735721942674e+04, 5.2264952788528545610e+03};
    static constexpr double c[8] = {
        1.42343711074968357734e+00, 4.63033784615654529590e+00, 5.76949722146069140550e+00,
        3.64784832476320460504e+00, 1.27045825245236838258e+00, 2.41780725177450611770e-01,
        2.27238449892691845833e-02, 7.74545014278341407640e-04};
    static constexpr double d[8] = {
        1.0,                        2.05319162663775882187e+00, 1.67638483018380384940e+00,
        6.89767334985100004550e-01, 1.48103976427480074590e-01, 1.51986665636164571966e-02,
        5.47593808499534494600e-04, 1.05075007164441684324e-09};
    static constexpr double e[8] = {
        6.65790464350110377720e+00, 5.46378491116411436990e+00, 1.78482653991729133580e+00,
        2.96560571828504891230e-01, 2.65321895265761230930e-02, 1.24266094738807843860e-03,
        2.71155556874348757815e-05, 2.01033439929228813265e-07};
    static constexpr double f[8] = {
        1.0,                        5.99832206555887937690e-01, 1.36929880922735805310e-01,
        1.48753612908506148525e-02, 7.86869131145613259100e-04, 1.84631831751005468180e-05,
        1.42151175831644588870e-07, 2.04426310338993978564e-15};

    const auto ratio = [](const double (&num)[8], const double (&den)[8], double r) {
        double top = num[7], bot = den[7];
        for (int k = 6; k >= 0; --k) {
            top = top * r + num[k];
            bot = bot * r + den[k];
        }
        return top / bot;
    };

    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * ratio(a, b, r);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        x = ratio(c, d, r - 1.6);
    } else {
        x = ratio(e, f, r - 5.0);
    }
    return (q < 0.0) ? -x : x;
}

}  // namespace mfbs
