#include "cfreq/linalg.hpp"

#include "cfreq/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cfreq {

ComplexMatrix::ComplexMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) fail(ErrorKind::Domain, "matrix dimensions must be non-negative");
    data_.assign(static_cast<std::size_t>(rows) * cols, value_type{});
}

ComplexMatrix ComplexMatrix::identity(int n) {
    ComplexMatrix I(n, n);
    for (int i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix out(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
}

ComplexMatrix ComplexMatrix::conj() const {
    ComplexMatrix out = *this;
    for (auto& v : out.data_) v = std::conj(v);
    return out;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
}

ComplexMatrix ComplexMatrix::submatrix(const std::vector<int>& row_idx,
                                       const std::vector<int>& col_idx) const {
    ComplexMatrix out(static_cast<int>(row_idx.size()), static_cast<int>(col_idx.size()));
    for (std::size_t i = 0; i < row_idx.size(); ++i)
        for (std::size_t j = 0; j < col_idx.size(); ++j)
            out(static_cast<int>(i), static_cast<int>(j)) = (*this)(row_idx[i], col_idx[j]);
    return out;
}

ComplexMatrix& ComplexMatrix::operator*=(value_type c) {
    for (auto& v : data_) v *= c;
    return *this;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) fail(ErrorKind::Domain, "matrix size mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) fail(ErrorKind::Domain, "matrix size mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) fail(ErrorKind::Domain, "matrix product size mismatch");
    ComplexMatrix out(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const auto aik = a(i, k);
            for (int j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) {
    a -= b;
    return a;
}

ComplexMatrix operator*(std::complex<double> c, ComplexMatrix a) {
    a *= c;
    return a;
}

namespace {

constexpr int kMaxSweeps = 30;
constexpr double kThreshold = 1e-13;

void check_finite(const ComplexMatrix& M, const char* who) {
    const auto* p = M.data();
    const std::size_t n = static_cast<std::size_t>(M.rows()) * M.cols();
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(p[i].real()) || !std::isfinite(p[i].imag()))
            fail(ErrorKind::Domain, std::string(who) + ": matrix has non-finite entries");
}

}  // namespace

std::vector<double> singular_values(const ComplexMatrix& M) {
    check_finite(M, "singular_values");
    if (M.rows() == 0 || M.cols() == 0) return {};
    // work on columns of A, with A = M or M^T so that cols <= rows
    const bool flip = M.cols() > M.rows();
    const int r = flip ? M.cols() : M.rows();
    const int c = flip ? M.rows() : M.cols();
    // column-major split storage: re[j*r + i], im[j*r + i]
    std::vector<double> re(static_cast<std::size_t>(r) * c);
    std::vector<double> im(static_cast<std::size_t>(r) * c);
    for (int i = 0; i < M.rows(); ++i)
        for (int j = 0; j < M.cols(); ++j) {
            const auto v = M(i, j);
            const std::size_t idx = flip ? static_cast<std::size_t>(i) * r + j : static_cast<std::size_t>(j) * r + i;
            re[idx] = v.real();
            im[idx] = v.imag();
        }
    const double fro = M.frobenius_norm();
    if (fro == 0.0) return std::vector<double>(static_cast<std::size_t>(c), 0.0);
    const double fro2 = fro * fro;
    const double target = kThreshold * fro2;

    double off = 0.0;
    bool converged = false;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        double off2 = 0.0;
        for (int p = 0; p < c - 1; ++p) {
            for (int q = p + 1; q < c; ++q) {
                double* pr = re.data() + static_cast<std::size_t>(p) * r;
                double* pi = im.data() + static_cast<std::size_t>(p) * r;
                double* qr = re.data() + static_cast<std::size_t>(q) * r;
                double* qi = im.data() + static_cast<std::size_t>(q) * r;
                double alpha = 0.0;
                double beta = 0.0;
                double gr = 0.0;
                double gi = 0.0;
                for (int i = 0; i < r; ++i) {
                    alpha += pr[i] * pr[i] + pi[i] * pi[i];
                    beta += qr[i] * qr[i] + qi[i] * qi[i];
                    // conj(a_p) . a_q
                    gr += pr[i] * qr[i] + pi[i] * qi[i];
                    gi += pr[i] * qi[i] - pi[i] * qr[i];
                }
                const double g = std::hypot(gr, gi);
                off2 += g * g;
                if (g <= 1e-15 * std::sqrt(alpha * beta) || g < 1e-300) continue;
                const double zeta = (beta - alpha) / (2.0 * g);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                const double er = gr / g;  // e^{i phi}
                const double ei = gi / g;
                for (int i = 0; i < r; ++i) {
                    const double apr = pr[i];
                    const double api = pi[i];
                    const double aqr = qr[i];
                    const double aqi = qi[i];
                    // a_p <- c a_p - s e^{-i phi} a_q
                    pr[i] = cs * apr - sn * (er * aqr + ei * aqi);
                    pi[i] = cs * api - sn * (er * aqi - ei * aqr);
                    // a_q <- s e^{i phi} a_p + c a_q
                    qr[i] = sn * (er * apr - ei * api) + cs * aqr;
                    qi[i] = sn * (er * api + ei * apr) + cs * aqi;
                }
            }
        }
        off = std::sqrt(2.0 * off2);
        converged = off <= target;
    }
    if (!converged) {
        // one more measurement after the last sweep
        double off2 = 0.0;
        for (int p = 0; p < c - 1; ++p)
            for (int q = p + 1; q < c; ++q) {
                double gr = 0.0;
                double gi = 0.0;
                for (int i = 0; i < r; ++i) {
                    const std::size_t ip = static_cast<std::size_t>(p) * r + i;
                    const std::size_t iq = static_cast<std::size_t>(q) * r + i;
                    gr += re[ip] * re[iq] + im[ip] * im[iq];
                    gi += re[ip] * im[iq] - im[ip] * re[iq];
                }
                off2 += gr * gr + gi * gi;
            }
        off = std::sqrt(2.0 * off2);
        if (off > target) {
            std::ostringstream msg;
            msg << "one-sided Jacobi SVD did not converge in " << kMaxSweeps
                << " sweeps; off-norm " << off << " vs target " << target;
            fail(ErrorKind::Numeric, msg.str());
        }
    }
    std::vector<double> sv(static_cast<std::size_t>(c));
    for (int j = 0; j < c; ++j) {
        double s = 0.0;
        for (int i = 0; i < r; ++i) {
            const std::size_t idx = static_cast<std::size_t>(j) * r + i;
            s += re[idx] * re[idx] + im[idx] * im[idx];
        }
        sv[static_cast<std::size_t>(j)] = std::sqrt(s);
    }
    std::sort(sv.begin(), sv.end(), std::greater<>());
    return sv;
}

double largest_singular_value(const ComplexMatrix& M) {
    const auto sv = singular_values(M);
    return sv.empty() ? 0.0 : sv.front();
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& H_in) {
    check_finite(H_in, "hermitian_eigenvalues");
    if (H_in.rows() != H_in.cols()) fail(ErrorKind::Domain, "hermitian_eigenvalues: matrix must be square");
    const int n = H_in.rows();
    const double fro = H_in.frobenius_norm();
    double asym = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) asym += std::norm(H_in(i, j) - std::conj(H_in(j, i)));
    if (std::sqrt(asym) > 1e-10 * fro) {
        std::ostringstream msg;
        msg << "matrix is not Hermitian: ||H - H*||_F = " << std::sqrt(asym) << ", ||H||_F = " << fro;
        fail(ErrorKind::Contract, msg.str());
    }
    if (n == 0) return {};
    ComplexMatrix H = hermitian_symmetrize(H_in);
    if (fro == 0.0) return std::vector<double>(static_cast<std::size_t>(n), 0.0);
    const double target = kThreshold * fro;

    auto off_norm = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) s += std::norm(H(i, j));
        return std::sqrt(s);
    };

    double off = off_norm();
    for (int sweep = 0; sweep < kMaxSweeps && off > target; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const std::complex<double> hpq = H(p, q);
                const double g = std::abs(hpq);
                if (g < 1e-300) continue;
                const double a = H(p, p).real();
                const double b = H(q, q).real();
                const std::complex<double> e = hpq / g;
                const std::complex<double> ebar = std::conj(e);
                const double zeta = (b - a) / (2.0 * g);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                // H <- H V, V = [[c, s], [-s ebar, c ebar]] on columns p, q
                for (int k = 0; k < n; ++k) {
                    const auto hkp = H(k, p);
                    const auto hkq = H(k, q);
                    H(k, p) = cs * hkp - sn * ebar * hkq;
                    H(k, q) = sn * hkp + cs * ebar * hkq;
                }
                // H <- V* H
                for (int k = 0; k < n; ++k) {
                    const auto hpk = H(p, k);
                    const auto hqk = H(q, k);
                    H(p, k) = cs * hpk - sn * e * hqk;
                    H(q, k) = sn * hpk + cs * e * hqk;
                }
                H(p, q) = 0.0;
                H(q, p) = 0.0;
                H(p, p) = a - t * g;
                H(q, q) = b + t * g;
            }
        }
        off = off_norm();
    }
    if (off > target) {
        std::ostringstream msg;
        msg << "Hermitian Jacobi did not converge in " << kMaxSweeps << " sweeps; off-norm " << off
            << " vs target " << target;
        fail(ErrorKind::Numeric, msg.str());
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = H(i, i).real();
    std::sort(ev.begin(), ev.end());
    return ev;
}

double smallest_hermitian_eigenvalue(const ComplexMatrix& H) {
    const auto ev = hermitian_eigenvalues(H);
    if (ev.empty()) fail(ErrorKind::Domain, "smallest_hermitian_eigenvalue: empty matrix");
    return ev.front();
}

ComplexMatrix hermitian_symmetrize(const ComplexMatrix& M) {
    if (M.rows() != M.cols()) fail(ErrorKind::Domain, "hermitian_symmetrize: matrix must be square");
    const int n = M.rows();
    ComplexMatrix S(n, n);
    for (int i = 0; i < n; ++i) {
        S(i, i) = M(i, i).real();
        for (int j = i + 1; j < n; ++j) {
            const auto v = 0.5 * (M(i, j) + std::conj(M(j, i)));
            S(i, j) = v;
            S(j, i) = std::conj(v);
        }
    }
    return S;
}

}  // namespace cfreq
