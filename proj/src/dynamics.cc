// Copyright 2026 The ddkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ddkit/dynamics.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace ddkit {

namespace {

constexpr Complex kI{0, 1};

Matrix commutator(const Matrix &a, const Matrix &b) {
    return a * b - b * a;
}

Matrix anticommutator(const Matrix &a, const Matrix &b) {
    return a * b + b * a;
}

Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); i++) {
        for (Eigen::Index j = 0; j < a.cols(); j++) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// sigma^alpha on bath spin `site` of n, alpha in {0,x,y,z} as 0..3.
Matrix site_pauli(int alpha, int site, int n) {
    static const std::array<Pauli, 4> kOrder{Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};
    Matrix out = Matrix::Identity(1, 1);
    for (int s = 0; s < n; s++) {
        Matrix factor = s == site ? Matrix(pauli_matrix(kOrder[alpha])) : Matrix(Matrix::Identity(2, 2));
        out = kron(out, factor);
    }
    return out;
}

bool commutes(Pauli a, Pauli b) {
    const auto ua = static_cast<unsigned>(a), ub = static_cast<unsigned>(b);
    const unsigned ax = ua & 1u, az = (ua >> 1) & 1u;
    const unsigned bx = ub & 1u, bz = (ub >> 1) & 1u;
    return ((ax & bz) ^ (az & bx)) == 0;
}

void apply_system_pauli(Vector &psi, Pauli p) {
    const Eigen::Index d = psi.size() / 2;
    switch (p) {
        case Pauli::I:
            return;
        case Pauli::X:
            for (Eigen::Index k = 0; k < d; k++) {
                std::swap(psi(k), psi(d + k));
            }
            return;
        case Pauli::Y:
            for (Eigen::Index k = 0; k < d; k++) {
                const Complex a = psi(k), b = psi(d + k);
                psi(k) = -kI * b;
                psi(d + k) = kI * a;
            }
            return;
        case Pauli::Z:
            psi.tail(d) *= Real(-1);
            return;
    }
}

void require_hermitian(const Matrix &m, const char *what) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument(std::string(what) + " is not square");
    }
    const Real scale = std::max<Real>(1, m.cwiseAbs().maxCoeff());
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > Real(1e-12) * scale) {
        throw std::invalid_argument(std::string(what) + " is not Hermitian");
    }
}

}  // namespace

Matrix2 pauli_matrix(Pauli p) {
    Matrix2 m;
    switch (p) {
        case Pauli::I:
            m << 1, 0, 0, 1;
            break;
        case Pauli::X:
            m << 0, 1, 1, 0;
            break;
        case Pauli::Y:
            m << 0, -kI, kI, 0;
            break;
        case Pauli::Z:
            m << 1, 0, 0, -1;
            break;
    }
    return m;
}

Matrix system_operator(const Matrix2 &sigma, std::size_t bath_dim) {
    return kron(Matrix(sigma), Matrix::Identity(static_cast<Eigen::Index>(bath_dim), static_cast<Eigen::Index>(bath_dim)));
}

Matrix bath_operator(const Matrix &b) {
    return kron(Matrix::Identity(2, 2), b);
}

Real hermitian_norm(const Matrix &h) {
    if (h.size() == 0) {
        return 0;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

Real operator_norm(const Matrix &m) {
    if (m.size() == 0) {
        return 0;
    }
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

SpinBathModel SpinBathModel::from_operators(Matrix b0, Matrix bx, Matrix by, Matrix bz) {
    SpinBathModel m;
    const Eigen::Index d = b0.rows();
    for (const Matrix *op : {&b0, &bx, &by, &bz}) {
        if (op->rows() != d || op->cols() != d) {
            throw std::invalid_argument("bath operators must share one square shape");
        }
    }
    if (d == 0 || (d & (d - 1)) != 0) {
        throw std::invalid_argument("bath dimension must be a power of two");
    }
    require_hermitian(b0, "B_0");
    require_hermitian(bx, "B_x");
    require_hermitian(by, "B_y");
    require_hermitian(bz, "B_z");
    m.n_bath = static_cast<int>(std::countr_zero(static_cast<std::uint64_t>(d)));
    m.b0 = std::move(b0);
    m.b = {std::move(bx), std::move(by), std::move(bz)};
    m.beta = hermitian_norm(m.b0);
    m.j = std::max({hermitian_norm(m.b[0]), hermitian_norm(m.b[1]), hermitian_norm(m.b[2])});
    return m;
}

Matrix SpinBathModel::hamiltonian() const {
    Matrix h = bath_operator(b0);
    for (Axis a : kAxes) {
        h += kron(Matrix(pauli_matrix(pauli_of(a))), b[static_cast<int>(a)]);
    }
    return h;
}

SpinBathModel sample_bath(int n_bath, double beta, double j, Rng &rng) {
    if (n_bath < 2 || n_bath > 6) {
        throw std::invalid_argument("bath size must be between 2 and 6 spins");
    }
    if (beta < 0 || j < 0) {
        throw std::invalid_argument("coupling scales must be non-negative");
    }
    std::vector<std::array<Matrix, 4>> sites(static_cast<std::size_t>(n_bath));
    for (int i = 0; i < n_bath; i++) {
        for (int a = 0; a < 4; a++) {
            sites[i][a] = site_pauli(a, i, n_bath);
        }
    }
    const Eigen::Index d = Eigen::Index{1} << n_bath;
    std::vector<Matrix> terms;  // (i, k, a, b) in draw order
    for (int i = 0; i < n_bath; i++) {
        for (int k = 0; k < n_bath; k++) {
            if (i == k) {
                continue;
            }
            for (int a = 0; a < 4; a++) {
                for (int b = 0; b < 4; b++) {
                    terms.push_back(sites[i][a] * sites[k][b]);
                }
            }
        }
    }
    std::array<Matrix, 4> ops;
    for (auto &op : ops) {
        op = Matrix::Zero(d, d);
        for (const Matrix &term : terms) {
            op += static_cast<Real>(uniform01(rng)) * term;
        }
    }
    const Real n0 = hermitian_norm(ops[0]);
    std::array<Real, 3> nu{hermitian_norm(ops[1]), hermitian_norm(ops[2]), hermitian_norm(ops[3])};
    if (n0 == 0 || *std::min_element(nu.begin(), nu.end()) == 0) {
        throw DegenerateDraw("sampled bath operator has zero norm");
    }
    const Real scale_b = static_cast<Real>(j) / *std::max_element(nu.begin(), nu.end());
    SpinBathModel m;
    m.n_bath = n_bath;
    m.b0 = ops[0] * (static_cast<Real>(beta) / n0);
    for (int u = 0; u < 3; u++) {
        m.b[u] = ops[u + 1] * scale_b;
    }
    m.beta = hermitian_norm(m.b0);
    m.j = std::max({hermitian_norm(m.b[0]), hermitian_norm(m.b[1]), hermitian_norm(m.b[2])});
    return m;
}

HamiltonianSpectrum::HamiltonianSpectrum(const Matrix &h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    values_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
    norm_ = values_.size() ? values_.cwiseAbs().maxCoeff() : 0;
}

Matrix HamiltonianSpectrum::propagator(Real dt) const {
    Vector phases(values_.size());
    for (Eigen::Index k = 0; k < values_.size(); k++) {
        phases(k) = std::exp(-kI * (values_(k) * dt));
    }
    return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

Matrix free_propagator(const SpinBathModel &model, Real dt) {
    if (!(dt > 0)) {
        throw std::invalid_argument("time step must be positive");
    }
    return HamiltonianSpectrum(model.hamiltonian()).propagator(dt);
}

Vector product_state(const Vector2 &psi, const std::vector<int> &bath_bits) {
    const std::size_t n = bath_bits.size();
    const Eigen::Index d = Eigen::Index{1} << n;
    Eigen::Index index = 0;
    for (std::size_t i = 0; i < n; i++) {
        if (bath_bits[i] != 0 && bath_bits[i] != 1) {
            throw std::invalid_argument("bath bits must be 0 or 1");
        }
        index = (index << 1) | bath_bits[i];
    }
    Vector out = Vector::Zero(2 * d);
    out(index) = psi(0);
    out(d + index) = psi(1);
    return out;
}

Vector apply_schedule(const Matrix &slot_propagator, const PulseSchedule &sched, const Vector &psi0) {
    if (slot_propagator.rows() != psi0.size()) {
        throw std::invalid_argument("state and propagator dimensions differ");
    }
    Vector psi = psi0;
    for (const auto &p : sched.pulses()) {
        psi = slot_propagator * psi;
        apply_system_pauli(psi, p.label());
    }
    return psi;
}

Vector apply_schedule(const SpinBathModel &model, const PulseSchedule &sched, const Vector &psi0) {
    return apply_schedule(free_propagator(model, sched.tau0()), sched, psi0);
}

Matrix2 reduced_state(const Vector &psi) {
    const Eigen::Index d = psi.size() / 2;
    if (d == 0 || psi.size() != 2 * d) {
        throw std::invalid_argument("joint state must have even dimension");
    }
    Matrix2 rho;
    for (int a = 0; a < 2; a++) {
        for (int b = 0; b < 2; b++) {
            rho(a, b) = psi.segment(a * d, d).transpose() * psi.segment(b * d, d).conjugate();
        }
    }
    return rho;
}

Real fidelity(const Matrix2 &rho, const Vector2 &psi) {
    const Real overlap = std::real(psi.dot(rho * psi));
    return std::sqrt(std::clamp<Real>(overlap, 0, 1));
}

Real fidelity_loss(const Matrix2 &rho, const Vector2 &psi) {
    // 1 - sqrt(p) = (1 - p) / (1 + sqrt(p)), and 1 - p is the weight on the
    // orthogonal state, which keeps full relative precision for tiny losses.
    const Vector2 perp(-std::conj(psi(1)), std::conj(psi(0)));
    const Real leak = std::clamp<Real>(std::real(perp.dot(rho * perp)), 0, 1) / psi.squaredNorm();
    return leak / (1 + fidelity(rho, psi));
}

std::vector<ToggledSegment> toggled_hamiltonians(const SpinBathModel &model, const PulseSchedule &sched) {
    std::vector<ToggledSegment> out;
    out.reserve(sched.n_slots());
    Pauli frame = Pauli::I;
    for (const auto &p : sched.pulses()) {
        ToggledSegment seg;
        seg.hamiltonian = bath_operator(model.b0);
        for (Axis a : kAxes) {
            const int u = static_cast<int>(a);
            seg.signs[u] = commutes(pauli_of(a), frame) ? +1 : -1;
            seg.hamiltonian += Real(seg.signs[u]) * kron(Matrix(pauli_matrix(pauli_of(a))), model.b[u]);
        }
        out.push_back(std::move(seg));
        frame = p.label() * frame;
    }
    return out;
}

ErrorAction ErrorAction::from_omega(Matrix omega) {
    const Eigen::Index d = omega.rows() / 2;
    ErrorAction e;
    const Matrix bath_part = (omega.topLeftCorner(d, d) + omega.bottomRightCorner(d, d)) / Real(2);
    e.sb_part = omega - bath_operator(bath_part);
    e.omega = std::move(omega);
    return e;
}

Real ErrorAction::epg() const {
    return hermitian_norm(sb_part);
}

ErrorAction magnus_term(const std::vector<ToggledSegment> &toggled, Real tau0, int order) {
    if (toggled.empty()) {
        throw std::invalid_argument("no segments");
    }
    const Eigen::Index n = toggled.front().hamiltonian.rows();
    switch (order) {
        case 1: {
            Matrix sum = Matrix::Zero(n, n);
            for (const auto &seg : toggled) {
                sum += seg.hamiltonian;
            }
            return ErrorAction::from_omega(tau0 * sum);
        }
        case 2: {
            // -(i/2) tau0^2 sum_{k > l} [H_k, H_l], later slot on the left.
            Matrix earlier = Matrix::Zero(n, n);
            Matrix acc = Matrix::Zero(n, n);
            for (const auto &seg : toggled) {
                acc += commutator(seg.hamiltonian, earlier);
                earlier += seg.hamiltonian;
            }
            Matrix omega = (-kI * tau0 * tau0 / Real(2)) * acc;
            return ErrorAction::from_omega((omega + omega.adjoint()) / Real(2));
        }
        case 3: {
            if (toggled.size() != 2) {
                throw UnsupportedOrder("third-order Magnus term is implemented for two segments only");
            }
            const Matrix &h1 = toggled[0].hamiltonian;
            const Matrix &h2 = toggled[1].hamiltonian;
            Matrix omega = (-tau0 * tau0 * tau0 / Real(12)) *
                           (commutator(h2, commutator(h2, h1)) + commutator(h1, commutator(h1, h2)));
            return ErrorAction::from_omega((omega + omega.adjoint()) / Real(2));
        }
        default:
            throw UnsupportedOrder("Magnus order " + std::to_string(order) + " is not supported");
    }
}

Matrix toggling_propagator(const SpinBathModel &model, const PulseSchedule &sched) {
    return toggling_propagator(free_propagator(model, sched.tau0()), sched);
}

Matrix toggling_propagator(const Matrix &u_slot, const PulseSchedule &sched) {
    const Eigen::Index n = u_slot.rows();
    const auto d = static_cast<std::size_t>(n / 2);
    Matrix u = Matrix::Identity(n, n);
    Matrix2 frame = Matrix2::Identity();
    for (const auto &p : sched.pulses()) {
        u = u_slot * u;
        const Matrix2 sigma = pauli_matrix(p.label());
        u = system_operator(sigma, d) * u;
        frame = sigma * frame;
    }
    // U_c(T) = c * 1 for a valid schedule.
    const Complex c = frame.trace() / Real(2);
    return u / c;
}

ErrorAction exact_error_action(const SpinBathModel &model, const PulseSchedule &sched) {
    return exact_error_action(HamiltonianSpectrum(model.hamiltonian()), sched);
}

ErrorAction exact_error_action(const HamiltonianSpectrum &spectrum, const PulseSchedule &sched) {
    const Real horizon = spectrum.norm() * static_cast<Real>(sched.duration());
    if (!(horizon < std::numbers::pi_v<Real>)) {
        throw PrincipalBranchError("|H| T = " + std::to_string(static_cast<double>(horizon)) +
                                   " is not below pi; the principal logarithm is not the error action");
    }
    const Matrix u = toggling_propagator(spectrum.propagator(static_cast<Real>(sched.tau0())), sched);
    Eigen::ComplexSchur<Matrix> schur(u);
    const Matrix &t = schur.matrixT();
    const Matrix &q = schur.matrixU();
    Vector phases(t.rows());
    for (Eigen::Index k = 0; k < t.rows(); k++) {
        Real theta = -std::arg(t(k, k));
        if (theta <= -std::numbers::pi_v<Real>) {
            theta += 2 * std::numbers::pi_v<Real>;
        }
        phases(k) = theta;
    }
    Matrix omega = q * phases.asDiagonal() * q.adjoint();
    return ErrorAction::from_omega((omega + omega.adjoint()) / Real(2));
}

SpinBathModel renormalized_bath_ops(const SpinBathModel &model, Axis axis, Real duration) {
    const int u = static_cast<int>(axis);
    const int v = (u + 1) % 3;
    const int w = (u + 2) % 3;
    const Matrix &b0 = model.b0;
    const Matrix &bu = model.b[u];
    const Matrix &bv = model.b[v];
    const Matrix &bw = model.b[w];
    std::array<Matrix, 3> out = model.b;
    // Second half of the projection is conjugated by sigma_axis, which flips the
    // orthogonal components; (u, v, w) is cyclic.
    out[v] = (duration / Real(2)) * (-kI * commutator(b0, bv) - anticommutator(bu, bw));
    out[w] = (duration / Real(2)) * (-kI * commutator(b0, bw) + anticommutator(bu, bv));
    for (int k : {v, w}) {
        out[k] = (out[k] + out[k].adjoint()) / Real(2);
    }
    return SpinBathModel::from_operators(model.b0, out[0], out[1], out[2]);
}

double loglog_slope(const std::vector<double> &x, const std::vector<double> &y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("slope fit needs at least two paired points");
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); i++) {
        if (!(x[i] > 0) || !(y[i] > 0)) {
            throw std::domain_error("log-log fit needs positive data");
        }
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> epg_vs_tau0(const SpinBathModel &model, const ProjectionString &s,
                                const std::vector<double> &tau0_grid) {
    const PulseSchedule base = compile(s);
    std::vector<double> out;
    out.reserve(tau0_grid.size());
    for (double tau0 : tau0_grid) {
        out.push_back(static_cast<double>(exact_error_action(model, base.with_tau0(tau0)).epg()));
    }
    return out;
}

double estimate_co(const SpinBathModel &model, const std::function<ProjectionString(int)> &family, int alpha,
                   const std::vector<double> &tau0_grid) {
    if (tau0_grid.size() < 4) {
        throw std::invalid_argument("slope fit needs at least 4 grid points");
    }
    const auto [lo, hi] = std::minmax_element(tau0_grid.begin(), tau0_grid.end());
    if (!(*lo > 0) || *hi / *lo < 10 * (1 - 1e-9)) {
        throw std::invalid_argument("tau0 grid must be positive and span at least one decade");
    }
    return loglog_slope(tau0_grid, epg_vs_tau0(model, family(alpha), tau0_grid));
}

}  // namespace ddkit
