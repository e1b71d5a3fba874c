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

#pragma once

#include <array>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "ddkit/random.h"
#include "ddkit/sequence.h"

namespace ddkit {

// Extended precision: error actions of high-order sequences sit many decades
// below the pure-bath phase they are extracted from.
using Real = long double;
using Complex = std::complex<Real>;
using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using Matrix2 = Eigen::Matrix<Complex, 2, 2>;
using Vector2 = Eigen::Matrix<Complex, 2, 1>;

/// 2x2 Pauli matrix (I, X, Y, Z with their usual phases).
Matrix2 pauli_matrix(Pauli p);
/// sigma (x) 1_d on the joint space, system factor first.
Matrix system_operator(const Matrix2 &sigma, std::size_t bath_dim);
/// 1_2 (x) b.
Matrix bath_operator(const Matrix &b);

/// Largest absolute eigenvalue of a Hermitian matrix.
Real hermitian_norm(const Matrix &h);
/// Largest singular value.
Real operator_norm(const Matrix &m);

class DegenerateDraw : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

class PrincipalBranchError : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

class UnsupportedOrder : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// Bath operators B_0, B_x, B_y, B_z (units 1/s). H = sum_u sigma_u (x) B_u + 1 (x) B_0.
struct SpinBathModel {
    int n_bath = 0;
    Matrix b0;
    std::array<Matrix, 3> b;
    Real beta = 0;
    Real j = 0;

    /// Validates Hermiticity and matching shapes; beta and j are measured.
    static SpinBathModel from_operators(Matrix b0, Matrix bx, Matrix by, Matrix bz);

    std::size_t bath_dim() const {
        return static_cast<std::size_t>(b0.rows());
    }
    std::size_t dim() const {
        return 2 * bath_dim();
    }
    Matrix hamiltonian() const;
};

/// Random pairwise spin-bath model. Each B_mu sums c (sigma^a_i sigma^b_k) over
/// ordered pairs i != k and a, b in {0,x,y,z}, with c ~ U[0,1) drawn
/// independently per (mu, i, k, a, b). B_0 is rescaled to norm beta; the
/// interaction operators share one factor so that max_u |B_u| = j.
SpinBathModel sample_bath(int n_bath, double beta, double j, Rng &rng);

/// Eigendecomposition of the joint Hamiltonian, reused for many propagators.
class HamiltonianSpectrum {
   public:
    explicit HamiltonianSpectrum(const Matrix &h);
    Matrix propagator(Real dt) const;
    Real norm() const {
        return norm_;
    }

   private:
    Eigen::Matrix<Real, Eigen::Dynamic, 1> values_;
    Matrix vectors_;
    Real norm_ = 0;
};

/// exp(-i H dt).
Matrix free_propagator(const SpinBathModel &model, Real dt);

/// |psi> (x) |z_1 ... z_n> with z_i in {0, 1}, bath spin 0 leftmost.
Vector product_state(const Vector2 &psi, const std::vector<int> &bath_bits);

/// Alternates one free slot and one instantaneous pulse, N_T times.
Vector apply_schedule(const SpinBathModel &model, const PulseSchedule &sched, const Vector &psi0);
/// Same, with the slot propagator supplied by the caller.
Vector apply_schedule(const Matrix &slot_propagator, const PulseSchedule &sched, const Vector &psi0);

/// Partial trace over the bath of |psi><psi|.
Matrix2 reduced_state(const Vector &psi);

/// sqrt(<psi| rho |psi>), which equals tr sqrt(sqrt(rho) |psi><psi| sqrt(rho)).
Real fidelity(const Matrix2 &rho, const Vector2 &psi);
/// 1 - fidelity(rho, psi), evaluated without cancellation for rho of unit trace.
Real fidelity_loss(const Matrix2 &rho, const Vector2 &psi);

struct ToggledSegment {
    /// Signs f_u with U_c^dag sigma_u U_c = f_u sigma_u in this slot.
    std::array<int, 3> signs;
    Matrix hamiltonian;
};
std::vector<ToggledSegment> toggled_hamiltonians(const SpinBathModel &model, const PulseSchedule &sched);

struct ErrorAction {
    Matrix omega;
    /// omega - 1_S (x) Tr_S(omega) / 2.
    Matrix sb_part;

    static ErrorAction from_omega(Matrix omega);
    Real epg() const;
};

/// Single Magnus term of the toggling-frame evolution over equal slots tau0.
/// Orders 1 and 2 accept any number of segments; order 3 needs exactly two.
ErrorAction magnus_term(const std::vector<ToggledSegment> &toggled, Real tau0, int order);

/// Omega = i log U_tog(T) on the principal branch. Throws PrincipalBranchError
/// unless |H| T < pi.
ErrorAction exact_error_action(const SpinBathModel &model, const PulseSchedule &sched);
ErrorAction exact_error_action(const HamiltonianSpectrum &spectrum, const PulseSchedule &sched);

/// Joint propagator over the full schedule with the control frame U_c(T)
/// divided out.
Matrix toggling_propagator(const SpinBathModel &model, const PulseSchedule &sched);
Matrix toggling_propagator(const Matrix &slot_propagator, const PulseSchedule &sched);

/// Bath operators after wrapping a sequence of running time `duration` in p_axis,
/// kept to second order: the aligned operator and B_0 are unchanged.
SpinBathModel renormalized_bath_ops(const SpinBathModel &model, Axis axis, Real duration);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double> &x, const std::vector<double> &y);

/// Exact EPG of family(alpha) compiled at each tau0 in the grid.
std::vector<double> epg_vs_tau0(const SpinBathModel &model, const ProjectionString &s,
                                const std::vector<double> &tau0_grid);

/// Fitted slope of log EPG against log tau0; a sequence with CO = alpha gives
/// about alpha + 1. The grid needs at least 4 points spanning a decade.
double estimate_co(const SpinBathModel &model, const std::function<ProjectionString(int)> &family, int alpha,
                   const std::vector<double> &tau0_grid);

}  // namespace ddkit
