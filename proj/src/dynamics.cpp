#include "nems/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <json.hpp>

namespace nems {

namespace {
constexpr double pi = std::numbers::pi;
const cplx I1{0.0, 1.0};

double norm_inf(const SparseOp& op) {
  std::vector<double> rowsum(op.rows(), 0.0);
  for (int k = 0; k < op.outerSize(); ++k)
    for (SparseOp::InnerIterator it(op, k); it; ++it)
      rowsum[it.row()] += std::abs(it.value());
  double m = 0.0;
  for (double v : rowsum) m = std::max(m, v);
  return m;
}
} // namespace

CoupledModeFrame bogoliubov(double omega1, double omega2, double g12,
                            double K1, double K2) {
  const double delta = omega1 - omega2;
  if (delta == 0.0)
    throw validation_error("degenerate modes: the two-mode rotation is "
                           "undefined at zero detuning");
  CoupledModeFrame f;
  f.g12 = g12;
  f.delta = delta;
  f.lambda = 0.5 * std::atan(2.0 * std::abs(g12 / delta));
  const double root = std::sqrt(4.0 * g12 * g12 + delta * delta);
  const double s = delta > 0 ? 1.0 : -1.0;
  f.dressed_freq1 = 0.5 * (omega1 + omega2 + s * root);
  f.dressed_freq2 = 0.5 * (omega1 + omega2 - s * root);
  const double c2 = std::cos(f.lambda) * std::cos(f.lambda);
  const double s2 = std::sin(f.lambda) * std::sin(f.lambda);
  f.dressed_kerr1 = K1 * c2 * c2 + K2 * s2 * s2;
  f.dressed_kerr2 = K2 * c2 * c2 + K1 * s2 * s2;
  f.cross_kerr = 2.0 * (K1 + K2) * c2 * s2;
  return f;
}

double SimScenario::max_coefficient() const {
  double m = 0.0;
  for (const auto& t : terms) {
    m = std::max(m, std::abs(t.coeff.amplitude));
    m = std::max(m, std::abs(t.coeff.frequency));
    if (t.coeff.ramp_harmonic != 0 && schedule.ramp_duration > 0.0)
      m = std::max(m, std::abs(t.coeff.ramp_harmonic) * pi /
                          schedule.ramp_duration);
  }
  for (const auto& d : dissipators) m = std::max(m, d.rate);
  return m;
}

void SimScenario::validate() const {
  if (space.dims.empty()) throw validation_error("scenario has no modes");
  if (!(schedule.t_total > 0.0))
    throw validation_error("scenario needs a positive duration");
  for (const auto& d : dissipators)
    if (d.rate < 0.0) throw validation_error("dissipator rates must be >= 0");
  if (initial_state.size() != space.dim())
    throw validation_error("initial state dimension mismatch");
  // Hermiticity spot-check of H(0).
  DenseOp h = DenseOp::Zero(space.dim(), space.dim());
  for (const auto& t : terms) h += t.coeff.amplitude * DenseOp(t.op);
  const double asym = (h - h.adjoint()).cwiseAbs().maxCoeff();
  const double scale = std::max(1e-12, h.cwiseAbs().maxCoeff());
  if (asym > 1e-9 * scale)
    throw validation_error("scenario Hamiltonian is not Hermitian at t = 0");
}

namespace {

double ramp_phase(const Schedule& sch, double t) {
  if (sch.ramp_duration <= 0.0) return 0.0;
  const double x = std::clamp(t / sch.ramp_duration, 0.0, 1.0);
  return pi * x;
}

cplx coeff_value(const TimeCoeff& c, const Schedule& sch, double t) {
  double phase = -c.frequency * t;
  if (c.ramp_harmonic != 0) phase += c.ramp_harmonic * ramp_phase(sch, t);
  return c.amplitude * std::exp(I1 * phase);
}

double auto_step(const SimScenario& s) {
  double lambda = 0.0;
  for (const auto& t : s.terms)
    lambda += std::abs(t.coeff.amplitude) * norm_inf(t.op);
  for (const auto& d : s.dissipators) {
    const double nl = norm_inf(d.op);
    lambda += d.rate * nl * nl;
  }
  const double cmax = s.max_coefficient();
  double dt = s.schedule.t_total / 64.0;
  if (cmax > 0.0) dt = std::min(dt, 0.05 / cmax);
  // Stability: the stiffest Lindblad mode decays at ~lambda and the RK4
  // region covers |z| dt < 2.78 on the negative axis; dissipation also
  // damps the per-step phase error of the fast modes. Closed-system runs
  // get a tighter step since nothing erases that error.
  const double margin = s.dissipators.empty() ? 0.4 : 2.2;
  if (lambda > 0.0) dt = std::min(dt, margin / lambda);
  return dt;
}

} // namespace

double state_fidelity(const DenseOp& rho, const DenseOp& sigma) {
  Eigen::SelfAdjointEigenSolver<DenseOp> es(rho);
  DenseOp sqrt_rho = DenseOp::Zero(rho.rows(), rho.cols());
  for (int i = 0; i < rho.rows(); ++i) {
    const double ev = std::max(0.0, es.eigenvalues()(i));
    sqrt_rho += std::sqrt(ev) * es.eigenvectors().col(i) *
                es.eigenvectors().col(i).adjoint();
  }
  const DenseOp m = sqrt_rho * sigma * sqrt_rho;
  Eigen::SelfAdjointEigenSolver<DenseOp> es2((m + m.adjoint()) / 2.0);
  double tr = 0.0;
  for (int i = 0; i < m.rows(); ++i)
    tr += std::sqrt(std::max(0.0, es2.eigenvalues()(i)));
  return tr * tr;
}

double state_fidelity(const DenseOp& rho, const StateVec& psi) {
  const cplx v = (psi.adjoint() * rho * psi).value();
  return std::real(v);
}

SimResult evolve(const SimScenario& s) {
  s.validate();
  const bool pure = s.dissipators.empty();
  const int d = s.space.dim();

  double dt = s.schedule.dt > 0.0 ? s.schedule.dt : auto_step(s);
  const long nsteps = std::max<long>(1, std::lround(s.schedule.t_total / dt));
  dt = s.schedule.t_total / static_cast<double>(nsteps);

  const int samples = std::max(2, s.schedule.samples);
  std::vector<long> sample_steps(samples);
  for (int k = 0; k < samples; ++k)
    sample_steps[k] = std::lround(static_cast<double>(k) * nsteps /
                                  (samples - 1));

  SimResult res;
  res.pure = pure;
  for (const auto& [label, op] : s.observables) res.expectations[label];
  for (const auto& [label, ref] : s.fidelity_refs) res.fidelities[label];

  // Precompute L^dag L for dissipators.
  std::vector<SparseOp> ldl;
  for (const auto& dis : s.dissipators)
    ldl.emplace_back(SparseOp(dis.op.adjoint()) * dis.op);

  StateVec psi;
  DenseOp rho;
  if (pure) {
    psi = s.initial_state;
  } else {
    rho = s.initial_state * s.initial_state.adjoint();
  }

  auto rhs_psi = [&](const StateVec& x, double t) {
    StateVec out = StateVec::Zero(d);
    for (const auto& term : s.terms)
      out.noalias() += coeff_value(term.coeff, s.schedule, t) * (term.op * x);
    return StateVec((-I1) * out);
  };
  auto rhs_rho = [&](const DenseOp& x, double t) {
    DenseOp out = DenseOp::Zero(d, d);
    for (const auto& term : s.terms) {
      const cplx f = coeff_value(term.coeff, s.schedule, t);
      out.noalias() += (-I1 * f) * (term.op * x);
      out.noalias() += (I1 * f) * (x * term.op);
    }
    for (std::size_t j = 0; j < s.dissipators.size(); ++j) {
      const auto& dis = s.dissipators[j];
      if (dis.rate == 0.0) continue;
      const DenseOp lx = dis.op * x;
      out.noalias() += dis.rate * (lx * SparseOp(dis.op.adjoint()));
      out.noalias() += (-0.5 * dis.rate) * (ldl[j] * x);
      out.noalias() += (-0.5 * dis.rate) * (x * ldl[j]);
    }
    return out;
  };

  int next_sample = 0;
  int positivity_checks = 0;
  auto record = [&](long step) {
    const double t = step * dt;
    res.times.push_back(t);
    double tr;
    if (pure) {
      tr = psi.squaredNorm();
    } else {
      tr = std::real(rho.trace());
    }
    res.trace.push_back(tr);
    res.max_trace_drift = std::max(res.max_trace_drift, std::abs(tr - 1.0));
    // The Lindblad right-hand side is traceless, so density runs hold the
    // trace to roundoff and 1e-6 flags genuine instability. A pure-state
    // norm is quadratic in the state: classical RK4 weakly damps the
    // fastest (top-Fock) modes, so the norm book-keeping gets a wider
    // budget; the damping bounds the fidelity error by the same amount.
    const double drift_bound = pure ? 1e-3 : 1e-6;
    if (res.max_trace_drift > drift_bound)
      throw step_instability_error(
          "trace drifted by " + std::to_string(res.max_trace_drift) +
          " at t = " + std::to_string(t) + " ns; reduce the step");
    for (const auto& [label, op] : s.observables) {
      cplx v;
      if (pure)
        v = psi.adjoint() * (op * psi);
      else
        v = DenseOp(op * rho).trace();
      res.expectations[label].push_back(v);
    }
    for (const auto& [label, ref] : s.fidelity_refs) {
      double f;
      if (pure) {
        const cplx ov = ref.adjoint() * psi;
        f = std::norm(ov);
      } else {
        f = std::real((ref.adjoint() * rho * ref).value());
      }
      res.fidelities[label].push_back(f);
    }
    // Positivity is sampled sparsely; pure states are positive by
    // construction.
    if (!pure && (step == 0 || step == nsteps ||
                  (next_sample % std::max(1, samples / 6)) == 0)) {
      Eigen::SelfAdjointEigenSolver<DenseOp> es(rho,
                                                Eigen::EigenvaluesOnly);
      res.min_eigenvalue =
          std::min(res.min_eigenvalue, es.eigenvalues().minCoeff());
      ++positivity_checks;
    }
  };

  record(0);
  ++next_sample;
  for (long step = 0; step < nsteps; ++step) {
    const double t = step * dt;
    if (pure) {
      const StateVec k1 = rhs_psi(psi, t);
      const StateVec k2 = rhs_psi(psi + 0.5 * dt * k1, t + 0.5 * dt);
      const StateVec k3 = rhs_psi(psi + 0.5 * dt * k2, t + 0.5 * dt);
      const StateVec k4 = rhs_psi(psi + dt * k3, t + dt);
      psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } else {
      const DenseOp k1 = rhs_rho(rho, t);
      const DenseOp k2 = rhs_rho(rho + 0.5 * dt * k1, t + 0.5 * dt);
      const DenseOp k3 = rhs_rho(rho + 0.5 * dt * k2, t + 0.5 * dt);
      const DenseOp k4 = rhs_rho(rho + dt * k3, t + dt);
      rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      rho = 0.5 * (rho + rho.adjoint().eval());
    }
    while (next_sample < samples && sample_steps[next_sample] == step + 1) {
      record(step + 1);
      ++next_sample;
    }
  }

  if (pure) {
    res.final_state = psi;
    res.final_density = psi * psi.adjoint();
  } else {
    res.final_density = rho;
  }
  return res;
}

// ---- builders --------------------------------------------------------

SimScenario build_kerr_cat(double K, cplx alpha, int dim) {
  const double needed = 4.0 * std::norm(alpha) + 10.0;
  if (dim < needed)
    throw validation_error("Kerr-cat truncation " + std::to_string(dim) +
                           " below the required " + std::to_string(needed));
  SimScenario s;
  s.kind = "kerr_cat";
  s.space.dims = {dim};
  const SparseOp a2 = s.space.lower_pow(0, 2);
  SparseOp x = a2;
  SparseOp id = s.space.identity();
  x -= (alpha * alpha) * id;
  // the physical Kerr is negative, so -K (a^dag2 - conj(alpha)^2)(a^2 -
  // alpha^2) is positive semidefinite with the cat pair as its zero-energy
  // ground manifold
  const SparseOp h = SparseOp(x.adjoint()) * x;
  s.terms.push_back({TimeCoeff{cplx(std::abs(K), 0.0), 0.0, 0}, h, "kerr"});
  s.observables.emplace_back("n0", s.space.number(0));
  if (std::abs(alpha) > 1e-9) {
    s.fidelity_refs.emplace_back("cat+", s.space.cat_1m(dim, alpha, +1));
    s.fidelity_refs.emplace_back("cat-", s.space.cat_1m(dim, alpha, -1));
    s.initial_state = s.space.cat_1m(dim, alpha, +1);
  } else {
    s.fidelity_refs.emplace_back("vacuum", s.space.fock({0}));
    s.initial_state = s.space.fock({0});
  }
  s.schedule.t_total = 10.0 / std::abs(K);
  return s;
}

SimScenario build_bpcnot(double K, cplx alpha1, cplx alpha2,
                         const CoupledModeFrame& frame,
                         const BpcnotResiduals& residuals, int dim_per_mode,
                         double t_gate) {
  const double needed =
      4.0 * std::max(std::norm(alpha1), std::norm(alpha2)) + 10.0;
  if (dim_per_mode < needed)
    throw validation_error("gate truncation " + std::to_string(dim_per_mode) +
                           " below the required " + std::to_string(needed));
  (void)frame; // the rotating-frame scenario is already dressed

  SimScenario s;
  s.kind = "bpcnot";
  s.space.dims = {dim_per_mode, dim_per_mode};
  const SparseOp a1 = s.space.lower(0);
  const SparseOp a2 = s.space.lower_pow(1, 2);
  const SparseOp id = s.space.identity();

  const cplx c = alpha2 * alpha2 / (2.0 * alpha1);
  SparseOp x0 = a2;
  x0 -= SparseOp(c * (alpha1 * id + a1));
  SparseOp x1 = SparseOp((-c) * (alpha1 * id - a1));

  // Control-side stabilization.
  SparseOp y = s.space.lower_pow(0, 2);
  y -= (alpha1 * alpha1) * id;
  SparseOp h_static = SparseOp(y.adjoint()) * y;
  h_static += SparseOp(x0.adjoint()) * x0;
  h_static += SparseOp(x1.adjoint()) * x1;
  // Physical rotating-frame convention: the Kerr is negative, the cat
  // manifold sits on top of the inverted excitation ladder, and a residual
  // drive detuned by +Delta stays off-resonant until its amplitude grows
  // comparable to the detuning.
  const double k_mag = std::abs(K);
  s.terms.push_back(
      {TimeCoeff{cplx(-k_mag, 0.0), 0.0, 0}, h_static, "stabilizers"});

  const SparseOp cross = SparseOp(x0.adjoint()) * x1;
  s.terms.push_back(
      {TimeCoeff{cplx(-k_mag, 0.0), 0.0, -2}, cross, "conditional"});
  s.terms.push_back({TimeCoeff{cplx(-k_mag, 0.0), 0.0, +2},
                     SparseOp(cross.adjoint()), "conditional_hc"});

  if (residuals.omega1 != 0.0) {
    const SparseOp at = s.space.raise(1);
    s.terms.push_back({TimeCoeff{cplx(residuals.omega1, 0.0),
                                 residuals.detuning1, 0},
                       at, "residual_1ph"});
    s.terms.push_back({TimeCoeff{cplx(residuals.omega1, 0.0),
                                 -residuals.detuning1, 0},
                       s.space.lower(1), "residual_1ph_hc"});
  }
  if (residuals.omega2 != 0.0) {
    const SparseOp at2 = SparseOp(s.space.lower_pow(1, 2).adjoint());
    s.terms.push_back({TimeCoeff{cplx(residuals.omega2, 0.0),
                                 residuals.detuning2, 0},
                       at2, "residual_2ph"});
    s.terms.push_back({TimeCoeff{cplx(residuals.omega2, 0.0),
                                 -residuals.detuning2, 0},
                       s.space.lower_pow(1, 2), "residual_2ph_hc"});
  }

  s.schedule.t_total = t_gate;
  s.schedule.ramp_duration = t_gate;

  // Code-space projector on the control mode.
  {
    const int dim = dim_per_mode;
    const StateVec cp = s.space.cat_1m(dim, alpha1, +1);
    const StateVec cm = s.space.cat_1m(dim, alpha1, -1);
    DenseOp p1 = cp * cp.adjoint() + cm * cm.adjoint();
    std::vector<Eigen::Triplet<cplx>> trips;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        if (std::abs(p1(i, j)) > 1e-14)
          for (int k = 0; k < dim; ++k)
            trips.emplace_back(i * dim + k, j * dim + k, p1(i, j));
    SparseOp proj(s.space.dim(), s.space.dim());
    proj.setFromTriplets(trips.begin(), trips.end());
    s.observables.emplace_back("P_code_control", proj);
  }
  s.observables.emplace_back("n0", s.space.number(0));
  s.observables.emplace_back("n1", s.space.number(1));

  const StateVec z0c = s.space.cat_1m(dim_per_mode, alpha1, +1);
  const StateVec z0t = s.space.cat_1m(dim_per_mode, alpha2, +1);
  s.initial_state = s.space.product({z0c, z0t});
  return s;
}

DenseOp bpcnot_ideal_unitary(const FockSpace& space, cplx alpha1, cplx alpha2,
                             int transport_steps) {
  if (space.n_modes() != 2)
    throw validation_error("the gate unitary needs a two-mode space");
  const int d0 = space.dims[0], d1 = space.dims[1];

  // Parallel transport of the target cat pair along beta = alpha2 e^{-i phi}
  // from phi = 0 to pi; the accumulated phase is the geometric one (the
  // instantaneous stabilizer energy is exactly zero on the followed states).
  StateVec vp = space.cat_1m(d1, alpha2, +1);
  StateVec vm = space.cat_1m(d1, alpha2, -1);
  for (int k = 1; k <= transport_steps; ++k) {
    const double phi = pi * k / transport_steps;
    const cplx beta = alpha2 * std::exp(-I1 * phi);
    for (int parity = 0; parity < 2; ++parity) {
      StateVec& v = parity == 0 ? vp : vm;
      StateVec w = space.cat_1m(d1, beta, parity == 0 ? +1 : -1);
      const cplx ov = w.adjoint() * v;
      if (std::abs(ov) < 1e-12)
        throw std::runtime_error("cat transport lost continuity");
      w *= ov / std::abs(ov); // keep <v|w> real positive
      v = w;
    }
  }

  const StateVec cp0 = space.cat_1m(d1, alpha2, +1);
  const StateVec cm0 = space.cat_1m(d1, alpha2, -1);
  DenseOp v_target = vp * cp0.adjoint() + vm * cm0.adjoint();

  // Oblique split of the control code space over |alpha1>, |-alpha1>.
  const StateVec ca = space.coherent_1m(d0, alpha1);
  const StateVec cb = space.coherent_1m(d0, -alpha1);
  Eigen::Matrix2cd gram;
  gram << cplx(1.0, 0.0), ca.adjoint() * cb, cb.adjoint() * ca,
      cplx(1.0, 0.0);
  const Eigen::Matrix2cd ginv = gram.inverse();
  const StateVec da = ginv(0, 0) * ca + ginv(1, 0) * cb; // dual of |alpha1>
  const StateVec db = ginv(0, 1) * ca + ginv(1, 1) * cb;

  const DenseOp pa = ca * da.adjoint();
  const DenseOp pb = cb * db.adjoint();
  const DenseOp id1 = DenseOp::Identity(d1, d1);

  DenseOp u = DenseOp::Zero(d0 * d1, d0 * d1);
  for (int i = 0; i < d0; ++i)
    for (int j = 0; j < d0; ++j) {
      if (std::abs(pa(i, j)) > 1e-15)
        u.block(i * d1, j * d1, d1, d1) += pa(i, j) * id1;
      if (std::abs(pb(i, j)) > 1e-15)
        u.block(i * d1, j * d1, d1, d1) += pb(i, j) * v_target;
    }
  return u;
}

GateFidelity bpcnot_gate_fidelity(const SimScenario& scenario, cplx alpha1,
                                  cplx alpha2) {
  const int dim = scenario.space.dims.at(0);
  const StateVec cp1 = scenario.space.cat_1m(dim, alpha1, +1);
  const StateVec cm1 = scenario.space.cat_1m(dim, alpha1, -1);
  const StateVec cp2 = scenario.space.cat_1m(dim, alpha2, +1);
  const StateVec cm2 = scenario.space.cat_1m(dim, alpha2, -1);
  const StateVec z0c = (cp1 + cm1) / std::sqrt(2.0);
  const StateVec z1c = (cp1 - cm1) / std::sqrt(2.0);
  const StateVec z0t = (cp2 + cm2) / std::sqrt(2.0);
  const StateVec z1t = (cp2 - cm2) / std::sqrt(2.0);

  const DenseOp u_ideal =
      bpcnot_ideal_unitary(scenario.space, alpha1, alpha2);

  GateFidelity out;
  const std::array<std::pair<const StateVec*, const StateVec*>, 4> inputs = {
      {{&z0c, &z0t}, {&z0c, &z1t}, {&z1c, &z0t}, {&z1c, &z1t}}};
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    SimScenario run = scenario;
    run.initial_state =
        scenario.space.product({*inputs[i].first, *inputs[i].second});
    const SimResult res = evolve(run);
    StateVec ideal = u_ideal * run.initial_state;
    ideal /= ideal.norm();
    const cplx ov = ideal.adjoint() * res.final_state;
    out.per_input[i] = std::norm(ov);
    const auto& leak = res.expectations.at("P_code_control");
    out.control_leakage = std::max(
        out.control_leakage, 1.0 - std::real(leak.back()));
  }
  out.average =
      0.25 * (out.per_input[0] + out.per_input[1] + out.per_input[2] +
              out.per_input[3]);
  return out;
}

cplx four_cat_alpha4(double g_c, double kappa_b, cplx eps_b) {
  const cplx eps4 = -2.0 * I1 * g_c * eps_b / kappa_b;
  const double kappa4 = 4.0 * g_c * g_c / kappa_b;
  // dark value of a^4 for H = eps4 a^dag4 + h.c. under rho' = -i[H, rho]
  // + kappa4 D[a^4]; |alpha|^4 = |2 eps4 / kappa4|.
  return -2.0 * I1 * eps4 / kappa4;
}

SimScenario build_four_cat(double g_c, double kappa_b, cplx eps_b,
                           FourCatVariant variant, int dim_storage,
                           int dim_buffer) {
  if (!(kappa_b > 0.0) || !(g_c > 0.0))
    throw validation_error("four-cat stabilizer needs positive g_c, kappa_b");
  const cplx a4_target = four_cat_alpha4(g_c, kappa_b, eps_b);
  const double needed = 4.0 * std::sqrt(std::abs(a4_target)) + 10.0;
  if (dim_storage < needed)
    throw validation_error("storage truncation " +
                           std::to_string(dim_storage) +
                           " below the required " + std::to_string(needed));

  SimScenario s;
  const double kappa4 = 4.0 * g_c * g_c / kappa_b;
  if (variant == FourCatVariant::eliminated) {
    s.kind = "four_cat_eliminated";
    s.space.dims = {dim_storage};
    const cplx eps4 = -2.0 * I1 * g_c * eps_b / kappa_b;
    const SparseOp a4 = s.space.lower_pow(0, 4);
    SparseOp h = SparseOp(eps4 * SparseOp(a4.adjoint()));
    h += SparseOp(std::conj(eps4) * a4);
    s.terms.push_back({TimeCoeff{cplx(1.0, 0.0), 0.0, 0}, h, "four_ph_drive"});
    s.dissipators.push_back({kappa4, a4, "four_ph_loss"});
    s.observables.emplace_back("a4", a4);
    s.observables.emplace_back("n0", s.space.number(0));
    s.initial_state = s.space.fock({0});
  } else {
    s.kind = "four_cat_full";
    s.space.dims = {dim_storage, dim_buffer};
    const SparseOp a4 = s.space.lower_pow(0, 4);
    const SparseOp b = s.space.lower(1);
    SparseOp m = SparseOp(a4.adjoint()) * b;
    SparseOp h = SparseOp(g_c * m);
    h += SparseOp(g_c * SparseOp(m.adjoint()));
    h += SparseOp(eps_b * s.space.raise(1));
    h += SparseOp(std::conj(eps_b) * b);
    s.terms.push_back({TimeCoeff{cplx(1.0, 0.0), 0.0, 0}, h, "coupler"});
    s.dissipators.push_back({kappa_b, b, "buffer_loss"});
    s.observables.emplace_back("a4", a4);
    s.observables.emplace_back("n0", s.space.number(0));
    s.observables.emplace_back("n1", s.space.number(1));
    s.initial_state = s.space.fock({0, 0});
  }
  s.schedule.t_total = 10.0 / kappa4;
  return s;
}

double bpcnot_required_drive(double K, cplx alpha1, cplx alpha2,
                             double g3_driven, const CoupledModeFrame& frame) {
  const double geometry = std::cos(frame.lambda) * std::cos(frame.lambda) *
                          std::sin(frame.lambda);
  if (geometry == 0.0 || g3_driven == 0.0)
    throw validation_error("no three-photon route: zero mixing or zero g3");
  const double rate = std::abs(K) * std::norm(alpha2) / std::abs(alpha1);
  return rate / (1.5 * std::abs(g3_driven) * geometry);
}

std::string sim_result_csv(const SimResult& r) {
  std::ostringstream out;
  out.precision(10);
  out << "t_ns,trace";
  for (const auto& [label, v] : r.expectations)
    out << ",re_" << label << ",im_" << label;
  for (const auto& [label, v] : r.fidelities) out << ",F_" << label;
  out << "\n";
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    out << r.times[i] << "," << r.trace[i];
    for (const auto& [label, v] : r.expectations)
      out << "," << v[i].real() << "," << v[i].imag();
    for (const auto& [label, v] : r.fidelities) out << "," << v[i];
    out << "\n";
  }
  return out.str();
}

std::string sim_result_summary_json(const SimResult& r) {
  nlohmann::json j;
  j["pure"] = r.pure;
  j["max_trace_drift"] = r.max_trace_drift;
  j["min_eigenvalue"] = r.min_eigenvalue;
  j["t_final_ns"] = r.times.empty() ? 0.0 : r.times.back();
  for (const auto& [label, v] : r.expectations)
    j["final"][label] = {v.back().real(), v.back().imag()};
  for (const auto& [label, v] : r.fidelities) j["final_fidelity"][label] = v.back();
  return j.dump(2);
}

namespace {

cplx parse_cplx(const nlohmann::json& j) {
  if (j.is_number()) return cplx(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2)
    return cplx(j.at(0).get<double>(), j.at(1).get<double>());
  throw parse_error("complex values are a number or [re, im]");
}

} // namespace

SimScenario parse_scenario(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("malformed scenario: ") + e.what());
  }
  const std::string kind = j.value("kind", "custom");

  if (kind == "kerr_cat") {
    SimScenario s = build_kerr_cat(j.at("K_GHz").get<double>(),
                                   parse_cplx(j.at("alpha")),
                                   j.value("dim", 30));
    if (j.contains("t_total_ns")) s.schedule.t_total = j.at("t_total_ns");
    return s;
  }
  if (kind == "four_cat") {
    const std::string variant = j.value("variant", "eliminated");
    SimScenario s = build_four_cat(
        j.at("g_c_GHz").get<double>(), j.at("kappa_b_GHz").get<double>(),
        parse_cplx(j.at("eps_b_GHz")),
        variant == "full" ? FourCatVariant::full : FourCatVariant::eliminated,
        j.value("dim_storage", 14), j.value("dim_buffer", 5));
    if (j.contains("t_total_ns")) s.schedule.t_total = j.at("t_total_ns");
    return s;
  }
  if (kind == "bpcnot") {
    const CoupledModeFrame frame = bogoliubov(
        j.value("omega1_GHz", 6.5), j.value("omega2_GHz", 6.0),
        j.value("g12_GHz", 0.05), j.value("K1_GHz", 0.0),
        j.value("K2_GHz", 0.0));
    BpcnotResiduals res;
    res.omega1 = j.value("residual_1ph_GHz", 0.0);
    res.detuning1 = j.value("detuning_1ph_GHz", 0.5);
    res.omega2 = j.value("residual_2ph_GHz", 0.0);
    res.detuning2 = j.value("detuning_2ph_GHz", 0.5);
    return build_bpcnot(j.at("K_GHz").get<double>(),
                        parse_cplx(j.at("alpha1")), parse_cplx(j.at("alpha2")),
                        frame, res, j.value("dim", 26),
                        j.value("t_gate_ns", 201.0));
  }
  if (kind != "custom") throw parse_error("unknown scenario kind '" + kind + "'");

  SimScenario s;
  s.kind = "custom";
  s.space.dims = j.at("modes").get<std::vector<int>>();
  for (const auto& jt : j.value("hamiltonian", nlohmann::json::array())) {
    HamTerm t;
    t.coeff.amplitude = parse_cplx(jt.at("coeff_GHz"));
    t.coeff.frequency = jt.value("frequency_GHz", 0.0);
    t.coeff.ramp_harmonic = jt.value("ramp_harmonic", 0);
    t.op = parse_operator_expr(s.space, jt.at("op").get<std::string>());
    t.label = jt.value("label", jt.at("op").get<std::string>());
    s.terms.push_back(t);
    if (jt.value("add_hc", false)) {
      HamTerm hc;
      hc.coeff.amplitude = std::conj(t.coeff.amplitude);
      hc.coeff.frequency = -t.coeff.frequency;
      hc.coeff.ramp_harmonic = -t.coeff.ramp_harmonic;
      hc.op = SparseOp(t.op.adjoint());
      hc.label = t.label + "_hc";
      s.terms.push_back(hc);
    }
  }
  for (const auto& jd : j.value("dissipators", nlohmann::json::array())) {
    Dissipator d;
    d.rate = jd.at("rate_GHz").get<double>();
    d.op = parse_operator_expr(s.space, jd.at("op").get<std::string>());
    d.label = jd.value("label", jd.at("op").get<std::string>());
    s.dissipators.push_back(d);
  }
  const auto& js = j.at("schedule");
  s.schedule.t_total = js.at("t_total_ns").get<double>();
  s.schedule.dt = js.value("dt_ns", 0.0);
  s.schedule.ramp_duration = js.value("ramp_ns", 0.0);
  s.schedule.samples = js.value("samples", 201);

  const auto& ji = j.at("initial");
  const std::string type = ji.value("type", "fock");
  if (type == "fock") {
    s.initial_state = s.space.fock(ji.at("occupations").get<std::vector<int>>());
  } else if (type == "coherent" || type == "cat") {
    std::vector<StateVec> parts;
    const auto& alphas = ji.at("mode_alphas");
    for (int m = 0; m < s.space.n_modes(); ++m) {
      const cplx a = parse_cplx(alphas.at(m));
      if (type == "coherent")
        parts.push_back(s.space.coherent_1m(s.space.dims[m], a));
      else
        parts.push_back(
            s.space.cat_1m(s.space.dims[m], a, ji.value("parity", +1)));
    }
    s.initial_state = s.space.product(parts);
  } else {
    throw parse_error("initial state type must be fock, coherent or cat");
  }
  for (const auto& jo : j.value("observables", nlohmann::json::array()))
    s.observables.emplace_back(
        jo.value("label", jo.at("op").get<std::string>()),
        parse_operator_expr(s.space, jo.at("op").get<std::string>()));
  if (s.observables.empty())
    for (int m = 0; m < s.space.n_modes(); ++m)
      s.observables.emplace_back("n" + std::to_string(m), s.space.number(m));
  return s;
}

SimScenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open scenario '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

} // namespace nems
